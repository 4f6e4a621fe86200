#include "curldec/features.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "curldec/rng.hpp"

namespace curldec {

int WindowSpec::window_samples() const {
    const double w = window_ms * fs / 1000.0;
    const int n = static_cast<int>(std::llround(w));
    if (std::abs(w - n) > 1e-9 || n <= 0)
        throw Error(ErrorCode::InvalidArgument, "window_ms * fs must be an integral sample count");
    return n;
}

int WindowSpec::lag_samples() const {
    if (lag_ms < 0) throw Error(ErrorCode::InvalidArgument, "lag must be >= 0");
    return static_cast<int>(std::llround(lag_ms * fs / 1000.0));
}

int WindowSpec::stride_samples() const {
    if (overlap < 0.0 || overlap >= 1.0)
        throw Error(ErrorCode::InvalidArgument, "overlap must lie in [0, 1)");
    const int w = window_samples();
    return std::max(1, static_cast<int>(std::llround(w * (1.0 - overlap))));
}

std::vector<WindowedExample> make_windows(const Matrix& features, const Vector& trajectory,
                                          const WindowSpec& spec, const TrialMarkerSet& markers,
                                          double t0, int group_id) {
    const int w = spec.window_samples();
    const int lag = spec.lag_samples();
    const int stride = spec.stride_samples();
    const Eigen::Index t_feat = features.cols();
    const Eigen::Index t_traj = trajectory.size();

    // trial extents in samples: [cue_i, cue_{i+1}), last trial runs to the end
    struct Extent {
        int trial_id;
        Eigen::Index begin, end;
    };
    std::vector<Extent> extents;
    if (markers.size() == 0) {
        extents.push_back({0, 0, t_feat});
    } else {
        for (std::size_t i = 0; i < markers.size(); ++i) {
            const auto& tr = markers.trials()[i];
            const auto begin =
                static_cast<Eigen::Index>(std::ceil((tr.cue_time - t0) * spec.fs - 1e-9));
            const Eigen::Index end =
                i + 1 < markers.size()
                    ? static_cast<Eigen::Index>(
                          std::ceil((markers.trials()[i + 1].cue_time - t0) * spec.fs - 1e-9))
                    : t_feat;
            extents.push_back({tr.trial_id, std::max<Eigen::Index>(0, begin), end});
        }
    }

    std::vector<WindowedExample> out;
    for (const auto& ext : extents) {
        Eigen::Index pos = ext.begin;
        while (true) {
            const Eigen::Index span_end = pos + lag + w;  // full span of EEG + shifted target
            if (span_end > ext.end) break;
            if (pos + w > t_feat) break;
            if (span_end > t_traj) break;  // trajectory too short: skip, not an error
            WindowedExample e;
            e.x = features.middleCols(pos, w);
            e.y = trajectory.segment(pos + lag, w);
            e.trial_id = ext.trial_id;
            e.group_id = group_id;
            e.t_start = t0 + static_cast<double>(pos) / spec.fs;
            out.push_back(std::move(e));
            pos += stride;
        }
    }
    if (out.empty()) throw Error(ErrorCode::NoWindows, "no windows fit the record");
    return out;
}

Matrix stack_rows(const std::vector<Matrix>& parts) {
    if (parts.empty()) throw Error(ErrorCode::InvalidArgument, "nothing to stack");
    const Eigen::Index n = parts.front().cols();
    Eigen::Index rows = 0;
    for (const auto& p : parts) {
        if (p.cols() != n) throw Error(ErrorCode::ShapeMismatch, "sample counts differ");
        rows += p.rows();
    }
    Matrix out(rows, n);
    Eigen::Index at = 0;
    for (const auto& p : parts) {
        out.middleRows(at, p.rows()) = p;
        at += p.rows();
    }
    return out;
}

Matrix combine_features(const Matrix& delta_spatial, const Matrix& delta_sh,
                        const Matrix& delta_h2) {
    return stack_rows({delta_spatial, delta_sh, delta_h2});
}

DatasetSplit split_dataset(const std::vector<WindowedExample>& examples,
                           std::array<double, 3> ratios, SplitGrouping grouping,
                           std::uint64_t seed) {
    const double sum = ratios[0] + ratios[1] + ratios[2];
    if (std::abs(sum - 1.0) > 1e-9)
        throw Error(ErrorCode::InvalidArgument, "split ratios must sum to 1");
    if (examples.empty()) throw Error(ErrorCode::EmptyRecord, "no examples to split");

    DatasetSplit split;
    split.ratios = ratios;
    split.grouping = grouping;
    split.seed = seed;
    Rng rng(seed);

    if (grouping == SplitGrouping::by_window) {
        std::vector<std::size_t> idx(examples.size());
        for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
        rng.shuffle(idx);
        const auto n = idx.size();
        const auto n_train = static_cast<std::size_t>(std::floor(ratios[0] * n));
        const auto n_val = static_cast<std::size_t>(std::floor(ratios[1] * n));
        for (std::size_t i = 0; i < n; ++i) {
            const auto& e = examples[idx[i]];
            if (i < n_train) split.train.push_back(e);
            else if (i < n_train + n_val) split.val.push_back(e);
            else split.test.push_back(e);
        }
        return split;
    }

    // whole trials go to one split so overlapping neighbors never straddle
    std::vector<int> trials;
    for (const auto& e : examples)
        if (std::find(trials.begin(), trials.end(), e.trial_id) == trials.end())
            trials.push_back(e.trial_id);
    std::size_t needed = 0;
    for (double r : ratios)
        if (r > 0.0) ++needed;
    if (trials.size() < needed)
        throw Error(ErrorCode::TooFewGroups, "fewer trial groups than requested splits");

    rng.shuffle(trials);
    const auto n = trials.size();
    const auto n_train = static_cast<std::size_t>(std::floor(ratios[0] * n));
    const auto n_val = static_cast<std::size_t>(std::floor(ratios[1] * n));
    std::set<int> train_set(trials.begin(), trials.begin() + n_train);
    std::set<int> val_set(trials.begin() + n_train, trials.begin() + n_train + n_val);
    for (const auto& e : examples) {
        if (train_set.count(e.trial_id)) split.train.push_back(e);
        else if (val_set.count(e.trial_id)) split.val.push_back(e);
        else split.test.push_back(e);
    }
    return split;
}

WindowedExample flip_example(const WindowedExample& e) {
    WindowedExample out = e;
    out.x = e.x.rowwise().reverse();
    out.y = e.y.reverse();
    return out;
}

WindowedExample roll_example(const WindowedExample& e, int offset) {
    const auto n = static_cast<int>(e.y.size());
    const int k = ((offset % n) + n) % n;
    WindowedExample out = e;
    for (int i = 0; i < n; ++i) {
        const int j = (i + k) % n;
        out.x.col(j) = e.x.col(i);
        out.y[j] = e.y[i];
    }
    return out;
}

std::vector<WindowedExample> augment(const WindowedExample& example,
                                     const std::set<AugmentOp>& ops, std::uint64_t seed) {
    if (ops.empty()) throw Error(ErrorCode::InvalidArgument, "no augmentation ops");
    Rng rng(seed);
    std::vector<WindowedExample> out;
    out.push_back(example);
    if (ops.count(AugmentOp::flip)) out.push_back(flip_example(example));
    if (ops.count(AugmentOp::roll)) {
        const auto n = static_cast<std::uint64_t>(example.y.size());
        const int k = 1 + static_cast<int>(rng.bounded(n - 1));
        out.push_back(roll_example(example, k));
    }
    return out;
}

std::vector<WindowedExample> augment_all(const std::vector<WindowedExample>& examples,
                                         const std::set<AugmentOp>& ops, std::uint64_t seed) {
    std::vector<WindowedExample> out;
    out.reserve(examples.size() * (1 + ops.size()));
    for (std::size_t i = 0; i < examples.size(); ++i) {
        auto batch = augment(examples[i], ops, seed + i);
        for (auto& e : batch) out.push_back(std::move(e));
    }
    return out;
}

namespace {

void save_shard(const std::filesystem::path& path, const std::vector<WindowedExample>& examples) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
    out << "trial_id,group_id,t_start,nc,n,data\n";
    char buf[40];
    for (const auto& e : examples) {
        std::snprintf(buf, sizeof(buf), "%.17g", e.t_start);
        out << e.trial_id << ',' << e.group_id << ',' << buf << ',' << e.x.rows() << ','
            << e.x.cols();
        for (Eigen::Index c = 0; c < e.x.rows(); ++c)
            for (Eigen::Index i = 0; i < e.x.cols(); ++i) {
                std::snprintf(buf, sizeof(buf), "%.17g", e.x(c, i));
                out << ',' << buf;
            }
        for (Eigen::Index i = 0; i < e.y.size(); ++i) {
            std::snprintf(buf, sizeof(buf), "%.17g", e.y[i]);
            out << ',' << buf;
        }
        out << '\n';
    }
}

std::vector<WindowedExample> load_shard(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
    std::string line;
    if (!std::getline(in, line))
        throw Error(ErrorCode::MalformedHeader, "missing header in " + path.string());
    std::vector<WindowedExample> out;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        WindowedExample e;
        const char* p = line.c_str();
        auto next = [&]() {
            char* end = nullptr;
            const double v = std::strtod(p, &end);
            if (end == p)
                throw Error(ErrorCode::MalformedNumber, "bad shard row in " + path.string());
            p = *end == ',' ? end + 1 : end;
            return v;
        };
        e.trial_id = static_cast<int>(next());
        e.group_id = static_cast<int>(next());
        e.t_start = next();
        const auto nc = static_cast<Eigen::Index>(next());
        const auto n = static_cast<Eigen::Index>(next());
        e.x.resize(nc, n);
        for (Eigen::Index c = 0; c < nc; ++c)
            for (Eigen::Index i = 0; i < n; ++i) e.x(c, i) = next();
        e.y.resize(n);
        for (Eigen::Index i = 0; i < n; ++i) e.y[i] = next();
        out.push_back(std::move(e));
    }
    return out;
}

}  // namespace

void save_dataset(const std::filesystem::path& dir, const DatasetSplit& split,
                  const std::string& manifest_json) {
    std::filesystem::create_directories(dir);
    save_shard(dir / "train.csv", split.train);
    save_shard(dir / "val.csv", split.val);
    save_shard(dir / "test.csv", split.test);
    std::ofstream mf(dir / "manifest.json");
    if (!mf) throw Error(ErrorCode::IoError, "cannot write manifest in " + dir.string());
    mf << manifest_json;
}

DatasetSplit load_dataset(const std::filesystem::path& dir, std::string* manifest_json) {
    DatasetSplit split;
    split.train = load_shard(dir / "train.csv");
    split.val = load_shard(dir / "val.csv");
    split.test = load_shard(dir / "test.csv");
    if (manifest_json) {
        std::ifstream mf(dir / "manifest.json");
        if (!mf) throw Error(ErrorCode::IoError, "cannot open manifest in " + dir.string());
        std::stringstream ss;
        ss << mf.rdbuf();
        *manifest_json = ss.str();
    }
    return split;
}

}  // namespace curldec
