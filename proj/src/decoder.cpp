#include "curldec/decoder.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>
#include <set>

#include <json.hpp>

#include "curldec/metrics.hpp"

namespace curldec {

using nn::Activation;

namespace {

const char* activation_name(Activation a) {
    switch (a) {
        case Activation::linear: return "linear";
        case Activation::relu: return "relu";
        case Activation::swish: return "swish";
        case Activation::sigmoid: return "sigmoid";
    }
    return "linear";
}

Activation activation_from_name(const std::string& s) {
    if (s == "linear") return Activation::linear;
    if (s == "relu") return Activation::relu;
    if (s == "swish") return Activation::swish;
    if (s == "sigmoid") return Activation::sigmoid;
    throw Error(ErrorCode::BadConfig, "unknown activation " + s);
}

}  // namespace

void ModelConfig::validate() const {
    if (n_filters <= 0 || kernel <= 0 || stride != 1 || dense_units <= 0 || cam_units <= 0 ||
        batch <= 0 || epochs < 0 || input_len <= 0 || input_ch <= 0)
        throw Error(ErrorCode::BadConfig, "model dimensions must be positive (stride fixed at 1)");
    if (dropout < 0.0 || dropout >= 1.0) throw Error(ErrorCode::BadConfig, "dropout in [0,1)");
    if (l2 < 0.0 || lr < 0.0) throw Error(ErrorCode::BadConfig, "l2 and lr must be >= 0");
    if (input_len < 2 * kernel)
        throw Error(ErrorCode::BadConfig, "window too short for two convolution layers");
    if (cam_units != n_filters)
        throw Error(ErrorCode::BadConfig, "attention width must equal the filter count");
    const int c2 = input_len - 2 * (kernel - 1);
    if (c2 < 2) throw Error(ErrorCode::BadConfig, "no samples left after convolutions");
}

nn::Network build_trajectory_net(const ModelConfig& config) {
    config.validate();
    Rng rng(config.seed);
    nn::Network net;
    net.add(std::make_unique<nn::DwsConv1d>(config.input_ch, config.n_filters, config.kernel,
                                            Activation::relu, config.l2, rng));
    net.add(std::make_unique<nn::Conv1d>(config.n_filters, config.n_filters, config.kernel,
                                         Activation::relu, config.l2, rng));
    net.add(std::make_unique<nn::MaxPool1d>(2, 2));
    net.add(std::make_unique<nn::Cam>(config.cam_units, config.cam_act, rng));
    net.add(std::make_unique<nn::Flatten>());
    net.add(std::make_unique<nn::Dropout>(config.dropout, config.seed ^ 0x9e3779b97f4a7c15ull));
    const int c3 = (config.input_len - 2 * (config.kernel - 1)) / 2;
    int in_width = c3 * config.n_filters;
    for (int i = 0; i < 3; ++i) {
        net.add(std::make_unique<nn::Dense>(in_width, config.dense_units, Activation::swish, rng));
        in_width = config.dense_units;
    }
    net.add(std::make_unique<nn::Dense>(in_width, config.input_len, Activation::linear, rng));
    return net;
}

Vector predict(nn::Network& net, const Matrix& x) {
    const Matrix out = net.forward(x.transpose(), false);
    if (out.rows() != 1)
        throw Error(ErrorCode::ShapeMismatch, "expected a single output row");
    return out.row(0).transpose();
}

namespace {

double l2_penalty(nn::Network& net) {
    double p = 0.0;
    for (const nn::Parameter* q : net.params())
        if (q->l2 > 0.0) p += q->l2 * q->value.squaredNorm();
    return p;
}

void add_l2_grads(nn::Network& net) {
    for (nn::Parameter* q : net.params())
        if (q->l2 > 0.0) q->grad += 2.0 * q->l2 * q->value;
}

double dataset_mse(nn::Network& net, const std::vector<WindowedExample>& examples) {
    if (examples.empty()) return std::numeric_limits<double>::quiet_NaN();
    double acc = 0.0;
    for (const auto& e : examples) {
        const Vector pred = predict(net, e.x);
        acc += mse(e.y, pred);
    }
    return acc / static_cast<double>(examples.size());
}

}  // namespace

EvalResult evaluate(nn::Network& net, const std::vector<WindowedExample>& examples) {
    EvalResult r;
    if (examples.empty()) return r;
    std::vector<double> pccs;
    Vector all_a(static_cast<Eigen::Index>(examples.size()) * examples.front().y.size());
    Vector all_p(all_a.size());
    double acc_mse = 0.0;
    Eigen::Index at = 0;
    for (const auto& e : examples) {
        const Vector pred = predict(net, e.x);
        acc_mse += mse(e.y, pred);
        all_a.segment(at, e.y.size()) = e.y;
        all_p.segment(at, pred.size()) = pred;
        at += e.y.size();
        // windows with a flat target or prediction carry no correlation signal
        const double sa = (e.y.array() - e.y.mean()).matrix().norm();
        const double sp = (pred.array() - pred.mean()).matrix().norm();
        if (sa > 1e-12 && sp > 1e-12) pccs.push_back(pcc(e.y, pred));
    }
    r.n_windows = static_cast<int>(pccs.size());
    if (!pccs.empty())
        r.pcc_windows = std::accumulate(pccs.begin(), pccs.end(), 0.0) /
                        static_cast<double>(pccs.size());
    r.pcc_concat = pcc(all_a, all_p);
    r.mse = acc_mse / static_cast<double>(examples.size());
    return r;
}

TrainReport train(nn::Network& net, const DatasetSplit& split, const ModelConfig& config,
                  const EpochCallback& on_epoch) {
    config.validate();
    if (split.train.empty()) throw Error(ErrorCode::EmptyRecord, "empty training split");
    const auto t_begin = std::chrono::steady_clock::now();

    TrainReport report;
    report.config = config;
    nn::Adam opt(config.lr);
    Rng shuffle_rng(config.seed ^ 0xd1b54a32d192ed03ull);

    std::vector<std::size_t> order(split.train.size());
    std::iota(order.begin(), order.end(), 0);

    const auto n = static_cast<Eigen::Index>(config.input_len);
    double best_val = std::numeric_limits<double>::infinity();
    int since_best = 0;

    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        shuffle_rng.shuffle(order);
        double epoch_data = 0.0, epoch_loss = 0.0;
        std::size_t batches = 0;
        for (std::size_t b0 = 0; b0 < order.size(); b0 += static_cast<std::size_t>(config.batch)) {
            const std::size_t b1 =
                std::min(order.size(), b0 + static_cast<std::size_t>(config.batch));
            const auto bsize = static_cast<double>(b1 - b0);
            net.zero_grads();
            double data_loss = 0.0;
            for (std::size_t i = b0; i < b1; ++i) {
                const auto& e = split.train[order[i]];
                if (e.y.size() != n || e.x.rows() != config.input_ch)
                    throw Error(ErrorCode::ShapeMismatch, "example does not match model input");
                const Matrix out = net.forward(e.x.transpose(), true);
                const Vector pred = out.row(0).transpose();
                data_loss += mse(e.y, pred);
                Matrix grad(1, n);
                grad.row(0) =
                    (2.0 / (static_cast<double>(n) * bsize)) * (pred - e.y).transpose();
                net.backward(grad);
            }
            data_loss /= bsize;
            const double total_loss = data_loss + l2_penalty(net);
            if (!std::isfinite(total_loss))
                throw Error(ErrorCode::NonFiniteLoss,
                            "non-finite loss in batch " + std::to_string(batches) + " of epoch " +
                                std::to_string(epoch));
            add_l2_grads(net);
            opt.step(net.params());
            epoch_data += data_loss;
            epoch_loss += total_loss;
            ++batches;
        }
        report.train_mse.push_back(epoch_data / static_cast<double>(batches));
        report.train_loss.push_back(epoch_loss / static_cast<double>(batches));
        report.val_mse.push_back(dataset_mse(net, split.val));
        report.epochs_run = epoch + 1;
        if (on_epoch) on_epoch(epoch + 1, net);

        if (config.patience && !split.val.empty()) {
            if (report.val_mse.back() < best_val - 1e-12) {
                best_val = report.val_mse.back();
                since_best = 0;
            } else if (++since_best > *config.patience) {
                break;
            }
        }
    }

    if (!split.test.empty()) {
        const EvalResult ev = evaluate(net, split.test);
        report.test_pcc_windows = ev.pcc_windows;
        report.test_pcc_concat = ev.pcc_concat;
    }
    report.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_begin).count();
    return report;
}

namespace {

std::vector<std::vector<int>> fold_groups(std::vector<int> ids, int k, std::uint64_t seed) {
    Rng rng(seed ^ 0x94d049bb133111ebull);
    rng.shuffle(ids);
    std::vector<std::vector<int>> folds(static_cast<std::size_t>(k));
    for (std::size_t i = 0; i < ids.size(); ++i)
        folds[i % static_cast<std::size_t>(k)].push_back(ids[i]);
    return folds;
}

CvReport run_folds(const std::vector<WindowedExample>& examples, const ModelConfig& config,
                   const std::vector<std::vector<int>>& folds, bool by_group) {
    CvReport report;
    for (const auto& held : folds) {
        std::set<int> held_set(held.begin(), held.end());
        DatasetSplit split;
        split.ratios = {1.0, 0.0, 0.0};
        for (const auto& e : examples) {
            const int key = by_group ? e.group_id : e.trial_id;
            if (held_set.count(key)) split.test.push_back(e);
            else split.train.push_back(e);
        }
        if (split.train.empty() || split.test.empty())
            throw Error(ErrorCode::TooFewGroups, "fold with an empty side");
        nn::Network net = build_trajectory_net(config);
        train(net, split, config);
        const EvalResult ev = evaluate(net, split.test);
        report.fold_pcc.push_back(ev.pcc_windows);
    }
    const auto nf = static_cast<double>(report.fold_pcc.size());
    report.mean = std::accumulate(report.fold_pcc.begin(), report.fold_pcc.end(), 0.0) / nf;
    double var = 0.0;
    for (double v : report.fold_pcc) var += (v - report.mean) * (v - report.mean);
    report.stddev = nf > 1 ? std::sqrt(var / (nf - 1.0)) : 0.0;
    return report;
}

}  // namespace

CvReport cross_validate(const std::vector<WindowedExample>& examples, const ModelConfig& config,
                        int k) {
    if (k < 2) throw Error(ErrorCode::InvalidArgument, "need at least 2 folds");
    std::vector<int> trials;
    for (const auto& e : examples)
        if (std::find(trials.begin(), trials.end(), e.trial_id) == trials.end())
            trials.push_back(e.trial_id);
    if (static_cast<int>(trials.size()) < k)
        throw Error(ErrorCode::TooFewGroups, "fewer trial groups than folds");
    return run_folds(examples, config, fold_groups(trials, k, config.seed), false);
}

std::vector<GroupFold> make_logo_folds(const std::vector<WindowedExample>& examples) {
    std::vector<int> groups;
    for (const auto& e : examples)
        if (std::find(groups.begin(), groups.end(), e.group_id) == groups.end())
            groups.push_back(e.group_id);
    if (groups.size() < 2)
        throw Error(ErrorCode::TooFewGroups, "need at least 2 groups to hold one out");
    std::vector<GroupFold> folds;
    for (int g : groups) {
        GroupFold f;
        f.held_group = g;
        for (const auto& e : examples)
            (e.group_id == g ? f.test : f.train).push_back(&e);
        folds.push_back(std::move(f));
    }
    return folds;
}

CvReport leave_one_group_out(const std::vector<WindowedExample>& examples,
                             const ModelConfig& config) {
    const auto folds = make_logo_folds(examples);
    std::vector<std::vector<int>> held;
    for (const auto& f : folds) held.push_back({f.held_group});
    return run_folds(examples, config, held, true);
}

// ---------------------------------------------------------------------------
// checkpoint io

std::string model_config_to_json(const ModelConfig& c) {
    nlohmann::json j{{"n_filters", c.n_filters},
                     {"kernel", c.kernel},
                     {"stride", c.stride},
                     {"dropout", c.dropout},
                     {"l2", c.l2},
                     {"lr", c.lr},
                     {"batch", c.batch},
                     {"epochs", c.epochs},
                     {"dense_units", c.dense_units},
                     {"cam_units", c.cam_units},
                     {"input_len", c.input_len},
                     {"input_ch", c.input_ch},
                     {"seed", c.seed},
                     {"cam_activation", activation_name(c.cam_act)}};
    if (c.patience) j["patience"] = *c.patience;
    return j.dump();
}

ModelConfig model_config_from_json(const std::string& text, bool reject_unknown) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const std::exception& e) {
        throw Error(ErrorCode::BadConfig, std::string("config parse failure: ") + e.what());
    }
    static const std::set<std::string> known{
        "n_filters", "kernel", "stride", "dropout", "l2", "lr", "batch", "epochs",
        "dense_units", "cam_units", "input_len", "input_ch", "seed", "cam_activation",
        "patience"};
    if (reject_unknown)
        for (const auto& [key, value] : j.items())
            if (!known.count(key)) throw Error(ErrorCode::UnknownKey, "unknown model key " + key);
    ModelConfig c;
    c.n_filters = j.value("n_filters", c.n_filters);
    c.kernel = j.value("kernel", c.kernel);
    c.stride = j.value("stride", c.stride);
    c.dropout = j.value("dropout", c.dropout);
    c.l2 = j.value("l2", c.l2);
    c.lr = j.value("lr", c.lr);
    c.batch = j.value("batch", c.batch);
    c.epochs = j.value("epochs", c.epochs);
    c.dense_units = j.value("dense_units", c.dense_units);
    c.cam_units = j.value("cam_units", c.cam_units);
    c.input_len = j.value("input_len", c.input_len);
    c.input_ch = j.value("input_ch", c.input_ch);
    c.seed = j.value("seed", c.seed);
    if (j.contains("cam_activation")) c.cam_act = activation_from_name(j["cam_activation"]);
    if (j.contains("patience")) c.patience = j["patience"].get<int>();
    c.validate();
    return c;
}

void save_checkpoint(const std::filesystem::path& path, nn::Network& net,
                     const ModelConfig& config) {
    nlohmann::json header;
    header["format"] = "curldec-checkpoint";
    header["version"] = 1;
    header["dtype"] = "float64";
    header["endianness"] = "little";
    header["order"] = "row-major";
    header["config"] = nlohmann::json::parse(model_config_to_json(config));
    nlohmann::json layers = nlohmann::json::array();
    for (const auto& l : net.layers()) layers.push_back(l->kind());
    header["layers"] = layers;
    nlohmann::json tensors = nlohmann::json::array();
    for (const nn::Parameter* p : net.params())
        tensors.push_back({{"name", p->name}, {"rows", p->value.rows()}, {"cols", p->value.cols()}});
    header["tensors"] = tensors;
    const std::string htext = header.dump();

    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
    out.write("CDK1", 4);
    const auto hlen = static_cast<std::uint32_t>(htext.size());
    out.write(reinterpret_cast<const char*>(&hlen), sizeof(hlen));
    out.write(htext.data(), static_cast<std::streamsize>(htext.size()));
    for (const nn::Parameter* p : net.params()) {
        for (Eigen::Index r = 0; r < p->value.rows(); ++r)
            for (Eigen::Index c = 0; c < p->value.cols(); ++c) {
                const double v = p->value(r, c);
                out.write(reinterpret_cast<const char*>(&v), sizeof(v));
            }
    }
}

nn::Network load_checkpoint(const std::filesystem::path& path, ModelConfig* config_out) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, "CDK1", 4) != 0)
        throw Error(ErrorCode::BadConfig, "not a checkpoint file: " + path.string());
    std::uint32_t hlen = 0;
    in.read(reinterpret_cast<char*>(&hlen), sizeof(hlen));
    std::string htext(hlen, '\0');
    in.read(htext.data(), hlen);
    if (!in) throw Error(ErrorCode::IoError, "truncated checkpoint header");
    nlohmann::json header = nlohmann::json::parse(htext);
    if (header.value("version", 0) != 1)
        throw Error(ErrorCode::BadConfig, "unsupported checkpoint version");
    const ModelConfig config = model_config_from_json(header["config"].dump(), false);
    nn::Network net = build_trajectory_net(config);
    auto params = net.params();
    const auto& tensors = header["tensors"];
    if (tensors.size() != params.size())
        throw Error(ErrorCode::BadConfig, "checkpoint tensor count mismatch");
    for (std::size_t i = 0; i < params.size(); ++i) {
        const auto rows = tensors[i]["rows"].get<Eigen::Index>();
        const auto cols = tensors[i]["cols"].get<Eigen::Index>();
        if (rows != params[i]->value.rows() || cols != params[i]->value.cols())
            throw Error(ErrorCode::BadConfig,
                        "checkpoint tensor shape mismatch for " + params[i]->name);
        for (Eigen::Index r = 0; r < rows; ++r)
            for (Eigen::Index c = 0; c < cols; ++c) {
                double v = 0.0;
                in.read(reinterpret_cast<char*>(&v), sizeof(v));
                params[i]->value(r, c) = v;
            }
    }
    if (!in) throw Error(ErrorCode::IoError, "truncated checkpoint tensor data");
    if (config_out) *config_out = config;
    return net;
}

}  // namespace curldec
