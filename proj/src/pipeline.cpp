#include "curldec/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "curldec/csv.hpp"
#include "curldec/metrics.hpp"
#include "curldec/montage.hpp"

namespace curldec {

using nlohmann::json;

namespace {

void reject_unknown(const json& j, const std::set<std::string>& known, const std::string& where) {
    for (const auto& [key, value] : j.items())
        if (!known.count(key))
            throw Error(ErrorCode::UnknownKey, "unknown key `" + key + "` in " + where);
}

Coupling coupling_from_name(const std::string& s) {
    if (s == "linear_delta") return Coupling::linear_delta;
    if (s == "none") return Coupling::none;
    throw Error(ErrorCode::BadConfig, "unknown coupling " + s);
}

std::string coupling_name(Coupling c) {
    return c == Coupling::linear_delta ? "linear_delta" : "none";
}

double snr_from_json(const json& v) {
    if (v.is_string()) {
        if (v == "inf") return std::numeric_limits<double>::infinity();
        throw Error(ErrorCode::BadConfig, "snr must be a number or \"inf\"");
    }
    return v.get<double>();
}

json snr_to_json(double v) {
    if (std::isinf(v)) return "inf";
    return v;
}

std::string json_file_text(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
    out << text;
}

}  // namespace

RunConfig RunConfig::from_json_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const std::exception& e) {
        throw Error(ErrorCode::BadConfig, std::string("config parse failure: ") + e.what());
    }
    reject_unknown(j, {"seed", "synth", "preprocess", "artifacts", "features", "dataset",
                       "model", "pcc_mode"},
                   "config root");
    RunConfig c;
    c.seed = j.value("seed", c.seed);
    if (j.contains("synth")) {
        const auto& s = j["synth"];
        reject_unknown(s, {"trials", "trial_len_s", "fs", "coupling", "coupling_gain",
                           "lag_ms_true", "noise_snr_db", "seed"},
                       "synth");
        c.synth.n_trials = s.value("trials", c.synth.n_trials);
        c.synth.trial_len_s = s.value("trial_len_s", c.synth.trial_len_s);
        c.synth.fs_eeg = s.value("fs", c.synth.fs_eeg);
        if (s.contains("coupling")) c.synth.coupling = coupling_from_name(s["coupling"]);
        c.synth.coupling_gain = s.value("coupling_gain", c.synth.coupling_gain);
        c.synth.lag_ms_true = s.value("lag_ms_true", c.synth.lag_ms_true);
        if (s.contains("noise_snr_db")) c.synth.noise_snr_db = snr_from_json(s["noise_snr_db"]);
        c.synth.seed = s.value("seed", c.synth.seed);
    }
    if (j.contains("preprocess")) {
        const auto& p = j["preprocess"];
        reject_unknown(p, {"fs_out", "cutoff_hz"}, "preprocess");
        c.preprocess.fs_out = p.value("fs_out", c.preprocess.fs_out);
        c.preprocess.cutoff_hz = p.value("cutoff_hz", c.preprocess.cutoff_hz);
    }
    if (j.contains("artifacts")) {
        const auto& a = j["artifacts"];
        reject_unknown(a, {"enabled", "ocular_rate", "ocular_amp", "emg_low", "emg_high",
                           "emg_snr_db", "seed"},
                       "artifacts");
        c.artifacts.enabled = a.value("enabled", false);
        c.artifacts.spec.ocular_rate = a.value("ocular_rate", c.artifacts.spec.ocular_rate);
        c.artifacts.spec.ocular_amp = a.value("ocular_amp", c.artifacts.spec.ocular_amp);
        c.artifacts.spec.emg_low_hz = a.value("emg_low", c.artifacts.spec.emg_low_hz);
        c.artifacts.spec.emg_high_hz = a.value("emg_high", c.artifacts.spec.emg_high_hz);
        if (a.contains("emg_snr_db")) c.artifacts.spec.emg_snr_db = snr_from_json(a["emg_snr_db"]);
        c.artifacts.spec.seed = a.value("seed", c.artifacts.spec.seed);
    }
    if (j.contains("features")) {
        const auto& f = j["features"];
        reject_unknown(f, {"wavelet", "method", "lambda", "use", "montage_file"}, "features");
        c.features.wavelet = f.value("wavelet", c.features.wavelet);
        c.features.method = f.value("method", c.features.method);
        c.features.lambda = f.value("lambda", c.features.lambda);
        c.features.use = f.value("use", c.features.use);
        c.features.montage_file = f.value("montage_file", c.features.montage_file);
    }
    if (j.contains("dataset")) {
        const auto& d = j["dataset"];
        reject_unknown(d, {"window_ms", "lag_ms", "overlap", "split", "ratios", "seed",
                           "augment"},
                       "dataset");
        c.dataset.window_ms = d.value("window_ms", c.dataset.window_ms);
        c.dataset.lag_ms = d.value("lag_ms", c.dataset.lag_ms);
        c.dataset.overlap = d.value("overlap", c.dataset.overlap);
        c.dataset.split = d.value("split", c.dataset.split);
        if (d.contains("ratios")) {
            const auto r = d["ratios"].get<std::vector<double>>();
            if (r.size() != 3) throw Error(ErrorCode::BadConfig, "ratios must have 3 entries");
            c.dataset.ratios = {r[0], r[1], r[2]};
        }
        c.dataset.seed = d.value("seed", c.dataset.seed);
        if (d.contains("augment")) c.dataset.augment = d["augment"].get<std::vector<std::string>>();
    }
    if (j.contains("model")) c.model = model_config_from_json(j["model"].dump(), true);
    c.pcc_mode = j.value("pcc_mode", c.pcc_mode);
    if (c.pcc_mode != "windows" && c.pcc_mode != "concat")
        throw Error(ErrorCode::BadConfig, "pcc_mode must be windows or concat");
    return c;
}

RunConfig RunConfig::from_json_file(const std::filesystem::path& path) {
    return from_json_text(json_file_text(path));
}

std::string RunConfig::to_json() const {
    json j;
    j["seed"] = seed;
    j["synth"] = {{"trials", synth.n_trials},
                  {"trial_len_s", synth.trial_len_s},
                  {"fs", synth.fs_eeg},
                  {"coupling", coupling_name(synth.coupling)},
                  {"coupling_gain", synth.coupling_gain},
                  {"lag_ms_true", synth.lag_ms_true},
                  {"noise_snr_db", snr_to_json(synth.noise_snr_db)},
                  {"seed", synth.seed}};
    j["preprocess"] = {{"fs_out", preprocess.fs_out}, {"cutoff_hz", preprocess.cutoff_hz}};
    j["artifacts"] = {{"enabled", artifacts.enabled},
                      {"ocular_rate", artifacts.spec.ocular_rate},
                      {"ocular_amp", artifacts.spec.ocular_amp},
                      {"emg_low", artifacts.spec.emg_low_hz},
                      {"emg_high", artifacts.spec.emg_high_hz},
                      {"emg_snr_db", snr_to_json(artifacts.spec.emg_snr_db)},
                      {"seed", artifacts.spec.seed}};
    j["features"] = {{"wavelet", features.wavelet},
                     {"method", features.method},
                     {"lambda", features.lambda},
                     {"use", features.use},
                     {"montage_file", features.montage_file}};
    j["dataset"] = {{"window_ms", dataset.window_ms},
                    {"lag_ms", dataset.lag_ms},
                    {"overlap", dataset.overlap},
                    {"split", dataset.split},
                    {"ratios", dataset.ratios},
                    {"seed", dataset.seed},
                    {"augment", dataset.augment}};
    j["model"] = json::parse(model_config_to_json(model));
    j["pcc_mode"] = pcc_mode;
    return j.dump(2) + "\n";
}

EegRecord preprocess_record(const EegRecord& raw, double fs_out, double cutoff_hz) {
    EegRecord r = resample(raw, fs_out);
    BaselineRemovalSpec spec;
    spec.cutoff_hz = cutoff_hz;
    r = remove_baseline(r, spec);
    return normalize_amplitude(r);
}

namespace {

int band_index(const std::string& name) {
    for (int i = 0; i < 5; ++i)
        if (name == BandSet::band_name(i)) return i;
    if (name == "raw") return -1;
    throw Error(ErrorCode::BadConfig, "unknown band " + name);
}

}  // namespace

FeatureBuild build_feature_matrix(const EegRecord& clean, const std::string& use,
                                  const WaveletSpec& wavelet, const Montage& montage,
                                  const TransformMethod& method) {
    std::string selector = use == "com" ? "spatial:delta+sh:delta+h2:delta" : use;
    std::vector<std::string> tokens;
    std::stringstream ss(selector);
    std::string tok;
    while (std::getline(ss, tok, '+')) tokens.push_back(tok);
    if (tokens.empty()) throw Error(ErrorCode::BadConfig, "empty feature selector");

    // band signals computed lazily, only when some token needs them
    std::optional<BandSet> bands;
    auto band_matrix = [&](int idx) -> const Matrix& {
        if (idx < 0) return clean.samples();
        if (!bands) bands = band_signals(clean, wavelet);
        return bands->band(idx);
    };

    FeatureBuild out;
    std::vector<Matrix> parts;
    for (const auto& t : tokens) {
        const auto colon = t.find(':');
        if (colon == std::string::npos)
            throw Error(ErrorCode::BadConfig, "feature token must be family:band, got " + t);
        const std::string family = t.substr(0, colon);
        const std::string band = t.substr(colon + 1);
        const int bidx = band_index(band);
        const Matrix& sig = band_matrix(bidx);
        if (family == "spatial") {
            parts.push_back(sig);
            for (const auto& l : clean.labels()) out.names.push_back(band + ":" + l);
        } else if (family == "sh" || family == "h2") {
            const auto domain = family == "sh" ? HarmonicDomain::SH : HarmonicDomain::H2;
            montage.check_matches(clean);
            const BasisMatrix basis = build_basis_matrix(montage, domain, 2);
            const HarmonicFeatures hf = forward_transform(sig, basis, method);
            parts.push_back(hf.coeffs);
            for (int l = 0; l <= 2; ++l)
                for (int m = -l; m <= l; ++m)
                    out.names.push_back(band + ":" + family + std::to_string(l) +
                                        (m < 0 ? "m" : "p") + std::to_string(std::abs(m)));
        } else {
            throw Error(ErrorCode::BadConfig, "unknown feature family " + family);
        }
    }
    out.rows = stack_rows(parts);
    return out;
}

namespace {

std::set<AugmentOp> parse_augment(const std::vector<std::string>& names) {
    std::set<AugmentOp> ops;
    for (const auto& n : names) {
        if (n == "flip") ops.insert(AugmentOp::flip);
        else if (n == "roll") ops.insert(AugmentOp::roll);
        else throw Error(ErrorCode::BadConfig, "unknown augmentation " + n);
    }
    return ops;
}

TransformMethod method_from_config(const RunConfig::Features& f) {
    if (f.method == "ls") return TransformMethod::least_squares(f.lambda);
    if (f.method == "quadrature") return TransformMethod::quadrature();
    throw Error(ErrorCode::BadConfig, "unknown transform method " + f.method);
}

struct StageOutputs {
    DatasetSplit split;
    std::string feature_use;
    int nc = 0;
};

StageOutputs make_split(const RunConfig& config, const SynthSession& session) {
    EegRecord raw = session.eeg;
    if (config.artifacts.enabled) raw = inject_artifacts(raw, config.artifacts.spec);
    const EegRecord clean =
        preprocess_record(raw, config.preprocess.fs_out, config.preprocess.cutoff_hz);

    const Montage montage = config.features.montage_file.empty()
                                ? builtin_montage_1020()
                                : load_montage_file(config.features.montage_file);
    WaveletSpec wavelet;
    wavelet.family = config.features.wavelet;
    const FeatureBuild fb = build_feature_matrix(clean, config.features.use, wavelet, montage,
                                                 method_from_config(config.features));

    WindowSpec wspec;
    wspec.window_ms = config.dataset.window_ms;
    wspec.lag_ms = config.dataset.lag_ms;
    wspec.overlap = config.dataset.overlap;
    wspec.fs = clean.fs();
    const Vector scaled = session.trajectory.angle() / kTargetScale;
    auto examples =
        make_windows(fb.rows, scaled, wspec, session.markers, clean.t0(), /*group_id=*/0);

    const auto grouping = config.dataset.split == "by_trial" ? SplitGrouping::by_trial
                          : config.dataset.split == "by_window"
                              ? SplitGrouping::by_window
                              : throw Error(ErrorCode::BadConfig,
                                            "split must be by_trial or by_window");
    StageOutputs out;
    out.split = split_dataset(examples, config.dataset.ratios, grouping, config.dataset.seed);
    out.feature_use = config.features.use;
    out.nc = static_cast<int>(fb.rows.rows());
    return out;
}

// Augmentation applies to the training split only, at training time; stored
// dataset shards stay unaugmented.
std::vector<WindowedExample> augmented_train(const std::vector<WindowedExample>& train,
                                             const RunConfig& config) {
    if (config.dataset.augment.empty()) return train;
    const auto ops = parse_augment(config.dataset.augment);
    if (ops.empty()) return train;
    return augment_all(train, ops, config.dataset.seed);
}

json train_report_json(const TrainReport& r) {
    // wall-clock time intentionally not serialized: report artifacts must be
    // byte-identical across reruns of the same config and seeds
    json j;
    j["epochs_run"] = r.epochs_run;
    j["train_mse"] = r.train_mse;
    j["train_loss"] = r.train_loss;
    j["val_mse"] = r.val_mse;
    j["test_pcc_windows"] = r.test_pcc_windows;
    j["test_pcc_concat"] = r.test_pcc_concat;
    j["config"] = json::parse(model_config_to_json(r.config));
    return j;
}

void write_overlay_csv(const std::filesystem::path& path, nn::Network& net,
                       const std::vector<WindowedExample>& test, double fs) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
    out << "window_index,trial_id,sample_index,time_s,actual_deg,predicted_deg\n";
    char buf[96];
    for (std::size_t w = 0; w < test.size(); ++w) {
        const Vector pred = predict(net, test[w].x);
        for (Eigen::Index i = 0; i < pred.size(); ++i) {
            std::snprintf(buf, sizeof(buf), "%zu,%d,%lld,%.9g,%.9g,%.9g\n", w, test[w].trial_id,
                          static_cast<long long>(i),
                          test[w].t_start + static_cast<double>(i) / fs,
                          test[w].y[i] * kTargetScale, pred[i] * kTargetScale);
            out << buf;
        }
    }
}

}  // namespace

PipelineResult run_pipeline(const RunConfig& config, const std::filesystem::path& out_dir) {
    std::filesystem::create_directories(out_dir);

    const SynthSession session = generate_session(config.synth);
    std::filesystem::create_directories(out_dir / "session");
    save_eeg_csv(out_dir / "session" / "eeg.csv", session.eeg);
    save_trajectory_csv(out_dir / "session" / "trajectory.csv", session.trajectory);
    save_markers_csv(out_dir / "session" / "markers.csv", session.markers);

    StageOutputs stage = make_split(config, session);

    ModelConfig mc = config.model;
    WindowSpec wspec;
    wspec.window_ms = config.dataset.window_ms;
    wspec.lag_ms = config.dataset.lag_ms;
    wspec.fs = config.preprocess.fs_out;
    mc.input_len = wspec.window_samples();
    mc.input_ch = stage.nc;

    json manifest;
    manifest["tool"] = "curldec";
    manifest["version"] = "0.1.0";
    manifest["config"] = json::parse(config.to_json());
    manifest["target_scale"] = kTargetScale;
    manifest["feature_use"] = stage.feature_use;
    manifest["input_len"] = mc.input_len;
    manifest["input_ch"] = mc.input_ch;
    manifest["counts"] = {{"train", stage.split.train.size()},
                          {"val", stage.split.val.size()},
                          {"test", stage.split.test.size()}};
    save_dataset(out_dir / "dataset", stage.split, manifest.dump(2) + "\n");

    DatasetSplit train_split = stage.split;
    train_split.train = augmented_train(stage.split.train, config);
    nn::Network net = build_trajectory_net(mc);
    TrainReport report = train(net, train_split, mc);
    save_checkpoint(out_dir / "model.ckpt", net, mc);
    write_text(out_dir / "train_report.json", train_report_json(report).dump(2) + "\n");

    const EvalResult ev = evaluate(net, stage.split.test);
    write_overlay_csv(out_dir / "overlay.csv", net, stage.split.test, config.preprocess.fs_out);

    SweepResult cell;
    cell.feature_tag = stage.feature_use;
    cell.window_ms = config.dataset.window_ms;
    cell.lag_ms = config.dataset.lag_ms;
    cell.pcc_mean = config.pcc_mode == "concat" ? ev.pcc_concat : ev.pcc_windows;
    cell.pcc_std = 0.0;
    cell.n_folds = ev.n_windows;
    const SweepReport rep = sweep_report({cell});
    write_text(out_dir / "report.csv", rep.csv);

    json report_json;
    report_json["feature"] = stage.feature_use;
    report_json["window_ms"] = config.dataset.window_ms;
    report_json["lag_ms"] = config.dataset.lag_ms;
    report_json["pcc_windows"] = ev.pcc_windows;
    report_json["pcc_concat"] = ev.pcc_concat;
    report_json["mse"] = ev.mse;
    report_json["n_test_windows"] = ev.n_windows;
    report_json["train_final_mse"] =
        report.train_mse.empty() ? json() : json(report.train_mse.back());
    write_text(out_dir / "report.json", report_json.dump(2) + "\n");
    write_text(out_dir / "manifest.json", manifest.dump(2) + "\n");

    PipelineResult result;
    result.eval = ev;
    result.train_report = std::move(report);
    result.report_json = out_dir / "report.json";
    result.report_csv = out_dir / "report.csv";
    return result;
}

namespace {

std::string cell_name(const std::string& feature, int window, int lag) {
    std::string f = feature;
    std::replace(f.begin(), f.end(), ':', '-');
    std::replace(f.begin(), f.end(), '+', '_');
    return f + "_w" + std::to_string(window) + "_l" + std::to_string(lag) + ".json";
}

int worker_count() {
    const char* env = std::getenv("CURLDEC_WORKERS");
    if (!env) return 1;
    const int n = std::atoi(env);
    return n > 0 ? n : 1;
}

}  // namespace

std::vector<SweepResult> run_sweep(const RunConfig& config, const SweepSpec& sweep,
                                   const std::filesystem::path& out_dir) {
    if (sweep.windows.empty() || sweep.lags.empty() || sweep.features.empty())
        throw Error(ErrorCode::InvalidArgument, "sweep lists must be nonempty");
    std::filesystem::create_directories(out_dir / "cells");

    const SynthSession session = generate_session(config.synth);

    struct Cell {
        std::string feature;
        int window, lag;
    };
    std::vector<Cell> cells;
    for (const auto& f : sweep.features)
        for (int w : sweep.windows)
            for (int l : sweep.lags) cells.push_back({f, w, l});

    std::atomic<std::size_t> next{0};
    const int workers = std::min<int>(worker_count(), static_cast<int>(cells.size()));
    auto run_cell = [&](const Cell& cell) {
        const auto path = out_dir / "cells" / cell_name(cell.feature, cell.window, cell.lag);
        if (std::filesystem::exists(path)) return;  // resumable: cached cell
        RunConfig cc = config;
        cc.features.use = cell.feature;
        cc.dataset.window_ms = cell.window;
        cc.dataset.lag_ms = cell.lag;
        json out;
        try {
            StageOutputs stage = make_split(cc, session);
            stage.split.train = augmented_train(stage.split.train, cc);
            ModelConfig mc = cc.model;
            WindowSpec wspec;
            wspec.window_ms = cell.window;
            wspec.lag_ms = cell.lag;
            wspec.fs = cc.preprocess.fs_out;
            mc.input_len = wspec.window_samples();
            mc.input_ch = stage.nc;
            nn::Network net = build_trajectory_net(mc);
            train(net, stage.split, mc);
            const EvalResult ev = evaluate(net, stage.split.test);
            out["feature"] = cell.feature;
            out["window_ms"] = cell.window;
            out["lag_ms"] = cell.lag;
            out["pcc_mean"] = cc.pcc_mode == "concat" ? ev.pcc_concat : ev.pcc_windows;
            out["pcc_std"] = 0.0;
            out["n"] = ev.n_windows;
        } catch (const Error& e) {
            // record the failure and continue with the remaining cells
            out["feature"] = cell.feature;
            out["window_ms"] = cell.window;
            out["lag_ms"] = cell.lag;
            out["error"] = e.what();
        }
        write_text(path, out.dump(2) + "\n");
    };

    if (workers <= 1) {
        for (const auto& c : cells) run_cell(c);
    } else {
        std::vector<std::thread> pool;
        for (int i = 0; i < workers; ++i)
            pool.emplace_back([&]() {
                while (true) {
                    const std::size_t i = next.fetch_add(1);
                    if (i >= cells.size()) return;
                    run_cell(cells[i]);
                }
            });
        for (auto& t : pool) t.join();
    }

    std::vector<SweepResult> results;
    for (const auto& c : cells) {
        const auto path = out_dir / "cells" / cell_name(c.feature, c.window, c.lag);
        const json j = json::parse(json_file_text(path));
        if (j.contains("error")) continue;
        SweepResult r;
        r.feature_tag = j["feature"];
        r.window_ms = j["window_ms"];
        r.lag_ms = j["lag_ms"];
        r.pcc_mean = j["pcc_mean"];
        r.pcc_std = j["pcc_std"];
        r.n_folds = j["n"];
        results.push_back(std::move(r));
    }
    if (!results.empty()) {
        const SweepReport rep = sweep_report(results);
        write_text(out_dir / "report.csv", rep.csv);
        write_text(out_dir / "report.json", rep.json);
        write_text(out_dir / "table.txt", rep.table);
    }
    return results;
}

SweepReport emit_sweep_report(const std::filesystem::path& out_dir) {
    std::vector<SweepResult> results;
    const auto dir = out_dir / "cells";
    if (!std::filesystem::exists(dir))
        throw Error(ErrorCode::IoError, "no cells directory under " + out_dir.string());
    std::vector<std::filesystem::path> files;
    for (const auto& e : std::filesystem::directory_iterator(dir))
        if (e.path().extension() == ".json") files.push_back(e.path());
    std::sort(files.begin(), files.end());
    for (const auto& f : files) {
        const json j = json::parse(json_file_text(f));
        if (j.contains("error")) continue;
        SweepResult r;
        r.feature_tag = j["feature"];
        r.window_ms = j["window_ms"];
        r.lag_ms = j["lag_ms"];
        r.pcc_mean = j["pcc_mean"];
        r.pcc_std = j["pcc_std"];
        r.n_folds = j["n"];
        results.push_back(std::move(r));
    }
    const SweepReport rep = sweep_report(results);
    write_text(out_dir / "report.csv", rep.csv);
    write_text(out_dir / "report.json", rep.json);
    write_text(out_dir / "table.txt", rep.table);
    return rep;
}

}  // namespace curldec
