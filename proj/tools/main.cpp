#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

#include "curldec/csv.hpp"
#include "curldec/metrics.hpp"
#include "curldec/montage.hpp"
#include "curldec/pipeline.hpp"

#include <json.hpp>

namespace fs = std::filesystem;
using namespace curldec;

namespace {

RunConfig load_config(const std::string& config_path) {
    if (config_path.empty()) return RunConfig{};
    return RunConfig::from_json_file(config_path);
}

void cmd_synth(const std::string& out_dir, const SynthSpec& spec) {
    const SynthSession s = generate_session(spec);
    fs::create_directories(out_dir);
    save_eeg_csv(fs::path(out_dir) / "eeg.csv", s.eeg);
    save_trajectory_csv(fs::path(out_dir) / "trajectory.csv", s.trajectory);
    save_markers_csv(fs::path(out_dir) / "markers.csv", s.markers);
    std::cout << "wrote session (" << spec.n_trials << " trials) to " << out_dir << "\n";
}

void cmd_preprocess(const std::string& in, const std::string& out, double fs_out, double cutoff) {
    const EegRecord raw = load_eeg_csv(in);
    const EegRecord clean = preprocess_record(raw, fs_out, cutoff);
    save_eeg_csv(out, clean);
    std::cout << "preprocessed " << in << " -> " << out << " (fs " << clean.fs() << ")\n";
}

void cmd_inject(const std::string& in, const std::string& out, const ArtifactSpec& spec) {
    const EegRecord raw = load_eeg_csv(in);
    save_eeg_csv(out, inject_artifacts(raw, spec));
    std::cout << "artifact-injected " << in << " -> " << out << "\n";
}

void cmd_features(const std::string& in, const std::string& out_dir,
                  const std::vector<std::string>& bands,
                  const std::vector<std::string>& harmonics, const std::string& wavelet,
                  const std::string& method, double lambda, const std::string& montage_file) {
    const EegRecord clean = load_eeg_csv(in);
    const Montage montage =
        montage_file.empty() ? builtin_montage_1020() : load_montage_file(montage_file);
    WaveletSpec wspec;
    wspec.family = wavelet;
    const TransformMethod tm = method == "quadrature" ? TransformMethod::quadrature()
                                                      : TransformMethod::least_squares(lambda);
    fs::create_directories(out_dir);
    std::vector<double> time(static_cast<std::size_t>(clean.length()));
    for (std::size_t i = 0; i < time.size(); ++i)
        time[i] = clean.t0() + static_cast<double>(i) / clean.fs();

    for (const auto& band : bands) {
        const FeatureBuild spatial =
            build_feature_matrix(clean, "spatial:" + band, wspec, montage, tm);
        save_named_matrix_csv(fs::path(out_dir) / ("band_" + band + ".csv"), spatial.names,
                              spatial.rows, time);
        for (const auto& h : harmonics) {
            const FeatureBuild hf = build_feature_matrix(clean, h + ":" + band, wspec, montage, tm);
            save_named_matrix_csv(fs::path(out_dir) / ("band_" + band + "_" + h + ".csv"),
                                  hf.names, hf.rows, time);
        }
    }
    std::cout << "wrote feature CSVs to " << out_dir << "\n";
}

void cmd_dataset(const RunConfig& cfg, const std::string& session_dir, const std::string& out) {
    SynthSession session{
        load_eeg_csv(fs::path(session_dir) / "eeg.csv"),
        load_trajectory_csv(fs::path(session_dir) / "trajectory.csv"),
        load_markers_csv(fs::path(session_dir) / "markers.csv"),
    };
    EegRecord raw = session.eeg;
    if (cfg.artifacts.enabled) raw = inject_artifacts(raw, cfg.artifacts.spec);
    const EegRecord clean = preprocess_record(raw, cfg.preprocess.fs_out, cfg.preprocess.cutoff_hz);
    const Montage montage = cfg.features.montage_file.empty()
                                ? builtin_montage_1020()
                                : load_montage_file(cfg.features.montage_file);
    WaveletSpec wspec;
    wspec.family = cfg.features.wavelet;
    const TransformMethod tm = cfg.features.method == "quadrature"
                                   ? TransformMethod::quadrature()
                                   : TransformMethod::least_squares(cfg.features.lambda);
    const FeatureBuild fb = build_feature_matrix(clean, cfg.features.use, wspec, montage, tm);

    WindowSpec ws;
    ws.window_ms = cfg.dataset.window_ms;
    ws.lag_ms = cfg.dataset.lag_ms;
    ws.overlap = cfg.dataset.overlap;
    ws.fs = clean.fs();
    auto examples = make_windows(fb.rows, session.trajectory.angle() / kTargetScale, ws,
                                 session.markers, clean.t0());
    const auto grouping =
        cfg.dataset.split == "by_window" ? SplitGrouping::by_window : SplitGrouping::by_trial;
    DatasetSplit split = split_dataset(examples, cfg.dataset.ratios, grouping, cfg.dataset.seed);

    nlohmann::json manifest;
    manifest["tool"] = "curldec";
    manifest["feature_use"] = cfg.features.use;
    manifest["target_scale"] = kTargetScale;
    manifest["input_len"] = ws.window_samples();
    manifest["input_ch"] = fb.rows.rows();
    manifest["window_ms"] = cfg.dataset.window_ms;
    manifest["lag_ms"] = cfg.dataset.lag_ms;
    manifest["seed"] = cfg.dataset.seed;
    save_dataset(out, split, manifest.dump(2) + "\n");
    std::cout << "dataset: " << split.train.size() << " train / " << split.val.size()
              << " val / " << split.test.size() << " test examples -> " << out << "\n";
}

void cmd_train(const RunConfig& cfg, const std::string& dataset_dir, const std::string& model_out,
               const std::string& report_out) {
    std::string manifest_text;
    DatasetSplit split = load_dataset(dataset_dir, &manifest_text);
    const auto manifest = nlohmann::json::parse(manifest_text);
    ModelConfig mc = cfg.model;
    mc.input_len = manifest["input_len"].get<int>();
    mc.input_ch = manifest["input_ch"].get<int>();
    if (!cfg.dataset.augment.empty()) {
        std::set<AugmentOp> ops;
        for (const auto& a : cfg.dataset.augment)
            ops.insert(a == "flip" ? AugmentOp::flip : AugmentOp::roll);
        split.train = augment_all(split.train, ops, cfg.dataset.seed);
    }
    nn::Network net = build_trajectory_net(mc);
    const TrainReport report = train(net, split, mc);
    save_checkpoint(model_out, net, mc);
    nlohmann::json j;
    j["epochs_run"] = report.epochs_run;
    j["train_mse"] = report.train_mse;
    j["train_loss"] = report.train_loss;
    j["val_mse"] = report.val_mse;
    j["test_pcc_windows"] = report.test_pcc_windows;
    j["test_pcc_concat"] = report.test_pcc_concat;
    j["config"] = nlohmann::json::parse(model_config_to_json(mc));
    std::ofstream(report_out) << j.dump(2) + "\n";
    std::cout << "trained " << report.epochs_run << " epochs; test PCC (windows) "
              << report.test_pcc_windows << "; wall " << report.wall_seconds << " s\n";
}

void cmd_eval(const std::string& model_path, const std::string& dataset_dir,
              const std::string& out, const std::string& overlay) {
    ModelConfig mc;
    nn::Network net = load_checkpoint(model_path, &mc);
    DatasetSplit split = load_dataset(dataset_dir);
    const EvalResult ev = evaluate(net, split.test);
    nlohmann::json j;
    j["pcc_windows"] = ev.pcc_windows;
    j["pcc_concat"] = ev.pcc_concat;
    j["mse"] = ev.mse;
    j["n_test_windows"] = ev.n_windows;
    std::ofstream(out) << j.dump(2) + "\n";
    if (!overlay.empty()) {
        std::ofstream ov(overlay);
        ov << "window_index,trial_id,sample_index,actual_deg,predicted_deg\n";
        char buf[96];
        for (std::size_t w = 0; w < split.test.size(); ++w) {
            const Vector pred = predict(net, split.test[w].x);
            for (Eigen::Index i = 0; i < pred.size(); ++i) {
                std::snprintf(buf, sizeof(buf), "%zu,%d,%lld,%.9g,%.9g\n", w,
                              split.test[w].trial_id, static_cast<long long>(i),
                              split.test[w].y[i] * kTargetScale, pred[i] * kTargetScale);
                ov << buf;
            }
        }
    }
    std::cout << "eval: pcc_windows " << ev.pcc_windows << " pcc_concat " << ev.pcc_concat
              << " over " << ev.n_windows << " windows\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"EEG elbow-curl trajectory decoding toolkit"};
    app.require_subcommand(1);

    std::string config_path, out_dir, in_path, out_path, session_dir, dataset_dir;
    std::string model_path, report_path, overlay_path, montage_file;

    // synth
    auto* synth = app.add_subcommand("synth", "generate a synthetic recording session");
    SynthSpec sspec;
    std::string coupling = "linear_delta";
    synth->add_option("--trials", sspec.n_trials);
    synth->add_option("--trial-len", sspec.trial_len_s);
    synth->add_option("--coupling", coupling)->check(CLI::IsMember({"linear_delta", "none"}));
    synth->add_option("--gain", sspec.coupling_gain);
    synth->add_option("--lag-true", sspec.lag_ms_true);
    synth->add_option("--snr", sspec.noise_snr_db);
    synth->add_option("--seed", sspec.seed);
    synth->add_option("--out", out_dir)->required();

    // preprocess
    auto* prep = app.add_subcommand("preprocess", "resample, remove baseline, normalize");
    double fs_out = 125.0, cutoff = 0.5;
    prep->add_option("--in", in_path)->required();
    prep->add_option("--fs-out", fs_out);
    prep->add_option("--cutoff", cutoff);
    prep->add_option("--out", out_path)->required();

    // inject-artifacts
    auto* inject = app.add_subcommand("inject-artifacts", "add synthetic ocular/EMG artifacts");
    ArtifactSpec aspec;
    aspec.ocular_amp = 80.0;
    aspec.emg_snr_db = 6.0;
    inject->add_option("--in", in_path)->required();
    inject->add_option("--seed", aspec.seed);
    inject->add_option("--ocular-rate", aspec.ocular_rate);
    inject->add_option("--ocular-amp", aspec.ocular_amp);
    inject->add_option("--emg-low", aspec.emg_low_hz);
    inject->add_option("--emg-high", aspec.emg_high_hz);
    inject->add_option("--emg-snr", aspec.emg_snr_db);
    inject->add_option("--out", out_path)->required();

    // features
    auto* feat = app.add_subcommand("features", "band and harmonic feature CSVs");
    std::vector<std::string> bands{"delta", "theta", "alpha", "beta", "gamma"};
    std::vector<std::string> harmonics{"sh", "h2"};
    std::string wavelet = "db8", method = "ls";
    double lambda = 1e-6;
    feat->add_option("--in", in_path)->required();
    feat->add_option("--bands", bands)->delimiter(',');
    feat->add_option("--harmonics", harmonics)->delimiter(',');
    feat->add_option("--wavelet", wavelet);
    feat->add_option("--method", method)->check(CLI::IsMember({"ls", "quadrature"}));
    feat->add_option("--lambda", lambda);
    feat->add_option("--montage", montage_file);
    feat->add_option("--out", out_dir)->required();

    // dataset
    auto* dataset = app.add_subcommand("dataset", "windowed train/val/test dataset");
    dataset->add_option("--config", config_path);
    dataset->add_option("--session", session_dir)->required();
    dataset->add_option("--out", out_dir)->required();
    int window_ms = -1, lag_ms = -1;
    double overlap = -1.0;
    std::string split_mode, use;
    std::uint64_t split_seed = 0;
    bool have_split_seed = false;
    dataset->add_option("--window", window_ms);
    dataset->add_option("--lag", lag_ms);
    dataset->add_option("--overlap", overlap);
    dataset->add_option("--split", split_mode)->check(CLI::IsMember({"by_trial", "by_window"}));
    dataset->add_option("--use", use);
    dataset->add_option_function<std::uint64_t>(
        "--seed", [&](const std::uint64_t& v) { split_seed = v; have_split_seed = true; });

    // train
    auto* train_cmd = app.add_subcommand("train", "train the decoder on a dataset");
    int epochs = -1;
    std::uint64_t model_seed = 0;
    bool have_model_seed = false;
    train_cmd->add_option("--config", config_path);
    train_cmd->add_option("--dataset", dataset_dir)->required();
    train_cmd->add_option("--out", model_path)->required();
    train_cmd->add_option("--report", report_path)->required();
    train_cmd->add_option("--epochs", epochs);
    train_cmd->add_option_function<std::uint64_t>(
        "--seed", [&](const std::uint64_t& v) { model_seed = v; have_model_seed = true; });

    // eval
    auto* eval_cmd = app.add_subcommand("eval", "evaluate a checkpoint on a dataset");
    eval_cmd->add_option("--model", model_path)->required();
    eval_cmd->add_option("--dataset", dataset_dir)->required();
    eval_cmd->add_option("--out", out_path)->required();
    eval_cmd->add_option("--overlay", overlay_path);

    // run
    auto* run_cmd = app.add_subcommand("run", "full pipeline from config");
    run_cmd->add_option("--config", config_path);
    run_cmd->add_option("--out", out_dir)->required();

    // sweep
    auto* sweep_cmd = app.add_subcommand("sweep", "window x lag x feature grid");
    SweepSpec sw;
    sweep_cmd->add_option("--config", config_path);
    sweep_cmd->add_option("--windows", sw.windows)->delimiter(',');
    sweep_cmd->add_option("--lags", sw.lags)->delimiter(',');
    sweep_cmd->add_option("--features", sw.features)->delimiter(',');
    sweep_cmd->add_option("--out", out_dir)->required();

    // report
    auto* report_cmd = app.add_subcommand("report", "re-emit sweep report from cached cells");
    report_cmd->add_option("--sweep", out_dir)->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (synth->parsed()) {
            sspec.coupling = coupling == "none" ? Coupling::none : Coupling::linear_delta;
            cmd_synth(out_dir, sspec);
        } else if (prep->parsed()) {
            cmd_preprocess(in_path, out_path, fs_out, cutoff);
        } else if (inject->parsed()) {
            cmd_inject(in_path, out_path, aspec);
        } else if (feat->parsed()) {
            cmd_features(in_path, out_dir, bands, harmonics, wavelet, method, lambda,
                         montage_file);
        } else if (dataset->parsed()) {
            RunConfig cfg = load_config(config_path);
            if (window_ms > 0) cfg.dataset.window_ms = window_ms;
            if (lag_ms >= 0) cfg.dataset.lag_ms = lag_ms;
            if (overlap >= 0.0) cfg.dataset.overlap = overlap;
            if (!split_mode.empty()) cfg.dataset.split = split_mode;
            if (!use.empty()) cfg.features.use = use;
            if (have_split_seed) cfg.dataset.seed = split_seed;
            cmd_dataset(cfg, session_dir, out_dir);
        } else if (train_cmd->parsed()) {
            RunConfig cfg = load_config(config_path);
            if (epochs >= 0) cfg.model.epochs = epochs;
            if (have_model_seed) cfg.model.seed = model_seed;
            cmd_train(cfg, dataset_dir, model_path, report_path);
        } else if (eval_cmd->parsed()) {
            cmd_eval(model_path, dataset_dir, out_path, overlay_path);
        } else if (run_cmd->parsed()) {
            const RunConfig cfg = load_config(config_path);
            const PipelineResult res = run_pipeline(cfg, out_dir);
            std::cout << "pipeline done: pcc_windows " << res.eval.pcc_windows << " pcc_concat "
                      << res.eval.pcc_concat << "\nreport: " << res.report_json.string() << "\n";
        } else if (sweep_cmd->parsed()) {
            const RunConfig cfg = load_config(config_path);
            const auto results = run_sweep(cfg, sw, out_dir);
            const SweepReport rep = emit_sweep_report(out_dir);
            std::cout << rep.table;
            std::cout << "best: " << rep.best.feature_tag << " window " << rep.best.window_ms
                      << " ms lag " << rep.best.lag_ms << " ms pcc " << rep.best.pcc_mean << "\n";
        } else if (report_cmd->parsed()) {
            const SweepReport rep = emit_sweep_report(out_dir);
            std::cout << rep.table;
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.exit_class();
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
