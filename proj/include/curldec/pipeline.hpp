#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "curldec/decoder.hpp"
#include "curldec/dwt.hpp"
#include "curldec/harmonics.hpp"
#include "curldec/metrics.hpp"
#include "curldec/preprocess.hpp"
#include "curldec/synth.hpp"

namespace curldec {

// End-to-end run configuration; the JSON form rejects unknown keys.
struct RunConfig {
    std::uint64_t seed = 7;
    SynthSpec synth;
    struct Preprocess {
        double fs_out = 125.0;
        double cutoff_hz = 0.5;
    } preprocess;
    struct Artifacts {
        bool enabled = false;
        ArtifactSpec spec;
    } artifacts;
    struct Features {
        std::string wavelet = "db8";
        std::string method = "ls";  // ls | quadrature
        double lambda = 1e-6;
        std::string use = "com";  // com | <family>:<band>[+...], family in spatial/sh/h2
        std::string montage_file;  // empty = builtin
    } features;
    struct Dataset {
        int window_ms = 1600;
        int lag_ms = 240;
        double overlap = 0.95;
        std::string split = "by_trial";
        std::array<double, 3> ratios{0.8, 0.1, 0.1};
        std::uint64_t seed = 3;
        std::vector<std::string> augment{"flip", "roll"};
    } dataset;
    ModelConfig model;
    std::string pcc_mode = "windows";  // windows | concat

    static RunConfig from_json_text(const std::string& text);
    static RunConfig from_json_file(const std::filesystem::path& path);
    std::string to_json() const;
};

// Feature stacking: parses the `use` selector and produces the row-stacked
// feature matrix plus row names. Target trajectories are scaled by
// 1/kTargetScale for training; evaluation is scale free (PCC) and overlays
// are written back in degrees.
inline constexpr double kTargetScale = 180.0;

struct FeatureBuild {
    Matrix rows;
    std::vector<std::string> names;
};

FeatureBuild build_feature_matrix(const EegRecord& clean, const std::string& use,
                                  const WaveletSpec& wavelet, const Montage& montage,
                                  const TransformMethod& method);

EegRecord preprocess_record(const EegRecord& raw, double fs_out, double cutoff_hz);

struct PipelineResult {
    EvalResult eval;
    TrainReport train_report;
    std::filesystem::path report_json;
    std::filesystem::path report_csv;
};

// synth -> (artifacts) -> preprocess -> features -> dataset -> train -> eval
// -> report; writes every artifact plus a manifest under out_dir.
PipelineResult run_pipeline(const RunConfig& config, const std::filesystem::path& out_dir);

struct SweepSpec {
    std::vector<int> windows{320, 800, 1200, 1600};
    std::vector<int> lags{8, 40, 80, 160, 240};
    std::vector<std::string> features{"com"};
};

// Trains and evaluates each (feature, window, lag) cell. Finished cells are
// cached as JSON under out_dir/cells and skipped on resume. Worker count
// comes from the CURLDEC_WORKERS environment variable (default 1).
std::vector<SweepResult> run_sweep(const RunConfig& config, const SweepSpec& sweep,
                                   const std::filesystem::path& out_dir);

// Re-emit the report files from cached sweep cells.
SweepReport emit_sweep_report(const std::filesystem::path& out_dir);

}  // namespace curldec
