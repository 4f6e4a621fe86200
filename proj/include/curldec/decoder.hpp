#pragma once

#include <filesystem>
#include <functional>
#include <optional>

#include "curldec/features.hpp"
#include "curldec/nn.hpp"

namespace curldec {

struct ModelConfig {
    int n_filters = 32;
    int kernel = 5;
    int stride = 1;
    double dropout = 0.40;
    double l2 = 0.001;
    double lr = 0.001;
    int batch = 15;
    int epochs = 100;
    int dense_units = 8;
    int cam_units = 32;
    int input_len = 200;   // N, samples per window
    int input_ch = 34;     // Nc, feature rows
    std::uint64_t seed = 1;
    nn::Activation cam_act = nn::Activation::sigmoid;
    std::optional<int> patience;  // early stopping, off by default

    void validate() const;
};

struct TrainReport {
    std::vector<double> train_mse;   // data term only, per epoch
    std::vector<double> train_loss;  // data term plus L2 penalty
    std::vector<double> val_mse;
    double test_pcc_windows = std::numeric_limits<double>::quiet_NaN();
    double test_pcc_concat = std::numeric_limits<double>::quiet_NaN();
    double wall_seconds = 0.0;
    int epochs_run = 0;
    ModelConfig config;
};

// Layer chain: DWSConv1D(relu, l2) -> Conv1D(relu, l2) -> MaxPool1D(2,2) ->
// CAM -> Flatten -> Dropout -> Dense(dense_units, swish) x3 ->
// Dense(input_len, linear). He-uniform weights, zero biases, seeded.
nn::Network build_trajectory_net(const ModelConfig& config);

// Deterministic forward pass with dropout disabled. x is Nc x N.
Vector predict(nn::Network& net, const Matrix& x);

// Invoked after each epoch (1-based); useful for monitoring.
using EpochCallback = std::function<void(int epoch, nn::Network& net)>;

TrainReport train(nn::Network& net, const DatasetSplit& split, const ModelConfig& config,
                  const EpochCallback& on_epoch = {});

struct EvalResult {
    double pcc_windows = std::numeric_limits<double>::quiet_NaN();  // mean per-window PCC
    double pcc_concat = std::numeric_limits<double>::quiet_NaN();   // concatenated series PCC
    double mse = std::numeric_limits<double>::quiet_NaN();
    int n_windows = 0;
};

EvalResult evaluate(nn::Network& net, const std::vector<WindowedExample>& examples);

struct CvReport {
    std::vector<double> fold_pcc;
    double mean = 0.0;
    double stddev = 0.0;
};

// Trial-grouped k-fold cross validation over the full example set.
CvReport cross_validate(const std::vector<WindowedExample>& examples, const ModelConfig& config,
                        int k = 10);

// One fold per distinct group_id; the held-out group never appears in training.
CvReport leave_one_group_out(const std::vector<WindowedExample>& examples,
                             const ModelConfig& config);

struct GroupFold {
    int held_group = 0;
    std::vector<const WindowedExample*> train, test;
};

// The fold partition used by leave_one_group_out, exposed so the
// group-exclusivity property can be checked directly.
std::vector<GroupFold> make_logo_folds(const std::vector<WindowedExample>& examples);

// Versioned binary checkpoint: JSON header (layer specs, shapes, seed,
// declared endianness) followed by raw little-endian row-major float64
// tensors.
void save_checkpoint(const std::filesystem::path& path, nn::Network& net,
                     const ModelConfig& config);
nn::Network load_checkpoint(const std::filesystem::path& path, ModelConfig* config_out = nullptr);

std::string model_config_to_json(const ModelConfig& config);
ModelConfig model_config_from_json(const std::string& json, bool reject_unknown = true);

}  // namespace curldec
