#pragma once

#include <cstdint>
#include <filesystem>
#include <set>
#include <string>
#include <vector>

#include "curldec/types.hpp"

namespace curldec {

struct WindowSpec {
    int window_ms = 1600;
    int lag_ms = 240;
    double overlap = 0.95;
    double fs = 125.0;

    int window_samples() const;
    int lag_samples() const;
    int stride_samples() const;
};

// One training pair: the feature window covers [t, t+W), the target covers
// [t+L, t+L+W) of the trajectory.
struct WindowedExample {
    Matrix x;       // Nc x N
    Vector y;       // N
    int trial_id = 0;
    int group_id = 0;
    double t_start = 0.0;
};

std::vector<WindowedExample> make_windows(const Matrix& features, const Vector& trajectory,
                                          const WindowSpec& spec, const TrialMarkerSet& markers,
                                          double t0 = 0.0, int group_id = 0);

// Row-stacks the spatial and harmonic feature families in the listed order.
Matrix combine_features(const Matrix& delta_spatial, const Matrix& delta_sh,
                        const Matrix& delta_h2);
Matrix stack_rows(const std::vector<Matrix>& parts);

enum class SplitGrouping { by_trial, by_window };

struct DatasetSplit {
    std::vector<WindowedExample> train, val, test;
    std::array<double, 3> ratios{0.8, 0.1, 0.1};
    SplitGrouping grouping = SplitGrouping::by_trial;
    std::uint64_t seed = 0;
};

DatasetSplit split_dataset(const std::vector<WindowedExample>& examples,
                           std::array<double, 3> ratios, SplitGrouping grouping,
                           std::uint64_t seed);

enum class AugmentOp { flip, roll };

// Deterministic named transforms plus the seeded augmentation driver.
WindowedExample flip_example(const WindowedExample& e);
WindowedExample roll_example(const WindowedExample& e, int offset);

// Returns the original plus one transformed copy per op; roll offsets are
// seeded uniform in [1, N-1].
std::vector<WindowedExample> augment(const WindowedExample& example,
                                     const std::set<AugmentOp>& ops, std::uint64_t seed);
std::vector<WindowedExample> augment_all(const std::vector<WindowedExample>& examples,
                                         const std::set<AugmentOp>& ops, std::uint64_t seed);

// Dataset directory: per-split CSV shards plus manifest.json.
void save_dataset(const std::filesystem::path& dir, const DatasetSplit& split,
                  const std::string& manifest_json);
DatasetSplit load_dataset(const std::filesystem::path& dir, std::string* manifest_json = nullptr);

}  // namespace curldec
