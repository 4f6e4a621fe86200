#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "curldec/types.hpp"

namespace curldec {

// EEG CSV: header `time,<label1>,...,<labelK>`, time in seconds, values in
// microvolts, LF line endings, '.' decimal separator. The sampling rate is
// inferred from the median time step; more than 1% jitter is rejected.
EegRecord load_eeg_csv(const std::filesystem::path& path);
void save_eeg_csv(const std::filesystem::path& path, const EegRecord& record);

// Trajectory CSV: header `time,angle_deg`.
JointAngleRecord load_trajectory_csv(const std::filesystem::path& path);
void save_trajectory_csv(const std::filesystem::path& path, const JointAngleRecord& record);

// Markers CSV: header `trial_id,cue_time,movement_onset`.
TrialMarkerSet load_markers_csv(const std::filesystem::path& path);
void save_markers_csv(const std::filesystem::path& path, const TrialMarkerSet& markers);

// Generic numeric matrix with a named header row; used for feature files.
// Rows of the file are time samples, columns are the named series.
void save_named_matrix_csv(const std::filesystem::path& path,
                           const std::vector<std::string>& names, const Matrix& columns_by_row,
                           const std::vector<double>& time);
Matrix load_named_matrix_csv(const std::filesystem::path& path, std::vector<std::string>* names,
                             std::vector<double>* time);

}  // namespace curldec
