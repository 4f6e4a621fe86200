#pragma once

#include <filesystem>

#include "curldec/types.hpp"

namespace curldec {

// The 16 channels of the recording cap (10-20 names), with angular
// coordinates from the published BESA spherical layout table. Channels whose
// tabulated elevation would exceed the 2*pi/3 cap limit are clamped with a
// warning on stderr. Deterministic and side-effect free.
Montage builtin_montage_1020();

// Override file: one line per channel `label,theta_rad,phi_rad`.
Montage load_montage_file(const std::filesystem::path& path);

}  // namespace curldec
