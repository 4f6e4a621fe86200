#pragma once

#include <cstdint>
#include <limits>
#include <optional>

#include "curldec/types.hpp"

namespace curldec {

// DFT-threshold baseline-wander suppression. Coefficients at and below the
// cutoff index k = floor(cutoff_hz * n_dft / fs), plus the mirrored bins at
// the top of the spectrum, are zeroed before the inverse transform.
struct BaselineRemovalSpec {
    double cutoff_hz = 0.5;
    // DFT length; nullopt selects the next power of two >= signal length.
    std::optional<std::size_t> n_dft;
};

// Cutoff bin index for the threshold.
std::size_t baseline_cutoff_index(double cutoff_hz, std::size_t n_dft, double fs);

// Synthetic artifact model: ocular-like low-frequency bursts weighted toward
// frontal channels plus band-limited EMG-like noise at a requested SNR.
struct ArtifactSpec {
    double ocular_rate = 0.25;   // events per second
    double ocular_amp = 0.0;     // microvolts, 0 disables
    double emg_low_hz = 20.0;
    double emg_high_hz = 60.0;
    double emg_snr_db = std::numeric_limits<double>::infinity();  // inf disables
    std::uint64_t seed = 0;
};

// Anti-alias FIR low-pass at 0.45*target_fs followed by decimation (or
// zero-stuffed interpolation for integer upsampling). Output length is
// ceil(len * target_fs / fs).
EegRecord resample(const EegRecord& record, double target_fs);

EegRecord remove_baseline(const EegRecord& record, const BaselineRemovalSpec& spec = {});

// Per channel division by the max absolute value; output range is [-1, 1]
// with max |out| == 1 on every channel.
EegRecord normalize_amplitude(const EegRecord& record);

EegRecord inject_artifacts(const EegRecord& record, const ArtifactSpec& spec);

// Single-channel helpers shared with tests.
std::vector<double> fir_lowpass_taps(double cutoff_norm, int ntaps);
std::vector<double> remove_baseline_channel(const std::vector<double>& x, double fs,
                                            const BaselineRemovalSpec& spec);

}  // namespace curldec
