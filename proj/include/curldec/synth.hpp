#pragma once

#include <cstdint>
#include <limits>
#include <tuple>

#include "curldec/types.hpp"

namespace curldec {

enum class Coupling { linear_delta, none };

struct SynthSpec {
    int n_trials = 40;
    double trial_len_s = 2.2;
    double fs_eeg = 125.0;
    Coupling coupling = Coupling::linear_delta;
    double coupling_gain = 1.0;
    double lag_ms_true = 240.0;
    double noise_snr_db = 10.0;  // +inf disables background noise
    std::uint64_t seed = 7;

    void validate() const;
};

struct SynthSession {
    EegRecord eeg;
    JointAngleRecord trajectory;
    TrialMarkerSet markers;
};

// One synthetic recording session. Each trial holds a smooth raised-cosine
// elbow curl (0 -> ~140 degrees and back) with seeded amplitude, duration and
// onset jitter. Under linear_delta coupling a delta-band latent drive that
// precedes the trajectory by lag_ms_true is mixed into the motor-area
// channels (C3 strongest, then Cz, C4) on top of seeded 1/f background noise.
SynthSession generate_session(const SynthSpec& spec);

}  // namespace curldec
