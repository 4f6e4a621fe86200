#include "curldec/synth.hpp"

#include <cmath>

#include "curldec/fft.hpp"
#include "curldec/montage.hpp"
#include "curldec/rng.hpp"

namespace curldec {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Dense-spectrum 1/f noise: shape a white spectrum by 1/sqrt(f) above f_lo,
// zero below, unit rms. A dense spectrum keeps single windows from revealing
// their absolute position in the session.
std::vector<double> pink_noise(std::size_t n, double fs, Rng& rng, double f_lo = 0.3) {
    std::vector<std::complex<double>> spec(n, 0.0);
    for (std::size_t k = 1; k < n / 2 + 1; ++k) {
        const double f = static_cast<double>(k) * fs / static_cast<double>(n);
        if (f < f_lo) continue;
        const double mag = 1.0 / std::sqrt(f);
        const std::complex<double> v(mag * rng.normal(), mag * rng.normal());
        spec[k] = v;
        if (k != n - k && n - k < n) spec[n - k] = std::conj(v);
    }
    if (n % 2 == 0) spec[n / 2] = {spec[n / 2].real(), 0.0};
    auto sig = ifft(spec);
    std::vector<double> out(n);
    double p = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        out[i] = sig[i].real();
        p += out[i] * out[i];
    }
    const double rms = std::sqrt(p / static_cast<double>(n));
    for (auto& v : out) v /= rms > 0.0 ? rms : 1.0;
    return out;
}

// Brickwall bandpass via the DFT; the band is strictly inside the delta range
// so the drive survives baseline removal and the dyadic band split.
std::vector<double> bandlimit(const std::vector<double>& x, double fs, double lo, double hi) {
    const std::size_t n = x.size();
    double mean = 0.0;
    for (double v : x) mean += v;
    mean /= static_cast<double>(n);
    std::vector<double> centered(n);
    for (std::size_t i = 0; i < n; ++i) centered[i] = x[i] - mean;
    auto spec = fft_real(centered, n);
    for (std::size_t k = 0; k < n; ++k) {
        const double f = std::min(static_cast<double>(k), static_cast<double>(n - k)) * fs /
                         static_cast<double>(n);
        if (f < lo || f > hi) spec[k] = 0.0;
    }
    auto sig = ifft(spec);
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = sig[i].real();
    return out;
}

}  // namespace

void SynthSpec::validate() const {
    if (n_trials < 1) throw Error(ErrorCode::InvalidArgument, "need at least one trial");
    if (lag_ms_true < 0.0) throw Error(ErrorCode::InvalidArgument, "true lag must be >= 0");
    if (!(trial_len_s > 1.0)) throw Error(ErrorCode::InvalidArgument, "trials must exceed 1 s");
    if (!(fs_eeg > 0.0)) throw Error(ErrorCode::InvalidArgument, "fs must be positive");
    if (coupling_gain < 0.0) throw Error(ErrorCode::InvalidArgument, "gain must be >= 0");
}

SynthSession generate_session(const SynthSpec& spec) {
    spec.validate();
    Rng rng(spec.seed);
    const double fs = spec.fs_eeg;
    const auto n = static_cast<std::size_t>(
        std::llround(static_cast<double>(spec.n_trials) * spec.trial_len_s * fs));

    // trajectory: one raised-cosine curl per trial with seeded variation
    std::vector<double> y(n, 0.0);
    std::vector<TrialMarkerSet::Trial> trials;
    for (int i = 0; i < spec.n_trials; ++i) {
        const double trial_start = static_cast<double>(i) * spec.trial_len_s;
        const double onset = trial_start + 0.45 + 0.12 * rng.uniform(-1.0, 1.0);
        const double dur = std::min(1.25 + 0.35 * rng.uniform01(), spec.trial_len_s - 0.55);
        const double amp = 115.0 + 35.0 * rng.uniform01();
        trials.push_back({i, onset - 0.3, onset});
        const auto i0 = static_cast<std::size_t>(std::llround(onset * fs));
        const auto i1 = std::min(n, static_cast<std::size_t>(std::llround((onset + dur) * fs)));
        for (std::size_t s = i0; s < i1; ++s) {
            const double ph = (static_cast<double>(s) / fs - onset) / dur;
            y[s] += amp * 0.5 * (1.0 - std::cos(2.0 * kPi * ph));
        }
    }
    // camera-tracking style measurement noise keeps windows non-degenerate
    {
        auto meas = pink_noise(n, fs, rng, 0.8);
        for (std::size_t s = 0; s < n; ++s)
            y[s] = std::clamp(y[s] + 0.6 * meas[s], 0.0, 180.0);
    }

    // latent drive: the future trajectory, band-limited inside the delta range
    const auto lag = static_cast<std::size_t>(std::llround(spec.lag_ms_true / 1000.0 * fs));
    std::vector<double> future(n);
    for (std::size_t s = 0; s < n; ++s) future[s] = s + lag < n ? y[s + lag] : y[n - 1];
    auto drive = bandlimit(future, fs, 0.6, 3.6);
    {
        double p = 0.0;
        for (double v : drive) p += v * v;
        const double rms = std::sqrt(p / static_cast<double>(n));
        for (auto& v : drive) v /= rms > 0.0 ? rms : 1.0;
    }

    const Montage montage = builtin_montage_1020();
    const auto labels = montage.labels();
    Matrix eeg(static_cast<Eigen::Index>(labels.size()), static_cast<Eigen::Index>(n));
    const double noise_level = std::isfinite(spec.noise_snr_db)
                                   ? std::pow(10.0, -spec.noise_snr_db / 20.0)
                                   : 0.0;
    for (std::size_t c = 0; c < labels.size(); ++c) {
        double gain = 0.05;
        if (labels[c] == "C3") gain = 1.0;
        else if (labels[c] == "Cz") gain = 0.8;
        else if (labels[c] == "C4") gain = 0.6;
        const auto nz = pink_noise(n, fs, rng);
        for (std::size_t s = 0; s < n; ++s) {
            double v = noise_level * nz[s];
            if (spec.coupling == Coupling::linear_delta)
                v += spec.coupling_gain * gain * drive[s];
            eeg(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(s)) = 40.0 * v;
        }
    }

    SynthSession session{
        EegRecord::make(std::move(eeg), fs, labels, 0.0),
        JointAngleRecord::make(Eigen::Map<const Vector>(y.data(), static_cast<Eigen::Index>(n)),
                               fs, 0.0),
        TrialMarkerSet::make(std::move(trials)),
    };
    return session;
}

}  // namespace curldec
