#include "curldec/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

#include "curldec/fft.hpp"
#include "curldec/rng.hpp"

namespace curldec {

namespace {

constexpr double kPi = 3.14159265358979323846;

double sinc(double x) {
    if (std::abs(x) < 1e-12) return 1.0;
    return std::sin(kPi * x) / (kPi * x);
}

std::size_t next_pow2(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

// Symmetric-padded convolution with a linear-phase FIR, group delay removed.
std::vector<double> filtfilt_like(const std::vector<double>& x, const std::vector<double>& h) {
    const std::size_t n = x.size();
    const std::size_t l = h.size();
    const std::size_t pad = (l - 1) / 2;
    std::vector<double> ext(n + 2 * pad);
    for (std::size_t i = 0; i < pad; ++i) ext[i] = x[std::min(pad - i, n - 1)];
    for (std::size_t i = 0; i < n; ++i) ext[pad + i] = x[i];
    for (std::size_t i = 0; i < pad; ++i)
        ext[pad + n + i] = x[n - 2 - std::min(i, n - 2)];
    std::vector<double> y(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double acc = 0.0;
        for (std::size_t k = 0; k < l; ++k) acc += h[k] * ext[i + k];
        y[i] = acc;
    }
    return y;
}

}  // namespace

std::vector<double> fir_lowpass_taps(double cutoff_norm, int ntaps) {
    if (ntaps % 2 == 0) ++ntaps;
    std::vector<double> h(ntaps);
    const double mid = (ntaps - 1) / 2.0;
    double sum = 0.0;
    for (int i = 0; i < ntaps; ++i) {
        const double n = i - mid;
        const double w = 0.42 - 0.5 * std::cos(2.0 * kPi * i / (ntaps - 1)) +
                         0.08 * std::cos(4.0 * kPi * i / (ntaps - 1));  // Blackman
        h[i] = 2.0 * cutoff_norm * sinc(2.0 * cutoff_norm * n) * w;
        sum += h[i];
    }
    for (auto& v : h) v /= sum;
    return h;
}

EegRecord resample(const EegRecord& record, double target_fs) {
    const double fs = record.fs();
    if (!(target_fs > 0.0)) throw Error(ErrorCode::InvalidArgument, "target fs must be positive");
    if (target_fs == fs) return record;

    const std::size_t n = static_cast<std::size_t>(record.length());
    const std::size_t out_len =
        static_cast<std::size_t>(std::ceil(static_cast<double>(n) * target_fs / fs));

    if (fs > target_fs) {
        const double ratio = fs / target_fs;
        const auto k = static_cast<std::size_t>(std::llround(ratio));
        if (std::abs(ratio - static_cast<double>(k)) > 1e-9)
            throw Error(ErrorCode::UnsupportedRatio, "fs must be an integer multiple of target");
        int ntaps = 441;
        if (static_cast<std::size_t>(ntaps) > 2 * n - 1)
            ntaps = static_cast<int>(2 * n - 1) | 1;
        const auto h = fir_lowpass_taps(0.45 * target_fs / fs, ntaps);
        Matrix out(record.channels(), out_len);
        for (Eigen::Index c = 0; c < record.channels(); ++c) {
            std::vector<double> x(n);
            for (std::size_t i = 0; i < n; ++i) x[i] = record.samples()(c, i);
            const auto y = filtfilt_like(x, h);
            for (std::size_t i = 0; i < out_len; ++i) out(c, i) = y[i * k];
        }
        return record.with_fs(std::move(out), target_fs);
    }

    const double ratio = target_fs / fs;
    const auto m = static_cast<std::size_t>(std::llround(ratio));
    if (std::abs(ratio - static_cast<double>(m)) > 1e-9)
        throw Error(ErrorCode::UnsupportedRatio, "target must be an integer multiple of fs");
    int ntaps = 441;
    if (static_cast<std::size_t>(ntaps) > 2 * n * m - 1)
        ntaps = static_cast<int>(2 * n * m - 1) | 1;
    // interpolation filter keeps the original band, expressed at the new rate
    const auto h = fir_lowpass_taps(0.45 * fs / target_fs, ntaps);
    Matrix out(record.channels(), out_len);
    for (Eigen::Index c = 0; c < record.channels(); ++c) {
        std::vector<double> up(n * m, 0.0);
        for (std::size_t i = 0; i < n; ++i) up[i * m] = record.samples()(c, i) * m;
        const auto y = filtfilt_like(up, h);
        for (std::size_t i = 0; i < out_len; ++i) out(c, i) = y[i];
    }
    return record.with_fs(std::move(out), target_fs);
}

std::size_t baseline_cutoff_index(double cutoff_hz, std::size_t n_dft, double fs) {
    return static_cast<std::size_t>(
        std::floor(cutoff_hz * static_cast<double>(n_dft) / fs));
}

std::vector<double> remove_baseline_channel(const std::vector<double>& x, double fs,
                                            const BaselineRemovalSpec& spec) {
    const std::size_t n = x.size();
    if (n == 0) throw Error(ErrorCode::EmptyRecord, "empty channel");
    if (!(spec.cutoff_hz > 0.0) || spec.cutoff_hz >= fs / 2.0)
        throw Error(ErrorCode::InvalidCutoff, "cutoff must lie in (0, fs/2)");
    std::size_t nd = spec.n_dft.value_or(next_pow2(n));
    if (nd < n) throw Error(ErrorCode::InvalidArgument, "n_dft must be >= signal length");

    auto spectrum = fft_real(x, nd);
    const std::size_t k = baseline_cutoff_index(spec.cutoff_hz, nd, fs);
    for (std::size_t i = 0; i <= k && i < nd; ++i) spectrum[i] = 0.0;
    for (std::size_t i = nd - k; i < nd; ++i) spectrum[i] = 0.0;
    auto back = ifft(spectrum);
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) y[i] = back[i].real();  // imaginary residue discarded
    return y;
}

EegRecord remove_baseline(const EegRecord& record, const BaselineRemovalSpec& spec) {
    if (record.length() == 0) throw Error(ErrorCode::EmptyRecord, "empty record");
    Matrix out(record.channels(), record.length());
    const std::size_t n = static_cast<std::size_t>(record.length());
    for (Eigen::Index c = 0; c < record.channels(); ++c) {
        std::vector<double> x(n);
        for (std::size_t i = 0; i < n; ++i) x[i] = record.samples()(c, i);
        const auto y = remove_baseline_channel(x, record.fs(), spec);
        for (std::size_t i = 0; i < n; ++i) out(c, i) = y[i];
    }
    return record.with_samples(std::move(out));
}

EegRecord normalize_amplitude(const EegRecord& record) {
    Matrix out = record.samples();
    for (Eigen::Index c = 0; c < out.rows(); ++c) {
        const double peak = out.row(c).cwiseAbs().maxCoeff();
        if (peak == 0.0)
            throw Error(ErrorCode::DegenerateChannel,
                        "all-zero channel " + record.labels()[static_cast<std::size_t>(c)]);
        out.row(c) /= peak;
    }
    return record.with_samples(std::move(out));
}

EegRecord inject_artifacts(const EegRecord& record, const ArtifactSpec& spec) {
    if (spec.ocular_amp < 0.0)
        throw Error(ErrorCode::InvalidArgument, "ocular amplitude must be >= 0");
    if (std::isfinite(spec.emg_snr_db)) {
        if (!(spec.emg_low_hz > 0.0 && spec.emg_low_hz < spec.emg_high_hz &&
              spec.emg_high_hz < record.fs() / 2.0))
            throw Error(ErrorCode::InvalidArgument, "EMG band must satisfy 0 < low < high < fs/2");
    }
    Matrix out = record.samples();
    const std::size_t n = static_cast<std::size_t>(record.length());
    const double fs = record.fs();
    const double duration = static_cast<double>(n) / fs;
    Rng rng(spec.seed);

    if (spec.ocular_amp > 0.0) {
        // anterior-posterior falloff by label prefix
        std::vector<double> weight(record.labels().size(), 0.1);
        for (std::size_t c = 0; c < record.labels().size(); ++c) {
            const std::string& l = record.labels()[c];
            if (l.rfind("Fp", 0) == 0) weight[c] = 1.0;
            else if (!l.empty() && l[0] == 'F') weight[c] = 0.6;
            else if (!l.empty() && l[0] == 'C') weight[c] = 0.3;
        }
        const auto events = static_cast<std::size_t>(std::llround(spec.ocular_rate * duration));
        for (std::size_t e = 0; e < events; ++e) {
            const double start = rng.uniform(0.0, std::max(0.0, duration - 0.5));
            const double width = rng.uniform(0.25, 0.45);  // >= 0.25 s keeps content <= 4 Hz
            const double amp = spec.ocular_amp * rng.uniform(0.6, 1.0);
            const auto i0 = static_cast<std::size_t>(start * fs);
            const auto i1 = std::min(n, static_cast<std::size_t>((start + width) * fs));
            for (std::size_t i = i0; i < i1; ++i) {
                const double ph = (static_cast<double>(i) / fs - start) / width;
                const double pulse = amp * 0.5 * (1.0 - std::cos(2.0 * kPi * ph));
                for (Eigen::Index c = 0; c < out.rows(); ++c)
                    out(c, i) += weight[static_cast<std::size_t>(c)] * pulse;
            }
        }
    }

    if (std::isfinite(spec.emg_snr_db)) {
        constexpr int kComponents = 300;
        for (Eigen::Index c = 0; c < out.rows(); ++c) {
            std::vector<double> freqs(kComponents), phases(kComponents);
            for (int j = 0; j < kComponents; ++j) {
                freqs[j] = rng.uniform(spec.emg_low_hz, spec.emg_high_hz);
                phases[j] = rng.uniform(0.0, 2.0 * kPi);
            }
            std::vector<double> noise(n, 0.0);
            for (int j = 0; j < kComponents; ++j) {
                const double w = 2.0 * kPi * freqs[j] / fs;
                for (std::size_t i = 0; i < n; ++i)
                    noise[i] += std::sin(w * static_cast<double>(i) + phases[j]);
            }
            double p_noise = 0.0, p_sig = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                p_noise += noise[i] * noise[i];
                p_sig += record.samples()(c, i) * record.samples()(c, i);
            }
            if (p_noise == 0.0 || p_sig == 0.0) continue;
            const double target = p_sig * std::pow(10.0, -spec.emg_snr_db / 10.0);
            const double scale = std::sqrt(target / p_noise);
            for (std::size_t i = 0; i < n; ++i) out(c, i) += scale * noise[i];
        }
    }

    return record.with_samples(std::move(out));
}

}  // namespace curldec
