#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "curldec/dwt.hpp"
#include "curldec/fft.hpp"
#include "curldec/metrics.hpp"
#include "curldec/montage.hpp"
#include "curldec/pipeline.hpp"
#include "curldec/synth.hpp"
#include "testutil.hpp"

using namespace curldec;

namespace {

Matrix delta_band(const EegRecord& clean) {
    return band_signals(clean, {}).delta;
}

}  // namespace

TEST_CASE("same seed gives bit-identical sessions") {
    SynthSpec spec;
    spec.n_trials = 6;
    const SynthSession a = generate_session(spec);
    const SynthSession b = generate_session(spec);
    CHECK((a.eeg.samples() - b.eeg.samples()).cwiseAbs().maxCoeff() == 0.0);
    CHECK((a.trajectory.angle() - b.trajectory.angle()).cwiseAbs().maxCoeff() == 0.0);
    REQUIRE(a.markers.size() == b.markers.size());
    for (std::size_t i = 0; i < a.markers.size(); ++i)
        CHECK(a.markers.trials()[i].cue_time == b.markers.trials()[i].cue_time);

    SynthSpec other = spec;
    other.seed = 8;
    const SynthSession c = generate_session(other);
    CHECK((a.eeg.samples() - c.eeg.samples()).cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("records satisfy their invariants and labels match the builtin montage") {
    SynthSpec spec;
    spec.n_trials = 8;
    const SynthSession s = generate_session(spec);
    CHECK(s.eeg.channels() == 16);
    CHECK(s.eeg.labels() == builtin_montage_1020().labels());
    CHECK(s.eeg.fs() == doctest::Approx(125.0));
    CHECK(s.trajectory.angle().minCoeff() >= 0.0);
    CHECK(s.trajectory.angle().maxCoeff() <= 180.0);
    CHECK(s.trajectory.angle().maxCoeff() > 100.0);  // curls actually happen
    CHECK(s.markers.size() == 8);
    for (const auto& t : s.markers.trials()) CHECK(t.cue_time < t.movement_onset);
}

TEST_CASE("latent drive spectral mass is concentrated in the delta band") {
    SynthSpec with;
    with.n_trials = 10;
    with.noise_snr_db = 10.0;
    SynthSpec without = with;
    without.coupling = Coupling::none;
    const SynthSession a = generate_session(with);
    const SynthSession b = generate_session(without);
    // same seed: the noise is identical, the difference isolates the drive
    const Vector drive = (a.eeg.samples() - b.eeg.samples()).row(3).transpose();  // C3
    REQUIRE(drive.cwiseAbs().maxCoeff() > 0.0);
    std::vector<double> d(drive.data(), drive.data() + drive.size());
    const auto spec = fft_real(d, d.size());
    double total = 0.0, in_band = 0.0;
    for (std::size_t k = 1; k < d.size() / 2; ++k) {
        const double f = static_cast<double>(k) * 125.0 / static_cast<double>(d.size());
        const double p = std::norm(spec[k]);
        total += p;
        if (f >= 0.5 && f <= 3.9) in_band += p;
    }
    CHECK(in_band / total >= 0.90);
}

TEST_CASE("without coupling the delta band cannot predict the trajectory") {
    SynthSpec spec;
    spec.n_trials = 20;
    spec.coupling = Coupling::none;
    spec.seed = 13;
    const SynthSession s = generate_session(spec);
    const EegRecord clean = preprocess_record(s.eeg, 125.0, 0.5);
    const Matrix delta = delta_band(clean);
    const Vector y = s.trajectory.angle();
    double best = 0.0;
    for (Eigen::Index c = 0; c < delta.rows(); ++c) {
        for (int lag = 0; lag <= 35; lag += 5) {
            const Eigen::Index n = delta.cols() - lag;
            const Vector a = delta.row(c).segment(0, n).transpose();
            const Vector b = y.segment(lag, n);
            best = std::max(best, std::abs(pcc(a, b)));
        }
    }
    CHECK(best < 0.2);
}

TEST_CASE("ridge oracle: delta-band windows at the true lag explain the trajectory") {
    SynthSpec spec;
    spec.n_trials = 24;
    spec.noise_snr_db = std::numeric_limits<double>::infinity();
    spec.seed = 11;
    const SynthSession s = generate_session(spec);
    const EegRecord clean = preprocess_record(s.eeg, 125.0, 0.5);
    const Matrix delta = delta_band(clean);

    WindowSpec ws;
    ws.window_ms = 1600;
    ws.lag_ms = 240;
    ws.overlap = 0.95;
    const Matrix c3 = delta.row(3);  // C3 carries the drive at unit gain
    auto examples = make_windows(c3, s.trajectory.angle(), ws, s.markers);
    REQUIRE(examples.size() > 40);

    // trial-grouped split, ridge regression from the flattened window
    const DatasetSplit split = split_dataset(examples, {0.8, 0.0, 0.2},
                                             SplitGrouping::by_trial, 3);
    const int dim = 200;
    Matrix gram = Matrix::Zero(dim + 1, dim + 1);
    Matrix rhs = Matrix::Zero(dim + 1, dim);
    auto design_row = [&](const WindowedExample& e) {
        Vector row(dim + 1);
        row.head(dim) = e.x.row(0).transpose();
        row[dim] = 1.0;
        return row;
    };
    for (const auto& e : split.train) {
        const Vector row = design_row(e);
        gram += row * row.transpose();
        rhs += row * e.y.transpose();
    }
    gram += 1e-3 * Matrix::Identity(dim + 1, dim + 1);
    const Matrix weights = gram.ldlt().solve(rhs);

    double acc = 0.0;
    int count = 0;
    for (const auto& e : split.test) {
        const Vector pred = weights.transpose() * design_row(e);
        acc += pcc(e.y, pred);
        ++count;
    }
    REQUIRE(count > 0);
    CHECK(acc / count > 0.95);
}
