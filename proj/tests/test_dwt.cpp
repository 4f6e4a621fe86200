#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "curldec/dwt.hpp"
#include "testutil.hpp"

using namespace curldec;

namespace {

constexpr double kPi = 3.14159265358979323846;

std::vector<double> sine(double freq, double fs, std::size_t n) {
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i)
        x[i] = std::sin(2.0 * kPi * freq * static_cast<double>(i) / fs);
    return x;
}

std::vector<double> randvec(std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<double> x(n);
    for (auto& v : x) v = rng.normal();
    return x;
}

double energy(const std::vector<double>& x) {
    double e = 0.0;
    for (double v : x) e += v * v;
    return e;
}

EegRecord record_from(const std::vector<std::vector<double>>& chans, double fs) {
    Matrix m(static_cast<Eigen::Index>(chans.size()), static_cast<Eigen::Index>(chans[0].size()));
    std::vector<std::string> labels;
    for (std::size_t c = 0; c < chans.size(); ++c) {
        labels.push_back("ch" + std::to_string(c));
        for (std::size_t i = 0; i < chans[c].size(); ++i)
            m(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(i)) = chans[c][i];
    }
    return EegRecord::make(m, fs, labels);
}

double band_energy_ratio(double freq, int band_index, const WaveletSpec& spec) {
    const auto x = sine(freq, 125.0, 4096);
    const EegRecord r = record_from({x}, 125.0);
    const BandSet bands = band_signals(r, spec);
    const Vector b = bands.band(band_index).row(0).transpose();
    double ein = energy(x);
    return b.squaredNorm() / ein;
}

}  // namespace

TEST_CASE("pyramid lengths halve per level with periodic extension") {
    const auto x = randvec(512, 1);
    const auto p = dwt_decompose(x, {});
    REQUIRE(p.details.size() == 4);
    CHECK(p.details[0].size() == 256);
    CHECK(p.details[1].size() == 128);
    CHECK(p.details[2].size() == 64);
    CHECK(p.details[3].size() == 32);
    CHECK(p.approx.size() == 32);
}

TEST_CASE("constant input has zero details") {
    for (const char* fam : {"db2", "db4", "db8"}) {
        WaveletSpec spec;
        spec.family = fam;
        const auto p = dwt_decompose(std::vector<double>(256, 3.7), spec);
        for (const auto& d : p.details)
            for (double v : d) CHECK(std::abs(v) < 1e-12);
    }
}

TEST_CASE("Parseval for the orthogonal periodized transform") {
    const auto x = randvec(256, 2);
    const auto p = dwt_decompose(x, {});
    double coef = energy(p.approx);
    for (const auto& d : p.details) coef += energy(d);
    CHECK(std::abs(coef - energy(x)) / energy(x) < 1e-8);
}

TEST_CASE("perfect reconstruction, zero mask, and approx-only energy") {
    const auto x = randvec(512, 3);
    WaveletSpec spec;
    const auto p = dwt_decompose(x, spec);

    const auto full = idwt_reconstruct(p, LevelMask::all(4));
    double err = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) err = std::max(err, std::abs(full[i] - x[i]));
    CHECK(err / std::sqrt(energy(x) / x.size()) < 1e-8);

    const auto none = idwt_reconstruct(p, LevelMask::none());
    CHECK(energy(none) == 0.0);

    const auto tone = sine(2.0, 125.0, 4096);
    const auto pt = dwt_decompose(tone, spec);
    const auto lowpass = idwt_reconstruct(pt, LevelMask::approx_only());
    CHECK(energy(lowpass) / energy(tone) >= 0.95);
}

TEST_CASE("perfect reconstruction with symmetric extension") {
    WaveletSpec spec;
    spec.extension = WaveletExtension::symmetric;
    for (std::size_t n : {512u, 500u, 777u}) {
        const auto x = randvec(n, 100 + n);
        const auto p = dwt_decompose(x, spec);
        const auto full = idwt_reconstruct(p, LevelMask::all(4));
        REQUIRE(full.size() == n);
        double err = 0.0;
        for (std::size_t i = 0; i < n; ++i) err = std::max(err, std::abs(full[i] - x[i]));
        CHECK(err < 1e-8);
    }
}

TEST_CASE("errors: too short, inconsistent pyramid, unknown family") {
    WaveletSpec spec;
    CHECK_THROWS_AS(dwt_decompose(std::vector<double>(15, 1.0), spec), Error);
    try {
        dwt_decompose(std::vector<double>(15, 1.0), spec);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::InsufficientLength);
    }

    auto p = dwt_decompose(randvec(128, 4), spec);
    p.details[1].pop_back();
    CHECK_THROWS_AS(idwt_reconstruct(p, LevelMask::all(4)), Error);
    try {
        idwt_reconstruct(p, LevelMask::all(4));
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::InconsistentPyramid);
    }

    spec.family = "sym4";
    CHECK_THROWS_AS(dwt_decompose(randvec(128, 4), spec), Error);
}

TEST_CASE("band edges at 125 Hz match the printed table") {
    const auto edges = band_edges_for_fs(125.0);
    CHECK(edges[0].first == doctest::Approx(0.5));
    CHECK(edges[0].second == doctest::Approx(3.90625));
    CHECK(edges[1].first == doctest::Approx(3.90625));
    CHECK(edges[1].second == doctest::Approx(7.8125));
    CHECK(edges[2].first == doctest::Approx(7.8125));
    CHECK(edges[2].second == doctest::Approx(15.625));
    CHECK(edges[3].first == doctest::Approx(15.625));
    CHECK(edges[3].second == doctest::Approx(31.25));
    CHECK(edges[4].first == doctest::Approx(31.25));
    CHECK(edges[4].second == doctest::Approx(62.5));
    // one-decimal truncation gives the conventional 3.9 / 7.8 / 15.6 / 31.2
    CHECK(std::floor(edges[0].second * 10.0) / 10.0 == doctest::Approx(3.9));
    CHECK(std::floor(edges[1].second * 10.0) / 10.0 == doctest::Approx(7.8));
    CHECK(std::floor(edges[2].second * 10.0) / 10.0 == doctest::Approx(15.6));
    CHECK(std::floor(edges[3].second * 10.0) / 10.0 == doctest::Approx(31.2));
}

TEST_CASE("a 10 Hz tone lands in the alpha band") {
    CHECK(band_energy_ratio(10.0, 2, {}) >= 0.90);
}

TEST_CASE("band-center tones place at least 90% of their energy in their band") {
    const auto edges = band_edges_for_fs(125.0);
    for (int b = 0; b < 5; ++b) {
        const double center = 0.5 * (edges[b].first + edges[b].second);
        const double ratio = band_energy_ratio(center, b, {});
        INFO("band ", b, " center ", center, " ratio ", ratio);
        CHECK(ratio >= 0.90);
    }
}

TEST_CASE("five bands sum to the input, including odd lengths") {
    for (std::size_t n : {4096u, 12500u}) {
        const auto x = randvec(n, 7 + n);
        const EegRecord r = record_from({x}, 125.0);
        const BandSet bands = band_signals(r, {});
        Matrix sum = bands.delta + bands.theta + bands.alpha + bands.beta + bands.gamma;
        const double scale = r.samples().cwiseAbs().maxCoeff();
        CHECK((sum - r.samples()).cwiseAbs().maxCoeff() / scale < 1e-8);
    }
}

TEST_CASE("band_signals is linear") {
    const auto x = randvec(1024, 21);
    const auto y = randvec(1024, 22);
    std::vector<double> mix(1024);
    for (std::size_t i = 0; i < 1024; ++i) mix[i] = 2.5 * x[i] - 0.75 * y[i];
    const BandSet bx = band_signals(record_from({x}, 125.0), {});
    const BandSet by = band_signals(record_from({y}, 125.0), {});
    const BandSet bm = band_signals(record_from({mix}, 125.0), {});
    for (int b = 0; b < 5; ++b) {
        const Matrix expect = 2.5 * bx.band(b) - 0.75 * by.band(b);
        CHECK((bm.band(b) - expect).cwiseAbs().maxCoeff() < 1e-9);
    }
}

TEST_CASE("energy partition across bands covers the signal") {
    const auto x = randvec(4096, 31);
    const BandSet bands = band_signals(record_from({x}, 125.0), {});
    double fraction = 0.0;
    for (int b = 0; b < 5; ++b) fraction += bands.band(b).squaredNorm();
    fraction /= energy(x);
    CHECK(fraction >= 0.999);
}
