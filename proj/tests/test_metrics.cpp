#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "curldec/metrics.hpp"
#include "testutil.hpp"

using namespace curldec;

namespace {

// Independent brute-force evaluation of the sample-normalized covariance.
double pcc_oracle(const Vector& a, const Vector& p) {
    const double n = static_cast<double>(a.size());
    double ma = 0.0, mp = 0.0;
    for (Eigen::Index i = 0; i < a.size(); ++i) {
        ma += a[i];
        mp += p[i];
    }
    ma /= n;
    mp /= n;
    double va = 0.0, vp = 0.0;
    for (Eigen::Index i = 0; i < a.size(); ++i) {
        va += (a[i] - ma) * (a[i] - ma);
        vp += (p[i] - mp) * (p[i] - mp);
    }
    const double sa = std::sqrt(va / (n - 1.0));
    const double sp = std::sqrt(vp / (n - 1.0));
    double acc = 0.0;
    for (Eigen::Index i = 0; i < a.size(); ++i)
        acc += ((a[i] - ma) / sa) * ((p[i] - mp) / sp);
    return acc / (n - 1.0);
}

Vector from(std::initializer_list<double> v) {
    Vector out(static_cast<Eigen::Index>(v.size()));
    Eigen::Index i = 0;
    for (double x : v) out[i++] = x;
    return out;
}

}  // namespace

TEST_CASE("pcc endpoints") {
    const Vector a = from({1, 2, 3, 4});
    CHECK(pcc(a, a) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(pcc(a, -a) == doctest::Approx(-1.0).epsilon(1e-12));
}

TEST_CASE("pcc reference vector matches the brute-force formula") {
    const Vector a = from({1, 2, 3, 4});
    const Vector p = from({2, 4, 5, 4});
    const double direct = pcc_oracle(a, p);  // = 7/sqrt(95)
    CHECK(direct == doctest::Approx(0.7181848464596079).epsilon(1e-12));
    CHECK(pcc(a, p) == doctest::Approx(direct).epsilon(1e-9));
}

TEST_CASE("pcc degenerate input") {
    const Vector a = from({1, 1, 1});
    const Vector p = from({1, 2, 3});
    CHECK_THROWS_AS(pcc(a, p), Error);
    try {
        pcc(a, p);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::DegenerateSeries);
    }
}

TEST_CASE("pcc affine invariance, symmetry, and bounds on random pairs") {
    for (std::uint64_t seed = 0; seed < 1000; ++seed) {
        const Vector a = testutil::random_vector(24, 2 * seed + 1);
        const Vector p = testutil::random_vector(24, 2 * seed + 2);
        const double r = pcc(a, p);
        CHECK(r <= 1.0 + 1e-12);
        CHECK(r >= -1.0 - 1e-12);
        CHECK(pcc(p, a) == doctest::Approx(r).epsilon(1e-12));
        if (seed % 25 == 0) {
            const Vector a2 = 3.7 * a.array() + 11.0;
            const Vector p2 = 0.4 * p.array() - 2.0;
            CHECK(pcc(a2, p2) == doctest::Approx(r).epsilon(1e-10));
            const Vector a3 = -2.0 * a.array() + 1.0;
            CHECK(pcc(a3, p) == doctest::Approx(-r).epsilon(1e-10));
        }
    }
}

TEST_CASE("mse basics and a two-pass oracle") {
    CHECK(mse(from({1, 2, 3}), from({1, 2, 3})) == doctest::Approx(0.0));
    CHECK(mse(from({0, 0}), from({1, 1})) == doctest::Approx(1.0));
    const Vector a = testutil::random_vector(100, 5);
    const Vector p = testutil::random_vector(100, 6);
    double acc = 0.0;
    for (Eigen::Index i = 0; i < a.size(); ++i) acc += (a[i] - p[i]) * (a[i] - p[i]);
    CHECK(mse(a, p) == doctest::Approx(acc / 100.0).epsilon(1e-12));
    CHECK_THROWS_AS(mse(Vector(), Vector()), Error);
}

TEST_CASE("sweep report: single cell is flagged as best") {
    SweepResult r;
    r.feature_tag = "com";
    r.window_ms = 1600;
    r.lag_ms = 240;
    r.pcc_mean = 0.7;
    r.n_folds = 10;
    const SweepReport rep = sweep_report({r});
    CHECK(rep.best.feature_tag == "com");
    CHECK(rep.table.find('*') != std::string::npos);
    CHECK(rep.csv.find("com,1600,240,") != std::string::npos);
}

TEST_CASE("sweep report: full grid shape and argmax against a linear scan") {
    std::vector<SweepResult> results;
    Rng rng(99);
    std::vector<std::string> features;
    for (int f = 0; f < 18; ++f) features.push_back("f" + std::to_string(f));
    for (const auto& f : features)
        for (int w : {320, 800, 1200, 1600})
            for (int l : {8, 40, 80, 160, 240}) {
                SweepResult r;
                r.feature_tag = f;
                r.window_ms = w;
                r.lag_ms = l;
                r.pcc_mean = rng.uniform(-1.0, 1.0);
                results.push_back(r);
            }
    REQUIRE(results.size() == 360);
    const SweepReport rep = sweep_report(results);
    const SweepResult* best = &results.front();
    for (const auto& r : results)
        if (r.pcc_mean > best->pcc_mean) best = &r;
    CHECK(rep.best.feature_tag == best->feature_tag);
    CHECK(rep.best.window_ms == best->window_ms);
    CHECK(rep.best.lag_ms == best->lag_ms);
    // one header plus 360 data lines
    std::size_t lines = 0;
    for (char c : rep.csv)
        if (c == '\n') ++lines;
    CHECK(lines == 361);
}

TEST_CASE("sweep report rejects duplicate keys") {
    SweepResult r;
    r.feature_tag = "com";
    r.window_ms = 320;
    r.lag_ms = 8;
    CHECK_THROWS_AS(sweep_report({r, r}), Error);
}
