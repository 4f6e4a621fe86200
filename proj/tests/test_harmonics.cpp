#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "curldec/harmonics.hpp"
#include "curldec/montage.hpp"
#include "testutil.hpp"

using namespace curldec;

namespace {

constexpr double kPi = 3.14159265358979323846;

// Gauss-Legendre nodes on [-1, 1] via Newton iteration (test-side oracle,
// independent of the library's quadrature).
void leggauss(int n, std::vector<double>& x, std::vector<double>& w) {
    x.assign(n, 0.0);
    w.assign(n, 0.0);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double z = std::cos(kPi * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < n; ++j) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
            }
            pp = n * (z * p0 - p1) / (z * z - 1.0);
            const double z1 = z;
            z = z1 - p0 / pp;
            if (std::abs(z - z1) < 1e-15) break;
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = w[n - 1 - i] = 2.0 / ((1.0 - z * z) * pp * pp);
    }
}

std::vector<std::pair<int, int>> order_major() {
    std::vector<std::pair<int, int>> lm;
    for (int l = 0; l <= 2; ++l)
        for (int m = -l; m <= l; ++m) lm.push_back({l, m});
    return lm;
}

// Gram matrix of the 9 basis functions under the given measure via a dense
// product quadrature grid.
Matrix gram(HarmonicDomain domain, double theta_max, int nt = 200, int np = 128) {
    std::vector<double> xs, ws;
    leggauss(nt, xs, ws);
    const auto lm = order_major();
    Matrix g = Matrix::Zero(9, 9);
    for (int q = 0; q < nt; ++q) {
        const double theta = 0.5 * theta_max * (xs[q] + 1.0);
        const double wt = 0.5 * theta_max * ws[q] * std::sin(theta);
        Matrix vals(9, np);
        for (int p = 0; p < np; ++p) {
            const double phi = 2.0 * kPi * p / np;
            for (int k = 0; k < 9; ++k)
                vals(k, p) = basis_value(domain, lm[k].first, lm[k].second, theta, phi);
        }
        g += wt * (2.0 * kPi / np) * (vals * vals.transpose());
    }
    return g;
}

}  // namespace

TEST_CASE("closed-form values of the low-order basis") {
    CHECK(real_sh_basis(0, 0, 0.7, 1.3) == doctest::Approx(0.28209479177387814).epsilon(1e-12));
    CHECK(real_sh_basis(0, 0, 2.1, 5.0) == doctest::Approx(0.28209479177387814).epsilon(1e-12));
    CHECK(real_sh_basis(1, 0, 0.0, 0.0) == doctest::Approx(0.48860251190291992).epsilon(1e-12));
    // cos(theta) dependence of Y_1^0
    CHECK(real_sh_basis(1, 0, 1.0, 2.0) ==
          doctest::Approx(0.48860251190291992 * std::cos(1.0)).epsilon(1e-12));
}

TEST_CASE("degree validation") {
    CHECK_THROWS_AS(real_sh_basis(1, 2, 0.5, 0.5), Error);
    try {
        real_sh_basis(1, 2, 0.5, 0.5);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::InvalidDegree);
    }
    CHECK_THROWS_AS(h2_basis(2, -3, 0.5, 0.5), Error);
}

TEST_CASE("full-sphere orthonormality of the real spherical harmonics") {
    const Matrix g = gram(HarmonicDomain::SH, kPi);
    CHECK((g - Matrix::Identity(9, 9)).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("cap orthonormality of the head-surface basis") {
    const Matrix g = gram(HarmonicDomain::H2, kCapElevation, 400, 256);
    CHECK((g - Matrix::Identity(9, 9)).cwiseAbs().maxCoeff() < 1e-4);
}

TEST_CASE("head basis: constant term, pole behavior, cap domain") {
    const double h00 = 1.0 / std::sqrt(3.0 * kPi);
    CHECK(h2_basis(0, 0, 0.3, 1.0) == doctest::Approx(h00).epsilon(1e-10));
    CHECK(h2_basis(0, 0, 1.9, 4.4) == doctest::Approx(h00).epsilon(1e-10));
    for (int m : {-2, -1, 1, 2})
        CHECK(std::abs(h2_basis(2, m, 0.0, 0.9)) < 1e-12);
    CHECK_THROWS_AS(h2_basis(1, 0, kCapElevation + 0.01, 0.0), Error);
    try {
        h2_basis(1, 0, kCapElevation + 0.01, 0.0);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::OutsideCap);
    }
}

TEST_CASE("basis matrix shape, constant column, and pinned conditioning") {
    const Montage montage = builtin_montage_1020();
    const BasisMatrix sh = build_basis_matrix(montage, HarmonicDomain::SH, 2);
    CHECK(sh.values.rows() == 16);
    CHECK(sh.values.cols() == 9);
    for (Eigen::Index i = 0; i < 16; ++i)
        CHECK(sh.values(i, 0) == doctest::Approx(0.28209479177387814).epsilon(1e-12));
    CHECK(sh.conditioning < 1e4);
    // regression pin: BESA-table montage, order 2 (see design notes)
    CHECK(sh.conditioning == doctest::Approx(104.84924492116).epsilon(1e-6));

    const BasisMatrix h2 = build_basis_matrix(montage, HarmonicDomain::H2, 2);
    const double h00 = 1.0 / std::sqrt(3.0 * kPi);
    for (Eigen::Index i = 0; i < 16; ++i)
        CHECK(h2.values(i, 0) == doctest::Approx(h00).epsilon(1e-10));
    CHECK(h2.conditioning < 1e4);
}

TEST_CASE("synthesis-analysis round trip recovers known coefficients") {
    const Montage montage = builtin_montage_1020();
    for (auto domain : {HarmonicDomain::SH, HarmonicDomain::H2}) {
        const BasisMatrix basis = build_basis_matrix(montage, domain, 2);
        const Matrix c0 = testutil::random_matrix(9, 5, 77);
        const Matrix v = basis.values * c0;  // 16 x 5 synthetic sensor signal
        const HarmonicFeatures back =
            forward_transform(v, basis, TransformMethod::least_squares(0.0));
        CHECK((back.coeffs - c0).cwiseAbs().maxCoeff() / c0.cwiseAbs().maxCoeff() < 1e-6);
    }
}

TEST_CASE("zero signal maps to zero coefficients") {
    const BasisMatrix basis = build_basis_matrix(builtin_montage_1020(), HarmonicDomain::SH, 2);
    const HarmonicFeatures f = forward_transform(Matrix::Zero(16, 7), basis);
    CHECK(f.coeffs.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("constant unit signal excites only the constant basis function") {
    const BasisMatrix basis = build_basis_matrix(builtin_montage_1020(), HarmonicDomain::SH, 2);
    const Matrix v = Matrix::Ones(16, 3);
    const HarmonicFeatures f =
        forward_transform(v, basis, TransformMethod::least_squares(0.0));
    CHECK(f.coeffs(0, 0) == doctest::Approx(std::sqrt(4.0 * kPi)).epsilon(1e-6));
    for (Eigen::Index r = 1; r < 9; ++r)
        for (Eigen::Index c = 0; c < 3; ++c) CHECK(std::abs(f.coeffs(r, c)) < 1e-6);
}

TEST_CASE("quadrature mode equals its defining formula") {
    const Montage montage = builtin_montage_1020();
    for (auto domain : {HarmonicDomain::SH, HarmonicDomain::H2}) {
        const BasisMatrix basis = build_basis_matrix(montage, domain, 2);
        const Matrix v = testutil::random_matrix(16, 4, 31);
        const double z = (domain == HarmonicDomain::SH ? 4.0 * kPi : 3.0 * kPi) / 16.0;
        const Matrix expect = basis.values.transpose() * (z * v);
        const HarmonicFeatures f = forward_transform(v, basis, TransformMethod::quadrature());
        CHECK((f.coeffs - expect).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("forward transform is linear and per-sample independent") {
    const BasisMatrix basis = build_basis_matrix(builtin_montage_1020(), HarmonicDomain::H2, 2);
    const Matrix a = testutil::random_matrix(16, 6, 41);
    const Matrix b = testutil::random_matrix(16, 6, 42);
    const auto fa = forward_transform(a, basis).coeffs;
    const auto fb = forward_transform(b, basis).coeffs;
    const auto fmix = forward_transform(1.5 * a - 0.5 * b, basis).coeffs;
    CHECK((fmix - (1.5 * fa - 0.5 * fb)).cwiseAbs().maxCoeff() < 1e-9);

    // column n of the output depends only on column n of the input
    const auto fcol = forward_transform(a.col(2), basis).coeffs;
    CHECK((fcol - fa.col(2)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("shape mismatch is rejected") {
    const BasisMatrix basis = build_basis_matrix(builtin_montage_1020(), HarmonicDomain::SH, 2);
    CHECK_THROWS_AS(forward_transform(Matrix::Zero(12, 3), basis), Error);
}

TEST_CASE("per-band harmonic features: shapes, commutation, zero band") {
    const Montage montage = builtin_montage_1020();
    // synthetic 16-channel record
    Matrix samples = testutil::random_matrix(16, 1024, 55);
    const EegRecord rec = EegRecord::make(samples, 125.0, montage.labels());
    const BandSet bands = band_signals(rec, {});
    const auto feats = harmonic_band_features(bands, montage, HarmonicDomain::SH);
    for (const auto& f : feats) {
        CHECK(f.coeffs.rows() == 9);
        CHECK(f.coeffs.cols() == 1024);
    }

    // transform-then-band equals band-then-transform (both linear)
    const BasisMatrix basis = build_basis_matrix(montage, HarmonicDomain::SH, 2);
    const Matrix coeffs = forward_transform(rec.samples(), basis).coeffs;
    std::vector<std::string> coeff_names;
    for (int i = 0; i < 9; ++i) coeff_names.push_back("c" + std::to_string(i));
    const EegRecord coeff_rec = EegRecord::make(coeffs, 125.0, coeff_names);
    const BandSet coeff_bands = band_signals(coeff_rec, {});
    for (int b = 0; b < 5; ++b) {
        const double scale = std::max(1.0, coeff_bands.band(b).cwiseAbs().maxCoeff());
        CHECK((feats[static_cast<std::size_t>(b)].coeffs - coeff_bands.band(b))
                  .cwiseAbs()
                  .maxCoeff() /
                  scale <
              1e-8);
    }

    // a zeroed gamma band produces zero gamma coefficients
    BandSet zeroed = bands;
    zeroed.gamma.setZero();
    const auto f2 = harmonic_band_features(zeroed, montage, HarmonicDomain::SH);
    CHECK(f2[4].coeffs.cwiseAbs().maxCoeff() == 0.0);
}
