#include "curldec/harmonics.hpp"

#include <cmath>
#include <memory>
#include <mutex>
#include <vector>

namespace curldec {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Associated Legendre P_l^m(x) with the Condon-Shortley phase.
double assoc_legendre(int l, int m, double x) {
    double pmm = 1.0;
    if (m > 0) {
        const double somx2 = std::sqrt((1.0 - x) * (1.0 + x));
        double fact = 1.0;
        for (int i = 0; i < m; ++i) {
            pmm *= -fact * somx2;
            fact += 2.0;
        }
    }
    if (l == m) return pmm;
    double pmmp1 = x * (2.0 * m + 1.0) * pmm;
    if (l == m + 1) return pmmp1;
    double pll = 0.0;
    for (int ll = m + 2; ll <= l; ++ll) {
        pll = ((2.0 * ll - 1.0) * x * pmmp1 - (ll + m - 1.0) * pmm) / (ll - m);
        pmm = pmmp1;
        pmmp1 = pll;
    }
    return pll;
}

double factorial(int n) {
    double f = 1.0;
    for (int i = 2; i <= n; ++i) f *= i;
    return f;
}

double sh_norm(int l, int m) {
    return std::sqrt((2.0 * l + 1.0) / (4.0 * kPi) * factorial(l - m) / factorial(l + m));
}

void check_degree(int l, int m) {
    if (l < 0) throw Error(ErrorCode::InvalidDegree, "order must be >= 0");
    if (std::abs(m) > l)
        throw Error(ErrorCode::InvalidDegree,
                    "|m| > l (" + std::to_string(m) + ", " + std::to_string(l) + ")");
}

double azimuth_factor(int m, double phi) {
    if (m == 0) return 1.0;
    if (m > 0) return std::sqrt(2.0) * std::cos(m * phi);
    return std::sqrt(2.0) * std::sin(-m * phi);
}

// Normalized radial part of the remapped spherical-harmonic kernel.
double remapped_radial(int l, int am, double theta) {
    return sh_norm(l, am) * assoc_legendre(l, am, std::cos(1.5 * theta));
}

// Gauss-Legendre nodes and weights on [a, b].
void gauss_legendre(int n, double a, double b, std::vector<double>& x, std::vector<double>& w) {
    x.resize(n);
    w.resize(n);
    const int m = (n + 1) / 2;
    for (int i = 0; i < m; ++i) {
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
        const double xm = 0.5 * (b + a);
        const double xl = 0.5 * (b - a);
        x[i] = xm - xl * z;
        x[n - 1 - i] = xm + xl * z;
        w[i] = 2.0 * xl / ((1.0 - z * z) * pp * pp);
        w[n - 1 - i] = w[i];
    }
}

// Per-azimuthal-order Gram-Schmidt coefficients making the remapped radial
// functions orthonormal under 2*pi * sin(theta) dtheta over the cap.
struct CapTable {
    int max_order = 0;
    // coef[am][i][j]: radial_i = sum_j coef * remapped_radial(l = am + j)
    std::vector<std::vector<std::vector<double>>> coef;
};

const CapTable& cap_table(int max_order) {
    static std::mutex mu;
    static std::vector<std::unique_ptr<CapTable>> tables;
    std::lock_guard<std::mutex> lock(mu);
    for (const auto& t : tables)
        if (t->max_order == max_order) return *t;

    std::vector<double> xs, ws;
    gauss_legendre(128, 0.0, kCapElevation, xs, ws);
    auto inner = [&](const std::vector<double>& fa, const std::vector<double>& fb) {
        double s = 0.0;
        for (std::size_t i = 0; i < xs.size(); ++i)
            s += ws[i] * fa[i] * fb[i] * std::sin(xs[i]);
        return 2.0 * kPi * s;
    };

    CapTable t;
    t.max_order = max_order;
    t.coef.resize(static_cast<std::size_t>(max_order) + 1);
    for (int am = 0; am <= max_order; ++am) {
        const int count = max_order - am + 1;
        // raw remapped radial functions sampled on the quadrature grid
        std::vector<std::vector<double>> u(static_cast<std::size_t>(count),
                                           std::vector<double>(xs.size()));
        for (int j = 0; j < count; ++j)
            for (std::size_t q = 0; q < xs.size(); ++q)
                u[static_cast<std::size_t>(j)][q] = remapped_radial(am + j, am, xs[q]);

        std::vector<std::vector<double>> c;   // coefficient rows
        std::vector<std::vector<double>> v;   // orthonormalized samples
        for (int i = 0; i < count; ++i) {
            std::vector<double> ci(static_cast<std::size_t>(count), 0.0);
            ci[static_cast<std::size_t>(i)] = 1.0;
            std::vector<double> vi = u[static_cast<std::size_t>(i)];
            for (int j = 0; j < i; ++j) {
                const double pj = inner(u[static_cast<std::size_t>(i)], v[static_cast<std::size_t>(j)]);
                for (int q = 0; q < count; ++q)
                    ci[static_cast<std::size_t>(q)] -= pj * c[static_cast<std::size_t>(j)][static_cast<std::size_t>(q)];
                for (std::size_t q = 0; q < vi.size(); ++q)
                    vi[q] -= pj * v[static_cast<std::size_t>(j)][q];
            }
            const double nrm = std::sqrt(inner(vi, vi));
            for (auto& q : ci) q /= nrm;
            for (auto& q : vi) q /= nrm;
            c.push_back(std::move(ci));
            v.push_back(std::move(vi));
        }
        t.coef[static_cast<std::size_t>(am)] = std::move(c);
    }
    tables.push_back(std::make_unique<CapTable>(std::move(t)));
    return *tables.back();
}

}  // namespace

double real_sh_basis(int l, int m, double theta, double phi) {
    check_degree(l, m);
    if (theta < -1e-12 || theta > kPi + 1e-12)
        throw Error(ErrorCode::InvalidArgument, "elevation must lie in [0, pi]");
    const int am = std::abs(m);
    return sh_norm(l, am) * assoc_legendre(l, am, std::cos(theta)) * azimuth_factor(m, phi);
}

double h2_basis(int l, int m, double theta, double phi) {
    check_degree(l, m);
    if (theta < -1e-12 || theta > kCapElevation + 1e-12)
        throw Error(ErrorCode::OutsideCap, "elevation outside the head cap");
    const int am = std::abs(m);
    const int max_order = l > 2 ? l : 2;
    const auto& table = cap_table(max_order);
    const auto& rows = table.coef[static_cast<std::size_t>(am)];
    const auto& row = rows[static_cast<std::size_t>(l - am)];
    double radial = 0.0;
    for (std::size_t j = 0; j < row.size(); ++j)
        radial += row[j] * remapped_radial(am + static_cast<int>(j), am, theta);
    return radial * azimuth_factor(m, phi);
}

double basis_value(HarmonicDomain domain, int l, int m, double theta, double phi) {
    return domain == HarmonicDomain::SH ? real_sh_basis(l, m, theta, phi)
                                        : h2_basis(l, m, theta, phi);
}

BasisMatrix build_basis_matrix(const Montage& montage, HarmonicDomain domain, int max_order) {
    if (max_order < 0) throw Error(ErrorCode::InvalidDegree, "order must be >= 0");
    const auto s = static_cast<Eigen::Index>(montage.size());
    const Eigen::Index cols = (max_order + 1) * (max_order + 1);
    BasisMatrix b;
    b.domain = domain;
    b.max_order = max_order;
    b.values.resize(s, cols);
    for (Eigen::Index i = 0; i < s; ++i) {
        const auto& ch = montage.channels()[static_cast<std::size_t>(i)];
        Eigen::Index j = 0;
        for (int l = 0; l <= max_order; ++l)
            for (int m = -l; m <= l; ++m)
                b.values(i, j++) = basis_value(domain, l, m, ch.theta, ch.phi);
    }
    const Matrix gram = b.values.transpose() * b.values;
    Eigen::JacobiSVD<Matrix> svd(gram);
    const auto& sv = svd.singularValues();
    b.conditioning = sv(0) / std::max(sv(sv.size() - 1), 1e-300);
    return b;
}

HarmonicFeatures forward_transform(const Matrix& signal, const BasisMatrix& basis,
                                   const TransformMethod& method) {
    if (signal.rows() != basis.values.rows())
        throw Error(ErrorCode::ShapeMismatch, "signal channel count must match basis rows");
    HarmonicFeatures out;
    out.domain = basis.domain;
    out.max_order = basis.max_order;
    if (method.kind == TransformMethod::Kind::least_squares) {
        if (method.lambda == 0.0 && basis.conditioning > 1e8)
            throw Error(ErrorCode::IllConditionedMontage,
                        "unregularized solve on an ill-conditioned basis");
        const Eigen::Index k = basis.values.cols();
        Matrix gram = basis.values.transpose() * basis.values;
        gram += method.lambda * Matrix::Identity(k, k);
        Eigen::LDLT<Matrix> solver(gram);
        out.coeffs = solver.solve(basis.values.transpose() * signal);
    } else {
        const double area = basis.domain == HarmonicDomain::SH ? 4.0 * kPi : 3.0 * kPi;
        const double z = area / static_cast<double>(basis.values.rows());
        out.coeffs = basis.values.transpose() * (z * signal);
    }
    return out;
}

std::array<HarmonicFeatures, 5> harmonic_band_features(const BandSet& bands,
                                                       const Montage& montage,
                                                       HarmonicDomain domain,
                                                       const TransformMethod& method) {
    const BasisMatrix basis = build_basis_matrix(montage, domain, 2);
    std::array<HarmonicFeatures, 5> out;
    for (int i = 0; i < 5; ++i) out[static_cast<std::size_t>(i)] = forward_transform(bands.band(i), basis, method);
    return out;
}

}  // namespace curldec
