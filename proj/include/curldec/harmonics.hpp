#pragma once

#include <array>

#include "curldec/dwt.hpp"
#include "curldec/types.hpp"

namespace curldec {

enum class HarmonicDomain { SH, H2 };

// Real orthonormal spherical harmonic Y_l^m over the full sphere
// (unit L2 norm, Condon-Shortley folded into the associated Legendre part).
double real_sh_basis(int l, int m, double theta, double phi);

// Head-surface counterpart: the spherical-cap basis obtained by remapping
// elevation to (3/2)*theta and re-orthonormalizing within each azimuthal
// order under the cap measure sin(theta) dtheta dphi over [0, 2*pi/3].
double h2_basis(int l, int m, double theta, double phi);

double basis_value(HarmonicDomain domain, int l, int m, double theta, double phi);

// Coefficient ordering is (l, m) order-major:
// (0,0),(1,-1),(1,0),(1,1),(2,-2),(2,-1),(2,0),(2,1),(2,2).
struct HarmonicFeatures {
    Matrix coeffs;  // (L+1)^2 x N
    HarmonicDomain domain = HarmonicDomain::SH;
    int max_order = 2;
};

struct BasisMatrix {
    Matrix values;  // S x (L+1)^2
    HarmonicDomain domain = HarmonicDomain::SH;
    int max_order = 2;
    double conditioning = 0.0;  // condition number of B^T B
};

BasisMatrix build_basis_matrix(const Montage& montage, HarmonicDomain domain, int max_order = 2);

struct TransformMethod {
    enum class Kind { least_squares, quadrature } kind = Kind::least_squares;
    double lambda = 1e-6;

    static TransformMethod least_squares(double lambda = 1e-6) {
        return {Kind::least_squares, lambda};
    }
    static TransformMethod quadrature() { return {Kind::quadrature, 0.0}; }
};

// signal is S x N (channels by time); output is (L+1)^2 x N. Least squares
// solves (B^T B + lambda I) c = B^T v per time sample; quadrature uses the
// uniform sampling weight 4*pi/S (sphere) or 3*pi/S (cap).
HarmonicFeatures forward_transform(const Matrix& signal, const BasisMatrix& basis,
                                   const TransformMethod& method = {});

std::array<HarmonicFeatures, 5> harmonic_band_features(const BandSet& bands,
                                                       const Montage& montage,
                                                       HarmonicDomain domain,
                                                       const TransformMethod& method = {});

}  // namespace curldec
