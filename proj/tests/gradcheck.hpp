#pragma once

#include <functional>

#include "curldec/nn.hpp"
#include "testutil.hpp"

namespace testutil {

// Central finite differences over every parameter of a layer plus its input,
// against the layer's analytic gradients. Loss is sum(out .* R) for a fixed
// random projection R. Returns the worst relative error.
inline double gradient_audit(curldec::nn::Layer& layer, const curldec::Matrix& x0,
                             std::uint64_t seed) {
    using curldec::Matrix;
    Matrix out = layer.forward(x0, false);
    const Matrix r = random_matrix(out.rows(), out.cols(), seed);
    auto loss = [&](const Matrix& o) { return o.cwiseProduct(r).sum(); };

    for (curldec::nn::Parameter* p : layer.params()) p->zero_grad();
    const Matrix dx = layer.backward(r);

    const double h = 1e-5;
    double worst = 0.0;
    auto compare = [&](double analytic, const std::function<double()>& numeric) {
        const double denom = std::max(1.0, std::abs(analytic));
        worst = std::max(worst, std::abs(analytic - numeric()) / denom);
    };

    for (curldec::nn::Parameter* p : layer.params()) {
        for (Eigen::Index rr = 0; rr < p->value.rows(); ++rr)
            for (Eigen::Index cc = 0; cc < p->value.cols(); ++cc) {
                const double saved = p->value(rr, cc);
                compare(p->grad(rr, cc), [&]() {
                    p->value(rr, cc) = saved + h;
                    const double up = loss(layer.forward(x0, false));
                    p->value(rr, cc) = saved - h;
                    const double dn = loss(layer.forward(x0, false));
                    p->value(rr, cc) = saved;
                    return (up - dn) / (2.0 * h);
                });
            }
    }
    Matrix xprobe = x0;
    for (Eigen::Index rr = 0; rr < x0.rows(); ++rr)
        for (Eigen::Index cc = 0; cc < x0.cols(); ++cc) {
            const double saved = xprobe(rr, cc);
            compare(dx(rr, cc), [&]() {
                xprobe(rr, cc) = saved + h;
                const double up = loss(layer.forward(xprobe, false));
                xprobe(rr, cc) = saved - h;
                const double dn = loss(layer.forward(xprobe, false));
                xprobe(rr, cc) = saved;
                return (up - dn) / (2.0 * h);
            });
        }
    return worst;
}

}  // namespace testutil
