#include "curldec/nn.hpp"

#include <cmath>

namespace curldec::nn {

namespace {

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

}  // namespace

Matrix activate(const Matrix& pre, Activation act) {
    switch (act) {
        case Activation::linear: return pre;
        case Activation::relu: return pre.cwiseMax(0.0);
        case Activation::swish:
            return pre.unaryExpr([](double z) { return z * sigmoid(z); });
        case Activation::sigmoid:
            return pre.unaryExpr([](double z) { return sigmoid(z); });
    }
    throw Error(ErrorCode::InvalidArgument, "unknown activation");
}

Matrix activate_grad(const Matrix& pre, Activation act) {
    switch (act) {
        case Activation::linear: return Matrix::Ones(pre.rows(), pre.cols());
        case Activation::relu:
            return pre.unaryExpr([](double z) { return z > 0.0 ? 1.0 : 0.0; });
        case Activation::swish:
            return pre.unaryExpr([](double z) {
                const double s = sigmoid(z);
                return s * (1.0 + z * (1.0 - s));
            });
        case Activation::sigmoid:
            return pre.unaryExpr([](double z) {
                const double s = sigmoid(z);
                return s * (1.0 - s);
            });
    }
    throw Error(ErrorCode::InvalidArgument, "unknown activation");
}

Matrix he_uniform_init(Eigen::Index rows, Eigen::Index cols, Eigen::Index fan_in, Rng& rng) {
    if (fan_in <= 0) throw Error(ErrorCode::InvalidArgument, "fan_in must be positive");
    const double bound = std::sqrt(6.0 / static_cast<double>(fan_in));
    Matrix m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r)
        for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = rng.uniform(-bound, bound);
    return m;
}

void Layer::require_graph() const {
    if (!has_graph_)
        throw Error(ErrorCode::NoGraph, "backward without a recorded forward pass");
}

// ---------------------------------------------------------------------------
// stateless kernels

Matrix dws_conv1d_forward(const Matrix& x, const Matrix& depth_k, const Matrix& point_k,
                          const Vector& bias) {
    const Eigen::Index n = x.rows();
    const Eigen::Index nc = x.cols();
    const Eigen::Index k = depth_k.cols();
    if (depth_k.rows() != nc || point_k.rows() != nc || point_k.cols() != bias.size())
        throw Error(ErrorCode::ShapeMismatch, "depthwise kernel shapes inconsistent with input");
    if (n < k) throw Error(ErrorCode::WindowTooShort, "input shorter than kernel");
    const Eigen::Index out_n = n - k + 1;
    Matrix mid(out_n, nc);
    for (Eigen::Index c = 0; c < nc; ++c)
        for (Eigen::Index t = 0; t < out_n; ++t) {
            double acc = 0.0;
            for (Eigen::Index i = 0; i < k; ++i) acc += x(t + i, c) * depth_k(c, i);
            mid(t, c) = acc;
        }
    Matrix pre = mid * point_k;
    pre.rowwise() += bias.transpose();
    return activate(pre, Activation::relu);
}

Matrix conv1d_forward(const Matrix& x, const Matrix& kernels, const Vector& bias, int ksize) {
    const Eigen::Index n = x.rows();
    const Eigen::Index cin = x.cols();
    if (kernels.rows() != ksize * cin || kernels.cols() != bias.size())
        throw Error(ErrorCode::ShapeMismatch, "kernel shapes inconsistent with input");
    if (n < ksize) throw Error(ErrorCode::WindowTooShort, "input shorter than kernel");
    const Eigen::Index out_n = n - ksize + 1;
    Matrix patches(out_n, ksize * cin);
    for (Eigen::Index t = 0; t < out_n; ++t)
        for (Eigen::Index i = 0; i < ksize; ++i)
            patches.block(t, i * cin, 1, cin) = x.row(t + i);
    Matrix pre = patches * kernels;
    pre.rowwise() += bias.transpose();
    return activate(pre, Activation::relu);
}

Matrix maxpool1d_forward(const Matrix& x, int pool, int stride) {
    const Eigen::Index out_n = x.rows() >= pool ? (x.rows() - pool) / stride + 1 : 0;
    Matrix out(out_n, x.cols());
    for (Eigen::Index r = 0; r < out_n; ++r)
        for (Eigen::Index f = 0; f < x.cols(); ++f) {
            double best = x(r * stride, f);
            for (int i = 1; i < pool; ++i) best = std::max(best, x(r * stride + i, f));
            out(r, f) = best;
        }
    return out;
}

Matrix cam_forward(const Matrix& x, const Matrix& w, const Vector& b, Activation act) {
    if (x.cols() != w.rows() || w.cols() != b.size())
        throw Error(ErrorCode::ShapeMismatch, "attention weight shapes inconsistent");
    Matrix pre = x * w;
    pre.rowwise() += b.transpose();
    return x.cwiseProduct(activate(pre, act));
}

Matrix dense_forward(const Matrix& x, const Matrix& w, const Vector& b, Activation act) {
    if (x.cols() != w.rows() || w.cols() != b.size())
        throw Error(ErrorCode::ShapeMismatch, "dense shapes inconsistent");
    Matrix pre = x * w;
    pre.rowwise() += b.transpose();
    return activate(pre, act);
}

// ---------------------------------------------------------------------------
// layers

DwsConv1d::DwsConv1d(int in_channels, int filters, int ksize, Activation act, double l2,
                     Rng& rng)
    : ksize_(ksize), act_(act) {
    depth_.value = he_uniform_init(in_channels, ksize, ksize, rng);
    depth_.name = "dws.depth";
    depth_.l2 = l2;
    point_.value = he_uniform_init(in_channels, filters, in_channels, rng);
    point_.name = "dws.point";
    point_.l2 = l2;
    bias_.value = Matrix::Zero(1, filters);
    bias_.name = "dws.bias";
    depth_.zero_grad();
    point_.zero_grad();
    bias_.zero_grad();
}

Matrix DwsConv1d::forward(const Matrix& x, bool) {
    const Eigen::Index n = x.rows();
    const Eigen::Index nc = x.cols();
    if (nc != depth_.value.rows())
        throw Error(ErrorCode::ShapeMismatch, "channel count does not match depth kernels");
    if (n < ksize_) throw Error(ErrorCode::WindowTooShort, "input shorter than kernel");
    x_ = x;
    const Eigen::Index out_n = n - ksize_ + 1;
    mid_.resize(out_n, nc);
    for (Eigen::Index c = 0; c < nc; ++c)
        for (Eigen::Index t = 0; t < out_n; ++t) {
            double acc = 0.0;
            for (Eigen::Index i = 0; i < ksize_; ++i) acc += x(t + i, c) * depth_.value(c, i);
            mid_(t, c) = acc;
        }
    pre_ = mid_ * point_.value;
    pre_.rowwise() += bias_.value.row(0);
    has_graph_ = true;
    return activate(pre_, act_);
}

Matrix DwsConv1d::backward(const Matrix& grad_out) {
    require_graph();
    const Matrix dpre = grad_out.cwiseProduct(activate_grad(pre_, act_));
    bias_.grad.row(0) += dpre.colwise().sum();
    point_.grad += mid_.transpose() * dpre;
    const Matrix dmid = dpre * point_.value.transpose();

    const Eigen::Index nc = x_.cols();
    const Eigen::Index out_n = dmid.rows();
    Matrix dx = Matrix::Zero(x_.rows(), nc);
    for (Eigen::Index c = 0; c < nc; ++c) {
        for (Eigen::Index i = 0; i < ksize_; ++i) {
            double acc = 0.0;
            for (Eigen::Index t = 0; t < out_n; ++t) acc += x_(t + i, c) * dmid(t, c);
            depth_.grad(c, i) += acc;
        }
        for (Eigen::Index t = 0; t < out_n; ++t)
            for (Eigen::Index i = 0; i < ksize_; ++i)
                dx(t + i, c) += depth_.value(c, i) * dmid(t, c);
    }
    return dx;
}

Conv1d::Conv1d(int in_channels, int filters, int ksize, Activation act, double l2, Rng& rng)
    : in_channels_(in_channels), ksize_(ksize), act_(act) {
    kern_.value = he_uniform_init(static_cast<Eigen::Index>(ksize) * in_channels, filters,
                                  static_cast<Eigen::Index>(ksize) * in_channels, rng);
    kern_.name = "conv.kern";
    kern_.l2 = l2;
    bias_.value = Matrix::Zero(1, filters);
    bias_.name = "conv.bias";
    kern_.zero_grad();
    bias_.zero_grad();
}

Matrix Conv1d::forward(const Matrix& x, bool) {
    if (x.cols() != in_channels_)
        throw Error(ErrorCode::ShapeMismatch, "channel count does not match kernels");
    if (x.rows() < ksize_) throw Error(ErrorCode::WindowTooShort, "input shorter than kernel");
    in_rows_ = x.rows();
    const Eigen::Index out_n = x.rows() - ksize_ + 1;
    patches_.resize(out_n, static_cast<Eigen::Index>(ksize_) * in_channels_);
    for (Eigen::Index t = 0; t < out_n; ++t)
        for (Eigen::Index i = 0; i < ksize_; ++i)
            patches_.block(t, i * in_channels_, 1, in_channels_) = x.row(t + i);
    pre_ = patches_ * kern_.value;
    pre_.rowwise() += bias_.value.row(0);
    has_graph_ = true;
    return activate(pre_, act_);
}

Matrix Conv1d::backward(const Matrix& grad_out) {
    require_graph();
    const Matrix dpre = grad_out.cwiseProduct(activate_grad(pre_, act_));
    bias_.grad.row(0) += dpre.colwise().sum();
    kern_.grad += patches_.transpose() * dpre;
    const Matrix dpatches = dpre * kern_.value.transpose();
    Matrix dx = Matrix::Zero(in_rows_, in_channels_);
    for (Eigen::Index t = 0; t < dpatches.rows(); ++t)
        for (Eigen::Index i = 0; i < ksize_; ++i)
            dx.row(t + i) += dpatches.block(t, i * in_channels_, 1, in_channels_);
    return dx;
}

Matrix MaxPool1d::forward(const Matrix& x, bool) {
    in_rows_ = x.rows();
    const Eigen::Index out_n = x.rows() >= pool_ ? (x.rows() - pool_) / stride_ + 1 : 0;
    Matrix out(out_n, x.cols());
    argmax_.resize(out_n, x.cols());
    for (Eigen::Index r = 0; r < out_n; ++r)
        for (Eigen::Index f = 0; f < x.cols(); ++f) {
            Eigen::Index best_i = r * stride_;
            double best = x(best_i, f);
            for (int i = 1; i < pool_; ++i) {
                if (x(r * stride_ + i, f) > best) {
                    best = x(r * stride_ + i, f);
                    best_i = r * stride_ + i;
                }
            }
            out(r, f) = best;
            argmax_(r, f) = static_cast<int>(best_i);
        }
    has_graph_ = true;
    return out;
}

Matrix MaxPool1d::backward(const Matrix& grad_out) {
    require_graph();
    Matrix dx = Matrix::Zero(in_rows_, grad_out.cols());
    for (Eigen::Index r = 0; r < grad_out.rows(); ++r)
        for (Eigen::Index f = 0; f < grad_out.cols(); ++f)
            dx(argmax_(r, f), f) += grad_out(r, f);
    return dx;
}

Cam::Cam(int units, Activation act, Rng& rng) : act_(act) {
    w_.value = he_uniform_init(units, units, units, rng);
    w_.name = "cam.w";
    b_.value = Matrix::Zero(1, units);
    b_.name = "cam.b";
    w_.zero_grad();
    b_.zero_grad();
}

Matrix Cam::forward(const Matrix& x, bool) {
    if (x.cols() != w_.value.rows())
        throw Error(ErrorCode::ShapeMismatch, "feature width does not match attention weights");
    x_ = x;
    pre_ = x * w_.value;
    pre_.rowwise() += b_.value.row(0);
    attn_ = activate(pre_, act_);
    has_graph_ = true;
    return x.cwiseProduct(attn_);
}

Matrix Cam::backward(const Matrix& grad_out) {
    require_graph();
    const Matrix dattn = grad_out.cwiseProduct(x_);
    const Matrix dpre = dattn.cwiseProduct(activate_grad(pre_, act_));
    w_.grad += x_.transpose() * dpre;
    b_.grad.row(0) += dpre.colwise().sum();
    return grad_out.cwiseProduct(attn_) + dpre * w_.value.transpose();
}

Matrix Flatten::forward(const Matrix& x, bool) {
    rows_ = x.rows();
    cols_ = x.cols();
    Matrix out(1, rows_ * cols_);
    for (Eigen::Index r = 0; r < rows_; ++r)
        for (Eigen::Index c = 0; c < cols_; ++c) out(0, r * cols_ + c) = x(r, c);
    has_graph_ = true;
    return out;
}

Matrix Flatten::backward(const Matrix& grad_out) {
    require_graph();
    Matrix dx(rows_, cols_);
    for (Eigen::Index r = 0; r < rows_; ++r)
        for (Eigen::Index c = 0; c < cols_; ++c) dx(r, c) = grad_out(0, r * cols_ + c);
    return dx;
}

Dropout::Dropout(double rate, std::uint64_t seed) : rate_(rate), rng_(seed) {
    if (rate < 0.0 || rate >= 1.0)
        throw Error(ErrorCode::InvalidArgument, "dropout rate must lie in [0, 1)");
}

Matrix Dropout::forward(const Matrix& x, bool training) {
    has_graph_ = true;
    training_pass_ = training;
    if (!training || rate_ == 0.0) return x;
    const double keep = 1.0 - rate_;
    mask_.resize(x.rows(), x.cols());
    for (Eigen::Index r = 0; r < x.rows(); ++r)
        for (Eigen::Index c = 0; c < x.cols(); ++c)
            mask_(r, c) = rng_.uniform01() < keep ? 1.0 / keep : 0.0;
    return x.cwiseProduct(mask_);
}

Matrix Dropout::backward(const Matrix& grad_out) {
    require_graph();
    if (!training_pass_ || rate_ == 0.0) return grad_out;
    return grad_out.cwiseProduct(mask_);
}

Dense::Dense(int in, int out, Activation act, Rng& rng, double l2) : act_(act) {
    w_.value = he_uniform_init(in, out, in, rng);
    w_.name = "dense.w";
    w_.l2 = l2;
    b_.value = Matrix::Zero(1, out);
    b_.name = "dense.b";
    w_.zero_grad();
    b_.zero_grad();
}

Matrix Dense::forward(const Matrix& x, bool) {
    if (x.cols() != w_.value.rows())
        throw Error(ErrorCode::ShapeMismatch, "dense input width mismatch");
    x_ = x;
    pre_ = x * w_.value;
    pre_.rowwise() += b_.value.row(0);
    has_graph_ = true;
    return activate(pre_, act_);
}

Matrix Dense::backward(const Matrix& grad_out) {
    require_graph();
    const Matrix dpre = grad_out.cwiseProduct(activate_grad(pre_, act_));
    w_.grad += x_.transpose() * dpre;
    b_.grad.row(0) += dpre.colwise().sum();
    return dpre * w_.value.transpose();
}

// ---------------------------------------------------------------------------

Matrix Network::forward(const Matrix& x, bool training) {
    Matrix h = x;
    for (auto& layer : layers_) h = layer->forward(h, training);
    return h;
}

void Network::backward(const Matrix& grad_out) {
    Matrix g = grad_out;
    for (auto it = layers_.rbegin(); it != layers_.rend(); ++it) g = (*it)->backward(g);
}

std::vector<Parameter*> Network::params() {
    std::vector<Parameter*> out;
    for (auto& layer : layers_)
        for (Parameter* p : layer->params()) out.push_back(p);
    return out;
}

std::size_t Network::parameter_count() {
    std::size_t n = 0;
    for (Parameter* p : params()) n += static_cast<std::size_t>(p->value.size());
    return n;
}

void Network::zero_grads() {
    for (Parameter* p : params()) p->zero_grad();
}

void Adam::step(const std::vector<Parameter*>& params) {
    if (m_.empty()) {
        m_.resize(params.size());
        v_.resize(params.size());
        for (std::size_t i = 0; i < params.size(); ++i) {
            m_[i] = Matrix::Zero(params[i]->value.rows(), params[i]->value.cols());
            v_[i] = Matrix::Zero(params[i]->value.rows(), params[i]->value.cols());
        }
    }
    if (params.size() != m_.size())
        throw Error(ErrorCode::ShapeMismatch, "parameter set changed between steps");
    for (const Parameter* p : params)
        if (!p->grad.allFinite())
            throw Error(ErrorCode::NonFiniteGradient, "non-finite gradient in " + p->name);

    ++t_;
    const double bc1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
    const double bc2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
    for (std::size_t i = 0; i < params.size(); ++i) {
        Parameter& p = *params[i];
        m_[i] = beta1_ * m_[i] + (1.0 - beta1_) * p.grad;
        v_[i] = beta2_ * v_[i] + (1.0 - beta2_) * p.grad.cwiseProduct(p.grad);
        const Matrix mhat = m_[i] / bc1;
        const Matrix vhat = v_[i] / bc2;
        p.value -= lr_ * (mhat.array() / (vhat.array().sqrt() + eps_)).matrix();
    }
}

}  // namespace curldec::nn
