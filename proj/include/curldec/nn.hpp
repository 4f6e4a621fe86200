#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "curldec/rng.hpp"
#include "curldec/types.hpp"

namespace curldec::nn {

using curldec::Matrix;
using curldec::Vector;

enum class Activation { linear, relu, swish, sigmoid };

Matrix activate(const Matrix& pre, Activation act);
// elementwise derivative of the activation evaluated at the pre-activation
Matrix activate_grad(const Matrix& pre, Activation act);

struct Parameter {
    Matrix value;
    Matrix grad;
    std::string name;
    double l2 = 0.0;  // weight-decay factor applied by the trainer

    void zero_grad() { grad.setZero(value.rows(), value.cols()); }
};

// He-uniform initialization: i.i.d. uniform on +-sqrt(6/fan_in).
Matrix he_uniform_init(Eigen::Index rows, Eigen::Index cols, Eigen::Index fan_in, Rng& rng);

// Stateless forward kernels; the layer classes add caching and gradients.
// x is time-major (N x Nc).
Matrix dws_conv1d_forward(const Matrix& x, const Matrix& depth_k, const Matrix& point_k,
                          const Vector& bias);
Matrix conv1d_forward(const Matrix& x, const Matrix& kernels, const Vector& bias, int ksize);
Matrix maxpool1d_forward(const Matrix& x, int pool = 2, int stride = 2);
Matrix cam_forward(const Matrix& x, const Matrix& w, const Vector& b,
                   Activation act = Activation::linear);
Matrix dense_forward(const Matrix& x, const Matrix& w, const Vector& b, Activation act);

class Layer {
public:
    virtual ~Layer() = default;
    virtual Matrix forward(const Matrix& x, bool training) = 0;
    // Consumes dL/d(output), returns dL/d(input), accumulates parameter
    // gradients. Requires a recorded forward pass.
    virtual Matrix backward(const Matrix& grad_out) = 0;
    virtual std::vector<Parameter*> params() { return {}; }
    virtual std::string kind() const = 0;

protected:
    void require_graph() const;
    bool has_graph_ = false;
};

class DwsConv1d : public Layer {
public:
    DwsConv1d(int in_channels, int filters, int ksize, Activation act, double l2, Rng& rng);
    Matrix forward(const Matrix& x, bool training) override;
    Matrix backward(const Matrix& grad_out) override;
    std::vector<Parameter*> params() override { return {&depth_, &point_, &bias_}; }
    std::string kind() const override { return "dws_conv1d"; }

    Parameter depth_, point_, bias_;

private:
    int ksize_;
    Activation act_;
    Matrix x_, mid_, pre_;
};

class Conv1d : public Layer {
public:
    Conv1d(int in_channels, int filters, int ksize, Activation act, double l2, Rng& rng);
    Matrix forward(const Matrix& x, bool training) override;
    Matrix backward(const Matrix& grad_out) override;
    std::vector<Parameter*> params() override { return {&kern_, &bias_}; }
    std::string kind() const override { return "conv1d"; }

    Parameter kern_, bias_;

private:
    int in_channels_, ksize_;
    Activation act_;
    Matrix patches_, pre_;
    Eigen::Index in_rows_ = 0;
};

class MaxPool1d : public Layer {
public:
    MaxPool1d(int pool = 2, int stride = 2) : pool_(pool), stride_(stride) {}
    Matrix forward(const Matrix& x, bool training) override;
    Matrix backward(const Matrix& grad_out) override;
    std::string kind() const override { return "maxpool1d"; }

private:
    int pool_, stride_;
    Eigen::Index in_rows_ = 0;
    Eigen::MatrixXi argmax_;
};

// Attention: a dense map over the feature axis produces per-position weights
// that multiply the input elementwise.
class Cam : public Layer {
public:
    Cam(int units, Activation act, Rng& rng);
    Matrix forward(const Matrix& x, bool training) override;
    Matrix backward(const Matrix& grad_out) override;
    std::vector<Parameter*> params() override { return {&w_, &b_}; }
    std::string kind() const override { return "cam"; }

    Parameter w_, b_;

private:
    Activation act_;
    Matrix x_, pre_, attn_;
};

class Flatten : public Layer {
public:
    Matrix forward(const Matrix& x, bool training) override;
    Matrix backward(const Matrix& grad_out) override;
    std::string kind() const override { return "flatten"; }

private:
    Eigen::Index rows_ = 0, cols_ = 0;
};

// Inverted dropout: scaling happens at training time so inference is identity.
class Dropout : public Layer {
public:
    Dropout(double rate, std::uint64_t seed);
    Matrix forward(const Matrix& x, bool training) override;
    Matrix backward(const Matrix& grad_out) override;
    std::string kind() const override { return "dropout"; }

private:
    double rate_;
    Rng rng_;
    Matrix mask_;
    bool training_pass_ = false;
};

class Dense : public Layer {
public:
    Dense(int in, int out, Activation act, Rng& rng, double l2 = 0.0);
    Matrix forward(const Matrix& x, bool training) override;
    Matrix backward(const Matrix& grad_out) override;
    std::vector<Parameter*> params() override { return {&w_, &b_}; }
    std::string kind() const override { return "dense"; }

    Parameter w_, b_;

private:
    Activation act_;
    Matrix x_, pre_;
};

class Network {
public:
    void add(std::unique_ptr<Layer> layer) { layers_.push_back(std::move(layer)); }

    Matrix forward(const Matrix& x, bool training);
    void backward(const Matrix& grad_out);

    std::vector<Parameter*> params();
    std::size_t parameter_count();
    void zero_grads();

    const std::vector<std::unique_ptr<Layer>>& layers() const { return layers_; }

private:
    std::vector<std::unique_ptr<Layer>> layers_;
};

// Adam with bias correction; moments are lazily shaped to the parameters.
class Adam {
public:
    explicit Adam(double lr = 0.001, double beta1 = 0.9, double beta2 = 0.999,
                  double eps = 1e-8)
        : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps) {}

    void step(const std::vector<Parameter*>& params);
    std::int64_t steps() const { return t_; }
    double lr() const { return lr_; }

private:
    double lr_, beta1_, beta2_, eps_;
    std::int64_t t_ = 0;
    std::vector<Matrix> m_, v_;
};

}  // namespace curldec::nn
