#pragma once

#include <memory>
#include <string>
#include <vector>

#include "common/rng.hpp"
#include "tinynn/kernels.hpp"
#include "tinynn/tensor.hpp"

namespace tinynn {

enum class Mode { Train, Infer };

// A named parameter with its gradient and Adam moment buffers. Non-trainable
// entries (batchnorm running stats) are checkpointed but never stepped.
struct Param {
    std::string name;
    Tensor value;
    Tensor grad;
    Tensor m, v;
    bool trainable = true;

    void init_moments() {
        grad = Tensor::zeros(value.shape);
        if (trainable) {
            m = Tensor::zeros(value.shape);
            v = Tensor::zeros(value.shape);
        }
    }
};

class Layer {
  public:
    virtual ~Layer() = default;
    virtual Tensor forward(const Tensor& x, Mode mode) = 0;
    virtual Tensor backward(const Tensor& dy) = 0;
    virtual void collect_params(std::vector<Param*>& out) { (void)out; }
};

class Conv3d : public Layer {
  public:
    Conv3d(std::string name, int cin, int cout, std::array<int, 3> kernel,
           std::array<int, 3> stride, kernels::Padding padding, common::Rng& rng,
           bool bias = true);

    Tensor forward(const Tensor& x, Mode mode) override;
    Tensor backward(const Tensor& dy) override;
    void collect_params(std::vector<Param*>& out) override;

  private:
    int cin_, cout_;
    std::array<int, 3> kernel_, stride_;
    kernels::Padding padding_;
    Param w_, b_;
    bool has_bias_;
    Tensor cached_x_;
    kernels::Conv3dGeom geom_;
    bool have_cache_ = false;
};

enum class PoolKind { Max, Avg };

class Pool3d : public Layer {
  public:
    Pool3d(PoolKind kind, std::array<int, 3> factor);

    Tensor forward(const Tensor& x, Mode mode) override;
    Tensor backward(const Tensor& dy) override;

  private:
    PoolKind kind_;
    std::array<int, 3> factor_;
    kernels::Pool3dGeom geom_;
    std::vector<int32_t> argmax_;
    bool have_cache_ = false;
};

// Global average over all spatial dims down to (N, C, 1, 1, 1).
class GlobalAvgPool : public Layer {
  public:
    Tensor forward(const Tensor& x, Mode mode) override;
    Tensor backward(const Tensor& dy) override;

  private:
    kernels::Pool3dGeom geom_;
    bool have_cache_ = false;
};

class BatchNorm : public Layer {
  public:
    BatchNorm(std::string name, int channels, double momentum = 0.1, double eps = 1e-5);

    Tensor forward(const Tensor& x, Mode mode) override;
    Tensor backward(const Tensor& dy) override;
    void collect_params(std::vector<Param*>& out) override;

    double eps() const { return eps_; }

  private:
    int channels_;
    double momentum_, eps_;
    Param gamma_, beta_, run_mean_, run_var_;
    Tensor cached_x_, batch_mean_, batch_var_;
    bool have_cache_ = false;
};

class Dense : public Layer {
  public:
    Dense(std::string name, int in_features, int out_features, common::Rng& rng);

    Tensor forward(const Tensor& x, Mode mode) override;
    Tensor backward(const Tensor& dy) override;
    void collect_params(std::vector<Param*>& out) override;

  private:
    int fin_, fout_;
    Param w_, b_;
    Tensor cached_x_;
    bool have_cache_ = false;
};

enum class ActKind { Relu, Sigmoid };

class Activation : public Layer {
  public:
    explicit Activation(ActKind kind) : kind_(kind) {}

    Tensor forward(const Tensor& x, Mode mode) override;
    Tensor backward(const Tensor& dy) override;

  private:
    ActKind kind_;
    Tensor cached_;  // input for relu, output for sigmoid
    bool have_cache_ = false;
};

// (N, C, D, H, W) -> (N, C*D*H*W)
class Flatten : public Layer {
  public:
    Tensor forward(const Tensor& x, Mode mode) override;
    Tensor backward(const Tensor& dy) override;

  private:
    std::vector<int> in_shape_;
};

class Sequential : public Layer {
  public:
    Sequential() = default;
    void add(std::unique_ptr<Layer> layer) { layers_.push_back(std::move(layer)); }

    Tensor forward(const Tensor& x, Mode mode) override;
    Tensor backward(const Tensor& dy) override;
    void collect_params(std::vector<Param*>& out) override;

    size_t size() const { return layers_.size(); }

  private:
    std::vector<std::unique_ptr<Layer>> layers_;
};

// standalone tensor plumbing used by the composite architectures
Tensor upsample2x_nearest(const Tensor& x, const std::array<int, 3>& target);
Tensor upsample2x_backward(const Tensor& dy, const std::vector<int>& in_shape);
Tensor concat_channels(const Tensor& a, const Tensor& b);
void split_channels(const Tensor& dy, int ca, Tensor& da, Tensor& db);
Tensor add(const Tensor& a, const Tensor& b);

}  // namespace tinynn
