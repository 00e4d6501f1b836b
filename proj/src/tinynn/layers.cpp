#include "tinynn/layers.hpp"

#include <cmath>

#include "common/error.hpp"

namespace tinynn {

namespace {

void require_5d(const Tensor& x, const char* what) {
    if (x.ndim() != 5)
        throw common::shape_error(std::string(what) + ": expected 5-d (N,C,D,H,W), got " +
                                  shape_str(x.shape));
}

}  // namespace

Conv3d::Conv3d(std::string name, int cin, int cout, std::array<int, 3> kernel,
               std::array<int, 3> stride, kernels::Padding padding, common::Rng& rng,
               bool bias)
    : cin_(cin), cout_(cout), kernel_(kernel), stride_(stride), padding_(padding),
      has_bias_(bias) {
    w_.name = name + ".w";
    w_.value = Tensor::zeros({cout, cin, kernel[0], kernel[1], kernel[2]});
    const double fan_in = static_cast<double>(cin) * kernel[0] * kernel[1] * kernel[2];
    const double sd = std::sqrt(2.0 / fan_in);
    for (auto& v : w_.value.data) v = rng.gaussian(0.0, sd);
    w_.init_moments();
    b_.name = name + ".b";
    if (has_bias_) {
        b_.value = Tensor::zeros({cout});
        b_.init_moments();
    }
}

Tensor Conv3d::forward(const Tensor& x, Mode) {
    require_5d(x, "conv3d");
    if (x.dim(1) != cin_)
        throw common::shape_error("conv3d: expected " + std::to_string(cin_) +
                                  " input channels, got " + std::to_string(x.dim(1)));
    geom_ = kernels::conv3d_geom(x.dim(0), cin_, cout_, {x.dim(2), x.dim(3), x.dim(4)},
                                 kernel_, stride_, padding_);
    cached_x_ = x;
    have_cache_ = true;
    Tensor y;
    nn::conv3d_forward(x, w_.value, b_.value, y, geom_);
    return y;
}

Tensor Conv3d::backward(const Tensor& dy) {
    if (!have_cache_)
        throw common::state_error("conv3d: backward without a forward pass");
    Tensor dx;
    nn::conv3d_backward_input(dy, w_.value, dx, geom_);
    Tensor db;
    nn::conv3d_backward_params(cached_x_, dy, w_.grad, db, geom_);
    if (has_bias_) b_.grad = db;
    return dx;
}

void Conv3d::collect_params(std::vector<Param*>& out) {
    out.push_back(&w_);
    if (has_bias_) out.push_back(&b_);
}

Pool3d::Pool3d(PoolKind kind, std::array<int, 3> factor) : kind_(kind), factor_(factor) {}

Tensor Pool3d::forward(const Tensor& x, Mode) {
    require_5d(x, "pool3d");
    geom_ = kernels::pool3d_geom(x.dim(0), x.dim(1), {x.dim(2), x.dim(3), x.dim(4)},
                                 factor_);
    have_cache_ = true;
    Tensor y;
    if (kind_ == PoolKind::Max) {
        nn::maxpool3d_forward(x, y, argmax_, geom_);
    } else {
        nn::avgpool3d_forward(x, y, geom_);
    }
    return y;
}

Tensor Pool3d::backward(const Tensor& dy) {
    if (!have_cache_)
        throw common::state_error("pool3d: backward without a forward pass");
    Tensor dx;
    if (kind_ == PoolKind::Max) {
        nn::maxpool3d_backward(dy, argmax_, dx, geom_);
    } else {
        nn::avgpool3d_backward(dy, dx, geom_);
    }
    return dx;
}

Tensor GlobalAvgPool::forward(const Tensor& x, Mode) {
    require_5d(x, "global avg pool");
    geom_ = kernels::pool3d_geom(x.dim(0), x.dim(1), {x.dim(2), x.dim(3), x.dim(4)},
                                 {x.dim(2), x.dim(3), x.dim(4)});
    have_cache_ = true;
    Tensor y;
    nn::avgpool3d_forward(x, y, geom_);
    return y;
}

Tensor GlobalAvgPool::backward(const Tensor& dy) {
    if (!have_cache_)
        throw common::state_error("global avg pool: backward without a forward pass");
    Tensor dx;
    nn::avgpool3d_backward(dy, dx, geom_);
    return dx;
}

BatchNorm::BatchNorm(std::string name, int channels, double momentum, double eps)
    : channels_(channels), momentum_(momentum), eps_(eps) {
    gamma_.name = name + ".gamma";
    gamma_.value = Tensor::full({channels}, 1.0);
    gamma_.init_moments();
    beta_.name = name + ".beta";
    beta_.value = Tensor::zeros({channels});
    beta_.init_moments();
    run_mean_.name = name + ".running_mean";
    run_mean_.value = Tensor::zeros({channels});
    run_mean_.trainable = false;
    run_var_.name = name + ".running_var";
    run_var_.value = Tensor::full({channels}, 1.0);
    run_var_.trainable = false;
}

Tensor BatchNorm::forward(const Tensor& x, Mode mode) {
    if (x.ndim() < 2 || x.dim(1) != channels_)
        throw common::shape_error("batchnorm: expected " + std::to_string(channels_) +
                                  " channels, got " + shape_str(x.shape));
    Tensor y;
    if (mode == Mode::Train) {
        if (x.dim(0) < 2)
            throw common::validation_error(
                "batchnorm: degenerate batch of 1 in train mode");
        nn::batchnorm_forward_train(x, gamma_.value, beta_.value, y, batch_mean_,
                                    batch_var_, eps_);
        cached_x_ = x;
        have_cache_ = true;
        for (int c = 0; c < channels_; ++c) {
            run_mean_.value[c] =
                (1.0 - momentum_) * run_mean_.value[c] + momentum_ * batch_mean_[c];
            run_var_.value[c] =
                (1.0 - momentum_) * run_var_.value[c] + momentum_ * batch_var_[c];
        }
    } else {
        nn::batchnorm_forward_infer(x, gamma_.value, beta_.value, run_mean_.value,
                                    run_var_.value, y, eps_);
        have_cache_ = false;
    }
    return y;
}

Tensor BatchNorm::backward(const Tensor& dy) {
    if (!have_cache_)
        throw common::state_error("batchnorm: backward without a train-mode forward");
    Tensor dx;
    nn::batchnorm_backward(cached_x_, gamma_.value, batch_mean_, batch_var_, dy, dx,
                           gamma_.grad, beta_.grad, eps_);
    return dx;
}

void BatchNorm::collect_params(std::vector<Param*>& out) {
    out.push_back(&gamma_);
    out.push_back(&beta_);
    out.push_back(&run_mean_);
    out.push_back(&run_var_);
}

Dense::Dense(std::string name, int in_features, int out_features, common::Rng& rng)
    : fin_(in_features), fout_(out_features) {
    w_.name = name + ".w";
    w_.value = Tensor::zeros({fin_, fout_});
    const double sd = std::sqrt(2.0 / fin_);
    for (auto& v : w_.value.data) v = rng.gaussian(0.0, sd);
    w_.init_moments();
    b_.name = name + ".b";
    b_.value = Tensor::zeros({fout_});
    b_.init_moments();
}

Tensor Dense::forward(const Tensor& x, Mode) {
    if (x.ndim() != 2 || x.dim(1) != fin_)
        throw common::shape_error("dense: expected (N," + std::to_string(fin_) +
                                  "), got " + shape_str(x.shape));
    cached_x_ = x;
    have_cache_ = true;
    Tensor y;
    nn::dense_forward(x, w_.value, b_.value, y);
    return y;
}

Tensor Dense::backward(const Tensor& dy) {
    if (!have_cache_)
        throw common::state_error("dense: backward without a forward pass");
    Tensor dx;
    nn::dense_backward(cached_x_, w_.value, dy, dx, w_.grad, b_.grad);
    return dx;
}

void Dense::collect_params(std::vector<Param*>& out) {
    out.push_back(&w_);
    out.push_back(&b_);
}

Tensor Activation::forward(const Tensor& x, Mode) {
    Tensor y;
    if (kind_ == ActKind::Relu) {
        nn::relu_forward(x, y);
        cached_ = x;
    } else {
        nn::sigmoid_forward(x, y);
        cached_ = y;
    }
    have_cache_ = true;
    return y;
}

Tensor Activation::backward(const Tensor& dy) {
    if (!have_cache_)
        throw common::state_error("activation: backward without a forward pass");
    Tensor dx;
    if (kind_ == ActKind::Relu) {
        nn::relu_backward(cached_, dy, dx);
    } else {
        nn::sigmoid_backward(cached_, dy, dx);
    }
    return dx;
}

Tensor Flatten::forward(const Tensor& x, Mode) {
    in_shape_ = x.shape;
    int64_t features = 1;
    for (int i = 1; i < x.ndim(); ++i) features *= x.dim(i);
    return x.reshaped({x.dim(0), static_cast<int>(features)});
}

Tensor Flatten::backward(const Tensor& dy) {
    if (in_shape_.empty())
        throw common::state_error("flatten: backward without a forward pass");
    return dy.reshaped(in_shape_);
}

Tensor Sequential::forward(const Tensor& x, Mode mode) {
    Tensor t = x;
    for (auto& l : layers_) t = l->forward(t, mode);
    return t;
}

Tensor Sequential::backward(const Tensor& dy) {
    Tensor t = dy;
    for (auto it = layers_.rbegin(); it != layers_.rend(); ++it) t = (*it)->backward(t);
    return t;
}

void Sequential::collect_params(std::vector<Param*>& out) {
    for (auto& l : layers_) l->collect_params(out);
}

Tensor upsample2x_nearest(const Tensor& x, const std::array<int, 3>& target) {
    require_5d(x, "upsample");
    for (int a = 0; a < 3; ++a)
        if (target[a] < x.dim(2 + a) || target[a] > 2 * x.dim(2 + a))
            throw common::shape_error("upsample: target must lie in [n, 2n]");
    Tensor y = Tensor::zeros({x.dim(0), x.dim(1), target[0], target[1], target[2]});
    const int64_t planes = static_cast<int64_t>(x.dim(0)) * x.dim(1);
    const int64_t in_sp = static_cast<int64_t>(x.dim(2)) * x.dim(3) * x.dim(4);
    const int64_t out_sp = static_cast<int64_t>(target[0]) * target[1] * target[2];
    for (int64_t p = 0; p < planes; ++p) {
        const int64_t xb = p * in_sp, yb = p * out_sp;
        for (int d = 0; d < target[0]; ++d)
            for (int h = 0; h < target[1]; ++h)
                for (int w = 0; w < target[2]; ++w)
                    y[yb + (static_cast<int64_t>(d) * target[1] + h) * target[2] + w] =
                        x[xb + (static_cast<int64_t>(d / 2) * x.dim(3) + h / 2) *
                                   x.dim(4) +
                          w / 2];
    }
    return y;
}

Tensor upsample2x_backward(const Tensor& dy, const std::vector<int>& in_shape) {
    Tensor dx = Tensor::zeros(in_shape);
    const int64_t planes = static_cast<int64_t>(in_shape[0]) * in_shape[1];
    const int64_t in_sp =
        static_cast<int64_t>(in_shape[2]) * in_shape[3] * in_shape[4];
    const int64_t out_sp = static_cast<int64_t>(dy.dim(2)) * dy.dim(3) * dy.dim(4);
    for (int64_t p = 0; p < planes; ++p) {
        const int64_t xb = p * in_sp, yb = p * out_sp;
        for (int d = 0; d < dy.dim(2); ++d)
            for (int h = 0; h < dy.dim(3); ++h)
                for (int w = 0; w < dy.dim(4); ++w)
                    dx[xb + (static_cast<int64_t>(d / 2) * in_shape[3] + h / 2) *
                                in_shape[4] +
                       w / 2] +=
                        dy[yb + (static_cast<int64_t>(d) * dy.dim(3) + h) * dy.dim(4) +
                           w];
    }
    return dx;
}

Tensor concat_channels(const Tensor& a, const Tensor& b) {
    require_5d(a, "concat");
    require_5d(b, "concat");
    for (int i : {0, 2, 3, 4})
        if (a.dim(i) != b.dim(i))
            throw common::shape_error("concat: non-channel dims differ: " +
                                      shape_str(a.shape) + " vs " + shape_str(b.shape));
    const int n = a.dim(0), ca = a.dim(1), cb = b.dim(1);
    const int64_t sp = static_cast<int64_t>(a.dim(2)) * a.dim(3) * a.dim(4);
    Tensor y = Tensor::zeros({n, ca + cb, a.dim(2), a.dim(3), a.dim(4)});
    for (int i = 0; i < n; ++i) {
        for (int c = 0; c < ca; ++c)
            std::copy_n(&a.data[(static_cast<int64_t>(i) * ca + c) * sp], sp,
                        &y.data[(static_cast<int64_t>(i) * (ca + cb) + c) * sp]);
        for (int c = 0; c < cb; ++c)
            std::copy_n(&b.data[(static_cast<int64_t>(i) * cb + c) * sp], sp,
                        &y.data[(static_cast<int64_t>(i) * (ca + cb) + ca + c) * sp]);
    }
    return y;
}

void split_channels(const Tensor& dy, int ca, Tensor& da, Tensor& db) {
    const int n = dy.dim(0), c = dy.dim(1), cb = c - ca;
    const int64_t sp = static_cast<int64_t>(dy.dim(2)) * dy.dim(3) * dy.dim(4);
    da = Tensor::zeros({n, ca, dy.dim(2), dy.dim(3), dy.dim(4)});
    db = Tensor::zeros({n, cb, dy.dim(2), dy.dim(3), dy.dim(4)});
    for (int i = 0; i < n; ++i) {
        for (int ch = 0; ch < ca; ++ch)
            std::copy_n(&dy.data[(static_cast<int64_t>(i) * c + ch) * sp], sp,
                        &da.data[(static_cast<int64_t>(i) * ca + ch) * sp]);
        for (int ch = 0; ch < cb; ++ch)
            std::copy_n(&dy.data[(static_cast<int64_t>(i) * c + ca + ch) * sp], sp,
                        &db.data[(static_cast<int64_t>(i) * cb + ch) * sp]);
    }
}

Tensor add(const Tensor& a, const Tensor& b) {
    if (!same_shape(a, b))
        throw common::shape_error("add: shapes differ: " + shape_str(a.shape) + " vs " +
                                  shape_str(b.shape));
    Tensor y = a;
    for (int64_t i = 0; i < y.numel(); ++i) y[i] += b[i];
    return y;
}

}  // namespace tinynn
