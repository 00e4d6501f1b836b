#include "tinynn/loss.hpp"

#include <cmath>

#include "common/error.hpp"

namespace tinynn {

std::string loss_name(LossKind k) { return k == LossKind::Bce ? "bce" : "dice"; }

LossKind loss_from_string(const std::string& s) {
    if (s == "bce") return LossKind::Bce;
    if (s == "dice") return LossKind::Dice;
    throw common::format_error("unknown loss: " + s);
}

LossResult loss_bce(const Tensor& p, const Tensor& y) {
    if (!same_shape(p, y))
        throw common::shape_error("bce: prediction/target shapes differ");
    constexpr double eps_p = 1e-7;
    const int64_t n = p.numel();
    LossResult r;
    r.grad = Tensor::zeros(p.shape);
    double acc = 0.0;
    for (int64_t i = 0; i < n; ++i) {
        const bool lo = p[i] < eps_p, hi = p[i] > 1.0 - eps_p;
        const double pc = lo ? eps_p : (hi ? 1.0 - eps_p : p[i]);
        acc += -(y[i] * std::log(pc) + (1.0 - y[i]) * std::log(1.0 - pc));
        r.grad[i] = (lo || hi) ? 0.0 : (-y[i] / pc + (1.0 - y[i]) / (1.0 - pc)) / n;
    }
    r.value = acc / static_cast<double>(n);
    return r;
}

LossResult loss_dice(const Tensor& p, const Tensor& y, double smooth) {
    if (!same_shape(p, y))
        throw common::shape_error("dice: prediction/target shapes differ");
    if (!(smooth > 0))
        throw common::validation_error("dice: smooth must be > 0");
    double sum_py = 0.0, sum_p = 0.0, sum_y = 0.0;
    for (int64_t i = 0; i < p.numel(); ++i) {
        sum_py += p[i] * y[i];
        sum_p += p[i];
        sum_y += y[i];
    }
    const double num = 2.0 * sum_py + smooth;
    const double den = sum_p + sum_y + smooth;
    LossResult r;
    r.value = 1.0 - num / den;
    r.grad = Tensor::zeros(p.shape);
    for (int64_t i = 0; i < p.numel(); ++i)
        r.grad[i] = -(2.0 * y[i] * den - num) / (den * den);
    return r;
}

LossResult compute_loss(LossKind kind, const Tensor& p, const Tensor& y) {
    return kind == LossKind::Bce ? loss_bce(p, y) : loss_dice(p, y);
}

}  // namespace tinynn
