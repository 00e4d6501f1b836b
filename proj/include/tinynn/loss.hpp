#pragma once

#include "tinynn/tensor.hpp"

namespace tinynn {

enum class LossKind { Bce, Dice };

std::string loss_name(LossKind k);
LossKind loss_from_string(const std::string& s);

struct LossResult {
    double value = 0.0;
    Tensor grad;  // d(value)/d(p), same shape as p
};

// Mean binary cross-entropy over all elements. Probabilities are clamped to
// [1e-7, 1 - 1e-7]; the gradient is zero at clamped points.
LossResult loss_bce(const Tensor& p, const Tensor& y);

// Smoothed soft Dice loss, 1 - (2*sum(p*y) + s) / (sum(p) + sum(y) + s),
// sums taken over every voxel in the batch.
LossResult loss_dice(const Tensor& p, const Tensor& y, double smooth = 1.0);

LossResult compute_loss(LossKind kind, const Tensor& p, const Tensor& y);

}  // namespace tinynn
