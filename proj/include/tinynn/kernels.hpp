#pragma once

#include <array>

#include "tinynn/tensor.hpp"

namespace tinynn {

// Worker thread cap: BIASCTL_THREADS when set, otherwise the OpenMP default.
int worker_threads();

namespace kernels {

enum class Padding { Same, Valid };

// Layouts: activations (N, C, D, H, W); conv weights (Cout, Cin, kd, kh, kw);
// dense inputs (N, Fin), dense weights (Fin, Fout).
struct Conv3dGeom {
    int n = 0, cin = 0, cout = 0;
    std::array<int, 3> in{}, k{}, stride{}, pad{}, out{};
};

Conv3dGeom conv3d_geom(int n, int cin, int cout, std::array<int, 3> in,
                       std::array<int, 3> k, std::array<int, 3> stride, Padding padding);

struct Pool3dGeom {
    int n = 0, c = 0;
    std::array<int, 3> in{}, factor{}, out{};  // out = ceil(in/factor), replication pad
};

Pool3dGeom pool3d_geom(int n, int c, std::array<int, 3> in, std::array<int, 3> factor);

// Both namespaces implement identical math with identical per-element
// accumulation order, so results are bitwise equal; `serial` is the plainly
// written reference, `par` carries the OpenMP loops used in production.
#define TINYNN_KERNEL_API(qualifier)                                                    \
    qualifier void conv3d_forward(const Tensor& x, const Tensor& w, const Tensor& b,   \
                                  Tensor& y, const Conv3dGeom& g);                     \
    qualifier void conv3d_backward_input(const Tensor& dy, const Tensor& w, Tensor& dx,\
                                         const Conv3dGeom& g);                         \
    qualifier void conv3d_backward_params(const Tensor& x, const Tensor& dy,           \
                                          Tensor& dw, Tensor& db, const Conv3dGeom& g);\
    qualifier void maxpool3d_forward(const Tensor& x, Tensor& y,                       \
                                     std::vector<int32_t>& argmax,                     \
                                     const Pool3dGeom& g);                             \
    qualifier void maxpool3d_backward(const Tensor& dy,                                \
                                      const std::vector<int32_t>& argmax, Tensor& dx,  \
                                      const Pool3dGeom& g);                            \
    qualifier void avgpool3d_forward(const Tensor& x, Tensor& y, const Pool3dGeom& g); \
    qualifier void avgpool3d_backward(const Tensor& dy, Tensor& dx,                    \
                                      const Pool3dGeom& g);                            \
    qualifier void dense_forward(const Tensor& x, const Tensor& w, const Tensor& b,    \
                                 Tensor& y);                                           \
    qualifier void dense_backward(const Tensor& x, const Tensor& w, const Tensor& dy,  \
                                  Tensor& dx, Tensor& dw, Tensor& db);                 \
    qualifier void batchnorm_forward_train(const Tensor& x, const Tensor& gamma,       \
                                           const Tensor& beta, Tensor& y,              \
                                           Tensor& batch_mean, Tensor& batch_var,      \
                                           double eps);                                \
    qualifier void batchnorm_forward_infer(const Tensor& x, const Tensor& gamma,       \
                                           const Tensor& beta, const Tensor& run_mean, \
                                           const Tensor& run_var, Tensor& y,           \
                                           double eps);                                \
    qualifier void batchnorm_backward(const Tensor& x, const Tensor& gamma,            \
                                      const Tensor& batch_mean, const Tensor& batch_var,\
                                      const Tensor& dy, Tensor& dx, Tensor& dgamma,    \
                                      Tensor& dbeta, double eps);                      \
    qualifier void relu_forward(const Tensor& x, Tensor& y);                           \
    qualifier void relu_backward(const Tensor& x, const Tensor& dy, Tensor& dx);       \
    qualifier void sigmoid_forward(const Tensor& x, Tensor& y);                        \
    qualifier void sigmoid_backward(const Tensor& y, const Tensor& dy, Tensor& dx);

namespace serial {
TINYNN_KERNEL_API()
}
namespace par {
TINYNN_KERNEL_API()
}
#undef TINYNN_KERNEL_API

// numerically stable logistic function
double sigmoid_scalar(double x);

}  // namespace kernels

// production dispatch
namespace nn = kernels::par;

}  // namespace tinynn
