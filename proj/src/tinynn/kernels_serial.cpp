#include <algorithm>
#include <cmath>

#include "common/error.hpp"
#include "tinynn/kernels.hpp"

// Reference implementations: straightforward loops, no parallelism. The
// OpenMP variants in kernels_omp.cpp must match these bitwise.

namespace tinynn::kernels {

Conv3dGeom conv3d_geom(int n, int cin, int cout, std::array<int, 3> in,
                       std::array<int, 3> k, std::array<int, 3> stride,
                       Padding padding) {
    Conv3dGeom g;
    g.n = n;
    g.cin = cin;
    g.cout = cout;
    g.in = in;
    g.k = k;
    g.stride = stride;
    for (int a = 0; a < 3; ++a) {
        if (in[a] < 1 || k[a] < 1 || stride[a] < 1)
            throw common::shape_error("conv3d: nonpositive geometry");
        if (padding == Padding::Same) {
            g.out[a] = (in[a] + stride[a] - 1) / stride[a];
            const int span = (g.out[a] - 1) * stride[a] + k[a];
            g.pad[a] = std::max(span - in[a], 0) / 2;
        } else {
            if (in[a] < k[a])
                throw common::shape_error("conv3d: input smaller than kernel (valid)");
            g.out[a] = (in[a] - k[a]) / stride[a] + 1;
            g.pad[a] = 0;
        }
    }
    return g;
}

Pool3dGeom pool3d_geom(int n, int c, std::array<int, 3> in, std::array<int, 3> factor) {
    Pool3dGeom g;
    g.n = n;
    g.c = c;
    g.in = in;
    g.factor = factor;
    for (int a = 0; a < 3; ++a) {
        if (in[a] < 1 || factor[a] < 1)
            throw common::shape_error("pool3d: nonpositive geometry");
        g.out[a] = (in[a] + factor[a] - 1) / factor[a];
    }
    return g;
}

double sigmoid_scalar(double x) {
    if (x >= 0) {
        return 1.0 / (1.0 + std::exp(-x));
    }
    const double e = std::exp(x);
    return e / (1.0 + e);
}

namespace serial {

namespace {

inline int64_t idx5(const Conv3dGeom&, int64_t base, int64_t d, int64_t h, int64_t w,
                    int64_t H, int64_t W) {
    return base + (d * H + h) * W + w;
}

}  // namespace

void conv3d_forward(const Tensor& x, const Tensor& w, const Tensor& b, Tensor& y,
                    const Conv3dGeom& g) {
    y = Tensor::zeros({g.n, g.cout, g.out[0], g.out[1], g.out[2]});
    const int64_t in_spatial = static_cast<int64_t>(g.in[0]) * g.in[1] * g.in[2];
    for (int n = 0; n < g.n; ++n)
        for (int co = 0; co < g.cout; ++co) {
            int64_t yi = ((static_cast<int64_t>(n) * g.cout + co) *
                          g.out[0] * g.out[1] * g.out[2]);
            for (int od = 0; od < g.out[0]; ++od)
                for (int oh = 0; oh < g.out[1]; ++oh)
                    for (int ow = 0; ow < g.out[2]; ++ow, ++yi) {
                        double acc = b.numel() ? b[co] : 0.0;
                        for (int ci = 0; ci < g.cin; ++ci) {
                            const int64_t xbase =
                                (static_cast<int64_t>(n) * g.cin + ci) * in_spatial;
                            const int64_t wbase =
                                ((static_cast<int64_t>(co) * g.cin + ci) * g.k[0]) *
                                g.k[1] * g.k[2];
                            int64_t wi = wbase;
                            for (int kd = 0; kd < g.k[0]; ++kd)
                                for (int kh = 0; kh < g.k[1]; ++kh)
                                    for (int kw = 0; kw < g.k[2]; ++kw, ++wi) {
                                        const int id = od * g.stride[0] - g.pad[0] + kd;
                                        const int ih = oh * g.stride[1] - g.pad[1] + kh;
                                        const int iw = ow * g.stride[2] - g.pad[2] + kw;
                                        if (id < 0 || id >= g.in[0] || ih < 0 ||
                                            ih >= g.in[1] || iw < 0 || iw >= g.in[2])
                                            continue;
                                        acc += w[wi] *
                                               x[idx5(g, xbase, id, ih, iw, g.in[1],
                                                      g.in[2])];
                                    }
                        }
                        y[yi] = acc;
                    }
        }
}

void conv3d_backward_input(const Tensor& dy, const Tensor& w, Tensor& dx,
                           const Conv3dGeom& g) {
    dx = Tensor::zeros({g.n, g.cin, g.in[0], g.in[1], g.in[2]});
    const int64_t in_spatial = static_cast<int64_t>(g.in[0]) * g.in[1] * g.in[2];
    // gather per input element; loops over (co, od, oh, ow) ascending
    for (int n = 0; n < g.n; ++n)
        for (int ci = 0; ci < g.cin; ++ci) {
            const int64_t xbase = (static_cast<int64_t>(n) * g.cin + ci) * in_spatial;
            for (int id = 0; id < g.in[0]; ++id)
                for (int ih = 0; ih < g.in[1]; ++ih)
                    for (int iw = 0; iw < g.in[2]; ++iw) {
                        double acc = 0.0;
                        for (int co = 0; co < g.cout; ++co) {
                            const int64_t wbase =
                                ((static_cast<int64_t>(co) * g.cin + ci) * g.k[0]) *
                                g.k[1] * g.k[2];
                            const int64_t ybase =
                                (static_cast<int64_t>(n) * g.cout + co) *
                                g.out[0] * g.out[1] * g.out[2];
                            for (int od = 0; od < g.out[0]; ++od) {
                                const int kd = id + g.pad[0] - od * g.stride[0];
                                if (kd < 0 || kd >= g.k[0]) continue;
                                for (int oh = 0; oh < g.out[1]; ++oh) {
                                    const int kh = ih + g.pad[1] - oh * g.stride[1];
                                    if (kh < 0 || kh >= g.k[1]) continue;
                                    for (int ow = 0; ow < g.out[2]; ++ow) {
                                        const int kw = iw + g.pad[2] - ow * g.stride[2];
                                        if (kw < 0 || kw >= g.k[2]) continue;
                                        acc += w[(wbase + (static_cast<int64_t>(kd) *
                                                               g.k[1] +
                                                           kh) *
                                                              g.k[2] +
                                                  kw)] *
                                               dy[ybase + (static_cast<int64_t>(od) *
                                                               g.out[1] +
                                                           oh) *
                                                              g.out[2] +
                                                  ow];
                                    }
                                }
                            }
                        }
                        dx[idx5(g, xbase, id, ih, iw, g.in[1], g.in[2])] = acc;
                    }
        }
}

void conv3d_backward_params(const Tensor& x, const Tensor& dy, Tensor& dw, Tensor& db,
                            const Conv3dGeom& g) {
    dw = Tensor::zeros({g.cout, g.cin, g.k[0], g.k[1], g.k[2]});
    db = Tensor::zeros({g.cout});
    const int64_t in_spatial = static_cast<int64_t>(g.in[0]) * g.in[1] * g.in[2];
    const int64_t out_spatial = static_cast<int64_t>(g.out[0]) * g.out[1] * g.out[2];
    // gather per weight element; contributions ordered (n, od, oh, ow)
    for (int co = 0; co < g.cout; ++co)
        for (int ci = 0; ci < g.cin; ++ci)
            for (int kd = 0; kd < g.k[0]; ++kd)
                for (int kh = 0; kh < g.k[1]; ++kh)
                    for (int kw = 0; kw < g.k[2]; ++kw) {
                        double acc = 0.0;
                        for (int n = 0; n < g.n; ++n) {
                            const int64_t xbase =
                                (static_cast<int64_t>(n) * g.cin + ci) * in_spatial;
                            const int64_t ybase =
                                (static_cast<int64_t>(n) * g.cout + co) * out_spatial;
                            for (int od = 0; od < g.out[0]; ++od) {
                                const int id = od * g.stride[0] - g.pad[0] + kd;
                                if (id < 0 || id >= g.in[0]) continue;
                                for (int oh = 0; oh < g.out[1]; ++oh) {
                                    const int ih = oh * g.stride[1] - g.pad[1] + kh;
                                    if (ih < 0 || ih >= g.in[1]) continue;
                                    for (int ow = 0; ow < g.out[2]; ++ow) {
                                        const int iw = ow * g.stride[2] - g.pad[2] + kw;
                                        if (iw < 0 || iw >= g.in[2]) continue;
                                        acc += x[idx5(g, xbase, id, ih, iw, g.in[1],
                                                      g.in[2])] *
                                               dy[ybase + (static_cast<int64_t>(od) *
                                                               g.out[1] +
                                                           oh) *
                                                              g.out[2] +
                                                  ow];
                                    }
                                }
                            }
                        }
                        dw[(((static_cast<int64_t>(co) * g.cin + ci) * g.k[0] + kd) *
                                g.k[1] +
                            kh) *
                               g.k[2] +
                           kw] = acc;
                    }
    for (int co = 0; co < g.cout; ++co) {
        double acc = 0.0;
        for (int n = 0; n < g.n; ++n) {
            const int64_t ybase = (static_cast<int64_t>(n) * g.cout + co) * out_spatial;
            for (int64_t i = 0; i < out_spatial; ++i) acc += dy[ybase + i];
        }
        db[co] = acc;
    }
}

void maxpool3d_forward(const Tensor& x, Tensor& y, std::vector<int32_t>& argmax,
                       const Pool3dGeom& g) {
    y = Tensor::zeros({g.n, g.c, g.out[0], g.out[1], g.out[2]});
    argmax.assign(static_cast<size_t>(y.numel()), 0);
    const int64_t in_spatial = static_cast<int64_t>(g.in[0]) * g.in[1] * g.in[2];
    int64_t yi = 0;
    for (int n = 0; n < g.n; ++n)
        for (int c = 0; c < g.c; ++c) {
            const int64_t base = (static_cast<int64_t>(n) * g.c + c) * in_spatial;
            for (int od = 0; od < g.out[0]; ++od)
                for (int oh = 0; oh < g.out[1]; ++oh)
                    for (int ow = 0; ow < g.out[2]; ++ow, ++yi) {
                        double best = -1e308;
                        int32_t best_idx = -1;
                        for (int jd = 0; jd < g.factor[0]; ++jd)
                            for (int jh = 0; jh < g.factor[1]; ++jh)
                                for (int jw = 0; jw < g.factor[2]; ++jw) {
                                    // replication pad: clamp to the edge
                                    const int id =
                                        std::min(od * g.factor[0] + jd, g.in[0] - 1);
                                    const int ih =
                                        std::min(oh * g.factor[1] + jh, g.in[1] - 1);
                                    const int iw =
                                        std::min(ow * g.factor[2] + jw, g.in[2] - 1);
                                    const int64_t xi =
                                        base + (static_cast<int64_t>(id) * g.in[1] + ih) *
                                                   g.in[2] +
                                        iw;
                                    if (x[xi] > best) {
                                        best = x[xi];
                                        best_idx = static_cast<int32_t>(xi - base);
                                    }
                                }
                        y[yi] = best;
                        argmax[static_cast<size_t>(yi)] = best_idx;
                    }
        }
}

void maxpool3d_backward(const Tensor& dy, const std::vector<int32_t>& argmax, Tensor& dx,
                        const Pool3dGeom& g) {
    dx = Tensor::zeros({g.n, g.c, g.in[0], g.in[1], g.in[2]});
    const int64_t in_spatial = static_cast<int64_t>(g.in[0]) * g.in[1] * g.in[2];
    const int64_t out_spatial = static_cast<int64_t>(g.out[0]) * g.out[1] * g.out[2];
    // windows never overlap, so each input element receives at most one term
    for (int n = 0; n < g.n; ++n)
        for (int c = 0; c < g.c; ++c) {
            const int64_t xb = (static_cast<int64_t>(n) * g.c + c) * in_spatial;
            const int64_t yb = (static_cast<int64_t>(n) * g.c + c) * out_spatial;
            for (int64_t o = 0; o < out_spatial; ++o)
                dx[xb + argmax[static_cast<size_t>(yb + o)]] += dy[yb + o];
        }
}

void avgpool3d_forward(const Tensor& x, Tensor& y, const Pool3dGeom& g) {
    y = Tensor::zeros({g.n, g.c, g.out[0], g.out[1], g.out[2]});
    const int64_t in_spatial = static_cast<int64_t>(g.in[0]) * g.in[1] * g.in[2];
    const double inv = 1.0 / (static_cast<double>(g.factor[0]) * g.factor[1] * g.factor[2]);
    int64_t yi = 0;
    for (int n = 0; n < g.n; ++n)
        for (int c = 0; c < g.c; ++c) {
            const int64_t base = (static_cast<int64_t>(n) * g.c + c) * in_spatial;
            for (int od = 0; od < g.out[0]; ++od)
                for (int oh = 0; oh < g.out[1]; ++oh)
                    for (int ow = 0; ow < g.out[2]; ++ow, ++yi) {
                        double acc = 0.0;
                        for (int jd = 0; jd < g.factor[0]; ++jd)
                            for (int jh = 0; jh < g.factor[1]; ++jh)
                                for (int jw = 0; jw < g.factor[2]; ++jw) {
                                    const int id =
                                        std::min(od * g.factor[0] + jd, g.in[0] - 1);
                                    const int ih =
                                        std::min(oh * g.factor[1] + jh, g.in[1] - 1);
                                    const int iw =
                                        std::min(ow * g.factor[2] + jw, g.in[2] - 1);
                                    acc += x[base + (static_cast<int64_t>(id) * g.in[1] +
                                                     ih) *
                                                        g.in[2] +
                                             iw];
                                }
                        y[yi] = acc * inv;
                    }
        }
}

void avgpool3d_backward(const Tensor& dy, Tensor& dx, const Pool3dGeom& g) {
    dx = Tensor::zeros({g.n, g.c, g.in[0], g.in[1], g.in[2]});
    const int64_t in_spatial = static_cast<int64_t>(g.in[0]) * g.in[1] * g.in[2];
    const int64_t out_spatial = static_cast<int64_t>(g.out[0]) * g.out[1] * g.out[2];
    const double inv = 1.0 / (static_cast<double>(g.factor[0]) * g.factor[1] * g.factor[2]);
    // gather per input element; replication multiplicity enters as one product
    auto mult = [](int i, int in, int factor, int out) {
        // number of window slots that clamp onto index i along one axis
        const int o = std::min(i / factor, out - 1);
        const int lo = o * factor;
        if (i != in - 1) return (i >= lo && i < lo + factor) ? 1 : 0;
        const int covered = in - 1 - lo;
        return factor - covered;  // remaining slots clamp to the edge voxel
    };
    for (int n = 0; n < g.n; ++n)
        for (int c = 0; c < g.c; ++c) {
            const int64_t xb = (static_cast<int64_t>(n) * g.c + c) * in_spatial;
            const int64_t yb = (static_cast<int64_t>(n) * g.c + c) * out_spatial;
            for (int id = 0; id < g.in[0]; ++id)
                for (int ih = 0; ih < g.in[1]; ++ih)
                    for (int iw = 0; iw < g.in[2]; ++iw) {
                        const int od = std::min(id / g.factor[0], g.out[0] - 1);
                        const int oh = std::min(ih / g.factor[1], g.out[1] - 1);
                        const int ow = std::min(iw / g.factor[2], g.out[2] - 1);
                        const double m =
                            static_cast<double>(mult(id, g.in[0], g.factor[0], g.out[0])) *
                            mult(ih, g.in[1], g.factor[1], g.out[1]) *
                            mult(iw, g.in[2], g.factor[2], g.out[2]);
                        dx[xb + (static_cast<int64_t>(id) * g.in[1] + ih) * g.in[2] + iw] =
                            dy[yb + (static_cast<int64_t>(od) * g.out[1] + oh) * g.out[2] +
                               ow] *
                            inv * m;
                    }
        }
}

void dense_forward(const Tensor& x, const Tensor& w, const Tensor& b, Tensor& y) {
    const int n = x.dim(0), fin = x.dim(1), fout = w.dim(1);
    if (w.dim(0) != fin)
        throw common::shape_error("dense: weight rows != input features");
    y = Tensor::zeros({n, fout});
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < fout; ++j) {
            double acc = b.numel() ? b[j] : 0.0;
            for (int k = 0; k < fin; ++k)
                acc += x[static_cast<int64_t>(i) * fin + k] *
                       w[static_cast<int64_t>(k) * fout + j];
            y[static_cast<int64_t>(i) * fout + j] = acc;
        }
}

void dense_backward(const Tensor& x, const Tensor& w, const Tensor& dy, Tensor& dx,
                    Tensor& dw, Tensor& db) {
    const int n = x.dim(0), fin = x.dim(1), fout = w.dim(1);
    dx = Tensor::zeros({n, fin});
    dw = Tensor::zeros({fin, fout});
    db = Tensor::zeros({fout});
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < fin; ++k) {
            double acc = 0.0;
            for (int j = 0; j < fout; ++j)
                acc += dy[static_cast<int64_t>(i) * fout + j] *
                       w[static_cast<int64_t>(k) * fout + j];
            dx[static_cast<int64_t>(i) * fin + k] = acc;
        }
    for (int k = 0; k < fin; ++k)
        for (int j = 0; j < fout; ++j) {
            double acc = 0.0;
            for (int i = 0; i < n; ++i)
                acc += x[static_cast<int64_t>(i) * fin + k] *
                       dy[static_cast<int64_t>(i) * fout + j];
            dw[static_cast<int64_t>(k) * fout + j] = acc;
        }
    for (int j = 0; j < fout; ++j) {
        double acc = 0.0;
        for (int i = 0; i < n; ++i) acc += dy[static_cast<int64_t>(i) * fout + j];
        db[j] = acc;
    }
}

namespace {

int64_t bn_spatial(const Tensor& x) {
    int64_t s = 1;
    for (int i = 2; i < x.ndim(); ++i) s *= x.dim(i);
    return s;
}

}  // namespace

void batchnorm_forward_train(const Tensor& x, const Tensor& gamma, const Tensor& beta,
                             Tensor& y, Tensor& batch_mean, Tensor& batch_var,
                             double eps) {
    const int n = x.dim(0), c = x.dim(1);
    const int64_t sp = bn_spatial(x);
    const double count = static_cast<double>(n) * sp;
    y = Tensor::zeros(x.shape);
    batch_mean = Tensor::zeros({c});
    batch_var = Tensor::zeros({c});
    for (int ch = 0; ch < c; ++ch) {
        double sum = 0.0;
        for (int i = 0; i < n; ++i) {
            const int64_t base = (static_cast<int64_t>(i) * c + ch) * sp;
            for (int64_t s = 0; s < sp; ++s) sum += x[base + s];
        }
        const double mean = sum / count;
        double sq = 0.0;
        for (int i = 0; i < n; ++i) {
            const int64_t base = (static_cast<int64_t>(i) * c + ch) * sp;
            for (int64_t s = 0; s < sp; ++s) {
                const double d = x[base + s] - mean;
                sq += d * d;
            }
        }
        const double var = sq / count;
        batch_mean[ch] = mean;
        batch_var[ch] = var;
        const double inv_sd = 1.0 / std::sqrt(var + eps);
        for (int i = 0; i < n; ++i) {
            const int64_t base = (static_cast<int64_t>(i) * c + ch) * sp;
            for (int64_t s = 0; s < sp; ++s)
                y[base + s] = (x[base + s] - mean) * inv_sd * gamma[ch] + beta[ch];
        }
    }
}

void batchnorm_forward_infer(const Tensor& x, const Tensor& gamma, const Tensor& beta,
                             const Tensor& run_mean, const Tensor& run_var, Tensor& y,
                             double eps) {
    const int n = x.dim(0), c = x.dim(1);
    const int64_t sp = bn_spatial(x);
    y = Tensor::zeros(x.shape);
    for (int ch = 0; ch < c; ++ch) {
        const double inv_sd = 1.0 / std::sqrt(run_var[ch] + eps);
        for (int i = 0; i < n; ++i) {
            const int64_t base = (static_cast<int64_t>(i) * c + ch) * sp;
            for (int64_t s = 0; s < sp; ++s)
                y[base + s] = (x[base + s] - run_mean[ch]) * inv_sd * gamma[ch] + beta[ch];
        }
    }
}

void batchnorm_backward(const Tensor& x, const Tensor& gamma, const Tensor& batch_mean,
                        const Tensor& batch_var, const Tensor& dy, Tensor& dx,
                        Tensor& dgamma, Tensor& dbeta, double eps) {
    const int n = x.dim(0), c = x.dim(1);
    const int64_t sp = bn_spatial(x);
    const double count = static_cast<double>(n) * sp;
    dx = Tensor::zeros(x.shape);
    dgamma = Tensor::zeros({c});
    dbeta = Tensor::zeros({c});
    for (int ch = 0; ch < c; ++ch) {
        const double mean = batch_mean[ch];
        const double inv_sd = 1.0 / std::sqrt(batch_var[ch] + eps);
        double sum_dy = 0.0, sum_dy_xhat = 0.0;
        for (int i = 0; i < n; ++i) {
            const int64_t base = (static_cast<int64_t>(i) * c + ch) * sp;
            for (int64_t s = 0; s < sp; ++s) {
                const double xhat = (x[base + s] - mean) * inv_sd;
                sum_dy += dy[base + s];
                sum_dy_xhat += dy[base + s] * xhat;
            }
        }
        dgamma[ch] = sum_dy_xhat;
        dbeta[ch] = sum_dy;
        const double gscale = gamma[ch] * inv_sd;
        for (int i = 0; i < n; ++i) {
            const int64_t base = (static_cast<int64_t>(i) * c + ch) * sp;
            for (int64_t s = 0; s < sp; ++s) {
                const double xhat = (x[base + s] - mean) * inv_sd;
                dx[base + s] = gscale * (dy[base + s] - sum_dy / count -
                                         xhat * sum_dy_xhat / count);
            }
        }
    }
}

void relu_forward(const Tensor& x, Tensor& y) {
    y = Tensor::zeros(x.shape);
    for (int64_t i = 0; i < x.numel(); ++i) y[i] = x[i] > 0 ? x[i] : 0.0;
}

void relu_backward(const Tensor& x, const Tensor& dy, Tensor& dx) {
    dx = Tensor::zeros(x.shape);
    for (int64_t i = 0; i < x.numel(); ++i) dx[i] = x[i] > 0 ? dy[i] : 0.0;
}

void sigmoid_forward(const Tensor& x, Tensor& y) {
    y = Tensor::zeros(x.shape);
    for (int64_t i = 0; i < x.numel(); ++i) y[i] = sigmoid_scalar(x[i]);
}

void sigmoid_backward(const Tensor& y, const Tensor& dy, Tensor& dx) {
    dx = Tensor::zeros(y.shape);
    for (int64_t i = 0; i < y.numel(); ++i) dx[i] = dy[i] * y[i] * (1.0 - y[i]);
}

}  // namespace serial
}  // namespace tinynn::kernels
