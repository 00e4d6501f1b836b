#include "tinynn/tensor.hpp"

#include <cmath>

#include "common/error.hpp"

namespace tinynn {

Tensor::Tensor(std::vector<int> s) : shape(std::move(s)) {
    data.assign(static_cast<size_t>(shape_numel(shape)), 0.0);
}

Tensor Tensor::full(std::vector<int> s, double v) {
    Tensor t(std::move(s));
    for (auto& d : t.data) d = v;
    return t;
}

Tensor Tensor::reshaped(std::vector<int> s) const {
    if (shape_numel(s) != numel())
        throw common::shape_error("reshape " + shape_str(shape) + " -> " + shape_str(s));
    Tensor t;
    t.shape = std::move(s);
    t.data = data;
    return t;
}

int64_t shape_numel(const std::vector<int>& shape) {
    int64_t n = 1;
    for (int d : shape) {
        if (d < 1) throw common::shape_error("nonpositive dimension in " + shape_str(shape));
        n *= d;
    }
    return n;
}

std::string shape_str(const std::vector<int>& shape) {
    std::string s = "(";
    for (size_t i = 0; i < shape.size(); ++i) {
        if (i) s += ",";
        s += std::to_string(shape[i]);
    }
    return s + ")";
}

bool same_shape(const Tensor& a, const Tensor& b) { return a.shape == b.shape; }

void require_shape(const Tensor& t, const std::vector<int>& shape, const char* what) {
    if (t.shape != shape)
        throw common::shape_error(std::string(what) + ": expected " + shape_str(shape) +
                                  ", got " + shape_str(t.shape));
}

bool has_nonfinite(const Tensor& t) {
    for (double v : t.data)
        if (!std::isfinite(v)) return true;
    return false;
}

}  // namespace tinynn
