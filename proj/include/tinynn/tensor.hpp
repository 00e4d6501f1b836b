#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace tinynn {

// Dense n-dimensional array of 64-bit floats, row-major.
struct Tensor {
    std::vector<int> shape;
    std::vector<double> data;

    Tensor() = default;
    explicit Tensor(std::vector<int> s);

    static Tensor zeros(std::vector<int> s) { return Tensor(std::move(s)); }
    static Tensor full(std::vector<int> s, double v);

    int64_t numel() const { return static_cast<int64_t>(data.size()); }
    int dim(int i) const { return shape[static_cast<size_t>(i)]; }
    int ndim() const { return static_cast<int>(shape.size()); }

    double& operator[](int64_t i) { return data[static_cast<size_t>(i)]; }
    double operator[](int64_t i) const { return data[static_cast<size_t>(i)]; }

    // view-style reshape; element count must match
    Tensor reshaped(std::vector<int> s) const;
};

int64_t shape_numel(const std::vector<int>& shape);
std::string shape_str(const std::vector<int>& shape);
bool same_shape(const Tensor& a, const Tensor& b);
void require_shape(const Tensor& t, const std::vector<int>& shape, const char* what);

// true when any element is NaN or infinite
bool has_nonfinite(const Tensor& t);

}  // namespace tinynn
