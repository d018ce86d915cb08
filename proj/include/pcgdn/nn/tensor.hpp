#pragma once

#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "pcgdn/errors.hpp"

namespace pcgdn::nn {

// Dense row-major n-dimensional array. Training runs on float; the
// finite-difference gradient checks instantiate the same code with double.
template <typename T>
struct TensorT {
    std::vector<int> shape;
    std::vector<T> data;

    TensorT() = default;
    explicit TensorT(std::vector<int> s) : shape(std::move(s)), data(numel(shape)) {}
    TensorT(std::vector<int> s, std::vector<T> d) : shape(std::move(s)), data(std::move(d)) {
        if (static_cast<size_t>(numel(shape)) != data.size())
            throw DomainError("tensor: shape/data size mismatch");
    }

    static size_t numel(const std::vector<int>& s) {
        size_t n = 1;
        for (const int d : s) {
            if (d <= 0) throw DomainError("tensor: non-positive dimension");
            n *= static_cast<size_t>(d);
        }
        return s.empty() ? 0 : n;
    }

    static TensorT zeros(std::vector<int> s) { return TensorT(std::move(s)); }

    int64_t size() const { return static_cast<int64_t>(data.size()); }
    int ndim() const { return static_cast<int>(shape.size()); }
    int dim(int i) const { return shape[static_cast<size_t>(i)]; }

    T* ptr() { return data.data(); }
    const T* ptr() const { return data.data(); }

    void fill(T v) { std::fill(data.begin(), data.end(), v); }

    bool same_shape(const TensorT& o) const { return shape == o.shape; }

    // (N, H, W, C) accessor for the 4-d layer tensors.
    T& at4(int n, int h, int w, int c) {
        return data[((static_cast<size_t>(n) * shape[1] + h) * shape[2] + w) * shape[3] + c];
    }
    const T& at4(int n, int h, int w, int c) const {
        return data[((static_cast<size_t>(n) * shape[1] + h) * shape[2] + w) * shape[3] + c];
    }

    template <typename U>
    TensorT<U> cast() const {
        TensorT<U> out;
        out.shape = shape;
        out.data.assign(data.begin(), data.end());
        return out;
    }
};

using Tensor = TensorT<float>;

inline std::string shape_str(const std::vector<int>& s) {
    std::string r = "(";
    for (size_t i = 0; i < s.size(); ++i) {
        if (i) r += ",";
        r += std::to_string(s[i]);
    }
    return r + ")";
}

} // namespace pcgdn::nn
