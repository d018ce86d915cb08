#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "pcgdn/nn/tensor.hpp"

namespace pcgdn::nn {

// Nadam (Nesterov-accelerated Adam). Update rule, applied per parameter:
//
//   t     <- t + 1
//   m     <- b1 * m + (1 - b1) * g
//   v     <- b2 * v + (1 - b2) * g^2
//   m_hat <- m / (1 - b1^t)
//   v_hat <- v / (1 - b2^t)
//   m_bar <- b1 * m_hat + (1 - b1) * g / (1 - b1^t)
//   theta <- theta - lr * m_bar / (sqrt(v_hat) + eps)
//
// Moment arithmetic is carried out in double and stored back at parameter
// precision.
template <typename T>
struct NadamState {
    double lr = 5e-4;
    double beta1 = 0.9;
    double beta2 = 0.99;
    double eps = 1e-7;
    int64_t step = 0;
    std::vector<TensorT<T>> m, v;

    void init_like(const std::vector<TensorT<T>*>& params) {
        m.clear();
        v.clear();
        for (const auto* p : params) {
            m.emplace_back(p->shape);
            v.emplace_back(p->shape);
        }
        step = 0;
    }
};

template <typename T>
void nadam_step(const std::vector<TensorT<T>*>& params, const std::vector<const TensorT<T>*>& grads,
                NadamState<T>& st) {
    if (params.size() != grads.size()) throw DomainError("nadam_step: param/grad count mismatch");
    if (st.m.size() != params.size()) throw DomainError("nadam_step: state not initialized");

    ++st.step;
    const double b1 = st.beta1, b2 = st.beta2;
    const double bc1 = 1.0 - std::pow(b1, static_cast<double>(st.step));
    const double bc2 = 1.0 - std::pow(b2, static_cast<double>(st.step));

    for (size_t p = 0; p < params.size(); ++p) {
        TensorT<T>& theta = *params[p];
        const TensorT<T>& g = *grads[p];
        if (!theta.same_shape(g) || !theta.same_shape(st.m[p]))
            throw DomainError("nadam_step: shape mismatch at parameter " + std::to_string(p));
        for (int64_t i = 0; i < theta.size(); ++i) {
            const double gi = g.data[i];
            if (!std::isfinite(gi))
                throw TrainError("nadam_step: non-finite gradient at parameter " +
                                 std::to_string(p) + " element " + std::to_string(i));
            const double mi = b1 * st.m[p].data[i] + (1.0 - b1) * gi;
            const double vi = b2 * st.v[p].data[i] + (1.0 - b2) * gi * gi;
            st.m[p].data[i] = static_cast<T>(mi);
            st.v[p].data[i] = static_cast<T>(vi);
            const double m_hat = mi / bc1;
            const double v_hat = vi / bc2;
            const double m_bar = b1 * m_hat + (1.0 - b1) * gi / bc1;
            theta.data[i] = static_cast<T>(theta.data[i] - st.lr * m_bar / (std::sqrt(v_hat) + st.eps));
        }
    }
}

} // namespace pcgdn::nn
