#pragma once

#include <string>

#include "pcgdn/nn/graph.hpp"

namespace pcgdn::nn {

struct GradCheckReport {
    double max_rel_error = 0.0;
    std::string worst_param;
    int64_t worst_index = -1;
    int64_t params_checked = 0;
};

// Central finite differences against the analytic backward pass for every
// trainable parameter, on the double-precision instantiation of the stack.
// Uses the training-mode forward (the path backward differentiates).
inline GradCheckReport gradient_check(ModelT<double>& model, const TensorT<double>& input,
                                      const TensorT<double>& target, double h = 1e-3) {
    if (model.param_count() > 20000)
        throw DomainError("gradient_check: model too large for finite differences");

    // Analytic gradients.
    const auto& pred = model.forward(input, /*training=*/true);
    auto [loss0, grad] = mse_loss(pred, target);
    (void)loss0;
    model.backward(grad);

    auto params = model.trainable_params();
    std::vector<TensorT<double>> analytic;
    for (auto& p : params) analytic.push_back(*p.grad);

    auto loss_at = [&]() {
        const auto& out = model.forward(input, /*training=*/true);
        return mse_loss(out, target).first;
    };

    GradCheckReport report;
    for (size_t p = 0; p < params.size(); ++p) {
        TensorT<double>& theta = *params[p].value;
        for (int64_t i = 0; i < theta.size(); ++i) {
            const double orig = theta.data[i];
            theta.data[i] = orig + h;
            const double lp = loss_at();
            theta.data[i] = orig - h;
            const double lm = loss_at();
            theta.data[i] = orig;
            const double fd = (lp - lm) / (2.0 * h);
            const double an = analytic[p].data[i];
            const double rel =
                std::abs(an - fd) / std::max({1e-8, std::abs(an), std::abs(fd)});
            if (rel > report.max_rel_error) {
                report.max_rel_error = rel;
                report.worst_param = params[p].name;
                report.worst_index = i;
            }
            ++report.params_checked;
        }
    }
    return report;
}

} // namespace pcgdn::nn
