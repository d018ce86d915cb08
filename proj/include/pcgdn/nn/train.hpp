#pragma once

#include <cmath>
#include <functional>
#include <numeric>
#include <vector>

#include "pcgdn/nn/graph.hpp"
#include "pcgdn/nn/nadam.hpp"
#include "pcgdn/rng.hpp"

namespace pcgdn::nn {

struct TrainConfig {
    int batch_size = 128;
    int max_epochs = 100;
    int patience = 10; // early stop after this many epochs without val improvement
    uint64_t seed = 0;
};

struct EpochStats {
    double train_mse = 0.0;
    double val_mse = 0.0;
};

struct TrainResult {
    std::vector<EpochStats> history;
    int best_epoch = -1; // 0-based index into history
    double best_val_mse = 0.0;
    bool early_stopped = false;
};

namespace detail {

template <typename T>
TensorT<T> stack_batch(const std::vector<TensorT<T>>& samples, const std::vector<size_t>& order,
                       size_t begin, size_t end) {
    const auto& s0 = samples[order[begin]];
    std::vector<int> shape;
    shape.push_back(static_cast<int>(end - begin));
    shape.insert(shape.end(), s0.shape.begin(), s0.shape.end());
    TensorT<T> batch(shape);
    const int64_t stride = s0.size();
    for (size_t i = begin; i < end; ++i) {
        const auto& s = samples[order[i]];
        if (s.size() != stride) throw DomainError("train: inconsistent sample shapes");
        std::copy(s.data.begin(), s.data.end(),
                  batch.data.begin() + static_cast<int64_t>(i - begin) * stride);
    }
    return batch;
}

template <typename T>
double eval_mse(ModelT<T>& model, const std::vector<TensorT<T>>& xs,
                const std::vector<TensorT<T>>& ys, int batch_size) {
    std::vector<size_t> order(xs.size());
    std::iota(order.begin(), order.end(), size_t{0});
    double acc = 0.0;
    int64_t count = 0;
    for (size_t b = 0; b < xs.size(); b += static_cast<size_t>(batch_size)) {
        const size_t e = std::min(xs.size(), b + static_cast<size_t>(batch_size));
        const auto bx = stack_batch(xs, order, b, e);
        const auto by = stack_batch(ys, order, b, e);
        const auto& pred = model.forward(bx, /*training=*/false);
        const auto [loss, grad] = mse_loss(pred, by);
        (void)grad;
        acc += loss * static_cast<double>(bx.size());
        count += bx.size();
    }
    return acc / static_cast<double>(count);
}

} // namespace detail

// Epoch loop: seeded shuffle, batches of <= batch_size (final partial batch
// included), forward/backward/nadam per batch, validation MSE per epoch,
// early stopping on the validation metric with best-weights restoration.
// Throws TrainError naming the epoch/batch if the loss goes non-finite.
template <typename T>
TrainResult train(ModelT<T>& model, const std::vector<TensorT<T>>& train_x,
                  const std::vector<TensorT<T>>& train_y, const std::vector<TensorT<T>>& val_x,
                  const std::vector<TensorT<T>>& val_y, const TrainConfig& cfg, NadamState<T>& opt,
                  const std::function<void(int, const EpochStats&)>& on_epoch = {}) {
    if (train_x.empty() || train_x.size() != train_y.size())
        throw DomainError("train: empty or mismatched training set");
    if (val_x.empty() || val_x.size() != val_y.size())
        throw DomainError("train: empty or mismatched validation set");
    if (cfg.batch_size < 1 || cfg.max_epochs < 1 || cfg.patience < 1)
        throw DomainError("train: batch_size, max_epochs and patience must be >= 1");

    auto params = model.trainable_params();
    std::vector<TensorT<T>*> values;
    std::vector<const TensorT<T>*> grads;
    for (auto& p : params) {
        values.push_back(p.value);
        grads.push_back(p.grad);
    }
    if (opt.m.size() != values.size()) opt.init_like(values);

    TrainResult result;
    std::vector<TensorT<T>> best_state; // parameters + running stats at the best epoch
    int stale_epochs = 0;

    std::vector<size_t> order(train_x.size());
    std::iota(order.begin(), order.end(), size_t{0});

    for (int epoch = 0; epoch < cfg.max_epochs; ++epoch) {
        Rng rng(derive_seed(cfg.seed, "epoch", static_cast<uint64_t>(epoch)));
        rng.shuffle(order);

        double train_acc = 0.0;
        int64_t train_count = 0;
        int batch_index = 0;
        for (size_t b = 0; b < order.size(); b += static_cast<size_t>(cfg.batch_size)) {
            const size_t e = std::min(order.size(), b + static_cast<size_t>(cfg.batch_size));
            const auto bx = detail::stack_batch(train_x, order, b, e);
            const auto by = detail::stack_batch(train_y, order, b, e);
            const auto& pred = model.forward(bx, /*training=*/true);
            auto [loss, grad] = mse_loss(pred, by);
            if (!std::isfinite(loss))
                throw TrainError("train: non-finite loss at epoch " + std::to_string(epoch + 1) +
                                 " batch " + std::to_string(batch_index + 1));
            model.backward(grad);
            nadam_step(values, grads, opt);
            train_acc += loss * static_cast<double>(bx.size());
            train_count += bx.size();
            ++batch_index;
        }

        EpochStats stats;
        stats.train_mse = train_acc / static_cast<double>(train_count);
        stats.val_mse = detail::eval_mse(model, val_x, val_y, cfg.batch_size);
        result.history.push_back(stats);
        if (on_epoch) on_epoch(epoch, stats);

        if (result.best_epoch < 0 || stats.val_mse < result.best_val_mse) {
            result.best_epoch = epoch;
            result.best_val_mse = stats.val_mse;
            best_state.clear();
            for (const auto& [name, t] : model.state_tensors()) {
                (void)name;
                best_state.push_back(*t);
            }
            stale_epochs = 0;
        } else {
            ++stale_epochs;
            if (stale_epochs >= cfg.patience) {
                result.early_stopped = true;
                break;
            }
        }
    }

    // Restore the best-validation weights (and matching running stats).
    if (!best_state.empty()) {
        auto state = model.state_tensors();
        for (size_t i = 0; i < state.size(); ++i) *state[i].second = best_state[i];
    }
    model.clear_caches();
    return result;
}

} // namespace pcgdn::nn
