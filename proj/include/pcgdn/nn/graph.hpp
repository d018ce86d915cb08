#pragma once

#include <string>
#include <vector>

#include "pcgdn/nn/ops.hpp"
#include "pcgdn/rng.hpp"

namespace pcgdn::nn {

enum class LayerKind {
    Input,
    Conv2D,   // 3x3, stride 1, same padding
    Conv1x1,  // pointwise, linear head
    MaxPool2x2,
    Upsample2x2,
    BatchNorm,
    ReLU,
    ConcatSkip,
};

inline const char* layer_kind_name(LayerKind k) {
    switch (k) {
        case LayerKind::Input: return "input";
        case LayerKind::Conv2D: return "conv2d";
        case LayerKind::Conv1x1: return "conv1x1";
        case LayerKind::MaxPool2x2: return "maxpool2x2";
        case LayerKind::Upsample2x2: return "upsample2x2";
        case LayerKind::BatchNorm: return "batchnorm";
        case LayerKind::ReLU: return "relu";
        case LayerKind::ConcatSkip: return "concat";
    }
    return "?";
}

// Static feed-forward DAG in topological order. Node 0 is the input;
// ConcatSkip nodes take two predecessors, everything else one.
template <typename T>
struct ModelT {
    struct Node {
        LayerKind kind = LayerKind::Input;
        std::string name;
        int in0 = -1;
        int in1 = -1;

        // Conv parameters
        TensorT<T> w, b;
        // BatchNorm parameters and state
        TensorT<T> gamma, beta, run_mean, run_var;

        // Parameter gradients (filled by backward)
        TensorT<T> gw, gb, ggamma, gbeta;

        // Forward caches for the current batch
        TensorT<T> out;
        TensorT<int> pool_mask;
        BnCache bn_cache;
    };

    std::vector<Node> nodes;
    // Node whose activation is zeroed in forward when >= 0 (ablation hook
    // used by the skip-connection structural tests).
    int ablate_node = -1;

    int add_input(const std::string& name) {
        Node n;
        n.kind = LayerKind::Input;
        n.name = name;
        nodes.push_back(std::move(n));
        return static_cast<int>(nodes.size()) - 1;
    }

    int add_conv(const std::string& name, int input, int k, int cin, int cout, Rng& rng) {
        Node n;
        n.kind = k == 1 ? LayerKind::Conv1x1 : LayerKind::Conv2D;
        n.name = name;
        n.in0 = input;
        n.w = TensorT<T>({k, k, cin, cout});
        n.b = TensorT<T>({cout});
        // He-uniform on fan-in
        const double limit = std::sqrt(6.0 / (static_cast<double>(k) * k * cin));
        for (auto& v : n.w.data) v = static_cast<T>(rng.uniform(-limit, limit));
        nodes.push_back(std::move(n));
        return static_cast<int>(nodes.size()) - 1;
    }

    int add_batchnorm(const std::string& name, int input, int channels) {
        Node n;
        n.kind = LayerKind::BatchNorm;
        n.name = name;
        n.in0 = input;
        n.gamma = TensorT<T>({channels});
        n.gamma.fill(T(1));
        n.beta = TensorT<T>({channels});
        n.run_mean = TensorT<T>({channels});
        n.run_var = TensorT<T>({channels});
        n.run_var.fill(T(1));
        nodes.push_back(std::move(n));
        return static_cast<int>(nodes.size()) - 1;
    }

    int add_simple(LayerKind kind, const std::string& name, int input, int skip_input = -1) {
        Node n;
        n.kind = kind;
        n.name = name;
        n.in0 = input;
        n.in1 = skip_input;
        nodes.push_back(std::move(n));
        return static_cast<int>(nodes.size()) - 1;
    }

    int find_node(const std::string& name) const {
        for (size_t i = 0; i < nodes.size(); ++i)
            if (nodes[i].name == name) return static_cast<int>(i);
        return -1;
    }

    int count_kind(LayerKind k) const {
        int c = 0;
        for (const auto& n : nodes) c += n.kind == k ? 1 : 0;
        return c;
    }

    // Runs the graph on a batch; training mode uses batch statistics in the
    // BatchNorm nodes and fills the caches needed by backward.
    const TensorT<T>& forward(const TensorT<T>& input, bool training) {
        if (nodes.empty() || nodes[0].kind != LayerKind::Input)
            throw DomainError("model: node 0 must be the input");
        nodes[0].out = input;
        for (size_t i = 1; i < nodes.size(); ++i) {
            Node& n = nodes[i];
            const TensorT<T>& a = nodes[static_cast<size_t>(n.in0)].out;
            switch (n.kind) {
                case LayerKind::Conv2D:
                case LayerKind::Conv1x1:
                    n.out = conv2d_forward(a, n.w, n.b);
                    break;
                case LayerKind::MaxPool2x2: {
                    auto [out, mask] = maxpool2x2_forward(a);
                    n.out = std::move(out);
                    n.pool_mask = std::move(mask);
                    break;
                }
                case LayerKind::Upsample2x2:
                    n.out = upsample2x2_forward(a);
                    break;
                case LayerKind::BatchNorm:
                    n.out = batchnorm_forward(a, n.gamma, n.beta, n.run_mean, n.run_var, training,
                                              &n.bn_cache);
                    break;
                case LayerKind::ReLU:
                    n.out = relu(a);
                    break;
                case LayerKind::ConcatSkip:
                    n.out = concat_channels(a, nodes[static_cast<size_t>(n.in1)].out);
                    break;
                case LayerKind::Input:
                    throw DomainError("model: unexpected extra input node");
            }
            if (static_cast<int>(i) == ablate_node) n.out.fill(T(0));
        }
        return nodes.back().out;
    }

    // Backpropagates grad wrt the final node's output; parameter gradients
    // land in gw/gb/ggamma/gbeta (overwritten each call).
    void backward(const TensorT<T>& grad_out) {
        std::vector<TensorT<T>> grads(nodes.size());
        grads.back() = grad_out;
        for (size_t ri = nodes.size(); ri-- > 1;) {
            Node& n = nodes[ri];
            TensorT<T>& g = grads[ri];
            if (g.size() == 0) { // dead branch (possible only under ablation)
                g = TensorT<T>(n.out.shape);
            }
            const TensorT<T>& a = nodes[static_cast<size_t>(n.in0)].out;
            auto& ga = grads[static_cast<size_t>(n.in0)];
            auto accumulate = [](TensorT<T>& dst, TensorT<T>&& src) {
                if (dst.size() == 0) {
                    dst = std::move(src);
                } else {
                    for (int64_t i = 0; i < dst.size(); ++i) dst.data[i] += src.data[i];
                }
            };
            switch (n.kind) {
                case LayerKind::Conv2D:
                case LayerKind::Conv1x1: {
                    auto cg = conv2d_backward(a, n.w, g);
                    n.gw = std::move(cg.gw);
                    n.gb = std::move(cg.gb);
                    accumulate(ga, std::move(cg.gx));
                    break;
                }
                case LayerKind::MaxPool2x2:
                    accumulate(ga, maxpool2x2_backward(n.pool_mask, g));
                    break;
                case LayerKind::Upsample2x2:
                    accumulate(ga, upsample2x2_backward(g));
                    break;
                case LayerKind::BatchNorm: {
                    auto bg = batchnorm_backward(a, n.gamma, n.bn_cache, g);
                    n.ggamma = std::move(bg.ggamma);
                    n.gbeta = std::move(bg.gbeta);
                    accumulate(ga, std::move(bg.gx));
                    break;
                }
                case LayerKind::ReLU:
                    accumulate(ga, relu_backward(a, g));
                    break;
                case LayerKind::ConcatSkip: {
                    const int ca = a.shape[3];
                    const int cb = nodes[static_cast<size_t>(n.in1)].out.shape[3];
                    auto [gx_a, gx_b] = split_channels(g, ca, cb);
                    accumulate(ga, std::move(gx_a));
                    accumulate(grads[static_cast<size_t>(n.in1)], std::move(gx_b));
                    break;
                }
                case LayerKind::Input:
                    break;
            }
            g = TensorT<T>(); // free as we go
        }
    }

    struct ParamRef {
        std::string name;
        TensorT<T>* value;
        TensorT<T>* grad;
    };

    std::vector<ParamRef> trainable_params() {
        std::vector<ParamRef> out;
        for (auto& n : nodes) {
            if (n.kind == LayerKind::Conv2D || n.kind == LayerKind::Conv1x1) {
                out.push_back({n.name + "/w", &n.w, &n.gw});
                out.push_back({n.name + "/b", &n.b, &n.gb});
            } else if (n.kind == LayerKind::BatchNorm) {
                out.push_back({n.name + "/gamma", &n.gamma, &n.ggamma});
                out.push_back({n.name + "/beta", &n.beta, &n.gbeta});
            }
        }
        return out;
    }

    // Trainable parameters plus batch-norm running statistics, i.e. the
    // model state a checkpoint must capture.
    std::vector<std::pair<std::string, TensorT<T>*>> state_tensors() {
        std::vector<std::pair<std::string, TensorT<T>*>> out;
        for (auto& n : nodes) {
            if (n.kind == LayerKind::Conv2D || n.kind == LayerKind::Conv1x1) {
                out.push_back({n.name + "/w", &n.w});
                out.push_back({n.name + "/b", &n.b});
            } else if (n.kind == LayerKind::BatchNorm) {
                out.push_back({n.name + "/gamma", &n.gamma});
                out.push_back({n.name + "/beta", &n.beta});
                out.push_back({n.name + "/run_mean", &n.run_mean});
                out.push_back({n.name + "/run_var", &n.run_var});
            }
        }
        return out;
    }

    int64_t param_count() {
        int64_t c = 0;
        for (const auto& p : trainable_params()) c += p.value->size();
        return c;
    }

    // Drops forward caches (activation storage) without touching parameters.
    void clear_caches() {
        for (auto& n : nodes) {
            n.out = TensorT<T>();
            n.pool_mask = TensorT<int>();
        }
    }
};

using Model = ModelT<float>;

} // namespace pcgdn::nn
