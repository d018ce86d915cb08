#pragma once

#include <cmath>
#include <cstring>
#include <memory>
#include <utility>

#include "pcgdn/nn/tensor.hpp"
#include "pcgdn/threading.hpp"

namespace pcgdn::nn {

// Layer kernels on (N, H, W, C) tensors. Convolutions are stride-1
// cross-correlations with "same" zero padding, weights laid out
// (kh, kw, cin, cout). Work is split over batch samples; parameter-gradient
// reductions combine per-chunk partials in chunk order, so results are
// reproducible for a fixed thread count (bit-exact when single threaded).

namespace detail {

// C[m,:] += sum_p A[m,p] * B[p,:]; K is the patch size. The p loop is
// unrolled so the short row-accumulate (N = filter count, often just 8)
// amortizes its overhead.
template <typename T>
void gemm_acc(const T* __restrict A, const T* __restrict B, T* __restrict C, int64_t M, int64_t K,
              int64_t N) {
    for (int64_t i = 0; i < M; ++i) {
        const T* a = A + i * K;
        T* c = C + i * N;
        int64_t p = 0;
        for (; p + 4 <= K; p += 4) {
            const T a0 = a[p], a1 = a[p + 1], a2 = a[p + 2], a3 = a[p + 3];
            const T* b0 = B + p * N;
            const T* b1 = b0 + N;
            const T* b2 = b1 + N;
            const T* b3 = b2 + N;
            for (int64_t j = 0; j < N; ++j)
                c[j] += a0 * b0[j] + a1 * b1[j] + a2 * b2[j] + a3 * b3[j];
        }
        for (; p < K; ++p) {
            const T av = a[p];
            const T* b = B + p * N;
            for (int64_t j = 0; j < N; ++j) c[j] += av * b[j];
        }
    }
}

template <typename T>
void im2col(const T* x, int H, int W, int C, int k, T* col) {
    const int pad = k / 2;
    int64_t idx = 0;
    for (int h = 0; h < H; ++h) {
        for (int w = 0; w < W; ++w) {
            for (int ky = 0; ky < k; ++ky) {
                const int sy = h + ky - pad;
                if (sy < 0 || sy >= H) {
                    std::memset(col + idx, 0, sizeof(T) * static_cast<size_t>(k) * C);
                    idx += static_cast<int64_t>(k) * C;
                    continue;
                }
                for (int kx = 0; kx < k; ++kx) {
                    const int sx = w + kx - pad;
                    if (sx < 0 || sx >= W) {
                        std::memset(col + idx, 0, sizeof(T) * C);
                    } else {
                        std::memcpy(col + idx, x + (static_cast<int64_t>(sy) * W + sx) * C,
                                    sizeof(T) * C);
                    }
                    idx += C;
                }
            }
        }
    }
}

template <typename T>
void col2im_acc(const T* col, int H, int W, int C, int k, T* x) {
    const int pad = k / 2;
    int64_t idx = 0;
    for (int h = 0; h < H; ++h) {
        for (int w = 0; w < W; ++w) {
            for (int ky = 0; ky < k; ++ky) {
                const int sy = h + ky - pad;
                if (sy < 0 || sy >= H) {
                    idx += static_cast<int64_t>(k) * C;
                    continue;
                }
                for (int kx = 0; kx < k; ++kx) {
                    const int sx = w + kx - pad;
                    if (sx >= 0 && sx < W) {
                        T* dst = x + (static_cast<int64_t>(sy) * W + sx) * C;
                        for (int c = 0; c < C; ++c) dst[c] += col[idx + c];
                    }
                    idx += C;
                }
            }
        }
    }
}

inline void check_conv_shapes(const std::vector<int>& x, const std::vector<int>& w,
                              const std::vector<int>& b) {
    if (x.size() != 4) throw DomainError("conv2d: input must be (N,H,W,C), got " + shape_str(x));
    if (w.size() != 4 || w[0] != w[1] || (w[0] != 1 && w[0] != 3))
        throw DomainError("conv2d: weights must be (k,k,cin,cout) with k in {1,3}, got " +
                          shape_str(w));
    if (w[2] != x[3]) throw DomainError("conv2d: channel mismatch between input and weights");
    if (b.size() != 1 || b[0] != w[3]) throw DomainError("conv2d: bias must be (cout)");
}

} // namespace detail

template <typename T>
TensorT<T> conv2d_forward(const TensorT<T>& x, const TensorT<T>& w, const TensorT<T>& b) {
    detail::check_conv_shapes(x.shape, w.shape, b.shape);
    const int N = x.shape[0], H = x.shape[1], W = x.shape[2], C = x.shape[3];
    const int k = w.shape[0], Cout = w.shape[3];
    const int64_t M = static_cast<int64_t>(H) * W;
    const int64_t K = static_cast<int64_t>(k) * k * C;

    TensorT<T> out({N, H, W, Cout});
    parallel_for(N, [&](int, int64_t nb, int64_t ne) {
        std::unique_ptr<T[]> col(k == 1 ? nullptr : new T[static_cast<size_t>(M) * K]);
        for (int64_t n = nb; n < ne; ++n) {
            const T* xs = x.ptr() + n * M * C;
            const T* a = xs;
            if (k != 1) {
                detail::im2col(xs, H, W, C, k, col.get());
                a = col.get();
            }
            T* o = out.ptr() + n * M * Cout;
            for (int64_t m = 0; m < M; ++m)
                for (int j = 0; j < Cout; ++j) o[m * Cout + j] = b.data[static_cast<size_t>(j)];
            detail::gemm_acc(a, w.ptr(), o, M, K, Cout);
        }
    });
    return out;
}

template <typename T>
struct ConvGrads {
    TensorT<T> gx, gw, gb;
};

template <typename T>
ConvGrads<T> conv2d_backward(const TensorT<T>& x, const TensorT<T>& w, const TensorT<T>& grad_out) {
    detail::check_conv_shapes(x.shape, w.shape, std::vector<int>{w.shape[3]});
    const int N = x.shape[0], H = x.shape[1], W = x.shape[2], C = x.shape[3];
    const int k = w.shape[0], Cout = w.shape[3];
    if (grad_out.shape != std::vector<int>{N, H, W, Cout})
        throw DomainError("conv2d_backward: grad_out shape mismatch");
    const int64_t M = static_cast<int64_t>(H) * W;
    const int64_t K = static_cast<int64_t>(k) * k * C;

    const std::vector<int> bias_shape{Cout};
    ConvGrads<T> g{TensorT<T>({N, H, W, C}), TensorT<T>(w.shape), TensorT<T>(bias_shape)};

    // Transposed weights (Cout x K) give dcol long contiguous accumulate
    // rows instead of length-Cout dots.
    TensorT<T> w_t({Cout, static_cast<int>(K)});
    for (int64_t p = 0; p < K; ++p)
        for (int j = 0; j < Cout; ++j)
            w_t.data[static_cast<size_t>(j * K + p)] = w.data[static_cast<size_t>(p * Cout + j)];

    const int chunks = std::max(1, std::min<int>(num_threads(), N));
    std::vector<TensorT<T>> gw_part(static_cast<size_t>(chunks), TensorT<T>(w.shape));
    std::vector<TensorT<T>> gb_part(static_cast<size_t>(chunks), TensorT<T>(bias_shape));

    parallel_for(N, [&](int chunk, int64_t nb, int64_t ne) {
        TensorT<T>& gw = gw_part[static_cast<size_t>(chunk)];
        TensorT<T>& gb = gb_part[static_cast<size_t>(chunk)];
        std::unique_ptr<T[]> col(k == 1 ? nullptr : new T[static_cast<size_t>(M) * K]);
        std::unique_ptr<T[]> dcol(new T[static_cast<size_t>(M) * K]);
        for (int64_t n = nb; n < ne; ++n) {
            const T* xs = x.ptr() + n * M * C;
            const T* gout = grad_out.ptr() + n * M * Cout;
            const T* a = xs;
            if (k != 1) {
                detail::im2col(xs, H, W, C, k, col.get());
                a = col.get();
            }
            // gw[p, j] += sum_m col[m, p] * gout[m, j]
            for (int64_t m = 0; m < M; ++m) {
                const T* __restrict arow = a + m * K;
                const T* __restrict grow = gout + m * Cout;
                int64_t p = 0;
                for (; p + 4 <= K; p += 4) {
                    const T a0 = arow[p], a1 = arow[p + 1], a2 = arow[p + 2], a3 = arow[p + 3];
                    T* d0 = gw.ptr() + p * Cout;
                    T* d1 = d0 + Cout;
                    T* d2 = d1 + Cout;
                    T* d3 = d2 + Cout;
                    for (int j = 0; j < Cout; ++j) {
                        const T gj = grow[j];
                        d0[j] += a0 * gj;
                        d1[j] += a1 * gj;
                        d2[j] += a2 * gj;
                        d3[j] += a3 * gj;
                    }
                }
                for (; p < K; ++p) {
                    const T av = arow[p];
                    T* dst = gw.ptr() + p * Cout;
                    for (int j = 0; j < Cout; ++j) dst[j] += av * grow[j];
                }
                for (int j = 0; j < Cout; ++j) gb.data[static_cast<size_t>(j)] += grow[j];
            }
            // dcol[m, :] = sum_j gout[m, j] * w_t[j, :] then scatter back
            for (int64_t m = 0; m < M; ++m) {
                const T* __restrict grow = gout + m * Cout;
                T* __restrict drow = dcol.get() + m * K;
                {
                    const T g0 = grow[0];
                    const T* __restrict w0 = w_t.ptr();
                    for (int64_t p = 0; p < K; ++p) drow[p] = g0 * w0[p];
                }
                for (int j = 1; j < Cout; ++j) {
                    const T gj = grow[j];
                    const T* __restrict wrow = w_t.ptr() + static_cast<int64_t>(j) * K;
                    for (int64_t p = 0; p < K; ++p) drow[p] += gj * wrow[p];
                }
            }
            T* gxs = g.gx.ptr() + n * M * C;
            if (k == 1) {
                std::memcpy(gxs, dcol.get(), sizeof(T) * static_cast<size_t>(M) * C);
            } else {
                detail::col2im_acc(dcol.get(), H, W, C, k, gxs);
            }
        }
    });

    for (int c = 0; c < chunks; ++c) {
        for (int64_t i = 0; i < g.gw.size(); ++i) g.gw.data[i] += gw_part[c].data[i];
        for (int64_t i = 0; i < g.gb.size(); ++i) g.gb.data[i] += gb_part[c].data[i];
    }
    return g;
}

// Max pooling over 2x2 blocks. The mask records which of the four inputs won
// (row-major scan, strict > so ties go to the first).
template <typename T>
std::pair<TensorT<T>, TensorT<int>> maxpool2x2_forward(const TensorT<T>& x) {
    if (x.ndim() != 4) throw DomainError("maxpool2x2: input must be (N,H,W,C)");
    const int N = x.shape[0], H = x.shape[1], W = x.shape[2], C = x.shape[3];
    if (H % 2 != 0 || W % 2 != 0) throw DomainError("maxpool2x2: H and W must be even");
    TensorT<T> out({N, H / 2, W / 2, C});
    TensorT<int> mask({N, H / 2, W / 2, C});
    parallel_for(N, [&](int, int64_t nb, int64_t ne) {
        for (int64_t n = nb; n < ne; ++n)
            for (int h = 0; h < H / 2; ++h)
                for (int w = 0; w < W / 2; ++w)
                    for (int c = 0; c < C; ++c) {
                        T best{};
                        int arg = -1;
                        for (int dy = 0; dy < 2; ++dy)
                            for (int dx = 0; dx < 2; ++dx) {
                                const T v = x.at4(static_cast<int>(n), 2 * h + dy, 2 * w + dx, c);
                                if (arg < 0 || v > best) {
                                    best = v;
                                    arg = dy * 2 + dx;
                                }
                            }
                        out.at4(static_cast<int>(n), h, w, c) = best;
                        mask.at4(static_cast<int>(n), h, w, c) = arg;
                    }
    });
    return {std::move(out), std::move(mask)};
}

template <typename T>
TensorT<T> maxpool2x2_backward(const TensorT<int>& mask, const TensorT<T>& grad_out) {
    if (mask.shape != grad_out.shape) throw DomainError("maxpool2x2_backward: shape mismatch");
    const int N = mask.shape[0], Hp = mask.shape[1], Wp = mask.shape[2], C = mask.shape[3];
    TensorT<T> gx({N, Hp * 2, Wp * 2, C});
    parallel_for(N, [&](int, int64_t nb, int64_t ne) {
        for (int64_t n = nb; n < ne; ++n)
            for (int h = 0; h < Hp; ++h)
                for (int w = 0; w < Wp; ++w)
                    for (int c = 0; c < C; ++c) {
                        const int arg = mask.at4(static_cast<int>(n), h, w, c);
                        gx.at4(static_cast<int>(n), 2 * h + arg / 2, 2 * w + arg % 2, c) =
                            grad_out.at4(static_cast<int>(n), h, w, c);
                    }
    });
    return gx;
}

// Nearest-neighbour 2x upsampling; backward sums each 2x2 block.
template <typename T>
TensorT<T> upsample2x2_forward(const TensorT<T>& x) {
    if (x.ndim() != 4) throw DomainError("upsample2x2: input must be (N,H,W,C)");
    const int N = x.shape[0], H = x.shape[1], W = x.shape[2], C = x.shape[3];
    TensorT<T> out({N, H * 2, W * 2, C});
    parallel_for(N, [&](int, int64_t nb, int64_t ne) {
        for (int64_t n = nb; n < ne; ++n)
            for (int h = 0; h < 2 * H; ++h)
                for (int w = 0; w < 2 * W; ++w) {
                    const T* src = &x.at4(static_cast<int>(n), h / 2, w / 2, 0);
                    T* dst = &out.at4(static_cast<int>(n), h, w, 0);
                    for (int c = 0; c < C; ++c) dst[c] = src[c];
                }
    });
    return out;
}

template <typename T>
TensorT<T> upsample2x2_backward(const TensorT<T>& grad_out) {
    if (grad_out.ndim() != 4) throw DomainError("upsample2x2_backward: grad must be (N,H,W,C)");
    const int N = grad_out.shape[0], H2 = grad_out.shape[1], W2 = grad_out.shape[2],
              C = grad_out.shape[3];
    if (H2 % 2 != 0 || W2 % 2 != 0) throw DomainError("upsample2x2_backward: odd spatial dims");
    TensorT<T> gx({N, H2 / 2, W2 / 2, C});
    parallel_for(N, [&](int, int64_t nb, int64_t ne) {
        for (int64_t n = nb; n < ne; ++n)
            for (int h = 0; h < H2; ++h)
                for (int w = 0; w < W2; ++w) {
                    const T* src = &grad_out.at4(static_cast<int>(n), h, w, 0);
                    T* dst = &gx.at4(static_cast<int>(n), h / 2, w / 2, 0);
                    for (int c = 0; c < C; ++c) dst[c] += src[c];
                }
    });
    return gx;
}

// Per-channel statistics saved by the training-mode forward pass.
struct BnCache {
    std::vector<double> mean, inv_std;
};

// Batch normalization over (N, H, W) per channel. Training mode uses batch
// statistics (biased variance) and updates the running stats; inference mode
// uses the running stats. Accumulation is in double.
template <typename T>
TensorT<T> batchnorm_forward(const TensorT<T>& x, const TensorT<T>& gamma, const TensorT<T>& beta,
                             TensorT<T>& running_mean, TensorT<T>& running_var, bool training,
                             BnCache* cache, double momentum = 0.99, double eps = 1e-5) {
    if (x.ndim() != 4) throw DomainError("batchnorm: input must be (N,H,W,C)");
    const int N = x.shape[0], H = x.shape[1], W = x.shape[2], C = x.shape[3];
    if (N == 0) throw DomainError("batchnorm: empty batch");
    if (gamma.size() != C || beta.size() != C || running_mean.size() != C ||
        running_var.size() != C)
        throw DomainError("batchnorm: parameter size must match channel count");

    const int64_t S = static_cast<int64_t>(N) * H * W;
    std::vector<double> mean(static_cast<size_t>(C), 0.0), var(static_cast<size_t>(C), 0.0);
    if (training) {
        const T* p = x.ptr();
        for (int64_t i = 0; i < S; ++i, p += C)
            for (int c = 0; c < C; ++c) mean[static_cast<size_t>(c)] += p[c];
        for (int c = 0; c < C; ++c) mean[static_cast<size_t>(c)] /= static_cast<double>(S);
        p = x.ptr();
        for (int64_t i = 0; i < S; ++i, p += C)
            for (int c = 0; c < C; ++c) {
                const double d = p[c] - mean[static_cast<size_t>(c)];
                var[static_cast<size_t>(c)] += d * d;
            }
        for (int c = 0; c < C; ++c) var[static_cast<size_t>(c)] /= static_cast<double>(S);
        for (int c = 0; c < C; ++c) {
            running_mean.data[static_cast<size_t>(c)] = static_cast<T>(
                momentum * running_mean.data[static_cast<size_t>(c)] + (1.0 - momentum) * mean[static_cast<size_t>(c)]);
            running_var.data[static_cast<size_t>(c)] = static_cast<T>(
                momentum * running_var.data[static_cast<size_t>(c)] + (1.0 - momentum) * var[static_cast<size_t>(c)]);
        }
    } else {
        for (int c = 0; c < C; ++c) {
            mean[static_cast<size_t>(c)] = running_mean.data[static_cast<size_t>(c)];
            var[static_cast<size_t>(c)] = running_var.data[static_cast<size_t>(c)];
        }
    }

    std::vector<double> inv_std(static_cast<size_t>(C));
    for (int c = 0; c < C; ++c)
        inv_std[static_cast<size_t>(c)] = 1.0 / std::sqrt(var[static_cast<size_t>(c)] + eps);
    if (cache) {
        cache->mean = mean;
        cache->inv_std = inv_std;
    }

    TensorT<T> out(x.shape);
    parallel_for(S, [&](int, int64_t b, int64_t e) {
        const T* p = x.ptr() + b * C;
        T* o = out.ptr() + b * C;
        for (int64_t i = b; i < e; ++i) {
            for (int c = 0; c < C; ++c)
                o[c] = static_cast<T>((p[c] - mean[static_cast<size_t>(c)]) *
                                          inv_std[static_cast<size_t>(c)] *
                                          static_cast<double>(gamma.data[static_cast<size_t>(c)]) +
                                      static_cast<double>(beta.data[static_cast<size_t>(c)]));
            p += C;
            o += C;
        }
    });
    return out;
}

template <typename T>
struct BnGrads {
    TensorT<T> gx, ggamma, gbeta;
};

template <typename T>
BnGrads<T> batchnorm_backward(const TensorT<T>& x, const TensorT<T>& gamma, const BnCache& cache,
                              const TensorT<T>& grad_out) {
    if (!x.same_shape(grad_out)) throw DomainError("batchnorm_backward: shape mismatch");
    const int C = x.shape[3];
    const int64_t S = x.size() / C;

    std::vector<double> sum_g(static_cast<size_t>(C), 0.0), sum_gx(static_cast<size_t>(C), 0.0);
    {
        const T* px = x.ptr();
        const T* pg = grad_out.ptr();
        for (int64_t i = 0; i < S; ++i, px += C, pg += C)
            for (int c = 0; c < C; ++c) {
                const double xhat =
                    (px[c] - cache.mean[static_cast<size_t>(c)]) * cache.inv_std[static_cast<size_t>(c)];
                sum_g[static_cast<size_t>(c)] += pg[c];
                sum_gx[static_cast<size_t>(c)] += pg[c] * xhat;
            }
    }

    BnGrads<T> g{TensorT<T>(x.shape), TensorT<T>({C}), TensorT<T>({C})};
    for (int c = 0; c < C; ++c) {
        g.ggamma.data[static_cast<size_t>(c)] = static_cast<T>(sum_gx[static_cast<size_t>(c)]);
        g.gbeta.data[static_cast<size_t>(c)] = static_cast<T>(sum_g[static_cast<size_t>(c)]);
    }
    parallel_for(S, [&](int, int64_t b, int64_t e) {
        const T* px = x.ptr() + b * C;
        const T* pg = grad_out.ptr() + b * C;
        T* po = g.gx.ptr() + b * C;
        const double inv_s = 1.0 / static_cast<double>(S);
        for (int64_t i = b; i < e; ++i) {
            for (int c = 0; c < C; ++c) {
                const size_t cc = static_cast<size_t>(c);
                const double xhat = (px[c] - cache.mean[cc]) * cache.inv_std[cc];
                const double t = static_cast<double>(S) * pg[c] - sum_g[cc] - xhat * sum_gx[cc];
                po[c] = static_cast<T>(static_cast<double>(gamma.data[cc]) * cache.inv_std[cc] *
                                       inv_s * t);
            }
            px += C;
            pg += C;
            po += C;
        }
    });
    return g;
}

template <typename T>
TensorT<T> relu(const TensorT<T>& x) {
    TensorT<T> out(x.shape);
    parallel_for(x.size(), [&](int, int64_t b, int64_t e) {
        for (int64_t i = b; i < e; ++i) out.data[i] = x.data[i] > T(0) ? x.data[i] : T(0);
    });
    return out;
}

// Subgradient at 0 is 0: gradient passes only where the input was > 0.
template <typename T>
TensorT<T> relu_backward(const TensorT<T>& x, const TensorT<T>& grad_out) {
    if (!x.same_shape(grad_out)) throw DomainError("relu_backward: shape mismatch");
    TensorT<T> gx(x.shape);
    parallel_for(x.size(), [&](int, int64_t b, int64_t e) {
        for (int64_t i = b; i < e; ++i) gx.data[i] = x.data[i] > T(0) ? grad_out.data[i] : T(0);
    });
    return gx;
}

template <typename T>
TensorT<T> concat_channels(const TensorT<T>& a, const TensorT<T>& b) {
    if (a.ndim() != 4 || b.ndim() != 4 || a.shape[0] != b.shape[0] || a.shape[1] != b.shape[1] ||
        a.shape[2] != b.shape[2])
        throw DomainError("concat_channels: spatial shape mismatch " + shape_str(a.shape) + " vs " +
                          shape_str(b.shape));
    const int Ca = a.shape[3], Cb = b.shape[3];
    const int64_t S = a.size() / Ca;
    TensorT<T> out({a.shape[0], a.shape[1], a.shape[2], Ca + Cb});
    parallel_for(S, [&](int, int64_t s, int64_t e) {
        for (int64_t i = s; i < e; ++i) {
            std::memcpy(out.ptr() + i * (Ca + Cb), a.ptr() + i * Ca, sizeof(T) * static_cast<size_t>(Ca));
            std::memcpy(out.ptr() + i * (Ca + Cb) + Ca, b.ptr() + i * Cb,
                        sizeof(T) * static_cast<size_t>(Cb));
        }
    });
    return out;
}

template <typename T>
std::pair<TensorT<T>, TensorT<T>> split_channels(const TensorT<T>& g, int ca, int cb) {
    if (g.ndim() != 4 || g.shape[3] != ca + cb) throw DomainError("split_channels: bad shapes");
    TensorT<T> ga({g.shape[0], g.shape[1], g.shape[2], ca});
    TensorT<T> gb({g.shape[0], g.shape[1], g.shape[2], cb});
    const int64_t S = g.size() / (ca + cb);
    parallel_for(S, [&](int, int64_t s, int64_t e) {
        for (int64_t i = s; i < e; ++i) {
            std::memcpy(ga.ptr() + i * ca, g.ptr() + i * (ca + cb), sizeof(T) * static_cast<size_t>(ca));
            std::memcpy(gb.ptr() + i * cb, g.ptr() + i * (ca + cb) + ca,
                        sizeof(T) * static_cast<size_t>(cb));
        }
    });
    return {std::move(ga), std::move(gb)};
}

// Mean squared error over all elements; also returns d loss / d pred.
template <typename T>
std::pair<double, TensorT<T>> mse_loss(const TensorT<T>& pred, const TensorT<T>& target) {
    if (!pred.same_shape(target)) throw DomainError("mse_loss: shape mismatch");
    const int64_t n = pred.size();
    if (n == 0) throw DomainError("mse_loss: empty tensors");
    double acc = 0.0;
    for (int64_t i = 0; i < n; ++i) {
        const double d = static_cast<double>(pred.data[i]) - static_cast<double>(target.data[i]);
        acc += d * d;
    }
    TensorT<T> grad(pred.shape);
    const double scale = 2.0 / static_cast<double>(n);
    for (int64_t i = 0; i < n; ++i)
        grad.data[i] = static_cast<T>(scale * (static_cast<double>(pred.data[i]) -
                                               static_cast<double>(target.data[i])));
    return {acc / static_cast<double>(n), std::move(grad)};
}

} // namespace pcgdn::nn
