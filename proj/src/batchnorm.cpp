#include "usleep/batchnorm.hpp"

#include <cmath>

namespace usleep {

namespace {

void require_group_count(std::int64_t groups) {
    require(groups >= 1, "batch_norm: group count must be >= 1, got " + std::to_string(groups));
}

void check_groups_arg(const BatchNormState& state, const Tensor& input,
                      const std::vector<int>& groups) {
    if (state.variant == BnVariant::vanilla) return;
    require(static_cast<std::int64_t>(groups.size()) == input.shape[0],
            "batch_norm: need one group index per batch element");
    for (int g : groups) {
        if (g < 0 || g >= state.groups) {
            throw ContractViolation("batch_norm: group index " + std::to_string(g) +
                                    " out of range [0," + std::to_string(state.groups) + ")");
        }
    }
}

}  // namespace

BatchNormState BatchNormState::vanilla_init(std::int64_t channels) {
    BatchNormState s;
    s.variant = BnVariant::vanilla;
    s.channels = channels;
    s.gamma = Tensor::full({channels}, 1.0);
    s.beta = Tensor::zeros({channels});
    s.running_mean = Tensor::zeros({channels});
    s.running_var = Tensor::full({channels}, 1.0);
    return s;
}

BatchNormState BatchNormState::ccbn_init(std::int64_t channels, std::int64_t groups) {
    require_group_count(groups);
    BatchNormState s = vanilla_init(channels);
    s.variant = BnVariant::ccbn;
    s.groups = groups;
    for (std::int64_t g = 0; g < groups; ++g) {
        s.gamma_g.push_back(Tensor::full({channels}, 1.0));
        s.beta_g.push_back(Tensor::zeros({channels}));
    }
    return s;
}

BatchNormState BatchNormState::sabn_init(std::int64_t channels, std::int64_t groups) {
    BatchNormState s = ccbn_init(channels, groups);
    s.variant = BnVariant::sabn;
    return s;
}

Tensor batch_norm(const Tensor& input, BatchNormState& state, BnMode mode, BnCache* cache) {
    return batch_norm(input, state, mode, {}, cache);
}

Tensor batch_norm(const Tensor& input, BatchNormState& state, BnMode mode,
                  const std::vector<int>& groups, BnCache* cache) {
    require_rank(input, 3, "batch_norm input");
    require_extent(input, 1, state.channels, "batch_norm input");
    require(input.shape[0] > 0, "batch_norm: zero batch");
    check_groups_arg(state, input, groups);

    const std::int64_t batch = input.shape[0], c = input.shape[1], t_len = input.shape[2];
    const double n = static_cast<double>(batch * t_len);

    std::vector<double> mean(static_cast<std::size_t>(c)), var(static_cast<std::size_t>(c));
    if (mode == BnMode::train) {
        for (std::int64_t ch = 0; ch < c; ++ch) {
            double s = 0.0;
            for (std::int64_t b = 0; b < batch; ++b) {
                const double* row = input.ptr3(b, ch, 0);
                for (std::int64_t t = 0; t < t_len; ++t) s += row[t];
            }
            const double m = s / n;
            double sq = 0.0;
            for (std::int64_t b = 0; b < batch; ++b) {
                const double* row = input.ptr3(b, ch, 0);
                for (std::int64_t t = 0; t < t_len; ++t) {
                    const double d = row[t] - m;
                    sq += d * d;
                }
            }
            mean[static_cast<std::size_t>(ch)] = m;
            var[static_cast<std::size_t>(ch)] = sq / n;
        }
        for (std::int64_t ch = 0; ch < c; ++ch) {
            auto i = static_cast<std::size_t>(ch);
            state.running_mean.data[i] = state.momentum * state.running_mean.data[i] +
                                         (1.0 - state.momentum) * mean[i];
            state.running_var.data[i] = state.momentum * state.running_var.data[i] +
                                        (1.0 - state.momentum) * var[i];
        }
    } else {
        for (std::int64_t ch = 0; ch < c; ++ch) {
            auto i = static_cast<std::size_t>(ch);
            mean[i] = state.running_mean.data[i];
            var[i] = state.running_var.data[i];
        }
    }

    std::vector<double> inv_std(static_cast<std::size_t>(c));
    for (std::int64_t ch = 0; ch < c; ++ch) {
        auto i = static_cast<std::size_t>(ch);
        inv_std[i] = 1.0 / std::sqrt(var[i] + state.epsilon);
    }

    Tensor xhat = Tensor::zeros(input.shape);
    for (std::int64_t b = 0; b < batch; ++b) {
        for (std::int64_t ch = 0; ch < c; ++ch) {
            auto i = static_cast<std::size_t>(ch);
            const double* row = input.ptr3(b, ch, 0);
            double* xrow = xhat.ptr3(b, ch, 0);
            for (std::int64_t t = 0; t < t_len; ++t) xrow[t] = (row[t] - mean[i]) * inv_std[i];
        }
    }

    Tensor out = Tensor::zeros(input.shape);
    for (std::int64_t b = 0; b < batch; ++b) {
        for (std::int64_t ch = 0; ch < c; ++ch) {
            auto i = static_cast<std::size_t>(ch);
            const double* xrow = xhat.ptr3(b, ch, 0);
            double* orow = out.ptr3(b, ch, 0);
            switch (state.variant) {
                case BnVariant::vanilla: {
                    const double ga = state.gamma.data[i], be = state.beta.data[i];
                    for (std::int64_t t = 0; t < t_len; ++t) orow[t] = ga * xrow[t] + be;
                    break;
                }
                case BnVariant::ccbn: {
                    const auto g = static_cast<std::size_t>(groups[static_cast<std::size_t>(b)]);
                    const double ga = state.gamma_g[g].data[i], be = state.beta_g[g].data[i];
                    for (std::int64_t t = 0; t < t_len; ++t) orow[t] = ga * xrow[t] + be;
                    break;
                }
                case BnVariant::sabn: {
                    const auto g = static_cast<std::size_t>(groups[static_cast<std::size_t>(b)]);
                    const double gsa = state.gamma.data[i], bsa = state.beta.data[i];
                    const double gg = state.gamma_g[g].data[i], bg = state.beta_g[g].data[i];
                    for (std::int64_t t = 0; t < t_len; ++t) {
                        orow[t] = gg * (gsa * xrow[t] + bsa) + bg;
                    }
                    break;
                }
            }
        }
    }

    if (cache) {
        cache->xhat = std::move(xhat);
        cache->inv_std = std::move(inv_std);
        cache->groups = groups;
        cache->mode = mode;
    }
    return out;
}

BnGrads batch_norm_backward(const BatchNormState& state, const BnCache& cache,
                            const Tensor& grad_out) {
    const Tensor& xhat = cache.xhat;
    require(grad_out.shape == xhat.shape, "batch_norm_backward: grad shape mismatch");
    const std::int64_t batch = xhat.shape[0], c = xhat.shape[1], t_len = xhat.shape[2];
    const double n = static_cast<double>(batch * t_len);

    BnGrads grads;
    grads.gamma = Tensor::zeros({c});
    grads.beta = Tensor::zeros({c});
    if (state.variant != BnVariant::vanilla) {
        for (std::int64_t g = 0; g < state.groups; ++g) {
            grads.gamma_g.push_back(Tensor::zeros({c}));
            grads.beta_g.push_back(Tensor::zeros({c}));
        }
    }

    // dxhat carries the per-sample affine scale; the remaining path through
    // the shared statistics is identical for all variants.
    Tensor dxhat = Tensor::zeros(xhat.shape);
    for (std::int64_t b = 0; b < batch; ++b) {
        const std::size_t g = state.variant == BnVariant::vanilla
                                  ? 0
                                  : static_cast<std::size_t>(cache.groups[static_cast<std::size_t>(b)]);
        for (std::int64_t ch = 0; ch < c; ++ch) {
            auto i = static_cast<std::size_t>(ch);
            const double* grow = grad_out.ptr3(b, ch, 0);
            const double* xrow = xhat.ptr3(b, ch, 0);
            double* drow = dxhat.ptr3(b, ch, 0);
            switch (state.variant) {
                case BnVariant::vanilla: {
                    double dg = 0.0, db = 0.0;
                    const double ga = state.gamma.data[i];
                    for (std::int64_t t = 0; t < t_len; ++t) {
                        dg += grow[t] * xrow[t];
                        db += grow[t];
                        drow[t] = grow[t] * ga;
                    }
                    grads.gamma.data[i] += dg;
                    grads.beta.data[i] += db;
                    break;
                }
                case BnVariant::ccbn: {
                    double dg = 0.0, db = 0.0;
                    const double ga = state.gamma_g[g].data[i];
                    for (std::int64_t t = 0; t < t_len; ++t) {
                        dg += grow[t] * xrow[t];
                        db += grow[t];
                        drow[t] = grow[t] * ga;
                    }
                    grads.gamma_g[g].data[i] += dg;
                    grads.beta_g[g].data[i] += db;
                    break;
                }
                case BnVariant::sabn: {
                    const double gsa = state.gamma.data[i], bsa = state.beta.data[i];
                    const double gg = state.gamma_g[g].data[i];
                    double dgg = 0.0, dbg = 0.0, dgsa = 0.0, dbsa = 0.0;
                    for (std::int64_t t = 0; t < t_len; ++t) {
                        const double sandwich = gsa * xrow[t] + bsa;
                        dgg += grow[t] * sandwich;
                        dbg += grow[t];
                        dgsa += grow[t] * gg * xrow[t];
                        dbsa += grow[t] * gg;
                        drow[t] = grow[t] * gg * gsa;
                    }
                    grads.gamma_g[g].data[i] += dgg;
                    grads.beta_g[g].data[i] += dbg;
                    grads.gamma.data[i] += dgsa;
                    grads.beta.data[i] += dbsa;
                    break;
                }
            }
        }
    }

    grads.input = Tensor::zeros(xhat.shape);
    if (cache.mode == BnMode::eval) {
        // Running statistics are constants.
        for (std::int64_t b = 0; b < batch; ++b) {
            for (std::int64_t ch = 0; ch < c; ++ch) {
                const double is = cache.inv_std[static_cast<std::size_t>(ch)];
                const double* drow = dxhat.ptr3(b, ch, 0);
                double* orow = grads.input.ptr3(b, ch, 0);
                for (std::int64_t t = 0; t < t_len; ++t) orow[t] = drow[t] * is;
            }
        }
        return grads;
    }

    for (std::int64_t ch = 0; ch < c; ++ch) {
        double sum_d = 0.0, sum_dx = 0.0;
        for (std::int64_t b = 0; b < batch; ++b) {
            const double* drow = dxhat.ptr3(b, ch, 0);
            const double* xrow = xhat.ptr3(b, ch, 0);
            for (std::int64_t t = 0; t < t_len; ++t) {
                sum_d += drow[t];
                sum_dx += drow[t] * xrow[t];
            }
        }
        const double mean_d = sum_d / n;
        const double mean_dx = sum_dx / n;
        const double is = cache.inv_std[static_cast<std::size_t>(ch)];
        for (std::int64_t b = 0; b < batch; ++b) {
            const double* drow = dxhat.ptr3(b, ch, 0);
            const double* xrow = xhat.ptr3(b, ch, 0);
            double* orow = grads.input.ptr3(b, ch, 0);
            for (std::int64_t t = 0; t < t_len; ++t) {
                orow[t] = is * (drow[t] - mean_d - xrow[t] * mean_dx);
            }
        }
    }
    return grads;
}

}  // namespace usleep
