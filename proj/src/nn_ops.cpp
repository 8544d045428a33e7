#include "usleep/nn_ops.hpp"

#include <algorithm>
#include <cmath>

namespace usleep {

namespace {

void require_pool_divisible(std::int64_t t, std::int64_t k, const char* op) {
    if (k < 1) throw ContractViolation(std::string(op) + ": kernel must be >= 1");
    if (t % k != 0) {
        throw ContractViolation(std::string(op) + ": time extent " + std::to_string(t) +
                                " not divisible by kernel " + std::to_string(k));
    }
}

}  // namespace

Tensor conv1d(const Tensor& input, const Tensor& kernel, const Tensor& bias) {
    require_rank(input, 3, "conv1d input");
    require_rank(kernel, 3, "conv1d kernel");
    require_rank(bias, 1, "conv1d bias");
    const std::int64_t batch = input.shape[0], c_in = input.shape[1], t_len = input.shape[2];
    const std::int64_t c_out = kernel.shape[0], k = kernel.shape[2];
    require_extent(kernel, 1, c_in, "conv1d kernel");
    require_extent(bias, 0, c_out, "conv1d bias");
    require(k % 2 == 1, "conv1d: kernel width must be odd, got " + std::to_string(k));
    const std::int64_t pad = (k - 1) / 2;

    Tensor out = Tensor::zeros({batch, c_out, t_len});
    for (std::int64_t b = 0; b < batch; ++b) {
        for (std::int64_t co = 0; co < c_out; ++co) {
            double* orow = out.ptr3(b, co, 0);
            const double bv = bias.data[static_cast<std::size_t>(co)];
            for (std::int64_t t = 0; t < t_len; ++t) orow[t] = bv;
            for (std::int64_t ci = 0; ci < c_in; ++ci) {
                const double* irow = input.ptr3(b, ci, 0);
                const double* wrow = &kernel.data[static_cast<std::size_t>((co * c_in + ci) * k)];
                for (std::int64_t dk = 0; dk < k; ++dk) {
                    const double w = wrow[dk];
                    if (w == 0.0) continue;
                    const std::int64_t shift = dk - pad;  // input index = t + shift
                    const std::int64_t t0 = std::max<std::int64_t>(0, -shift);
                    const std::int64_t t1 = std::min<std::int64_t>(t_len, t_len - shift);
                    const double* in_shift = irow + shift;
                    for (std::int64_t t = t0; t < t1; ++t) orow[t] += w * in_shift[t];
                }
            }
        }
    }
    return out;
}

ConvGrads conv1d_backward(const Tensor& input, const Tensor& kernel, const Tensor& grad_out) {
    const std::int64_t batch = input.shape[0], c_in = input.shape[1], t_len = input.shape[2];
    const std::int64_t c_out = kernel.shape[0], k = kernel.shape[2];
    require_rank(grad_out, 3, "conv1d grad_out");
    require_extent(grad_out, 1, c_out, "conv1d grad_out");
    require_extent(grad_out, 2, t_len, "conv1d grad_out");
    const std::int64_t pad = (k - 1) / 2;

    ConvGrads g{Tensor::zeros(input.shape), Tensor::zeros(kernel.shape), Tensor::zeros({c_out})};
    for (std::int64_t b = 0; b < batch; ++b) {
        for (std::int64_t co = 0; co < c_out; ++co) {
            const double* grow = grad_out.ptr3(b, co, 0);
            double gb = 0.0;
            for (std::int64_t t = 0; t < t_len; ++t) gb += grow[t];
            g.bias.data[static_cast<std::size_t>(co)] += gb;
            for (std::int64_t ci = 0; ci < c_in; ++ci) {
                const double* irow = input.ptr3(b, ci, 0);
                double* girow = g.input.ptr3(b, ci, 0);
                const std::size_t wbase = static_cast<std::size_t>((co * c_in + ci) * k);
                for (std::int64_t dk = 0; dk < k; ++dk) {
                    const std::int64_t shift = dk - pad;
                    const std::int64_t t0 = std::max<std::int64_t>(0, -shift);
                    const std::int64_t t1 = std::min<std::int64_t>(t_len, t_len - shift);
                    const double w = kernel.data[wbase + static_cast<std::size_t>(dk)];
                    double gw = 0.0;
                    const double* in_shift = irow + shift;
                    double* gi_shift = girow + shift;
                    for (std::int64_t t = t0; t < t1; ++t) {
                        gw += grow[t] * in_shift[t];
                        gi_shift[t] += grow[t] * w;
                    }
                    g.kernel.data[wbase + static_cast<std::size_t>(dk)] += gw;
                }
            }
        }
    }
    return g;
}

MaxPoolResult maxpool1d(const Tensor& input, std::int64_t k) {
    require_rank(input, 3, "maxpool1d input");
    const std::int64_t batch = input.shape[0], c = input.shape[1], t_len = input.shape[2];
    require_pool_divisible(t_len, k, "maxpool1d");
    const std::int64_t t_out = t_len / k;

    MaxPoolResult r{Tensor::zeros({batch, c, t_out}), {}};
    r.argmax.resize(static_cast<std::size_t>(batch * c * t_out));
    std::int64_t pos = 0;
    for (std::int64_t b = 0; b < batch; ++b) {
        for (std::int64_t ch = 0; ch < c; ++ch) {
            const double* irow = input.ptr3(b, ch, 0);
            double* orow = r.output.ptr3(b, ch, 0);
            for (std::int64_t t = 0; t < t_out; ++t, ++pos) {
                std::int64_t best = t * k;
                double bv = irow[best];
                for (std::int64_t j = 1; j < k; ++j) {
                    const double v = irow[t * k + j];
                    if (v > bv) {  // strict: first occurrence wins ties
                        bv = v;
                        best = t * k + j;
                    }
                }
                orow[t] = bv;
                r.argmax[static_cast<std::size_t>(pos)] = best;
            }
        }
    }
    return r;
}

Tensor maxpool1d_backward(const MaxPoolResult& pooled, const Tensor& grad_out,
                          std::int64_t input_t, std::int64_t k) {
    const std::int64_t batch = pooled.output.shape[0], c = pooled.output.shape[1];
    const std::int64_t t_out = pooled.output.shape[2];
    require(grad_out.shape == pooled.output.shape, "maxpool1d_backward: grad shape mismatch");
    require(input_t == t_out * k, "maxpool1d_backward: input length mismatch");

    Tensor gi = Tensor::zeros({batch, c, input_t});
    std::int64_t pos = 0;
    for (std::int64_t b = 0; b < batch; ++b) {
        for (std::int64_t ch = 0; ch < c; ++ch) {
            double* girow = gi.ptr3(b, ch, 0);
            const double* grow = grad_out.ptr3(b, ch, 0);
            for (std::int64_t t = 0; t < t_out; ++t, ++pos) {
                girow[pooled.argmax[static_cast<std::size_t>(pos)]] += grow[t];
            }
        }
    }
    return gi;
}

Tensor upsample_nearest(const Tensor& input, std::int64_t factor) {
    require_rank(input, 3, "upsample_nearest input");
    require(factor >= 1, "upsample_nearest: factor must be >= 1");
    const std::int64_t batch = input.shape[0], c = input.shape[1], t_len = input.shape[2];
    Tensor out = Tensor::zeros({batch, c, t_len * factor});
    for (std::int64_t b = 0; b < batch; ++b) {
        for (std::int64_t ch = 0; ch < c; ++ch) {
            const double* irow = input.ptr3(b, ch, 0);
            double* orow = out.ptr3(b, ch, 0);
            for (std::int64_t t = 0; t < t_len; ++t) {
                for (std::int64_t j = 0; j < factor; ++j) orow[t * factor + j] = irow[t];
            }
        }
    }
    return out;
}

Tensor upsample_nearest_backward(const Tensor& grad_out, std::int64_t factor) {
    require_rank(grad_out, 3, "upsample_nearest grad_out");
    const std::int64_t batch = grad_out.shape[0], c = grad_out.shape[1], t_len = grad_out.shape[2];
    require(t_len % factor == 0, "upsample_nearest_backward: length not divisible by factor");
    Tensor gi = Tensor::zeros({batch, c, t_len / factor});
    for (std::int64_t b = 0; b < batch; ++b) {
        for (std::int64_t ch = 0; ch < c; ++ch) {
            const double* grow = grad_out.ptr3(b, ch, 0);
            double* girow = gi.ptr3(b, ch, 0);
            for (std::int64_t t = 0; t < t_len / factor; ++t) {
                double s = 0.0;
                for (std::int64_t j = 0; j < factor; ++j) s += grow[t * factor + j];
                girow[t] = s;
            }
        }
    }
    return gi;
}

Tensor avgpool1d(const Tensor& input, std::int64_t k) {
    require_rank(input, 3, "avgpool1d input");
    const std::int64_t batch = input.shape[0], c = input.shape[1], t_len = input.shape[2];
    require_pool_divisible(t_len, k, "avgpool1d");
    const std::int64_t t_out = t_len / k;
    const double inv = 1.0 / static_cast<double>(k);

    Tensor out = Tensor::zeros({batch, c, t_out});
    for (std::int64_t b = 0; b < batch; ++b) {
        for (std::int64_t ch = 0; ch < c; ++ch) {
            const double* irow = input.ptr3(b, ch, 0);
            double* orow = out.ptr3(b, ch, 0);
            for (std::int64_t t = 0; t < t_out; ++t) {
                double s = 0.0;
                for (std::int64_t j = 0; j < k; ++j) s += irow[t * k + j];
                orow[t] = s * inv;
            }
        }
    }
    return out;
}

Tensor avgpool1d_backward(const Tensor& grad_out, std::int64_t input_t, std::int64_t k) {
    require_rank(grad_out, 3, "avgpool1d grad_out");
    const std::int64_t batch = grad_out.shape[0], c = grad_out.shape[1], t_out = grad_out.shape[2];
    require(input_t == t_out * k, "avgpool1d_backward: input length mismatch");
    const double inv = 1.0 / static_cast<double>(k);

    Tensor gi = Tensor::zeros({batch, c, input_t});
    for (std::int64_t b = 0; b < batch; ++b) {
        for (std::int64_t ch = 0; ch < c; ++ch) {
            const double* grow = grad_out.ptr3(b, ch, 0);
            double* girow = gi.ptr3(b, ch, 0);
            for (std::int64_t t = 0; t < t_out; ++t) {
                const double g = grow[t] * inv;
                for (std::int64_t j = 0; j < k; ++j) girow[t * k + j] = g;
            }
        }
    }
    return gi;
}

Tensor elu(const Tensor& input) {
    Tensor out = input;
    for (auto& v : out.data) {
        if (v < 0.0) v = std::expm1(v);
    }
    return out;
}

Tensor elu_backward(const Tensor& output, const Tensor& grad_out) {
    require(output.shape == grad_out.shape, "elu_backward: shape mismatch");
    Tensor gi = grad_out;
    for (std::size_t i = 0; i < gi.data.size(); ++i) {
        const double y = output.data[i];
        if (y < 0.0) gi.data[i] *= y + 1.0;
    }
    return gi;
}

Tensor tanh_op(const Tensor& input) {
    Tensor out = input;
    for (auto& v : out.data) v = std::tanh(v);
    return out;
}

Tensor tanh_backward(const Tensor& output, const Tensor& grad_out) {
    require(output.shape == grad_out.shape, "tanh_backward: shape mismatch");
    Tensor gi = grad_out;
    for (std::size_t i = 0; i < gi.data.size(); ++i) {
        const double y = output.data[i];
        gi.data[i] *= 1.0 - y * y;
    }
    return gi;
}

namespace {

// Iterate all lanes of `axis`: outer runs over indices before the axis,
// inner is the contiguous stride within one lane step.
struct AxisView {
    std::int64_t outer, extent, inner;
};

AxisView axis_view(const Tensor& t, int axis) {
    require(axis >= 0 && axis < t.rank(), "softmax: axis out of range");
    std::int64_t outer = 1, inner = 1;
    for (int i = 0; i < axis; ++i) outer *= t.shape[static_cast<std::size_t>(i)];
    for (int i = axis + 1; i < t.rank(); ++i) inner *= t.shape[static_cast<std::size_t>(i)];
    return {outer, t.shape[static_cast<std::size_t>(axis)], inner};
}

}  // namespace

Tensor softmax(const Tensor& input, int axis) {
    const AxisView v = axis_view(input, axis);
    Tensor out = input;
    for (std::int64_t o = 0; o < v.outer; ++o) {
        for (std::int64_t i = 0; i < v.inner; ++i) {
            double* base = out.data.data() + o * v.extent * v.inner + i;
            double mx = base[0];
            for (std::int64_t e = 1; e < v.extent; ++e) mx = std::max(mx, base[e * v.inner]);
            double sum = 0.0;
            for (std::int64_t e = 0; e < v.extent; ++e) {
                const double ev = std::exp(base[e * v.inner] - mx);
                base[e * v.inner] = ev;
                sum += ev;
            }
            for (std::int64_t e = 0; e < v.extent; ++e) base[e * v.inner] /= sum;
        }
    }
    return out;
}

Tensor softmax_backward(const Tensor& output, const Tensor& grad_out, int axis) {
    require(output.shape == grad_out.shape, "softmax_backward: shape mismatch");
    const AxisView v = axis_view(output, axis);
    Tensor gi = Tensor::zeros(output.shape);
    for (std::int64_t o = 0; o < v.outer; ++o) {
        for (std::int64_t i = 0; i < v.inner; ++i) {
            const std::int64_t base = o * v.extent * v.inner + i;
            double dot = 0.0;
            for (std::int64_t e = 0; e < v.extent; ++e) {
                dot += output.data[static_cast<std::size_t>(base + e * v.inner)] *
                       grad_out.data[static_cast<std::size_t>(base + e * v.inner)];
            }
            for (std::int64_t e = 0; e < v.extent; ++e) {
                const auto idx = static_cast<std::size_t>(base + e * v.inner);
                gi.data[idx] = output.data[idx] * (grad_out.data[idx] - dot);
            }
        }
    }
    return gi;
}

Tensor concat_channels(const Tensor& a, const Tensor& b) {
    require_rank(a, 3, "concat_channels a");
    require_rank(b, 3, "concat_channels b");
    require(a.shape[0] == b.shape[0] && a.shape[2] == b.shape[2],
            "concat_channels: batch/time mismatch " + shape_str(a.shape) + " vs " + shape_str(b.shape));
    const std::int64_t batch = a.shape[0], ca = a.shape[1], cb = b.shape[1], t_len = a.shape[2];
    Tensor out = Tensor::zeros({batch, ca + cb, t_len});
    for (std::int64_t bi = 0; bi < batch; ++bi) {
        std::copy_n(a.ptr3(bi, 0, 0), ca * t_len, out.ptr3(bi, 0, 0));
        std::copy_n(b.ptr3(bi, 0, 0), cb * t_len, out.ptr3(bi, ca, 0));
    }
    return out;
}

void split_channels(const Tensor& grad, std::int64_t c_a, Tensor& grad_a, Tensor& grad_b) {
    require_rank(grad, 3, "split_channels grad");
    const std::int64_t batch = grad.shape[0], c = grad.shape[1], t_len = grad.shape[2];
    require(c_a > 0 && c_a < c, "split_channels: bad split point");
    grad_a = Tensor::zeros({batch, c_a, t_len});
    grad_b = Tensor::zeros({batch, c - c_a, t_len});
    for (std::int64_t bi = 0; bi < batch; ++bi) {
        std::copy_n(grad.ptr3(bi, 0, 0), c_a * t_len, grad_a.ptr3(bi, 0, 0));
        std::copy_n(grad.ptr3(bi, c_a, 0), (c - c_a) * t_len, grad_b.ptr3(bi, 0, 0));
    }
}

Tensor pad_time(const Tensor& input, std::int64_t left, std::int64_t right) {
    require_rank(input, 3, "pad_time input");
    require(left >= 0 && right >= 0, "pad_time: negative padding");
    if (left == 0 && right == 0) return input;
    const std::int64_t batch = input.shape[0], c = input.shape[1], t_len = input.shape[2];
    Tensor out = Tensor::zeros({batch, c, t_len + left + right});
    for (std::int64_t b = 0; b < batch; ++b) {
        for (std::int64_t ch = 0; ch < c; ++ch) {
            std::copy_n(input.ptr3(b, ch, 0), t_len, out.ptr3(b, ch, left));
        }
    }
    return out;
}

Tensor crop_time(const Tensor& input, std::int64_t left, std::int64_t length) {
    require_rank(input, 3, "crop_time input");
    require(left >= 0 && left + length <= input.shape[2], "crop_time: window out of range");
    if (left == 0 && length == input.shape[2]) return input;
    const std::int64_t batch = input.shape[0], c = input.shape[1];
    Tensor out = Tensor::zeros({batch, c, length});
    for (std::int64_t b = 0; b < batch; ++b) {
        for (std::int64_t ch = 0; ch < c; ++ch) {
            std::copy_n(input.ptr3(b, ch, left), length, out.ptr3(b, ch, 0));
        }
    }
    return out;
}

}  // namespace usleep
