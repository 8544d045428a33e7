#ifndef USLEEP_NN_OPS_HPP_
#define USLEEP_NN_OPS_HPP_

#include <cstdint>
#include <vector>

#include "usleep/tensor.hpp"

namespace usleep {

// Layer primitives on [B, C, T] tensors. Each op has an explicit reverse
// pass; grad_check() is the arbiter for all of them.

struct ConvGrads {
    Tensor input;
    Tensor kernel;
    Tensor bias;
};

// Same-padded 1-D convolution. kernel [Cout, Cin, k] with k odd, bias [Cout].
Tensor conv1d(const Tensor& input, const Tensor& kernel, const Tensor& bias);
ConvGrads conv1d_backward(const Tensor& input, const Tensor& kernel, const Tensor& grad_out);

struct MaxPoolResult {
    Tensor output;
    // Flat source index within each input row for every output position.
    std::vector<std::int64_t> argmax;
};

// Non-overlapping window max, kernel == stride. T must divide by k.
MaxPoolResult maxpool1d(const Tensor& input, std::int64_t k = 2);
// Gradient goes to the stored argmax position (first occurrence on ties).
Tensor maxpool1d_backward(const MaxPoolResult& pooled, const Tensor& grad_out,
                          std::int64_t input_t, std::int64_t k = 2);

Tensor upsample_nearest(const Tensor& input, std::int64_t factor = 2);
Tensor upsample_nearest_backward(const Tensor& grad_out, std::int64_t factor = 2);

// Window mean, kernel == stride. T must divide by k.
Tensor avgpool1d(const Tensor& input, std::int64_t k);
Tensor avgpool1d_backward(const Tensor& grad_out, std::int64_t input_t, std::int64_t k);

// ELU with alpha = 1. Backward takes the forward *output*; the slope is
// recoverable from it (1 for y >= 0, y + 1 otherwise).
Tensor elu(const Tensor& input);
Tensor elu_backward(const Tensor& output, const Tensor& grad_out);

Tensor tanh_op(const Tensor& input);
Tensor tanh_backward(const Tensor& output, const Tensor& grad_out);

// Numerically stable softmax along `axis` (max subtraction).
Tensor softmax(const Tensor& input, int axis);
Tensor softmax_backward(const Tensor& output, const Tensor& grad_out, int axis);

// Concatenate two [B, C, T] tensors along the channel axis; split reverses it.
Tensor concat_channels(const Tensor& a, const Tensor& b);
void split_channels(const Tensor& grad, std::int64_t c_a, Tensor& grad_a, Tensor& grad_b);

// Symmetric zero padding / cropping along the time axis.
Tensor pad_time(const Tensor& input, std::int64_t left, std::int64_t right);
Tensor crop_time(const Tensor& input, std::int64_t left, std::int64_t length);

}  // namespace usleep

#endif  // USLEEP_NN_OPS_HPP_
