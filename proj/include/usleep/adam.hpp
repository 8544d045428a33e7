#ifndef USLEEP_ADAM_HPP_
#define USLEEP_ADAM_HPP_

#include <cstdint>
#include <map>
#include <string>

#include "usleep/tensor.hpp"

namespace usleep {

using NamedTensors = std::map<std::string, Tensor>;

// Bias-corrected Adam over a named parameter set. Moment tensors are
// created lazily on the first step a parameter participates in.
struct AdamState {
    double lr = 1e-5;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps_adam = 1e-8;
    std::int64_t step_count = 0;
    NamedTensors first_moment;
    NamedTensors second_moment;
};

// One update over all (param, grad) pairs present in `grads`. Parameters
// without a gradient entry stay untouched. Throws on non-finite gradients,
// naming the parameter.
void adam_step(NamedTensors& params, const NamedTensors& grads, AdamState& state);

}  // namespace usleep

#endif  // USLEEP_ADAM_HPP_
