#ifndef USLEEP_GRAD_CHECK_HPP_
#define USLEEP_GRAD_CHECK_HPP_

#include <cstdint>
#include <functional>
#include <vector>

#include "usleep/tensor.hpp"

namespace usleep {

// Finite-difference verification of reverse-mode gradients.
//
// `loss` evaluates the scalar objective from the current contents of the
// watched tensors; `analytic` are the gradients under test, aligned with
// `inputs`. Each watched element is perturbed by +-h (central differences)
// and compared against the analytic value with relative error
// |a - b| / max(|a|, |b|, 1e-8). Returns the maximum relative error.
//
// `max_elements_per_tensor` caps the number of probed elements per tensor
// (deterministically subsampled); 0 means probe everything.
double grad_check(const std::function<double()>& loss, const std::vector<Tensor*>& inputs,
                  const std::vector<const Tensor*>& analytic, double h = 1e-5,
                  std::int64_t max_elements_per_tensor = 0, std::uint64_t subsample_seed = 0);

}  // namespace usleep

#endif  // USLEEP_GRAD_CHECK_HPP_
