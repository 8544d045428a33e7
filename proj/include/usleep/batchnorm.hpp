#ifndef USLEEP_BATCHNORM_HPP_
#define USLEEP_BATCHNORM_HPP_

#include <cstdint>
#include <vector>

#include "usleep/tensor.hpp"

namespace usleep {

enum class BnMode { train, eval };

enum class BnVariant { vanilla, ccbn, sabn };

// One batch-normalization layer over [B, C, T]. Statistics are always
// computed per channel across (batch, time) and are shared by every
// affine variant; only the re-scaling differs:
//   vanilla:  h = gamma * xhat + beta
//   ccbn:     h = gamma_g * xhat + beta_g
//   sabn:     h = gamma_g * (gamma_sa * xhat + beta_sa) + beta_g
struct BatchNormState {
    BnVariant variant = BnVariant::vanilla;
    std::int64_t channels = 0;
    std::int64_t groups = 1;

    // vanilla affine, doubling as the sandwich shared pair for sabn
    Tensor gamma, beta;
    // per-group affines (ccbn, sabn); groups entries of shape [C]
    std::vector<Tensor> gamma_g, beta_g;

    Tensor running_mean, running_var;
    double momentum = 0.99;  // weight on the old running statistics
    double epsilon = 1e-5;

    static BatchNormState vanilla_init(std::int64_t channels);
    static BatchNormState ccbn_init(std::int64_t channels, std::int64_t groups);
    static BatchNormState sabn_init(std::int64_t channels, std::int64_t groups);
};

// Cache of the normalization pass, consumed by the backward pass.
struct BnCache {
    Tensor xhat;                  // normalized input
    std::vector<double> inv_std;  // per channel, 1/sqrt(var + eps)
    std::vector<int> groups;      // per-sample group index used
    BnMode mode = BnMode::train;
};

struct BnGrads {
    Tensor input;
    Tensor gamma, beta;                  // vanilla / sandwich-shared
    std::vector<Tensor> gamma_g, beta_g; // per-group (empty for vanilla)
};

// Forward pass. `groups` carries one group index per batch element and is
// consulted only for ccbn/sabn; pass {} for vanilla. Train mode updates the
// running statistics in place.
Tensor batch_norm(const Tensor& input, BatchNormState& state, BnMode mode,
                  const std::vector<int>& groups, BnCache* cache = nullptr);

// Vanilla convenience overload.
Tensor batch_norm(const Tensor& input, BatchNormState& state, BnMode mode,
                  BnCache* cache = nullptr);

BnGrads batch_norm_backward(const BatchNormState& state, const BnCache& cache,
                            const Tensor& grad_out);

}  // namespace usleep

#endif  // USLEEP_BATCHNORM_HPP_
