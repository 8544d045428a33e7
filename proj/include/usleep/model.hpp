#ifndef USLEEP_MODEL_HPP_
#define USLEEP_MODEL_HPP_

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "usleep/adam.hpp"
#include "usleep/batchnorm.hpp"
#include "usleep/nn_ops.hpp"
#include "usleep/tensor.hpp"

namespace usleep {

struct ArchitectureConfig {
    int depth = 12;
    double base_filters = 5.0;
    double filter_growth = 1.4142135623730951;  // sqrt(2)
    std::int64_t kernel_size = 9;
    double rate_hz = 128.0;
    int epoch_s = 30;
    int num_classes = 5;
    BnVariant bn_variant = BnVariant::vanilla;
    int groups = 1;

    std::int64_t epoch_samples() const {
        return static_cast<std::int64_t>(rate_hz) * epoch_s;
    }
    std::int64_t alignment() const { return std::int64_t{1} << depth; }
    // Encoder block n (1-based) runs floor(base * growth^n) filters.
    std::vector<std::int64_t> encoder_filters() const;
};

// Named parameter store: convolution tensors live in `tensors` under
// `encoder.N.conv.*`, `decoder.N.conv1/conv2.*`, `classifier.*`;
// batch-norm layers (affines + running stats) live in `bn`.
struct ModelParameters {
    ArchitectureConfig config;
    NamedTensors tensors;
    std::map<std::string, BatchNormState> bn;
};

// Seeded build: symmetric uniform fan-in init for conv weights, zero biases,
// identity BN affines.
ModelParameters build_model(const ArchitectureConfig& config, Rng& rng);

// Flat view over every trainable tensor (conv weights/biases + BN affines of
// the active variant), keyed for the optimizer and checkpoints.
std::vector<std::pair<std::string, Tensor*>> trainable_parameters(ModelParameters& params);

// Adam over the flat view.
void adam_step_model(ModelParameters& params, const NamedTensors& grads, AdamState& state);

struct ForwardTrace;  // defined in model.cpp

// Segmentation forward pass: inputs [B, 2, T] with T a whole number of
// epochs; returns per-epoch class probabilities [B, L, K]. Inputs are
// zero-padded to the 2^depth alignment internally and cropped back. The
// per-sample `groups` are consulted only for ccbn/sabn. Train mode updates
// BN running statistics.
Tensor model_forward(ModelParameters& params, const Tensor& inputs, const std::vector<int>& groups,
                     BnMode mode, ForwardTrace* trace = nullptr);
Tensor model_forward(ModelParameters& params, const Tensor& inputs, int group, BnMode mode);

// Reverse pass from d(loss)/d(probabilities); fills `grad_input` when asked.
NamedTensors model_backward(const ModelParameters& params, const ForwardTrace& trace,
                            const Tensor& grad_probs, Tensor* grad_input = nullptr);

ForwardTrace* new_forward_trace();
void free_forward_trace(ForwardTrace*);

// RAII helper around the opaque trace.
class TraceHolder {
public:
    TraceHolder() : trace_(new_forward_trace()) {}
    ~TraceHolder() { free_forward_trace(trace_); }
    TraceHolder(const TraceHolder&) = delete;
    TraceHolder& operator=(const TraceHolder&) = delete;
    ForwardTrace* get() { return trace_; }

private:
    ForwardTrace* trace_;
};

// Vanilla -> sandwich conversion: the vanilla affine becomes the shared
// sandwich pair and every per-group affine starts at identity, so outputs
// are preserved exactly for every group.
ModelParameters convert_to_sabn(const ModelParameters& params, int groups);
// Inverse for G=1 sandwich models (exact round-trip).
ModelParameters collapse_to_vanilla(const ModelParameters& params);

enum class CheckpointDtype { f64, f32 };

void save_checkpoint(const ModelParameters& params, const std::string& path,
                     CheckpointDtype dtype = CheckpointDtype::f64);
ModelParameters load_checkpoint(const std::string& path,
                                std::optional<BnVariant> expect_variant = {});

}  // namespace usleep

#endif  // USLEEP_MODEL_HPP_
