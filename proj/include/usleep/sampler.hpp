#ifndef USLEEP_SAMPLER_HPP_
#define USLEEP_SAMPLER_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "usleep/cohort.hpp"
#include "usleep/preprocess.hpp"
#include "usleep/tensor.hpp"

namespace usleep {

struct SamplerConfig {
    double alpha = 0.5;        // dataset probability mixing weight
    std::int64_t seq_epochs = 35;  // L
    double rate_hz = kTargetRateHz;
    double aug_segment_p = 0.1;
    double aug_channel_p = 0.1;
    double aug_var = 0.01;
    double frac_min = 0.001;
    double frac_max = 0.33;
    AgeGroupScheme age_scheme{1};

    std::int64_t epoch_samples() const {
        return kEpochSeconds * static_cast<std::int64_t>(rate_hz);
    }
    std::int64_t seq_samples() const { return seq_epochs * epoch_samples(); }
};

// P(D) = alpha/N + (1-alpha) * size_D / sum(sizes).
std::vector<double> dataset_probability(const std::vector<std::int64_t>& sizes, double alpha);

struct DrawLog {
    std::string dataset_id;
    std::string recording_id;
    std::string eeg_derivation;
    std::string eog_derivation;
    int anchor_class = 0;
    std::int64_t offset = 0;       // anchor position within the window
    std::int64_t start_epoch = 0;  // window start after clamping
};

struct SampleElement {
    std::vector<double> eeg, eog;  // seq_samples() each
    std::vector<int> targets;      // seq_epochs, class index or kMaskLabel
    int group_index = 0;
    bool segment_noise_fired = false;
    bool channel_noise_fired = false;
    DrawLog log;
};

struct SampleBatch {
    Tensor inputs;             // [B, 2, L*i], channel 0 EEG, channel 1 EOG
    std::vector<int> targets;  // [B * L]
    std::vector<int> groups;   // [B]
    std::vector<DrawLog> logs;
};

// Hierarchical class-balanced sampler over one or more datasets of
// preprocessed recordings. Pure draws: all randomness comes from the Rng
// passed to each call, so one seed reproduces one stream.
class Sampler {
public:
    struct Dataset {
        std::string dataset_id;
        std::vector<const PreprocessedRecording*> recordings;
    };

    Sampler(std::vector<Dataset> datasets, SamplerConfig config);

    const SamplerConfig& config() const { return config_; }
    const std::vector<double>& probabilities() const { return probs_; }

    // Steps (1)-(4): dataset, recording, channel pair, class-anchored window.
    SampleElement sample_sequence(Rng& rng) const;

    // Gaussian-noise augmentation; targets untouched.
    void augment(SampleElement& element, Rng& rng) const;

    SampleBatch make_batch(std::int64_t batch_size, Rng& rng, bool with_augmentation = true) const;

private:
    struct RecordingIndex {
        const PreprocessedRecording* rec = nullptr;
        std::vector<std::vector<std::int64_t>> epochs_by_class;  // kNumClasses lists
        std::vector<int> present_classes;
        std::vector<std::size_t> eeg_channels, eog_channels;
        bool eligible = false;
    };

    std::vector<std::string> dataset_ids_;
    std::vector<std::vector<RecordingIndex>> datasets_;
    std::vector<double> probs_;
    SamplerConfig config_;
};

}  // namespace usleep

#endif  // USLEEP_SAMPLER_HPP_
