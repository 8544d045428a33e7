#include "usleep/sampler.hpp"

#include <algorithm>
#include <cmath>

#include "usleep/errors.hpp"

namespace usleep {

std::vector<double> dataset_probability(const std::vector<std::int64_t>& sizes, double alpha) {
    require(!sizes.empty(), "dataset_probability: empty dataset list");
    require(alpha >= 0.0 && alpha <= 1.0, "dataset_probability: alpha must be in [0,1]");
    double total = 0.0;
    for (auto s : sizes) {
        require(s > 0, "dataset_probability: dataset sizes must be positive");
        total += static_cast<double>(s);
    }
    const double n = static_cast<double>(sizes.size());
    std::vector<double> p(sizes.size());
    for (std::size_t i = 0; i < sizes.size(); ++i) {
        p[i] = alpha / n + (1.0 - alpha) * static_cast<double>(sizes[i]) / total;
    }
    return p;
}

Sampler::Sampler(std::vector<Dataset> datasets, SamplerConfig config) : config_(config) {
    require(!datasets.empty(), "sampler: no datasets");
    require(config_.frac_min > 0.0 && config_.frac_min < config_.frac_max,
            "sampler: frac_min must be in (0, frac_max)");
    std::vector<std::int64_t> sizes;
    for (auto& d : datasets) {
        require(!d.recordings.empty(), "sampler: dataset '" + d.dataset_id + "' has no recordings");
        dataset_ids_.push_back(d.dataset_id);
        sizes.push_back(static_cast<std::int64_t>(d.recordings.size()));

        std::vector<RecordingIndex> indexed;
        for (const auto* rec : d.recordings) {
            RecordingIndex ri;
            ri.rec = rec;
            ri.epochs_by_class.resize(kNumClasses);
            for (std::int64_t e = 0; e < rec->n_epochs(); ++e) {
                const int label = rec->epoch_labels[static_cast<std::size_t>(e)];
                if (label >= 0 && label < kNumClasses) {
                    ri.epochs_by_class[static_cast<std::size_t>(label)].push_back(e);
                }
            }
            for (int c = 0; c < kNumClasses; ++c) {
                if (!ri.epochs_by_class[static_cast<std::size_t>(c)].empty()) {
                    ri.present_classes.push_back(c);
                }
            }
            ri.eeg_channels = rec->usable_channels(Modality::EEG);
            ri.eog_channels = rec->usable_channels(Modality::EOG);
            ri.eligible = !ri.present_classes.empty() && !ri.eeg_channels.empty() &&
                          !ri.eog_channels.empty() && rec->n_epochs() >= config_.seq_epochs;
            indexed.push_back(std::move(ri));
        }
        datasets_.push_back(std::move(indexed));
    }
    probs_ = dataset_probability(sizes, config_.alpha);
}

namespace {

std::size_t draw_categorical(const std::vector<double>& probs, Rng& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double x = u(rng);
    double cum = 0.0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
        cum += probs[i];
        if (x < cum) return i;
    }
    return probs.size() - 1;
}

std::int64_t draw_index(std::int64_t n, Rng& rng) {
    std::uniform_int_distribution<std::int64_t> d(0, n - 1);
    return d(rng);
}

}  // namespace

SampleElement Sampler::sample_sequence(Rng& rng) const {
    constexpr int kMaxRetries = 100;
    const std::int64_t L = config_.seq_epochs;
    const std::int64_t i_samples = config_.epoch_samples();

    for (int attempt = 0; attempt < kMaxRetries; ++attempt) {
        // (1) dataset sampling
        const std::size_t d = draw_categorical(probs_, rng);
        // (2) subject/recording sampling
        const auto& recs = datasets_[d];
        const auto& ri = recs[static_cast<std::size_t>(draw_index(static_cast<std::int64_t>(recs.size()), rng))];
        if (!ri.eligible) continue;
        const auto* rec = ri.rec;

        // (3) channel sampling: one EEG and one EOG, uniform over the pairs
        const auto eeg_idx = ri.eeg_channels[static_cast<std::size_t>(
            draw_index(static_cast<std::int64_t>(ri.eeg_channels.size()), rng))];
        const auto eog_idx = ri.eog_channels[static_cast<std::size_t>(
            draw_index(static_cast<std::int64_t>(ri.eog_channels.size()), rng))];

        // (4) segment sampling: uniform class among those present, uniform
        // epoch of that class, anchor shifted to a uniform window position
        const int cls = ri.present_classes[static_cast<std::size_t>(
            draw_index(static_cast<std::int64_t>(ri.present_classes.size()), rng))];
        const auto& epochs = ri.epochs_by_class[static_cast<std::size_t>(cls)];
        const std::int64_t anchor =
            epochs[static_cast<std::size_t>(draw_index(static_cast<std::int64_t>(epochs.size()), rng))];
        const std::int64_t offset = draw_index(L, rng);
        const std::int64_t start =
            std::clamp<std::int64_t>(anchor - offset, 0, rec->n_epochs() - L);

        SampleElement el;
        el.group_index = config_.age_scheme.groups == 1
                             ? 0
                             : (rec->subject.age_years
                                    ? age_group(*rec->subject.age_years, config_.age_scheme)
                                    : 0);
        el.targets.assign(rec->epoch_labels.begin() + start, rec->epoch_labels.begin() + start + L);

        const auto& eeg = rec->channels[eeg_idx].samples;
        const auto& eog = rec->channels[eog_idx].samples;
        const auto s0 = static_cast<std::size_t>(start * i_samples);
        const auto sn = static_cast<std::size_t>(L * i_samples);
        el.eeg.assign(eeg.begin() + s0, eeg.begin() + s0 + sn);
        el.eog.assign(eog.begin() + s0, eog.begin() + s0 + sn);

        el.log.dataset_id = dataset_ids_[d];
        el.log.recording_id = rec->recording_id;
        el.log.eeg_derivation = rec->channels[eeg_idx].derivation.name();
        el.log.eog_derivation = rec->channels[eog_idx].derivation.name();
        el.log.anchor_class = cls;
        el.log.offset = offset;
        el.log.start_epoch = start;
        return el;
    }
    throw ContractViolation("sampler: no eligible recording after " + std::to_string(kMaxRetries) +
                            " attempts");
}

void Sampler::augment(SampleElement& element, Rng& rng) const {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double sigma = std::sqrt(config_.aug_var);

    double mean = 0.0;
    const auto n = element.eeg.size();
    for (std::size_t i = 0; i < n; ++i) mean += element.eeg[i] + element.eog[i];
    mean /= static_cast<double>(2 * n);
    std::normal_distribution<double> noise(mean, sigma);

    if (u(rng) < config_.aug_segment_p) {
        element.segment_noise_fired = true;
        const double frac =
            std::exp(std::uniform_real_distribution<double>(std::log(config_.frac_min),
                                                            std::log(config_.frac_max))(rng));
        const auto span = std::max<std::int64_t>(1, static_cast<std::int64_t>(
                                                        std::llround(frac * static_cast<double>(n))));
        const std::int64_t start = draw_index(static_cast<std::int64_t>(n) - span + 1, rng);
        for (std::int64_t i = start; i < start + span; ++i) {
            element.eeg[static_cast<std::size_t>(i)] = noise(rng);
            element.eog[static_cast<std::size_t>(i)] = noise(rng);
        }
    }
    if (u(rng) < config_.aug_channel_p) {
        element.channel_noise_fired = true;
        auto& channel = draw_index(2, rng) == 0 ? element.eeg : element.eog;
        for (auto& v : channel) v = noise(rng);
    }
}

SampleBatch Sampler::make_batch(std::int64_t batch_size, Rng& rng, bool with_augmentation) const {
    require(batch_size > 0, "sampler: batch size must be positive");
    const std::int64_t L = config_.seq_epochs;
    const std::int64_t t_len = config_.seq_samples();

    SampleBatch batch;
    batch.inputs = Tensor::zeros({batch_size, 2, t_len});
    batch.targets.resize(static_cast<std::size_t>(batch_size * L));
    batch.groups.resize(static_cast<std::size_t>(batch_size));

    for (std::int64_t b = 0; b < batch_size; ++b) {
        SampleElement el = sample_sequence(rng);
        if (with_augmentation) augment(el, rng);
        std::copy(el.eeg.begin(), el.eeg.end(), batch.inputs.ptr3(b, 0, 0));
        std::copy(el.eog.begin(), el.eog.end(), batch.inputs.ptr3(b, 1, 0));
        std::copy(el.targets.begin(), el.targets.end(),
                  batch.targets.begin() + static_cast<std::ptrdiff_t>(b * L));
        batch.groups[static_cast<std::size_t>(b)] = el.group_index;
        batch.logs.push_back(std::move(el.log));
    }
    return batch;
}

}  // namespace usleep
