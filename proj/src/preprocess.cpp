#include "usleep/preprocess.hpp"

#include <algorithm>
#include <cmath>

#include "usleep/errors.hpp"
#include "usleep/stats.hpp"

namespace usleep {

namespace {

constexpr std::int64_t kSincHalfWidth = 64;  // input samples

double blackman(double u, double half_width) {
    // u in [-half_width, half_width]
    const double x = (u / half_width + 1.0) / 2.0;  // -> [0, 1]
    return 0.42 - 0.5 * std::cos(2.0 * M_PI * x) + 0.08 * std::cos(4.0 * M_PI * x);
}

double sinc(double x) {
    if (x == 0.0) return 1.0;
    const double px = M_PI * x;
    return std::sin(px) / px;
}

}  // namespace

std::vector<double> resample(const std::vector<double>& signal, double from_hz, double to_hz) {
    require(from_hz > 0.0 && to_hz > 0.0, "resample: rates must be positive");
    if (from_hz == to_hz) return signal;
    const auto n_in = static_cast<std::int64_t>(signal.size());
    const auto n_out = static_cast<std::int64_t>(std::llround(static_cast<double>(n_in) * to_hz / from_hz));
    std::vector<double> out(static_cast<std::size_t>(n_out));
    if (n_in == 0) return out;

    // Cutoff at the lower of the two Nyquist frequencies, in input-sample units.
    const double fc = std::min(1.0, to_hz / from_hz);
    const std::int64_t half = std::min<std::int64_t>(kSincHalfWidth, n_in);
    const double step = from_hz / to_hz;

    for (std::int64_t n = 0; n < n_out; ++n) {
        const double p = static_cast<double>(n) * step;
        const auto m0 = static_cast<std::int64_t>(std::ceil(p - static_cast<double>(half)));
        const auto m1 = static_cast<std::int64_t>(std::floor(p + static_cast<double>(half)));
        double acc = 0.0, norm = 0.0;
        for (std::int64_t m = std::max<std::int64_t>(0, m0); m <= std::min(n_in - 1, m1); ++m) {
            const double u = p - static_cast<double>(m);
            const double w = fc * sinc(fc * u) * blackman(u, static_cast<double>(half));
            acc += w * signal[static_cast<std::size_t>(m)];
            norm += w;
        }
        out[static_cast<std::size_t>(n)] = norm != 0.0 ? acc / norm : 0.0;
    }
    return out;
}

ScaledChannel robust_scale_clip(const std::vector<double>& signal) {
    require(!signal.empty(), "robust_scale_clip: empty signal");
    ScaledChannel out;
    out.median = median(signal);
    out.iqr = interquartile_range(signal);
    out.samples.reserve(signal.size());
    if (out.iqr == 0.0) {
        out.usable = false;
        for (double v : signal) out.samples.push_back(v - out.median);
        return out;
    }
    for (double v : signal) {
        const double y = (v - out.median) / out.iqr;
        out.samples.push_back(std::clamp(y, -kClipSigma, kClipSigma));
    }
    return out;
}

Recording trim_to_hypnogram(const Recording& recording) {
    if (recording.hypnogram.empty()) {
        throw IneligibleRecording("recording has an empty hypnogram");
    }
    const double start_s = recording.hypnogram.start_s();
    const double end_s = recording.hypnogram.end_s();
    Recording out = recording;
    for (auto& ch : out.channels) {
        const auto n = static_cast<std::int64_t>(ch.samples.size());
        const auto lo = std::clamp<std::int64_t>(
            static_cast<std::int64_t>(std::llround(start_s * ch.sample_rate_hz)), 0, n);
        const auto hi = std::clamp<std::int64_t>(
            static_cast<std::int64_t>(std::llround(end_s * ch.sample_rate_hz)), lo, n);
        ch.samples = std::vector<double>(ch.samples.begin() + lo, ch.samples.begin() + hi);
    }
    return out;
}

std::vector<int> harmonize_labels(const Hypnogram& hypnogram, double grid_start_s,
                                  std::int64_t n_epochs) {
    std::vector<int> labels(static_cast<std::size_t>(n_epochs), kMaskLabel);
    for (std::int64_t e = 0; e < n_epochs; ++e) {
        const double mid = grid_start_s + (static_cast<double>(e) + 0.5) * kEpochSeconds;
        for (const auto& entry : hypnogram.entries) {
            if (mid >= entry.onset_s && mid < entry.onset_s + entry.duration_s) {
                labels[static_cast<std::size_t>(e)] = stage_class_index(entry.stage);
                break;
            }
        }
    }
    return labels;
}

std::vector<std::size_t> PreprocessedRecording::usable_channels(Modality m) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < channels.size(); ++i) {
        if (channels[i].usable && channels[i].derivation.modality == m) out.push_back(i);
    }
    return out;
}

PreprocessedRecording preprocess(const Recording& recording,
                                 const std::vector<DerivedChannel>& derived,
                                 const std::string& recording_id) {
    if (recording.hypnogram.empty()) {
        throw IneligibleRecording("recording has an empty hypnogram");
    }
    require(!derived.empty(), "preprocess: no derived channels");

    const double start_s = recording.hypnogram.start_s();
    const double end_s = recording.hypnogram.end_s();

    PreprocessedRecording out;
    out.recording_id = recording_id;
    out.dataset_id = recording.dataset_id;
    out.subject = recording.subject;

    std::int64_t min_len = -1;
    for (const auto& dc : derived) {
        const auto n = static_cast<std::int64_t>(dc.samples.size());
        const auto lo = std::clamp<std::int64_t>(
            static_cast<std::int64_t>(std::llround(start_s * dc.sample_rate_hz)), 0, n);
        const auto hi = std::clamp<std::int64_t>(
            static_cast<std::int64_t>(std::llround(end_s * dc.sample_rate_hz)), lo, n);
        std::vector<double> trimmed(dc.samples.begin() + lo, dc.samples.begin() + hi);
        if (trimmed.empty()) throw IneligibleRecording("hypnogram lies outside the signal");

        std::vector<double> at128 = resample(trimmed, dc.sample_rate_hz, kTargetRateHz);
        ScaledChannel scaled = robust_scale_clip(at128);

        PreprocessedChannel ch;
        ch.derivation = dc.derivation;
        ch.original_rate_hz = dc.sample_rate_hz;
        ch.scale_median = scaled.median;
        ch.scale_iqr = scaled.iqr;
        ch.usable = scaled.usable;
        ch.samples.assign(scaled.samples.begin(), scaled.samples.end());
        const auto len = static_cast<std::int64_t>(ch.samples.size());
        min_len = min_len < 0 ? len : std::min(min_len, len);
        out.channels.push_back(std::move(ch));
    }

    // Align channel lengths (rounding during resample can differ by a sample).
    for (auto& ch : out.channels) ch.samples.resize(static_cast<std::size_t>(min_len));

    const auto n_epochs = min_len / (kEpochSeconds * static_cast<std::int64_t>(kTargetRateHz));
    out.epoch_labels = harmonize_labels(recording.hypnogram, start_s, n_epochs);

    if (out.usable_channels(Modality::EEG).empty() || out.usable_channels(Modality::EOG).empty()) {
        throw IneligibleRecording("no usable EEG or EOG channel after preprocessing");
    }
    return out;
}

}  // namespace usleep
