#ifndef USLEEP_PREPROCESS_HPP_
#define USLEEP_PREPROCESS_HPP_

#include <string>
#include <vector>

#include "usleep/derivation.hpp"
#include "usleep/edf.hpp"
#include "usleep/hypnogram.hpp"

namespace usleep {

constexpr double kTargetRateHz = 128.0;
constexpr double kClipSigma = 20.0;  // clip beyond 20 * IQR from the median

// Windowed-sinc resampling to `to_hz`. Output length = round(len * to/from).
std::vector<double> resample(const std::vector<double>& signal, double from_hz,
                             double to_hz = kTargetRateHz);

struct ScaledChannel {
    std::vector<double> samples;
    double median = 0.0;  // pre-scale provenance
    double iqr = 1.0;
    bool usable = true;  // false when IQR == 0 (flat channel)
};

// y = (x - median) / IQR clipped to [-20, 20]; quartiles use linear
// interpolation between order statistics.
ScaledChannel robust_scale_clip(const std::vector<double>& signal);

// Crop to [first onset, last onset + duration] of the hypnogram, limited to
// the available signal. Throws IneligibleRecording on an empty hypnogram.
Recording trim_to_hypnogram(const Recording& recording);

// Per-epoch class indices on the 30 s grid starting at `grid_start_s`:
// N4 -> N3, MOVEMENT/UNKNOWN and uncovered gaps -> kMaskLabel.
std::vector<int> harmonize_labels(const Hypnogram& hypnogram, double grid_start_s,
                                  std::int64_t n_epochs);

struct PreprocessedChannel {
    Derivation derivation;
    std::vector<float> samples;  // 128 Hz, scaled, clipped
    double scale_median = 0.0;
    double scale_iqr = 1.0;
    double original_rate_hz = 0.0;
    bool usable = true;
};

// A recording ready for sampling/inference: derivations at 128 Hz, robust
// scaled, with the harmonized epoch label sequence.
struct PreprocessedRecording {
    std::string recording_id;
    std::string dataset_id;
    SubjectMeta subject;
    std::vector<PreprocessedChannel> channels;
    std::vector<int> epoch_labels;  // class index or kMaskLabel per 30 s epoch

    std::int64_t n_epochs() const { return static_cast<std::int64_t>(epoch_labels.size()); }
    std::vector<std::size_t> usable_channels(Modality m) const;
};

// Fixed pipeline: trim -> resample -> scale/clip, then label harmonization.
PreprocessedRecording preprocess(const Recording& recording,
                                 const std::vector<DerivedChannel>& derived,
                                 const std::string& recording_id);

}  // namespace usleep

#endif  // USLEEP_PREPROCESS_HPP_
