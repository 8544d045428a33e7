#ifndef USLEEP_DERIVATION_HPP_
#define USLEEP_DERIVATION_HPP_

#include <string>
#include <vector>

#include "usleep/edf.hpp"
#include "usleep/tensor.hpp"

namespace usleep {

enum class Modality { EEG, EOG };

// An ordered electrode pair whose samplewise difference forms one model
// input channel. negative == "REF" means the source channel is already
// referential and is used as-is.
struct Derivation {
    std::string positive;
    std::string negative;
    Modality modality = Modality::EEG;
    bool recommended = false;

    std::string name() const { return positive + "-" + negative; }
};

enum class DerivationMode { aasm, atypical };

struct DerivationConfig {
    // AASM referential montages; each entry is (modality, positive, negative).
    std::vector<Derivation> recommended;
    // Derivations drawn per modality in atypical mode.
    int atypical_pairs_per_modality = 2;

    static DerivationConfig defaults();
};

// Plain-text config, one `MODALITY POS NEG` triple per line, '#' comments.
DerivationConfig parse_derivation_config(const std::string& text);

struct DerivedChannel {
    Derivation derivation;
    double sample_rate_hz = 0.0;
    std::vector<double> samples;
};

// Classify an electrode label (after stripping "EEG "/"EOG " prefixes and
// "-REF" suffixes) into EEG scalp electrode, mastoid reference, or EOG.
bool is_eeg_electrode(const std::string& label);
bool is_mastoid_electrode(const std::string& label);
bool is_eog_electrode(const std::string& label);
std::string canonical_electrode(const std::string& raw_label);

// Build EEG/EOG input channels for a recording. aasm mode emits every
// recommended pair whose electrodes are present; atypical mode draws random
// ordered pairs (EEG-EEG or EEG-mastoid for EEG; EOG-anything for EOG)
// uniformly without replacement. Throws IneligibleRecording when either
// modality ends up empty.
std::vector<DerivedChannel> build_derivations(const Recording& recording, DerivationMode mode,
                                              const DerivationConfig& config, Rng& rng);

}  // namespace usleep

#endif  // USLEEP_DERIVATION_HPP_
