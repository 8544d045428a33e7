#include "usleep/derivation.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

#include "usleep/errors.hpp"

namespace usleep {

namespace {

const std::set<std::string> kEegElectrodes = {
    "FP1", "FP2", "F3", "F4", "F7", "F8", "F9", "F10", "FZ", "C3", "C4", "CZ",
    "P3",  "P4",  "PZ", "O1", "O2", "OZ", "T3", "T4",  "T5", "T6", "T7", "T8"};

const std::set<std::string> kMastoids = {"M1", "M2", "A1", "A2"};

const std::set<std::string> kEogElectrodes = {"E1", "E2", "EOGL", "EOGR", "LOC", "ROC"};

std::string upper(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::toupper(c); });
    return s;
}

Modality parse_modality(const std::string& token, int line_no) {
    if (token == "EEG") return Modality::EEG;
    if (token == "EOG") return Modality::EOG;
    throw ParseError("derivation config line " + std::to_string(line_no) + ": unknown modality '" +
                     token + "'");
}

}  // namespace

std::string canonical_electrode(const std::string& raw_label) {
    std::string s = upper(raw_label);
    for (const char* prefix : {"EEG ", "EOG ", "EEG_", "EOG_"}) {
        if (s.rfind(prefix, 0) == 0) s = s.substr(4);
    }
    const auto dash = s.rfind("-REF");
    if (dash != std::string::npos && dash == s.size() - 4) s = s.substr(0, dash);
    // strip stray whitespace
    s.erase(std::remove(s.begin(), s.end(), ' '), s.end());
    return s;
}

bool is_eeg_electrode(const std::string& label) { return kEegElectrodes.count(canonical_electrode(label)) > 0; }
bool is_mastoid_electrode(const std::string& label) { return kMastoids.count(canonical_electrode(label)) > 0; }
bool is_eog_electrode(const std::string& label) { return kEogElectrodes.count(canonical_electrode(label)) > 0; }

DerivationConfig DerivationConfig::defaults() {
    DerivationConfig c;
    auto add = [&](Modality m, const char* pos, const char* neg) {
        c.recommended.push_back({pos, neg, m, true});
    };
    add(Modality::EEG, "F4", "M1");
    add(Modality::EEG, "C4", "M1");
    add(Modality::EEG, "O2", "M1");
    add(Modality::EEG, "F3", "M2");
    add(Modality::EEG, "C3", "M2");
    add(Modality::EEG, "O1", "M2");
    add(Modality::EOG, "E1", "M2");
    add(Modality::EOG, "E2", "M2");
    return c;
}

DerivationConfig parse_derivation_config(const std::string& text) {
    DerivationConfig c;
    c.recommended.clear();
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        std::istringstream ls(line);
        std::string modality, pos, neg;
        if (!(ls >> modality)) continue;
        if (!(ls >> pos >> neg)) {
            throw ParseError("derivation config line " + std::to_string(line_no) +
                             ": expected `MODALITY POS NEG`");
        }
        Derivation d;
        d.modality = parse_modality(upper(modality), line_no);
        d.positive = upper(pos);
        d.negative = upper(neg);
        d.recommended = true;
        if (d.positive == d.negative) {
            throw ParseError("derivation config line " + std::to_string(line_no) +
                             ": positive and negative electrodes are equal");
        }
        c.recommended.push_back(std::move(d));
    }
    if (c.recommended.empty()) throw ParseError("derivation config defines no derivations");
    return c;
}

namespace {

struct ElectrodeIndex {
    // canonical electrode name -> source channel
    std::map<std::string, const Channel*> eeg, mastoid, eog;
};

ElectrodeIndex index_electrodes(const Recording& rec) {
    ElectrodeIndex idx;
    for (const auto& ch : rec.channels) {
        const std::string name = canonical_electrode(ch.label);
        if (kEegElectrodes.count(name)) idx.eeg.emplace(name, &ch);
        else if (kMastoids.count(name)) idx.mastoid.emplace(name, &ch);
        else if (kEogElectrodes.count(name)) idx.eog.emplace(name, &ch);
        // anything else (EMG, ECG, ...) is not derivation material
    }
    return idx;
}

const Channel* find_in(const ElectrodeIndex& idx, const std::string& name) {
    for (const auto* m : {&idx.eeg, &idx.mastoid, &idx.eog}) {
        auto it = m->find(name);
        if (it != m->end()) return it->second;
    }
    return nullptr;
}

DerivedChannel derive(const Derivation& d, const Channel& pos, const Channel* neg) {
    if (neg) {
        require(pos.sample_rate_hz == neg->sample_rate_hz,
                "derivation " + d.name() + ": sample rate mismatch");
        require(pos.samples.size() == neg->samples.size(),
                "derivation " + d.name() + ": length mismatch");
    }
    DerivedChannel out;
    out.derivation = d;
    out.sample_rate_hz = pos.sample_rate_hz;
    out.samples = pos.samples;
    if (neg) {
        for (std::size_t i = 0; i < out.samples.size(); ++i) out.samples[i] -= neg->samples[i];
    }
    return out;
}

}  // namespace

std::vector<DerivedChannel> build_derivations(const Recording& recording, DerivationMode mode,
                                              const DerivationConfig& config, Rng& rng) {
    const ElectrodeIndex idx = index_electrodes(recording);
    std::vector<DerivedChannel> out;

    if (mode == DerivationMode::aasm) {
        for (const auto& d : config.recommended) {
            const Channel* pos = find_in(idx, d.positive);
            if (!pos) continue;
            const Channel* neg = nullptr;
            if (d.negative != "REF") {
                neg = find_in(idx, d.negative);
                if (!neg) continue;
            }
            out.push_back(derive(d, *pos, neg));
        }
    } else {
        // Ordered candidate pairs per modality, sampled without replacement.
        std::vector<Derivation> eeg_pairs, eog_pairs;
        for (const auto& [p, pch] : idx.eeg) {
            for (const auto& [n, nch] : idx.eeg) {
                if (p != n) eeg_pairs.push_back({p, n, Modality::EEG, false});
            }
            for (const auto& [n, nch] : idx.mastoid) {
                eeg_pairs.push_back({p, n, Modality::EEG, false});
            }
        }
        for (const auto& [p, pch] : idx.eog) {
            for (const auto* m : {&idx.eog, &idx.eeg, &idx.mastoid}) {
                for (const auto& [n, nch] : *m) {
                    if (p != n) eog_pairs.push_back({p, n, Modality::EOG, false});
                }
            }
        }
        auto draw = [&](std::vector<Derivation>& pool) {
            std::vector<Derivation> picked;
            std::shuffle(pool.begin(), pool.end(), rng);
            const auto want = static_cast<std::size_t>(config.atypical_pairs_per_modality);
            for (std::size_t i = 0; i < pool.size() && picked.size() < want; ++i) {
                picked.push_back(pool[i]);
            }
            return picked;
        };
        for (const auto& d : draw(eeg_pairs)) {
            out.push_back(derive(d, *find_in(idx, d.positive), find_in(idx, d.negative)));
        }
        for (const auto& d : draw(eog_pairs)) {
            out.push_back(derive(d, *find_in(idx, d.positive), find_in(idx, d.negative)));
        }
    }

    const bool has_eeg = std::any_of(out.begin(), out.end(), [](const DerivedChannel& c) {
        return c.derivation.modality == Modality::EEG;
    });
    const bool has_eog = std::any_of(out.begin(), out.end(), [](const DerivedChannel& c) {
        return c.derivation.modality == Modality::EOG;
    });
    if (!has_eeg || !has_eog) {
        throw IneligibleRecording(std::string("recording has no usable ") +
                                  (!has_eeg ? "EEG" : "EOG") + " derivation");
    }
    return out;
}

}  // namespace usleep
