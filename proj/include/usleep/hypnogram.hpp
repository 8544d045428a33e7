#ifndef USLEEP_HYPNOGRAM_HPP_
#define USLEEP_HYPNOGRAM_HPP_

#include <string>
#include <vector>

namespace usleep {

constexpr int kEpochSeconds = 30;
constexpr int kNumClasses = 5;   // W, N1, N2, N3, REM
constexpr int kMaskLabel = -1;   // loss / metric mask sentinel

enum class Stage { W, N1, N2, N3, N4, REM, Movement, Unknown };

const char* stage_token(Stage s);
Stage parse_stage_token(const std::string& token);  // throws ParseError

// Harmonized class index: N4 merges into N3; MOVEMENT/UNKNOWN are masked.
int stage_class_index(Stage s);

struct HypnogramEntry {
    double onset_s = 0.0;
    double duration_s = 0.0;
    Stage stage = Stage::Unknown;
};

struct Hypnogram {
    std::vector<HypnogramEntry> entries;

    bool empty() const { return entries.empty(); }
    double start_s() const;
    double end_s() const;  // last onset + duration
};

// Lines are `onset_s  duration_s  stage`, whitespace separated; `#` starts a
// comment. Entries must be chronological, non-overlapping, with durations
// that are multiples of the 30 s epoch.
Hypnogram parse_hypnogram(const std::string& text);
std::string format_hypnogram(const Hypnogram& h);

}  // namespace usleep

#endif  // USLEEP_HYPNOGRAM_HPP_
