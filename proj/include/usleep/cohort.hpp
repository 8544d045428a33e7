#ifndef USLEEP_COHORT_HPP_
#define USLEEP_COHORT_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "usleep/tensor.hpp"

namespace usleep {

enum class Split { unassigned, train, val, test };

const char* split_token(Split s);
Split parse_split_token(const std::string& token);

struct ManifestEntry {
    std::string path;  // recording store directory
    std::string recording_id;
    std::string subject_id;
    std::optional<std::string> family_id;
    std::optional<double> age_years;
    std::optional<std::string> sex;
    Split split = Split::unassigned;
};

struct DatasetManifest {
    std::string dataset_id;
    std::vector<ManifestEntry> recordings;
    std::optional<std::uint64_t> split_seed;

    std::int64_t subject_count() const;
    std::vector<const ManifestEntry*> in_split(Split s) const;
};

DatasetManifest load_manifest(const std::string& path);
void save_manifest(const DatasetManifest& manifest, const std::string& path);

// Subject-level (family-level when family ids exist) random assignment:
// val = min(floor(10% of subjects), 50), test = min(floor(15%), 100),
// remainder train. Deterministic under the seed, recorded in the manifest.
void split_manifest(DatasetManifest& manifest, std::uint64_t seed);

// Age partitioning for conditioned training. G must be 1, 2 or 7.
struct AgeGroupScheme {
    int groups = 1;

    static AgeGroupScheme of(int g);
    std::string group_name(int index) const;
};

// Boundaries (inclusive, integer years): B 0-3, C 4-12, A 13-18, YA 19-39,
// MA 40-59, E 60-69, OE >= 70; G=2 coarsens to {B,C} vs the rest.
int age_group(double age_years, const AgeGroupScheme& scheme);

// Group index of a manifest entry; throws when age is required but missing.
int entry_group(const ManifestEntry& e, const AgeGroupScheme& scheme);

}  // namespace usleep

#endif  // USLEEP_COHORT_HPP_
