#include "usleep/cohort.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>

#include "json.hpp"
#include "usleep/errors.hpp"

namespace usleep {

using nlohmann::json;

const char* split_token(Split s) {
    switch (s) {
        case Split::train: return "train";
        case Split::val: return "val";
        case Split::test: return "test";
        case Split::unassigned: return "unassigned";
    }
    return "unassigned";
}

Split parse_split_token(const std::string& token) {
    if (token == "train") return Split::train;
    if (token == "val") return Split::val;
    if (token == "test") return Split::test;
    if (token == "unassigned") return Split::unassigned;
    throw ParseError("manifest: unknown split token '" + token + "'");
}

std::int64_t DatasetManifest::subject_count() const {
    std::set<std::string> subjects;
    for (const auto& r : recordings) subjects.insert(r.subject_id);
    return static_cast<std::int64_t>(subjects.size());
}

std::vector<const ManifestEntry*> DatasetManifest::in_split(Split s) const {
    std::vector<const ManifestEntry*> out;
    for (const auto& r : recordings) {
        if (r.split == s) out.push_back(&r);
    }
    return out;
}

DatasetManifest load_manifest(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open manifest: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ParseError(path + ": " + e.what());
    }
    DatasetManifest m;
    m.dataset_id = j.at("dataset_id").get<std::string>();
    if (j.contains("split_seed")) m.split_seed = j["split_seed"].get<std::uint64_t>();
    for (const auto& r : j.at("recordings")) {
        ManifestEntry e;
        e.path = r.at("path").get<std::string>();
        e.recording_id = r.at("recording_id").get<std::string>();
        e.subject_id = r.value("subject_id", e.recording_id);
        if (r.contains("family_id")) e.family_id = r["family_id"].get<std::string>();
        if (r.contains("age_years")) e.age_years = r["age_years"].get<double>();
        if (r.contains("sex")) e.sex = r["sex"].get<std::string>();
        e.split = parse_split_token(r.value("split", "unassigned"));
        m.recordings.push_back(std::move(e));
    }
    return m;
}

void save_manifest(const DatasetManifest& manifest, const std::string& path) {
    json j;
    j["dataset_id"] = manifest.dataset_id;
    if (manifest.split_seed) j["split_seed"] = *manifest.split_seed;
    json recs = json::array();
    for (const auto& e : manifest.recordings) {
        json r;
        r["path"] = e.path;
        r["recording_id"] = e.recording_id;
        r["subject_id"] = e.subject_id;
        if (e.family_id) r["family_id"] = *e.family_id;
        if (e.age_years) r["age_years"] = *e.age_years;
        if (e.sex) r["sex"] = *e.sex;
        r["split"] = split_token(e.split);
        recs.push_back(std::move(r));
    }
    j["recordings"] = std::move(recs);
    std::ofstream out(path);
    if (!out) throw ParseError("cannot write manifest: " + path);
    out << j.dump(2) << '\n';
}

void split_manifest(DatasetManifest& manifest, std::uint64_t seed) {
    // Unit of assignment: family when present, otherwise the subject.
    std::map<std::string, std::set<std::string>> unit_subjects;
    for (const auto& r : manifest.recordings) {
        const std::string unit = r.family_id ? "f:" + *r.family_id : "s:" + r.subject_id;
        unit_subjects[unit].insert(r.subject_id);
    }
    const std::int64_t n_subjects = manifest.subject_count();
    if (n_subjects < 3) {
        throw ContractViolation("split requires at least 3 subjects, got " +
                                std::to_string(n_subjects));
    }

    const auto val_target = std::min<std::int64_t>(n_subjects / 10, 50);
    const auto test_target = std::min<std::int64_t>(n_subjects * 15 / 100, 100);

    std::vector<std::string> units;
    units.reserve(unit_subjects.size());
    for (const auto& [unit, subjects] : unit_subjects) units.push_back(unit);
    Rng rng(seed);
    std::shuffle(units.begin(), units.end(), rng);

    std::map<std::string, Split> unit_split;
    std::int64_t val_n = 0, test_n = 0;
    for (const auto& unit : units) {
        const auto size = static_cast<std::int64_t>(unit_subjects[unit].size());
        if (val_n < val_target) {
            unit_split[unit] = Split::val;
            val_n += size;
        } else if (test_n < test_target) {
            unit_split[unit] = Split::test;
            test_n += size;
        } else {
            unit_split[unit] = Split::train;
        }
    }
    for (auto& r : manifest.recordings) {
        const std::string unit = r.family_id ? "f:" + *r.family_id : "s:" + r.subject_id;
        r.split = unit_split.at(unit);
    }
    manifest.split_seed = seed;
}

AgeGroupScheme AgeGroupScheme::of(int g) {
    if (g != 1 && g != 2 && g != 7) {
        throw ContractViolation("age group scheme must have G in {1,2,7}, got " + std::to_string(g));
    }
    return AgeGroupScheme{g};
}

std::string AgeGroupScheme::group_name(int index) const {
    static const char* kSeven[] = {"B", "C", "A", "YA", "MA", "E", "OE"};
    if (groups == 7 && index >= 0 && index < 7) return kSeven[index];
    if (groups == 2 && index == 0) return "B+C";
    if (groups == 2 && index == 1) return "A+";
    if (groups == 1 && index == 0) return "all";
    return "g" + std::to_string(index);
}

int age_group(double age_years, const AgeGroupScheme& scheme) {
    require(age_years >= 0.0, "age_group: negative age " + std::to_string(age_years));
    if (scheme.groups == 1) return 0;
    if (scheme.groups == 2) return age_years < 13.0 ? 0 : 1;
    if (age_years < 4.0) return 0;   // B: 0-3
    if (age_years < 13.0) return 1;  // C: 4-12
    if (age_years < 19.0) return 2;  // A: 13-18
    if (age_years < 40.0) return 3;  // YA: 19-39
    if (age_years < 60.0) return 4;  // MA: 40-59
    if (age_years < 70.0) return 5;  // E: 60-69
    return 6;                        // OE: >= 70
}

int entry_group(const ManifestEntry& e, const AgeGroupScheme& scheme) {
    if (scheme.groups == 1) return 0;
    if (!e.age_years) {
        throw ContractViolation("recording '" + e.recording_id +
                                "' has no age; required for G=" + std::to_string(scheme.groups));
    }
    return age_group(*e.age_years, scheme);
}

}  // namespace usleep
