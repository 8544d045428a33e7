#include "usleep/store.hpp"

#include <filesystem>
#include <fstream>

#include "json.hpp"
#include "usleep/errors.hpp"

namespace usleep {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string sanitize(const std::string& s) {
    std::string out;
    for (char c : s) out.push_back(std::isalnum(static_cast<unsigned char>(c)) || c == '-' ? c : '_');
    return out;
}

std::string channel_file(const PreprocessedChannel& ch) {
    const char* mod = ch.derivation.modality == Modality::EEG ? "EEG" : "EOG";
    return std::string(mod) + "_" + sanitize(ch.derivation.name()) + ".f32";
}

}  // namespace

std::string class_token(int class_index) {
    switch (class_index) {
        case 0: return "W";
        case 1: return "N1";
        case 2: return "N2";
        case 3: return "N3";
        case 4: return "REM";
        case kMaskLabel: return "MASK";
    }
    throw ContractViolation("class_token: bad class index " + std::to_string(class_index));
}

int parse_class_token(const std::string& token) {
    if (token == "W") return 0;
    if (token == "N1") return 1;
    if (token == "N2") return 2;
    if (token == "N3") return 3;
    if (token == "REM") return 4;
    if (token == "MASK") return kMaskLabel;
    throw ParseError("labels.txt: unknown class token '" + token + "'");
}

void write_recording_store(const PreprocessedRecording& rec, const std::string& dir) {
    fs::create_directories(dir);

    json manifest;
    manifest["recording_id"] = rec.recording_id;
    manifest["dataset_id"] = rec.dataset_id;
    manifest["subject_id"] = rec.subject.subject_id;
    if (rec.subject.family_id) manifest["family_id"] = *rec.subject.family_id;
    if (rec.subject.age_years) manifest["age_years"] = *rec.subject.age_years;
    if (rec.subject.sex) manifest["sex"] = *rec.subject.sex;
    manifest["rate_hz"] = kTargetRateHz;

    json channels = json::array();
    for (const auto& ch : rec.channels) {
        json c;
        c["file"] = channel_file(ch);
        c["modality"] = ch.derivation.modality == Modality::EEG ? "EEG" : "EOG";
        c["positive"] = ch.derivation.positive;
        c["negative"] = ch.derivation.negative;
        c["recommended"] = ch.derivation.recommended;
        c["usable"] = ch.usable;
        c["original_rate_hz"] = ch.original_rate_hz;
        c["scale_median"] = ch.scale_median;
        c["scale_iqr"] = ch.scale_iqr;
        c["n_samples"] = ch.samples.size();
        channels.push_back(std::move(c));
    }
    manifest["channels"] = std::move(channels);

    {
        std::ofstream out(fs::path(dir) / "manifest.json");
        if (!out) throw ParseError("cannot write " + dir + "/manifest.json");
        out << manifest.dump(2) << '\n';
    }
    for (const auto& ch : rec.channels) {
        std::ofstream out(fs::path(dir) / channel_file(ch), std::ios::binary);
        if (!out) throw ParseError("cannot write channel file in " + dir);
        static_assert(sizeof(float) == 4);
        out.write(reinterpret_cast<const char*>(ch.samples.data()),
                  static_cast<std::streamsize>(ch.samples.size() * sizeof(float)));
    }
    {
        std::ofstream out(fs::path(dir) / "labels.txt");
        if (!out) throw ParseError("cannot write " + dir + "/labels.txt");
        for (int label : rec.epoch_labels) out << class_token(label) << '\n';
    }
}

PreprocessedRecording read_recording_store(const std::string& dir) {
    std::ifstream min(fs::path(dir) / "manifest.json");
    if (!min) throw ParseError("cannot open " + dir + "/manifest.json");
    json manifest;
    try {
        min >> manifest;
    } catch (const json::exception& e) {
        throw ParseError(dir + "/manifest.json: " + e.what());
    }

    PreprocessedRecording rec;
    rec.recording_id = manifest.at("recording_id").get<std::string>();
    rec.dataset_id = manifest.value("dataset_id", "");
    rec.subject.subject_id = manifest.value("subject_id", rec.recording_id);
    if (manifest.contains("family_id")) rec.subject.family_id = manifest["family_id"].get<std::string>();
    if (manifest.contains("age_years")) rec.subject.age_years = manifest["age_years"].get<double>();
    if (manifest.contains("sex")) rec.subject.sex = manifest["sex"].get<std::string>();

    for (const auto& c : manifest.at("channels")) {
        PreprocessedChannel ch;
        ch.derivation.positive = c.at("positive").get<std::string>();
        ch.derivation.negative = c.at("negative").get<std::string>();
        ch.derivation.modality = c.at("modality").get<std::string>() == "EEG" ? Modality::EEG : Modality::EOG;
        ch.derivation.recommended = c.value("recommended", false);
        ch.usable = c.value("usable", true);
        ch.original_rate_hz = c.value("original_rate_hz", kTargetRateHz);
        ch.scale_median = c.value("scale_median", 0.0);
        ch.scale_iqr = c.value("scale_iqr", 1.0);

        const auto file = fs::path(dir) / c.at("file").get<std::string>();
        std::ifstream in(file, std::ios::binary);
        if (!in) throw ParseError("cannot open channel file " + file.string());
        const auto n = c.at("n_samples").get<std::size_t>();
        ch.samples.resize(n);
        in.read(reinterpret_cast<char*>(ch.samples.data()),
                static_cast<std::streamsize>(n * sizeof(float)));
        if (static_cast<std::size_t>(in.gcount()) != n * sizeof(float)) {
            throw ParseError("channel file " + file.string() + " is truncated");
        }
        rec.channels.push_back(std::move(ch));
    }

    std::ifstream lin(fs::path(dir) / "labels.txt");
    if (!lin) throw ParseError("cannot open " + dir + "/labels.txt");
    std::string token;
    while (lin >> token) rec.epoch_labels.push_back(parse_class_token(token));
    return rec;
}

}  // namespace usleep
