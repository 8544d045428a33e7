#ifndef USLEEP_EDF_HPP_
#define USLEEP_EDF_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "usleep/hypnogram.hpp"

namespace usleep {

// One EDF signal with full header fidelity: the raw fixed-width header
// fields are kept verbatim so write_edf(parse_edf(x)) == x byte for byte.
struct EdfSignal {
    std::string label;        // 16 chars
    std::string transducer;   // 80
    std::string phys_dim;     // 8
    std::string phys_min_raw; // 8
    std::string phys_max_raw; // 8
    std::string dig_min_raw;  // 8
    std::string dig_max_raw;  // 8
    std::string prefilter;    // 80
    std::string samples_raw;  // 8
    std::string reserved;     // 32

    double phys_min = 0.0, phys_max = 0.0;
    int dig_min = 0, dig_max = 0;
    std::int64_t samples_per_record = 0;

    std::vector<std::int16_t> digital;  // all records concatenated

    std::string trimmed_label() const;
    double gain() const { return (phys_max - phys_min) / static_cast<double>(dig_max - dig_min); }
    double to_physical(std::int16_t d) const {
        return (static_cast<double>(d) - dig_min) * gain() + phys_min;
    }
    std::int16_t to_digital(double phys) const;
};

struct EdfFile {
    std::string version;       // 8 chars
    std::string patient_id;    // 80
    std::string recording_id;  // 80
    std::string start_date;    // 8, dd.mm.yy
    std::string start_time;    // 8, hh.mm.ss
    std::string header_bytes_raw;  // 8
    std::string reserved;      // 44
    std::string n_records_raw; // 8
    std::string record_duration_raw;  // 8
    std::string n_signals_raw; // 4

    std::int64_t n_records = 0;
    double record_duration_s = 0.0;
    std::vector<EdfSignal> signals;

    double duration_s() const { return static_cast<double>(n_records) * record_duration_s; }
};

EdfFile parse_edf(const std::vector<std::uint8_t>& bytes);
std::vector<std::uint8_t> write_edf(const EdfFile& edf);

EdfFile read_edf_file(const std::string& path);
void write_edf_file(const EdfFile& edf, const std::string& path);

// Convenience constructor for synthesizing EDFs: formats all raw header
// fields from the given values and converts physical samples to digital.
struct EdfChannelSpec {
    std::string label;
    double sample_rate_hz = 128.0;
    std::vector<double> samples;
    double phys_min = -8.0, phys_max = 8.0;
};
EdfFile make_edf(const std::vector<EdfChannelSpec>& channels, double record_duration_s = 1.0,
                 const std::string& patient_id = "X", const std::string& recording_id = "X");

// ---------------------------------------------------------------------------
// Internal recording representation

struct SubjectMeta {
    std::string subject_id;
    std::optional<std::string> family_id;
    std::optional<double> age_years;
    std::optional<std::string> sex;
};

struct Channel {
    std::string label;
    double sample_rate_hz = 0.0;
    std::vector<double> samples;
};

struct Recording {
    std::vector<Channel> channels;
    Hypnogram hypnogram;
    SubjectMeta subject;
    std::string dataset_id;

    const Channel* find_channel(const std::string& label) const;
    double duration_s() const;
};

Recording to_recording(const EdfFile& edf, const std::string& dataset_id = "",
                       const SubjectMeta& subject = {});

}  // namespace usleep

#endif  // USLEEP_EDF_HPP_
