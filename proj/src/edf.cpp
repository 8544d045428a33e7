#include "usleep/edf.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include "usleep/errors.hpp"

namespace usleep {

namespace {

std::string rtrim(const std::string& s) {
    auto end = s.find_last_not_of(' ');
    return end == std::string::npos ? std::string() : s.substr(0, end + 1);
}

// Fixed-width ASCII field, space padded, truncating when too long.
std::string fit(const std::string& s, std::size_t width) {
    std::string out = s.substr(0, width);
    out.resize(width, ' ');
    return out;
}

std::string fit_number(double v, std::size_t width) {
    std::ostringstream os;
    os << v;
    std::string s = os.str();
    if (s.size() > width) {
        os.str("");
        os.precision(static_cast<int>(width) - 2);
        os << v;
        s = os.str().substr(0, width);
    }
    return fit(s, width);
}

class FieldReader {
public:
    FieldReader(const std::vector<std::uint8_t>& bytes) : bytes_(bytes) {}

    std::string take(std::size_t width, const char* what) {
        if (pos_ + width > bytes_.size()) {
            throw ParseError("EDF truncated at byte offset " + std::to_string(pos_) +
                             " while reading " + what);
        }
        std::string s(reinterpret_cast<const char*>(bytes_.data()) + pos_, width);
        for (std::size_t i = 0; i < s.size(); ++i) {
            const unsigned char c = static_cast<unsigned char>(s[i]);
            if (c < 32 || c > 126) {
                throw ParseError("EDF non-ASCII header byte at offset " + std::to_string(pos_ + i) +
                                 " in " + what);
            }
        }
        pos_ += width;
        return s;
    }

    std::size_t pos() const { return pos_; }

private:
    const std::vector<std::uint8_t>& bytes_;
    std::size_t pos_ = 0;
};

double parse_num(const std::string& raw, const char* what, std::size_t offset) {
    try {
        std::size_t used = 0;
        const std::string t = rtrim(raw);
        const double v = std::stod(t, &used);
        if (used != t.size()) throw std::invalid_argument(t);
        return v;
    } catch (const std::exception&) {
        throw ParseError(std::string("EDF bad numeric field for ") + what + " at byte offset " +
                         std::to_string(offset) + ": '" + rtrim(raw) + "'");
    }
}

}  // namespace

std::string EdfSignal::trimmed_label() const { return rtrim(label); }

std::int16_t EdfSignal::to_digital(double phys) const {
    const double d = std::round((phys - phys_min) / gain()) + static_cast<double>(dig_min);
    const double clamped = std::clamp(d, static_cast<double>(dig_min), static_cast<double>(dig_max));
    return static_cast<std::int16_t>(clamped);
}

EdfFile parse_edf(const std::vector<std::uint8_t>& bytes) {
    FieldReader r(bytes);
    EdfFile edf;
    edf.version = r.take(8, "version");
    edf.patient_id = r.take(80, "patient id");
    edf.recording_id = r.take(80, "recording id");
    edf.start_date = r.take(8, "start date");
    edf.start_time = r.take(8, "start time");
    edf.header_bytes_raw = r.take(8, "header size");
    edf.reserved = r.take(44, "reserved");
    edf.n_records_raw = r.take(8, "record count");
    edf.record_duration_raw = r.take(8, "record duration");
    edf.n_signals_raw = r.take(4, "signal count");

    edf.n_records = static_cast<std::int64_t>(parse_num(edf.n_records_raw, "record count", 236));
    edf.record_duration_s = parse_num(edf.record_duration_raw, "record duration", 244);
    const auto n_signals = static_cast<std::int64_t>(parse_num(edf.n_signals_raw, "signal count", 252));
    if (edf.n_records < 0) throw ParseError("EDF record count is negative (streaming files unsupported)");
    if (n_signals <= 0) throw ParseError("EDF signal count must be positive");
    if (edf.record_duration_s <= 0.0) throw ParseError("EDF record duration must be positive");

    const std::int64_t expected_header = 256 + 256 * n_signals;
    const auto header_bytes = static_cast<std::int64_t>(parse_num(edf.header_bytes_raw, "header size", 184));
    if (header_bytes != expected_header) {
        throw ParseError("EDF header size field " + std::to_string(header_bytes) +
                         " does not match 256 + 256*ns = " + std::to_string(expected_header));
    }

    edf.signals.resize(static_cast<std::size_t>(n_signals));
    auto per_signal = [&](const char* what, std::size_t width, auto setter) {
        for (auto& sig : edf.signals) setter(sig, r.take(width, what));
    };
    per_signal("label", 16, [](EdfSignal& s, std::string v) { s.label = std::move(v); });
    per_signal("transducer", 80, [](EdfSignal& s, std::string v) { s.transducer = std::move(v); });
    per_signal("physical dimension", 8, [](EdfSignal& s, std::string v) { s.phys_dim = std::move(v); });
    per_signal("physical min", 8, [](EdfSignal& s, std::string v) { s.phys_min_raw = std::move(v); });
    per_signal("physical max", 8, [](EdfSignal& s, std::string v) { s.phys_max_raw = std::move(v); });
    per_signal("digital min", 8, [](EdfSignal& s, std::string v) { s.dig_min_raw = std::move(v); });
    per_signal("digital max", 8, [](EdfSignal& s, std::string v) { s.dig_max_raw = std::move(v); });
    per_signal("prefiltering", 80, [](EdfSignal& s, std::string v) { s.prefilter = std::move(v); });
    per_signal("samples per record", 8, [](EdfSignal& s, std::string v) { s.samples_raw = std::move(v); });
    per_signal("signal reserved", 32, [](EdfSignal& s, std::string v) { s.reserved = std::move(v); });

    for (auto& sig : edf.signals) {
        sig.phys_min = parse_num(sig.phys_min_raw, "physical min", r.pos());
        sig.phys_max = parse_num(sig.phys_max_raw, "physical max", r.pos());
        sig.dig_min = static_cast<int>(parse_num(sig.dig_min_raw, "digital min", r.pos()));
        sig.dig_max = static_cast<int>(parse_num(sig.dig_max_raw, "digital max", r.pos()));
        sig.samples_per_record = static_cast<std::int64_t>(parse_num(sig.samples_raw, "samples per record", r.pos()));
        if (sig.dig_max <= sig.dig_min) {
            throw ParseError("EDF signal '" + sig.trimmed_label() +
                             "': digital max must exceed digital min");
        }
        if (sig.samples_per_record <= 0) {
            throw ParseError("EDF signal '" + sig.trimmed_label() + "': bad samples per record");
        }
        sig.digital.reserve(static_cast<std::size_t>(sig.samples_per_record * edf.n_records));
    }

    std::size_t pos = r.pos();
    for (std::int64_t rec = 0; rec < edf.n_records; ++rec) {
        for (auto& sig : edf.signals) {
            const std::size_t need = static_cast<std::size_t>(sig.samples_per_record) * 2;
            if (pos + need > bytes.size()) {
                throw ParseError("EDF truncated at byte offset " + std::to_string(pos) +
                                 " in data record " + std::to_string(rec));
            }
            for (std::int64_t i = 0; i < sig.samples_per_record; ++i) {
                const auto lo = static_cast<std::uint16_t>(bytes[pos + 2 * i]);
                const auto hi = static_cast<std::uint16_t>(bytes[pos + 2 * i + 1]);
                sig.digital.push_back(static_cast<std::int16_t>(lo | (hi << 8)));
            }
            pos += need;
        }
    }
    return edf;
}

std::vector<std::uint8_t> write_edf(const EdfFile& edf) {
    std::string header;
    header += fit(edf.version, 8);
    header += fit(edf.patient_id, 80);
    header += fit(edf.recording_id, 80);
    header += fit(edf.start_date, 8);
    header += fit(edf.start_time, 8);
    header += fit(edf.header_bytes_raw, 8);
    header += fit(edf.reserved, 44);
    header += fit(edf.n_records_raw, 8);
    header += fit(edf.record_duration_raw, 8);
    header += fit(edf.n_signals_raw, 4);

    auto field = [&](auto getter, std::size_t width) {
        for (const auto& sig : edf.signals) header += fit(getter(sig), width);
    };
    field([](const EdfSignal& s) { return s.label; }, 16);
    field([](const EdfSignal& s) { return s.transducer; }, 80);
    field([](const EdfSignal& s) { return s.phys_dim; }, 8);
    field([](const EdfSignal& s) { return s.phys_min_raw; }, 8);
    field([](const EdfSignal& s) { return s.phys_max_raw; }, 8);
    field([](const EdfSignal& s) { return s.dig_min_raw; }, 8);
    field([](const EdfSignal& s) { return s.dig_max_raw; }, 8);
    field([](const EdfSignal& s) { return s.prefilter; }, 80);
    field([](const EdfSignal& s) { return s.samples_raw; }, 8);
    field([](const EdfSignal& s) { return s.reserved; }, 32);

    std::vector<std::uint8_t> out(header.begin(), header.end());
    for (std::int64_t rec = 0; rec < edf.n_records; ++rec) {
        for (const auto& sig : edf.signals) {
            for (std::int64_t i = 0; i < sig.samples_per_record; ++i) {
                const auto idx = static_cast<std::size_t>(rec * sig.samples_per_record + i);
                const auto v = static_cast<std::uint16_t>(sig.digital[idx]);
                out.push_back(static_cast<std::uint8_t>(v & 0xff));
                out.push_back(static_cast<std::uint8_t>(v >> 8));
            }
        }
    }
    return out;
}

EdfFile read_edf_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open EDF file: " + path);
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                    std::istreambuf_iterator<char>());
    return parse_edf(bytes);
}

void write_edf_file(const EdfFile& edf, const std::string& path) {
    const auto bytes = write_edf(edf);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError("cannot write EDF file: " + path);
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

EdfFile make_edf(const std::vector<EdfChannelSpec>& channels, double record_duration_s,
                 const std::string& patient_id, const std::string& recording_id) {
    require(!channels.empty(), "make_edf: no channels");
    EdfFile edf;
    edf.version = fit("0", 8);
    edf.patient_id = fit(patient_id, 80);
    edf.recording_id = fit(recording_id, 80);
    edf.start_date = "01.01.20";
    edf.start_time = "00.00.00";
    edf.reserved = fit("", 44);
    edf.record_duration_s = record_duration_s;
    edf.record_duration_raw = fit_number(record_duration_s, 8);
    edf.n_signals_raw = fit(std::to_string(channels.size()), 4);
    edf.header_bytes_raw = fit(std::to_string(256 + 256 * channels.size()), 8);

    // All channels must cover the same duration.
    std::int64_t n_records = -1;
    for (const auto& ch : channels) {
        const double exact = ch.sample_rate_hz * record_duration_s;
        const auto per_rec = static_cast<std::int64_t>(std::llround(exact));
        require(std::abs(exact - static_cast<double>(per_rec)) < 1e-9,
                "make_edf: sample rate must yield integer samples per record");
        require(ch.samples.size() % static_cast<std::size_t>(per_rec) == 0,
                "make_edf: channel '" + ch.label + "' length not a whole number of records");
        const auto recs = static_cast<std::int64_t>(ch.samples.size()) / per_rec;
        require(n_records < 0 || recs == n_records, "make_edf: channels disagree on duration");
        n_records = recs;
    }
    edf.n_records = n_records;
    edf.n_records_raw = fit(std::to_string(n_records), 8);

    for (const auto& ch : channels) {
        EdfSignal sig;
        sig.label = fit(ch.label, 16);
        sig.transducer = fit("", 80);
        sig.phys_dim = fit("uV", 8);
        sig.phys_min = ch.phys_min;
        sig.phys_max = ch.phys_max;
        sig.dig_min = -32768;
        sig.dig_max = 32767;
        sig.phys_min_raw = fit_number(ch.phys_min, 8);
        sig.phys_max_raw = fit_number(ch.phys_max, 8);
        sig.dig_min_raw = fit("-32768", 8);
        sig.dig_max_raw = fit("32767", 8);
        sig.prefilter = fit("", 80);
        sig.samples_per_record = static_cast<std::int64_t>(std::llround(ch.sample_rate_hz * record_duration_s));
        sig.samples_raw = fit(std::to_string(sig.samples_per_record), 8);
        sig.reserved = fit("", 32);
        sig.digital.reserve(ch.samples.size());
        for (double v : ch.samples) sig.digital.push_back(sig.to_digital(v));
        edf.signals.push_back(std::move(sig));
    }
    return edf;
}

const Channel* Recording::find_channel(const std::string& label) const {
    for (const auto& ch : channels) {
        if (ch.label == label) return &ch;
    }
    return nullptr;
}

double Recording::duration_s() const {
    if (channels.empty()) return 0.0;
    return static_cast<double>(channels.front().samples.size()) / channels.front().sample_rate_hz;
}

Recording to_recording(const EdfFile& edf, const std::string& dataset_id,
                       const SubjectMeta& subject) {
    Recording rec;
    rec.dataset_id = dataset_id;
    rec.subject = subject;
    for (const auto& sig : edf.signals) {
        Channel ch;
        ch.label = sig.trimmed_label();
        ch.sample_rate_hz = static_cast<double>(sig.samples_per_record) / edf.record_duration_s;
        ch.samples.reserve(sig.digital.size());
        for (auto d : sig.digital) ch.samples.push_back(sig.to_physical(d));
        for (const auto& existing : rec.channels) {
            if (existing.label == ch.label) {
                throw ParseError("EDF has duplicate channel label '" + ch.label + "'");
            }
        }
        rec.channels.push_back(std::move(ch));
    }
    return rec;
}

}  // namespace usleep
