#include "usleep/hypnogram.hpp"

#include <cmath>
#include <sstream>

#include "usleep/errors.hpp"

namespace usleep {

const char* stage_token(Stage s) {
    switch (s) {
        case Stage::W: return "W";
        case Stage::N1: return "N1";
        case Stage::N2: return "N2";
        case Stage::N3: return "N3";
        case Stage::N4: return "N4";
        case Stage::REM: return "REM";
        case Stage::Movement: return "MOVEMENT";
        case Stage::Unknown: return "UNKNOWN";
    }
    return "UNKNOWN";
}

Stage parse_stage_token(const std::string& token) {
    if (token == "W") return Stage::W;
    if (token == "N1") return Stage::N1;
    if (token == "N2") return Stage::N2;
    if (token == "N3") return Stage::N3;
    if (token == "N4") return Stage::N4;
    if (token == "REM") return Stage::REM;
    if (token == "MOVEMENT") return Stage::Movement;
    if (token == "UNKNOWN") return Stage::Unknown;
    throw ParseError("unknown stage token '" + token + "'");
}

int stage_class_index(Stage s) {
    switch (s) {
        case Stage::W: return 0;
        case Stage::N1: return 1;
        case Stage::N2: return 2;
        case Stage::N3: return 3;
        case Stage::N4: return 3;
        case Stage::REM: return 4;
        case Stage::Movement:
        case Stage::Unknown: return kMaskLabel;
    }
    return kMaskLabel;
}

double Hypnogram::start_s() const {
    if (entries.empty()) throw ContractViolation("hypnogram is empty");
    return entries.front().onset_s;
}

double Hypnogram::end_s() const {
    if (entries.empty()) throw ContractViolation("hypnogram is empty");
    return entries.back().onset_s + entries.back().duration_s;
}

Hypnogram parse_hypnogram(const std::string& text) {
    Hypnogram h;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        std::istringstream ls(line);
        double onset, duration;
        std::string token;
        if (!(ls >> onset)) {
            // blank or comment-only line
            std::istringstream probe(line);
            std::string rest;
            if (probe >> rest) {
                throw ParseError("hypnogram line " + std::to_string(line_no) + ": expected onset");
            }
            continue;
        }
        if (!(ls >> duration >> token)) {
            throw ParseError("hypnogram line " + std::to_string(line_no) +
                             ": expected `onset duration stage`");
        }
        std::string extra;
        if (ls >> extra) {
            throw ParseError("hypnogram line " + std::to_string(line_no) + ": trailing content '" +
                             extra + "'");
        }
        HypnogramEntry e;
        e.onset_s = onset;
        e.duration_s = duration;
        try {
            e.stage = parse_stage_token(token);
        } catch (const ParseError& err) {
            throw ParseError("hypnogram line " + std::to_string(line_no) + ": " + err.what());
        }
        if (duration <= 0.0 || std::fmod(duration, static_cast<double>(kEpochSeconds)) != 0.0) {
            throw ParseError("hypnogram line " + std::to_string(line_no) + ": duration " +
                             std::to_string(duration) + " is not a positive multiple of 30 s");
        }
        if (!h.entries.empty()) {
            const auto& prev = h.entries.back();
            if (e.onset_s < prev.onset_s + prev.duration_s) {
                throw ParseError("hypnogram line " + std::to_string(line_no) +
                                 ": entry overlaps or precedes the previous entry");
            }
        }
        h.entries.push_back(e);
    }
    return h;
}

std::string format_hypnogram(const Hypnogram& h) {
    std::ostringstream os;
    for (const auto& e : h.entries) {
        os << e.onset_s << '\t' << e.duration_s << '\t' << stage_token(e.stage) << '\n';
    }
    return os.str();
}

}  // namespace usleep
