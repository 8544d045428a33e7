#ifndef USLEEP_ERRORS_HPP_
#define USLEEP_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace usleep {

// Violation of an operation contract (bad shapes, out-of-range arguments,
// inconsistent configs). Maps to CLI exit code 2.
class ContractViolation : public std::invalid_argument {
public:
    explicit ContractViolation(const std::string& msg) : std::invalid_argument(msg) {}
};

// Malformed input data (EDF bytes, hypnogram text, manifests, checkpoints).
// Maps to CLI exit code 1.
class ParseError : public std::runtime_error {
public:
    explicit ParseError(const std::string& msg) : std::runtime_error(msg) {}
};

// Recording cannot enter the pipeline (no usable derivations, empty
// hypnogram, flat channels). Ingest reports it and moves on.
class IneligibleRecording : public std::runtime_error {
public:
    explicit IneligibleRecording(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace usleep

#endif  // USLEEP_ERRORS_HPP_
