#ifndef QPHASE_ERROR_HPP
#define QPHASE_ERROR_HPP

#include <stdexcept>
#include <string>

namespace qphase {

/// Failure categories surfaced by the solvers. The CLI maps
/// InvalidInput to exit code 2 and everything else to exit code 3.
enum class ErrorKind {
    InvalidInput,
    NoClassicalRegion,
    MultiWellUnsupported,
    TooCloseToTurningPoint,
    ResolutionOverflow,
    StiffnessFailure,
    QlmDivergence,
    PositivityViolation,
    Unconverged,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

}  // namespace qphase

#endif  // QPHASE_ERROR_HPP
