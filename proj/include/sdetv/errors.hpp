#pragma once

#include <stdexcept>
#include <string>

namespace sdetv {

// Error taxonomy mirrored by the CLI exit codes: config errors exit with 2,
// precondition violations with 3, numerical failures with 4.

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct PreconditionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SolverError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace sdetv
