#pragma once

#include <stdexcept>
#include <string>

namespace anomgait {

// File-format and model-contract errors. Each failure mode named by the
// container contracts gets its own type so callers (and tests) can tell
// them apart.

struct io_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct bad_magic_error : io_error {
    using io_error::io_error;
};

struct truncated_error : io_error {
    using io_error::io_error;
};

struct length_mismatch_error : io_error {
    using io_error::io_error;
};

struct version_error : io_error {
    using io_error::io_error;
};

struct shape_mismatch_error : io_error {
    using io_error::io_error;
};

// Raised when a tensor fed to the model does not match the architecture.
struct dim_mismatch_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Training aborts.
struct one_class_violation_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct nan_abort_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace anomgait
