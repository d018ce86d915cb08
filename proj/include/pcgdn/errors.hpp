#pragma once

#include <stdexcept>
#include <string>

namespace pcgdn {

// Base class for every error thrown by this library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// File could not be opened, read or written.
struct IoError : Error {
    using Error::Error;
};

// File exists but its contents are malformed (bad header, truncation).
struct FormatError : Error {
    using Error::Error;
};

// Well-formed input using a feature we deliberately do not handle
// (e.g. compressed WAV codecs).
struct UnsupportedError : Error {
    using Error::Error;
};

// Precondition violation on an operation's arguments.
struct DomainError : Error {
    using Error::Error;
};

// Invalid run configuration (missing noise category, bad ratios, ...).
struct ConfigError : Error {
    using Error::Error;
};

// Training failure (divergence, non-finite gradients).
struct TrainError : Error {
    using Error::Error;
};

// Checkpoint file mismatch or corruption.
struct CheckpointError : Error {
    using Error::Error;
};

} // namespace pcgdn
