#pragma once

#include <stdexcept>
#include <string>

namespace flowseq {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A precondition on an argument was violated (bad sizes, out-of-range values).
class InvalidInput : public Error {
public:
    using Error::Error;
};

/// The data is valid in shape but numerically unusable (zero scatter, singular covariance, rank too low).
class DegenerateData : public Error {
public:
    using Error::Error;
};

/// A persisted file failed to parse or violated an invariant on load.
class CorruptData : public Error {
public:
    using Error::Error;
};

/// A file could not be opened, read or written.
class IoError : public Error {
public:
    using Error::Error;
};

/// Building a dictionary from training data failed.
class BuildError : public Error {
public:
    using Error::Error;
};

/// Repetitions of one gesture could not be aligned into per-position clusters.
class AlignmentError : public BuildError {
public:
    using BuildError::BuildError;
};

} // namespace flowseq
