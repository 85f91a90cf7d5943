#pragma once

#include <stdexcept>
#include <string>

namespace hazemix {

/// Bad arguments or data that violate a documented precondition.
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// File system failure: missing, unreadable or unwritable paths.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The file exists but is not a PNG or JPEG stream.
class FormatError : public IoError {
public:
    using IoError::IoError;
};

/// The stream claims a supported format but fails to decode.
class CorruptDataError : public IoError {
public:
    using IoError::IoError;
};

}  // namespace hazemix
