#pragma once

#include <stdexcept>
#include <string>

namespace pyrtex {

/// Base class for all toolkit errors.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A file could not be opened, read, or written.
class IoError : public Error {
public:
    using Error::Error;
};

/// The file exists but is not a format this toolkit reads or writes.
class UnsupportedFormatError : public Error {
public:
    using Error::Error;
};

/// The file claims to be a supported format but its header or payload is broken.
class CorruptFileError : public Error {
public:
    using Error::Error;
};

/// Image or vector shapes do not line up.
class DimensionError : public Error {
public:
    using Error::Error;
};

/// A configuration value or combination is invalid.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// An external subprocess hook failed (bad exit, missing output, wrong dims, timeout).
class ExternalToolError : public Error {
public:
    using Error::Error;
};

/// A computation produced non-finite values or diverged.
class NumericError : public Error {
public:
    using Error::Error;
};

}  // namespace pyrtex
