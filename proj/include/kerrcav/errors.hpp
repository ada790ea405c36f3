#pragma once

#include <stdexcept>
#include <string>

namespace kerrcav {

/// Rejected configuration: bad key, malformed number, out-of-range value.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A numerical contract was violated at run time (norm drift, invalid
/// density matrix, truncation deficit).
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class TruncationError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class InvalidDensityError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class IoError : public std::runtime_error {
public:
    IoError(const std::string& path, const std::string& what)
        : std::runtime_error(path + ": " + what), path_(path) {}

    const std::string& path() const noexcept { return path_; }

private:
    std::string path_;
};

}  // namespace kerrcav
