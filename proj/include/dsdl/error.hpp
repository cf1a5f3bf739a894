#pragma once

#include <stdexcept>
#include <string>

namespace dsdl {

// Base class for everything thrown by this library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Shape disagreement between operands.
class DimensionError : public Error {
public:
    using Error::Error;
};

// NaN/Inf encountered, or a factorization broke down.
class NumericError : public Error {
public:
    using Error::Error;
};

// Malformed or unreadable input/output files.
class IoError : public Error {
public:
    using Error::Error;
};

// Bad run configuration (unknown key, unparsable value, missing path).
class ConfigError : public Error {
public:
    using Error::Error;
};

// Training aborted on a non-finite loss; carries the offending batch.
class DivergenceError : public NumericError {
public:
    DivergenceError(int epoch, int batch, const std::string& what)
        : NumericError(what), epoch_(epoch), batch_(batch) {}
    int epoch() const { return epoch_; }
    int batch() const { return batch_; }

private:
    int epoch_;
    int batch_;
};

}  // namespace dsdl
