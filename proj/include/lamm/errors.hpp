// SPDX-License-Identifier: Apache-2.0
//
// Error hierarchy. The CLI maps each family onto an exit status:
//   UsageError   -> 1
//   DataError    -> 2
//   NumericError -> 3

#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace lamm {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bad arguments, bad configuration, or an API precondition violated by the caller.
class UsageError : public Error {
public:
    using Error::Error;
};

class ConfigError : public UsageError {
public:
    using UsageError::UsageError;
};

/// Problems with input data: malformed files, unknown ids, inconsistent datasets.
class DataError : public Error {
public:
    using Error::Error;
};

class LookupError : public DataError {
public:
    using DataError::DataError;
};

class TokenizationError : public DataError {
public:
    using DataError::DataError;
};

class FormatError : public DataError {
public:
    FormatError(std::uint64_t offset, const std::string& what)
        : DataError("at byte offset " + std::to_string(offset) + ": " + what), offset_(offset) {}

    std::uint64_t offset() const noexcept { return offset_; }

private:
    std::uint64_t offset_;
};

/// Non-finite values, math domain violations, diverged training.
class NumericError : public Error {
public:
    using Error::Error;
};

class DomainError : public NumericError {
public:
    using NumericError::NumericError;
};

}  // namespace lamm
