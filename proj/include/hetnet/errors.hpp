#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace hetnet {

class Error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// Bad argument to a pure function (non-finite distance, negative gain, ...).
class InvalidParameter : public Error
{
public:
    using Error::Error;
};

/// Configuration file or override problem. Carries the offending key and,
/// when the value came from a file, its 1-based line number (0 otherwise).
class ConfigError : public Error
{
public:
    ConfigError(std::string key, int line, const std::string& what)
        : Error(line > 0 ? "config line " + std::to_string(line) + ", key '" + key + "': " + what
                         : "config key '" + key + "': " + what),
          key_(std::move(key)),
          line_(line)
    {
    }

    const std::string& key() const noexcept { return key_; }
    int line() const noexcept { return line_; }

private:
    std::string key_;
    int line_;
};

/// Snapshot generation failed (e.g. small cells cannot be packed).
class GenerationError : public Error
{
public:
    using Error::Error;
};

/// Numerical failure: singular system, stagnating eigen-solver, violated
/// safety assertion.
class NumericError : public Error
{
public:
    using Error::Error;
};

class IoError : public Error
{
public:
    using Error::Error;
};

}  // namespace hetnet
