#pragma once

#include <stdexcept>
#include <string>

namespace netsmooth {

// Bad configuration values, malformed input files, violated preconditions.
// Maps to CLI exit code 2.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// A referenced input file does not exist. Maps to CLI exit code 4.
class MissingDataError : public std::runtime_error {
public:
    explicit MissingDataError(const std::string& what) : std::runtime_error(what) {}
};

// A weight entry went non-finite or beyond the divergence guard during
// training. Maps to CLI exit code 3.
class DivergedError : public std::runtime_error {
public:
    DivergedError(long iteration, const std::string& what)
        : std::runtime_error(what), iteration(iteration) {}
    long iteration;
};

} // namespace netsmooth
