#pragma once

#include <stdexcept>
#include <string>

namespace cptk {

// Base error for everything the toolkit raises deliberately.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Invalid configuration: bad config file, bad CLI arguments, bad spec.
// The CLI maps this to exit code 2.
struct ConfigError : Error {
    explicit ConfigError(const std::string& msg) : Error(msg) {}
};

// Bad input data: malformed JSONL, corrupt container files, digest
// mismatches. The CLI maps this (and any other Error) to exit code 1.
struct DataError : Error {
    explicit DataError(const std::string& msg) : Error(msg) {}
};

}  // namespace cptk
