#pragma once

#include <stdexcept>
#include <string>

namespace uwbnov {

// Error classes map onto the C API status codes and the CLI exit classes:
// ConfigError -> usage/config (exit 1); IoError/DataError -> runtime/data (exit 2).
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

struct IoError : std::runtime_error {
  explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

struct DataError : std::runtime_error {
  explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace uwbnov
