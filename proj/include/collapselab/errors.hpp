#pragma once

#include <stdexcept>
#include <string>

namespace collapselab {

// Error categories map 1:1 onto CLI exit codes (see tools/).
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
  static constexpr int exit_code = 2;
};

class IntegrityError : public std::runtime_error {
 public:
  explicit IntegrityError(const std::string& msg) : std::runtime_error(msg) {}
  static constexpr int exit_code = 3;
};

class InvariantError : public std::runtime_error {
 public:
  explicit InvariantError(const std::string& msg) : std::runtime_error(msg) {}
  static constexpr int exit_code = 4;
};

}  // namespace collapselab
