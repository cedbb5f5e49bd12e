#pragma once

#include <stdexcept>
#include <string>

namespace bbvi {

// Raised when an operation needs metadata the target cannot provide
// (e.g. smoothness constants of a non-quadratic density).
struct UnsupportedOperationError : std::logic_error {
  using std::logic_error::logic_error;
};

// Configuration problem; carries the offending key so the CLI can name it.
struct ConfigError : std::runtime_error {
  std::string key;
  ConfigError(std::string key_, const std::string& what_)
      : std::runtime_error(what_), key(std::move(key_)) {}
};

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace detail {

inline void require(bool cond, const char* msg) {
  if (!cond) throw std::invalid_argument(msg);
}

inline void require_domain(bool cond, const char* msg) {
  if (!cond) throw std::domain_error(msg);
}

}  // namespace detail
}  // namespace bbvi
