#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace modlab {

class NotPositiveDefinite : public std::runtime_error {
 public:
  explicit NotPositiveDefinite(std::size_t pivot)
      : std::runtime_error("matrix is not positive definite at pivot " + std::to_string(pivot)),
        pivot_(pivot) {}
  std::size_t pivot() const { return pivot_; }

 private:
  std::size_t pivot_;
};

// Moment E(V^{-k}) does not exist for the requested k.
class MomentDivergence : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class SamplerFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SingularGram : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::size_t line, const std::string& msg)
      : std::runtime_error(line ? "line " + std::to_string(line) + ": " + msg : msg), line_(line) {}
  // Prefixes context (e.g. a file path) while keeping the line number.
  ConfigError(const std::string& context, const ConfigError& inner)
      : std::runtime_error(context + ": " + inner.what()), line_(inner.line_) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

}  // namespace modlab
