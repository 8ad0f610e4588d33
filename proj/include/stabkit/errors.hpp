#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace stabkit {

// Evaluation left an expression's domain (division by zero, sqrt of a negative).
class NumericDomainError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& msg, std::size_t offset)
      : std::runtime_error(msg + " at offset " + std::to_string(offset)), offset_(offset) {}
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& msg, int line)
      : std::runtime_error("line " + std::to_string(line) + ": " + msg), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

// Map Jacobian at the origin is (numerically) singular.
class SingularAtOrigin : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NoConvergence : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class StepSizeUnderflow : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Dense linear algebra failure (eigensolver or SVD did not converge).
class NumericFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace stabkit
