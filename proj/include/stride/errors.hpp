#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace stride {

/// Malformed document: JSON syntax or a missing/mistyped field.
class SchemaError : public std::runtime_error {
 public:
  SchemaError(std::string path, const std::string& message)
      : std::runtime_error(path.empty() ? message : path + ": " + message),
        path_(std::move(path)) {}

  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

struct Violation {
  std::string path;
  std::string message;

  bool operator==(const Violation&) const = default;
};

/// Well-formed input that breaks a domain invariant.
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(std::vector<Violation> violations);

  const std::vector<Violation>& violations() const noexcept {
    return violations_;
  }

 private:
  std::vector<Violation> violations_;
};

/// Valid inputs on which a formula is undefined (zero denominator, empty
/// component, ...).
class ComputationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NotFoundError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class StoreError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace stride
