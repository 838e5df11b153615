#ifndef EFK_ERRORS_HPP
#define EFK_ERRORS_HPP

#include <memory>
#include <stdexcept>
#include <string>

namespace efk {

// Invalid argument against a documented precondition.
class InvalidParameter : public std::invalid_argument {
 public:
  explicit InvalidParameter(const std::string& what) : std::invalid_argument(what) {}
};

// Configuration / usage error (CLI maps this to exit 64).
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Unreadable input (CLI maps this to exit 66).
class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

// Artifact with wrong magic/version or inconsistent shape (CLI exit 65).
class FormatError : public std::runtime_error {
 public:
  explicit FormatError(const std::string& what) : std::runtime_error(what) {}
};

// Optimizer did not meet its tolerances within max_iters. The last iterate is
// attached so callers can inspect or persist it.
class SolverFailure : public std::runtime_error {
 public:
  SolverFailure(const std::string& what, std::shared_ptr<void> last_iterate)
      : std::runtime_error(what), last_iterate_(std::move(last_iterate)) {}

  template <typename T>
  std::shared_ptr<const T> last_iterate() const {
    return std::static_pointer_cast<const T>(last_iterate_);
  }

 private:
  std::shared_ptr<void> last_iterate_;
};

// find_families could not populate both families (CLI exit 3).
class SeparationNotFound : public std::runtime_error {
 public:
  explicit SeparationNotFound(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace efk

#endif  // EFK_ERRORS_HPP
