#pragma once

#include <stdexcept>
#include <string>

namespace htgd {

/// Precondition or shape violation in a caller-supplied argument.
class InvalidArgument : public std::invalid_argument {
 public:
  explicit InvalidArgument(const std::string& what) : std::invalid_argument(what) {}
};

/// Non-finite values, failed factorizations, or rank loss where rank is required.
class NumericalFailure : public std::runtime_error {
 public:
  explicit NumericalFailure(const std::string& what) : std::runtime_error(what) {}
};

class RankDeficient : public NumericalFailure {
 public:
  explicit RankDeficient(const std::string& what) : NumericalFailure(what) {}
};

/// Random model generation gave up (rejection budget exhausted).
class GenerationFailure : public std::runtime_error {
 public:
  explicit GenerationFailure(const std::string& what) : std::runtime_error(what) {}
};

class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

[[noreturn]] void throw_invalid(const std::string& what);

}  // namespace htgd
