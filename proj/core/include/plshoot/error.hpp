#pragma once

#include <stdexcept>
#include <string>

namespace plshoot {

/// Coarse error families; the CLI maps these onto process exit codes.
enum class ErrorCategory {
  Validation,  // bad configuration or violated precondition
  Numerical,   // integration, quadrature or root-finding failure
  Search,      // bracket or parameter search failure
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& what)
      : std::runtime_error(what), category_(category) {}

  ErrorCategory category() const noexcept { return category_; }

 private:
  ErrorCategory category_;
};

class DomainError : public Error {
 public:
  explicit DomainError(const std::string& what) : Error(ErrorCategory::Validation, what) {}
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(ErrorCategory::Validation, what) {}
};

class ContractError : public Error {
 public:
  explicit ContractError(const std::string& what) : Error(ErrorCategory::Validation, what) {}
};

class LandmarkError : public Error {
 public:
  explicit LandmarkError(const std::string& what) : Error(ErrorCategory::Numerical, what) {}
};

class HypothesisError : public Error {
 public:
  explicit HypothesisError(const std::string& what) : Error(ErrorCategory::Numerical, what) {}
};

class BarrierError : public Error {
 public:
  explicit BarrierError(const std::string& what) : Error(ErrorCategory::Numerical, what) {}
};

class SearchError : public Error {
 public:
  explicit SearchError(const std::string& what) : Error(ErrorCategory::Search, what) {}
};

}  // namespace plshoot
