#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace wienergauge {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input outside an operation's documented domain.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

class FormatError : public Error {
 public:
  using Error::Error;
};

class BudgetError : public Error {
 public:
  BudgetError(std::size_t required, std::size_t budget)
      : Error("grid needs " + std::to_string(required) + " nodes, budget is " + std::to_string(budget)),
        required_(required),
        budget_(budget) {}
  std::size_t required() const { return required_; }
  std::size_t budget() const { return budget_; }

 private:
  std::size_t required_;
  std::size_t budget_;
};

/// The iterative minimizer stopped before reaching its tolerance.  Carries
/// the best iterate so callers can inspect or restart from it.
class NonConvergence : public Error {
 public:
  NonConvergence(const std::string& what, std::vector<double> best, double residual, int iterations)
      : Error(what), best_(std::move(best)), residual_(residual), iterations_(iterations) {}
  const std::vector<double>& best_iterate() const { return best_; }
  double residual() const { return residual_; }
  int iterations() const { return iterations_; }

 private:
  std::vector<double> best_;
  double residual_;
  int iterations_;
};

class CalibrationFailure : public Error {
 public:
  using Error::Error;
};

}  // namespace wienergauge
