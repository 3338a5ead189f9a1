#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace gll {

/// Parameter triple or re-parameterization violates its invariants.
class invalid_parameters : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Operation has no closed form (or no theorem) for these parameters.
class unsupported_parameters : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A parameter conversion hit the edge of its domain (pi = 1, mu*gamma -> 1, lambda = 0).
class boundary_error : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Iterative method (quadrature, root finding, optimizer) failed to converge.
class convergence_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Data cannot identify the model (e.g. every observation equal).
class degenerate_data : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Regression model cannot produce valid per-row parameters.
class infeasible_error : public std::domain_error {
 public:
  infeasible_error(std::size_t row, const std::string& what)
      : std::domain_error("row " + std::to_string(row) + ": " + what), row_(row) {}
  std::size_t row() const noexcept { return row_; }

 private:
  std::size_t row_;
};

}  // namespace gll
