#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace weakrev {

// Attempt to normalize or condition on a branch of (numerically) zero
// probability.
class impossible_branch_error : public std::runtime_error {
 public:
  explicit impossible_branch_error(const std::string& what)
      : std::runtime_error(what) {}
};

// Tomography input does not determine the estimate (e.g. an opposing
// measurement pair recorded zero total counts).
class insufficient_data_error : public std::runtime_error {
 public:
  explicit insufficient_data_error(const std::string& what)
      : std::runtime_error(what) {}
};

// Physicality projection received a matrix with no positive part.
class degenerate_input_error : public std::runtime_error {
 public:
  explicit degenerate_input_error(const std::string& what)
      : std::runtime_error(what) {}
};

// Likelihood optimizer exhausted its budget. Carries the best iterate found
// (row-major entries of the parametrized matrix) so callers can inspect or
// accept it explicitly.
class convergence_error : public std::runtime_error {
 public:
  convergence_error(const std::string& what,
                    std::vector<std::complex<double>> best_entries)
      : std::runtime_error(what), best_entries_(std::move(best_entries)) {}

  const std::vector<std::complex<double>>& best_entries() const {
    return best_entries_;
  }

 private:
  std::vector<std::complex<double>> best_entries_;
};

// Malformed experiment configuration (CLI flags or JSON config file).
class config_error : public std::runtime_error {
 public:
  explicit config_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace weakrev
