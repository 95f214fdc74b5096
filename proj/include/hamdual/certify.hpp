#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "hamdual/action.hpp"

namespace hamdual {

struct Certificate {
  double action_value = 0.0;
  std::vector<double> interior_residuals;   // Fenchel-Young defect per interval
  double boundary_start_residual = 0.0;
  double boundary_end_residual = 0.0;
  std::vector<double> inclusion_residuals;  // |y_k - dH(x_k)|, NaN where dH is not a singleton
  std::optional<double> energy_drift;       // Cauchy mode
  double h = 0.0;
  double tol = 0.0;
  bool pass = false;
  int worst_interval = -1;  // argmax of h * interior residual
  std::string hamiltonian;  // description of the pair used
  std::string note;         // why the certificate could not be computed, if so

  double max_interior() const;         // max_k interior residual
  double max_weighted_interior() const;  // max_k h * interior residual
  double max_inclusion() const;        // over defined entries
};

/// Certificate from explicit action ingredients. In Cauchy mode (no
/// potentials) `start` supplies (p0, q0) and the start residual is the
/// deviation from it.
Certificate certify_terms(const ActionTerms& terms, const PathGrid& g, double tol,
                          const std::optional<std::pair<Vec, Vec>>& start = std::nullopt);

/// Certificate under the true Hamiltonian and potentials of `spec`. Never
/// throws; failures to evaluate are reported in `note` with pass = false.
Certificate certify(const ProblemSpec& spec, const PathGrid& g, double tol);

/// Default tolerance 1e-6 (1 + scale), scale = max(|p0|^2, |q0|^2) in Cauchy
/// mode and 0 otherwise.
double default_tol(const ProblemSpec& spec);

struct OrderRow {
  int M = 0;
  double action = 0.0;
  double max_interior = 0.0;
  double max_inclusion = 0.0;
};

struct OrderTable {
  std::vector<OrderRow> rows;
  double action_order = 0.0;
  double interior_order = 0.0;
  double inclusion_order = 0.0;
};

/// Least-squares slope of -log(value) against log(M).
double fitted_order(const std::vector<int>& Ms, const std::vector<double>& values);

/// Certificates of an exact solution sampled at each M, with fitted orders.
OrderTable residual_order(const ProblemSpec& spec, const std::function<PathGrid(int)>& exact,
                          const std::vector<int>& Ms);

}  // namespace hamdual
