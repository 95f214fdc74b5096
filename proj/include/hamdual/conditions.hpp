#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hamdual/problem.hpp"

namespace hamdual {

enum class CheckStatus { VerifiedOnSamples, Failed, Skipped };

const char* to_string(CheckStatus s);

struct CheckReport {
  std::string name;
  CheckStatus status = CheckStatus::Skipped;
  std::string detail;
  std::optional<Vec> witness;           // violating point for Failed
  std::map<std::string, double> values;  // thresholds, margins, estimates

  bool passed() const { return status != CheckStatus::Failed; }
};

struct HypothesisReport {
  std::vector<CheckReport> checks;
  bool all_passed() const;
};

/// -alpha <= H <= beta/2 |x|^2 + gamma at `samples` uniform points of `box`
/// plus its corners.
CheckReport check_subquadratic(const Hamiltonian& H, const GrowthCert& cert, const Box& box,
                               int samples = 4000, std::uint64_t seed = 0);

/// -alpha <= H <= beta (|p|^r + |q|^r + 1) on samples.
CheckReport check_power_growth(const Hamiltonian& H, const GrowthCert& cert, const Box& box,
                               int samples = 4000, std::uint64_t seed = 0);

/// 1 / (2 max(2T^2, 1))
double beta_threshold(double T);

/// Minimum of psi(x)/|x|^2 over the outer 20% shell of the box, compared
/// with `threshold` (default 2T) using a 5% margin.
CheckReport check_psi_coercivity(const ConvexFn& psi, double T, const Box& box,
                                 std::optional<double> threshold = std::nullopt, int samples = 4000,
                                 std::uint64_t seed = 0);

/// psi grows toward the boundary of the box: min over the outer shell exceeds
/// the value at the box center.
CheckReport check_psi_growth(const ConvexFn& psi, const Box& box, int samples = 4000,
                             std::uint64_t seed = 0);

struct SemiconvexThresholds {
  double eps1 = 0.0;  // 1 - 4 T^2 delta1^2
  double eps2 = 0.0;
  double A1 = 0.0;    // max(2T^2, 1) - 2 delta1 T^2
  double A2 = 0.0;
  double beta_bound = 0.0;      // 1/4 min(eps1/A1, eps2/A2)
  double delta_bound = 0.0;     // 1 / (2T)
  double psi1_threshold = 0.0;  // T delta2^2 / beta + 2T (1 - delta2)
  double psi2_threshold = 0.0;  // T delta1^2 / beta - 2T delta1
};

SemiconvexThresholds semiconvex_thresholds(double delta1, double delta2, double beta, double T);

std::vector<CheckReport> check_semiconvex(double delta1, double delta2, double beta, double T,
                                          const ConvexFn& psi1, const ConvexFn& psi2,
                                          std::uint64_t seed = 0);

/// Runs every check applicable to the boundary mode.
HypothesisReport check_problem(const ProblemSpec& spec, int samples = 4000, std::uint64_t seed = 0);

}  // namespace hamdual
