#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "hamdual/certify.hpp"
#include "hamdual/conditions.hpp"
#include "hamdual/problem.hpp"

namespace hamdual {

struct SolveParams {
  int M = 200;
  std::vector<double> eps_schedule{1e-1, 1e-2, 1e-3, 1e-4};
  std::vector<double> lambda_schedule;  // empty: no inf-convolution
  double r = 4.0;
  std::optional<double> tol_zero;       // default_tol(spec) when unset
  int max_iters = 5000;                 // per stage
  std::uint64_t seed = 0;
  std::optional<PathGrid> initial;      // overrides the default initial path
  bool run_checks = true;
};

enum class SolveStatus { Converged, StalledAboveTol, HypothesisFailed };

const char* to_string(SolveStatus s);

struct StageRecord {
  double eps = 0.0;
  double lambda = 0.0;
  double action_start = 0.0;
  double action_end = 0.0;
  int iterations = 0;
  std::string stop_reason;
  double max_derivative = 0.0;             // max_k |dp_k| + |dq_k| at stage end
  std::optional<double> prox_displacement;  // max_k |i_lambda(x_k) - x_k| at stage end
};

struct SolveResult {
  PathGrid path;
  Certificate certificate;                    // under the final stage Hamiltonian
  std::optional<Certificate> raw_certificate;  // under the true Hamiltonian, when computable
  std::vector<StageRecord> stages;
  SolveStatus status = SolveStatus::StalledAboveTol;
  HypothesisReport hypotheses;
  double tol_zero = 0.0;
  std::vector<std::string> log;
};

/// Stage Hamiltonian: H, H + eps/2 |x|^2, or the inf-convolution H_lambda
/// (plus eps/2 |x|^2 when eps > 0).
std::unique_ptr<FenchelPair> stage_pair(const Hamiltonian& H, double eps, double lambda, double r);

/// (eps, lambda) per stage: schedules are paired elementwise, the shorter one
/// extended by its last value. Empty schedules mean zero.
std::vector<std::pair<double, double>> stage_schedule(const SolveParams& params);

/// Default initial path: constant (p0, q0) in Cauchy mode, zero otherwise.
PathGrid initial_path(const ProblemSpec& spec, int M);

/// Gradient of the discrete stage action at g. Nonsmooth evaluation points are
/// handled by a tiny deterministic perturbation of g, recorded in `log`.
PathGrid gradient_action(const ProblemSpec& spec, const PathGrid& g, double eps, double lambda,
                         double r = 4.0, std::vector<std::string>* log = nullptr);

/// Stage action value at g.
double stage_action(const ProblemSpec& spec, const PathGrid& g, double eps, double lambda, double r = 4.0);

SolveResult solve(const ProblemSpec& spec, const SolveParams& params);

/// Linear two-point problem r' = delta2 s + f, -s' = delta1 r + g, r(0) = x,
/// s(T) = y. The forcing f, g is sampled at the nodes of `forcing` (its p and
/// q blocks) and interpolated linearly. Returns (r, s) as the p and q blocks.
PathGrid solve_linear_bvp(double delta1, double delta2, const PathGrid& forcing, const Vec& x,
                          const Vec& y);

/// Thrown when the shooting matrix of the linear problem is numerically singular.
class ResonanceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace hamdual
