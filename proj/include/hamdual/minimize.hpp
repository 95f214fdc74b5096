#pragma once

#include <functional>

#include "hamdual/types.hpp"

namespace hamdual::numerics {

/// One-sided derivatives [left, right] of a convex scalar function at a point.
struct Slope {
  double lo;
  double hi;
};

/// Solves the monotone inclusion 0 in [lo(u), hi(u)] for the one-sided
/// derivative map of a convex scalar function. Brackets outward from `guess`
/// with initial step `step`, then runs Brent's method on the minimal-norm
/// selection. Throws InnerSolveError if no bracket is found.
double solve_monotone(const std::function<Slope(double)>& derivative, double guess, double step);

struct BfgsOptions {
  double gradient_tol = 1e-10;
  int max_iterations = 200;
  const Box* box = nullptr;  // projected iterates when set
};

struct BfgsResult {
  Vec x;
  double value = 0.0;
  double residual = 0.0;  // projected gradient norm at x
  int iterations = 0;
  bool converged = false;
};

/// Dense projected BFGS with Armijo backtracking for small convex problems.
/// `fg` returns f(x) and writes a (sub)gradient into its second argument.
BfgsResult minimize_bfgs(const std::function<double(const Vec&, Vec&)>& fg, Vec x0,
                         const BfgsOptions& options);

}  // namespace hamdual::numerics
