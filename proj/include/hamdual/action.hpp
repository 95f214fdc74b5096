#pragma once

#include <vector>

#include "hamdual/hamiltonian.hpp"
#include "hamdual/path_grid.hpp"
#include "hamdual/problem.hpp"

namespace hamdual {

struct ActionBreakdown {
  double total = 0.0;
  std::vector<double> interior;  // per-interval Fenchel-Young defects (not weighted by h)
  double boundary_start = 0.0;
  double boundary_end = 0.0;
  double h = 0.0;
};

/// Ingredients of a discrete action. Null potentials mean Cauchy mode: no
/// boundary terms, endpoint values fixed.
struct ActionTerms {
  const FenchelPair* H = nullptr;
  const FenchelPair* psi1 = nullptr;
  const FenchelPair* psi2 = nullptr;
  double delta1 = 0.0;
  double delta2 = 0.0;
};

/// Interval k evaluation point x = (pbar, qbar) and dual argument
/// y = (-dq - delta2 pbar, dp - delta1 qbar).
void interval_point(const IntervalData& d, int k, double delta1, double delta2, Vec& x, Vec& y);

ActionBreakdown evaluate_action(const ActionTerms& terms, const PathGrid& g);

/// Returns the total and writes the gradient with respect to every node.
/// In Cauchy mode the rows at t = 0 are zero. `nonsmooth` receives the number
/// of intervals where a subgradient was not unique.
double action_gradient(const ActionTerms& terms, const PathGrid& g, PathGrid& grad,
                       int* nonsmooth = nullptr);

ActionBreakdown action_I(const Hamiltonian& H, const ConvexFn& psi1, const ConvexFn& psi2,
                         const PathGrid& g);

/// Throws std::invalid_argument when g does not start at (p0, q0).
ActionBreakdown action_J(const Hamiltonian& H, const PathGrid& g, const Vec& p0, const Vec& q0);

ActionBreakdown action_semiconvex(const Hamiltonian& H, const ConvexFn& psi1, const ConvexFn& psi2,
                                  double delta1, double delta2, const PathGrid& g);

/// Discrete functional Lagrangian L(r, s; p, q) with rs = (r, s), g = (p, q).
double lagrangian_L(const Hamiltonian& H, const ConvexFn& psi1, const ConvexFn& psi2,
                    const PathGrid& g, const PathGrid& rs);

}  // namespace hamdual
