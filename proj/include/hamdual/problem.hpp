#pragma once

#include <optional>
#include <variant>

#include "hamdual/hamiltonian.hpp"

namespace hamdual {

/// q(0) in d psi1(p(0)), -p(T) in d psi2(q(T)).
struct Connecting {
  ConvexFn psi1;
  ConvexFn psi2;
  int coercive_index = 1;  // which potential carries the quadratic growth condition
};

/// p(0) = p0, q(0) = q0.
struct Cauchy {
  Vec p0;
  Vec q0;
};

/// Connecting boundary data for p' = dH/dq + delta1 q, -q' = dH/dp + delta2 p.
struct SemiConvex {
  ConvexFn psi1;
  ConvexFn psi2;
  double delta1 = 0.0;
  double delta2 = 0.0;
  int coercive_index = 1;
};

using BoundaryMode = std::variant<Connecting, Cauchy, SemiConvex>;

/// User-certified growth constants: -alpha <= H <= beta/2 |x|^2 + gamma, and
/// H <= beta (|p|^r + |q|^r + 1) in the r-growth regime.
struct GrowthCert {
  double alpha = 0.0;
  double beta = 0.0;
  double gamma = 0.0;
  double r = 2.0;
};

struct ProblemSpec {
  Hamiltonian H;
  double T = 1.0;
  BoundaryMode boundary;
  std::optional<GrowthCert> growth;
  Box box;  // working box in (p, q) space

  bool is_cauchy() const { return std::holds_alternative<Cauchy>(boundary); }
  bool is_semiconvex() const { return std::holds_alternative<SemiConvex>(boundary); }
};

}  // namespace hamdual
