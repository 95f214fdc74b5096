#pragma once

#include <utility>

#include "hamdual/hamiltonian.hpp"

namespace hamdual {

/// H_eps = H + (eps/2)|x|^2. The conjugate is the Moreau envelope of H*,
/// evaluated through the prox of H, so it is finite and 1/eps-smooth even
/// when H is not coercive.
class EpsPerturbed : public FenchelPair {
 public:
  EpsPerturbed(ConvexFn base, double eps);
  int dim() const override { return base_.dim(); }
  PointEval primal(const Vec& x) const override;
  PointEval dual(const Vec& y) const override;
  std::string describe() const override;
  double eps() const { return eps_; }
  const ConvexFn& base() const { return base_; }

 private:
  ConvexFn base_;
  double eps_;
};

/// H_lambda(x) = inf_u H(u) + sum_i |x_i - u_i|^s / (s lambda^s), s = r/(r-1),
/// optionally plus (eps/2)|x|^2. The conjugate is H* + (lambda^r / r) sum_i |y_i|^r
/// (Moreau-enveloped with step eps when eps > 0).
class InfConvolved : public FenchelPair {
 public:
  InfConvolved(ConvexFn base, double lambda, double r = 4.0, double eps = 0.0);
  int dim() const override { return base_.dim(); }
  PointEval primal(const Vec& x) const override;
  PointEval dual(const Vec& y) const override;
  std::string describe() const override;

  /// Unique minimizer u of the inner problem at x.
  Vec proximal_point(const Vec& x) const;
  /// H_lambda(x) without the eps term.
  double value(const Vec& x) const;
  /// Conjugate H_lambda* (without the eps envelope) as a ConvexFn.
  const ConvexFn& conjugate_fn() const { return dual_fn_; }

  double lambda() const { return lambda_; }
  double r() const { return r_; }
  double s() const { return s_; }
  double eps() const { return eps_; }
  const ConvexFn& base() const { return base_; }
  const ConvexFn& penalty() const { return penalty_; }

 private:
  ConvexFn base_;
  double lambda_;
  double r_;
  double s_;
  double eps_;
  ConvexFn penalty_;   // sum |z|^s / (s lambda^s)
  ConvexFn dual_fn_;   // H* + lambda^r/r sum |y|^r
};

EpsPerturbed perturb_epsilon(const Hamiltonian& H, double eps);
InfConvolved infconv(const Hamiltonian& H, double lambda, double r = 4.0);

/// (i(p), j(q)): the proximal points realizing H_lambda at (p, q).
std::pair<Vec, Vec> prox_points(const InfConvolved& Hl, const Vec& p, const Vec& q);

}  // namespace hamdual
