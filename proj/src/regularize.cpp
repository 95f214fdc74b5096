#include "hamdual/regularize.hpp"

#include <cmath>
#include <sstream>

#include "hamdual/minimize.hpp"

namespace hamdual {

PointEval eval_with_subgradient(const ConvexFn& f, const Vec& x) {
  const auto sg = f.subgradient(x);
  return PointEval{f.eval(x), sg.value, sg.is_unique};
}

ExactPair::ExactPair(ConvexFn f) : f_(std::move(f)) {
  try {
    conj_ = f_.conjugate();
  } catch (const NotCoercive& e) {
    why_ = e.what();
  }
}

PointEval ExactPair::primal(const Vec& x) const { return eval_with_subgradient(f_, x); }

PointEval ExactPair::dual(const Vec& y) const {
  if (!conj_) throw NotCoercive(why_);
  return eval_with_subgradient(*conj_, y);
}

// ---------------------------------------------------------------- eps

EpsPerturbed::EpsPerturbed(ConvexFn base, double eps) : base_(std::move(base)), eps_(eps) {
  if (!(eps > 0.0) || !std::isfinite(eps)) throw std::invalid_argument("perturb_epsilon: eps must be positive");
}

PointEval EpsPerturbed::primal(const Vec& x) const {
  PointEval e = eval_with_subgradient(base_, x);
  e.value += 0.5 * eps_ * x.squaredNorm();
  e.grad += eps_ * x;
  return e;
}

PointEval EpsPerturbed::dual(const Vec& y) const {
  const Vec xs = base_.prox(y / eps_, 1.0 / eps_);
  PointEval e;
  e.value = xs.dot(y) - base_.eval(xs) - 0.5 * eps_ * xs.squaredNorm();
  e.grad = xs;
  return e;
}

std::string EpsPerturbed::describe() const {
  std::ostringstream os;
  os << base_.describe() << " + " << eps_ << "/2 |x|^2";
  return os.str();
}

EpsPerturbed perturb_epsilon(const Hamiltonian& H, double eps) { return EpsPerturbed(H.f, eps); }

// ---------------------------------------------------------------- lambda

namespace {

double penalty_slope(double z, double s, double lambda) {
  return std::copysign(std::pow(std::abs(z), s - 1.0), z) / std::pow(lambda, s);
}

}  // namespace

InfConvolved::InfConvolved(ConvexFn base, double lambda, double r, double eps)
    : base_(std::move(base)), lambda_(lambda), r_(r), s_(r / (r - 1.0)), eps_(eps) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw std::invalid_argument("infconv: lambda must be positive");
  if (!(r > 2.0) || !std::isfinite(r)) throw std::invalid_argument("infconv: r must exceed 2");
  if (!(eps >= 0.0)) throw std::invalid_argument("infconv: eps must be nonnegative");
  const int n = base_.dim();
  penalty_ = ConvexFn::power_norm(n, s_, 1.0 / (s_ * std::pow(lambda_, s_)));
  dual_fn_ = ConvexFn::sum({base_.conjugate(), ConvexFn::power_norm(n, r_, std::pow(lambda_, r_) / r_)});
}

Vec InfConvolved::proximal_point(const Vec& x) const {
  const int n = base_.dim();
  if (x.size() != n) throw std::invalid_argument("infconv: dimension mismatch");
  if (const auto& parts = base_.separable_parts()) {
    Vec u(n);
    Vec lo(1);
    Vec hi(1);
    for (int i = 0; i < n; ++i) {
      const ConvexFn& part = (*parts)[static_cast<size_t>(i)];
      const double xi = x[i];
      auto d = [&](double v) {
        part.slopes(Vec::Constant(1, v), lo, hi);
        const double pen = penalty_slope(xi - v, s_, lambda_);
        return numerics::Slope{lo[0] - pen, hi[0] - pen};
      };
      u[i] = numerics::solve_monotone(d, xi, std::max(1e-3, 1e-2 * std::abs(xi)));
    }
    return u;
  }
  auto fg = [&](const Vec& u, Vec& grad) {
    const auto sg = base_.subgradient(u);
    grad = sg.value;
    for (int i = 0; i < n; ++i) grad[i] -= penalty_slope(x[i] - u[i], s_, lambda_);
    return base_.eval(u) + penalty_.eval(x - u);
  };
  numerics::BfgsOptions opt;
  opt.gradient_tol = 1e-10 * (1.0 + x.norm());
  opt.max_iterations = 500;
  const auto res = numerics::minimize_bfgs(fg, x, opt);
  if (!res.converged && res.residual > 1e-7 * (1.0 + x.norm())) {
    throw InnerSolveError("infconv: inner minimization did not converge", res.residual);
  }
  return res.x;
}

double InfConvolved::value(const Vec& x) const {
  const Vec u = proximal_point(x);
  return base_.eval(u) + penalty_.eval(x - u);
}

PointEval InfConvolved::primal(const Vec& x) const {
  const Vec u = proximal_point(x);
  PointEval e;
  e.value = base_.eval(u) + penalty_.eval(x - u) + 0.5 * eps_ * x.squaredNorm();
  e.grad = Vec(x.size());
  for (int i = 0; i < x.size(); ++i) e.grad[i] = penalty_slope(x[i] - u[i], s_, lambda_) + eps_ * x[i];
  return e;
}

PointEval InfConvolved::dual(const Vec& y) const {
  if (eps_ == 0.0) return eval_with_subgradient(dual_fn_, y);
  const Vec z = dual_fn_.prox(y, eps_);
  PointEval e;
  e.value = dual_fn_.eval(z) + (y - z).squaredNorm() / (2.0 * eps_);
  e.grad = (y - z) / eps_;
  return e;
}

std::string InfConvolved::describe() const {
  std::ostringstream os;
  os << "infconv(" << base_.describe() << ", lambda=" << lambda_ << ", r=" << r_ << ")";
  if (eps_ > 0.0) os << " + " << eps_ << "/2 |x|^2";
  return os.str();
}

InfConvolved infconv(const Hamiltonian& H, double lambda, double r) {
  return InfConvolved(H.f, lambda, r);
}

std::pair<Vec, Vec> prox_points(const InfConvolved& Hl, const Vec& p, const Vec& q) {
  const Vec u = Hl.proximal_point(Hamiltonian::join(p, q));
  const int N = static_cast<int>(p.size());
  return {u.head(N), u.tail(u.size() - N)};
}

}  // namespace hamdual
