#include "hamdual/lbfgs.hpp"

#include <cmath>
#include <deque>

namespace hamdual::numerics {

LbfgsResult lbfgs_minimize(const ObjectiveFn& fg, Eigen::VectorXd x0, const LbfgsOptions& options) {
  using Eigen::VectorXd;
  const Eigen::Index n = x0.size();
  LbfgsResult out;
  VectorXd x = std::move(x0);
  VectorXd g(n);
  double f = fg(x, g);

  std::deque<VectorXd> S;
  std::deque<VectorXd> Y;
  std::deque<double> rho;
  double best_f = f;
  int since_progress = 0;

  auto apply_h0 = [&](const VectorXd& v) -> VectorXd {
    if (options.precondition) return options.precondition(v);
    if (!S.empty()) return v * (S.back().dot(Y.back()) / Y.back().squaredNorm());
    return v;
  };

  int iter = 0;
  for (; iter < options.max_iterations; ++iter) {
    if (f <= options.f_target) {
      out.stop_reason = "target";
      break;
    }
    if (g.lpNorm<Eigen::Infinity>() <= options.gradient_tol) {
      out.stop_reason = "gradient";
      break;
    }

    // Two-loop recursion.
    VectorXd q = g;
    const size_t m = S.size();
    std::vector<double> alpha(m);
    for (size_t i = m; i-- > 0;) {
      alpha[i] = rho[i] * S[i].dot(q);
      q -= alpha[i] * Y[i];
    }
    VectorXd d = apply_h0(q);
    for (size_t i = 0; i < m; ++i) {
      const double beta = rho[i] * Y[i].dot(d);
      d += S[i] * (alpha[i] - beta);
    }
    d = -d;
    double slope = g.dot(d);
    if (!(slope < 0.0)) {
      S.clear();
      Y.clear();
      rho.clear();
      d = -apply_h0(g);
      slope = g.dot(d);
      if (!(slope < 0.0)) {
        d = -g;
        slope = -g.squaredNorm();
      }
    }
    if (m == 0 && !options.precondition) {
      const double gn = g.norm();
      if (gn > 1.0) {
        d /= gn;
        slope /= gn;
      }
    }

    double step = 1.0;
    VectorXd xn(n);
    VectorXd gn(n);
    double fn = 0.0;
    bool accepted = false;
    for (int k = 0; k <= options.max_halvings; ++k) {
      xn = x + step * d;
      fn = fg(xn, gn);
      if (std::isfinite(fn) && fn <= f + options.armijo * step * slope) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      if (!S.empty()) {
        S.clear();
        Y.clear();
        rho.clear();
        continue;
      }
      out.stop_reason = "line_search";
      break;
    }

    const VectorXd s = xn - x;
    const VectorXd y = gn - g;
    const double sy = s.dot(y);
    if (sy > 1e-16 * s.norm() * y.norm()) {
      S.push_back(s);
      Y.push_back(y);
      rho.push_back(1.0 / sy);
      if (static_cast<int>(S.size()) > options.memory) {
        S.pop_front();
        Y.pop_front();
        rho.pop_front();
      }
    }
    x = std::move(xn);
    g = std::move(gn);
    const double prev = f;
    f = fn;

    if (f < best_f - 1e-14 * std::abs(best_f) && prev - f > 0.0) {
      best_f = f;
      since_progress = 0;
    } else if (++since_progress >= options.stall_window) {
      ++iter;
      out.stop_reason = "stall";
      break;
    }
  }
  if (out.stop_reason.empty()) out.stop_reason = "max_iterations";
  out.x = std::move(x);
  out.f = f;
  out.gradient_norm = g.lpNorm<Eigen::Infinity>();
  out.iterations = iter;
  return out;
}

}  // namespace hamdual::numerics
