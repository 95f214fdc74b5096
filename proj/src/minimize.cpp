#include "hamdual/minimize.hpp"

#include <cmath>
#include <limits>
#include <utility>

namespace hamdual::numerics {

namespace {

double selection(const Slope& s) {
  if (s.lo > 0.0) return s.lo;
  if (s.hi < 0.0) return s.hi;
  return 0.0;
}

// Brent's zeroin on a bracket with fa < 0 < fb.
double brent(const std::function<double(double)>& f, double a, double b, double fa, double fb) {
  constexpr double kEps = std::numeric_limits<double>::epsilon();
  double c = a;
  double fc = fa;
  double d = b - a;
  double e = d;
  for (int iter = 0; iter < 400; ++iter) {
    if ((fb > 0 && fc > 0) || (fb < 0 && fc < 0)) {
      c = a;
      fc = fa;
      d = b - a;
      e = d;
    }
    if (std::abs(fc) < std::abs(fb)) {
      a = b;
      b = c;
      c = a;
      fa = fb;
      fb = fc;
      fc = fa;
    }
    const double tol = 2.0 * kEps * std::abs(b) + 1e-30;
    const double m = 0.5 * (c - b);
    if (std::abs(m) <= tol || fb == 0.0) return b;
    if (std::abs(e) >= tol && std::abs(fa) > std::abs(fb)) {
      double p;
      double q;
      const double s = fb / fa;
      if (a == c) {
        p = 2.0 * m * s;
        q = 1.0 - s;
      } else {
        const double qq = fa / fc;
        const double r = fb / fc;
        p = s * (2.0 * m * qq * (qq - r) - (b - a) * (r - 1.0));
        q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
      }
      if (p > 0) {
        q = -q;
      } else {
        p = -p;
      }
      if (2.0 * p < std::min(3.0 * m * q - std::abs(tol * q), std::abs(e * q))) {
        e = d;
        d = p / q;
      } else {
        d = m;
        e = m;
      }
    } else {
      d = m;
      e = m;
    }
    a = b;
    fa = fb;
    b += (std::abs(d) > tol) ? d : (m > 0 ? tol : -tol);
    fb = f(b);
  }
  return b;
}

}  // namespace

double solve_monotone(const std::function<Slope(double)>& derivative, double guess, double step) {
  auto g = [&](double u) { return selection(derivative(u)); };
  const double g0 = g(guess);
  if (g0 == 0.0) return guess;
  if (!(step > 0.0) || !std::isfinite(step)) step = 1.0;

  // Walk away from the sign of g0 until the selection changes sign.
  const double dir = g0 > 0.0 ? -1.0 : 1.0;
  double near = guess;
  double gnear = g0;
  double far = guess;
  double gfar = g0;
  int expansions = 0;
  while ((gfar > 0.0) == (g0 > 0.0) && gfar != 0.0) {
    near = far;
    gnear = gfar;
    far = guess + dir * step;
    gfar = g(far);
    step *= 2.0;
    if (++expansions > 2000 || !std::isfinite(far)) {
      throw InnerSolveError("solve_monotone: could not bracket root", std::abs(g0));
    }
  }
  if (gfar == 0.0) return far;
  if (gnear < 0.0) return brent(g, near, far, gnear, gfar);
  return brent(g, far, near, gfar, gnear);
}

BfgsResult minimize_bfgs(const std::function<double(const Vec&, Vec&)>& fg, Vec x0,
                         const BfgsOptions& options) {
  const int n = static_cast<int>(x0.size());
  auto project = [&](const Vec& v) -> Vec {
    return options.box != nullptr ? options.box->clamp(v) : v;
  };
  auto projected_residual = [&](const Vec& x, const Vec& g) {
    return (x - project(x - g)).norm();
  };

  BfgsResult out;
  Vec x = project(x0);
  Vec g(n);
  double f = fg(x, g);
  Mat Hinv = Mat::Identity(n, n);

  for (int iter = 0; iter < options.max_iterations; ++iter) {
    out.iterations = iter;
    const double res = projected_residual(x, g);
    if (res <= options.gradient_tol) {
      out.converged = true;
      break;
    }
    Vec d = -(Hinv * g);
    if (g.dot(d) >= 0.0) {
      Hinv.setIdentity();
      d = -g;
    }
    double alpha = 1.0;
    Vec xn(n);
    Vec gn(n);
    double fn = 0.0;
    bool accepted = false;
    for (int ls = 0; ls < 60; ++ls) {
      xn = project(x + alpha * d);
      fn = fg(xn, gn);
      if (std::isfinite(fn) && fn <= f + 1e-4 * g.dot(xn - x)) {
        accepted = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!accepted) break;
    const Vec s = xn - x;
    const Vec yv = gn - g;
    const double sy = s.dot(yv);
    if (sy > 1e-300 * s.norm() * yv.norm() && sy > 0.0) {
      const double rho = 1.0 / sy;
      const Mat I = Mat::Identity(n, n);
      if (iter == 0) Hinv = (sy / yv.squaredNorm()) * I;
      Hinv = (I - rho * s * yv.transpose()) * Hinv * (I - rho * yv * s.transpose()) +
             rho * s * s.transpose();
    }
    const bool stalled = s.norm() <= 1e-16 * (1.0 + x.norm());
    x = xn;
    g = gn;
    f = fn;
    if (stalled) break;
  }
  out.x = x;
  out.value = f;
  out.residual = projected_residual(x, g);
  out.converged = out.converged || out.residual <= options.gradient_tol;
  return out;
}

}  // namespace hamdual::numerics
