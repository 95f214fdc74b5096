#pragma once

#include <cmath>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hamdual/action.hpp"
#include "hamdual/certify.hpp"
#include "hamdual/conditions.hpp"
#include "hamdual/convex_fn.hpp"
#include "hamdual/path_grid.hpp"
#include "hamdual/problem.hpp"
#include "hamdual/regularize.hpp"
#include "hamdual/solver.hpp"

namespace testing_support {

using hamdual::ConvexFn;
using hamdual::Hamiltonian;
using hamdual::Mat;
using hamdual::PathGrid;
using hamdual::Vec;

inline Vec vec(std::initializer_list<double> v) {
  Vec out(static_cast<int>(v.size()));
  int i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

inline Mat eye(int n) { return Mat::Identity(n, n); }

inline PathGrid random_grid(std::mt19937_64& rng, double T, int N, int M, double amp = 1.0) {
  std::uniform_real_distribution<double> u(-amp, amp);
  PathGrid g = PathGrid::zeros(T, N, M);
  for (int k = 0; k <= M; ++k) {
    for (int i = 0; i < N; ++i) {
      g.p(k, i) = u(rng);
      g.q(k, i) = u(rng);
    }
  }
  return g;
}

// Smooth random path: a few random Fourier modes per component.
inline PathGrid smooth_random_grid(std::mt19937_64& rng, double T, int N, int M, double amp = 1.0) {
  std::uniform_real_distribution<double> u(-amp, amp);
  PathGrid g = PathGrid::zeros(T, N, M);
  for (int i = 0; i < N; ++i) {
    double a[2][4];
    for (auto& row : a) {
      for (double& c : row) c = u(rng);
    }
    for (int k = 0; k <= M; ++k) {
      const double t = g.t(k) / T;
      g.p(k, i) = a[0][0] + a[0][1] * std::sin(M_PI * t) + a[0][2] * std::cos(2 * M_PI * t) + a[0][3] * t * t;
      g.q(k, i) = a[1][0] + a[1][1] * std::sin(M_PI * t) + a[1][2] * std::cos(2 * M_PI * t) + a[1][3] * t * t;
    }
  }
  return g;
}

// Catalog problem with closed-form conjugates throughout.
struct CatalogProblem {
  std::string name;
  Hamiltonian H;
  ConvexFn psi1;
  ConvexFn psi2;
  Vec p0;
  Vec q0;
};

inline std::vector<CatalogProblem> catalog() {
  std::vector<CatalogProblem> out;
  {
    CatalogProblem c;
    c.name = "harmonic";
    c.H = Hamiltonian(ConvexFn::quadratic(eye(2), Vec::Zero(2)));
    c.psi1 = ConvexFn::quadratic(eye(1), vec({1.0}));
    c.psi2 = ConvexFn::quadratic(eye(1), Vec::Zero(1));
    c.p0 = vec({1.0});
    c.q0 = vec({0.0});
    out.push_back(c);
  }
  {
    CatalogProblem c;
    c.name = "coupled_quadratic_2d";
    Mat A(4, 4);
    A << 2.0, 0.3, 0.1, 0.0,  //
        0.3, 1.5, 0.0, 0.2,   //
        0.1, 0.0, 1.0, 0.4,   //
        0.0, 0.2, 0.4, 0.8;
    c.H = Hamiltonian(ConvexFn::quadratic(A, vec({0.1, -0.2, 0.3, 0.0}), 0.5));
    c.psi1 = ConvexFn::quadratic(3.0 * eye(2), vec({0.5, -0.5}));
    c.psi2 = ConvexFn::power_norm(2, 4.0, 0.25);
    c.p0 = vec({0.5, -1.0});
    c.q0 = vec({0.2, 0.3});
    out.push_back(c);
  }
  {
    CatalogProblem c;
    c.name = "quartic";
    c.H = Hamiltonian(ConvexFn::power_norm(2, 4.0, 0.25));
    c.psi1 = ConvexFn::power_norm(1, 3.0, 1.0);
    c.psi2 = ConvexFn::quadratic(2.0 * eye(1), vec({-0.5}));
    c.p0 = vec({1.0});
    c.q0 = vec({0.0});
    out.push_back(c);
  }
  {
    CatalogProblem c;
    c.name = "mixed_separable";
    c.H = Hamiltonian(ConvexFn::separable({ConvexFn::quadratic(eye(1), vec({0.3})),
                                           ConvexFn::power_norm(1, 4.0, 0.5)}));
    c.psi1 = ConvexFn::quadratic(eye(1), Vec::Zero(1));
    c.psi2 = ConvexFn::power_norm(1, 1.5, 2.0);
    c.p0 = vec({-0.5});
    c.q0 = vec({0.7});
    out.push_back(c);
  }
  {
    CatalogProblem c;
    c.name = "power_three_halves_2d";
    c.H = Hamiltonian(ConvexFn::power_norm(4, 1.5, 1.0));
    c.psi1 = ConvexFn::quadratic(eye(2), vec({1.0, 2.0}), -1.0);
    c.psi2 = ConvexFn::quadratic(0.5 * eye(2), Vec::Zero(2));
    c.p0 = vec({0.0, 1.0});
    c.q0 = vec({1.0, 0.0});
    out.push_back(c);
  }
  {
    CatalogProblem c;
    c.name = "quadratic_plus_affine";
    c.H = Hamiltonian(ConvexFn::sum({ConvexFn::quadratic(0.1 * eye(2), Vec::Zero(2)),
                                     ConvexFn::affine(vec({0.5, -0.25}), 1.0)}));
    c.psi1 = ConvexFn::quadratic(2.0 * eye(1), vec({0.2}));
    c.psi2 = ConvexFn::power_norm(1, 4.0, 1.0);
    c.p0 = vec({0.3});
    c.q0 = vec({-0.3});
    out.push_back(c);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Independent ODE oracles. The Hamiltonian flow is p' = dH/dq, -q' = dH/dp
// (plus delta1 q, delta2 p in the semiconvex case). Gradients are supplied by
// the caller in closed form, not through the library.

using GradFn = std::function<Eigen::VectorXd(const Eigen::VectorXd& p, const Eigen::VectorXd& q)>;

struct Flow {
  GradFn dHdp;
  GradFn dHdq;
  double delta1 = 0.0;
  double delta2 = 0.0;
};

inline void flow_rhs(const Flow& f, const Eigen::VectorXd& p, const Eigen::VectorXd& q, Eigen::VectorXd& dp,
                     Eigen::VectorXd& dq) {
  dp = f.dHdq(p, q) + f.delta1 * q;
  dq = -(f.dHdp(p, q) + f.delta2 * p);
}

// Classical RK4 from (p, q) over [0, T] with `steps` steps, returning every
// `stride`-th state as a PathGrid of M = steps / stride intervals.
inline PathGrid rk4_flow(const Flow& f, const Eigen::VectorXd& p0, const Eigen::VectorXd& q0, double T, int M,
                         int substeps) {
  const int N = static_cast<int>(p0.size());
  PathGrid out = PathGrid::zeros(T, N, M);
  Eigen::VectorXd p = p0;
  Eigen::VectorXd q = q0;
  out.p.row(0) = p.transpose();
  out.q.row(0) = q.transpose();
  const double h = T / (static_cast<double>(M) * substeps);
  Eigen::VectorXd k1p, k1q, k2p, k2q, k3p, k3q, k4p, k4q;
  for (int k = 0; k < M; ++k) {
    for (int s = 0; s < substeps; ++s) {
      flow_rhs(f, p, q, k1p, k1q);
      flow_rhs(f, p + 0.5 * h * k1p, q + 0.5 * h * k1q, k2p, k2q);
      flow_rhs(f, p + 0.5 * h * k2p, q + 0.5 * h * k2q, k3p, k3q);
      flow_rhs(f, p + h * k3p, q + h * k3q, k4p, k4q);
      p += h / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p);
      q += h / 6.0 * (k1q + 2.0 * k2q + 2.0 * k3q + k4q);
    }
    out.p.row(k + 1) = p.transpose();
    out.q.row(k + 1) = q.transpose();
  }
  return out;
}

// Shooting for the connecting problem: unknown p(0), q(0) = grad psi1(p(0)),
// residual -p(T) - grad psi2(q(T)). Newton with a finite-difference Jacobian.
inline PathGrid shooting_oracle(const Flow& f, const GradFn& grad_psi1, const GradFn& grad_psi2, int N, double T,
                                int M, int substeps = 16) {
  const Eigen::VectorXd none = Eigen::VectorXd::Zero(N);
  auto residual = [&](const Eigen::VectorXd& a) {
    const Eigen::VectorXd q0 = grad_psi1(a, none);
    const PathGrid path = rk4_flow(f, a, q0, T, 1, M * substeps);
    const Eigen::VectorXd pT = path.p.row(1).transpose();
    const Eigen::VectorXd qT = path.q.row(1).transpose();
    return Eigen::VectorXd(-pT - grad_psi2(qT, none));
  };
  Eigen::VectorXd a = Eigen::VectorXd::Zero(N);
  for (int it = 0; it < 50; ++it) {
    const Eigen::VectorXd r = residual(a);
    if (r.norm() < 1e-13) break;
    Eigen::MatrixXd J(N, N);
    for (int j = 0; j < N; ++j) {
      Eigen::VectorXd ap = a;
      Eigen::VectorXd am = a;
      const double step = 1e-6 * (1.0 + std::abs(a[j]));
      ap[j] += step;
      am[j] -= step;
      J.col(j) = (residual(ap) - residual(am)) / (2.0 * step);
    }
    a -= J.fullPivLu().solve(r);
  }
  return rk4_flow(f, a, grad_psi1(a, none), T, M, substeps);
}

// Brute-force conjugate max_x (x y - f(x)) over n uniform points of [lo, hi].
inline double brute_conjugate_1d(const std::function<double(double)>& f, double lo, double hi, int n, double y) {
  double best = -INFINITY;
  const double step = (hi - lo) / (n - 1);
  for (int i = 0; i < n; ++i) {
    const double x = lo + i * step;
    best = std::max(best, x * y - f(x));
  }
  return best;
}

// Root of a monotone increasing scalar function by bisection.
inline double bisect(const std::function<double(double)>& g, double lo, double hi, int iters = 200) {
  for (int i = 0; i < iters; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (g(mid) > 0.0) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return 0.5 * (lo + hi);
}

// Minimum of a unimodal function by golden-section search.
inline double golden_min(const std::function<double(double)>& f, double a, double b, int iters = 200) {
  const double r = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - r * (b - a);
  double d = a + r * (b - a);
  double fc = f(c);
  double fd = f(d);
  for (int i = 0; i < iters && b - a > 1e-15 * (1.0 + std::abs(a) + std::abs(b)); ++i) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - r * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + r * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

inline double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace testing_support
