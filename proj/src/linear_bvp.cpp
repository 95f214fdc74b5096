#include <cmath>
#include <sstream>

#include "hamdual/solver.hpp"

namespace hamdual {

namespace {

using Mat2 = Eigen::Matrix2d;
using Vec2 = Eigen::Vector2d;

// One RK4 step of z' = K z + F(t) with F linear on the step: returns z_{k+1}.
Vec2 rk4_step(const Mat2& K, const Vec2& z, const Vec2& F0, const Vec2& F1, double h) {
  const Vec2 Fm = 0.5 * (F0 + F1);
  const Vec2 k1 = K * z + F0;
  const Vec2 k2 = K * (z + 0.5 * h * k1) + Fm;
  const Vec2 k3 = K * (z + 0.5 * h * k2) + Fm;
  const Vec2 k4 = K * (z + h * k3) + F1;
  return z + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

}  // namespace

PathGrid solve_linear_bvp(double delta1, double delta2, const PathGrid& forcing, const Vec& x, const Vec& y) {
  forcing.validate();
  const int N = forcing.N;
  const int M = forcing.M;
  const double T = forcing.T;
  const double h = forcing.h();
  if (x.size() != N || y.size() != N) throw std::invalid_argument("solve_linear_bvp: boundary data dimension mismatch");

  // Each coordinate is an independent 2x2 system in z = (r_i, s_i):
  // r' = delta2 s + f, s' = -delta1 r - g.
  Mat2 K;
  K << 0.0, delta2, -delta1, 0.0;

  // Fundamental matrix over [0, T] for the homogeneous part.
  Mat2 Phi = Mat2::Identity();
  for (int k = 0; k < M; ++k) {
    Phi.col(0) = rk4_step(K, Phi.col(0), Vec2::Zero(), Vec2::Zero(), h);
    Phi.col(1) = rk4_step(K, Phi.col(1), Vec2::Zero(), Vec2::Zero(), h);
  }
  // Exact (1,1) entry of exp(K T); K^2 = -delta1 delta2 I.
  const double w2 = delta1 * delta2;
  double exact = 1.0;
  double scale = 1.0 + std::abs(delta1 * T) + std::abs(delta2 * T);
  if (w2 > 0.0) {
    exact = std::cos(std::sqrt(w2) * T);
  } else if (w2 < 0.0) {
    exact = std::cosh(std::sqrt(-w2) * T);
    scale = std::max(scale, exact);
  }
  if (std::abs(exact) <= 1e-8 * scale || std::abs(Phi(1, 1)) <= 1e-10 * Phi.cwiseAbs().maxCoeff()) {
    std::ostringstream os;
    os << "solve_linear_bvp: shooting matrix is singular (resonance at delta1=" << delta1 << ", delta2=" << delta2
       << ", T=" << T << ")";
    throw ResonanceError(os.str());
  }

  PathGrid out = PathGrid::zeros(T, N, M);
  for (int i = 0; i < N; ++i) {
    auto F = [&](int k) { return Vec2(forcing.p(k, i), -forcing.q(k, i)); };
    // Particular solution from z(0) = (x_i, 0).
    Vec2 z(x[i], 0.0);
    for (int k = 0; k < M; ++k) z = rk4_step(K, z, F(k), F(k + 1), h);
    const double s0 = (y[i] - z[1]) / Phi(1, 1);
    z = Vec2(x[i], s0);
    out.p(0, i) = z[0];
    out.q(0, i) = z[1];
    for (int k = 0; k < M; ++k) {
      z = rk4_step(K, z, F(k), F(k + 1), h);
      out.p(k + 1, i) = z[0];
      out.q(k + 1, i) = z[1];
    }
    out.q(M, i) = y[i];
  }
  return out;
}

}  // namespace hamdual
