#include "hamdual/newton.hpp"

#include <cmath>
#include <vector>

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

namespace hamdual::numerics {

namespace {

using Eigen::VectorXd;

// Central-difference Hessian using a three-colouring of the blocks.
Eigen::SparseMatrix<double> banded_hessian(const ObjectiveFn& fg, const VectorXd& x, int block, double rel, int& evals) {
  const Eigen::Index n = x.size();
  const Eigen::Index nb = n / block;
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<size_t>(n) * static_cast<size_t>(3 * block));
  VectorXd xp = x;
  VectorXd xm = x;
  VectorXd gp(n);
  VectorXd gm(n);
  VectorXd step(n);
  for (Eigen::Index i = 0; i < n; ++i) step[i] = rel * (1.0 + std::abs(x[i]));
  for (int color = 0; color < 3; ++color) {
    for (int j = 0; j < block; ++j) {
      xp = x;
      xm = x;
      for (Eigen::Index b = color; b < nb; b += 3) {
        const Eigen::Index i = b * block + j;
        xp[i] += step[i];
        xm[i] -= step[i];
      }
      const double fp = fg(xp, gp);
      const double fm = fg(xm, gm);
      evals += 2;
      if (!std::isfinite(fp) || !std::isfinite(fm)) continue;
      for (Eigen::Index b = color; b < nb; b += 3) {
        const Eigen::Index col = b * block + j;
        const Eigen::Index lo = std::max<Eigen::Index>(0, b - 1) * block;
        const Eigen::Index hi = std::min<Eigen::Index>(nb, b + 2) * block;
        for (Eigen::Index row = lo; row < hi; ++row) {
          const double v = (gp[row] - gm[row]) / (2.0 * step[col]);
          if (v != 0.0) trip.emplace_back(row, col, v);
        }
      }
    }
  }
  Eigen::SparseMatrix<double> Hm(n, n);
  Hm.setFromTriplets(trip.begin(), trip.end());
  Eigen::SparseMatrix<double> Ht = Hm.transpose();
  return 0.5 * (Hm + Ht);
}

}  // namespace

NewtonResult newton_banded(const ObjectiveFn& fg, VectorXd x0, const NewtonOptions& options) {
  const Eigen::Index n = x0.size();
  if (options.block < 1 || n % options.block != 0) throw std::invalid_argument("newton_banded: bad block size");
  NewtonResult out;
  VectorXd x = std::move(x0);
  VectorXd g(n);
  double f = fg(x, g);
  ++out.gradient_evaluations;
  double mu = -1.0;
  int since_progress = 0;
  int iter = 0;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt;
  Eigen::SparseMatrix<double> I(n, n);
  I.setIdentity();

  for (; iter < options.max_iterations; ++iter) {
    if (f <= options.f_target) {
      out.stop_reason = "target";
      break;
    }
    if (!std::isfinite(f)) {
      out.stop_reason = "singular";
      break;
    }
    const Eigen::SparseMatrix<double> Hs = banded_hessian(fg, x, options.block, options.fd_step, out.gradient_evaluations);
    double diag_scale = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) diag_scale = std::max(diag_scale, std::abs(Hs.coeff(i, i)));
    if (!(diag_scale > 0.0)) diag_scale = 1.0;
    if (mu < 0.0) mu = 1e-6 * diag_scale;

    bool accepted = false;
    for (int attempt = 0; attempt < 40; ++attempt) {
      const Eigen::SparseMatrix<double> K = Hs + mu * I;
      ldlt.compute(K);
      if (ldlt.info() != Eigen::Success || (ldlt.vectorD().array() <= 0.0).any()) {
        mu *= 4.0;
        continue;
      }
      const VectorXd d = ldlt.solve(-g);
      VectorXd xn = x + d;
      VectorXd gn(n);
      const double fn = fg(xn, gn);
      ++out.gradient_evaluations;
      if (std::isfinite(fn) && fn < f) {
        const double gain = f - fn;
        x = std::move(xn);
        g = std::move(gn);
        if (gain > 1e-3 * std::abs(f)) {
          since_progress = 0;
        } else {
          ++since_progress;
        }
        f = fn;
        mu = std::max(mu / 3.0, 1e-14 * diag_scale);
        accepted = true;
        break;
      }
      mu *= 4.0;
    }
    if (!accepted) {
      out.stop_reason = "singular";
      ++iter;
      break;
    }
    if (since_progress >= options.stall_window) {
      ++iter;
      out.stop_reason = f <= options.f_target ? "target" : "stall";
      break;
    }
  }
  if (out.stop_reason.empty()) out.stop_reason = f <= options.f_target ? "target" : "max_iterations";
  out.x = std::move(x);
  out.f = f;
  out.iterations = iter;
  return out;
}

}  // namespace hamdual::numerics
