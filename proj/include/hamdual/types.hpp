#pragma once

#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace hamdual {

// Points live in R^n with n <= 16 (2N for a Hamiltonian with N <= 8), so
// vectors are stack-allocated.
constexpr int kMaxDim = 16;

using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, kMaxDim, 1>;
using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxDim, kMaxDim>;

/// Axis-aligned working box. Numerical conjugation, sampling checks and
/// generic inner minimizations are confined to it.
struct Box {
  Vec lo;
  Vec hi;

  static Box cube(int n, double half_width) {
    return Box{Vec::Constant(n, -half_width), Vec::Constant(n, half_width)};
  }

  int dim() const { return static_cast<int>(lo.size()); }

  bool contains(const Vec& x, double slack = 0.0) const {
    for (int i = 0; i < dim(); ++i) {
      if (x[i] < lo[i] - slack || x[i] > hi[i] + slack) return false;
    }
    return true;
  }

  Vec clamp(const Vec& x) const { return x.cwiseMax(lo).cwiseMin(hi); }
};

/// Raised when a conjugate is requested for a function whose conjugate is not
/// finite everywhere (not coercive). Perturb first.
class NotCoercive : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Inner minimization (prox, inf-convolution) failed to reach its tolerance.
class InnerSolveError : public std::runtime_error {
 public:
  InnerSolveError(const std::string& what, double residual)
      : std::runtime_error(what + " (residual " + std::to_string(residual) + ")"),
        residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

inline Vec zeros(int n) { return Vec::Zero(n); }

}  // namespace hamdual
