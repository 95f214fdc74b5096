#pragma once

#include <string>
#include <utility>

#include <Eigen/Dense>

#include "hamdual/types.hpp"

namespace hamdual {

/// Trajectory (p, q) at nodes t_k = k h, h = T / M. Rows are nodes.
struct PathGrid {
  double T = 1.0;
  int N = 1;
  int M = 1;
  Eigen::MatrixXd p;  // (M+1) x N
  Eigen::MatrixXd q;  // (M+1) x N

  static PathGrid zeros(double T, int N, int M);

  /// fn(t, p, q) fills p and q (size N) at time t.
  template <class F>
  static PathGrid sample(double T, int N, int M, F&& fn) {
    PathGrid g = zeros(T, N, M);
    Vec pk(N);
    Vec qk(N);
    for (int k = 0; k <= M; ++k) {
      fn(g.t(k), pk, qk);
      g.p.row(k) = pk.transpose();
      g.q.row(k) = qk.transpose();
    }
    return g;
  }

  double h() const { return T / M; }
  double t(int k) const { return k == M ? T : k * h(); }
  Vec p_at(int k) const { return p.row(k).transpose(); }
  Vec q_at(int k) const { return q.row(k).transpose(); }
  void validate() const;
};

/// Per-interval difference quotients and midpoint averages, M x N each.
struct IntervalData {
  Eigen::MatrixXd dp;
  Eigen::MatrixXd dq;
  Eigen::MatrixXd pbar;
  Eigen::MatrixXd qbar;
};

IntervalData interval_data(const PathGrid& g);

/// |h sum_k (dq_k.pbar_k + dp_k.qbar_k) - (p_M.q_M - p_0.q_0)|
double sbp_check(const PathGrid& g);

/// 1 + max_k |(p_k, q_k)|^2 + T max_k |(dp_k, dq_k)|^2. Magnitude used to
/// scale rounding tolerances.
double path_scale(const PathGrid& g);

/// Trapezoid L2 norm of the nodes of one component matrix.
double l2_nodes(const Eigen::MatrixXd& x, double h);
/// L2 norm of per-interval values.
double l2_intervals(const Eigen::MatrixXd& d, double h);

/// sqrt(|p|^2 + |p'|^2 + |q|^2 + |q'|^2) in discrete L2.
double w12_norm(const PathGrid& g);

/// max over nodes and components of |a - b|.
double sup_distance(const PathGrid& a, const PathGrid& b);

/// CSV with header t,p1..pN,q1..qN and %.17g numbers.
std::string path_to_csv(const PathGrid& g);

}  // namespace hamdual
