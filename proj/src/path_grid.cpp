#include "hamdual/path_grid.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace hamdual {

PathGrid PathGrid::zeros(double T, int N, int M) {
  if (!(T > 0.0) || !std::isfinite(T)) throw std::invalid_argument("PathGrid: horizon must be positive");
  if (N < 1 || 2 * N > kMaxDim) throw std::invalid_argument("PathGrid: N out of range");
  if (M < 1) throw std::invalid_argument("PathGrid: need at least one interval");
  PathGrid g;
  g.T = T;
  g.N = N;
  g.M = M;
  g.p = Eigen::MatrixXd::Zero(M + 1, N);
  g.q = Eigen::MatrixXd::Zero(M + 1, N);
  return g;
}

void PathGrid::validate() const {
  if (p.rows() != M + 1 || q.rows() != M + 1 || p.cols() != N || q.cols() != N) {
    throw std::invalid_argument("PathGrid: node arrays have the wrong shape");
  }
  if (!p.allFinite() || !q.allFinite()) throw std::invalid_argument("PathGrid: non-finite entry");
}

IntervalData interval_data(const PathGrid& g) {
  const int M = g.M;
  const double h = g.h();
  IntervalData d;
  d.dp = (g.p.bottomRows(M) - g.p.topRows(M)) / h;
  d.dq = (g.q.bottomRows(M) - g.q.topRows(M)) / h;
  d.pbar = 0.5 * (g.p.bottomRows(M) + g.p.topRows(M));
  d.qbar = 0.5 * (g.q.bottomRows(M) + g.q.topRows(M));
  return d;
}

double sbp_check(const PathGrid& g) {
  const IntervalData d = interval_data(g);
  double lhs = 0.0;
  for (int k = 0; k < g.M; ++k) {
    lhs += d.dq.row(k).dot(d.pbar.row(k)) + d.dp.row(k).dot(d.qbar.row(k));
  }
  lhs *= g.h();
  const double rhs = g.p.row(g.M).dot(g.q.row(g.M)) - g.p.row(0).dot(g.q.row(0));
  return std::abs(lhs - rhs);
}

double path_scale(const PathGrid& g) {
  double nodes = 0.0;
  for (int k = 0; k <= g.M; ++k) {
    nodes = std::max(nodes, g.p.row(k).squaredNorm() + g.q.row(k).squaredNorm());
  }
  const IntervalData d = interval_data(g);
  double slopes = 0.0;
  for (int k = 0; k < g.M; ++k) {
    slopes = std::max(slopes, d.dp.row(k).squaredNorm() + d.dq.row(k).squaredNorm());
  }
  return 1.0 + nodes + g.T * slopes;
}

double l2_nodes(const Eigen::MatrixXd& x, double h) {
  const int last = static_cast<int>(x.rows()) - 1;
  double s = 0.0;
  for (int k = 0; k <= last; ++k) {
    const double w = (k == 0 || k == last) ? 0.5 : 1.0;
    s += w * x.row(k).squaredNorm();
  }
  return std::sqrt(h * s);
}

double l2_intervals(const Eigen::MatrixXd& d, double h) {
  return std::sqrt(h * d.squaredNorm());
}

double w12_norm(const PathGrid& g) {
  const IntervalData d = interval_data(g);
  const double h = g.h();
  const double a = l2_nodes(g.p, h);
  const double b = l2_intervals(d.dp, h);
  const double c = l2_nodes(g.q, h);
  const double e = l2_intervals(d.dq, h);
  return std::sqrt(a * a + b * b + c * c + e * e);
}

double sup_distance(const PathGrid& a, const PathGrid& b) {
  if (a.M != b.M || a.N != b.N) throw std::invalid_argument("sup_distance: shape mismatch");
  return std::max((a.p - b.p).cwiseAbs().maxCoeff(), (a.q - b.q).cwiseAbs().maxCoeff());
}

std::string path_to_csv(const PathGrid& g) {
  std::string out = "t";
  for (int i = 1; i <= g.N; ++i) out += ",p" + std::to_string(i);
  for (int i = 1; i <= g.N; ++i) out += ",q" + std::to_string(i);
  out += "\n";
  char buf[40];
  auto put = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out += buf;
  };
  for (int k = 0; k <= g.M; ++k) {
    put(g.t(k));
    for (int i = 0; i < g.N; ++i) {
      out += ",";
      put(g.p(k, i));
    }
    for (int i = 0; i < g.N; ++i) {
      out += ",";
      put(g.q(k, i));
    }
    out += "\n";
  }
  return out;
}

}  // namespace hamdual
