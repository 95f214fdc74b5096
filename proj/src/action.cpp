#include "hamdual/action.hpp"

#include <cmath>

namespace hamdual {

namespace {

void check_terms(const ActionTerms& t, const PathGrid& g) {
  if (t.H == nullptr) throw std::invalid_argument("action: Hamiltonian missing");
  if (t.H->dim() != 2 * g.N) throw std::invalid_argument("action: Hamiltonian dimension mismatch");
  if ((t.psi1 == nullptr) != (t.psi2 == nullptr)) {
    throw std::invalid_argument("action: supply both boundary potentials or neither");
  }
  g.validate();
}

}  // namespace

void interval_point(const IntervalData& d, int k, double delta1, double delta2, Vec& x, Vec& y) {
  const int N = static_cast<int>(d.dp.cols());
  x.resize(2 * N);
  y.resize(2 * N);
  for (int i = 0; i < N; ++i) {
    x[i] = d.pbar(k, i);
    x[N + i] = d.qbar(k, i);
    y[i] = -d.dq(k, i) - delta2 * d.pbar(k, i);
    y[N + i] = d.dp(k, i) - delta1 * d.qbar(k, i);
  }
}

ActionBreakdown evaluate_action(const ActionTerms& terms, const PathGrid& g) {
  check_terms(terms, g);
  const IntervalData d = interval_data(g);
  ActionBreakdown out;
  out.h = g.h();
  out.interior.resize(static_cast<size_t>(g.M));
  Vec x;
  Vec y;
  double sum = 0.0;
  for (int k = 0; k < g.M; ++k) {
    interval_point(d, k, terms.delta1, terms.delta2, x, y);
    const double e = terms.H->primal(x).value + terms.H->dual(y).value - x.dot(y);
    out.interior[static_cast<size_t>(k)] = e;
    sum += e;
  }
  if (terms.psi1 != nullptr) {
    const Vec p0 = g.p_at(0);
    const Vec q0 = g.q_at(0);
    const Vec pM = g.p_at(g.M);
    const Vec qM = g.q_at(g.M);
    out.boundary_start = terms.psi1->primal(p0).value + terms.psi1->dual(q0).value - p0.dot(q0);
    out.boundary_end = terms.psi2->primal(qM).value + terms.psi2->dual(-pM).value + pM.dot(qM);
  }
  out.total = out.h * sum + out.boundary_start + out.boundary_end;
  return out;
}

double action_gradient(const ActionTerms& terms, const PathGrid& g, PathGrid& grad, int* nonsmooth) {
  check_terms(terms, g);
  const int N = g.N;
  const double h = g.h();
  const IntervalData d = interval_data(g);
  grad = PathGrid::zeros(g.T, N, g.M);
  Vec x;
  Vec y;
  double sum = 0.0;
  int kinks = 0;
  for (int k = 0; k < g.M; ++k) {
    interval_point(d, k, terms.delta1, terms.delta2, x, y);
    const PointEval a = terms.H->primal(x);
    const PointEval b = terms.H->dual(y);
    if (!a.unique || !b.unique) ++kinks;
    sum += a.value + b.value - x.dot(y);
    for (int i = 0; i < N; ++i) {
      const double bp = b.grad[i] - x[i];
      const double bq = b.grad[N + i] - x[N + i];
      const double g_pbar = (a.grad[i] - y[i]) - terms.delta2 * bp;
      const double g_qbar = (a.grad[N + i] - y[N + i]) - terms.delta1 * bq;
      const double g_dq = -bp;
      const double g_dp = bq;
      grad.p(k, i) += 0.5 * h * g_pbar - g_dp;
      grad.p(k + 1, i) += 0.5 * h * g_pbar + g_dp;
      grad.q(k, i) += 0.5 * h * g_qbar - g_dq;
      grad.q(k + 1, i) += 0.5 * h * g_qbar + g_dq;
    }
  }
  if (nonsmooth != nullptr) *nonsmooth = kinks;
  double total = h * sum;
  if (terms.psi1 != nullptr) {
    const Vec p0 = g.p_at(0);
    const Vec q0 = g.q_at(0);
    const Vec pM = g.p_at(g.M);
    const Vec qM = g.q_at(g.M);
    const PointEval s1 = terms.psi1->primal(p0);
    const PointEval s1d = terms.psi1->dual(q0);
    const PointEval s2 = terms.psi2->primal(qM);
    const PointEval s2d = terms.psi2->dual(-pM);
    total += s1.value + s1d.value - p0.dot(q0) + s2.value + s2d.value + pM.dot(qM);
    grad.p.row(0) += (s1.grad - q0).transpose();
    grad.q.row(0) += (s1d.grad - p0).transpose();
    grad.q.row(g.M) += (s2.grad + pM).transpose();
    grad.p.row(g.M) += (-s2d.grad + qM).transpose();
  } else {
    grad.p.row(0).setZero();
    grad.q.row(0).setZero();
  }
  return total;
}

ActionBreakdown action_I(const Hamiltonian& H, const ConvexFn& psi1, const ConvexFn& psi2,
                         const PathGrid& g) {
  return action_semiconvex(H, psi1, psi2, 0.0, 0.0, g);
}

ActionBreakdown action_J(const Hamiltonian& H, const PathGrid& g, const Vec& p0, const Vec& q0) {
  if (p0.size() != g.N || q0.size() != g.N) throw std::invalid_argument("action_J: initial data dimension mismatch");
  const double dev = std::max((g.p_at(0) - p0).cwiseAbs().maxCoeff(), (g.q_at(0) - q0).cwiseAbs().maxCoeff());
  if (dev > 1e-12 * (1.0 + p0.cwiseAbs().maxCoeff() + q0.cwiseAbs().maxCoeff())) {
    throw std::invalid_argument("action_J: path does not satisfy the initial condition (deviation " +
                                std::to_string(dev) + ")");
  }
  ExactPair Hp(H.f);
  if (!Hp.has_dual()) throw NotCoercive(Hp.dual_error());
  ActionTerms t;
  t.H = &Hp;
  return evaluate_action(t, g);
}

ActionBreakdown action_semiconvex(const Hamiltonian& H, const ConvexFn& psi1, const ConvexFn& psi2,
                                  double delta1, double delta2, const PathGrid& g) {
  ExactPair Hp(H.f);
  if (!Hp.has_dual()) throw NotCoercive(Hp.dual_error());
  ExactPair s1(psi1);
  ExactPair s2(psi2);
  if (!s1.has_dual()) throw NotCoercive(s1.dual_error());
  if (!s2.has_dual()) throw NotCoercive(s2.dual_error());
  ActionTerms t{&Hp, &s1, &s2, delta1, delta2};
  return evaluate_action(t, g);
}

double lagrangian_L(const Hamiltonian& H, const ConvexFn& psi1, const ConvexFn& psi2,
                    const PathGrid& g, const PathGrid& rs) {
  g.validate();
  rs.validate();
  if (g.M != rs.M || g.N != rs.N || g.T != rs.T) throw std::invalid_argument("lagrangian_L: shape mismatch");
  const ConvexFn Hs = H.f.conjugate();
  const IntervalData d = interval_data(g);
  const IntervalData e = interval_data(rs);
  const int N = g.N;
  Vec y1(2 * N);
  Vec y2(2 * N);
  double sum = 0.0;
  for (int k = 0; k < g.M; ++k) {
    for (int i = 0; i < N; ++i) {
      y1[i] = -d.dq(k, i);
      y1[N + i] = d.dp(k, i);
      y2[i] = -e.dq(k, i);
      y2[N + i] = e.dp(k, i);
    }
    sum += e.dp.row(k).dot(d.qbar.row(k)) - e.dq.row(k).dot(d.pbar.row(k)) + Hs.eval(y1) - Hs.eval(y2) +
           2.0 * d.dq.row(k).dot(d.pbar.row(k));
  }
  const int M = g.M;
  return g.h() * sum - g.p.row(M).dot(rs.q.row(M)) + psi2.eval(g.q_at(M)) - psi2.eval(rs.q_at(M)) +
         rs.p.row(0).dot(g.q.row(0)) + psi1.eval(g.p_at(0)) - psi1.eval(rs.p_at(0));
}

}  // namespace hamdual
