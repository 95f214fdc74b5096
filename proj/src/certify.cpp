#include "hamdual/certify.hpp"

#include <cmath>
#include <limits>
#include <memory>

namespace hamdual {

double Certificate::max_interior() const {
  double m = 0.0;
  for (double v : interior_residuals) m = std::max(m, v);
  return m;
}

double Certificate::max_weighted_interior() const { return h * max_interior(); }

double Certificate::max_inclusion() const {
  double m = 0.0;
  for (double v : inclusion_residuals) {
    if (!std::isnan(v)) m = std::max(m, v);
  }
  return m;
}

Certificate certify_terms(const ActionTerms& terms, const PathGrid& g, double tol,
                          const std::optional<std::pair<Vec, Vec>>& start) {
  Certificate c;
  c.tol = tol;
  c.h = g.h();
  c.hamiltonian = terms.H != nullptr ? terms.H->describe() : "";
  try {
    const ActionBreakdown a = evaluate_action(terms, g);
    c.action_value = a.total;
    c.interior_residuals = a.interior;
    c.boundary_start_residual = a.boundary_start;
    c.boundary_end_residual = a.boundary_end;
    if (terms.psi1 == nullptr && start) {
      c.boundary_start_residual = std::max((g.p_at(0) - start->first).cwiseAbs().maxCoeff(),
                                           (g.q_at(0) - start->second).cwiseAbs().maxCoeff());
    }

    const IntervalData d = interval_data(g);
    c.inclusion_residuals.resize(static_cast<size_t>(g.M));
    Vec x;
    Vec y;
    for (int k = 0; k < g.M; ++k) {
      interval_point(d, k, terms.delta1, terms.delta2, x, y);
      const PointEval e = terms.H->primal(x);
      c.inclusion_residuals[static_cast<size_t>(k)] =
          e.unique ? (y - e.grad).norm() : std::numeric_limits<double>::quiet_NaN();
    }

    if (terms.psi1 == nullptr) {
      double lo = std::numeric_limits<double>::infinity();
      double hi = -lo;
      for (int k = 0; k <= g.M; ++k) {
        const double v = terms.H->primal(Hamiltonian::join(g.p_at(k), g.q_at(k))).value;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
      c.energy_drift = hi - lo;
    }

    double worst = -std::numeric_limits<double>::infinity();
    for (int k = 0; k < g.M; ++k) {
      if (c.interior_residuals[static_cast<size_t>(k)] > worst) {
        worst = c.interior_residuals[static_cast<size_t>(k)];
        c.worst_interval = k;
      }
    }
    c.pass = std::isfinite(c.action_value) && c.max_weighted_interior() <= tol &&
             std::abs(c.boundary_start_residual) <= tol && std::abs(c.boundary_end_residual) <= tol;
  } catch (const std::exception& e) {
    c.note = e.what();
    c.pass = false;
    c.action_value = std::numeric_limits<double>::quiet_NaN();
  }
  return c;
}

Certificate certify(const ProblemSpec& spec, const PathGrid& g, double tol) {
  try {
    ExactPair H(spec.H.f);
    if (!H.has_dual()) {
      Certificate c;
      c.tol = tol;
      c.h = g.h();
      c.action_value = std::numeric_limits<double>::quiet_NaN();
      c.note = H.dual_error();
      return c;
    }
    if (const auto* cy = std::get_if<Cauchy>(&spec.boundary)) {
      ActionTerms t{&H, nullptr, nullptr, 0.0, 0.0};
      return certify_terms(t, g, tol, std::make_pair(cy->p0, cy->q0));
    }
    const ConvexFn* psi1 = nullptr;
    const ConvexFn* psi2 = nullptr;
    double d1 = 0.0;
    double d2 = 0.0;
    if (const auto* c = std::get_if<Connecting>(&spec.boundary)) {
      psi1 = &c->psi1;
      psi2 = &c->psi2;
    } else {
      const auto& s = std::get<SemiConvex>(spec.boundary);
      psi1 = &s.psi1;
      psi2 = &s.psi2;
      d1 = s.delta1;
      d2 = s.delta2;
    }
    ExactPair s1(*psi1);
    ExactPair s2(*psi2);
    ActionTerms t{&H, &s1, &s2, d1, d2};
    return certify_terms(t, g, tol);
  } catch (const std::exception& e) {
    Certificate c;
    c.tol = tol;
    c.h = g.h();
    c.action_value = std::numeric_limits<double>::quiet_NaN();
    c.note = e.what();
    return c;
  }
}

double default_tol(const ProblemSpec& spec) {
  double scale = 0.0;
  if (const auto* c = std::get_if<Cauchy>(&spec.boundary)) {
    scale = std::max(c->p0.squaredNorm(), c->q0.squaredNorm());
  }
  return 1e-6 * (1.0 + scale);
}

double fitted_order(const std::vector<int>& Ms, const std::vector<double>& values) {
  if (Ms.size() != values.size() || Ms.size() < 2) throw std::invalid_argument("fitted_order: need >= 2 points");
  const double n = static_cast<double>(Ms.size());
  double sx = 0.0;
  double sy = 0.0;
  double sxx = 0.0;
  double sxy = 0.0;
  for (size_t i = 0; i < Ms.size(); ++i) {
    const double x = std::log(static_cast<double>(Ms[i]));
    const double y = std::log(std::abs(values[i]));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return -(n * sxy - sx * sy) / (n * sxx - sx * sx);
}

OrderTable residual_order(const ProblemSpec& spec, const std::function<PathGrid(int)>& exact,
                          const std::vector<int>& Ms) {
  OrderTable t;
  std::vector<double> act;
  std::vector<double> inter;
  std::vector<double> incl;
  for (int M : Ms) {
    const Certificate c = certify(spec, exact(M), default_tol(spec));
    OrderRow row;
    row.M = M;
    row.action = c.action_value;
    row.max_interior = c.max_interior();
    row.max_inclusion = c.max_inclusion();
    t.rows.push_back(row);
    act.push_back(row.action);
    inter.push_back(row.max_interior);
    incl.push_back(row.max_inclusion);
  }
  auto safe = [&](const std::vector<double>& v) {
    for (double x : v) {
      if (!(std::abs(x) > 0.0) || !std::isfinite(x)) return std::numeric_limits<double>::quiet_NaN();
    }
    return fitted_order(Ms, v);
  };
  t.action_order = safe(act);
  t.interior_order = safe(inter);
  t.inclusion_order = safe(incl);
  return t;
}

}  // namespace hamdual
