#include "hamdual/solver.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "hamdual/lbfgs.hpp"
#include "hamdual/newton.hpp"
#include "hamdual/regularize.hpp"

namespace hamdual {

const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Converged:
      return "Converged";
    case SolveStatus::StalledAboveTol:
      return "StalledAboveTol";
    case SolveStatus::HypothesisFailed:
      return "HypothesisFailed";
  }
  return "?";
}

std::unique_ptr<FenchelPair> stage_pair(const Hamiltonian& H, double eps, double lambda, double r) {
  if (lambda > 0.0) return std::make_unique<InfConvolved>(H.f, lambda, r, eps);
  if (eps > 0.0) return std::make_unique<EpsPerturbed>(H.f, eps);
  return std::make_unique<ExactPair>(H.f);
}

std::vector<std::pair<double, double>> stage_schedule(const SolveParams& params) {
  const auto& e = params.eps_schedule;
  const auto& l = params.lambda_schedule;
  auto check = [](const std::vector<double>& v, const char* name) {
    for (size_t i = 0; i < v.size(); ++i) {
      if (!(v[i] > 0.0) || !std::isfinite(v[i])) {
        throw std::invalid_argument(std::string(name) + " schedule entries must be positive");
      }
      if (i > 0 && !(v[i] < v[i - 1])) {
        throw std::invalid_argument(std::string(name) + " schedule must be strictly decreasing");
      }
    }
  };
  check(e, "eps");
  check(l, "lambda");
  const size_t n = std::max<size_t>({e.size(), l.size(), 1});
  std::vector<std::pair<double, double>> out;
  for (size_t i = 0; i < n; ++i) {
    const double ei = e.empty() ? 0.0 : e[std::min(i, e.size() - 1)];
    const double li = l.empty() ? 0.0 : l[std::min(i, l.size() - 1)];
    out.emplace_back(ei, li);
  }
  return out;
}

PathGrid initial_path(const ProblemSpec& spec, int M) {
  PathGrid g = PathGrid::zeros(spec.T, spec.H.N, M);
  if (const auto* c = std::get_if<Cauchy>(&spec.boundary)) {
    for (int k = 0; k <= M; ++k) {
      g.p.row(k) = c->p0.transpose();
      g.q.row(k) = c->q0.transpose();
    }
  }
  return g;
}

namespace {

struct StageTerms {
  std::unique_ptr<FenchelPair> H;
  std::unique_ptr<FenchelPair> psi1;
  std::unique_ptr<FenchelPair> psi2;
  ActionTerms terms;
};

std::unique_ptr<FenchelPair> potential_pair(const ConvexFn& psi, double eps) {
  auto exact = std::make_unique<ExactPair>(psi);
  if (exact->has_dual()) return exact;
  return std::make_unique<EpsPerturbed>(psi, eps > 0.0 ? eps : 1e-8);
}

StageTerms build_terms(const ProblemSpec& spec, double eps, double lambda, double r) {
  StageTerms st;
  st.H = stage_pair(spec.H, eps, lambda, r);
  st.terms.H = st.H.get();
  if (const auto* c = std::get_if<Connecting>(&spec.boundary)) {
    st.psi1 = potential_pair(c->psi1, eps);
    st.psi2 = potential_pair(c->psi2, eps);
  } else if (const auto* s = std::get_if<SemiConvex>(&spec.boundary)) {
    st.psi1 = potential_pair(s->psi1, eps);
    st.psi2 = potential_pair(s->psi2, eps);
    st.terms.delta1 = s->delta1;
    st.terms.delta2 = s->delta2;
  }
  st.terms.psi1 = st.psi1.get();
  st.terms.psi2 = st.psi2.get();
  return st;
}

// Free variables: every node, or nodes 1..M when the start is fixed.
struct Packing {
  int first = 0;
  int N = 1;
  int M = 1;

  Eigen::Index size() const { return static_cast<Eigen::Index>(M + 1 - first) * 2 * N; }

  Eigen::VectorXd pack(const PathGrid& g) const {
    Eigen::VectorXd v(size());
    Eigen::Index j = 0;
    for (int k = first; k <= M; ++k) {
      for (int i = 0; i < N; ++i) v[j++] = g.p(k, i);
      for (int i = 0; i < N; ++i) v[j++] = g.q(k, i);
    }
    return v;
  }

  void unpack(const Eigen::VectorXd& v, PathGrid& g) const {
    Eigen::Index j = 0;
    for (int k = first; k <= M; ++k) {
      for (int i = 0; i < N; ++i) g.p(k, i) = v[j++];
      for (int i = 0; i < N; ++i) g.q(k, i) = v[j++];
    }
  }
};

double max_derivative(const PathGrid& g) {
  const IntervalData d = interval_data(g);
  double m = 0.0;
  for (int k = 0; k < g.M; ++k) m = std::max(m, d.dp.row(k).norm() + d.dq.row(k).norm());
  return m;
}

double prox_displacement(const Hamiltonian& H, double lambda, double r, const PathGrid& g) {
  const InfConvolved Hl(H.f, lambda, r);
  double m = 0.0;
  for (int k = 0; k <= g.M; ++k) {
    const Vec x = Hamiltonian::join(g.p_at(k), g.q_at(k));
    m = std::max(m, (Hl.proximal_point(x) - x).norm());
  }
  return m;
}

}  // namespace

double stage_action(const ProblemSpec& spec, const PathGrid& g, double eps, double lambda, double r) {
  StageTerms st = build_terms(spec, eps, lambda, r);
  return evaluate_action(st.terms, g).total;
}

PathGrid gradient_action(const ProblemSpec& spec, const PathGrid& g, double eps, double lambda, double r,
                         std::vector<std::string>* log) {
  StageTerms st = build_terms(spec, eps, lambda, r);
  PathGrid grad;
  PathGrid at = g;
  std::mt19937_64 rng(0x5eed);
  std::normal_distribution<double> nd(0.0, 1.0);
  const double amp = 1e-10 * std::sqrt(path_scale(g));
  for (int attempt = 0; attempt < 4; ++attempt) {
    int kinks = 0;
    action_gradient(st.terms, at, grad, &kinks);
    if (kinks == 0) return grad;
    if (log != nullptr) {
      std::ostringstream os;
      os << "gradient_action: " << kinks << " nonsmooth interval(s); perturbing path by " << amp;
      log->push_back(os.str());
    }
    const int first = spec.is_cauchy() ? 1 : 0;
    for (int k = first; k <= at.M; ++k) {
      for (int i = 0; i < at.N; ++i) {
        at.p(k, i) += amp * nd(rng);
        at.q(k, i) += amp * nd(rng);
      }
    }
  }
  return grad;
}

SolveResult solve(const ProblemSpec& spec, const SolveParams& params) {
  if (params.M < 1) throw std::invalid_argument("solve: M must be positive");
  if (params.max_iters < 1) throw std::invalid_argument("solve: max_iters must be positive");
  if (spec.H.N < 1) throw std::invalid_argument("solve: Hamiltonian missing");
  if (const auto* c = std::get_if<Cauchy>(&spec.boundary)) {
    if (c->p0.size() != spec.H.N || c->q0.size() != spec.H.N) {
      throw std::invalid_argument("solve: initial data dimension mismatch");
    }
  }
  const auto schedule = stage_schedule(params);

  SolveResult res;
  res.tol_zero = params.tol_zero.value_or(default_tol(spec));
  if (!(res.tol_zero > 0.0)) throw std::invalid_argument("solve: tol_zero must be positive");
  if (params.run_checks) res.hypotheses = check_problem(spec, 4000, params.seed);

  PathGrid g = params.initial ? *params.initial : initial_path(spec, params.M);
  if (g.M != params.M || g.N != spec.H.N || g.T != spec.T) throw std::invalid_argument("solve: initial path has the wrong shape");
  g.validate();

  if (const auto* s = std::get_if<SemiConvex>(&spec.boundary)) {
    const double bound = 1.0 / (2.0 * spec.T);
    if (std::abs(s->delta1) >= bound || std::abs(s->delta2) >= bound) {
      res.status = SolveStatus::HypothesisFailed;
      res.path = g;
      res.log.push_back("semiconvex shifts violate |delta_i| < 1/(2T); no solve attempted");
      res.certificate = certify(spec, g, res.tol_zero);
      return res;
    }
  }

  Packing pk;
  pk.first = spec.is_cauchy() ? 1 : 0;
  pk.N = spec.H.N;
  pk.M = params.M;
  if (pk.size() == 0) throw std::invalid_argument("solve: no free variables");

  if (!params.initial) {
    std::mt19937_64 rng(params.seed);
    std::normal_distribution<double> nd(0.0, 1.0);
    for (int k = pk.first; k <= g.M; ++k) {
      for (int i = 0; i < g.N; ++i) {
        g.p(k, i) += 1e-8 * nd(rng);
        g.q(k, i) += 1e-8 * nd(rng);
      }
    }
  }

  std::unique_ptr<StageTerms> last;
  for (const auto& [eps, lambda] : schedule) {
    auto st = std::make_unique<StageTerms>(build_terms(spec, eps, lambda, params.r));
    PathGrid work = g;
    PathGrid grad;
    int evals = 0;
    auto fg = [&](const Eigen::VectorXd& v, Eigen::VectorXd& gv) {
      pk.unpack(v, work);
      ++evals;
      double f;
      try {
        f = action_gradient(st->terms, work, grad);
      } catch (const std::out_of_range&) {
        gv = Eigen::VectorXd::Zero(v.size());
        return std::numeric_limits<double>::infinity();
      }
      gv = pk.pack(grad);
      return f;
    };

    StageRecord rec;
    rec.eps = eps;
    rec.lambda = lambda;
    Eigen::VectorXd x0 = pk.pack(g);
    Eigen::VectorXd g0(x0.size());
    rec.action_start = fg(x0, g0);

    numerics::NewtonOptions nopt;
    nopt.block = 2 * pk.N;
    nopt.f_target = std::min(1e-6 * res.tol_zero, 1e-13);
    nopt.max_iterations = std::min(params.max_iters, 100);
    auto nres = numerics::newton_banded(fg, x0, nopt);
    rec.iterations = nres.iterations;
    std::string reason = "newton:" + nres.stop_reason;
    Eigen::VectorXd xbest = nres.x;
    double fbest = nres.f;

    if (fbest > nopt.f_target && params.max_iters > rec.iterations) {
      numerics::LbfgsOptions opt;
      opt.memory = 10;
      opt.armijo = 1e-4;
      opt.max_halvings = 50;
      opt.max_iterations = params.max_iters - rec.iterations;
      opt.f_target = nopt.f_target;
      opt.stall_window = 50;
      const auto lres = numerics::lbfgs_minimize(fg, xbest, opt);
      rec.iterations += lres.iterations;
      reason += ", lbfgs:" + lres.stop_reason;
      if (lres.f <= fbest) {
        xbest = lres.x;
        fbest = lres.f;
      }
      if (fbest > nopt.f_target && params.max_iters > rec.iterations) {
        nopt.max_iterations = std::min(params.max_iters - rec.iterations, 100);
        nres = numerics::newton_banded(fg, xbest, nopt);
        rec.iterations += nres.iterations;
        reason += ", newton:" + nres.stop_reason;
        if (nres.f <= fbest) {
          xbest = nres.x;
          fbest = nres.f;
        }
      }
    }
    struct {
      Eigen::VectorXd x;
      double f;
      std::string stop_reason;
    } out{xbest, fbest, reason};
    pk.unpack(out.x, g);
    rec.action_end = out.f;
    rec.stop_reason = out.stop_reason;
    rec.max_derivative = max_derivative(g);
    if (lambda > 0.0) {
      try {
        rec.prox_displacement = prox_displacement(spec.H, lambda, params.r, g);
      } catch (const std::exception& e) {
        res.log.push_back(std::string("prox displacement unavailable: ") + e.what());
      }
    }
    std::ostringstream os;
    os << "stage eps=" << eps << " lambda=" << lambda << ": " << rec.action_start << " -> " << rec.action_end
       << " in " << rec.iterations << " iterations (" << rec.stop_reason << ")";
    res.log.push_back(os.str());
    res.stages.push_back(rec);
    last = std::move(st);
  }

  res.path = g;
  std::optional<std::pair<Vec, Vec>> start;
  if (const auto* c = std::get_if<Cauchy>(&spec.boundary)) start = std::make_pair(c->p0, c->q0);
  res.certificate = certify_terms(last->terms, g, res.tol_zero, start);
  const bool smoothed = schedule.back().first > 0.0 || schedule.back().second > 0.0;
  if (smoothed) {
    Certificate raw = certify(spec, g, res.tol_zero);
    if (raw.note.empty()) {
      res.raw_certificate = raw;
    } else {
      res.log.push_back("raw certificate unavailable: " + raw.note);
    }
  } else {
    res.raw_certificate = res.certificate;
  }
  const bool ok = std::isfinite(res.certificate.action_value) && res.certificate.action_value <= res.tol_zero &&
                  (!spec.is_cauchy() || res.certificate.boundary_start_residual <= res.tol_zero);
  res.status = ok ? SolveStatus::Converged : SolveStatus::StalledAboveTol;
  return res;
}

}  // namespace hamdual
