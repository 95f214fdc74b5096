#include "hamdual/conditions.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace hamdual {

const char* to_string(CheckStatus s) {
  switch (s) {
    case CheckStatus::VerifiedOnSamples:
      return "VERIFIED-ON-SAMPLES";
    case CheckStatus::Failed:
      return "FAILED";
    case CheckStatus::Skipped:
      return "SKIPPED";
  }
  return "?";
}

bool HypothesisReport::all_passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckReport& c) { return c.passed(); });
}

namespace {

constexpr int kMaxCorners = 1024;

// Uniform samples of the box followed by its corners.
std::vector<Vec> box_samples(const Box& box, int samples, std::uint64_t seed) {
  const int n = box.dim();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<Vec> pts;
  pts.reserve(static_cast<size_t>(samples) + kMaxCorners);
  for (int s = 0; s < samples; ++s) {
    Vec x(n);
    for (int i = 0; i < n; ++i) x[i] = box.lo[i] + u(rng) * (box.hi[i] - box.lo[i]);
    pts.push_back(x);
  }
  const long corners = std::min<long>(1L << std::min(n, 20), kMaxCorners);
  for (long c = 0; c < corners; ++c) {
    Vec x(n);
    for (int i = 0; i < n; ++i) x[i] = ((c >> i) & 1) ? box.hi[i] : box.lo[i];
    pts.push_back(x);
  }
  return pts;
}

// Samples with sup-norm (relative to the box half-widths) in [0.8, 1].
std::vector<Vec> shell_samples(const Box& box, int samples, std::uint64_t seed) {
  const int n = box.dim();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<int> pick(0, n - 1);
  const Vec c = 0.5 * (box.lo + box.hi);
  const Vec half = 0.5 * (box.hi - box.lo);
  std::vector<Vec> pts;
  for (int s = 0; s < samples; ++s) {
    Vec x(n);
    for (int i = 0; i < n; ++i) x[i] = c[i] + (2.0 * u(rng) - 1.0) * half[i];
    const int a = pick(rng);
    const double mag = 0.8 + 0.2 * u(rng);
    x[a] = c[a] + (u(rng) < 0.5 ? -mag : mag) * half[a];
    pts.push_back(x);
  }
  const long corners = std::min<long>(1L << std::min(n, 20), kMaxCorners);
  for (long k = 0; k < corners; ++k) {
    Vec x(n);
    for (int i = 0; i < n; ++i) x[i] = ((k >> i) & 1) ? box.hi[i] : box.lo[i];
    pts.push_back(x);
  }
  return pts;
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(10);
  os << v;
  return os.str();
}

}  // namespace

CheckReport check_subquadratic(const Hamiltonian& H, const GrowthCert& cert, const Box& box,
                               int samples, std::uint64_t seed) {
  CheckReport rep;
  rep.name = "subquadratic";
  if (samples < 1000) throw std::invalid_argument("check_subquadratic: need at least 1000 samples");
  double worst_upper = std::numeric_limits<double>::infinity();
  double worst_lower = std::numeric_limits<double>::infinity();
  Vec wit_upper;
  Vec wit_lower;
  for (const Vec& x : box_samples(box, samples, seed)) {
    const double h = H.f.eval(x);
    const double up = 0.5 * cert.beta * x.squaredNorm() + cert.gamma - h;
    const double lo = h + cert.alpha;
    if (up < worst_upper) {
      worst_upper = up;
      wit_upper = x;
    }
    if (lo < worst_lower) {
      worst_lower = lo;
      wit_lower = x;
    }
  }
  rep.values["upper_margin"] = worst_upper;
  rep.values["lower_margin"] = worst_lower;
  rep.values["beta"] = cert.beta;
  const double tol = 1e-12;
  if (worst_upper < -tol * (1.0 + std::abs(cert.gamma))) {
    rep.status = CheckStatus::Failed;
    rep.witness = wit_upper;
    rep.detail = "upper bound beta/2 |x|^2 + gamma violated by " + fmt(-worst_upper);
  } else if (worst_lower < -tol * (1.0 + std::abs(cert.alpha))) {
    rep.status = CheckStatus::Failed;
    rep.witness = wit_lower;
    rep.detail = "lower bound -alpha violated by " + fmt(-worst_lower);
  } else {
    rep.status = CheckStatus::VerifiedOnSamples;
    rep.detail = "bounds hold at every sample (sampled, not proved)";
  }
  return rep;
}

CheckReport check_power_growth(const Hamiltonian& H, const GrowthCert& cert, const Box& box,
                               int samples, std::uint64_t seed) {
  CheckReport rep;
  rep.name = "power_growth";
  double worst_upper = std::numeric_limits<double>::infinity();
  double worst_lower = std::numeric_limits<double>::infinity();
  Vec wit_upper;
  Vec wit_lower;
  const int N = H.N;
  for (const Vec& x : box_samples(box, samples, seed)) {
    const double h = H.f.eval(x);
    const double np = x.head(N).norm();
    const double nq = x.tail(N).norm();
    const double up = cert.beta * (std::pow(np, cert.r) + std::pow(nq, cert.r) + 1.0) - h;
    const double lo = h + cert.alpha;
    if (up < worst_upper) {
      worst_upper = up;
      wit_upper = x;
    }
    if (lo < worst_lower) {
      worst_lower = lo;
      wit_lower = x;
    }
  }
  rep.values["upper_margin"] = worst_upper;
  rep.values["lower_margin"] = worst_lower;
  rep.values["r"] = cert.r;
  if (worst_upper < -1e-12) {
    rep.status = CheckStatus::Failed;
    rep.witness = wit_upper;
    rep.detail = "upper bound beta (|p|^r + |q|^r + 1) violated by " + fmt(-worst_upper);
  } else if (worst_lower < -1e-12) {
    rep.status = CheckStatus::Failed;
    rep.witness = wit_lower;
    rep.detail = "lower bound -alpha violated by " + fmt(-worst_lower);
  } else {
    rep.status = CheckStatus::VerifiedOnSamples;
    rep.detail = "bounds hold at every sample (sampled, not proved)";
  }
  return rep;
}

double beta_threshold(double T) {
  if (!(T > 0.0)) throw std::invalid_argument("beta_threshold: T must be positive");
  return 1.0 / (2.0 * std::max(2.0 * T * T, 1.0));
}

CheckReport check_psi_coercivity(const ConvexFn& psi, double T, const Box& box,
                                 std::optional<double> threshold, int samples, std::uint64_t seed) {
  CheckReport rep;
  rep.name = "psi_quadratic_growth";
  const double thr = threshold.value_or(2.0 * T);
  double est = std::numeric_limits<double>::infinity();
  Vec wit;
  double max_norm = 0.0;
  for (const Vec& x : shell_samples(box, samples, seed)) {
    const double n2 = x.squaredNorm();
    if (n2 == 0.0) continue;
    max_norm = std::max(max_norm, std::sqrt(n2));
    const double ratio = psi.eval(x) / n2;
    if (ratio < est) {
      est = ratio;
      wit = x;
    }
  }
  rep.values["estimate"] = est;
  rep.values["threshold"] = thr;
  rep.values["margin"] = est / thr;
  std::string note = "liminf estimated on the outer 20% shell of the box (sampled, not proved)";
  if (max_norm < 10.0) note += "; box holds no samples with |x| >= 10";
  if (est > 1.05 * thr) {
    rep.status = CheckStatus::VerifiedOnSamples;
    rep.detail = note;
  } else {
    rep.status = CheckStatus::Failed;
    rep.witness = wit;
    rep.detail = "psi(x)/|x|^2 = " + fmt(est) + " does not exceed " + fmt(thr) + " by 5%; " + note;
  }
  return rep;
}

CheckReport check_psi_growth(const ConvexFn& psi, const Box& box, int samples, std::uint64_t seed) {
  CheckReport rep;
  rep.name = "psi_coercive";
  const Vec c = 0.5 * (box.lo + box.hi);
  const double center = psi.eval(c);
  double est = std::numeric_limits<double>::infinity();
  Vec wit;
  for (const Vec& x : shell_samples(box, samples, seed)) {
    const double v = psi.eval(x);
    if (v < est) {
      est = v;
      wit = x;
    }
  }
  rep.values["shell_min"] = est;
  rep.values["center"] = center;
  if (est > center) {
    rep.status = CheckStatus::VerifiedOnSamples;
    rep.detail = "minimum over the outer shell exceeds the central value (sampled, not proved)";
  } else {
    rep.status = CheckStatus::Failed;
    rep.witness = wit;
    rep.detail = "psi does not grow toward the box boundary";
  }
  return rep;
}

SemiconvexThresholds semiconvex_thresholds(double delta1, double delta2, double beta, double T) {
  if (!(T > 0.0)) throw std::invalid_argument("semiconvex_thresholds: T must be positive");
  SemiconvexThresholds s;
  const double m = std::max(2.0 * T * T, 1.0);
  s.eps1 = 1.0 - 4.0 * T * T * delta1 * delta1;
  s.eps2 = 1.0 - 4.0 * T * T * delta2 * delta2;
  s.A1 = m - 2.0 * delta1 * T * T;
  s.A2 = m - 2.0 * delta2 * T * T;
  s.beta_bound = 0.25 * std::min(s.eps1 / s.A1, s.eps2 / s.A2);
  s.delta_bound = 1.0 / (2.0 * T);
  if (beta > 0.0) {
    s.psi1_threshold = T * delta2 * delta2 / beta + 2.0 * T * (1.0 - delta2);
    s.psi2_threshold = T * delta1 * delta1 / beta - 2.0 * T * delta1;
  } else {
    s.psi1_threshold = std::numeric_limits<double>::infinity();
    s.psi2_threshold = std::numeric_limits<double>::infinity();
  }
  return s;
}

std::vector<CheckReport> check_semiconvex(double delta1, double delta2, double beta, double T,
                                          const ConvexFn& psi1, const ConvexFn& psi2,
                                          std::uint64_t seed) {
  const SemiconvexThresholds s = semiconvex_thresholds(delta1, delta2, beta, T);
  std::vector<CheckReport> out;

  CheckReport b;
  b.name = "semiconvex_beta";
  b.values = {{"beta", beta}, {"bound", s.beta_bound}, {"eps1", s.eps1}, {"eps2", s.eps2},
              {"A1", s.A1},   {"A2", s.A2}};
  const bool bounds_ok = s.eps1 > 0.0 && s.eps2 > 0.0 && s.A1 > 0.0 && s.A2 > 0.0;
  if (beta > 0.0 && bounds_ok && beta < s.beta_bound) {
    b.status = CheckStatus::VerifiedOnSamples;
    b.detail = "beta below 1/4 min(eps_i / A_i)";
  } else {
    b.status = CheckStatus::Failed;
    b.detail = "beta = " + fmt(beta) + " is not below " + fmt(s.beta_bound);
    b.witness = Vec::Constant(1, beta);
  }
  if (delta1 == 0.0 && delta2 == 0.0) {
    b.values["beta_threshold"] = beta_threshold(T);
    b.detail += "; with delta = 0 the bound is half of beta_threshold(T)";
  }
  out.push_back(b);

  CheckReport d;
  d.name = "delta_bound";
  d.values = {{"delta1", delta1}, {"delta2", delta2}, {"bound", s.delta_bound}};
  if (std::abs(delta1) < s.delta_bound && std::abs(delta2) < s.delta_bound) {
    d.status = CheckStatus::VerifiedOnSamples;
    d.detail = "|delta_i| < 1/(2T)";
  } else {
    d.status = CheckStatus::Failed;
    d.detail = "|delta_i| must be below 1/(2T) = " + fmt(s.delta_bound);
    Vec w(2);
    w << delta1, delta2;
    d.witness = w;
  }
  out.push_back(d);

  CheckReport c1 = check_psi_coercivity(psi1, T, psi1.box(), s.psi1_threshold, 4000, seed);
  c1.name = "psi1_quadratic_growth";
  out.push_back(c1);
  CheckReport c2 = check_psi_coercivity(psi2, T, psi2.box(), s.psi2_threshold, 4000, seed + 1);
  c2.name = "psi2_quadratic_growth";
  out.push_back(c2);
  return out;
}

HypothesisReport check_problem(const ProblemSpec& spec, int samples, std::uint64_t seed) {
  HypothesisReport rep;
  const double T = spec.T;
  if (const auto* c = std::get_if<Connecting>(&spec.boundary)) {
    if (spec.growth) {
      rep.checks.push_back(check_subquadratic(spec.H, *spec.growth, spec.box, samples, seed));
      CheckReport bt;
      bt.name = "beta_threshold";
      bt.values = {{"beta", spec.growth->beta}, {"threshold", beta_threshold(T)}};
      if (spec.growth->beta > 0.0 && spec.growth->beta < beta_threshold(T)) {
        bt.status = CheckStatus::VerifiedOnSamples;
        bt.detail = "beta < 1/(2 max(2T^2, 1))";
      } else {
        bt.status = CheckStatus::Failed;
        bt.detail = "beta = " + fmt(spec.growth->beta) + " must be positive and below " + fmt(beta_threshold(T));
        bt.witness = Vec::Constant(1, spec.growth->beta);
      }
      rep.checks.push_back(bt);
    } else {
      CheckReport sk;
      sk.name = "subquadratic";
      sk.detail = "no growth certificate supplied";
      rep.checks.push_back(sk);
    }
    const ConvexFn& strong = c->coercive_index == 2 ? c->psi2 : c->psi1;
    const ConvexFn& other = c->coercive_index == 2 ? c->psi1 : c->psi2;
    CheckReport pc = check_psi_coercivity(strong, T, strong.box(), std::nullopt, samples, seed + 2);
    pc.name = c->coercive_index == 2 ? "psi2_quadratic_growth" : "psi1_quadratic_growth";
    rep.checks.push_back(pc);
    CheckReport pg = check_psi_growth(other, other.box(), samples, seed + 3);
    pg.name = c->coercive_index == 2 ? "psi1_coercive" : "psi2_coercive";
    rep.checks.push_back(pg);
  } else if (std::get_if<Cauchy>(&spec.boundary) != nullptr) {
    if (spec.growth) {
      rep.checks.push_back(check_power_growth(spec.H, *spec.growth, spec.box, samples, seed));
    } else {
      CheckReport sk;
      sk.name = "power_growth";
      sk.detail = "no growth certificate supplied";
      rep.checks.push_back(sk);
    }
  } else if (const auto* s = std::get_if<SemiConvex>(&spec.boundary)) {
    if (spec.growth) {
      rep.checks.push_back(check_subquadratic(spec.H, *spec.growth, spec.box, samples, seed));
      for (auto& c : check_semiconvex(s->delta1, s->delta2, spec.growth->beta, T, s->psi1, s->psi2, seed + 2)) {
        rep.checks.push_back(std::move(c));
      }
    } else {
      CheckReport sk;
      sk.name = "subquadratic";
      sk.detail = "no growth certificate supplied";
      rep.checks.push_back(sk);
      const SemiconvexThresholds th = semiconvex_thresholds(s->delta1, s->delta2, 0.0, T);
      CheckReport d;
      d.name = "delta_bound";
      d.values = {{"bound", th.delta_bound}};
      const bool ok = std::abs(s->delta1) < th.delta_bound && std::abs(s->delta2) < th.delta_bound;
      d.status = ok ? CheckStatus::VerifiedOnSamples : CheckStatus::Failed;
      d.detail = ok ? "|delta_i| < 1/(2T)" : "|delta_i| must be below 1/(2T)";
      if (!ok) {
        Vec w(2);
        w << s->delta1, s->delta2;
        d.witness = w;
      }
      rep.checks.push_back(d);
    }
  }
  return rep;
}

}  // namespace hamdual
