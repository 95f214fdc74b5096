#include <doctest.h>

#include "support.hpp"

using namespace hamdual;
using namespace testing_support;

namespace {

// Independent evaluation of a separable inf-convolution coordinate:
// inf_u h(u) + |x - u|^s / (s lambda^s).
double infconv_1d(const std::function<double(double)>& h, double x, double lambda, double s) {
  auto obj = [&](double u) { return h(u) + std::pow(std::abs(x - u), s) / (s * std::pow(lambda, s)); };
  const double u = golden_min(obj, x - 10.0, x + 10.0, 400);
  return obj(u);
}

// sup_x (x y - phi(x)) by golden-section search on a concave objective.
double sup_1d(const std::function<double(double)>& phi, double y, double lo, double hi) {
  auto neg = [&](double x) { return phi(x) - x * y; };
  const double x = golden_min(neg, lo, hi, 400);
  return x * y - phi(x);
}

Vec random_vec(std::mt19937_64& rng, int n, double half) {
  std::uniform_real_distribution<double> u(-half, half);
  Vec v(n);
  for (int i = 0; i < n; ++i) v[i] = u(rng);
  return v;
}

}  // namespace

TEST_CASE("epsilon perturbation examples") {
  const EpsPerturbed z(ConvexFn::zero(2), 0.1);
  CHECK(z.primal(vec({1.0, 1.0})).value == doctest::Approx(0.1).epsilon(1e-15));
  CHECK(z.dual(vec({1.0, 0.0})).value == doctest::Approx(5.0).epsilon(1e-14));
  const EpsPerturbed q(ConvexFn::quadratic(eye(2), Vec::Zero(2)), 0.1);
  CHECK(std::abs(q.dual(vec({1.0, 0.0})).value - 1.0 / (2.0 * 1.1)) < 1e-10);
}

TEST_CASE("epsilon perturbation adds exactly eps/2 |x|^2") {
  std::mt19937_64 rng(31);
  const ConvexFn H = ConvexFn::sum({ConvexFn::power_norm(2, 4.0, 0.25), ConvexFn::affine(vec({1.0, -2.0}), 0.5)});
  const EpsPerturbed He(H, 0.05);
  for (int s = 0; s < 100; ++s) {
    const Vec x = random_vec(rng, 2, 3.0);
    CHECK(He.primal(x).value - H(x) == doctest::Approx(0.025 * x.squaredNorm()).epsilon(1e-12));
    const Vec g = He.primal(x).grad - H.subgradient(x).value;
    CHECK((g - 0.05 * x).norm() <= 1e-12 * (1.0 + x.norm()));
  }
}

TEST_CASE("conjugate sandwich for the epsilon perturbation") {
  // H = 0.05 |x|^2 + |x|_1 satisfies 0 <= H <= 0.3/2 |x|^2 + 5.
  const double alpha = 0.0;
  const double beta = 0.3;
  const double gamma = 5.0;
  const ConvexFn H = ConvexFn::sum({ConvexFn::quadratic(0.1 * eye(2), Vec::Zero(2)), ConvexFn::power_norm(2, 1.0, 1.0)});
  std::mt19937_64 rng(32);
  for (double eps : {0.1, 0.01}) {
    const EpsPerturbed He(H, eps);
    for (int s = 0; s < 500; ++s) {
      const Vec y = random_vec(rng, 2, 8.0);
      const double v = He.dual(y).value;
      const double n2 = y.squaredNorm();
      CHECK(v >= n2 / (2.0 * (beta + eps)) - gamma - 1e-10);
      CHECK(v <= n2 / (2.0 * eps) + alpha + 1e-10);
    }
  }
}

TEST_CASE("inf-convolution conjugate identity") {
  // Quadratic H, r = 4, lambda = 1: H_lambda*(a, b) = a^2/2 + b^2/2 + (a^4 + b^4)/4.
  const ConvexFn H = ConvexFn::quadratic(eye(2), Vec::Zero(2));
  const InfConvolved Hl(H, 1.0, 4.0);
  const double s = 4.0 / 3.0;
  auto hl = [&](double x) { return infconv_1d([](double u) { return 0.5 * u * u; }, x, 1.0, s); };
  for (double a : {-1.5, -0.3, 0.0, 0.8, 2.0}) {
    const double oracle = sup_1d(hl, a, -20.0, 20.0);
    CHECK(std::abs(oracle - (0.5 * a * a + 0.25 * std::pow(a, 4))) < 1e-8);
    CHECK(std::abs(Hl.conjugate_fn()(vec({a, -a})) - (a * a + 0.5 * std::pow(a, 4))) < 1e-12);
  }
}

TEST_CASE("inf-convolution value matches an independent inner minimization") {
  std::mt19937_64 rng(33);
  for (double lambda : {1.0, 0.5}) {
    const InfConvolved Hq(ConvexFn::quadratic(eye(2), Vec::Zero(2)), lambda, 4.0);
    const InfConvolved Hp(ConvexFn::power_norm(2, 4.0, 0.25), lambda, 4.0);
    for (int s = 0; s < 20; ++s) {
      const Vec x = random_vec(rng, 2, 2.0);
      double oq = 0.0;
      double op = 0.0;
      for (int i = 0; i < 2; ++i) {
        oq += infconv_1d([](double u) { return 0.5 * u * u; }, x[i], lambda, 4.0 / 3.0);
        op += infconv_1d([](double u) { return 0.25 * std::pow(u, 4); }, x[i], lambda, 4.0 / 3.0);
      }
      CHECK(std::abs(Hq.value(x) - oq) < 1e-10);
      CHECK(std::abs(Hp.value(x) - op) < 1e-10);
    }
  }
}

TEST_CASE("inf-convolution bounds and monotonicity") {
  std::mt19937_64 rng(34);
  const ConvexFn H = ConvexFn::quadratic(eye(2), Vec::Zero(2));
  const InfConvolved H1(H, 1.0, 4.0);
  CHECK(H1.value(vec({1.0, 1.0})) <= 1.5);
  for (int s = 0; s < 200; ++s) {
    const Vec x = random_vec(rng, 2, 3.0);
    double prev = -INFINITY;
    for (double lambda : {1.0, 0.5, 0.25, 0.125}) {
      const InfConvolved Hl(H, lambda, 4.0);
      const double v = Hl.value(x);
      CHECK(v <= H(x) + 1e-12);
      const double bound = (std::pow(std::abs(x[0]), 4.0 / 3.0) + std::pow(std::abs(x[1]), 4.0 / 3.0)) /
                           (4.0 / 3.0 * std::pow(lambda, 4.0 / 3.0));
      CHECK(v <= H(zeros(2)) + bound + 1e-12);
      CHECK(v >= prev - 1e-12);
      prev = v;
    }
    CHECK(std::abs(prev - H(x)) < 0.05 * (1.0 + H(x)));
  }
}

TEST_CASE("inf-convolution is convex along sampled lines") {
  const InfConvolved Hl(ConvexFn::power_norm(2, 4.0, 0.25), 0.5, 4.0);
  std::mt19937_64 rng(35);
  for (int trial = 0; trial < 5; ++trial) {
    const Vec a = random_vec(rng, 2, 2.0);
    const Vec b = random_vec(rng, 2, 2.0);
    const GridFn line = GridFn::sample_1d([&](double t) { return Hl.value(a + t * (b - a)); }, 0.0, 1.0, 101);
    CHECK(convexity_defect(line) <= 1e-12);
  }
}

TEST_CASE("proximal points") {
  const InfConvolved Hl(ConvexFn::quadratic(eye(2), Vec::Zero(2)), 1.0, 4.0);
  const auto [ip0, jq0] = prox_points(Hl, vec({0.0}), vec({0.0}));
  CHECK(ip0.norm() == 0.0);
  CHECK(jq0.norm() == 0.0);

  // i(1) for H = u^2/2, lambda = 1: grid search over [-2, 2] then golden refinement.
  const double s = 4.0 / 3.0;
  auto obj = [&](double u) { return 0.5 * u * u + std::pow(std::abs(1.0 - u), s) / s; };
  double best = -2.0;
  for (int i = 0; i < 1000000; ++i) {
    const double u = -2.0 + 4.0 * i / 999999.0;
    if (obj(u) < obj(best)) best = u;
  }
  const double oracle = golden_min(obj, best - 1e-5, best + 1e-5);
  const auto [ip, jq] = prox_points(Hl, vec({1.0}), vec({0.0}));
  CHECK(std::abs(ip[0] - oracle) < 1e-6);
  CHECK(jq[0] == doctest::Approx(0.0));

  double prev = INFINITY;
  for (double lambda : {1.0, 0.5, 0.25}) {
    const InfConvolved H2(ConvexFn::quadratic(eye(2), Vec::Zero(2)), lambda, 4.0);
    const double d = std::abs(prox_points(H2, vec({1.0}), vec({-0.5})).first[0] - 1.0);
    CHECK(d < prev);
    prev = d;
  }
}

TEST_CASE("proximal point attainment") {
  std::mt19937_64 rng(36);
  Mat A(4, 4);
  A << 2.0, 0.3, 0.0, 0.1, 0.3, 1.0, 0.2, 0.0, 0.0, 0.2, 1.5, 0.4, 0.1, 0.0, 0.4, 1.0;
  for (const ConvexFn& H : {ConvexFn::power_norm(4, 4.0, 0.25), ConvexFn::quadratic(A, Vec::Zero(4))}) {
    const InfConvolved Hl(H, 0.5, 4.0);
    for (int s = 0; s < 30; ++s) {
      const Vec x = random_vec(rng, 4, 2.0);
      const Vec u = Hl.proximal_point(x);
      const double direct = H(u) + Hl.penalty()(x - u);
      CHECK(std::abs(Hl.value(x) - direct) <= 1e-8);
      // Optimality of u: grad H(u) equals the penalty slope at x - u.
      const Vec gH = H.subgradient(u).value;
      const Vec gP = Hl.penalty().subgradient(x - u).value;
      CHECK((gH - gP).norm() <= 1e-8 * (1.0 + gH.norm()));
    }
  }
}

TEST_CASE("inf-convolution parameter validation") {
  const ConvexFn H = ConvexFn::quadratic(eye(2), Vec::Zero(2));
  CHECK_THROWS_AS(InfConvolved(H, 0.0, 4.0), std::invalid_argument);
  CHECK_THROWS_AS(InfConvolved(H, 1.0, 2.0), std::invalid_argument);
  CHECK_THROWS_AS(EpsPerturbed(H, 0.0), std::invalid_argument);
}

TEST_CASE("smoothed pairs satisfy Fenchel-Young") {
  std::mt19937_64 rng(37);
  const ConvexFn H = ConvexFn::power_norm(2, 4.0, 0.25);
  const InfConvolved Hl(H, 0.5, 4.0, 0.01);
  const EpsPerturbed He(H, 0.01);
  for (int s = 0; s < 100; ++s) {
    const Vec x = random_vec(rng, 2, 2.0);
    const Vec y = random_vec(rng, 2, 2.0);
    CHECK(Hl.defect(x, y) >= -1e-10);
    CHECK(He.defect(x, y) >= -1e-10);
    CHECK(std::abs(Hl.defect(x, Hl.primal(x).grad)) <= 1e-8);
    CHECK(std::abs(He.defect(x, He.primal(x).grad)) <= 1e-8);
  }
}
