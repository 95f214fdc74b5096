#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "hamdual/legendre.hpp"
#include "hamdual/types.hpp"

namespace hamdual {

struct SubgradientResult {
  Vec value;               // minimal-norm element
  bool is_unique = true;   // false at kinks
};

/// Closed convex function on R^n with conjugate, subgradient and prox.
/// Values are immutable and cheap to copy (shared node).
class ConvexFn {
 public:
  enum class Kind { Quadratic, PowerNorm, Affine, SeparableSum, Sum, GridSampled, Embedded };

  ConvexFn() = default;

  /// 1/2 (x - b)^T A (x - b) + c, A symmetric PSD.
  static ConvexFn quadratic(const Mat& A, const Vec& b, double c = 0.0);
  /// 1/2 x^T A x + g.x + c0.
  static ConvexFn quadratic_general(const Mat& A, const Vec& g, double c0 = 0.0);
  /// scale * sum_i |x_i|^r, r >= 1.
  static ConvexFn power_norm(int n, double r, double scale);
  static ConvexFn affine(const Vec& slope, double offset = 0.0);
  static ConvexFn zero(int n);
  /// sum_i parts[i](x_i), each part one-dimensional.
  static ConvexFn separable(std::vector<ConvexFn> parts);
  /// Pointwise sum. Quadratic and affine terms are merged eagerly.
  static ConvexFn sum(std::vector<ConvexFn> terms);
  /// Multilinear interpolant of tabulated data; eval throws std::out_of_range
  /// outside the grid.
  static ConvexFn grid(GridFn g);
  /// x in R^n  ->  inner(x[indices]).
  /// Discrete conjugate of 1-D samples, evaluated exactly as the maximum of
  /// the affine functions y -> x_i y - f_i over lower-hull vertices, on the
  /// default dual range.
  static ConvexFn discrete_conjugate_1d(const GridFn& primal);
  static ConvexFn embedded(ConvexFn inner, std::vector<int> indices, int n);

  ConvexFn scaled(double factor) const;
  ConvexFn with_box(const Box& box) const;

  bool valid() const { return node_ != nullptr; }
  int dim() const;
  Kind kind() const;
  const Box& box() const;

  double eval(const Vec& x) const;
  double operator()(const Vec& x) const { return eval(x); }

  /// Throws NotCoercive when the conjugate is not finite everywhere or no
  /// closed form / grid fallback applies.
  ConvexFn conjugate() const;

  SubgradientResult subgradient(const Vec& x) const;
  /// Per-coordinate one-sided partial derivatives.
  void slopes(const Vec& x, Vec& lo, Vec& hi) const;

  /// argmin_u f(u) + |u - x|^2 / (2 step).
  Vec prox(const Vec& x, double step) const;

  /// Per-coordinate 1-D functions when f(x) = sum_i f_i(x_i).
  const std::optional<std::vector<ConvexFn>>& separable_parts() const;

  /// 1/2 x^T A x + g.x + c0 representation when f is quadratic or affine.
  struct QuadForm {
    Mat A;
    Vec g;
    double c0 = 0.0;
  };
  std::optional<QuadForm> quad_form() const;

  bool is_smooth() const;
  std::string describe() const;

  // Kind-specific accessors.
  double exponent() const;
  double scale() const;
  const std::vector<ConvexFn>& children() const;
  const GridFn& grid_data() const;
  const std::vector<int>& indices() const;

  struct Node;

 private:
  explicit ConvexFn(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::optional<std::vector<ConvexFn>> compute_separable_parts() const;
  std::shared_ptr<const Node> node_;
};

/// Default working box half-width for functions built without one.
constexpr double kDefaultBoxHalfWidth = 10.0;

}  // namespace hamdual
