#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "hamdual/types.hpp"

namespace hamdual {

/// Tabulated function on a uniform 1-D or 2-D grid. Values are row-major:
/// index (i0, i1) lives at i0 * counts[1] + i1.
struct GridFn {
  int d = 1;
  std::array<double, 2> lo{0.0, 0.0};
  std::array<double, 2> hi{0.0, 0.0};
  std::array<int, 2> counts{0, 1};
  std::vector<double> values;

  static GridFn make_1d(double lo, double hi, std::vector<double> values);
  static GridFn make_2d(std::array<double, 2> lo, std::array<double, 2> hi,
                        std::array<int, 2> counts, std::vector<double> values);

  template <class F>
  static GridFn sample_1d(F&& f, double lo, double hi, int count) {
    std::vector<double> v(static_cast<size_t>(count));
    const double step = (hi - lo) / (count - 1);
    for (int i = 0; i < count; ++i) v[static_cast<size_t>(i)] = f(lo + i * step);
    return make_1d(lo, hi, std::move(v));
  }

  template <class F>
  static GridFn sample_2d(F&& f, std::array<double, 2> lo, std::array<double, 2> hi,
                          std::array<int, 2> counts) {
    std::vector<double> v(static_cast<size_t>(counts[0]) * static_cast<size_t>(counts[1]));
    const double s0 = (hi[0] - lo[0]) / (counts[0] - 1);
    const double s1 = (hi[1] - lo[1]) / (counts[1] - 1);
    for (int i = 0; i < counts[0]; ++i) {
      for (int j = 0; j < counts[1]; ++j) {
        v[static_cast<size_t>(i) * counts[1] + j] = f(lo[0] + i * s0, lo[1] + j * s1);
      }
    }
    return make_2d(lo, hi, counts, std::move(v));
  }

  size_t size() const { return values.size(); }
  double spacing(int axis) const { return (hi[axis] - lo[axis]) / (counts[axis] - 1); }
  double node(int axis, int i) const { return lo[axis] + i * spacing(axis); }
  double at(int i0, int i1 = 0) const {
    return values[static_cast<size_t>(i0) * counts[1] + static_cast<size_t>(i1)];
  }

  /// Multilinear interpolation; throws std::out_of_range outside [lo, hi].
  double interpolate(const Vec& x) const;

  /// Throws std::invalid_argument when the invariants (counts >= 3, finite
  /// values, lo < hi) are violated.
  void validate() const;
};

/// Dual grid request for discrete_conjugate. Unset fields use defaults:
/// range = discrete slope range padded by 10% per side, counts = 2n - 1.
struct DualGridSpec {
  std::optional<std::array<double, 2>> lo;
  std::optional<std::array<double, 2>> hi;
  std::optional<std::array<int, 2>> counts;
};

struct ConjugateOptions {
  bool brute_force = false;  // O(n*m) reference transform
};

struct ConjugateResult {
  GridFn conjugate;
  double input_convexity_defect = 0.0;
  double boundary_fraction = 0.0;  // share of dual nodes whose argmax is a primal edge node
  std::vector<std::string> warnings;
};

/// Thrown when an explicitly requested dual box is too small: more than 5% of
/// dual nodes have their maximizer on the primal boundary.
class DualBoxTooSmall : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Discrete Legendre-Fenchel transform g(y) = max_x (x.y - f(x)) over grid
/// nodes, by a lower-hull sweep per axis (two tensorized passes in 2-D).
ConjugateResult discrete_conjugate(const GridFn& f, const DualGridSpec& dual = {},
                                   const ConjugateOptions& options = {});

/// max over nodes of (f - lower convex envelope). In 2-D the envelope is taken
/// along every row and column.
double convexity_defect(const GridFn& f);

/// Lower convex hull of (x_i, f_i), x strictly increasing; returns vertex
/// indices in increasing order.
std::vector<int> lower_hull(const std::vector<double>& x, const std::vector<double>& f);

/// CSV: two columns (x, f) for 1-D; for 2-D a header row of axis-1 nodes
/// (first cell empty) followed by rows "x0, f(x0, x1_0), f(x0, x1_1), ...".
GridFn load_grid_csv(const std::string& path);
std::string grid_to_csv(const GridFn& g);

}  // namespace hamdual
