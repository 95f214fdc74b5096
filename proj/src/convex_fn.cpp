#include "hamdual/convex_fn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <numeric>
#include <sstream>

#include "hamdual/minimize.hpp"

namespace hamdual {

struct ConvexFn::Node {
  Kind kind = Kind::Affine;
  int n = 0;
  Box box;
  // Quadratic / Affine: 1/2 x^T A x + g.x + c0
  Mat A;
  Vec g;
  double c0 = 0.0;
  // PowerNorm
  double r = 2.0;
  double scale = 1.0;
  // SeparableSum / Sum / Embedded (single child)
  std::vector<ConvexFn> children;
  std::vector<int> idx;
  // GridSampled
  std::shared_ptr<const GridFn> grid;
  std::vector<int> hull;  // 1-D lower hull vertices
  // 1-D exact max-of-lines form f(y) = max_i (lx_i y - lf_i); breakpoints lb
  // between consecutive lines. Empty unless built as a discrete conjugate.
  std::vector<double> lx;
  std::vector<double> lf;
  std::vector<double> lb;

  mutable std::once_flag conj_once;
  mutable std::shared_ptr<const ConvexFn> conj;
  mutable std::once_flag parts_once;
  mutable std::optional<std::vector<ConvexFn>> parts;
};

namespace {

using Node = ConvexFn::Node;

constexpr double kBig = 1e300;
constexpr int kGridSamples1d = 4001;
constexpr int kGridSamples2d = 401;

Box slice(const Box& b, int i) {
  return Box{Vec::Constant(1, b.lo[i]), Vec::Constant(1, b.hi[i])};
}

void require_dim(const ConvexFn& f, const Vec& x, const char* op) {
  if (x.size() != f.dim()) {
    std::ostringstream os;
    os << op << ": dimension mismatch (function " << f.dim() << ", point " << x.size() << ")";
    throw std::invalid_argument(os.str());
  }
}

double power_value(double r, double scale, double x) {
  return scale * std::pow(std::abs(x), r);
}

numerics::Slope power_slope(double r, double scale, double x) {
  if (r == 1.0) {
    if (x > 0.0) return {scale, scale};
    if (x < 0.0) return {-scale, -scale};
    return {-scale, scale};
  }
  const double d = scale * r * std::copysign(std::pow(std::abs(x), r - 1.0), x);
  return {d, d};
}

double min_norm(double lo, double hi) {
  if (lo > 0.0) return lo;
  if (hi < 0.0) return hi;
  return 0.0;
}

bool is_identity(const std::vector<int>& idx, int n) {
  if (static_cast<int>(idx.size()) != n) return false;
  for (int i = 0; i < n; ++i) {
    if (idx[static_cast<size_t>(i)] != i) return false;
  }
  return true;
}

// One-sided derivatives of a 1-D grid function through its lower hull.
numerics::Slope grid_slope_1d(const Node& nd, double x) {
  const GridFn& gr = *nd.grid;
  const double h = gr.spacing(0);
  const double tol = 1e-12 * (std::abs(gr.hi[0] - gr.lo[0]));
  if (x < gr.lo[0] - tol) return {-kBig, -kBig};
  if (x > gr.hi[0] + tol) return {kBig, kBig};
  auto node_x = [&](int i) { return gr.lo[0] + i * h; };
  auto seg_slope = [&](size_t k) {
    const int a = nd.hull[k];
    const int b = nd.hull[k + 1];
    return (gr.values[static_cast<size_t>(b)] - gr.values[static_cast<size_t>(a)]) /
           (node_x(b) - node_x(a));
  };
  const size_t nh = nd.hull.size();
  // First hull vertex strictly right of x (with tolerance).
  const auto it = std::upper_bound(nd.hull.begin(), nd.hull.end(), x,
                                   [&](double v, int i) { return v < node_x(i) - tol; });
  const size_t right = static_cast<size_t>(it - nd.hull.begin());
  if (right > 0 && std::abs(x - node_x(nd.hull[right - 1])) <= tol) {
    const size_t k = right - 1;
    const double left = k == 0 ? -kBig : seg_slope(k - 1);
    const double rs = k + 1 == nh ? kBig : seg_slope(k);
    return {left, rs};
  }
  if (right > 0 && right < nh) {
    const double sl = seg_slope(right - 1);
    return {sl, sl};
  }
  return {0.0, 0.0};
}

// Max-of-lines evaluation: index of the active line at y.
size_t active_line(const Node& nd, double y) {
  return static_cast<size_t>(std::upper_bound(nd.lb.begin(), nd.lb.end(), y) - nd.lb.begin());
}

numerics::Slope lines_slope(const Node& nd, double y) {
  const double tol = 1e-12 * (1.0 + std::abs(y));
  if (y < nd.box.lo[0] - tol) return {-kBig, -kBig};
  if (y > nd.box.hi[0] + tol) return {kBig, kBig};
  const size_t i = active_line(nd, y);
  if (i > 0 && std::abs(y - nd.lb[i - 1]) <= tol) return {nd.lx[i - 1], nd.lx[i]};
  if (i < nd.lb.size() && std::abs(y - nd.lb[i]) <= tol) return {nd.lx[i], nd.lx[i + 1]};
  return {nd.lx[i], nd.lx[i]};
}

// One-sided partial derivatives of a bilinear interpolant along each axis.
void grid_slope_2d(const Node& nd, const Vec& x, Vec& lo, Vec& hi) {
  const GridFn& gr = *nd.grid;
  for (int a = 0; a < 2; ++a) {
    const double h = gr.spacing(a);
    const double span = gr.hi[a] - gr.lo[a];
    const double tol = 1e-12 * span;
    if (x[a] < gr.lo[a] - tol) {
      lo[a] = hi[a] = -kBig;
      continue;
    }
    if (x[a] > gr.hi[a] + tol) {
      lo[a] = hi[a] = kBig;
      continue;
    }
    const double t = (x[a] - gr.lo[a]) / h;
    const double nearest = std::round(t);
    Vec probe = x;
    auto at = [&](double coord) {
      probe[a] = coord;
      return gr.interpolate(probe);
    };
    if (std::abs(t - nearest) * h <= tol) {
      const int i = static_cast<int>(nearest);
      const double xc = gr.lo[a] + i * h;
      const double fc = at(xc);
      lo[a] = i == 0 ? -kBig : (fc - at(xc - h)) / h;
      hi[a] = i == gr.counts[a] - 1 ? kBig : (at(xc + h) - fc) / h;
    } else {
      const int i = std::clamp(static_cast<int>(std::floor(t)), 0, gr.counts[a] - 2);
      const double xl = gr.lo[a] + i * h;
      const double s = (at(std::min(xl + h, gr.hi[a])) - at(xl)) / h;
      lo[a] = hi[a] = s;
    }
  }
}

GridFn sample_on_box(const ConvexFn& f) {
  const Box& b = f.box();
  if (f.dim() == 1) {
    return GridFn::sample_1d([&](double x) { return f.eval(Vec::Constant(1, x)); }, b.lo[0],
                             b.hi[0], kGridSamples1d);
  }
  return GridFn::sample_2d(
      [&](double x0, double x1) {
        Vec v(2);
        v << x0, x1;
        return f.eval(v);
      },
      {b.lo[0], b.lo[1]}, {b.hi[0], b.hi[1]}, {kGridSamples2d, kGridSamples2d});
}

[[noreturn]] void refuse(const ConvexFn& f, const std::string& why) {
  throw NotCoercive("conjugate of " + f.describe() + " unavailable: " + why +
                    "; apply an epsilon perturbation first");
}

}  // namespace

// ---------------------------------------------------------------- builders

ConvexFn ConvexFn::quadratic(const Mat& A, const Vec& b, double c) {
  if (A.rows() != A.cols() || A.rows() != b.size()) {
    throw std::invalid_argument("quadratic: shape mismatch");
  }
  const Vec g = -(A * b);
  return quadratic_general(A, g, 0.5 * b.dot(A * b) + c);
}

ConvexFn ConvexFn::quadratic_general(const Mat& A, const Vec& g, double c0) {
  const int n = static_cast<int>(g.size());
  if (n < 1 || n > kMaxDim) throw std::invalid_argument("quadratic: dimension out of range");
  if (A.rows() != n || A.cols() != n) throw std::invalid_argument("quadratic: shape mismatch");
  if ((A - A.transpose()).cwiseAbs().maxCoeff() > 1e-12 * (1.0 + A.cwiseAbs().maxCoeff())) {
    throw std::invalid_argument("quadratic: matrix is not symmetric");
  }
  const Mat As = 0.5 * (A + A.transpose());
  Eigen::SelfAdjointEigenSolver<Mat> es(As);
  if (es.eigenvalues().minCoeff() < -1e-12 * (1.0 + As.cwiseAbs().maxCoeff())) {
    throw std::invalid_argument("quadratic: matrix is not positive semidefinite");
  }
  auto nd = std::make_shared<Node>();
  nd->kind = As.isZero(0.0) ? Kind::Affine : Kind::Quadratic;
  nd->n = n;
  nd->box = Box::cube(n, kDefaultBoxHalfWidth);
  nd->A = As;
  nd->g = g;
  nd->c0 = c0;
  return ConvexFn(nd);
}

ConvexFn ConvexFn::power_norm(int n, double r, double scale) {
  if (n < 1 || n > kMaxDim) throw std::invalid_argument("power_norm: dimension out of range");
  if (!(r >= 1.0) || !std::isfinite(r)) throw std::invalid_argument("power_norm: exponent must be >= 1");
  if (!(scale >= 0.0)) throw std::invalid_argument("power_norm: scale must be nonnegative");
  if (scale == 0.0) return zero(n);
  auto nd = std::make_shared<Node>();
  nd->kind = Kind::PowerNorm;
  nd->n = n;
  nd->box = Box::cube(n, kDefaultBoxHalfWidth);
  nd->r = r;
  nd->scale = scale;
  return ConvexFn(nd);
}

ConvexFn ConvexFn::affine(const Vec& slope, double offset) {
  const int n = static_cast<int>(slope.size());
  return quadratic_general(Mat::Zero(n, n), slope, offset);
}

ConvexFn ConvexFn::zero(int n) { return affine(Vec::Zero(n), 0.0); }

ConvexFn ConvexFn::separable(std::vector<ConvexFn> parts) {
  if (parts.empty() || static_cast<int>(parts.size()) > kMaxDim) {
    throw std::invalid_argument("separable: need 1..16 parts");
  }
  const int n = static_cast<int>(parts.size());
  Box box{Vec(n), Vec(n)};
  for (int i = 0; i < n; ++i) {
    if (parts[static_cast<size_t>(i)].dim() != 1) {
      throw std::invalid_argument("separable: every part must be one-dimensional");
    }
    box.lo[i] = parts[static_cast<size_t>(i)].box().lo[0];
    box.hi[i] = parts[static_cast<size_t>(i)].box().hi[0];
  }
  if (n == 1) return parts.front();
  auto nd = std::make_shared<Node>();
  nd->kind = Kind::SeparableSum;
  nd->n = n;
  nd->box = box;
  nd->children = std::move(parts);
  return ConvexFn(nd);
}

ConvexFn ConvexFn::sum(std::vector<ConvexFn> terms) {
  if (terms.empty()) throw std::invalid_argument("sum: no terms");
  const int n = terms.front().dim();
  std::vector<ConvexFn> flat;
  for (auto& t : terms) {
    if (t.dim() != n) throw std::invalid_argument("sum: terms differ in dimension");
    if (t.kind() == Kind::Sum) {
      for (const auto& c : t.children()) flat.push_back(c);
    } else {
      flat.push_back(t);
    }
  }
  std::optional<QuadForm> merged;
  std::vector<ConvexFn> rest;
  for (const auto& t : flat) {
    if (auto q = t.quad_form()) {
      if (!merged) {
        merged = *q;
      } else {
        merged->A += q->A;
        merged->g += q->g;
        merged->c0 += q->c0;
      }
    } else {
      rest.push_back(t);
    }
  }
  if (merged) {
    const bool trivial = merged->A.isZero(0.0) && merged->g.isZero(0.0) && merged->c0 == 0.0;
    if (!trivial || rest.empty()) {
      rest.insert(rest.begin(), quadratic_general(merged->A, merged->g, merged->c0));
    }
  }
  if (rest.size() == 1) return rest.front().with_box(terms.front().box());
  auto nd = std::make_shared<Node>();
  nd->kind = Kind::Sum;
  nd->n = n;
  nd->box = terms.front().box();
  nd->children = std::move(rest);
  return ConvexFn(nd);
}

ConvexFn ConvexFn::grid(GridFn g) {
  g.validate();
  auto nd = std::make_shared<Node>();
  nd->kind = Kind::GridSampled;
  nd->n = g.d;
  nd->box = Box{Vec(g.d), Vec(g.d)};
  for (int a = 0; a < g.d; ++a) {
    nd->box.lo[a] = g.lo[static_cast<size_t>(a)];
    nd->box.hi[a] = g.hi[static_cast<size_t>(a)];
  }
  if (g.d == 1) {
    std::vector<double> xs(static_cast<size_t>(g.counts[0]));
    for (int i = 0; i < g.counts[0]; ++i) xs[static_cast<size_t>(i)] = g.node(0, i);
    nd->hull = lower_hull(xs, g.values);
  }
  nd->grid = std::make_shared<const GridFn>(std::move(g));
  return ConvexFn(nd);
}

ConvexFn ConvexFn::discrete_conjugate_1d(const GridFn& primal) {
  if (primal.d != 1) throw std::invalid_argument("discrete_conjugate_1d: expected 1-D samples");
  const ConvexFn tab = grid(discrete_conjugate(primal).conjugate);
  auto nd = std::make_shared<Node>();
  nd->kind = Kind::GridSampled;
  nd->n = 1;
  nd->box = tab.node_->box;
  nd->grid = tab.node_->grid;
  nd->hull = tab.node_->hull;
  std::vector<double> xs(static_cast<size_t>(primal.counts[0]));
  for (int i = 0; i < primal.counts[0]; ++i) xs[static_cast<size_t>(i)] = primal.node(0, i);
  for (int i : lower_hull(xs, primal.values)) {
    nd->lx.push_back(xs[static_cast<size_t>(i)]);
    nd->lf.push_back(primal.values[static_cast<size_t>(i)]);
  }
  for (size_t i = 0; i + 1 < nd->lx.size(); ++i) {
    nd->lb.push_back((nd->lf[i + 1] - nd->lf[i]) / (nd->lx[i + 1] - nd->lx[i]));
  }
  return ConvexFn(nd);
}

ConvexFn ConvexFn::embedded(ConvexFn inner, std::vector<int> indices, int n) {
  if (static_cast<int>(indices.size()) != inner.dim()) {
    throw std::invalid_argument("embedded: index count must equal inner dimension");
  }
  std::vector<int> sorted = indices;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw std::invalid_argument("embedded: repeated index");
  }
  for (int i : indices) {
    if (i < 0 || i >= n) throw std::invalid_argument("embedded: index out of range");
  }
  if (is_identity(indices, n)) return inner;
  if (auto q = inner.quad_form()) {
    Mat A = Mat::Zero(n, n);
    Vec g = Vec::Zero(n);
    const int m = inner.dim();
    for (int i = 0; i < m; ++i) {
      g[indices[static_cast<size_t>(i)]] = q->g[i];
      for (int j = 0; j < m; ++j) {
        A(indices[static_cast<size_t>(i)], indices[static_cast<size_t>(j)]) = q->A(i, j);
      }
    }
    return quadratic_general(A, g, q->c0);
  }
  auto nd = std::make_shared<Node>();
  nd->kind = Kind::Embedded;
  nd->n = n;
  nd->box = Box::cube(n, kDefaultBoxHalfWidth);
  for (size_t i = 0; i < indices.size(); ++i) {
    nd->box.lo[indices[i]] = inner.box().lo[static_cast<int>(i)];
    nd->box.hi[indices[i]] = inner.box().hi[static_cast<int>(i)];
  }
  nd->idx = std::move(indices);
  nd->children = {std::move(inner)};
  return ConvexFn(nd);
}

ConvexFn ConvexFn::scaled(double factor) const {
  if (!(factor >= 0.0) || !std::isfinite(factor)) {
    throw std::invalid_argument("scaled: factor must be finite and nonnegative");
  }
  const Node& nd = *node_;
  ConvexFn out;
  switch (nd.kind) {
    case Kind::Quadratic:
    case Kind::Affine:
      out = quadratic_general(factor * nd.A, factor * nd.g, factor * nd.c0);
      break;
    case Kind::PowerNorm:
      out = power_norm(nd.n, nd.r, factor * nd.scale);
      break;
    case Kind::SeparableSum: {
      std::vector<ConvexFn> parts;
      for (const auto& c : nd.children) parts.push_back(c.scaled(factor));
      out = separable(std::move(parts));
      break;
    }
    case Kind::Sum: {
      std::vector<ConvexFn> terms;
      for (const auto& c : nd.children) terms.push_back(c.scaled(factor));
      out = sum(std::move(terms));
      break;
    }
    case Kind::GridSampled: {
      GridFn g = *nd.grid;
      for (double& v : g.values) v *= factor;
      out = grid(std::move(g));
      if (!nd.lx.empty()) {
        auto copy = std::make_shared<Node>();
        copy->kind = Kind::GridSampled;
        copy->n = 1;
        copy->box = nd.box;
        copy->grid = out.node_->grid;
        copy->hull = out.node_->hull;
        for (double v : nd.lx) copy->lx.push_back(factor * v);
        for (double v : nd.lf) copy->lf.push_back(factor * v);
        copy->lb = nd.lb;
        out = ConvexFn(copy);
      }
      break;
    }
    case Kind::Embedded:
      out = embedded(nd.children.front().scaled(factor), nd.idx, nd.n);
      break;
  }
  return out.with_box(nd.box);
}

ConvexFn ConvexFn::with_box(const Box& box) const {
  if (box.dim() != dim()) throw std::invalid_argument("with_box: dimension mismatch");
  for (int i = 0; i < box.dim(); ++i) {
    if (!(box.lo[i] < box.hi[i])) throw std::invalid_argument("with_box: empty box");
  }
  if (node_->kind == Kind::GridSampled) return *this;
  auto nd = std::make_shared<Node>();
  const Node& src = *node_;
  nd->kind = src.kind;
  nd->n = src.n;
  nd->box = box;
  nd->A = src.A;
  nd->g = src.g;
  nd->c0 = src.c0;
  nd->r = src.r;
  nd->scale = src.scale;
  nd->children = src.children;
  nd->idx = src.idx;
  nd->grid = src.grid;
  nd->hull = src.hull;
  return ConvexFn(nd);
}

// ---------------------------------------------------------------- queries

int ConvexFn::dim() const { return node_->n; }
ConvexFn::Kind ConvexFn::kind() const { return node_->kind; }
const Box& ConvexFn::box() const { return node_->box; }
double ConvexFn::exponent() const { return node_->r; }
double ConvexFn::scale() const { return node_->scale; }
const std::vector<ConvexFn>& ConvexFn::children() const { return node_->children; }
const GridFn& ConvexFn::grid_data() const { return *node_->grid; }
const std::vector<int>& ConvexFn::indices() const { return node_->idx; }

std::optional<ConvexFn::QuadForm> ConvexFn::quad_form() const {
  const Node& nd = *node_;
  switch (nd.kind) {
    case Kind::Quadratic:
    case Kind::Affine:
      return QuadForm{nd.A, nd.g, nd.c0};
    case Kind::PowerNorm:
      if (nd.r == 2.0) return QuadForm{Mat::Identity(nd.n, nd.n) * (2.0 * nd.scale), Vec::Zero(nd.n), 0.0};
      return std::nullopt;
    default:
      return std::nullopt;
  }
}

bool ConvexFn::is_smooth() const {
  const Node& nd = *node_;
  switch (nd.kind) {
    case Kind::Quadratic:
    case Kind::Affine:
      return true;
    case Kind::PowerNorm:
      return nd.r > 1.0;
    case Kind::GridSampled:
      return false;
    default:
      return std::all_of(nd.children.begin(), nd.children.end(),
                         [](const ConvexFn& c) { return c.is_smooth(); });
  }
}

std::string ConvexFn::describe() const {
  const Node& nd = *node_;
  std::ostringstream os;
  switch (nd.kind) {
    case Kind::Quadratic:
      os << "quadratic(n=" << nd.n << ")";
      break;
    case Kind::Affine:
      os << "affine(n=" << nd.n << ")";
      break;
    case Kind::PowerNorm:
      os << nd.scale << "*|x|_" << nd.r << "^" << nd.r << "(n=" << nd.n << ")";
      break;
    case Kind::SeparableSum:
    case Kind::Sum: {
      os << (nd.kind == Kind::Sum ? "sum[" : "separable[");
      for (size_t i = 0; i < nd.children.size(); ++i) {
        if (i > 0) os << ", ";
        os << nd.children[i].describe();
      }
      os << "]";
      break;
    }
    case Kind::GridSampled:
      os << "grid(d=" << nd.grid->d << ", " << nd.grid->size() << " samples)";
      break;
    case Kind::Embedded: {
      os << nd.children.front().describe() << " on {";
      for (size_t i = 0; i < nd.idx.size(); ++i) os << (i > 0 ? "," : "") << nd.idx[i];
      os << "}";
      break;
    }
  }
  return os.str();
}

double ConvexFn::eval(const Vec& x) const {
  require_dim(*this, x, "eval");
  const Node& nd = *node_;
  switch (nd.kind) {
    case Kind::Quadratic:
      return 0.5 * x.dot(nd.A * x) + nd.g.dot(x) + nd.c0;
    case Kind::Affine:
      return nd.g.dot(x) + nd.c0;
    case Kind::PowerNorm: {
      double s = 0.0;
      for (int i = 0; i < nd.n; ++i) s += power_value(nd.r, nd.scale, x[i]);
      return s;
    }
    case Kind::SeparableSum: {
      double s = 0.0;
      for (int i = 0; i < nd.n; ++i) s += nd.children[static_cast<size_t>(i)].eval(Vec::Constant(1, x[i]));
      return s;
    }
    case Kind::Sum: {
      double s = 0.0;
      for (const auto& c : nd.children) s += c.eval(x);
      return s;
    }
    case Kind::GridSampled:
      if (!nd.lx.empty()) {
        const double tol = 1e-12 * (1.0 + std::abs(x[0]));
        if (x[0] < nd.box.lo[0] - tol || x[0] > nd.box.hi[0] + tol) {
          throw std::out_of_range("grid function evaluated outside its support");
        }
        const size_t i = active_line(nd, x[0]);
        return nd.lx[i] * x[0] - nd.lf[i];
      }
      return nd.grid->interpolate(x);
    case Kind::Embedded: {
      const ConvexFn& in = nd.children.front();
      Vec sub(in.dim());
      for (int i = 0; i < in.dim(); ++i) sub[i] = x[nd.idx[static_cast<size_t>(i)]];
      return in.eval(sub);
    }
  }
  return 0.0;
}

void ConvexFn::slopes(const Vec& x, Vec& lo, Vec& hi) const {
  require_dim(*this, x, "subgradient");
  const Node& nd = *node_;
  lo.resize(nd.n);
  hi.resize(nd.n);
  switch (nd.kind) {
    case Kind::Quadratic:
    case Kind::Affine:
      lo = nd.A * x + nd.g;
      hi = lo;
      return;
    case Kind::PowerNorm:
      for (int i = 0; i < nd.n; ++i) {
        const auto s = power_slope(nd.r, nd.scale, x[i]);
        lo[i] = s.lo;
        hi[i] = s.hi;
      }
      return;
    case Kind::SeparableSum: {
      Vec l1(1);
      Vec h1(1);
      for (int i = 0; i < nd.n; ++i) {
        nd.children[static_cast<size_t>(i)].slopes(Vec::Constant(1, x[i]), l1, h1);
        lo[i] = l1[0];
        hi[i] = h1[0];
      }
      return;
    }
    case Kind::Sum: {
      lo.setZero();
      hi.setZero();
      Vec l(nd.n);
      Vec h(nd.n);
      for (const auto& c : nd.children) {
        c.slopes(x, l, h);
        lo += l;
        hi += h;
      }
      lo = lo.cwiseMax(-kBig).cwiseMin(kBig);
      hi = hi.cwiseMax(-kBig).cwiseMin(kBig);
      return;
    }
    case Kind::GridSampled:
      if (nd.n == 1) {
        const auto s = nd.lx.empty() ? grid_slope_1d(nd, x[0]) : lines_slope(nd, x[0]);
        lo[0] = s.lo;
        hi[0] = s.hi;
      } else {
        grid_slope_2d(nd, x, lo, hi);
      }
      return;
    case Kind::Embedded: {
      const ConvexFn& in = nd.children.front();
      Vec sub(in.dim());
      for (int i = 0; i < in.dim(); ++i) sub[i] = x[nd.idx[static_cast<size_t>(i)]];
      Vec l(in.dim());
      Vec h(in.dim());
      in.slopes(sub, l, h);
      lo.setZero();
      hi.setZero();
      for (int i = 0; i < in.dim(); ++i) {
        lo[nd.idx[static_cast<size_t>(i)]] = l[i];
        hi[nd.idx[static_cast<size_t>(i)]] = h[i];
      }
      return;
    }
  }
}

SubgradientResult ConvexFn::subgradient(const Vec& x) const {
  Vec lo;
  Vec hi;
  slopes(x, lo, hi);
  SubgradientResult out{Vec(dim()), true};
  for (int i = 0; i < dim(); ++i) {
    out.value[i] = min_norm(lo[i], hi[i]);
    if (hi[i] - lo[i] > 1e-12 * (1.0 + std::abs(lo[i]) + std::abs(hi[i]))) out.is_unique = false;
  }
  return out;
}

const std::optional<std::vector<ConvexFn>>& ConvexFn::separable_parts() const {
  std::call_once(node_->parts_once, [this] { node_->parts = compute_separable_parts(); });
  return node_->parts;
}

std::optional<std::vector<ConvexFn>> ConvexFn::compute_separable_parts() const {
  const Node& nd = *node_;
  std::vector<ConvexFn> parts;
  switch (nd.kind) {
    case Kind::Quadratic:
    case Kind::Affine: {
      Mat off = nd.A;
      off.diagonal().setZero();
      if (!off.isZero(0.0)) return std::nullopt;
      for (int i = 0; i < nd.n; ++i) {
        parts.push_back(quadratic_general(Mat::Constant(1, 1, nd.A(i, i)), Vec::Constant(1, nd.g[i]),
                                          i == 0 ? nd.c0 : 0.0)
                            .with_box(slice(nd.box, i)));
      }
      return parts;
    }
    case Kind::PowerNorm:
      for (int i = 0; i < nd.n; ++i) {
        parts.push_back(power_norm(1, nd.r, nd.scale).with_box(slice(nd.box, i)));
      }
      return parts;
    case Kind::SeparableSum:
      return nd.children;
    case Kind::GridSampled:
      if (nd.n == 1) return std::vector<ConvexFn>{*this};
      return std::nullopt;
    case Kind::Embedded: {
      auto inner = nd.children.front().separable_parts();
      if (!inner) return std::nullopt;
      for (int i = 0; i < nd.n; ++i) parts.push_back(zero(1).with_box(slice(nd.box, i)));
      for (size_t i = 0; i < nd.idx.size(); ++i) parts[static_cast<size_t>(nd.idx[i])] = (*inner)[i];
      return parts;
    }
    case Kind::Sum: {
      std::vector<std::vector<ConvexFn>> per(static_cast<size_t>(nd.n));
      for (const auto& c : nd.children) {
        auto cp = c.separable_parts();
        if (!cp) return std::nullopt;
        for (int i = 0; i < nd.n; ++i) per[static_cast<size_t>(i)].push_back((*cp)[static_cast<size_t>(i)]);
      }
      for (int i = 0; i < nd.n; ++i) {
        parts.push_back(sum(std::move(per[static_cast<size_t>(i)])).with_box(slice(nd.box, i)));
      }
      return parts;
    }
  }
  return std::nullopt;
}

// ---------------------------------------------------------------- conjugate

namespace {

ConvexFn compute_conjugate(const ConvexFn& f) {
  using Kind = ConvexFn::Kind;
  switch (f.kind()) {
    case Kind::Affine:
      refuse(f, "affine functions have an indicator conjugate");
    case Kind::Quadratic: {
      const auto q = *f.quad_form();
      Eigen::LLT<Mat> llt(q.A);
      Eigen::SelfAdjointEigenSolver<Mat> es(q.A);
      if (llt.info() != Eigen::Success || es.eigenvalues().minCoeff() <= 1e-14 * es.eigenvalues().maxCoeff()) {
        refuse(f, "quadratic form is not positive definite");
      }
      const Mat Ainv = llt.solve(Mat::Identity(f.dim(), f.dim()));
      // (1/2 x'Ax + g.x + c0)* (y) = 1/2 (y - g)' A^{-1} (y - g) - c0
      return ConvexFn::quadratic(0.5 * (Ainv + Ainv.transpose()), q.g, -q.c0);
    }
    case Kind::PowerNorm: {
      const double r = f.exponent();
      if (r == 1.0) refuse(f, "|x| has an indicator conjugate");
      const double s = r / (r - 1.0);
      const double c = f.scale();
      const double cs = (r - 1.0) * c * std::pow(c * r, -s);
      return ConvexFn::power_norm(f.dim(), s, cs);
    }
    case Kind::SeparableSum: {
      std::vector<ConvexFn> parts;
      for (const auto& c : f.children()) parts.push_back(c.conjugate());
      return ConvexFn::separable(std::move(parts));
    }
    case Kind::GridSampled:
      if (f.dim() == 1) return ConvexFn::discrete_conjugate_1d(f.grid_data());
      return ConvexFn::grid(discrete_conjugate(f.grid_data()).conjugate);
    case Kind::Embedded:
      refuse(f, "function does not depend on every coordinate");
    case Kind::Sum: {
      if (f.dim() > 1) {
        if (const auto& parts = f.separable_parts()) {
          std::vector<ConvexFn> conj;
          for (const auto& p : *parts) conj.push_back(p.conjugate());
          return ConvexFn::separable(std::move(conj));
        }
      }
      if (f.dim() == 1) return ConvexFn::discrete_conjugate_1d(sample_on_box(f));
      if (f.dim() == 2) return ConvexFn::grid(discrete_conjugate(sample_on_box(f)).conjugate);
      refuse(f, "non-separable sum in dimension > 2 has no grid fallback");
    }
  }
  refuse(f, "unknown kind");
}

}  // namespace

ConvexFn ConvexFn::conjugate() const {
  const Node& nd = *node_;
  std::call_once(nd.conj_once, [&] {
    nd.conj = std::make_shared<const ConvexFn>(compute_conjugate(*this));
  });
  return *nd.conj;
}

// ---------------------------------------------------------------- prox

Vec ConvexFn::prox(const Vec& x, double step) const {
  require_dim(*this, x, "prox");
  if (!(step > 0.0) || !std::isfinite(step)) throw std::invalid_argument("prox: step must be positive");
  const Node& nd = *node_;
  const int n = nd.n;

  if (nd.kind == Kind::Quadratic || nd.kind == Kind::Affine) {
    if (nd.kind == Kind::Affine) return x - step * nd.g;
    const Mat K = nd.A + Mat::Identity(n, n) / step;
    return K.llt().solve(x / step - nd.g);
  }
  if (nd.kind == Kind::PowerNorm) {
    Vec u(n);
    for (int i = 0; i < n; ++i) {
      if (nd.r == 1.0) {
        u[i] = std::copysign(std::max(std::abs(x[i]) - step * nd.scale, 0.0), x[i]);
        continue;
      }
      const double xi = x[i];
      auto d = [&](double v) {
        const auto s = power_slope(nd.r, nd.scale, v);
        return numerics::Slope{s.lo + (v - xi) / step, s.hi + (v - xi) / step};
      };
      u[i] = numerics::solve_monotone(d, xi, std::max(std::abs(xi), 1e-3));
    }
    return u;
  }
  if (nd.kind == Kind::Embedded) {
    const ConvexFn& in = nd.children.front();
    Vec sub(in.dim());
    for (int i = 0; i < in.dim(); ++i) sub[i] = x[nd.idx[static_cast<size_t>(i)]];
    const Vec ps = in.prox(sub, step);
    Vec u = x;
    for (int i = 0; i < in.dim(); ++i) u[nd.idx[static_cast<size_t>(i)]] = ps[i];
    return u;
  }
  if (n == 1) {
    const double xi = x[0];
    Vec lo(1);
    Vec hi(1);
    auto d = [&](double v) {
      slopes(Vec::Constant(1, v), lo, hi);
      return numerics::Slope{lo[0] + (v - xi) / step, hi[0] + (v - xi) / step};
    };
    slopes(x, lo, hi);
    const double sel = min_norm(lo[0], hi[0]);
    double first = std::abs(step * sel);
    if (!(first > 0.0) || first > 1e6) first = 1e-3 * (1.0 + std::abs(xi));
    return Vec::Constant(1, numerics::solve_monotone(d, xi, first));
  }
  if (const auto& parts = separable_parts()) {
    Vec u(n);
    for (int i = 0; i < n; ++i) u[i] = (*parts)[static_cast<size_t>(i)].prox(Vec::Constant(1, x[i]), step)[0];
    return u;
  }

  auto fg = [&](const Vec& u, Vec& grad) {
    const auto sg = subgradient(u);
    grad = sg.value + (u - x) / step;
    return eval(u) + (u - x).squaredNorm() / (2.0 * step);
  };
  numerics::BfgsOptions opt;
  opt.gradient_tol = 1e-10 * (1.0 + x.norm()) / step;
  opt.max_iterations = 200;
  const bool bounded = nd.kind == Kind::GridSampled ||
                       std::any_of(nd.children.begin(), nd.children.end(), [](const ConvexFn& c) {
                         return c.kind() == Kind::GridSampled;
                       });
  opt.box = bounded ? &nd.box : nullptr;
  Vec start = bounded ? nd.box.clamp(x) : x;
  const auto res = numerics::minimize_bfgs(fg, start, opt);
  if (!res.converged && res.residual > 1e-6 * (1.0 + x.norm()) / step) {
    throw InnerSolveError("prox: inner minimization did not converge", res.residual);
  }
  return res.x;
}

}  // namespace hamdual
