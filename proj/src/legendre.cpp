#include "hamdual/legendre.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

namespace hamdual {

namespace {

struct Sweep {
  std::vector<double> value;
  std::vector<int> argmax;
};

std::vector<double> axis_nodes(double lo, double hi, int count) {
  std::vector<double> v(static_cast<size_t>(count));
  const double step = (hi - lo) / (count - 1);
  for (int i = 0; i < count; ++i) v[static_cast<size_t>(i)] = lo + i * step;
  v.back() = hi;
  return v;
}

// max_i (x_i * y_j - f_i) for ascending y, walking the lower hull once.
Sweep hull_sweep(const std::vector<double>& x, const std::vector<double>& f,
                 const std::vector<double>& y) {
  const std::vector<int> hull = lower_hull(x, f);
  Sweep out{std::vector<double>(y.size()), std::vector<int>(y.size())};
  size_t k = 0;
  for (size_t j = 0; j < y.size(); ++j) {
    while (k + 1 < hull.size()) {
      const int a = hull[k];
      const int b = hull[k + 1];
      const double slope = (f[b] - f[a]) / (x[b] - x[a]);
      if (slope < y[j]) {
        ++k;
      } else {
        break;
      }
    }
    const int i = hull[k];
    out.value[j] = x[i] * y[j] - f[i];
    out.argmax[j] = i;
  }
  return out;
}

Sweep brute_sweep(const std::vector<double>& x, const std::vector<double>& f,
                  const std::vector<double>& y) {
  Sweep out{std::vector<double>(y.size()), std::vector<int>(y.size())};
  for (size_t j = 0; j < y.size(); ++j) {
    double best = -std::numeric_limits<double>::infinity();
    int arg = 0;
    for (size_t i = 0; i < x.size(); ++i) {
      const double v = x[i] * y[j] - f[i];
      if (v > best) {
        best = v;
        arg = static_cast<int>(i);
      }
    }
    out.value[j] = best;
    out.argmax[j] = arg;
  }
  return out;
}

double defect_1d(const std::vector<double>& x, const std::vector<double>& f) {
  const std::vector<int> hull = lower_hull(x, f);
  double worst = 0.0;
  size_t k = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    while (k + 1 < hull.size() && hull[k + 1] < static_cast<int>(i)) ++k;
    double env;
    if (static_cast<int>(i) == hull[k]) {
      env = f[i];
    } else {
      const int a = hull[k];
      const int b = hull[k + 1];
      const double t = (x[i] - x[a]) / (x[b] - x[a]);
      env = f[a] + t * (f[b] - f[a]);
    }
    worst = std::max(worst, f[i] - env);
  }
  return worst;
}

std::pair<double, double> slope_range(const GridFn& f, int axis) {
  double smin = std::numeric_limits<double>::infinity();
  double smax = -smin;
  const double h = f.spacing(axis);
  const int n0 = f.counts[0];
  const int n1 = f.d == 2 ? f.counts[1] : 1;
  for (int i = 0; i < n0; ++i) {
    for (int j = 0; j < n1; ++j) {
      const int ni = axis == 0 ? i + 1 : i;
      const int nj = axis == 1 ? j + 1 : j;
      if (ni >= n0 || (f.d == 2 && nj >= n1)) continue;
      const double s = (f.at(ni, nj) - f.at(i, j)) / h;
      smin = std::min(smin, s);
      smax = std::max(smax, s);
    }
  }
  return {smin, smax};
}

std::string describe_region(const std::vector<double>& y, const std::vector<int>& flagged_idx) {
  if (flagged_idx.empty()) return "none";
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (int j : flagged_idx) {
    lo = std::min(lo, y[static_cast<size_t>(j)]);
    hi = std::max(hi, y[static_cast<size_t>(j)]);
  }
  std::ostringstream os;
  os << "[" << lo << ", " << hi << "]";
  return os.str();
}

}  // namespace

GridFn GridFn::make_1d(double lo, double hi, std::vector<double> values) {
  GridFn g;
  g.d = 1;
  g.lo = {lo, 0.0};
  g.hi = {hi, 0.0};
  g.counts = {static_cast<int>(values.size()), 1};
  g.values = std::move(values);
  g.validate();
  return g;
}

GridFn GridFn::make_2d(std::array<double, 2> lo, std::array<double, 2> hi,
                       std::array<int, 2> counts, std::vector<double> values) {
  GridFn g;
  g.d = 2;
  g.lo = lo;
  g.hi = hi;
  g.counts = counts;
  g.values = std::move(values);
  g.validate();
  return g;
}

void GridFn::validate() const {
  if (d != 1 && d != 2) throw std::invalid_argument("GridFn: dimension must be 1 or 2");
  for (int a = 0; a < d; ++a) {
    if (counts[a] < 3) throw std::invalid_argument("GridFn: need at least 3 samples per axis");
    if (!(lo[a] < hi[a])) throw std::invalid_argument("GridFn: empty axis range");
  }
  const size_t expected =
      static_cast<size_t>(counts[0]) * static_cast<size_t>(d == 2 ? counts[1] : 1);
  if (values.size() != expected) throw std::invalid_argument("GridFn: value count mismatch");
  for (double v : values) {
    if (!std::isfinite(v)) throw std::invalid_argument("GridFn: non-finite sample");
  }
}

double GridFn::interpolate(const Vec& x) const {
  if (x.size() != d) throw std::invalid_argument("GridFn::interpolate: dimension mismatch");
  std::array<int, 2> idx{0, 0};
  std::array<double, 2> frac{0.0, 0.0};
  for (int a = 0; a < d; ++a) {
    const double h = spacing(a);
    const double slack = 1e-12 * (hi[a] - lo[a]);
    if (x[a] < lo[a] - slack || x[a] > hi[a] + slack) {
      std::ostringstream os;
      os << "GridFn::interpolate: coordinate " << a << " = " << x[a] << " outside [" << lo[a]
         << ", " << hi[a] << "]";
      throw std::out_of_range(os.str());
    }
    const double t = (std::clamp(x[a], lo[a], hi[a]) - lo[a]) / h;
    int i = static_cast<int>(std::floor(t));
    i = std::clamp(i, 0, counts[a] - 2);
    idx[a] = i;
    frac[a] = t - i;
  }
  if (d == 1) return (1.0 - frac[0]) * at(idx[0]) + frac[0] * at(idx[0] + 1);
  const double f00 = at(idx[0], idx[1]);
  const double f01 = at(idx[0], idx[1] + 1);
  const double f10 = at(idx[0] + 1, idx[1]);
  const double f11 = at(idx[0] + 1, idx[1] + 1);
  return (1.0 - frac[0]) * ((1.0 - frac[1]) * f00 + frac[1] * f01) +
         frac[0] * ((1.0 - frac[1]) * f10 + frac[1] * f11);
}

std::vector<int> lower_hull(const std::vector<double>& x, const std::vector<double>& f) {
  std::vector<int> h;
  h.reserve(x.size());
  for (int i = 0; i < static_cast<int>(x.size()); ++i) {
    while (h.size() >= 2) {
      const int a = h[h.size() - 2];
      const int b = h[h.size() - 1];
      const double cross = (x[b] - x[a]) * (f[i] - f[a]) - (f[b] - f[a]) * (x[i] - x[a]);
      if (cross <= 0.0) {
        h.pop_back();
      } else {
        break;
      }
    }
    h.push_back(i);
  }
  return h;
}

ConjugateResult discrete_conjugate(const GridFn& f, const DualGridSpec& dual,
                                   const ConjugateOptions& options) {
  f.validate();
  ConjugateResult out;
  out.input_convexity_defect = convexity_defect(f);
  double fscale = 1.0;
  for (double v : f.values) fscale = std::max(fscale, std::abs(v));
  if (out.input_convexity_defect > 1e-10 * fscale) {
    std::ostringstream os;
    os << "input is not convex in samples (defect " << out.input_convexity_defect
       << "); transform returns the conjugate of its convex envelope";
    out.warnings.push_back(os.str());
  }

  std::array<double, 2> ylo{0.0, 0.0};
  std::array<double, 2> yhi{0.0, 0.0};
  std::array<int, 2> ycount{1, 1};
  for (int a = 0; a < f.d; ++a) {
    auto [smin, smax] = slope_range(f, a);
    const double width = smax - smin;
    const double pad = width > 0.0 ? 0.1 * width : 0.1 * std::max(1.0, std::abs(smin));
    ylo[a] = dual.lo ? (*dual.lo)[a] : smin - pad;
    yhi[a] = dual.hi ? (*dual.hi)[a] : smax + pad;
    ycount[a] = dual.counts ? (*dual.counts)[a] : 2 * f.counts[a] - 1;
    if (ycount[a] < 3 || !(ylo[a] < yhi[a])) {
      throw std::invalid_argument("discrete_conjugate: invalid dual grid");
    }
  }
  const bool explicit_box = dual.lo.has_value() || dual.hi.has_value();
  auto sweep = [&](const std::vector<double>& x, const std::vector<double>& vals,
                   const std::vector<double>& y) {
    return options.brute_force ? brute_sweep(x, vals, y) : hull_sweep(x, vals, y);
  };

  if (f.d == 1) {
    const std::vector<double> x = axis_nodes(f.lo[0], f.hi[0], f.counts[0]);
    const std::vector<double> y = axis_nodes(ylo[0], yhi[0], ycount[0]);
    Sweep s = sweep(x, f.values, y);
    std::vector<int> flagged;
    for (size_t j = 0; j < y.size(); ++j) {
      if (s.argmax[j] == 0 || s.argmax[j] == f.counts[0] - 1) flagged.push_back(static_cast<int>(j));
    }
    out.boundary_fraction = static_cast<double>(flagged.size()) / static_cast<double>(y.size());
    if (explicit_box && out.boundary_fraction > 0.05) {
      throw DualBoxTooSmall("discrete_conjugate: maximizer on primal boundary for " +
                            std::to_string(100.0 * out.boundary_fraction) +
                            "% of dual nodes; affected dual region " + describe_region(y, flagged));
    }
    out.conjugate = GridFn::make_1d(ylo[0], yhi[0], std::move(s.value));
    return out;
  }

  // 2-D: h(i0, y1) = max_i1 x1*y1 - f(i0, i1), then g(y0, y1) = max_i0 x0*y0 + h(i0, y1).
  const int n0 = f.counts[0];
  const int n1 = f.counts[1];
  const std::vector<double> x0 = axis_nodes(f.lo[0], f.hi[0], n0);
  const std::vector<double> x1 = axis_nodes(f.lo[1], f.hi[1], n1);
  const std::vector<double> y0 = axis_nodes(ylo[0], yhi[0], ycount[0]);
  const std::vector<double> y1 = axis_nodes(ylo[1], yhi[1], ycount[1]);
  const int m0 = ycount[0];
  const int m1 = ycount[1];

  std::vector<double> partial(static_cast<size_t>(n0) * m1);
  size_t edge_hits_1 = 0;
  std::vector<int> flagged1;
  for (int i = 0; i < n0; ++i) {
    std::vector<double> row(f.values.begin() + static_cast<long>(i) * n1,
                            f.values.begin() + static_cast<long>(i + 1) * n1);
    Sweep s = sweep(x1, row, y1);
    for (int j = 0; j < m1; ++j) {
      partial[static_cast<size_t>(i) * m1 + j] = s.value[static_cast<size_t>(j)];
      if (s.argmax[static_cast<size_t>(j)] == 0 || s.argmax[static_cast<size_t>(j)] == n1 - 1) {
        ++edge_hits_1;
        flagged1.push_back(j);
      }
    }
  }
  std::vector<double> result(static_cast<size_t>(m0) * m1);
  size_t edge_hits_0 = 0;
  std::vector<int> flagged0;
  std::vector<double> column(static_cast<size_t>(n0));
  for (int j = 0; j < m1; ++j) {
    for (int i = 0; i < n0; ++i) column[static_cast<size_t>(i)] = -partial[static_cast<size_t>(i) * m1 + j];
    Sweep s = sweep(x0, column, y0);
    for (int k = 0; k < m0; ++k) {
      result[static_cast<size_t>(k) * m1 + j] = s.value[static_cast<size_t>(k)];
      if (s.argmax[static_cast<size_t>(k)] == 0 || s.argmax[static_cast<size_t>(k)] == n0 - 1) {
        ++edge_hits_0;
        flagged0.push_back(k);
      }
    }
  }
  const double frac1 = static_cast<double>(edge_hits_1) / (static_cast<double>(n0) * m1);
  const double frac0 = static_cast<double>(edge_hits_0) / (static_cast<double>(m0) * m1);
  out.boundary_fraction = std::max(frac0, frac1);
  if (explicit_box && out.boundary_fraction > 0.05) {
    throw DualBoxTooSmall("discrete_conjugate: maximizer on primal boundary for " +
                          std::to_string(100.0 * out.boundary_fraction) +
                          "% of dual nodes; affected dual region y0 in " +
                          describe_region(y0, flagged0) + ", y1 in " +
                          describe_region(y1, flagged1));
  }
  out.conjugate = GridFn::make_2d(ylo, yhi, {m0, m1}, std::move(result));
  return out;
}

double convexity_defect(const GridFn& f) {
  if (f.d == 1) {
    return defect_1d(axis_nodes(f.lo[0], f.hi[0], f.counts[0]), f.values);
  }
  const int n0 = f.counts[0];
  const int n1 = f.counts[1];
  const std::vector<double> x0 = axis_nodes(f.lo[0], f.hi[0], n0);
  const std::vector<double> x1 = axis_nodes(f.lo[1], f.hi[1], n1);
  double worst = 0.0;
  std::vector<double> line;
  for (int i = 0; i < n0; ++i) {
    line.assign(f.values.begin() + static_cast<long>(i) * n1,
                f.values.begin() + static_cast<long>(i + 1) * n1);
    worst = std::max(worst, defect_1d(x1, line));
  }
  line.resize(static_cast<size_t>(n0));
  for (int j = 0; j < n1; ++j) {
    for (int i = 0; i < n0; ++i) line[static_cast<size_t>(i)] = f.at(i, j);
    worst = std::max(worst, defect_1d(x0, line));
  }
  return worst;
}

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream is(line);
  while (std::getline(is, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

double parse_cell(const std::string& cell, const std::string& path, int line_no) {
  try {
    size_t used = 0;
    const double v = std::stod(cell, &used);
    for (size_t i = used; i < cell.size(); ++i) {
      if (!std::isspace(static_cast<unsigned char>(cell[i]))) throw std::invalid_argument(cell);
    }
    return v;
  } catch (const std::exception&) {
    throw std::runtime_error(path + ":" + std::to_string(line_no) + ": cannot parse number '" +
                             cell + "'");
  }
}

void check_uniform(const std::vector<double>& nodes, const std::string& path, const char* axis) {
  if (nodes.size() < 3) throw std::runtime_error(path + ": need at least 3 nodes on " + axis);
  const double step = (nodes.back() - nodes.front()) / static_cast<double>(nodes.size() - 1);
  if (!(step > 0.0)) throw std::runtime_error(path + ": nodes on " + std::string(axis) + " must increase");
  for (size_t i = 0; i < nodes.size(); ++i) {
    const double expected = nodes.front() + static_cast<double>(i) * step;
    if (std::abs(nodes[i] - expected) > 1e-9 * (std::abs(step) + std::abs(expected))) {
      throw std::runtime_error(path + ": non-uniform spacing on " + std::string(axis));
    }
  }
}

}  // namespace

GridFn load_grid_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open grid file '" + path + "'");
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    if (line[line.find_first_not_of(" \t")] == '#') continue;
    rows.push_back(split_csv(line));
  }
  if (rows.empty()) throw std::runtime_error(path + ": empty grid file");

  const bool two_d = rows.front().size() > 2 ||
                     (rows.front().front().find_first_not_of(" \t") == std::string::npos);
  if (!two_d) {
    std::vector<double> xs;
    std::vector<double> fs;
    for (size_t r = 0; r < rows.size(); ++r) {
      if (rows[r].size() != 2) {
        throw std::runtime_error(path + ":" + std::to_string(r + 1) + ": expected 2 columns");
      }
      xs.push_back(parse_cell(rows[r][0], path, static_cast<int>(r + 1)));
      fs.push_back(parse_cell(rows[r][1], path, static_cast<int>(r + 1)));
    }
    check_uniform(xs, path, "x");
    return GridFn::make_1d(xs.front(), xs.back(), std::move(fs));
  }

  const auto& header = rows.front();
  std::vector<double> x1;
  for (size_t c = 1; c < header.size(); ++c) x1.push_back(parse_cell(header[c], path, 1));
  std::vector<double> x0;
  std::vector<double> vals;
  for (size_t r = 1; r < rows.size(); ++r) {
    if (rows[r].size() != header.size()) {
      throw std::runtime_error(path + ":" + std::to_string(r + 1) + ": row width mismatch");
    }
    x0.push_back(parse_cell(rows[r][0], path, static_cast<int>(r + 1)));
    for (size_t c = 1; c < rows[r].size(); ++c) {
      vals.push_back(parse_cell(rows[r][c], path, static_cast<int>(r + 1)));
    }
  }
  check_uniform(x0, path, "axis 0");
  check_uniform(x1, path, "axis 1");
  return GridFn::make_2d({x0.front(), x1.front()}, {x0.back(), x1.back()},
                         {static_cast<int>(x0.size()), static_cast<int>(x1.size())},
                         std::move(vals));
}

std::string grid_to_csv(const GridFn& g) {
  std::ostringstream os;
  os << std::setprecision(17);
  if (g.d == 1) {
    for (int i = 0; i < g.counts[0]; ++i) os << g.node(0, i) << "," << g.at(i) << "\n";
    return os.str();
  }
  for (int j = 0; j < g.counts[1]; ++j) os << "," << g.node(1, j);
  os << "\n";
  for (int i = 0; i < g.counts[0]; ++i) {
    os << g.node(0, i);
    for (int j = 0; j < g.counts[1]; ++j) os << "," << g.at(i, j);
    os << "\n";
  }
  return os.str();
}

}  // namespace hamdual
