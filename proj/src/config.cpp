#include "hamdual/config.hpp"

#include <fstream>
#include <set>

namespace hamdual {

using nlohmann::json;

namespace {

std::string child(const std::string& where, const std::string& key) { return where + "/" + key; }
std::string child(const std::string& where, size_t i) { return where + "/" + std::to_string(i); }

const json& require(const json& obj, const std::string& key, const std::string& where) {
  if (!obj.is_object()) throw ConfigError(where, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) throw ConfigError(where, "missing required key '" + key + "'");
  return *it;
}

void only_keys(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
  if (!obj.is_object()) throw ConfigError(where, "expected an object");
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (allowed.count(it.key()) == 0) throw ConfigError(child(where, it.key()), "unknown key");
  }
}

double number(const json& v, const std::string& where) {
  if (!v.is_number()) throw ConfigError(where, "expected a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) throw ConfigError(where, "expected a finite number");
  return d;
}

int integer(const json& v, const std::string& where) {
  if (!v.is_number_integer()) throw ConfigError(where, "expected an integer");
  return v.get<int>();
}

double number_or(const json& obj, const std::string& key, double fallback, const std::string& where) {
  auto it = obj.find(key);
  return it == obj.end() ? fallback : number(*it, child(where, key));
}

Vec vector_of(const json& v, int n, const std::string& where) {
  if (v.is_number() && n == 1) return Vec::Constant(1, number(v, where));
  if (!v.is_array()) throw ConfigError(where, "expected an array of " + std::to_string(n) + " numbers");
  if (static_cast<int>(v.size()) != n) {
    throw ConfigError(where, "expected " + std::to_string(n) + " entries, got " + std::to_string(v.size()));
  }
  Vec out(n);
  for (int i = 0; i < n; ++i) out[i] = number(v[static_cast<size_t>(i)], child(where, static_cast<size_t>(i)));
  return out;
}

std::vector<double> list_of(const json& v, const std::string& where) {
  if (!v.is_array()) throw ConfigError(where, "expected an array");
  std::vector<double> out;
  for (size_t i = 0; i < v.size(); ++i) out.push_back(number(v[i], child(where, i)));
  return out;
}

Mat matrix_of(const json& v, int n, const std::string& where) {
  if (!v.is_array() || static_cast<int>(v.size()) != n) {
    throw ConfigError(where, "expected a " + std::to_string(n) + "x" + std::to_string(n) + " matrix");
  }
  Mat A(n, n);
  for (int i = 0; i < n; ++i) {
    const Vec row = vector_of(v[static_cast<size_t>(i)], n, child(where, static_cast<size_t>(i)));
    A.row(i) = row.transpose();
  }
  return A;
}

// Indices of the "on" block and the dimension of the inner function.
std::vector<int> block_indices(const json& spec, int n, int block_dim, const std::string& where) {
  std::string on = block_dim > 0 ? "pq" : "all";
  if (auto it = spec.find("on"); it != spec.end()) {
    if (!it->is_string()) throw ConfigError(child(where, "on"), "expected \"p\", \"q\" or \"pq\"");
    on = it->get<std::string>();
  }
  std::vector<int> idx;
  if (on == "all" || on == "pq") {
    if (on == "pq" && block_dim == 0) throw ConfigError(child(where, "on"), "block selection only applies to a Hamiltonian");
    for (int i = 0; i < n; ++i) idx.push_back(i);
  } else if (on == "p" || on == "q") {
    if (block_dim == 0) throw ConfigError(child(where, "on"), "block selection only applies to a Hamiltonian");
    const int off = on == "p" ? 0 : block_dim;
    for (int i = 0; i < block_dim; ++i) idx.push_back(off + i);
  } else {
    throw ConfigError(child(where, "on"), "expected \"p\", \"q\" or \"pq\"");
  }
  return idx;
}

ConvexFn place(ConvexFn inner, const std::vector<int>& idx, int n) {
  return ConvexFn::embedded(std::move(inner), idx, n);
}

}  // namespace

ConvexFn parse_expression(const json& node, int n, int block_dim, const std::string& where,
                          const std::filesystem::path& base_dir) {
  if (!node.is_object() || node.size() != 1) {
    throw ConfigError(where, "expected an object with exactly one of quadratic, power, affine, grid, sum, scaled");
  }
  const std::string kind = node.begin().key();
  const json& spec = node.begin().value();
  const std::string at = child(where, kind);
  try {
    if (kind == "sum") {
      if (!spec.is_array() || spec.empty()) throw ConfigError(at, "expected a non-empty array of expressions");
      std::vector<ConvexFn> terms;
      for (size_t i = 0; i < spec.size(); ++i) {
        terms.push_back(parse_expression(spec[i], n, block_dim, child(at, i), base_dir));
      }
      return ConvexFn::sum(std::move(terms));
    }
    if (kind == "scaled") {
      only_keys(spec, {"factor", "term"}, at);
      const double c = number(require(spec, "factor", at), child(at, "factor"));
      if (c < 0.0) throw ConfigError(child(at, "factor"), "factor must be nonnegative");
      return parse_expression(require(spec, "term", at), n, block_dim, child(at, "term"), base_dir).scaled(c);
    }
    if (!spec.is_object()) throw ConfigError(at, "expected an object");
    const std::vector<int> idx = block_indices(spec, n, block_dim, at);
    const int m = static_cast<int>(idx.size());
    if (kind == "quadratic") {
      only_keys(spec, {"scale", "matrix", "shift", "offset", "on"}, at);
      Mat A;
      if (spec.contains("matrix")) {
        if (spec.contains("scale")) throw ConfigError(at, "give either scale or matrix, not both");
        A = matrix_of(spec["matrix"], m, child(at, "matrix"));
      } else {
        const double s = number_or(spec, "scale", 1.0, at);
        if (s < 0.0) throw ConfigError(child(at, "scale"), "scale must be nonnegative");
        A = s * Mat::Identity(m, m);
      }
      const Vec b = spec.contains("shift") ? vector_of(spec["shift"], m, child(at, "shift")) : Vec::Zero(m);
      const double c = number_or(spec, "offset", 0.0, at);
      return place(ConvexFn::quadratic(A, b, c), idx, n);
    }
    if (kind == "power") {
      only_keys(spec, {"exponent", "scale", "on"}, at);
      const double r = number(require(spec, "exponent", at), child(at, "exponent"));
      if (r < 1.0) throw ConfigError(child(at, "exponent"), "exponent must be at least 1");
      const double c = number_or(spec, "scale", 1.0, at);
      if (c < 0.0) throw ConfigError(child(at, "scale"), "scale must be nonnegative");
      return place(ConvexFn::power_norm(m, r, c), idx, n);
    }
    if (kind == "affine") {
      only_keys(spec, {"slope", "offset", "on"}, at);
      const Vec a = vector_of(require(spec, "slope", at), m, child(at, "slope"));
      return place(ConvexFn::affine(a, number_or(spec, "offset", 0.0, at)), idx, n);
    }
    if (kind == "grid") {
      only_keys(spec, {"file", "on"}, at);
      const json& f = require(spec, "file", at);
      if (!f.is_string()) throw ConfigError(child(at, "file"), "expected a path");
      std::filesystem::path p = f.get<std::string>();
      if (p.is_relative()) p = base_dir / p;
      if (!std::filesystem::exists(p)) throw ConfigError(child(at, "file"), "grid file '" + p.string() + "' not found");
      GridFn g;
      try {
        g = load_grid_csv(p.string());
      } catch (const std::exception& e) {
        throw ConfigError(child(at, "file"), e.what());
      }
      if (g.d != m) {
        throw ConfigError(child(at, "file"), "grid is " + std::to_string(g.d) + "-D but the block has dimension " +
                                                 std::to_string(m));
      }
      return place(ConvexFn::grid(std::move(g)), idx, n);
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw ConfigError(at, e.what());
  }
  throw ConfigError(where, "unknown expression kind '" + kind + "'");
}

ProblemConfig parse_config(const json& doc, const std::filesystem::path& base_dir) {
  only_keys(doc, {"dimension", "horizon", "box", "hamiltonian", "boundary", "growth", "solver", "output"}, "/");
  ProblemConfig cfg;
  cfg.source = doc;

  const int N = integer(require(doc, "dimension", "/"), "/dimension");
  if (N < 1 || 2 * N > kMaxDim) throw ConfigError("/dimension", "must be between 1 and 8");
  const double T = number(require(doc, "horizon", "/"), "/horizon");
  if (!(T > 0.0)) throw ConfigError("/horizon", "must be positive");
  double half = kDefaultBoxHalfWidth;
  if (doc.contains("box")) {
    half = number(doc["box"], "/box");
    if (!(half > 0.0)) throw ConfigError("/box", "must be positive");
  }

  ProblemSpec& spec = cfg.spec;
  spec.T = T;
  spec.box = Box::cube(2 * N, half);
  spec.H = Hamiltonian(parse_expression(require(doc, "hamiltonian", "/"), 2 * N, N, "/hamiltonian", base_dir)
                           .with_box(spec.box));

  const json& b = require(doc, "boundary", "/");
  const json& mode_j = require(b, "mode", "/boundary");
  if (!mode_j.is_string()) throw ConfigError("/boundary/mode", "expected connecting, cauchy or semiconvex");
  const std::string mode = mode_j.get<std::string>();
  const Box psi_box = Box::cube(N, half);
  auto psi = [&](const char* key) {
    return parse_expression(require(b, key, "/boundary"), N, 0, std::string("/boundary/") + key, base_dir)
        .with_box(psi_box);
  };
  auto coercive_index = [&]() {
    if (!b.contains("coercive_index")) return 1;
    const int i = integer(b["coercive_index"], "/boundary/coercive_index");
    if (i != 1 && i != 2) throw ConfigError("/boundary/coercive_index", "must be 1 or 2");
    return i;
  };
  if (mode == "connecting") {
    only_keys(b, {"mode", "psi1", "psi2", "coercive_index"}, "/boundary");
    spec.boundary = Connecting{psi("psi1"), psi("psi2"), coercive_index()};
  } else if (mode == "cauchy") {
    only_keys(b, {"mode", "p0", "q0"}, "/boundary");
    spec.boundary = Cauchy{vector_of(require(b, "p0", "/boundary"), N, "/boundary/p0"),
                           vector_of(require(b, "q0", "/boundary"), N, "/boundary/q0")};
  } else if (mode == "semiconvex") {
    only_keys(b, {"mode", "psi1", "psi2", "delta1", "delta2", "coercive_index"}, "/boundary");
    SemiConvex s;
    s.psi1 = psi("psi1");
    s.psi2 = psi("psi2");
    s.delta1 = number(require(b, "delta1", "/boundary"), "/boundary/delta1");
    s.delta2 = number(require(b, "delta2", "/boundary"), "/boundary/delta2");
    s.coercive_index = coercive_index();
    spec.boundary = s;
  } else {
    throw ConfigError("/boundary/mode", "expected connecting, cauchy or semiconvex, got '" + mode + "'");
  }

  if (doc.contains("growth")) {
    const json& g = doc["growth"];
    only_keys(g, {"alpha", "beta", "gamma", "r"}, "/growth");
    GrowthCert c;
    c.alpha = number_or(g, "alpha", 0.0, "/growth");
    c.beta = number(require(g, "beta", "/growth"), "/growth/beta");
    c.gamma = number_or(g, "gamma", 0.0, "/growth");
    c.r = number_or(g, "r", 2.0, "/growth");
    if (c.alpha < 0.0) throw ConfigError("/growth/alpha", "must be nonnegative");
    if (c.gamma < 0.0) throw ConfigError("/growth/gamma", "must be nonnegative");
    if (!(c.beta > 0.0)) throw ConfigError("/growth/beta", "must be positive");
    if (!(c.r > 1.0)) throw ConfigError("/growth/r", "must exceed 1");
    spec.growth = c;
  }

  SolveParams& p = cfg.params;
  if (doc.contains("solver")) {
    const json& s = doc["solver"];
    only_keys(s, {"M", "eps_schedule", "lambda_schedule", "r", "tol_zero", "max_iters", "seed"}, "/solver");
    if (s.contains("M")) p.M = integer(s["M"], "/solver/M");
    if (s.contains("eps_schedule")) p.eps_schedule = list_of(s["eps_schedule"], "/solver/eps_schedule");
    if (s.contains("lambda_schedule")) p.lambda_schedule = list_of(s["lambda_schedule"], "/solver/lambda_schedule");
    p.r = number_or(s, "r", 4.0, "/solver");
    if (s.contains("tol_zero")) p.tol_zero = number(s["tol_zero"], "/solver/tol_zero");
    if (s.contains("max_iters")) p.max_iters = integer(s["max_iters"], "/solver/max_iters");
    if (s.contains("seed")) {
      if (!s["seed"].is_number_unsigned()) throw ConfigError("/solver/seed", "expected a nonnegative integer");
      p.seed = s["seed"].get<std::uint64_t>();
    }
  }
  if (p.M < 1) throw ConfigError("/solver/M", "must be positive");
  if (p.max_iters < 1) throw ConfigError("/solver/max_iters", "must be positive");
  if (!(p.r > 2.0)) throw ConfigError("/solver/r", "must exceed 2");
  if (p.tol_zero && !(*p.tol_zero > 0.0)) throw ConfigError("/solver/tol_zero", "must be positive");
  try {
    stage_schedule(p);
  } catch (const std::invalid_argument& e) {
    throw ConfigError("/solver", e.what());
  }

  if (doc.contains("output")) {
    const json& o = doc["output"];
    only_keys(o, {"dir"}, "/output");
    if (o.contains("dir")) {
      if (!o["dir"].is_string()) throw ConfigError("/output/dir", "expected a path");
      cfg.output_dir = o["dir"].get<std::string>();
    }
  }
  return cfg;
}

ProblemConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path.string(), "cannot open config file");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string(), std::string("invalid JSON: ") + e.what());
  }
  try {
    return parse_config(doc, path.parent_path().empty() ? std::filesystem::path(".") : path.parent_path());
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ":" + e.where(), std::string(e.what()).substr(e.where().size() + 2));
  }
}

}  // namespace hamdual
