#include "hamdual/cli.hpp"

#include <unistd.h>

#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

namespace hamdual::cli {

using nlohmann::json;

namespace {

std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

json vec_json(const Vec& v) {
  json a = json::array();
  for (int i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

json num_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json certificate_json(const Certificate& c) {
  json j;
  j["action_value"] = num_or_null(c.action_value);
  j["pass"] = c.pass;
  j["tol"] = c.tol;
  j["h"] = c.h;
  j["max_interior_residual"] = num_or_null(c.max_interior());
  j["max_weighted_interior_residual"] = num_or_null(c.max_weighted_interior());
  j["worst_interval"] = c.worst_interval;
  j["boundary_start_residual"] = num_or_null(c.boundary_start_residual);
  j["boundary_end_residual"] = num_or_null(c.boundary_end_residual);
  j["max_inclusion_residual"] = num_or_null(c.max_inclusion());
  j["energy_drift"] = c.energy_drift ? num_or_null(*c.energy_drift) : json(nullptr);
  j["hamiltonian"] = c.hamiltonian;
  if (!c.note.empty()) j["note"] = c.note;
  return j;
}

int exit_for(SolveStatus s) {
  switch (s) {
    case SolveStatus::Converged:
      return kOk;
    case SolveStatus::HypothesisFailed:
      return kHypothesisFailed;
    case SolveStatus::StalledAboveTol:
      return kStalled;
  }
  return kStalled;
}

void print_checks(const HypothesisReport& rep, std::ostream& out) {
  for (const auto& c : rep.checks) {
    out << std::left << std::setw(24) << c.name << " " << to_string(c.status);
    if (!c.detail.empty()) out << "  " << c.detail;
    out << "\n";
    for (const auto& [k, v] : c.values) out << "    " << k << " = " << g17(v) << "\n";
    if (c.witness) {
      out << "    witness = [";
      for (int i = 0; i < c.witness->size(); ++i) out << (i ? ", " : "") << g17((*c.witness)[i]);
      out << "]\n";
    }
  }
}

}  // namespace

int worker_count() {
  if (const char* env = std::getenv("HAMDUAL_WORKERS")) {
    char* end = nullptr;
    const long n = std::strtol(env, &end, 10);
    if (end != env && n >= 1) return static_cast<int>(std::min<long>(n, 256));
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

void write_atomic(const std::filesystem::path& path, const std::string& contents) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp." + std::to_string(::getpid()) + "." +
         std::to_string(std::hash<std::thread::id>{}(std::this_thread::get_id()));
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot write " + tmp.string());
    f << contents;
    f.flush();
    if (!f) throw std::runtime_error("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

json hypothesis_json(const HypothesisReport& rep) {
  json a = json::array();
  for (const auto& c : rep.checks) {
    json j;
    j["name"] = c.name;
    j["status"] = to_string(c.status);
    j["detail"] = c.detail;
    json vals = json::object();
    for (const auto& [k, v] : c.values) vals[k] = num_or_null(v);
    j["values"] = vals;
    j["witness"] = c.witness ? vec_json(*c.witness) : json(nullptr);
    a.push_back(j);
  }
  return a;
}

json report_json(const ProblemConfig& cfg, const SolveResult& res) {
  json j;
  j["status"] = to_string(res.status);
  j["tol_zero"] = res.tol_zero;
  j["M"] = res.path.M;
  j["horizon"] = res.path.T;
  j["final_action"] = num_or_null(res.certificate.action_value);
  j["certificate"] = certificate_json(res.certificate);
  j["raw_certificate"] = res.raw_certificate ? certificate_json(*res.raw_certificate) : json(nullptr);
  if (res.raw_certificate) {
    j["smoothing_discrepancy"] = num_or_null(res.raw_certificate->action_value - res.certificate.action_value);
  }
  json stages = json::array();
  for (const auto& s : res.stages) {
    json st;
    st["eps"] = s.eps;
    st["lambda"] = s.lambda;
    st["action_start"] = num_or_null(s.action_start);
    st["action_end"] = num_or_null(s.action_end);
    st["iterations"] = s.iterations;
    st["stop_reason"] = s.stop_reason;
    st["max_derivative"] = s.max_derivative;
    st["prox_displacement"] = s.prox_displacement ? json(*s.prox_displacement) : json(nullptr);
    stages.push_back(st);
  }
  j["stages"] = stages;
  j["hypotheses"] = hypothesis_json(res.hypotheses);
  j["hypotheses_note"] = "growth and limit conditions are verified on samples only, never proved";
  j["log"] = res.log;
  j["config"] = cfg.source;
  return j;
}

std::string residuals_csv(const SolveResult& res) {
  std::string out = "k,t_mid,interior,weighted_interior,inclusion\n";
  const Certificate& c = res.certificate;
  for (size_t k = 0; k < c.interior_residuals.size(); ++k) {
    const double tm = (static_cast<double>(k) + 0.5) * c.h;
    const double inc = k < c.inclusion_residuals.size() ? c.inclusion_residuals[k] : NAN;
    out += std::to_string(k) + "," + g17(tm) + "," + g17(c.interior_residuals[k]) + "," +
           g17(c.h * c.interior_residuals[k]) + "," + (std::isnan(inc) ? std::string("nan") : g17(inc)) + "\n";
  }
  return out;
}

int cmd_check(const std::filesystem::path& config, std::ostream& out, std::ostream& err) {
  ProblemConfig cfg;
  try {
    cfg = load_config(config);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kConfigFault;
  }
  const HypothesisReport rep = check_problem(cfg.spec, 4000, cfg.params.seed);
  print_checks(rep, out);
  out << "note: growth and limit conditions are verified on samples only, never proved\n";
  return rep.all_passed() ? kOk : kHypothesisFailed;
}

int cmd_solve(const std::filesystem::path& config, const std::optional<std::string>& out_dir,
              const std::optional<std::uint64_t>& seed, std::ostream& out, std::ostream& err) {
  ProblemConfig cfg;
  try {
    cfg = load_config(config);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kConfigFault;
  }
  if (seed) cfg.params.seed = *seed;
  const std::filesystem::path dir = out_dir.value_or(cfg.output_dir);
  SolveResult res;
  try {
    res = solve(cfg.spec, cfg.params);
  } catch (const NotCoercive& e) {
    err << "config error: " << e.what() << "\n";
    return kConfigFault;
  } catch (const std::invalid_argument& e) {
    err << "config error: " << e.what() << "\n";
    return kConfigFault;
  } catch (const std::exception& e) {
    err << "solver error: " << e.what() << "\n";
    return kStalled;
  }
  try {
    write_atomic(dir / "trajectory.csv", path_to_csv(res.path));
    write_atomic(dir / "residuals.csv", residuals_csv(res));
    write_atomic(dir / "report.json", report_json(cfg, res).dump(2) + "\n");
  } catch (const std::exception& e) {
    err << "output error: " << e.what() << "\n";
    return kConfigFault;
  }
  print_checks(res.hypotheses, out);
  for (const auto& line : res.log) out << line << "\n";
  out << "status: " << to_string(res.status) << "\n";
  out << "final action: " << g17(res.certificate.action_value) << " (tol " << g17(res.tol_zero) << ")\n";
  if (res.raw_certificate) out << "unsmoothed action: " << g17(res.raw_certificate->action_value) << "\n";
  out << "artifacts: " << dir.string() << "\n";
  return exit_for(res.status);
}

int cmd_sweep(const std::filesystem::path& config, const std::string& param, const std::vector<double>& values,
              const std::optional<std::string>& out_dir, std::ostream& out, std::ostream& err) {
  if (values.empty()) {
    err << "config error: --values must list at least one value\n";
    return kConfigFault;
  }
  if (param != "lambda" && param != "eps" && param != "M" && param != "T") {
    err << "config error: --param must be one of lambda, eps, M, T\n";
    return kConfigFault;
  }
  ProblemConfig base;
  try {
    base = load_config(config);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kConfigFault;
  }
  for (double v : values) {
    if (!(v > 0.0) || !std::isfinite(v) || (param == "M" && v != std::floor(v))) {
      err << "config error: invalid sweep value " << g17(v) << "\n";
      return kConfigFault;
    }
  }

  struct Row {
    double value = 0.0;
    std::optional<SolveResult> result;
    std::string error;
  };
  std::vector<Row> rows(values.size());
  std::atomic<size_t> next{0};
  auto work = [&] {
    for (size_t i = next++; i < rows.size(); i = next++) {
      Row& row = rows[i];
      row.value = values[i];
      ProblemSpec spec = base.spec;
      SolveParams params = base.params;
      params.run_checks = false;
      if (param == "lambda") params.lambda_schedule = {row.value};
      if (param == "eps") params.eps_schedule = {row.value};
      if (param == "M") params.M = static_cast<int>(row.value);
      if (param == "T") spec.T = row.value;
      try {
        row.result = solve(spec, params);
      } catch (const std::exception& e) {
        row.error = e.what();
      }
    }
  };
  const int nworkers = std::min<int>(worker_count(), static_cast<int>(rows.size()));
  std::vector<std::thread> pool;
  for (int w = 1; w < nworkers; ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();

  json table = json::array();
  std::ostringstream csv;
  csv << param << ",status,final_action,raw_action,max_inclusion,max_derivative,prox_displacement,successive_diff\n";
  double first_deriv = NAN;
  for (size_t i = 0; i < rows.size(); ++i) {
    const Row& row = rows[i];
    json r;
    r[param] = row.value;
    if (!row.result) {
      r["status"] = "failed";
      r["error"] = row.error;
      table.push_back(r);
      csv << g17(row.value) << ",failed,,,,,,\n";
      continue;
    }
    const SolveResult& s = *row.result;
    r["status"] = to_string(s.status);
    r["final_action"] = num_or_null(s.certificate.action_value);
    r["raw_action"] = s.raw_certificate ? num_or_null(s.raw_certificate->action_value) : json(nullptr);
    r["max_inclusion"] = num_or_null(s.certificate.max_inclusion());
    const StageRecord& last = s.stages.empty() ? StageRecord{} : s.stages.back();
    r["max_derivative"] = last.max_derivative;
    if (std::isnan(first_deriv)) first_deriv = last.max_derivative;
    r["derivative_growth"] = last.max_derivative / first_deriv;
    r["prox_displacement"] = last.prox_displacement ? json(*last.prox_displacement) : json(nullptr);
    if (param == "lambda" && last.prox_displacement) r["displacement_over_lambda"] = *last.prox_displacement / row.value;
    double diff = NAN;
    if (param == "M" && i + 1 < rows.size() && rows[i + 1].result) {
      const PathGrid& a = s.path;
      const PathGrid& b = rows[i + 1].result->path;
      if (b.M % a.M == 0) {
        const int stride = b.M / a.M;
        diff = 0.0;
        for (int k = 0; k <= a.M; ++k) {
          diff = std::max(diff, (a.p.row(k) - b.p.row(k * stride)).cwiseAbs().maxCoeff());
          diff = std::max(diff, (a.q.row(k) - b.q.row(k * stride)).cwiseAbs().maxCoeff());
        }
      }
    }
    r["successive_diff"] = num_or_null(diff);
    table.push_back(r);
    csv << g17(row.value) << "," << to_string(s.status) << "," << g17(s.certificate.action_value) << ","
        << (s.raw_certificate ? g17(s.raw_certificate->action_value) : "") << "," << g17(s.certificate.max_inclusion())
        << "," << g17(last.max_derivative) << "," << (last.prox_displacement ? g17(*last.prox_displacement) : "")
        << "," << (std::isnan(diff) ? "" : g17(diff)) << "\n";
  }
  // Observed order from successive differences of consecutive refinements.
  if (param == "M") {
    for (size_t i = 0; i + 1 < table.size(); ++i) {
      const json& a = table[i]["successive_diff"];
      const json& b = table[i + 1]["successive_diff"];
      if (a.is_number() && b.is_number() && b.get<double>() > 0.0) {
        const double ratio = values[i + 1] / values[i];
        table[i + 1]["order"] = std::log(a.get<double>() / b.get<double>()) / std::log(ratio);
      }
    }
  }
  json summary;
  summary["param"] = param;
  summary["rows"] = table;
  if (param == "lambda") {
    double c = 0.0;
    for (const auto& r : table) {
      if (r.contains("displacement_over_lambda")) c = std::max(c, r["displacement_over_lambda"].get<double>());
    }
    summary["fitted_c"] = c;
  }

  const std::filesystem::path dir = out_dir.value_or(base.output_dir);
  try {
    write_atomic(dir / ("sweep_" + param + ".json"), summary.dump(2) + "\n");
    write_atomic(dir / ("sweep_" + param + ".csv"), csv.str());
  } catch (const std::exception& e) {
    err << "output error: " << e.what() << "\n";
    return kConfigFault;
  }
  out << summary.dump(2) << "\n";
  return kOk;
}

}  // namespace hamdual::cli
