#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "hamdual/solver.hpp"

namespace hamdual {

/// Malformed configuration; `where` is a JSON pointer to the offending node.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& where, const std::string& what)
      : std::runtime_error(where + ": " + what), where_(where) {}
  const std::string& where() const { return where_; }

 private:
  std::string where_;
};

struct ProblemConfig {
  ProblemSpec spec;
  SolveParams params;
  std::string output_dir = "out";
  nlohmann::json source;  // parsed document, echoed in reports
};

/// `base_dir` resolves relative grid file paths.
ProblemConfig parse_config(const nlohmann::json& doc, const std::filesystem::path& base_dir = ".");
ProblemConfig load_config(const std::filesystem::path& path);

/// Builds a function of dimension `n` from an expression node. `block_dim`
/// is N for a Hamiltonian (enables "on": "p" | "q" | "pq"), 0 otherwise.
ConvexFn parse_expression(const nlohmann::json& node, int n, int block_dim, const std::string& where,
                          const std::filesystem::path& base_dir);

}  // namespace hamdual
