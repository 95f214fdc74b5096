#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "hamdual/config.hpp"

namespace hamdual::cli {

enum ExitCode : int { kOk = 0, kConfigFault = 1, kHypothesisFailed = 2, kStalled = 3 };

int cmd_check(const std::filesystem::path& config, std::ostream& out, std::ostream& err);

int cmd_solve(const std::filesystem::path& config, const std::optional<std::string>& out_dir,
              const std::optional<std::uint64_t>& seed, std::ostream& out, std::ostream& err);

int cmd_sweep(const std::filesystem::path& config, const std::string& param, const std::vector<double>& values,
              const std::optional<std::string>& out_dir, std::ostream& out, std::ostream& err);

/// Whole-file write through a temporary file and rename.
void write_atomic(const std::filesystem::path& path, const std::string& contents);

nlohmann::json report_json(const ProblemConfig& cfg, const SolveResult& res);
nlohmann::json hypothesis_json(const HypothesisReport& rep);
std::string residuals_csv(const SolveResult& res);

/// Worker count from HAMDUAL_WORKERS, else hardware concurrency (at least 1).
int worker_count();

}  // namespace hamdual::cli
