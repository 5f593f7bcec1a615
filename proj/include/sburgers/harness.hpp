#pragma once

// Command layer shared by the `sburgers` executable and the acceptance test.
//
// Exit status: 0 success, 1 a check failed, 2 configuration error,
// 3 numerical failure (blow-up or an invalid estimate).

#include "sburgers/config.hpp"
#include "sburgers/cylinder.hpp"
#include "sburgers/stats.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace sburgers {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailed = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumerical = 3;

inline constexpr const char* kToolVersion = "1.0.0";

using Params = std::vector<std::pair<std::string, std::string>>;

/// One row of results.csv: op,t,h_spec,x_spec,mean_re,mean_im,stderr,n.
/// params and wall time go to the manifest only, so the CSV is reproducible.
struct EstimateRecord {
  std::string op;
  double t = 0.0;
  std::string h_spec;
  std::string x_spec;
  Complex mean{};
  double std_error = 0.0;
  std::size_t n = 0;
  Params params;
  double wall_time_s = 0.0;
};

/// One row of residuals.csv: t,res_re,res_im,mc_err,quad_err.
struct ResidualRecord {
  double t = 0.0;
  Complex residual{};
  double mc_err = 0.0;
  double quad_err = 0.0;
};

struct CriterionResult {
  int id = 0;
  std::string name;
  /// Numerical verdict; a pure function of seed and inputs.
  bool numeric_pass = false;
  std::string measured;
  std::string threshold;
  double wall_time_s = 0.0;
  /// 0 when the criterion has no runtime budget.
  double budget_s = 0.0;

  bool within_budget() const { return budget_s <= 0.0 || wall_time_s <= budget_s; }
  bool pass() const { return numeric_pass && within_budget(); }
};

struct RunOutput {
  std::vector<EstimateRecord> estimates;
  std::vector<ResidualRecord> residuals;
  std::vector<CriterionResult> criteria;
  Params extra;
};

void write_results_csv(std::ostream& os, const std::vector<EstimateRecord>& rows);
void write_residuals_csv(std::ostream& os, const std::vector<ResidualRecord>& rows);
/// criterion,name,pass,measured,threshold (no timing).
void write_acceptance_csv(std::ostream& os, const std::vector<CriterionResult>& rows);

/// Criteria 1-10 at the fixed acceptance settings. Progress lines go to log
/// when it is non-null.
RunOutput run_acceptance_criteria(std::uint64_t seed, int workers, std::ostream* log);

struct AcceptanceSummary {
  std::vector<CriterionResult> criteria;  // 1..11
  bool all_pass() const;
};

/// Runs criteria 1-10 once per worker count, writing each run's files to
/// out_dir/workers-N/, then adds criterion 11 (byte-identical files).
AcceptanceSummary run_acceptance(std::uint64_t seed, const std::vector<int>& worker_counts,
                                 const std::filesystem::path& out_dir, std::ostream* log);

/// Runs one CLI command with a parsed configuration and writes its artifacts
/// (results/residuals/trajectory CSVs and manifest.json) into out_dir.
/// Returns the exit status; exceptions map to statuses 2 and 3.
int run_command(const std::string& command, const RunConfig& cfg, const std::string& config_text,
                const std::filesystem::path& out_dir, std::ostream& log);

const std::vector<std::string>& command_names();

}  // namespace sburgers
