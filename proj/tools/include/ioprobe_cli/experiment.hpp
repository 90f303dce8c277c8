#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "ioprobe_cli/config.hpp"

namespace ioprobe::cli {

struct RunOptions {
  std::optional<std::filesystem::path> out;
  std::optional<std::uint64_t> seed;
};

/// --out, then the config's [run] out, then $IOPROBE_OUT_DIR, then `fallback`.
std::filesystem::path resolve_out_dir(const RunOptions& opts, const ExperimentConfig& cfg,
                                      const std::string& fallback);

struct SummaryRow {
  std::string property;
  std::string quantity;
  double estimate = 0.0;
  std::optional<double> truth;
  std::optional<double> rel_error;
  std::size_t samples_used = 0;
};

struct CompareRow {
  std::string method;
  std::size_t budget = 0;
  std::optional<double> estimate;
  double truth = 0.0;
  std::optional<double> rel_error;
  std::size_t samples_used = 0;
};

/// Writes trace.csv, trace_<property>.csv, flow_<property>.csv (flow methods),
/// summary.csv and meta into `out_dir`. Estimator errors propagate after the
/// partial outputs are on disk.
std::vector<SummaryRow> run_experiment(const ExperimentConfig& cfg,
                                       const std::filesystem::path& out_dir);

/// One row per (method, budget) into compare.csv, plus meta.
std::vector<CompareRow> compare_experiment(const ExperimentConfig& cfg,
                                           const std::filesystem::path& out_dir);

/// Dense ground-truth report for a plant file, as `quantity,value` CSV.
void truth_report(const std::filesystem::path& plant_file, std::ostream& out);

/// |estimate - truth| / |truth|, or the absolute error when truth is 0.
double relative_error(double estimate, double truth);

/// Process exit code for an exception escaping a command.
int exit_code_for(const std::exception& e);

}  // namespace ioprobe::cli
