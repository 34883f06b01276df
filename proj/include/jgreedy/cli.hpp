#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "jgreedy/experiments.hpp"
#include "jgreedy/slope_fit.hpp"

namespace jgreedy::cli {

inline constexpr const char* kToolVersion = "0.1.0";

enum ExitCode : int { kOk = 0, kConfigError = 2, kNumericalError = 3 };

/// Everything a command needs; serialized as the "config" object of the manifest.
struct RunConfig {
  ExperimentConfig experiment;
  std::vector<double> d_sweep{0.5, 0.25, 0.125};  // near-one
  double theta_lo = 0.1;                          // darboux-check
  double theta_hi = 3.0415926535897931;
  std::size_t points = 200;
  std::size_t trials = 10000;                     // identity-check
};

struct RunManifest {
  std::string command;
  RunConfig config;
  std::string output_dir;
  std::string tool_version = kToolVersion;
  std::string timestamp;
};

/// Column headers of <command>.csv.
std::string csv_header(const std::string& command);

/// Two-column "log10 x  log10 y" data file plus `<path>.fit` with the fitted line.
/// Throws EvaluationError for an empty fit without touching the file system.
void emit_plot_data(const SlopeFit& fit, const std::filesystem::path& path);

/// Parses a plot data file back into (x, y) pairs.
std::vector<std::pair<double, double>> read_plot_data(const std::filesystem::path& path);

/// Entry point. Exit 0 on success, 2 on configuration errors, 3 on numerical failures.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace jgreedy::cli
