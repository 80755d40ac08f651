#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "finom/problem.hpp"
#include "finom/solver.hpp"

namespace finom::cli {

inline constexpr const char* kReportSchema = "finom-report/1";

enum class NodeSource { Chebyshev, Random, File };
enum class Variant { Finom, Dense, Both };

/// Problem selection shared by every subcommand.
struct ProblemSpec {
  int dim = 1;
  std::size_t n = 100;
  std::optional<std::size_t> m;
  NodeSource nodes = NodeSource::Random;
  std::string input;
  std::uint64_t seed = 0;
};

struct RunOptions {
  ProblemSpec problem;
  SolverConfig config;
  Variant variant = Variant::Finom;
  std::size_t trials = 10;
  std::string output;
  std::string csv;
  std::string plan_dump;
  std::vector<std::size_t> sizes;
  bool time_to_error = false;
  std::vector<double> thresholds{1e-2, 1e-4, 1e-6};
  std::vector<double> eps_list{0.1, 0.01, 0.001};
};

/// Builds the problem described by `spec` (generated or loaded).
/// Throws finom::Error with InvalidArgument for bad combinations.
Problem make_problem(const ProblemSpec& spec);

/// Ordinary least squares of log(time) against log(size).
struct ExponentFit {
  double exponent = 0.0;
  double intercept = 0.0;
  /// Root-mean-square residual in log space.
  double residual = 0.0;
};

/// Throws InvalidArgument for fewer than four points or nonpositive values.
ExponentFit fit_exponent(const std::vector<double>& sizes, const std::vector<double>& times);

nlohmann::json cmd_gen(const RunOptions& options);
nlohmann::json cmd_solve(const RunOptions& options);
nlohmann::json cmd_compare(const RunOptions& options);
nlohmann::json cmd_bench(const RunOptions& options);

/// Writes `report` to options.output (or `out` when empty).
void emit_report(const nlohmann::json& report, const RunOptions& options, std::ostream& out);

/// Parses and dispatches a full command line; returns the process exit status.
int run(int argc, char** argv);

}  // namespace finom::cli
