#include "finom_cli/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <numeric>
#include <variant>

#include "finom/dense.hpp"
#include "finom/error.hpp"
#include "finom/kernel2d.hpp"

namespace finom::cli {

using nlohmann::json;

namespace {

const char* variant_name(Variant variant) {
  switch (variant) {
    case Variant::Finom: return "finom";
    case Variant::Dense: return "dense";
    case Variant::Both: return "both";
  }
  return "?";
}

const char* nodes_name(NodeSource nodes) {
  switch (nodes) {
    case NodeSource::Chebyshev: return "chebyshev";
    case NodeSource::Random: return "random";
    case NodeSource::File: return "file";
  }
  return "?";
}

json config_json(const SolverConfig& config) {
  return {{"epsilon", config.epsilon},
          {"itr_max", config.itr_max},
          {"tol", config.tol},
          {"stabilize", config.stabilize},
          {"absorb_threshold", config.absorb_threshold},
          {"check_every", config.check_every},
          {"plan_cap", config.plan_cap}};
}

json problem_json(const ProblemSpec& spec) {
  json out = {{"dim", spec.dim}, {"nodes", nodes_name(spec.nodes)}, {"seed", spec.seed}};
  if (spec.nodes == NodeSource::File) {
    out["input"] = spec.input;
  } else {
    out["n"] = spec.n;
    out["m"] = spec.m.value_or(spec.n);
  }
  return out;
}

json report_header(const char* command, const RunOptions& options) {
  return {{"schema", kReportSchema},
          {"command", command},
          {"problem", problem_json(options.problem)},
          {"config", config_json(options.config)}};
}

using Solution = std::variant<Solution1D, Solution2D>;

// One solver run plus the quantities every report needs.
struct RunResult {
  Variant variant = Variant::Finom;
  Solution solution;
  double cost = 0.0;
};

Solution solve(const Problem& problem, const SolverConfig& config, Variant variant) {
  if (const auto* p1 = std::get_if<Problem1D>(&problem)) {
    return variant == Variant::Dense ? dense_sinkhorn(*p1, config) : sinkhorn_1d(*p1, config);
  }
  const auto& p2 = std::get<Problem2D>(problem);
  return variant == Variant::Dense ? dense_sinkhorn_2d(p2, config) : sinkhorn_2d(p2, config);
}

const SolveStats& stats_of(const Solution& solution) {
  return std::visit([](const auto& s) -> const SolveStats& { return s.stats; }, solution);
}

// The dense leg evaluates the objective on the materialized plan; the fast leg
// never forms it.
double cost_of(const Solution& solution, Variant variant, std::size_t cap) {
  if (const auto* s1 = std::get_if<Solution1D>(&solution)) {
    if (variant == Variant::Dense) {
      return transport_cost_dense(plan_dense(*s1, cap), cost_matrix(s1->source, s1->target, cap));
    }
    return transport_cost_fast(*s1);
  }
  const auto& s2 = std::get<Solution2D>(solution);
  if (variant == Variant::Dense) {
    return transport_cost_dense(plan_dense_2d(s2, cap), cost_matrix_2d(s2.source, s2.target, cap));
  }
  return transport_cost_fast_2d(s2);
}

Matrix plan_of(const Solution& solution, std::size_t cap) {
  if (const auto* s1 = std::get_if<Solution1D>(&solution)) return plan_dense(*s1, cap);
  return plan_dense_2d(std::get<Solution2D>(solution), cap);
}

RunResult run_once(const Problem& problem, const SolverConfig& config, Variant variant) {
  RunResult result{variant, solve(problem, config, variant), 0.0};
  result.cost = cost_of(result.solution, variant, config.plan_cap);
  return result;
}

std::pair<std::size_t, std::size_t> shape_of(const Problem& problem) {
  if (const auto* p1 = std::get_if<Problem1D>(&problem)) {
    return {p1->source.size(), p1->target.size()};
  }
  const auto& p2 = std::get<Problem2D>(problem);
  return {p2.source.points(), p2.target.points()};
}

json run_json(const RunResult& run, const Problem& problem, const SolverConfig& config) {
  const SolveStats& stats = stats_of(run.solution);
  const auto [n, m] = shape_of(problem);
  return {{"solver", variant_name(run.variant)},
          {"dim", std::holds_alternative<Problem1D>(problem) ? 1 : 2},
          {"n", n},
          {"m", m},
          {"epsilon", config.epsilon},
          {"iterations", stats.iterations},
          {"converged", stats.converged},
          {"marginal_error", stats.marginal_error},
          {"absorptions", stats.absorptions},
          {"setup_seconds", stats.setup_seconds},
          {"iterate_seconds", stats.iterate_seconds},
          {"wall_seconds", stats.setup_seconds + stats.iterate_seconds},
          {"cost", run.cost}};
}

double mean(const std::vector<double>& values) {
  return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

double relative_inf_diff(std::span<const double> a, std::span<const double> b) {
  double diff = 0.0, scale = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    diff = std::max(diff, std::abs(a[i] - b[i]));
    scale = std::max(scale, std::abs(b[i]));
  }
  return scale > 0.0 ? diff / scale : diff;
}

double iterate_divergence(const Solution& fast, const Solution& dense) {
  return std::visit(
      [&](const auto& f) {
        using T = std::decay_t<decltype(f)>;
        const T& d = std::get<T>(dense);
        return std::max(relative_inf_diff(f.phi, d.phi), relative_inf_diff(f.psi, d.psi));
      },
      fast);
}

void write_plan_csv(const Matrix& plan, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IoError, "cannot open " + path + " for writing");
  for (std::size_t i = 0; i < plan.rows(); ++i) {
    for (std::size_t j = 0; j < plan.cols(); ++j) {
      if (j) out << ',';
      out << format_double(plan(i, j));
    }
    out << '\n';
  }
  if (!out) throw Error(ErrorCode::IoError, "failed writing " + path);
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IoError, "cannot open " + path + " for writing");
  return out;
}

std::vector<std::size_t> default_sizes(int dim, Variant variant) {
  if (dim == 2) return {20, 40, 80, 160};
  if (variant == Variant::Dense) return {250, 500, 1000, 2000};
  return {1000, 2000, 4000, 8000, 16000};
}

ProblemSpec sized(const ProblemSpec& base, std::size_t size) {
  ProblemSpec spec = base;
  if (spec.nodes == NodeSource::File) {
    throw Error(ErrorCode::InvalidArgument, "bench generates its own problems; --input is not used");
  }
  spec.n = size;
  spec.m = size;
  return spec;
}

json sweep_variant(const RunOptions& options, Variant variant, std::ostream* csv) {
  const std::vector<std::size_t> sizes =
      options.sizes.empty() ? default_sizes(options.problem.dim, variant) : options.sizes;
  json records = json::array();
  std::vector<double> fit_sizes, fit_times;
  for (std::size_t size : sizes) {
    const Problem problem = make_problem(sized(options.problem, size));
    const std::size_t n = shape_of(problem).first;
    std::vector<double> iterate_times, setup_times;
    for (std::size_t trial = 0; trial < options.trials; ++trial) {
      const Solution solution = solve(problem, options.config, variant);
      iterate_times.push_back(stats_of(solution).iterate_seconds);
      setup_times.push_back(stats_of(solution).setup_seconds);
    }
    const double points = static_cast<double>(n);
    records.push_back({{"size", size},
                       {"points", n},
                       {"mean_iterate_seconds", mean(iterate_times)},
                       {"mean_setup_seconds", mean(setup_times)},
                       {"mean_wall_seconds", mean(iterate_times) + mean(setup_times)},
                       {"trials", options.trials}});
    fit_sizes.push_back(points);
    fit_times.push_back(mean(iterate_times));
    if (csv) {
      *csv << variant_name(variant) << ',' << size << ',' << n << ','
           << format_double(mean(iterate_times)) << ',' << format_double(mean(setup_times)) << '\n';
    }
  }
  json out = {{"solver", variant_name(variant)},
              {"size_variable", options.problem.dim == 1 ? "N" : "N*M"},
              {"records", records}};
  try {
    const ExponentFit fit = fit_exponent(fit_sizes, fit_times);
    out["fit"] = {{"exponent", fit.exponent},
                  {"intercept", fit.intercept},
                  {"residual", fit.residual}};
  } catch (const Error& e) {
    out["fit"] = nullptr;
    out["fit_error"] = e.what();
    std::cerr << "bench: " << e.what() << '\n';
  }
  return out;
}

json time_to_error(const RunOptions& options, Variant variant, std::ostream* csv) {
  const Problem problem = make_problem(options.problem);
  json out = json::array();
  const double finest = *std::min_element(options.thresholds.begin(), options.thresholds.end());
  for (double eps : options.eps_list) {
    SolverConfig config = options.config;
    config.epsilon = eps;
    config.tol = finest;
    config.check_every = 1;
    json row = {{"solver", variant_name(variant)}, {"epsilon", eps}};
    json crossings = json::array();
    try {
      const Solution solution = solve(problem, config, variant);
      const SolveStats& stats = stats_of(solution);
      for (double threshold : options.thresholds) {
        auto hit = std::find_if(stats.history.begin(), stats.history.end(),
                                [&](const MarginalErrorSample& s) { return s.error <= threshold; });
        json crossing = {{"threshold", threshold}};
        if (hit != stats.history.end()) {
          crossing["iteration"] = hit->iteration;
          crossing["seconds"] = hit->elapsed_seconds + stats.setup_seconds;
        } else {
          crossing["iteration"] = nullptr;
          crossing["seconds"] = nullptr;
        }
        if (csv) {
          *csv << variant_name(variant) << ',' << format_double(eps) << ','
               << format_double(threshold) << ',';
          if (hit != stats.history.end()) {
            *csv << hit->iteration << ',' << format_double(hit->elapsed_seconds + stats.setup_seconds);
          } else {
            *csv << ',';
          }
          *csv << '\n';
        }
        crossings.push_back(crossing);
      }
      row["iterations"] = stats.iterations;
      row["final_marginal_error"] = stats.marginal_error;
    } catch (const Error& e) {
      row["error"] = e.what();
    }
    row["crossings"] = crossings;
    out.push_back(row);
  }
  return out;
}

}  // namespace

Problem make_problem(const ProblemSpec& spec) {
  if (spec.dim != 1 && spec.dim != 2) {
    throw Error(ErrorCode::InvalidArgument, "--dim must be 1 or 2");
  }
  if (spec.nodes == NodeSource::File) {
    if (spec.input.empty()) throw Error(ErrorCode::InvalidArgument, "--nodes file needs --input");
    Problem problem = load_problem(std::filesystem::path(spec.input));
    const int dim = std::holds_alternative<Problem1D>(problem) ? 1 : 2;
    if (dim != spec.dim) {
      throw Error(ErrorCode::DimensionMismatch, spec.input + " holds a " + std::to_string(dim) +
                                                    "D problem, --dim is " +
                                                    std::to_string(spec.dim));
    }
    return problem;
  }
  const std::size_t m = spec.m.value_or(spec.n);
  if (spec.n == 0 || m == 0) throw Error(ErrorCode::InvalidArgument, "--n and --m must be positive");
  if (spec.dim == 1) {
    const NodeKind kind = spec.nodes == NodeSource::Chebyshev ? NodeKind::Chebyshev : NodeKind::Random;
    if (kind == NodeKind::Chebyshev && m != spec.n) {
      throw Error(ErrorCode::InvalidArgument, "chebyshev problems need --m equal to --n");
    }
    return generate_problem_1d(kind, spec.n, m, spec.seed);
  }
  if (spec.nodes == NodeSource::Chebyshev) {
    throw Error(ErrorCode::InvalidArgument, "2D problems use random grids");
  }
  return generate_problem_2d(spec.n, m, spec.seed);
}

ExponentFit fit_exponent(const std::vector<double>& sizes, const std::vector<double>& times) {
  if (sizes.size() != times.size()) {
    throw Error(ErrorCode::DimensionMismatch, "sizes and times differ in length");
  }
  if (sizes.size() < 4) {
    throw Error(ErrorCode::InvalidArgument, "exponent fit needs at least 4 sizes, got " +
                                                std::to_string(sizes.size()));
  }
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    if (!(sizes[i] > 0.0) || !(times[i] > 0.0)) {
      throw Error(ErrorCode::InvalidArgument, "exponent fit needs positive sizes and times");
    }
    lx.push_back(std::log(sizes[i]));
    ly.push_back(std::log(times[i]));
  }
  const double mx = mean(lx), my = mean(ly);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  if (sxx == 0.0) throw Error(ErrorCode::InvalidArgument, "exponent fit needs distinct sizes");
  ExponentFit fit;
  fit.exponent = sxy / sxx;
  fit.intercept = my - fit.exponent * mx;
  double ss = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    const double r = ly[i] - (fit.intercept + fit.exponent * lx[i]);
    ss += r * r;
  }
  fit.residual = std::sqrt(ss / static_cast<double>(lx.size()));
  return fit;
}

json cmd_gen(const RunOptions& options) {
  const Problem problem = make_problem(options.problem);
  if (options.output.empty()) {
    save_problem(std::cout, problem);
  } else {
    save_problem(std::filesystem::path(options.output), problem);
  }
  if (!options.csv.empty()) {
    std::ofstream csv = open_output(options.csv);
    save_problem_csv(csv, problem);
  }
  const auto [n, m] = shape_of(problem);
  json report = report_header("gen", options);
  report["points"] = {{"source", n}, {"target", m}};
  return report;
}

json cmd_solve(const RunOptions& options) {
  if (options.variant == Variant::Both) {
    throw Error(ErrorCode::InvalidArgument, "solve runs one solver; use compare for both");
  }
  const Problem problem = make_problem(options.problem);
  const RunResult run = run_once(problem, options.config, options.variant);
  if (!options.plan_dump.empty()) {
    write_plan_csv(plan_of(run.solution, options.config.plan_cap), options.plan_dump);
  }
  json report = report_header("solve", options);
  report["runs"] = json::array({run_json(run, problem, options.config)});
  json history = json::array();
  for (const MarginalErrorSample& s : stats_of(run.solution).history) {
    history.push_back({s.iteration, s.error, s.elapsed_seconds});
  }
  report["history"] = history;
  return report;
}

json cmd_compare(const RunOptions& options) {
  if (options.trials == 0) throw Error(ErrorCode::InvalidArgument, "--trials must be positive");
  const Problem problem = make_problem(options.problem);
  json runs = json::array();
  std::vector<double> fast_times, dense_times, fast_setup, dense_setup;
  std::optional<RunResult> fast, dense;
  for (std::size_t trial = 0; trial < options.trials; ++trial) {
    fast = run_once(problem, options.config, Variant::Finom);
    dense = run_once(problem, options.config, Variant::Dense);
    runs.push_back(run_json(*fast, problem, options.config));
    runs.push_back(run_json(*dense, problem, options.config));
    fast_times.push_back(stats_of(fast->solution).iterate_seconds);
    dense_times.push_back(stats_of(dense->solution).iterate_seconds);
    fast_setup.push_back(stats_of(fast->solution).setup_seconds);
    dense_setup.push_back(stats_of(dense->solution).setup_seconds);
  }
  if (stats_of(fast->solution).iterations != stats_of(dense->solution).iterations) {
    throw Error(ErrorCode::ValidationError,
                "finom and dense stopped at different iterations; plans are not comparable");
  }
  const double plan_diff = frobenius_diff(plan_of(fast->solution, options.config.plan_cap),
                                          plan_of(dense->solution, options.config.plan_cap));
  json report = report_header("compare", options);
  report["trials"] = options.trials;
  report["runs"] = runs;
  const double mf = mean(fast_times), md = mean(dense_times);
  report["aggregates"] = {
      {"mean_finom_seconds", mf},
      {"mean_dense_seconds", md},
      {"speedup", mf > 0.0 ? md / mf : std::numeric_limits<double>::infinity()},
      {"mean_finom_wall_seconds", mf + mean(fast_setup)},
      {"mean_dense_wall_seconds", md + mean(dense_setup)},
      {"speedup_inclusive", (md + mean(dense_setup)) / (mf + mean(fast_setup))},
      {"plan_frobenius_diff", plan_diff},
      {"max_relative_iterate_divergence", iterate_divergence(fast->solution, dense->solution)},
      {"cost_relative_diff", std::abs(fast->cost - dense->cost) / std::abs(dense->cost)}};
  return report;
}

json cmd_bench(const RunOptions& options) {
  if (options.trials == 0) throw Error(ErrorCode::InvalidArgument, "--trials must be positive");
  std::vector<Variant> variants;
  if (options.variant == Variant::Both) {
    variants = {Variant::Finom, Variant::Dense};
  } else {
    variants = {options.variant};
  }
  std::optional<std::ofstream> csv_file;
  if (!options.csv.empty()) csv_file = open_output(options.csv);
  std::ostream* csv = csv_file ? &*csv_file : nullptr;

  json report = report_header("bench", options);
  report["trials"] = options.trials;
  if (options.time_to_error) {
    if (csv) *csv << "solver,epsilon,threshold,iteration,seconds\n";
    json rows = json::array();
    for (Variant v : variants) {
      for (json& row : time_to_error(options, v, csv)) rows.push_back(std::move(row));
    }
    report["time_to_error"] = rows;
    return report;
  }
  if (csv) *csv << "solver,size,points,mean_iterate_seconds,mean_setup_seconds\n";
  json sweeps = json::array();
  for (Variant v : variants) sweeps.push_back(sweep_variant(options, v, csv));
  report["sweeps"] = sweeps;
  return report;
}

void emit_report(const json& report, const RunOptions& options, std::ostream& out) {
  if (options.output.empty()) {
    out << report.dump(2) << '\n';
    return;
  }
  std::ofstream file = open_output(options.output);
  file << report.dump(2) << '\n';
}

}  // namespace finom::cli
