#include <iostream>
#include <map>

#include <CLI11.hpp>

#include "finom_cli/commands.hpp"

namespace finom::cli {

namespace {

void add_problem_options(CLI::App& app, RunOptions& o) {
  app.add_option("--dim", o.problem.dim, "Problem dimension")->check(CLI::IsMember({1, 2}));
  app.add_option("--n", o.problem.n, "Source node count (grid rows in 2D)")
      ->check(CLI::PositiveNumber);
  app.add_option("--m", o.problem.m, "Target node count (grid columns in 2D); defaults to --n")
      ->check(CLI::PositiveNumber);
  app.add_option("--nodes,--gen", o.problem.nodes, "Node generator")
      ->transform(CLI::CheckedTransformer(
          std::map<std::string, NodeSource>{{"chebyshev", NodeSource::Chebyshev},
                                            {"random", NodeSource::Random},
                                            {"file", NodeSource::File}},
          CLI::ignore_case));
  app.add_option("--input,-i", o.problem.input, "Problem file (implies --nodes file)");
  app.add_option("--seed", o.problem.seed, "Generator seed");
  app.add_option("--output,-o", o.output, "Output path (stdout when omitted)");
  app.add_option("--csv", o.csv, "CSV side output");
}

void add_solver_options(CLI::App& app, RunOptions& o, std::string& stabilize) {
  app.add_option("--eps", o.config.epsilon, "Regularization epsilon");
  app.add_option("--iters", o.config.itr_max, "Maximum iterations");
  app.add_option("--tol", o.config.tol, "L1 marginal-error tolerance (0: run all iterations)");
  app.add_option("--stabilize", stabilize, "Log-domain absorption")
      ->check(CLI::IsMember({"on", "off"}));
  app.add_option("--check-every", o.config.check_every, "Marginal-error cadence");
  app.add_option("--absorb-threshold", o.config.absorb_threshold,
                 "Absorb once |ln phi| or |ln psi| exceeds this");
  app.add_option("--plan-cap", o.config.plan_cap, "Largest dense plan (entries)");
}

void add_variant_option(CLI::App& app, RunOptions& o, bool allow_both) {
  std::map<std::string, Variant> names{{"finom", Variant::Finom}, {"dense", Variant::Dense}};
  if (allow_both) names.emplace("both", Variant::Both);
  app.add_option("--solver", o.variant, "Solver variant")
      ->transform(CLI::CheckedTransformer(names, CLI::ignore_case));
}

}  // namespace

int run(int argc, char** argv) {
  CLI::App app{"Sinkhorn solver on non-uniform meshes with linear-time kernel products"};
  app.require_subcommand(1);

  RunOptions o;
  std::string stabilize = "on";
  bool tol_given = false;

  CLI::App* gen = app.add_subcommand("gen", "Write a generated problem file");
  add_problem_options(*gen, o);

  CLI::App* solve = app.add_subcommand("solve", "Solve one problem and report");
  add_problem_options(*solve, o);
  add_solver_options(*solve, o, stabilize);
  add_variant_option(*solve, o, false);
  solve->add_option("--plan-dump", o.plan_dump, "Write the dense plan as CSV");

  CLI::App* compare = app.add_subcommand("compare", "Run fast and dense solvers side by side");
  add_problem_options(*compare, o);
  add_solver_options(*compare, o, stabilize);
  compare->add_option("--trials", o.trials, "Repeat trials for timing");

  CLI::App* bench = app.add_subcommand("bench", "Timing sweeps and exponent fits");
  add_problem_options(*bench, o);
  add_solver_options(*bench, o, stabilize);
  add_variant_option(*bench, o, true);
  bench->add_option("--trials", o.trials, "Repeat trials per size");
  bench->add_option("--sizes", o.sizes, "Problem sizes (N in 1D, grid side in 2D)")
      ->delimiter(',');
  bench->add_flag("--time-to-error", o.time_to_error,
                  "Record when the marginal error first crosses each threshold");
  bench->add_option("--thresholds", o.thresholds, "Marginal-error thresholds")->delimiter(',');
  bench->add_option("--eps-list", o.eps_list, "Epsilons for time-to-error mode")
      ->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  for (CLI::App* sub : {solve, compare, bench}) {
    if (sub->parsed() && sub->count("--tol") > 0) tol_given = true;
  }
  o.config.stabilize = stabilize == "on";
  if (!o.problem.input.empty()) o.problem.nodes = NodeSource::File;
  // Benchmarks time a fixed iteration count unless a tolerance is asked for.
  if (bench->parsed() && !tol_given && !o.time_to_error) o.config.tol = 0.0;

  try {
    if (gen->parsed()) {
      cmd_gen(o);
      return 0;
    }
    nlohmann::json report;
    if (solve->parsed()) report = cmd_solve(o);
    if (compare->parsed()) report = cmd_compare(o);
    if (bench->parsed()) report = cmd_bench(o);
    emit_report(report, o, std::cout);
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace finom::cli
