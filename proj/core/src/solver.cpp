#include "finom/solver.hpp"

#include <chrono>
#include <cmath>

#include "finom/detail/sinkhorn_driver.hpp"
#include "finom/error.hpp"

namespace finom {

void SolverConfig::validate() const {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    throw Error(ErrorCode::InvalidEpsilon, "epsilon must be positive and finite");
  }
  if (itr_max < 1) throw Error(ErrorCode::InvalidArgument, "itr_max must be at least 1");
  if (!(tol >= 0.0)) throw Error(ErrorCode::InvalidArgument, "tol must be nonnegative");
  if (!(absorb_threshold > 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "absorb_threshold must exceed 1");
  }
  if (check_every < 1) throw Error(ErrorCode::InvalidArgument, "check_every must be at least 1");
  if (plan_cap < 1) throw Error(ErrorCode::InvalidArgument, "plan_cap must be positive");
}

Solution1D sinkhorn_1d(const Mesh1D& x, const Mesh1D& y, const Measure& u, const Measure& v,
                       const SolverConfig& config) {
  config.validate();
  if (u.size() != x.size() || v.size() != y.size()) {
    throw Error(ErrorCode::DimensionMismatch, "measures do not match their meshes");
  }
  const auto setup_start = std::chrono::steady_clock::now();
  auto op = std::make_shared<KernelOperator1D>(x, y, config.epsilon);
  const double setup =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - setup_start).count();

  detail::SinkhornState state = detail::initial_state(x.size(), y.size());
  SolveStats stats = detail::run_sinkhorn(*op, u.weights(), v.weights(), config, state);
  stats.setup_seconds = setup;
  return Solution1D{x,
                    y,
                    config.epsilon,
                    std::move(state.phi),
                    std::move(state.psi),
                    std::move(state.a),
                    std::move(state.b),
                    std::move(stats),
                    std::move(op)};
}

Solution1D sinkhorn_1d(const Problem1D& problem, const SolverConfig& config) {
  return sinkhorn_1d(problem.source, problem.target, problem.u, problem.v, config);
}

double marginal_error(const KernelOperator1D& kernel, std::span<const double> phi,
                      std::span<const double> psi, std::span<const double> v) {
  if (psi.size() != kernel.cols() || v.size() != kernel.cols()) {
    throw Error(ErrorCode::DimensionMismatch, "psi/v do not match the kernel columns");
  }
  const std::vector<double> kt_phi = kernel.apply_transpose(phi);
  double error = 0.0;
  for (std::size_t j = 0; j < kt_phi.size(); ++j) error += std::abs(psi[j] * kt_phi[j] - v[j]);
  return error;
}

Matrix plan_dense(const Solution1D& solution, std::size_t cap) {
  const std::size_t n = solution.source.size();
  const std::size_t m = solution.target.size();
  if (n * m > cap) {
    throw Error(ErrorCode::SizeCapExceeded,
                "plan has " + std::to_string(n * m) + " entries, cap is " + std::to_string(cap));
  }
  Matrix plan(n, m);
  const double inv_eps = 1.0 / solution.epsilon;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      const double exponent =
          (solution.a[i] + solution.b[j] - std::abs(solution.source[i] - solution.target[j])) *
          inv_eps;
      plan(i, j) = solution.phi[i] * std::exp(exponent) * solution.psi[j];
    }
  }
  return plan;
}

double transport_cost_fast(const Solution1D& solution) {
  std::shared_ptr<const KernelOperator1D> kernel = solution.kernel;
  if (!kernel) {
    kernel = std::make_shared<KernelOperator1D>(solution.source, solution.target,
                                                solution.epsilon, solution.a, solution.b);
  }
  std::vector<double> weighted(kernel->rows());
  kernel->apply_cost_weighted(solution.psi, weighted);
  double cost = 0.0;
  for (std::size_t i = 0; i < weighted.size(); ++i) cost += solution.phi[i] * weighted[i];
  return cost;
}

}  // namespace finom
