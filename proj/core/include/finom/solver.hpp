#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "finom/kernel1d.hpp"
#include "finom/matrix.hpp"
#include "finom/mesh.hpp"
#include "finom/problem.hpp"

namespace finom {

struct SolverConfig {
  double epsilon = 0.01;
  std::size_t itr_max = 1000;
  /// L1 marginal-error threshold. 0 runs exactly itr_max iterations.
  double tol = 1e-9;
  bool stabilize = true;
  /// Absorb once max(|ln φ|, |ln ψ|) exceeds this many nepers.
  double absorb_threshold = 200.0;
  /// Marginal-error cadence in iterations.
  std::size_t check_every = 1;
  /// Largest N·M for which a dense plan may be materialized.
  std::size_t plan_cap = 100'000'000;

  /// Throws InvalidEpsilon or InvalidArgument.
  void validate() const;
};

struct MarginalErrorSample {
  std::size_t iteration = 0;
  double error = 0.0;
  double elapsed_seconds = 0.0;
};

struct SolveStats {
  std::size_t iterations = 0;
  bool converged = false;
  double marginal_error = 0.0;
  std::vector<MarginalErrorSample> history;
  std::size_t absorptions = 0;
  /// Representation / kernel construction.
  double setup_seconds = 0.0;
  /// Iteration loop only.
  double iterate_seconds = 0.0;
};

/// Scaling vectors of Γ = diag(φ) K' diag(ψ) with K' the kernel after
/// absorbing (a, b); the plan itself is never stored.
struct Solution1D {
  Mesh1D source;
  Mesh1D target;
  double epsilon = 0.0;
  std::vector<double> phi;
  std::vector<double> psi;
  std::vector<double> a;
  std::vector<double> b;
  SolveStats stats;
  /// Final operator of the fast solver (null for the dense solver).
  std::shared_ptr<const KernelOperator1D> kernel;
};

/// Sinkhorn iteration with the O(N) kernel matvec.
/// Throws NonFiniteIterate, ZeroDenominator, DimensionMismatch.
Solution1D sinkhorn_1d(const Mesh1D& x, const Mesh1D& y, const Measure& u, const Measure& v,
                       const SolverConfig& config);
Solution1D sinkhorn_1d(const Problem1D& problem, const SolverConfig& config);

/// ‖diag(ψ) K'^T φ − v‖₁.
double marginal_error(const KernelOperator1D& kernel, std::span<const double> phi,
                      std::span<const double> psi, std::span<const double> v);

/// Γ_ij = φ_i e^{(a_i + b_j − |x_i − y_j|)/ε} ψ_j. Throws SizeCapExceeded
/// when N·M > cap.
Matrix plan_dense(const Solution1D& solution, std::size_t cap = SolverConfig{}.plan_cap);

/// ⟨C, Γ⟩ in O(N + M) through the distance-weighted sweeps.
double transport_cost_fast(const Solution1D& solution);

}  // namespace finom
