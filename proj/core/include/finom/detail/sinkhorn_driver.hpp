#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <concepts>
#include <span>
#include <string>
#include <vector>

#include "finom/error.hpp"
#include "finom/solver.hpp"

namespace finom::detail {

template <class Op>
concept SinkhornKernel = requires(Op& op, const Op& cop, std::span<const double> in,
                                  std::span<double> out) {
  { cop.rows() } -> std::convertible_to<std::size_t>;
  { cop.cols() } -> std::convertible_to<std::size_t>;
  cop.apply_unchecked(in, out);
  cop.apply_transpose_unchecked(in, out);
  op.absorb(in, in);
};

/// Scaling vectors and accumulated absorption carried across iterations.
struct SinkhornState {
  std::vector<double> phi;
  std::vector<double> psi;
  std::vector<double> a;
  std::vector<double> b;
};

// target ⊘ product, with 0/0 = 0 for atoms that carry no mass.
inline void divide_into(std::span<const double> target, std::span<const double> product,
                        std::span<double> out, const char* which) {
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double d = product[i];
    if (!std::isfinite(d)) {
      throw Error(ErrorCode::NonFiniteIterate,
                  std::string(which) + ": kernel product is not finite at entry " +
                      std::to_string(i) + "; enable stabilization or increase epsilon");
    }
    if (d == 0.0) {
      if (target[i] > 0.0) {
        throw Error(ErrorCode::ZeroDenominator,
                    std::string(which) + ": kernel product vanished at entry " +
                        std::to_string(i) + "; enable stabilization or increase epsilon");
      }
      out[i] = 0.0;
      continue;
    }
    const double value = target[i] / d;
    if (!std::isfinite(value)) {
      throw Error(ErrorCode::NonFiniteIterate,
                  std::string(which) + " overflowed at entry " + std::to_string(i) +
                      "; enable stabilization or increase epsilon");
    }
    out[i] = value;
  }
}

// True when some positive entry lies outside [e^-threshold, e^threshold].
inline bool exceeds_log_bound(std::span<const double> values, double threshold) {
  const double upper = std::exp(threshold);
  const double lower = std::exp(-threshold);
  bool out = false;
  for (double v : values) out |= v > upper || (v > 0.0 && v < lower);
  return out;
}

/// Moves ε ln(scaling) into the absorption vector and resets the scaling to 1.
/// Zero entries (massless atoms) stay zero and absorb nothing.
inline std::vector<double> take_log_part(std::span<double> scaling, double epsilon) {
  std::vector<double> delta(scaling.size(), 0.0);
  for (std::size_t i = 0; i < scaling.size(); ++i) {
    if (scaling[i] > 0.0) {
      delta[i] = epsilon * std::log(scaling[i]);
      scaling[i] = 1.0;
    }
  }
  return delta;
}

/// The Sinkhorn loop shared by every kernel implementation, so fast and dense
/// solvers differ only in the matvec:
///
///   while iteration < itr_max and ‖ψ ⊙ K'^T φ − v‖₁ > tol:
///     ψ ← v ⊘ K'^T φ;  φ ← u ⊘ K' ψ;  maybe absorb.
///
/// The K'^T φ product feeding the stopping test is the one the ψ update uses.
template <SinkhornKernel Op>
SolveStats run_sinkhorn(Op& op, std::span<const double> u, std::span<const double> v,
                        const SolverConfig& config, SinkhornState& state) {
  using Clock = std::chrono::steady_clock;
  const std::size_t n = op.rows();
  const std::size_t m = op.cols();
  if (u.size() != n || v.size() != m) {
    throw Error(ErrorCode::DimensionMismatch, "measures do not match the kernel dimensions");
  }

  SolveStats stats;
  std::vector<double> kt_phi(m);
  std::vector<double> k_psi(n);
  const auto start = Clock::now();
  auto elapsed = [&] { return std::chrono::duration<double>(Clock::now() - start).count(); };

  std::size_t iteration = 0;
  for (;;) {
    op.apply_transpose_unchecked(state.phi, kt_phi);
    const bool last = iteration >= config.itr_max;
    if (last || iteration % config.check_every == 0) {
      double error = 0.0;
      for (std::size_t j = 0; j < m; ++j) error += std::abs(state.psi[j] * kt_phi[j] - v[j]);
      stats.marginal_error = error;
      stats.history.push_back({iteration, error, elapsed()});
      if (error <= config.tol) {
        stats.converged = true;
        break;
      }
    }
    if (last) break;

    divide_into(v, kt_phi, state.psi, "psi update");
    op.apply_unchecked(state.psi, k_psi);
    divide_into(u, k_psi, state.phi, "phi update");
    ++iteration;

    if (config.stabilize && (exceeds_log_bound(state.phi, config.absorb_threshold) ||
                             exceeds_log_bound(state.psi, config.absorb_threshold))) {
      std::vector<double> delta_a = take_log_part(state.phi, config.epsilon);
      std::vector<double> delta_b = take_log_part(state.psi, config.epsilon);
      op.absorb(delta_a, delta_b);
      for (std::size_t i = 0; i < n; ++i) state.a[i] += delta_a[i];
      for (std::size_t j = 0; j < m; ++j) state.b[j] += delta_b[j];
      ++stats.absorptions;
    }
  }
  stats.iterations = iteration;
  stats.iterate_seconds = elapsed();
  return stats;
}

/// φ = 1/N, ψ = 1/M, zero absorption.
inline SinkhornState initial_state(std::size_t n, std::size_t m) {
  return {std::vector<double>(n, 1.0 / static_cast<double>(n)),
          std::vector<double>(m, 1.0 / static_cast<double>(m)), std::vector<double>(n, 0.0),
          std::vector<double>(m, 0.0)};
}

}  // namespace finom::detail
