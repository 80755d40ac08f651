#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "finom/dense.hpp"
#include "finom/kernel1d.hpp"
#include "finom/matrix.hpp"
#include "finom/mesh.hpp"
#include "finom/problem.hpp"
#include "finom/solver.hpp"

namespace finom {

/// Kernel between two tensor-product grids with separable L1 cost,
/// K = K_y ⊗ K_x under column-major vectorization, where K_x is built from the
/// x nodes of the two grids and K_y from the y nodes.
///
/// Vectors and 2D arrays are column-major: a source-shaped array has
/// source.rows() × source.cols() entries, a target-shaped one
/// target.rows() × target.cols().
///
/// With absorption arrays A (source-shaped) and B (target-shaped) the kernel is
/// K' = diag(e^{vec(A)/ε}) K diag(e^{vec(B)/ε}), which has no Kronecker form;
/// its products are evaluated as a column sweep then a row sweep of 1D
/// absorbed operators, one per column/row.
class KernelOperator2D {
 public:
  KernelOperator2D(Grid2D source, Grid2D target, double epsilon);

  /// Total points on each side (the sizes of the flattened vectors).
  std::size_t rows() const noexcept { return source_.points(); }
  std::size_t cols() const noexcept { return target_.points(); }
  double epsilon() const noexcept { return epsilon_; }
  const Grid2D& source() const noexcept { return source_; }
  const Grid2D& target() const noexcept { return target_; }
  const KernelOperator1D& kx() const noexcept { return kx_; }
  const KernelOperator1D& ky() const noexcept { return ky_; }

  std::span<const double> absorption_left() const noexcept { return a_; }
  std::span<const double> absorption_right() const noexcept { return b_; }
  bool has_absorption() const noexcept { return absorbed_; }

  /// vec((K_x Ψ) K_y^T). Ignores absorption. Throws DimensionMismatch,
  /// NonFiniteInput.
  void apply_2d(std::span<const double> psi, std::span<double> out,
                OpCounter* counter = nullptr) const;
  /// vec((K_x^T Φ) K_y). Ignores absorption.
  void apply_transpose_2d(std::span<const double> phi, std::span<double> out,
                          OpCounter* counter = nullptr) const;

  /// vec(e^{A/ε} ⊙ ((K_x (e^{B/ε} ⊙ Ψ)) K_y^T)) without ever forming e^{A/ε}
  /// or e^{B/ε}: each column of Ψ goes through K_x absorbed with B(:, j), each
  /// row of the result through K_y absorbed with A(k, :).
  void apply_2d_stabilized(std::span<const double> psi, std::span<double> out,
                           OpCounter* counter = nullptr) const;
  void apply_transpose_2d_stabilized(std::span<const double> phi, std::span<double> out,
                                     OpCounter* counter = nullptr) const;

  /// Driver entry points: stabilized sweeps once anything has been absorbed.
  void apply_unchecked(std::span<const double> psi, std::span<double> out,
                       OpCounter* counter = nullptr) const;
  void apply_transpose_unchecked(std::span<const double> phi, std::span<double> out,
                                 OpCounter* counter = nullptr) const;

  /// (K' ⊙ C) ψ with C the separable 2D cost |Δx| + |Δy|.
  void apply_cost_weighted(std::span<const double> psi, std::span<double> out) const;

  /// A += delta_a, B += delta_b (column-major, source/target shaped).
  void absorb(std::span<const double> delta_a, std::span<const double> delta_b);

 private:
  struct AbsorbedSweeps {
    std::vector<KernelOperator1D> columns_forward;    // K_x with b = B(:, j)
    std::vector<KernelOperator1D> rows_forward;       // K_y with a = A(k, :)
    std::vector<KernelOperator1D> columns_transpose;  // K_x with a = A(:, i)
    std::vector<KernelOperator1D> rows_transpose;     // K_y with b = B(l, :)
  };

  void rebuild_sweeps();
  void check_forward(std::span<const double> psi, std::span<double> out) const;
  void check_transpose(std::span<const double> phi, std::span<double> out) const;

  Grid2D source_;
  Grid2D target_;
  double epsilon_;
  KernelOperator1D kx_;
  KernelOperator1D ky_;
  std::vector<double> a_;
  std::vector<double> b_;
  bool absorbed_ = false;
  std::shared_ptr<const AbsorbedSweeps> sweeps_;
};

struct Solution2D {
  Grid2D source;
  Grid2D target;
  double epsilon = 0.0;
  /// Column-major, source-shaped.
  std::vector<double> phi;
  std::vector<double> a;
  /// Column-major, target-shaped.
  std::vector<double> psi;
  std::vector<double> b;
  SolveStats stats;
  std::shared_ptr<const KernelOperator2D> kernel;
};

/// 2D Sinkhorn with O(NM) sweeps; initialization φ = 1/(NM), ψ = 1/(NM).
Solution2D sinkhorn_2d(const Problem2D& problem, const SolverConfig& config);

/// Same loop on the materialized (NM) × (NM) kernel.
Solution2D dense_sinkhorn_2d(const Problem2D& problem, const SolverConfig& config);

/// Materialized K' for a pair of grids, rows and columns in column-major point
/// order. Throws SizeCapExceeded.
class DenseOperator2D {
 public:
  DenseOperator2D(Grid2D source, Grid2D target, double epsilon,
                  std::size_t cap = kDenseEntryCap);

  std::size_t rows() const noexcept { return source_.points(); }
  std::size_t cols() const noexcept { return target_.points(); }
  const Matrix& matrix() const noexcept { return kernel_; }

  void apply_unchecked(std::span<const double> psi, std::span<double> out) const {
    dense_matvec(kernel_, psi, out);
  }
  void apply_transpose_unchecked(std::span<const double> phi, std::span<double> out) const {
    dense_matvec_transpose(kernel_, phi, out);
  }
  void absorb(std::span<const double> delta_a, std::span<const double> delta_b);

 private:
  void rebuild();

  Grid2D source_;
  Grid2D target_;
  double epsilon_;
  std::vector<double> a_;
  std::vector<double> b_;
  Matrix kernel_;
};

/// Separable ground cost between every pair of grid points.
Matrix cost_matrix_2d(const Grid2D& source, const Grid2D& target,
                      std::size_t cap = kDenseEntryCap);

/// (NM) × (NM) plan diag(φ) K' diag(ψ). Throws SizeCapExceeded.
Matrix plan_dense_2d(const Solution2D& solution, std::size_t cap = SolverConfig{}.plan_cap);

/// ⟨C, Γ⟩ in O(NM).
double transport_cost_fast_2d(const Solution2D& solution);

/// ‖diag(ψ) K'^T φ − vec(v)‖₁.
double marginal_error_2d(const KernelOperator2D& kernel, std::span<const double> phi,
                         std::span<const double> psi, std::span<const double> v);

}  // namespace finom
