#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "finom/matrix.hpp"
#include "finom/mesh.hpp"
#include "finom/problem.hpp"
#include "finom/solver.hpp"

namespace finom {

/// Largest number of entries any dense path will materialize by default.
inline constexpr std::size_t kDenseEntryCap = 100'000'000;

/// Brute-force kernel: cost c_ij = |x_i − y_j| and entries exp(−c_ij/ε).
struct DenseKernel {
  Matrix entries;
  Matrix cost;
  double epsilon = 0.0;
};

/// Throws InvalidEpsilon, SizeCapExceeded.
DenseKernel dense_kernel(const Mesh1D& x, const Mesh1D& y, double epsilon,
                         std::size_t cap = kDenseEntryCap);

Matrix cost_matrix(const Mesh1D& x, const Mesh1D& y, std::size_t cap = kDenseEntryCap);

/// out = A in / out = A^T in with a fixed, row-ordered summation.
void dense_matvec(const Matrix& a, std::span<const double> in, std::span<double> out);
void dense_matvec_transpose(const Matrix& a, std::span<const double> in, std::span<double> out);
std::vector<double> dense_matvec(const Matrix& a, std::span<const double> in);
std::vector<double> dense_matvec_transpose(const Matrix& a, std::span<const double> in);

/// Materialized K' = diag(e^{a/ε}) K diag(e^{b/ε}); each entry is
/// exp((a_i + b_j − |x_i − y_j|)/ε), recomputed from the exponent on absorb.
/// Drop-in replacement for KernelOperator1D inside the Sinkhorn driver.
class DenseOperator1D {
 public:
  DenseOperator1D(Mesh1D x, Mesh1D y, double epsilon, std::size_t cap = kDenseEntryCap);

  std::size_t rows() const noexcept { return x_.size(); }
  std::size_t cols() const noexcept { return y_.size(); }
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

  Mesh1D x_;
  Mesh1D y_;
  double epsilon_;
  std::vector<double> a_;
  std::vector<double> b_;
  Matrix kernel_;
};

/// Textbook O(NM)-per-iteration Sinkhorn, driven by the same loop, stopping
/// rule, initialization and absorption schedule as sinkhorn_1d.
Solution1D dense_sinkhorn(const Problem1D& problem, const SolverConfig& config);

/// ‖A − B‖_F. Throws DimensionMismatch.
double frobenius_diff(const Matrix& a, const Matrix& b);

/// Σ_ij c_ij γ_ij. Throws DimensionMismatch.
double transport_cost_dense(const Matrix& plan, const Matrix& cost);

}  // namespace finom
