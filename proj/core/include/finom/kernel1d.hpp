#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <span>
#include <vector>

#include "finom/matrix.hpp"
#include "finom/mesh.hpp"

namespace finom {

/// zeta[i] is the number of target nodes y_j with y_j <= x_i, so row i of the
/// kernel splits into columns [0, zeta[i]) (y_j <= x_i, the lower block) and
/// [zeta[i], cols) (y_j > x_i, the upper block). Non-decreasing in i.
struct DividingIndex {
  std::vector<std::size_t> zeta;
  std::size_t cols = 0;

  std::size_t rows() const noexcept { return zeta.size(); }
  std::size_t operator[](std::size_t i) const noexcept { return zeta[i]; }

  friend bool operator==(const DividingIndex&, const DividingIndex&) = default;
};

/// Single merge pass over the two sorted meshes. Ties x_i == y_j land in the
/// lower block.
DividingIndex dividing_index(const Mesh1D& x, const Mesh1D& y);

enum class BlockOrientation { Lower, Upper };

/// Ratio vector plus block-edge segments encoding one staircase block of the
/// (possibly absorbed) kernel in O(rows + cols) storage.
///
/// Lower block: row i+1 restricted to columns [0, zeta[i]) equals ratios[i]
/// times row i; segment i holds the new entries in columns [zeta[i-1], zeta[i])
/// (zeta[-1] = 0).
///
/// Upper block: row i restricted to columns [zeta[i+1], cols) equals
/// ratios[i] times row i+1; segment i holds columns [zeta[i], zeta[i+1])
/// (zeta[rows] = cols).
struct QuasiCollinearRep {
  BlockOrientation orientation = BlockOrientation::Lower;
  std::vector<double> ratios;
  /// All segments back to back. Because segments tile a contiguous column
  /// range, edges[e] sits in column first_column + e.
  std::vector<double> edges;
  /// Segment i is edges[offsets[i], offsets[i + 1]).
  std::vector<std::size_t> offsets;
  std::size_t first_column = 0;
  DividingIndex boundaries;
  double epsilon = 0.0;

  std::size_t rows() const noexcept { return boundaries.rows(); }
  std::size_t cols() const noexcept { return boundaries.cols; }
  std::span<const double> segment(std::size_t i) const noexcept {
    return std::span<const double>(edges).subspan(offsets[i], offsets[i + 1] - offsets[i]);
  }
  std::size_t segment_column(std::size_t i) const noexcept { return first_column + offsets[i]; }

  /// Expands the representation back into a dense rows × cols matrix with
  /// zeros outside the block.
  Matrix dense() const;
};

/// Builds the representation of one block of
/// diag(e^{a/ε}) · exp(-|x_i - y_j| / ε) · diag(e^{b/ε}).
/// Empty `a`/`b` mean zero absorption. Ratios come straight from the node
/// gaps (and absorption differences), never from quotients of entries; a ratio
/// that would scale an empty row segment is stored as 1.
/// Throws InvalidEpsilon, DimensionMismatch.
QuasiCollinearRep build_rep(const Mesh1D& x, const Mesh1D& y, double epsilon,
                            BlockOrientation orientation, std::span<const double> a = {},
                            std::span<const double> b = {});

/// Same as above with a precomputed dividing index.
QuasiCollinearRep build_rep(const Mesh1D& x, const Mesh1D& y, const DividingIndex& zeta,
                            double epsilon, BlockOrientation orientation,
                            std::span<const double> a = {}, std::span<const double> b = {});

/// Multiplication/addition tallies of the dynamic-programming sweeps.
struct OpCounter {
  std::uint64_t multiplications = 0;
  std::uint64_t additions = 0;

  void reset() noexcept { *this = {}; }
};

/// Writes ζ, ratios and edge segments of a representation as text.
void dump_rep(std::ostream& out, const QuasiCollinearRep& rep);

/// The kernel K' = diag(e^{a/ε}) K diag(e^{b/ε}), K_ij = exp(-|x_i - y_j|/ε),
/// held as four quasi-collinear blocks (K'_L, K'_U and the blocks of K'^T,
/// which is the kernel generated with the mesh roles swapped).
///
/// apply/apply_transpose cost O(N + M). The operator is a value: absorb()
/// rebuilds the blocks from coordinates plus the accumulated absorption.
class KernelOperator1D {
 public:
  /// Zero absorption. Throws InvalidEpsilon.
  KernelOperator1D(Mesh1D x, Mesh1D y, double epsilon);
  /// Starts from the given absorption vectors (length N and M).
  KernelOperator1D(Mesh1D x, Mesh1D y, double epsilon, std::vector<double> absorption_left,
                   std::vector<double> absorption_right);

  std::size_t rows() const noexcept { return x_.size(); }
  std::size_t cols() const noexcept { return y_.size(); }
  double epsilon() const noexcept { return epsilon_; }
  const Mesh1D& x() const noexcept { return x_; }
  const Mesh1D& y() const noexcept { return y_; }

  const DividingIndex& dividing() const noexcept { return lower_.boundaries; }
  const QuasiCollinearRep& lower() const noexcept { return lower_; }
  const QuasiCollinearRep& upper() const noexcept { return upper_; }
  const QuasiCollinearRep& t_lower() const noexcept { return t_lower_; }
  const QuasiCollinearRep& t_upper() const noexcept { return t_upper_; }

  std::span<const double> absorption_left() const noexcept { return a_; }
  std::span<const double> absorption_right() const noexcept { return b_; }
  bool has_absorption() const noexcept { return absorbed_; }

  /// out = K' psi. Throws DimensionMismatch, NonFiniteInput.
  void apply(std::span<const double> psi, std::span<double> out,
             OpCounter* counter = nullptr) const;
  std::vector<double> apply(std::span<const double> psi) const;

  /// out = K'^T phi.
  void apply_transpose(std::span<const double> phi, std::span<double> out,
                       OpCounter* counter = nullptr) const;
  std::vector<double> apply_transpose(std::span<const double> phi) const;

  /// Hot-loop variants: dimensions are the caller's responsibility and inputs
  /// are not scanned for NaN/inf.
  void apply_unchecked(std::span<const double> psi, std::span<double> out,
                       OpCounter* counter = nullptr) const;
  void apply_transpose_unchecked(std::span<const double> phi, std::span<double> out,
                                 OpCounter* counter = nullptr) const;

  /// Separate block products: p = K'_L psi, q = K'_U psi.
  void apply_split(std::span<const double> psi, std::span<double> p, std::span<double> q) const;

  /// out = (K' ⊙ C) psi with C_ij = |x_i - y_j|, evaluated by the same sweeps
  /// carrying a second, distance-weighted accumulator. Every term is
  /// nonnegative for nonnegative psi, so no cancellation occurs.
  void apply_cost_weighted(std::span<const double> psi, std::span<double> out) const;
  /// out = (K' ⊙ C)^T phi.
  void apply_transpose_cost_weighted(std::span<const double> phi, std::span<double> out) const;

  /// a += delta_a, b += delta_b; rebuilds all four blocks. Throws
  /// DimensionMismatch, NonFiniteInput.
  void absorb(std::span<const double> delta_a, std::span<const double> delta_b);
  KernelOperator1D absorbed(std::span<const double> delta_a,
                            std::span<const double> delta_b) const;

  /// Dense K' reconstructed from the block representations.
  Matrix dense() const;

 private:
  void rebuild();

  Mesh1D x_;
  Mesh1D y_;
  double epsilon_;
  std::vector<double> a_;
  std::vector<double> b_;
  bool absorbed_ = false;
  QuasiCollinearRep lower_;
  QuasiCollinearRep upper_;
  QuasiCollinearRep t_lower_;
  QuasiCollinearRep t_upper_;
};

KernelOperator1D build_operator(const Mesh1D& x, const Mesh1D& y, double epsilon);

/// out = lower·in + upper·in via the forward and backward recursions.
void sweep_apply(const QuasiCollinearRep& lower, const QuasiCollinearRep& upper,
                 std::span<const double> in, std::span<double> out, OpCounter* counter);

}  // namespace finom
