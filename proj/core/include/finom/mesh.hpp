#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <random>
#include <span>
#include <vector>

namespace finom {

/// Strictly ascending, finite 1D support points.
///
/// Immutable after construction. Copies share the underlying storage, so a
/// mesh can be handed to many kernel operators without duplicating nodes.
class Mesh1D {
 public:
  /// Validates `nodes`; throws EmptyInput, DuplicateNode, UnsortedInput or
  /// NonFiniteCoordinate.
  explicit Mesh1D(std::vector<double> nodes);

  std::size_t size() const noexcept { return nodes_->size(); }
  double operator[](std::size_t i) const noexcept { return (*nodes_)[i]; }
  std::span<const double> nodes() const noexcept { return *nodes_; }
  double front() const noexcept { return nodes_->front(); }
  double back() const noexcept { return nodes_->back(); }

  friend bool operator==(const Mesh1D& lhs, const Mesh1D& rhs) {
    return lhs.nodes_ == rhs.nodes_ || *lhs.nodes_ == *rhs.nodes_;
  }

 private:
  std::shared_ptr<const std::vector<double>> nodes_;
};

/// Nonnegative weights summing to one (within 1e-12).
class Measure {
 public:
  static constexpr double kSumTolerance = 1e-12;

  /// Takes weights that are already normalized. Throws EmptyInput,
  /// NonFiniteInput, ValidationError (negative entry or sum off by more than
  /// kSumTolerance).
  explicit Measure(std::vector<double> weights);

  /// Divides by the exact sum. Throws ZeroMass for an all-zero list.
  static Measure normalized(std::vector<double> raw);

  std::size_t size() const noexcept { return weights_.size(); }
  double operator[](std::size_t i) const noexcept { return weights_[i]; }
  std::span<const double> weights() const noexcept { return weights_; }

  friend bool operator==(const Measure&, const Measure&) = default;

 private:
  std::vector<double> weights_;
};

/// Tensor-product grid x_nodes × y_nodes. Points are ordered column-major:
/// the point (k, i) with k indexing x and i indexing y has linear index
/// i * N + k.
class Grid2D {
 public:
  Grid2D(Mesh1D x_nodes, Mesh1D y_nodes)
      : x_(std::move(x_nodes)), y_(std::move(y_nodes)) {}

  const Mesh1D& x() const noexcept { return x_; }
  const Mesh1D& y() const noexcept { return y_; }
  std::size_t rows() const noexcept { return x_.size(); }
  std::size_t cols() const noexcept { return y_.size(); }
  std::size_t points() const noexcept { return rows() * cols(); }
  std::size_t linear_index(std::size_t k, std::size_t i) const noexcept {
    return i * rows() + k;
  }

  friend bool operator==(const Grid2D&, const Grid2D&) = default;

 private:
  Mesh1D x_;
  Mesh1D y_;
};

/// N × M array of masses stored column-major (entry (k, i) at i * N + k).
class Measure2D {
 public:
  /// `column_major` must hold rows * cols normalized, nonnegative values.
  Measure2D(std::size_t rows, std::size_t cols, std::vector<double> column_major);
  static Measure2D normalized(std::size_t rows, std::size_t cols,
                              std::vector<double> column_major);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  double operator()(std::size_t k, std::size_t i) const noexcept {
    return weights_[i * rows_ + k];
  }
  std::span<const double> weights() const noexcept { return weights_; }

  friend bool operator==(const Measure2D&, const Measure2D&) = default;

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<double> weights_;
};

Mesh1D validate_mesh(std::vector<double> nodes);

/// Chebyshev nodes 1/2 + 1/2 cos((2k-1)π/(2n)), k = 1..n, sorted ascending.
Mesh1D chebyshev_nodes(std::size_t n);

/// n uniform draws on [0, 1), sorted. Exact duplicates are redrawn.
Mesh1D random_sorted_nodes(std::size_t n, std::uint64_t seed);

/// n uniform draws on [0, 1) divided by their sum.
Measure random_measure(std::size_t n, std::uint64_t seed);

Measure2D random_measure_2d(std::size_t rows, std::size_t cols, std::uint64_t seed);

/// Seeded source behind every generator: std::mt19937_64 (a fully specified
/// engine, identical output on every conforming implementation) with the top
/// 53 bits mapped to [0, 1). std::uniform_real_distribution is avoided
/// because its output is implementation-defined.
class UniformSource {
 public:
  explicit UniformSource(std::uint64_t seed) : engine_(seed) {}
  double next() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace finom
