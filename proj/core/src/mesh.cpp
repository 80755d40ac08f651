#include "finom/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "finom/error.hpp"

namespace finom {

namespace {

void check_nodes(const std::vector<double>& nodes) {
  if (nodes.empty()) throw Error(ErrorCode::EmptyInput, "mesh has no nodes");
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (!std::isfinite(nodes[i])) {
      throw Error(ErrorCode::NonFiniteCoordinate,
                  "node " + std::to_string(i) + " is not finite");
    }
  }
  for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
    if (nodes[i] == nodes[i + 1]) {
      throw Error(ErrorCode::DuplicateNode,
                  "nodes " + std::to_string(i) + " and " + std::to_string(i + 1) +
                      " coincide");
    }
    if (nodes[i] > nodes[i + 1]) {
      throw Error(ErrorCode::UnsortedInput,
                  "node " + std::to_string(i + 1) + " is smaller than its predecessor");
    }
  }
}

void check_weights(std::span<const double> weights) {
  if (weights.empty()) throw Error(ErrorCode::EmptyInput, "measure has no weights");
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (!std::isfinite(weights[i])) {
      throw Error(ErrorCode::NonFiniteInput, "weight " + std::to_string(i) + " is not finite");
    }
    if (weights[i] < 0.0) {
      throw Error(ErrorCode::ValidationError, "weight " + std::to_string(i) + " is negative");
    }
  }
}

double checked_sum(std::span<const double> weights) {
  check_weights(weights);
  double sum = 0.0;
  for (double w : weights) sum += w;
  return sum;
}

std::vector<double> normalize(std::vector<double> raw) {
  const double sum = checked_sum(raw);
  if (sum == 0.0) throw Error(ErrorCode::ZeroMass, "weights sum to zero");
  for (double& w : raw) w /= sum;
  return raw;
}

}  // namespace

Mesh1D::Mesh1D(std::vector<double> nodes) {
  check_nodes(nodes);
  nodes_ = std::make_shared<const std::vector<double>>(std::move(nodes));
}

Measure::Measure(std::vector<double> weights) {
  const double sum = checked_sum(weights);
  if (std::abs(sum - 1.0) > kSumTolerance) {
    throw Error(ErrorCode::ValidationError, "weights sum to " + std::to_string(sum) + ", not 1");
  }
  weights_ = std::move(weights);
}

Measure Measure::normalized(std::vector<double> raw) { return Measure(normalize(std::move(raw))); }

Measure2D::Measure2D(std::size_t rows, std::size_t cols, std::vector<double> column_major)
    : rows_(rows), cols_(cols) {
  if (rows == 0 || cols == 0) throw Error(ErrorCode::EmptyInput, "2D measure has no entries");
  if (column_major.size() != rows * cols) {
    throw Error(ErrorCode::DimensionMismatch,
                "expected " + std::to_string(rows * cols) + " weights, got " +
                    std::to_string(column_major.size()));
  }
  const double sum = checked_sum(column_major);
  if (std::abs(sum - 1.0) > Measure::kSumTolerance) {
    throw Error(ErrorCode::ValidationError, "weights sum to " + std::to_string(sum) + ", not 1");
  }
  weights_ = std::move(column_major);
}

Measure2D Measure2D::normalized(std::size_t rows, std::size_t cols,
                                std::vector<double> column_major) {
  if (column_major.size() != rows * cols) {
    throw Error(ErrorCode::DimensionMismatch,
                "expected " + std::to_string(rows * cols) + " weights, got " +
                    std::to_string(column_major.size()));
  }
  return Measure2D(rows, cols, normalize(std::move(column_major)));
}

Mesh1D validate_mesh(std::vector<double> nodes) { return Mesh1D(std::move(nodes)); }

Mesh1D chebyshev_nodes(std::size_t n) {
  if (n == 0) throw Error(ErrorCode::InvalidArgument, "chebyshev_nodes needs n >= 1");
  std::vector<double> nodes(n);
  const double denom = 2.0 * static_cast<double>(n);
  for (std::size_t k = 1; k <= n; ++k) {
    const double angle = static_cast<double>(2 * k - 1) / denom * std::numbers::pi;
    nodes[k - 1] = 0.5 + 0.5 * std::cos(angle);
  }
  // cos is decreasing on [0, π]
  std::reverse(nodes.begin(), nodes.end());
  return Mesh1D(std::move(nodes));
}

Mesh1D random_sorted_nodes(std::size_t n, std::uint64_t seed) {
  if (n == 0) throw Error(ErrorCode::InvalidArgument, "random_sorted_nodes needs n >= 1");
  UniformSource source(seed);
  std::vector<double> nodes(n);
  for (double& value : nodes) value = source.next();
  std::sort(nodes.begin(), nodes.end());
  for (;;) {
    auto dup = std::adjacent_find(nodes.begin(), nodes.end());
    if (dup == nodes.end()) break;
    *dup = source.next();
    std::sort(nodes.begin(), nodes.end());
  }
  return Mesh1D(std::move(nodes));
}

Measure random_measure(std::size_t n, std::uint64_t seed) {
  if (n == 0) throw Error(ErrorCode::InvalidArgument, "random_measure needs n >= 1");
  UniformSource source(seed);
  std::vector<double> raw(n);
  do {
    for (double& value : raw) value = source.next();
  } while (std::all_of(raw.begin(), raw.end(), [](double w) { return w == 0.0; }));
  return Measure::normalized(std::move(raw));
}

Measure2D random_measure_2d(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  if (rows == 0 || cols == 0) {
    throw Error(ErrorCode::InvalidArgument, "random_measure_2d needs positive dimensions");
  }
  Measure flat = random_measure(rows * cols, seed);
  return Measure2D(rows, cols, {flat.weights().begin(), flat.weights().end()});
}

}  // namespace finom
