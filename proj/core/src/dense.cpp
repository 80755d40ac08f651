#include "finom/dense.hpp"

#include <chrono>
#include <cmath>
#include <string>

#include "finom/detail/sinkhorn_driver.hpp"
#include "finom/error.hpp"

namespace finom {

namespace {

void check_cap(std::size_t rows, std::size_t cols, std::size_t cap) {
  if (rows * cols > cap) {
    throw Error(ErrorCode::SizeCapExceeded, "dense matrix would have " +
                                                std::to_string(rows * cols) +
                                                " entries, cap is " + std::to_string(cap));
  }
}

void check_same_shape(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw Error(ErrorCode::DimensionMismatch, "matrix shapes differ");
  }
}

}  // namespace

Matrix cost_matrix(const Mesh1D& x, const Mesh1D& y, std::size_t cap) {
  check_cap(x.size(), y.size(), cap);
  Matrix cost(x.size(), y.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (std::size_t j = 0; j < y.size(); ++j) cost(i, j) = std::abs(x[i] - y[j]);
  }
  return cost;
}

DenseKernel dense_kernel(const Mesh1D& x, const Mesh1D& y, double epsilon, std::size_t cap) {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    throw Error(ErrorCode::InvalidEpsilon, "epsilon must be positive and finite");
  }
  DenseKernel kernel{Matrix(), cost_matrix(x, y, cap), epsilon};
  kernel.entries = Matrix(x.size(), y.size());
  for (std::size_t k = 0; k < kernel.cost.size(); ++k) {
    kernel.entries.data()[k] = std::exp(-kernel.cost.data()[k] / epsilon);
  }
  return kernel;
}

void dense_matvec(const Matrix& a, std::span<const double> in, std::span<double> out) {
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const auto row = a.row(i);
    double sum = 0.0;
    for (std::size_t j = 0; j < row.size(); ++j) sum += row[j] * in[j];
    out[i] = sum;
  }
}

void dense_matvec_transpose(const Matrix& a, std::span<const double> in, std::span<double> out) {
  for (double& v : out) v = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const auto row = a.row(i);
    const double scale = in[i];
    for (std::size_t j = 0; j < row.size(); ++j) out[j] += row[j] * scale;
  }
}

std::vector<double> dense_matvec(const Matrix& a, std::span<const double> in) {
  if (in.size() != a.cols()) throw Error(ErrorCode::DimensionMismatch, "input length mismatch");
  std::vector<double> out(a.rows());
  dense_matvec(a, in, out);
  return out;
}

std::vector<double> dense_matvec_transpose(const Matrix& a, std::span<const double> in) {
  if (in.size() != a.rows()) throw Error(ErrorCode::DimensionMismatch, "input length mismatch");
  std::vector<double> out(a.cols());
  dense_matvec_transpose(a, in, out);
  return out;
}

DenseOperator1D::DenseOperator1D(Mesh1D x, Mesh1D y, double epsilon, std::size_t cap)
    : x_(std::move(x)),
      y_(std::move(y)),
      epsilon_(epsilon),
      a_(x_.size(), 0.0),
      b_(y_.size(), 0.0) {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    throw Error(ErrorCode::InvalidEpsilon, "epsilon must be positive and finite");
  }
  check_cap(x_.size(), y_.size(), cap);
  kernel_ = Matrix(x_.size(), y_.size());
  rebuild();
}

void DenseOperator1D::rebuild() {
  const double inv_eps = 1.0 / epsilon_;
  for (std::size_t i = 0; i < rows(); ++i) {
    for (std::size_t j = 0; j < cols(); ++j) {
      kernel_(i, j) = std::exp((a_[i] + b_[j] - std::abs(x_[i] - y_[j])) * inv_eps);
    }
  }
}

void DenseOperator1D::absorb(std::span<const double> delta_a, std::span<const double> delta_b) {
  if (delta_a.size() != rows() || delta_b.size() != cols()) {
    throw Error(ErrorCode::DimensionMismatch, "absorption length mismatch");
  }
  for (std::size_t i = 0; i < rows(); ++i) a_[i] += delta_a[i];
  for (std::size_t j = 0; j < cols(); ++j) b_[j] += delta_b[j];
  rebuild();
}

Solution1D dense_sinkhorn(const Problem1D& problem, const SolverConfig& config) {
  config.validate();
  check_problem(problem);
  const auto setup_start = std::chrono::steady_clock::now();
  DenseOperator1D op(problem.source, problem.target, config.epsilon);
  const double setup =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - setup_start).count();

  detail::SinkhornState state = detail::initial_state(op.rows(), op.cols());
  SolveStats stats =
      detail::run_sinkhorn(op, problem.u.weights(), problem.v.weights(), config, state);
  stats.setup_seconds = setup;
  return Solution1D{problem.source,       problem.target,       config.epsilon,
                    std::move(state.phi), std::move(state.psi), std::move(state.a),
                    std::move(state.b),   std::move(stats),     nullptr};
}

double frobenius_diff(const Matrix& a, const Matrix& b) {
  check_same_shape(a, b);
  double sum = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double d = a.data()[k] - b.data()[k];
    sum += d * d;
  }
  return std::sqrt(sum);
}

double transport_cost_dense(const Matrix& plan, const Matrix& cost) {
  check_same_shape(plan, cost);
  double total = 0.0;
  for (std::size_t k = 0; k < plan.size(); ++k) total += plan.data()[k] * cost.data()[k];
  return total;
}

}  // namespace finom
