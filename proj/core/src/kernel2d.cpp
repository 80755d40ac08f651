#include "finom/kernel2d.hpp"

#include <chrono>
#include <cmath>
#include <string>

#include "finom/detail/sinkhorn_driver.hpp"
#include "finom/error.hpp"

namespace finom {

namespace {

void check_length(std::span<const double> values, std::size_t expected, const char* name) {
  if (values.size() != expected) {
    throw Error(ErrorCode::DimensionMismatch, std::string(name) + " has length " +
                                                  std::to_string(values.size()) + ", expected " +
                                                  std::to_string(expected));
  }
}

void check_finite(std::span<const double> values, const char* name) {
  for (double v : values) {
    if (!std::isfinite(v)) throw Error(ErrorCode::NonFiniteInput, std::string(name) + " is not finite");
  }
}

// Column j of a column-major array with `rows` rows.
std::span<const double> column(std::span<const double> data, std::size_t rows, std::size_t j) {
  return data.subspan(j * rows, rows);
}
std::span<double> column(std::span<double> data, std::size_t rows, std::size_t j) {
  return data.subspan(j * rows, rows);
}

void gather_row(std::span<const double> data, std::size_t rows, std::size_t k,
                std::span<double> row) {
  for (std::size_t j = 0; j < row.size(); ++j) row[j] = data[j * rows + k];
}

void scatter_row(std::span<const double> row, std::size_t rows, std::size_t k,
                 std::span<double> data) {
  for (std::size_t j = 0; j < row.size(); ++j) data[j * rows + k] = row[j];
}

std::vector<double> row_of(std::span<const double> data, std::size_t rows, std::size_t cols,
                           std::size_t k) {
  std::vector<double> out(cols);
  gather_row(data, rows, k, out);
  return out;
}

}  // namespace

KernelOperator2D::KernelOperator2D(Grid2D source, Grid2D target, double epsilon)
    : source_(std::move(source)),
      target_(std::move(target)),
      epsilon_(epsilon),
      kx_(source_.x(), target_.x(), epsilon),
      ky_(source_.y(), target_.y(), epsilon),
      a_(source_.points(), 0.0),
      b_(target_.points(), 0.0) {}

void KernelOperator2D::check_forward(std::span<const double> psi, std::span<double> out) const {
  check_length(psi, cols(), "input");
  check_length(out, rows(), "output");
  check_finite(psi, "input");
}

void KernelOperator2D::check_transpose(std::span<const double> phi, std::span<double> out) const {
  check_length(phi, rows(), "input");
  check_length(out, cols(), "output");
  check_finite(phi, "input");
}

void KernelOperator2D::apply_2d(std::span<const double> psi, std::span<double> out,
                                OpCounter* counter) const {
  check_forward(psi, out);
  const std::size_t n1 = source_.rows(), m1 = source_.cols();
  const std::size_t n2 = target_.rows(), m2 = target_.cols();
  std::vector<double> s(n1 * m2);
  for (std::size_t j = 0; j < m2; ++j) {
    kx_.apply_unchecked(column(psi, n2, j), column(std::span<double>(s), n1, j), counter);
  }
  std::vector<double> row_in(m2), row_out(m1);
  for (std::size_t k = 0; k < n1; ++k) {
    gather_row(s, n1, k, row_in);
    ky_.apply_unchecked(row_in, row_out, counter);
    scatter_row(row_out, n1, k, out);
  }
}

void KernelOperator2D::apply_transpose_2d(std::span<const double> phi, std::span<double> out,
                                          OpCounter* counter) const {
  check_transpose(phi, out);
  const std::size_t n1 = source_.rows(), m1 = source_.cols();
  const std::size_t n2 = target_.rows(), m2 = target_.cols();
  std::vector<double> s(n2 * m1);
  for (std::size_t i = 0; i < m1; ++i) {
    kx_.apply_transpose_unchecked(column(phi, n1, i), column(std::span<double>(s), n2, i),
                                  counter);
  }
  std::vector<double> row_in(m1), row_out(m2);
  for (std::size_t l = 0; l < n2; ++l) {
    gather_row(s, n2, l, row_in);
    ky_.apply_transpose_unchecked(row_in, row_out, counter);
    scatter_row(row_out, n2, l, out);
  }
}

void KernelOperator2D::apply_2d_stabilized(std::span<const double> psi, std::span<double> out,
                                           OpCounter* counter) const {
  if (!sweeps_) {
    apply_2d(psi, out, counter);
    return;
  }
  check_forward(psi, out);
  const std::size_t n1 = source_.rows(), m1 = source_.cols();
  const std::size_t n2 = target_.rows(), m2 = target_.cols();
  std::vector<double> s(n1 * m2);
  for (std::size_t j = 0; j < m2; ++j) {
    sweeps_->columns_forward[j].apply_unchecked(column(psi, n2, j),
                                                column(std::span<double>(s), n1, j), counter);
  }
  std::vector<double> row_in(m2), row_out(m1);
  for (std::size_t k = 0; k < n1; ++k) {
    gather_row(s, n1, k, row_in);
    sweeps_->rows_forward[k].apply_unchecked(row_in, row_out, counter);
    scatter_row(row_out, n1, k, out);
  }
}

void KernelOperator2D::apply_transpose_2d_stabilized(std::span<const double> phi,
                                                     std::span<double> out,
                                                     OpCounter* counter) const {
  if (!sweeps_) {
    apply_transpose_2d(phi, out, counter);
    return;
  }
  check_transpose(phi, out);
  const std::size_t n1 = source_.rows(), m1 = source_.cols();
  const std::size_t n2 = target_.rows(), m2 = target_.cols();
  std::vector<double> s(n2 * m1);
  for (std::size_t i = 0; i < m1; ++i) {
    sweeps_->columns_transpose[i].apply_transpose_unchecked(
        column(phi, n1, i), column(std::span<double>(s), n2, i), counter);
  }
  std::vector<double> row_in(m1), row_out(m2);
  for (std::size_t l = 0; l < n2; ++l) {
    gather_row(s, n2, l, row_in);
    sweeps_->rows_transpose[l].apply_transpose_unchecked(row_in, row_out, counter);
    scatter_row(row_out, n2, l, out);
  }
}

void KernelOperator2D::apply_unchecked(std::span<const double> psi, std::span<double> out,
                                       OpCounter* counter) const {
  apply_2d_stabilized(psi, out, counter);
}

void KernelOperator2D::apply_transpose_unchecked(std::span<const double> phi,
                                                 std::span<double> out,
                                                 OpCounter* counter) const {
  apply_transpose_2d_stabilized(phi, out, counter);
}

void KernelOperator2D::apply_cost_weighted(std::span<const double> psi,
                                           std::span<double> out) const {
  check_forward(psi, out);
  const std::size_t n1 = source_.rows(), m1 = source_.cols();
  const std::size_t n2 = target_.rows(), m2 = target_.cols();
  std::vector<double> plain(n1 * m2), weighted(n1 * m2);
  for (std::size_t j = 0; j < m2; ++j) {
    const KernelOperator1D& op = sweeps_ ? sweeps_->columns_forward[j] : kx_;
    op.apply_unchecked(column(psi, n2, j), column(std::span<double>(plain), n1, j));
    op.apply_cost_weighted(column(psi, n2, j), column(std::span<double>(weighted), n1, j));
  }
  std::vector<double> row_plain(m2), row_weighted(m2), part_x(m1), part_y(m1);
  for (std::size_t k = 0; k < n1; ++k) {
    const KernelOperator1D& op = sweeps_ ? sweeps_->rows_forward[k] : ky_;
    gather_row(plain, n1, k, row_plain);
    gather_row(weighted, n1, k, row_weighted);
    op.apply_unchecked(row_weighted, part_x);
    op.apply_cost_weighted(row_plain, part_y);
    for (std::size_t i = 0; i < m1; ++i) out[i * n1 + k] = part_x[i] + part_y[i];
  }
}

void KernelOperator2D::absorb(std::span<const double> delta_a, std::span<const double> delta_b) {
  check_length(delta_a, rows(), "delta_a");
  check_length(delta_b, cols(), "delta_b");
  check_finite(delta_a, "delta_a");
  check_finite(delta_b, "delta_b");
  for (std::size_t p = 0; p < a_.size(); ++p) a_[p] += delta_a[p];
  for (std::size_t q = 0; q < b_.size(); ++q) b_[q] += delta_b[q];
  absorbed_ = false;
  for (double v : a_) absorbed_ = absorbed_ || v != 0.0;
  for (double v : b_) absorbed_ = absorbed_ || v != 0.0;
  rebuild_sweeps();
}

void KernelOperator2D::rebuild_sweeps() {
  if (!absorbed_) {
    sweeps_.reset();
    return;
  }
  const std::size_t n1 = source_.rows(), m1 = source_.cols();
  const std::size_t n2 = target_.rows(), m2 = target_.cols();
  auto sweeps = std::make_shared<AbsorbedSweeps>();
  sweeps->columns_forward.reserve(m2);
  for (std::size_t j = 0; j < m2; ++j) {
    auto bj = column(std::span<const double>(b_), n2, j);
    sweeps->columns_forward.emplace_back(source_.x(), target_.x(), epsilon_,
                                         std::vector<double>(),
                                         std::vector<double>(bj.begin(), bj.end()));
  }
  sweeps->rows_forward.reserve(n1);
  for (std::size_t k = 0; k < n1; ++k) {
    sweeps->rows_forward.emplace_back(source_.y(), target_.y(), epsilon_,
                                      row_of(a_, n1, m1, k), std::vector<double>());
  }
  sweeps->columns_transpose.reserve(m1);
  for (std::size_t i = 0; i < m1; ++i) {
    auto ai = column(std::span<const double>(a_), n1, i);
    sweeps->columns_transpose.emplace_back(source_.x(), target_.x(), epsilon_,
                                           std::vector<double>(ai.begin(), ai.end()),
                                           std::vector<double>());
  }
  sweeps->rows_transpose.reserve(n2);
  for (std::size_t l = 0; l < n2; ++l) {
    sweeps->rows_transpose.emplace_back(source_.y(), target_.y(), epsilon_,
                                        std::vector<double>(), row_of(b_, n2, m2, l));
  }
  sweeps_ = std::move(sweeps);
}

DenseOperator2D::DenseOperator2D(Grid2D source, Grid2D target, double epsilon, std::size_t cap)
    : source_(std::move(source)),
      target_(std::move(target)),
      epsilon_(epsilon),
      a_(source_.points(), 0.0),
      b_(target_.points(), 0.0) {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    throw Error(ErrorCode::InvalidEpsilon, "epsilon must be positive and finite");
  }
  if (rows() * cols() > cap) {
    throw Error(ErrorCode::SizeCapExceeded, "dense 2D kernel would have " +
                                                std::to_string(rows() * cols()) +
                                                " entries, cap is " + std::to_string(cap));
  }
  kernel_ = Matrix(rows(), cols());
  rebuild();
}

void DenseOperator2D::rebuild() {
  const std::size_t n1 = source_.rows(), m1 = source_.cols();
  const std::size_t n2 = target_.rows(), m2 = target_.cols();
  const double inv_eps = 1.0 / epsilon_;
  for (std::size_t i = 0; i < m1; ++i) {
    for (std::size_t k = 0; k < n1; ++k) {
      const std::size_t p = i * n1 + k;
      for (std::size_t j = 0; j < m2; ++j) {
        const double cy = std::abs(source_.y()[i] - target_.y()[j]);
        for (std::size_t l = 0; l < n2; ++l) {
          const std::size_t q = j * n2 + l;
          const double c = std::abs(source_.x()[k] - target_.x()[l]) + cy;
          kernel_(p, q) = std::exp((a_[p] + b_[q] - c) * inv_eps);
        }
      }
    }
  }
}

void DenseOperator2D::absorb(std::span<const double> delta_a, std::span<const double> delta_b) {
  check_length(delta_a, rows(), "delta_a");
  check_length(delta_b, cols(), "delta_b");
  for (std::size_t p = 0; p < a_.size(); ++p) a_[p] += delta_a[p];
  for (std::size_t q = 0; q < b_.size(); ++q) b_[q] += delta_b[q];
  rebuild();
}

Matrix cost_matrix_2d(const Grid2D& source, const Grid2D& target, std::size_t cap) {
  const std::size_t rows = source.points(), cols = target.points();
  if (rows * cols > cap) {
    throw Error(ErrorCode::SizeCapExceeded, "2D cost matrix would have " +
                                                std::to_string(rows * cols) +
                                                " entries, cap is " + std::to_string(cap));
  }
  Matrix cost(rows, cols);
  for (std::size_t i = 0; i < source.cols(); ++i) {
    for (std::size_t k = 0; k < source.rows(); ++k) {
      for (std::size_t j = 0; j < target.cols(); ++j) {
        for (std::size_t l = 0; l < target.rows(); ++l) {
          cost(source.linear_index(k, i), target.linear_index(l, j)) =
              std::abs(source.x()[k] - target.x()[l]) + std::abs(source.y()[i] - target.y()[j]);
        }
      }
    }
  }
  return cost;
}

namespace {

template <class Op>
Solution2D run_2d(std::shared_ptr<Op> op, const Problem2D& problem, const SolverConfig& config,
                  double setup_seconds) {
  detail::SinkhornState state = detail::initial_state(op->rows(), op->cols());
  SolveStats stats =
      detail::run_sinkhorn(*op, problem.u.weights(), problem.v.weights(), config, state);
  stats.setup_seconds = setup_seconds;
  Solution2D solution{problem.source,       problem.target,     config.epsilon,
                      std::move(state.phi), std::move(state.a), std::move(state.psi),
                      std::move(state.b),   std::move(stats),   nullptr};
  if constexpr (std::is_same_v<Op, KernelOperator2D>) solution.kernel = std::move(op);
  return solution;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

Solution2D sinkhorn_2d(const Problem2D& problem, const SolverConfig& config) {
  config.validate();
  check_problem(problem);
  const auto start = std::chrono::steady_clock::now();
  auto op = std::make_shared<KernelOperator2D>(problem.source, problem.target, config.epsilon);
  return run_2d(std::move(op), problem, config, seconds_since(start));
}

Solution2D dense_sinkhorn_2d(const Problem2D& problem, const SolverConfig& config) {
  config.validate();
  check_problem(problem);
  const auto start = std::chrono::steady_clock::now();
  auto op = std::make_shared<DenseOperator2D>(problem.source, problem.target, config.epsilon);
  return run_2d(std::move(op), problem, config, seconds_since(start));
}

Matrix plan_dense_2d(const Solution2D& solution, std::size_t cap) {
  const Grid2D& source = solution.source;
  const Grid2D& target = solution.target;
  const std::size_t rows = source.points(), cols = target.points();
  if (rows * cols > cap) {
    throw Error(ErrorCode::SizeCapExceeded,
                "plan has " + std::to_string(rows * cols) + " entries, cap is " +
                    std::to_string(cap));
  }
  Matrix plan(rows, cols);
  const double inv_eps = 1.0 / solution.epsilon;
  for (std::size_t i = 0; i < source.cols(); ++i) {
    for (std::size_t k = 0; k < source.rows(); ++k) {
      const std::size_t p = source.linear_index(k, i);
      for (std::size_t j = 0; j < target.cols(); ++j) {
        const double cy = std::abs(source.y()[i] - target.y()[j]);
        for (std::size_t l = 0; l < target.rows(); ++l) {
          const std::size_t q = target.linear_index(l, j);
          const double c = std::abs(source.x()[k] - target.x()[l]) + cy;
          plan(p, q) = solution.phi[p] *
                       std::exp((solution.a[p] + solution.b[q] - c) * inv_eps) *
                       solution.psi[q];
        }
      }
    }
  }
  return plan;
}

double transport_cost_fast_2d(const Solution2D& solution) {
  std::shared_ptr<const KernelOperator2D> kernel = solution.kernel;
  if (!kernel) {
    auto rebuilt =
        std::make_shared<KernelOperator2D>(solution.source, solution.target, solution.epsilon);
    rebuilt->absorb(solution.a, solution.b);
    kernel = std::move(rebuilt);
  }
  std::vector<double> weighted(kernel->rows());
  kernel->apply_cost_weighted(solution.psi, weighted);
  double cost = 0.0;
  for (std::size_t p = 0; p < weighted.size(); ++p) cost += solution.phi[p] * weighted[p];
  return cost;
}

double marginal_error_2d(const KernelOperator2D& kernel, std::span<const double> phi,
                         std::span<const double> psi, std::span<const double> v) {
  check_length(psi, kernel.cols(), "psi");
  check_length(v, kernel.cols(), "v");
  std::vector<double> kt_phi(kernel.cols());
  kernel.apply_transpose_2d_stabilized(phi, kt_phi);
  double error = 0.0;
  for (std::size_t q = 0; q < kt_phi.size(); ++q) error += std::abs(psi[q] * kt_phi[q] - v[q]);
  return error;
}

}  // namespace finom
