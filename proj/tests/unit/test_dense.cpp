#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "finom/dense.hpp"
#include "finom/error.hpp"
#include "oracle.hpp"

namespace finom {
namespace {

TEST(DenseKernel, WorkedExample) {
  const Mesh1D x = validate_mesh({1, 3, 7, 9, 12});
  const Mesh1D y = validate_mesh({2, 5, 6, 9, 10});
  const int powers[5][5] = {{1, 4, 5, 8, 9},
                            {1, 2, 3, 6, 7},
                            {5, 2, 1, 2, 3},
                            {7, 4, 3, 0, 1},
                            {10, 7, 6, 3, 2}};
  const DenseKernel k = dense_kernel(x, y, 1.0);
  for (int i = 0; i < 5; ++i) {
    for (int j = 0; j < 5; ++j) {
      EXPECT_DOUBLE_EQ(k.entries(i, j), std::exp(-static_cast<double>(powers[i][j])));
      EXPECT_EQ(k.cost(i, j), powers[i][j]);
    }
  }
}

TEST(DenseKernel, IdenticalMeshesHaveUnitDiagonal) {
  const Mesh1D x = chebyshev_nodes(30);
  const DenseKernel k = dense_kernel(x, x, 0.01);
  for (std::size_t i = 0; i < 30; ++i) EXPECT_EQ(k.entries(i, i), 1.0);
}

TEST(DenseKernel, EntriesRecomputeIndependently) {
  std::mt19937_64 rng(1);
  const Mesh1D x = validate_mesh(oracle::sorted_uniform(64, rng));
  const Mesh1D y = validate_mesh(oracle::sorted_uniform(64, rng));
  const DenseKernel k = dense_kernel(x, y, 0.03);
  const auto want = oracle::kernel(x.nodes(), y.nodes(), 0.03);
  for (std::size_t i = 0; i < 64; ++i) {
    for (std::size_t j = 0; j < 64; ++j) {
      // exp amplifies the argument's rounding by |c/eps|.
      EXPECT_NEAR(k.entries(i, j), static_cast<double>(want[i][j]), 1e-14 * static_cast<double>(want[i][j]));
      EXPECT_GT(k.entries(i, j), 0.0);
      EXPECT_LE(k.entries(i, j), 1.0);
    }
  }
}

TEST(DenseKernel, Errors) {
  const Mesh1D x = validate_mesh({0, 1, 2});
  EXPECT_THROW(dense_kernel(x, x, 0.0), Error);
  try {
    dense_kernel(x, x, 1.0, 8);
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::SizeCapExceeded);
  }
}

TEST(DenseMatvec, MatchesOracle) {
  std::mt19937_64 rng(2);
  const Mesh1D x = validate_mesh(oracle::sorted_uniform(40, rng));
  const Mesh1D y = validate_mesh(oracle::sorted_uniform(30, rng));
  const DenseKernel k = dense_kernel(x, y, 0.1);
  const auto want = oracle::kernel(x.nodes(), y.nodes(), 0.1);
  const auto psi = oracle::uniform(30, rng), phi = oracle::uniform(40, rng);
  EXPECT_LE(oracle::rel_inf(dense_matvec(k.entries, psi), oracle::matvec(want, psi)), 1e-14);
  EXPECT_LE(oracle::rel_inf(dense_matvec_transpose(k.entries, phi), oracle::matvec_t(want, phi)),
            1e-14);
}

TEST(FrobeniusDiff, Examples) {
  Matrix a(2, 3), b(2, 3);
  EXPECT_EQ(frobenius_diff(a, a), 0.0);
  b(1, 2) = 3.0;
  EXPECT_EQ(frobenius_diff(a, b), 3.0);
  std::mt19937_64 rng(3);
  Matrix c(4, 5), d(4, 5);
  long double ss = 0.0L;
  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t j = 0; j < 5; ++j) {
      c(i, j) = oracle::uniform(1, rng)[0];
      d(i, j) = oracle::uniform(1, rng)[0];
      ss += (static_cast<long double>(c(i, j)) - d(i, j)) * (c(i, j) - d(i, j));
    }
  }
  EXPECT_NEAR(frobenius_diff(c, d), static_cast<double>(std::sqrt(ss)), 1e-15);
  EXPECT_THROW(frobenius_diff(a, Matrix(3, 2)), Error);
}

TEST(TransportCostDense, Examples) {
  const Mesh1D x = validate_mesh({0.0, 0.5, 1.0});
  const Matrix cost = cost_matrix(x, x);
  EXPECT_EQ(transport_cost_dense(Matrix(3, 3), cost), 0.0);
  Matrix diag(3, 3);
  for (std::size_t i = 0; i < 3; ++i) diag(i, i) = 1.0 / 3.0;
  EXPECT_EQ(transport_cost_dense(diag, cost), 0.0);
  Matrix plan(3, 3);
  plan(0, 2) = 0.25;
  plan(1, 0) = 0.5;
  EXPECT_DOUBLE_EQ(transport_cost_dense(plan, cost), 0.25 * 1.0 + 0.5 * 0.5);
  EXPECT_THROW(transport_cost_dense(plan, Matrix(2, 2)), Error);
}

TEST(DenseOperator, AbsorbMatchesOracle) {
  std::mt19937_64 rng(4);
  const Mesh1D x = validate_mesh(oracle::sorted_uniform(12, rng));
  const Mesh1D y = validate_mesh(oracle::sorted_uniform(9, rng));
  DenseOperator1D op(x, y, 0.02);
  const auto a = oracle::uniform(12, rng, -0.5, 0.5), b = oracle::uniform(9, rng, -0.5, 0.5);
  op.absorb(a, b);
  const auto want = oracle::kernel(x.nodes(), y.nodes(), 0.02, a, b);
  for (std::size_t i = 0; i < 12; ++i) {
    for (std::size_t j = 0; j < 9; ++j) {
      EXPECT_NEAR(op.matrix()(i, j), static_cast<double>(want[i][j]), 1e-14 * static_cast<double>(want[i][j]));
    }
  }
}

void expect_marginals(const Matrix& plan, const Measure& u, const Measure& v, double tol) {
  double row_err = 0.0, col_err = 0.0;
  for (std::size_t i = 0; i < plan.rows(); ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < plan.cols(); ++j) {
      EXPECT_GE(plan(i, j), 0.0);
      s += plan(i, j);
    }
    row_err += std::abs(s - u[i]);
  }
  for (std::size_t j = 0; j < plan.cols(); ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < plan.rows(); ++i) s += plan(i, j);
    col_err += std::abs(s - v[j]);
  }
  EXPECT_LE(col_err, tol);
  EXPECT_LE(row_err, 2 * tol);
}

TEST(DenseSinkhorn, SelfTransportIsFeasible) {
  const Mesh1D x = chebyshev_nodes(40);
  const Measure u = random_measure(40, 1);
  SolverConfig config;
  config.epsilon = 0.05;
  config.tol = 1e-10;
  config.itr_max = 20000;
  const Solution1D s = dense_sinkhorn(Problem1D{x, x, u, u}, config);
  EXPECT_TRUE(s.stats.converged);
  expect_marginals(plan_dense(s), u, u, 1e-10);
}

TEST(DenseSinkhorn, RandomInstanceConverges) {
  const Problem1D p = generate_problem_1d(NodeKind::Random, 64, 64, 2);
  SolverConfig config;
  config.epsilon = 0.02;
  config.tol = 1e-10;
  config.itr_max = 50000;
  const Solution1D s = dense_sinkhorn(p, config);
  ASSERT_TRUE(s.stats.converged);
  expect_marginals(plan_dense(s), p.u, p.v, 1e-10);
}

TEST(DenseSinkhorn, StabilizedAgreesWithPlain) {
  const Problem1D p = generate_problem_1d(NodeKind::Random, 50, 40, 3);
  SolverConfig config;
  config.epsilon = 0.01;
  config.tol = 1e-11;
  config.itr_max = 50000;
  config.absorb_threshold = 5.0;
  const Solution1D stabilized = dense_sinkhorn(p, config);
  config.stabilize = false;
  const Solution1D plain = dense_sinkhorn(p, config);
  EXPECT_GT(stabilized.stats.absorptions, 0u);
  EXPECT_EQ(plain.stats.absorptions, 0u);
  EXPECT_LE(frobenius_diff(plan_dense(stabilized), plan_dense(plain)), 1e-10);
}

}  // namespace
}  // namespace finom
