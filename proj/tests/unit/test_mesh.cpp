#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include "finom/error.hpp"
#include "finom/mesh.hpp"

namespace finom {
namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::IoError;
}

TEST(ValidateMesh, AcceptsStrictlyAscending) {
  const Mesh1D mesh = validate_mesh({1, 3, 7, 9, 12});
  EXPECT_EQ(mesh.size(), 5u);
  EXPECT_EQ(mesh[2], 7.0);
  EXPECT_EQ(validate_mesh({0.0}).size(), 1u);
}

TEST(ValidateMesh, RejectsBadInput) {
  EXPECT_EQ(code_of([] { validate_mesh({1, 1, 2}); }), ErrorCode::DuplicateNode);
  EXPECT_EQ(code_of([] { validate_mesh({2, 1}); }), ErrorCode::UnsortedInput);
  EXPECT_EQ(code_of([] { validate_mesh({}); }), ErrorCode::EmptyInput);
  EXPECT_EQ(code_of([] { validate_mesh({0.0, std::numeric_limits<double>::quiet_NaN()}); }),
            ErrorCode::NonFiniteCoordinate);
  EXPECT_EQ(code_of([] { validate_mesh({0.0, std::numeric_limits<double>::infinity()}); }),
            ErrorCode::NonFiniteCoordinate);
}

TEST(ChebyshevNodes, SmallCases) {
  EXPECT_NEAR(chebyshev_nodes(1)[0], 0.5, 1e-16);
  const Mesh1D two = chebyshev_nodes(2);
  EXPECT_NEAR(two[0], 0.5 + 0.5 * std::cos(3 * std::numbers::pi / 4), 1e-15);
  EXPECT_NEAR(two[1], 0.5 + 0.5 * std::cos(std::numbers::pi / 4), 1e-15);
  EXPECT_NEAR(two[0], 0.146446609406726, 1e-14);
}

TEST(ChebyshevNodes, AscendingInsideUnitIntervalAndSymmetric) {
  for (std::size_t n : {3u, 10u, 500u, 1001u}) {
    const Mesh1D mesh = chebyshev_nodes(n);
    ASSERT_EQ(mesh.size(), n);
    for (std::size_t i = 0; i < n; ++i) {
      EXPECT_GT(mesh[i], 0.0);
      EXPECT_LT(mesh[i], 1.0);
      if (i + 1 < n) EXPECT_LT(mesh[i], mesh[i + 1]);
      EXPECT_NEAR(mesh[i] + mesh[n - 1 - i], 1.0, 1e-14);
    }
  }
}

TEST(RandomSortedNodes, DeterministicSortedInRange) {
  EXPECT_EQ(random_sorted_nodes(5, 42), random_sorted_nodes(5, 42));
  EXPECT_NE(random_sorted_nodes(5, 42), random_sorted_nodes(5, 43));
  const Mesh1D mesh = random_sorted_nodes(1000, 7);
  for (std::size_t i = 0; i < mesh.size(); ++i) {
    EXPECT_GE(mesh[i], 0.0);
    EXPECT_LE(mesh[i], 1.0);
    if (i + 1 < mesh.size()) EXPECT_LT(mesh[i], mesh[i + 1]);
  }
  const Mesh1D one = random_sorted_nodes(1, 0);
  ASSERT_EQ(one.size(), 1u);
  EXPECT_GE(one[0], 0.0);
  EXPECT_LE(one[0], 1.0);
}

TEST(UniformSource, MapsTopBitsOfEngine) {
  UniformSource source(123);
  std::mt19937_64 engine(123);
  for (int k = 0; k < 100; ++k) {
    const double want = static_cast<double>(engine() >> 11) * 0x1.0p-53;
    EXPECT_EQ(source.next(), want);
  }
}

TEST(RandomMeasure, Normalized) {
  const Measure three = random_measure(3, 1);
  EXPECT_NEAR(std::accumulate(three.weights().begin(), three.weights().end(), 0.0), 1.0, 1e-15);
  EXPECT_EQ(random_measure(1, 9)[0], 1.0);
  const Measure big = random_measure(500, 3);
  for (double w : big.weights()) {
    EXPECT_GT(w, 0.0);
    EXPECT_LT(w, 1.0);
  }
  EXPECT_EQ(random_measure(500, 3), big);
}

TEST(RandomMeasure, SumWithinToleranceAtLargeSize) {
  const Measure m = random_measure(1'000'000, 11);
  long double sum = 0.0L;
  for (double w : m.weights()) sum += w;
  EXPECT_NEAR(static_cast<double>(sum), 1.0, 1e-12);
}

TEST(Measure, Validation) {
  EXPECT_NO_THROW(Measure({0.25, 0.75}));
  EXPECT_NO_THROW(Measure({0.0, 1.0}));
  EXPECT_EQ(code_of([] { Measure({-0.1, 1.1}); }), ErrorCode::ValidationError);
  EXPECT_EQ(code_of([] { Measure({0.5, 0.6}); }), ErrorCode::ValidationError);
  EXPECT_EQ(code_of([] { Measure::normalized({0.0, 0.0}); }), ErrorCode::ZeroMass);
  const Measure m = Measure::normalized({1.0, 3.0});
  EXPECT_EQ(m[0], 0.25);
  EXPECT_EQ(m[1], 0.75);
}

TEST(Grid2D, ColumnMajorIndex) {
  const Grid2D grid(validate_mesh({0, 1, 2}), validate_mesh({5, 6}));
  EXPECT_EQ(grid.points(), 6u);
  EXPECT_EQ(grid.linear_index(0, 0), 0u);
  EXPECT_EQ(grid.linear_index(2, 0), 2u);
  EXPECT_EQ(grid.linear_index(0, 1), 3u);
  EXPECT_EQ(grid.linear_index(2, 1), 5u);
}

TEST(Measure2D, ShapeAndIndexing) {
  const Measure2D m(2, 2, {0.1, 0.2, 0.3, 0.4});
  EXPECT_EQ(m(1, 0), 0.2);
  EXPECT_EQ(m(0, 1), 0.3);
  EXPECT_EQ(code_of([] { Measure2D(2, 2, {0.5, 0.5}); }), ErrorCode::DimensionMismatch);
  const Measure2D r = random_measure_2d(4, 3, 5);
  EXPECT_EQ(r.weights().size(), 12u);
}

}  // namespace
}  // namespace finom
