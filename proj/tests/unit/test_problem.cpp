#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <limits>
#include <sstream>

#include "finom/error.hpp"
#include "finom/problem.hpp"

namespace finom {
namespace {

Problem round_trip(const Problem& p) {
  std::stringstream buffer;
  save_problem(buffer, p);
  return load_problem(buffer);
}

ErrorCode load_error(const std::string& text) {
  std::istringstream in(text);
  try {
    load_problem(in);
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error for:\n" << text;
  return ErrorCode::IoError;
}

TEST(ProblemIo, RoundTripIsBitExact1D) {
  for (std::uint64_t seed : {0u, 1u, 99u}) {
    const Problem p = generate_problem_1d(NodeKind::Random, 37, 23, seed);
    EXPECT_EQ(round_trip(p), p);
    const Problem c = generate_problem_1d(NodeKind::Chebyshev, 64, 64, seed);
    EXPECT_EQ(round_trip(c), c);
  }
}

TEST(ProblemIo, RoundTripIsBitExact2D) {
  const Problem p = generate_problem_2d(10, 8, 4);
  const Problem back = round_trip(p);
  EXPECT_EQ(back, p);
  const auto& p2 = std::get<Problem2D>(back);
  EXPECT_EQ(p2.source.points(), 80u);
  EXPECT_EQ(p2.target.points(), 80u);
}

TEST(ProblemIo, HandWrittenFile) {
  std::istringstream in(
      "finom-problem 1\n"
      "# comment\n"
      "dim 1\n"
      "x1 5 1 3 7 9 12\n"
      "x2 5 2 5 6 9 10\n"
      "u 5 1 1 1 1 1\n"
      "v 5 0.2 0.2 0.2 0.2 0.2\n");
  const auto p = std::get<Problem1D>(load_problem(in));
  EXPECT_EQ(p.source[4], 12.0);
  EXPECT_EQ(p.target[0], 2.0);
  EXPECT_DOUBLE_EQ(p.u[0], 0.2);
}

TEST(ProblemIo, Errors) {
  const std::string head = "finom-problem 1\ndim 1\nx1 5 1 3 7 9 12\nx2 5 2 5 6 9 10\n";
  EXPECT_EQ(load_error(head + "u 4 0.25 0.25 0.25 0.25\nv 5 0.2 0.2 0.2 0.2 0.2\n"),
            ErrorCode::DimensionMismatch);
  EXPECT_EQ(load_error(head + "u 5 0.2 0.2 0.2 0.2 0.2\n"), ErrorCode::ParseError);
  EXPECT_EQ(load_error(head + "u 5 0.2 0.2 x 0.2 0.2\nv 5 0.2 0.2 0.2 0.2 0.2\n"),
            ErrorCode::ParseError);
  EXPECT_EQ(load_error("dim 1\n"), ErrorCode::ParseError);
  EXPECT_EQ(load_error(""), ErrorCode::ParseError);
  EXPECT_EQ(load_error("finom-problem 2\n"), ErrorCode::ParseError);
  EXPECT_EQ(load_error("finom-problem 1\ndim 1\nx1 2 1 1\nx2 1 0\nu 2 0.5 0.5\nv 1 1\n"),
            ErrorCode::DuplicateNode);
  EXPECT_EQ(load_error("finom-problem 1\ndim 1\nx1 1 0\nx2 1 0\nu 1 -1\nv 1 1\n"),
            ErrorCode::ValidationError);
  EXPECT_EQ(load_error("finom-problem 1\ndim 1\nx1 2 0 1\nx2 1 0\nu 2 -0.5 1.5\nv 1 1\n"),
            ErrorCode::ValidationError);
  EXPECT_EQ(load_error("finom-problem 1\ndim 1\nx1 1 0\nx2 1 0\nu 1 inf\nv 1 1\n"),
            ErrorCode::NonFiniteInput);
  EXPECT_EQ(load_error("finom-problem 1\ndim 1\nx1 1 0\nx2 1 0\nu 1 0\nv 1 1\n"),
            ErrorCode::ZeroMass);
  EXPECT_EQ(load_error("finom-problem 1\ndim 2\nx1 2 0 1\ny1 1 0\nx2 1 0\ny2 1 0\n"
                       "u 1 2 0.5 0.5\nv 1 1 1\n"),
            ErrorCode::DimensionMismatch);
}

TEST(ProblemGen, ChebyshevSharesMeshAndRequiresSquare) {
  const Problem1D p = generate_problem_1d(NodeKind::Chebyshev, 50, 50, 3);
  EXPECT_EQ(p.source, p.target);
  EXPECT_NE(p.u, p.v);
  EXPECT_THROW(generate_problem_1d(NodeKind::Chebyshev, 50, 40, 3), Error);
  EXPECT_THROW(generate_problem_1d(NodeKind::Random, 0, 4, 3), Error);
}

TEST(ProblemGen, Deterministic) {
  EXPECT_EQ(generate_problem_1d(NodeKind::Random, 20, 30, 5),
            generate_problem_1d(NodeKind::Random, 20, 30, 5));
  EXPECT_EQ(generate_problem_2d(6, 7, 5), generate_problem_2d(6, 7, 5));
  EXPECT_NE(generate_problem_2d(6, 7, 5), generate_problem_2d(6, 7, 6));
}

TEST(ProblemIo, CsvColumns) {
  std::ostringstream out;
  save_problem_csv(out, generate_problem_1d(NodeKind::Random, 3, 2, 1));
  std::istringstream lines(out.str());
  std::string line;
  std::getline(lines, line);
  EXPECT_EQ(line, "side,index,x,weight");
  int rows = 0;
  while (std::getline(lines, line)) ++rows;
  EXPECT_EQ(rows, 5);

  std::ostringstream out2;
  save_problem_csv(out2, generate_problem_2d(2, 3, 1));
  EXPECT_EQ(out2.str().substr(0, out2.str().find('\n')), "side,k,i,x,y,weight");
}

TEST(FormatDouble, ShortestRoundTrip) {
  for (double v : {0.1, 1.0 / 3.0, 1e-300, 12.0}) {
    const std::string text = format_double(v);
    EXPECT_EQ(std::stod(text), v) << text;
  }
  EXPECT_EQ(format_double(0.1), "0.1");
}

}  // namespace
}  // namespace finom
