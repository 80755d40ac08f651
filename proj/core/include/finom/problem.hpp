#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <variant>

#include "finom/mesh.hpp"

namespace finom {

/// Source measure `u` on `source`, target measure `v` on `target`.
struct Problem1D {
  Mesh1D source;
  Mesh1D target;
  Measure u;
  Measure v;

  friend bool operator==(const Problem1D&, const Problem1D&) = default;
};

struct Problem2D {
  Grid2D source;
  Grid2D target;
  Measure2D u;
  Measure2D v;

  friend bool operator==(const Problem2D&, const Problem2D&) = default;
};

using Problem = std::variant<Problem1D, Problem2D>;

/// Throws DimensionMismatch when a measure does not match its mesh.
void check_problem(const Problem1D& problem);
void check_problem(const Problem2D& problem);

enum class NodeKind { Chebyshev, Random };

/// Random masses on generated nodes. Chebyshev problems place both measures on
/// the same nodes (requires n == m); random problems draw the two meshes
/// independently. Sub-seeds for the individual draws are derived from `seed`.
Problem1D generate_problem_1d(NodeKind nodes, std::size_t n, std::size_t m,
                              std::uint64_t seed);

/// Four independent random sorted node vectors (x1, y1 for the source grid,
/// x2, y2 for the target grid) with random masses.
Problem2D generate_problem_2d(std::size_t n, std::size_t m, std::uint64_t seed);

/// Text problem format (see docs/formats.md):
///
///     finom-problem 1
///     dim 1
///     x1 <count> <values...>
///     x2 <count> <values...>
///     u <count> <values...>
///     v <count> <values...>
///
/// 2D files add `y1`/`y2` lines and write `u`/`v` as `<rows> <cols>` followed by
/// the column-major values. Doubles are written in shortest round-trip form so
/// load(save(P)) == P bit for bit.
void save_problem(std::ostream& out, const Problem& problem);
void save_problem(const std::filesystem::path& path, const Problem& problem);

/// Throws ParseError, DimensionMismatch, or a mesh/measure validation error.
Problem load_problem(std::istream& in);
Problem load_problem(const std::filesystem::path& path);

/// One row per support point: `index,x,u` style columns for interop.
void save_problem_csv(std::ostream& out, const Problem& problem);

/// Shortest decimal form that parses back to the same double.
std::string format_double(double value);

}  // namespace finom
