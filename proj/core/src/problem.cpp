#include "finom/problem.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <vector>

#include "finom/error.hpp"

namespace finom {

namespace {

constexpr std::string_view kMagic = "finom-problem";
constexpr int kVersion = 1;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t sub_seed(std::uint64_t seed, std::uint64_t stream) {
  return splitmix64(seed ^ splitmix64(stream));
}

void write_values(std::ostream& out, std::span<const double> values) {
  for (double value : values) out << ' ' << format_double(value);
  out << '\n';
}

void write_mesh(std::ostream& out, std::string_view key, const Mesh1D& mesh) {
  out << key << ' ' << mesh.size();
  write_values(out, mesh.nodes());
}

// Accepts already normalized weights bit-exactly; renormalizes anything else.
std::vector<double> as_normalized(std::vector<double> weights) {
  double sum = 0.0;
  for (double w : weights) {
    if (!std::isfinite(w)) throw Error(ErrorCode::NonFiniteInput, "weights must be finite");
    if (w < 0.0) throw Error(ErrorCode::ValidationError, "weights must be nonnegative");
    sum += w;
  }
  if (std::abs(sum - 1.0) <= Measure::kSumTolerance) return weights;
  if (sum == 0.0) throw Error(ErrorCode::ZeroMass, "weights sum to zero");
  for (double& w : weights) w /= sum;
  return weights;
}

struct Record {
  std::vector<std::size_t> shape;
  std::vector<double> values;
  int line = 0;
};

double parse_double(std::string_view token, int line) {
  double value = 0.0;
  const char* first = token.data();
  const char* last = token.data() + token.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) {
    throw Error(ErrorCode::ParseError,
                "line " + std::to_string(line) + ": bad number '" + std::string(token) + "'");
  }
  return value;
}

std::size_t parse_count(std::string_view token, int line) {
  std::size_t value = 0;
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc() || ptr != token.data() + token.size()) {
    throw Error(ErrorCode::ParseError,
                "line " + std::to_string(line) + ": bad count '" + std::string(token) + "'");
  }
  return value;
}

const Record& require(const std::map<std::string, Record>& records, const std::string& key) {
  auto it = records.find(key);
  if (it == records.end()) throw Error(ErrorCode::ParseError, "missing field '" + key + "'");
  return it->second;
}

void check_length(const Record& record, std::size_t expected, const std::string& what) {
  if (record.values.size() != expected) {
    throw Error(ErrorCode::DimensionMismatch,
                what + " has " + std::to_string(record.values.size()) + " entries, expected " +
                    std::to_string(expected));
  }
}

}  // namespace

std::string format_double(double value) {
  char buffer[32];
  auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
  return std::string(buffer, ptr);
}

void check_problem(const Problem1D& problem) {
  if (problem.u.size() != problem.source.size()) {
    throw Error(ErrorCode::DimensionMismatch, "u does not match the source mesh");
  }
  if (problem.v.size() != problem.target.size()) {
    throw Error(ErrorCode::DimensionMismatch, "v does not match the target mesh");
  }
}

void check_problem(const Problem2D& problem) {
  if (problem.u.rows() != problem.source.rows() || problem.u.cols() != problem.source.cols()) {
    throw Error(ErrorCode::DimensionMismatch, "u does not match the source grid");
  }
  if (problem.v.rows() != problem.target.rows() || problem.v.cols() != problem.target.cols()) {
    throw Error(ErrorCode::DimensionMismatch, "v does not match the target grid");
  }
}

Problem1D generate_problem_1d(NodeKind nodes, std::size_t n, std::size_t m,
                              std::uint64_t seed) {
  if (n == 0 || m == 0) throw Error(ErrorCode::InvalidArgument, "problem sizes must be positive");
  if (nodes == NodeKind::Chebyshev) {
    if (n != m) {
      throw Error(ErrorCode::InvalidArgument, "Chebyshev problems share one mesh (n == m)");
    }
    Mesh1D mesh = chebyshev_nodes(n);
    return {mesh, mesh, random_measure(n, sub_seed(seed, 2)), random_measure(m, sub_seed(seed, 3))};
  }
  return {random_sorted_nodes(n, sub_seed(seed, 0)), random_sorted_nodes(m, sub_seed(seed, 1)),
          random_measure(n, sub_seed(seed, 2)), random_measure(m, sub_seed(seed, 3))};
}

Problem2D generate_problem_2d(std::size_t n, std::size_t m, std::uint64_t seed) {
  if (n == 0 || m == 0) throw Error(ErrorCode::InvalidArgument, "grid sizes must be positive");
  Grid2D source(random_sorted_nodes(n, sub_seed(seed, 10)), random_sorted_nodes(m, sub_seed(seed, 11)));
  Grid2D target(random_sorted_nodes(n, sub_seed(seed, 12)), random_sorted_nodes(m, sub_seed(seed, 13)));
  return {std::move(source), std::move(target), random_measure_2d(n, m, sub_seed(seed, 14)),
          random_measure_2d(n, m, sub_seed(seed, 15))};
}

void save_problem(std::ostream& out, const Problem& problem) {
  out << kMagic << ' ' << kVersion << '\n';
  if (const auto* p1 = std::get_if<Problem1D>(&problem)) {
    check_problem(*p1);
    out << "dim 1\n";
    write_mesh(out, "x1", p1->source);
    write_mesh(out, "x2", p1->target);
    out << "u " << p1->u.size();
    write_values(out, p1->u.weights());
    out << "v " << p1->v.size();
    write_values(out, p1->v.weights());
  } else {
    const auto& p2 = std::get<Problem2D>(problem);
    check_problem(p2);
    out << "dim 2\n";
    write_mesh(out, "x1", p2.source.x());
    write_mesh(out, "y1", p2.source.y());
    write_mesh(out, "x2", p2.target.x());
    write_mesh(out, "y2", p2.target.y());
    out << "u " << p2.u.rows() << ' ' << p2.u.cols();
    write_values(out, p2.u.weights());
    out << "v " << p2.v.rows() << ' ' << p2.v.cols();
    write_values(out, p2.v.weights());
  }
}

void save_problem(const std::filesystem::path& path, const Problem& problem) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IoError, "cannot open '" + path.string() + "' for writing");
  save_problem(out, problem);
  if (!out) throw Error(ErrorCode::IoError, "failed writing '" + path.string() + "'");
}

Problem load_problem(std::istream& in) {
  std::string line;
  int line_no = 0;
  bool saw_header = false;
  int dim = 0;
  std::map<std::string, Record> records;

  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream tokens(line);
    std::string key;
    if (!(tokens >> key) || key.front() == '#') continue;

    if (!saw_header) {
      int version = 0;
      if (key != kMagic || !(tokens >> version)) {
        throw Error(ErrorCode::ParseError, "missing 'finom-problem' header");
      }
      if (version != kVersion) {
        throw Error(ErrorCode::ParseError, "unsupported format version " + std::to_string(version));
      }
      saw_header = true;
      continue;
    }
    if (key == "dim") {
      if (!(tokens >> dim) || (dim != 1 && dim != 2)) {
        throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": dim must be 1 or 2");
      }
      continue;
    }
    if (dim == 0) throw Error(ErrorCode::ParseError, "'dim' must precede data lines");

    const bool is_weights = key == "u" || key == "v";
    const bool is_nodes = key == "x1" || key == "x2" || key == "y1" || key == "y2";
    if (!is_weights && !is_nodes) {
      throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": unknown field '" + key + "'");
    }
    if (records.count(key)) {
      throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": duplicate field '" + key + "'");
    }

    Record record;
    record.line = line_no;
    const std::size_t shape_rank = (is_weights && dim == 2) ? 2 : 1;
    std::string token;
    for (std::size_t r = 0; r < shape_rank; ++r) {
      if (!(tokens >> token)) {
        throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": missing count");
      }
      record.shape.push_back(parse_count(token, line_no));
    }
    while (tokens >> token) record.values.push_back(parse_double(token, line_no));
    std::size_t declared = 1;
    for (std::size_t extent : record.shape) declared *= extent;
    if (declared != record.values.size()) {
      throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": declared " +
                                             std::to_string(declared) + " values, found " +
                                             std::to_string(record.values.size()));
    }
    records.emplace(key, std::move(record));
  }
  if (!saw_header) throw Error(ErrorCode::ParseError, "empty problem file");
  if (dim == 0) throw Error(ErrorCode::ParseError, "missing field 'dim'");

  if (dim == 1) {
    const Record& x1 = require(records, "x1");
    const Record& x2 = require(records, "x2");
    const Record& u = require(records, "u");
    const Record& v = require(records, "v");
    check_length(u, x1.values.size(), "u");
    check_length(v, x2.values.size(), "v");
    return Problem1D{Mesh1D(x1.values), Mesh1D(x2.values), Measure(as_normalized(u.values)),
                     Measure(as_normalized(v.values))};
  }

  const Record& x1 = require(records, "x1");
  const Record& y1 = require(records, "y1");
  const Record& x2 = require(records, "x2");
  const Record& y2 = require(records, "y2");
  const Record& u = require(records, "u");
  const Record& v = require(records, "v");
  if (u.shape[0] != x1.values.size() || u.shape[1] != y1.values.size()) {
    throw Error(ErrorCode::DimensionMismatch, "u shape does not match the x1 × y1 grid");
  }
  if (v.shape[0] != x2.values.size() || v.shape[1] != y2.values.size()) {
    throw Error(ErrorCode::DimensionMismatch, "v shape does not match the x2 × y2 grid");
  }
  Grid2D source(Mesh1D(x1.values), Mesh1D(y1.values));
  Grid2D target(Mesh1D(x2.values), Mesh1D(y2.values));
  return Problem2D{std::move(source), std::move(target),
                   Measure2D(u.shape[0], u.shape[1], as_normalized(u.values)),
                   Measure2D(v.shape[0], v.shape[1], as_normalized(v.values))};
}

Problem load_problem(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open '" + path.string() + "'");
  return load_problem(in);
}

void save_problem_csv(std::ostream& out, const Problem& problem) {
  if (const auto* p1 = std::get_if<Problem1D>(&problem)) {
    out << "side,index,x,weight\n";
    auto emit = [&](std::string_view side, const Mesh1D& mesh, const Measure& mass) {
      for (std::size_t i = 0; i < mesh.size(); ++i) {
        out << side << ',' << i << ',' << format_double(mesh[i]) << ',' << format_double(mass[i])
            << '\n';
      }
    };
    emit("source", p1->source, p1->u);
    emit("target", p1->target, p1->v);
    return;
  }
  const auto& p2 = std::get<Problem2D>(problem);
  out << "side,k,i,x,y,weight\n";
  auto emit = [&](std::string_view side, const Grid2D& grid, const Measure2D& mass) {
    for (std::size_t i = 0; i < grid.cols(); ++i) {
      for (std::size_t k = 0; k < grid.rows(); ++k) {
        out << side << ',' << k << ',' << i << ',' << format_double(grid.x()[k]) << ','
            << format_double(grid.y()[i]) << ',' << format_double(mass(k, i)) << '\n';
      }
    }
  };
  emit("source", p2.source, p2.u);
  emit("target", p2.target, p2.v);
}

}  // namespace finom
