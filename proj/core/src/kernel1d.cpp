#include "finom/kernel1d.hpp"

#include <cmath>
#include <ostream>
#include <string>

#include "finom/error.hpp"
#include "finom/problem.hpp"

namespace finom {

namespace {

void check_epsilon(double epsilon) {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    throw Error(ErrorCode::InvalidEpsilon, "epsilon must be positive and finite");
  }
}

void check_absorption(std::span<const double> values, std::size_t expected, const char* name) {
  if (!values.empty() && values.size() != expected) {
    throw Error(ErrorCode::DimensionMismatch, std::string(name) + " has length " +
                                                  std::to_string(values.size()) + ", expected " +
                                                  std::to_string(expected));
  }
  for (double v : values) {
    if (!std::isfinite(v)) throw Error(ErrorCode::NonFiniteInput, std::string(name) + " is not finite");
  }
}

void check_vector(std::span<const double> values, std::size_t expected, const char* name) {
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

inline double at(std::span<const double> v, std::size_t i) { return v.empty() ? 0.0 : v[i]; }

template <bool Count>
double dot(std::span<const double> seg, const double* in, OpCounter* counter) {
  double sum = 0.0;
  for (std::size_t e = 0; e < seg.size(); ++e) sum += seg[e] * in[e];
  if constexpr (Count) {
    counter->multiplications += seg.size();
    counter->additions += seg.size() - 1;
  }
  return sum;
}

// p_{i+1} = r_i p_i + <segment_{i+1}, in>, written to out.
template <bool Count>
void forward_sweep(const QuasiCollinearRep& lower, std::span<const double> in,
                   std::span<double> out, OpCounter* counter) {
  const auto& zeta = lower.boundaries.zeta;
  const std::size_t n = lower.rows();
  double p = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const bool has_prefix = i > 0 && zeta[i - 1] > 0;
    if (has_prefix) {
      p *= lower.ratios[i - 1];
      if constexpr (Count) ++counter->multiplications;
    }
    const auto seg = lower.segment(i);
    if (!seg.empty()) {
      const double d = dot<Count>(seg, in.data() + lower.segment_column(i), counter);
      if (has_prefix) {
        p += d;
        if constexpr (Count) ++counter->additions;
      } else {
        p = d;
      }
    }
    out[i] = p;
  }
}

// q_i = r'_i q_{i+1} + <segment_i, in>, accumulated into out (or written when
// the lower block is empty).
template <bool Count>
void backward_sweep(const QuasiCollinearRep& upper, std::span<const double> in,
                    std::span<double> out, bool accumulate, OpCounter* counter) {
  const auto& zeta = upper.boundaries.zeta;
  const std::size_t n = upper.rows();
  const std::size_t m = upper.cols();
  double q = 0.0;
  for (std::size_t i = n; i-- > 0;) {
    const bool has_suffix = i + 1 < n && zeta[i + 1] < m;
    if (has_suffix) {
      q *= upper.ratios[i];
      if constexpr (Count) ++counter->multiplications;
    }
    const auto seg = upper.segment(i);
    if (!seg.empty()) {
      const double d = dot<Count>(seg, in.data() + upper.segment_column(i), counter);
      if (has_suffix) {
        q += d;
        if constexpr (Count) ++counter->additions;
      } else {
        q = d;
      }
    }
    if (accumulate) {
      out[i] += q;
      if constexpr (Count) ++counter->additions;
    } else {
      out[i] = q;
    }
  }
}

template <bool Count>
void sweep_impl(const QuasiCollinearRep& lower, const QuasiCollinearRep& upper,
                std::span<const double> in, std::span<double> out, OpCounter* counter) {
  const auto& zeta = lower.boundaries.zeta;
  const std::size_t n = lower.rows();
  const std::size_t m = lower.cols();
  const bool lower_empty = zeta[n - 1] == 0;
  const bool upper_empty = zeta[0] == m;
  if (!lower_empty) forward_sweep<Count>(lower, in, out, counter);
  if (!upper_empty) {
    backward_sweep<Count>(upper, in, out, !lower_empty, counter);
  } else if (lower_empty) {
    for (double& v : out) v = 0.0;
  }
}

// Lower block with a distance-weighted companion accumulator:
//   p_{i+1}  = r_i p_i + <seg, in>
//   pc_{i+1} = r_i (pc_i + (x_{i+1} - x_i) p_i) + <seg, (x_{i+1} - y) ⊙ in>
void forward_cost_sweep(const QuasiCollinearRep& lower, std::span<const double> xs,
                        std::span<const double> ys, std::span<const double> in,
                        std::span<double> out) {
  const auto& zeta = lower.boundaries.zeta;
  const std::size_t n = lower.rows();
  double p = 0.0;
  double pc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (i > 0 && zeta[i - 1] > 0) {
      const double r = lower.ratios[i - 1];
      pc = r * (pc + (xs[i] - xs[i - 1]) * p);
      p = r * p;
    } else {
      p = 0.0;
      pc = 0.0;
    }
    const auto seg = lower.segment(i);
    const std::size_t col = lower.segment_column(i);
    for (std::size_t e = 0; e < seg.size(); ++e) {
      const double t = seg[e] * in[col + e];
      p += t;
      pc += t * (xs[i] - ys[col + e]);
    }
    out[i] = pc;
  }
}

//   q_i  = r'_i q_{i+1} + <seg, in>
//   qc_i = r'_i (qc_{i+1} + (x_{i+1} - x_i) q_{i+1}) + <seg, (y - x_i) ⊙ in>
void backward_cost_sweep(const QuasiCollinearRep& upper, std::span<const double> xs,
                         std::span<const double> ys, std::span<const double> in,
                         std::span<double> out) {
  const auto& zeta = upper.boundaries.zeta;
  const std::size_t n = upper.rows();
  const std::size_t m = upper.cols();
  double q = 0.0;
  double qc = 0.0;
  for (std::size_t i = n; i-- > 0;) {
    if (i + 1 < n && zeta[i + 1] < m) {
      const double r = upper.ratios[i];
      qc = r * (qc + (xs[i + 1] - xs[i]) * q);
      q = r * q;
    } else {
      q = 0.0;
      qc = 0.0;
    }
    const auto seg = upper.segment(i);
    const std::size_t col = upper.segment_column(i);
    for (std::size_t e = 0; e < seg.size(); ++e) {
      const double t = seg[e] * in[col + e];
      q += t;
      qc += t * (ys[col + e] - xs[i]);
    }
    out[i] += qc;
  }
}

}  // namespace

DividingIndex dividing_index(const Mesh1D& x, const Mesh1D& y) {
  DividingIndex index;
  index.cols = y.size();
  index.zeta.resize(x.size());
  std::size_t j = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    while (j < y.size() && y[j] <= x[i]) ++j;
    index.zeta[i] = j;
  }
  return index;
}

QuasiCollinearRep build_rep(const Mesh1D& x, const Mesh1D& y, double epsilon,
                            BlockOrientation orientation, std::span<const double> a,
                            std::span<const double> b) {
  return build_rep(x, y, dividing_index(x, y), epsilon, orientation, a, b);
}

QuasiCollinearRep build_rep(const Mesh1D& x, const Mesh1D& y, const DividingIndex& zeta,
                            double epsilon, BlockOrientation orientation,
                            std::span<const double> a, std::span<const double> b) {
  check_epsilon(epsilon);
  check_absorption(a, x.size(), "left absorption");
  check_absorption(b, y.size(), "right absorption");
  if (zeta.rows() != x.size() || zeta.cols != y.size()) {
    throw Error(ErrorCode::DimensionMismatch, "dividing index does not match the meshes");
  }
  const std::size_t n = x.size();
  const std::size_t m = y.size();

  QuasiCollinearRep rep;
  rep.orientation = orientation;
  rep.boundaries = zeta;
  rep.epsilon = epsilon;
  rep.ratios.resize(n - 1);
  rep.offsets.resize(n + 1);

  const double inv_eps = 1.0 / epsilon;
  auto entry = [&](std::size_t i, std::size_t j) {
    return std::exp((at(a, i) + at(b, j) - std::abs(x[i] - y[j])) * inv_eps);
  };

  if (orientation == BlockOrientation::Lower) {
    // A ratio that scales an empty prefix never touches a value; it is 1.
    for (std::size_t i = 0; i + 1 < n; ++i) {
      rep.ratios[i] = zeta[i] == 0
                          ? 1.0
                          : std::exp(((at(a, i + 1) - at(a, i)) - (x[i + 1] - x[i])) * inv_eps);
    }
    rep.first_column = 0;
    rep.offsets[0] = 0;
    for (std::size_t i = 0; i < n; ++i) rep.offsets[i + 1] = zeta[i];
    rep.edges.resize(zeta[n - 1]);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = rep.offsets[i]; j < rep.offsets[i + 1]; ++j) rep.edges[j] = entry(i, j);
    }
  } else {
    for (std::size_t i = 0; i + 1 < n; ++i) {
      rep.ratios[i] = zeta[i + 1] == m
                          ? 1.0
                          : std::exp(((at(a, i) - at(a, i + 1)) - (x[i + 1] - x[i])) * inv_eps);
    }
    rep.first_column = zeta[0];
    for (std::size_t i = 0; i < n; ++i) rep.offsets[i] = zeta[i] - zeta[0];
    rep.offsets[n] = m - zeta[0];
    rep.edges.resize(m - zeta[0]);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t e = rep.offsets[i]; e < rep.offsets[i + 1]; ++e) {
        rep.edges[e] = entry(i, rep.first_column + e);
      }
    }
  }
  return rep;
}

Matrix QuasiCollinearRep::dense() const {
  const std::size_t n = rows();
  const std::size_t m = cols();
  Matrix out(n, m);
  const auto& zeta = boundaries.zeta;
  if (orientation == BlockOrientation::Lower) {
    for (std::size_t i = 0; i < n; ++i) {
      if (i > 0) {
        for (std::size_t j = 0; j < zeta[i - 1]; ++j) out(i, j) = ratios[i - 1] * out(i - 1, j);
      }
      const auto seg = segment(i);
      for (std::size_t e = 0; e < seg.size(); ++e) out(i, segment_column(i) + e) = seg[e];
    }
  } else {
    for (std::size_t i = n; i-- > 0;) {
      if (i + 1 < n) {
        for (std::size_t j = zeta[i + 1]; j < m; ++j) out(i, j) = ratios[i] * out(i + 1, j);
      }
      const auto seg = segment(i);
      for (std::size_t e = 0; e < seg.size(); ++e) out(i, segment_column(i) + e) = seg[e];
    }
  }
  return out;
}

void dump_rep(std::ostream& out, const QuasiCollinearRep& rep) {
  out << "rep " << (rep.orientation == BlockOrientation::Lower ? "lower" : "upper") << '\n';
  out << "epsilon " << format_double(rep.epsilon) << '\n';
  out << "zeta " << rep.rows();
  for (std::size_t z : rep.boundaries.zeta) out << ' ' << z;
  out << '\n';
  out << "ratios " << rep.ratios.size();
  for (double r : rep.ratios) out << ' ' << format_double(r);
  out << '\n';
  for (std::size_t i = 0; i < rep.rows(); ++i) {
    const auto seg = rep.segment(i);
    out << "segment " << i << ' ' << rep.segment_column(i) << ' ' << seg.size();
    for (double e : seg) out << ' ' << format_double(e);
    out << '\n';
  }
}

void sweep_apply(const QuasiCollinearRep& lower, const QuasiCollinearRep& upper,
                 std::span<const double> in, std::span<double> out, OpCounter* counter) {
  if (counter) {
    sweep_impl<true>(lower, upper, in, out, counter);
  } else {
    sweep_impl<false>(lower, upper, in, out, nullptr);
  }
}

KernelOperator1D::KernelOperator1D(Mesh1D x, Mesh1D y, double epsilon)
    : KernelOperator1D(std::move(x), std::move(y), epsilon, {}, {}) {}

KernelOperator1D::KernelOperator1D(Mesh1D x, Mesh1D y, double epsilon,
                                   std::vector<double> absorption_left,
                                   std::vector<double> absorption_right)
    : x_(std::move(x)), y_(std::move(y)), epsilon_(epsilon) {
  check_epsilon(epsilon);
  check_absorption(absorption_left, x_.size(), "left absorption");
  check_absorption(absorption_right, y_.size(), "right absorption");
  a_ = absorption_left.empty() ? std::vector<double>(x_.size(), 0.0) : std::move(absorption_left);
  b_ = absorption_right.empty() ? std::vector<double>(y_.size(), 0.0) : std::move(absorption_right);
  rebuild();
}

void KernelOperator1D::rebuild() {
  absorbed_ = false;
  for (double v : a_) absorbed_ = absorbed_ || v != 0.0;
  for (double v : b_) absorbed_ = absorbed_ || v != 0.0;
  std::span<const double> a = absorbed_ ? std::span<const double>(a_) : std::span<const double>();
  std::span<const double> b = absorbed_ ? std::span<const double>(b_) : std::span<const double>();

  const DividingIndex zeta = dividing_index(x_, y_);
  lower_ = build_rep(x_, y_, zeta, epsilon_, BlockOrientation::Lower, a, b);
  upper_ = build_rep(x_, y_, zeta, epsilon_, BlockOrientation::Upper, a, b);
  const DividingIndex t_zeta = dividing_index(y_, x_);
  t_lower_ = build_rep(y_, x_, t_zeta, epsilon_, BlockOrientation::Lower, b, a);
  t_upper_ = build_rep(y_, x_, t_zeta, epsilon_, BlockOrientation::Upper, b, a);
}

void KernelOperator1D::apply(std::span<const double> psi, std::span<double> out,
                             OpCounter* counter) const {
  check_vector(psi, cols(), "input");
  check_vector(out, rows(), "output");
  check_finite(psi, "input");
  apply_unchecked(psi, out, counter);
}

std::vector<double> KernelOperator1D::apply(std::span<const double> psi) const {
  std::vector<double> out(rows());
  apply(psi, out);
  return out;
}

void KernelOperator1D::apply_transpose(std::span<const double> phi, std::span<double> out,
                                       OpCounter* counter) const {
  check_vector(phi, rows(), "input");
  check_vector(out, cols(), "output");
  check_finite(phi, "input");
  apply_transpose_unchecked(phi, out, counter);
}

std::vector<double> KernelOperator1D::apply_transpose(std::span<const double> phi) const {
  std::vector<double> out(cols());
  apply_transpose(phi, out);
  return out;
}

void KernelOperator1D::apply_unchecked(std::span<const double> psi, std::span<double> out,
                                       OpCounter* counter) const {
  sweep_apply(lower_, upper_, psi, out, counter);
}

void KernelOperator1D::apply_transpose_unchecked(std::span<const double> phi,
                                                 std::span<double> out,
                                                 OpCounter* counter) const {
  sweep_apply(t_lower_, t_upper_, phi, out, counter);
}

void KernelOperator1D::apply_split(std::span<const double> psi, std::span<double> p,
                                   std::span<double> q) const {
  check_vector(psi, cols(), "input");
  check_vector(p, rows(), "lower output");
  check_vector(q, rows(), "upper output");
  check_finite(psi, "input");
  forward_sweep<false>(lower_, psi, p, nullptr);
  backward_sweep<false>(upper_, psi, q, false, nullptr);
}

void KernelOperator1D::apply_cost_weighted(std::span<const double> psi,
                                           std::span<double> out) const {
  check_vector(psi, cols(), "input");
  check_vector(out, rows(), "output");
  check_finite(psi, "input");
  forward_cost_sweep(lower_, x_.nodes(), y_.nodes(), psi, out);
  backward_cost_sweep(upper_, x_.nodes(), y_.nodes(), psi, out);
}

void KernelOperator1D::apply_transpose_cost_weighted(std::span<const double> phi,
                                                     std::span<double> out) const {
  check_vector(phi, rows(), "input");
  check_vector(out, cols(), "output");
  check_finite(phi, "input");
  forward_cost_sweep(t_lower_, y_.nodes(), x_.nodes(), phi, out);
  backward_cost_sweep(t_upper_, y_.nodes(), x_.nodes(), phi, out);
}

void KernelOperator1D::absorb(std::span<const double> delta_a, std::span<const double> delta_b) {
  check_vector(delta_a, rows(), "delta_a");
  check_vector(delta_b, cols(), "delta_b");
  check_finite(delta_a, "delta_a");
  check_finite(delta_b, "delta_b");
  for (std::size_t i = 0; i < a_.size(); ++i) a_[i] += delta_a[i];
  for (std::size_t j = 0; j < b_.size(); ++j) b_[j] += delta_b[j];
  rebuild();
}

KernelOperator1D KernelOperator1D::absorbed(std::span<const double> delta_a,
                                            std::span<const double> delta_b) const {
  KernelOperator1D copy = *this;
  copy.absorb(delta_a, delta_b);
  return copy;
}

Matrix KernelOperator1D::dense() const {
  Matrix out = lower_.dense();
  const Matrix up = upper_.dense();
  for (std::size_t k = 0; k < out.size(); ++k) out.data()[k] += up.data()[k];
  return out;
}

KernelOperator1D build_operator(const Mesh1D& x, const Mesh1D& y, double epsilon) {
  return KernelOperator1D(x, y, epsilon);
}

}  // namespace finom
