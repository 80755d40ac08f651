#pragma once

// Brute-force references evaluated entry by entry in long double. Nothing here
// calls into the library's kernel code, so agreement is meaningful.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <random>
#include <span>
#include <vector>

namespace oracle {

using Dense = std::vector<std::vector<long double>>;

inline Dense kernel(std::span<const double> x, std::span<const double> y, double eps,
                    std::span<const double> a = {}, std::span<const double> b = {}) {
  Dense k(x.size(), std::vector<long double>(y.size()));
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (std::size_t j = 0; j < y.size(); ++j) {
      long double e = -std::fabs(static_cast<long double>(x[i]) - y[j]);
      if (!a.empty()) e += a[i];
      if (!b.empty()) e += b[j];
      k[i][j] = std::exp(e / eps);
    }
  }
  return k;
}

inline std::vector<long double> matvec(const Dense& k, std::span<const double> v) {
  std::vector<long double> out(k.size(), 0.0L);
  for (std::size_t i = 0; i < k.size(); ++i) {
    for (std::size_t j = 0; j < v.size(); ++j) out[i] += k[i][j] * v[j];
  }
  return out;
}

inline std::vector<long double> matvec_t(const Dense& k, std::span<const double> v) {
  std::vector<long double> out(k.empty() ? 0 : k[0].size(), 0.0L);
  for (std::size_t i = 0; i < k.size(); ++i) {
    for (std::size_t j = 0; j < out.size(); ++j) out[j] += k[i][j] * v[i];
  }
  return out;
}

/// ‖got − want‖∞ / ‖want‖∞ (absolute when want is zero).
inline double rel_inf(std::span<const double> got, const std::vector<long double>& want) {
  long double diff = 0.0L, scale = 0.0L;
  for (std::size_t i = 0; i < want.size(); ++i) {
    diff = std::max(diff, std::fabs(got[i] - want[i]));
    scale = std::max(scale, std::fabs(want[i]));
  }
  return static_cast<double>(scale > 0.0L ? diff / scale : diff);
}

/// Kernel between two column-major grids, rows/cols in point order.
inline Dense kernel_2d(std::span<const double> x1, std::span<const double> y1,
                       std::span<const double> x2, std::span<const double> y2, double eps,
                       std::span<const double> a = {}, std::span<const double> b = {}) {
  const std::size_t n1 = x1.size(), m1 = y1.size(), n2 = x2.size(), m2 = y2.size();
  Dense k(n1 * m1, std::vector<long double>(n2 * m2));
  for (std::size_t i = 0; i < m1; ++i) {
    for (std::size_t kk = 0; kk < n1; ++kk) {
      const std::size_t p = i * n1 + kk;
      for (std::size_t j = 0; j < m2; ++j) {
        for (std::size_t l = 0; l < n2; ++l) {
          const std::size_t q = j * n2 + l;
          long double e = -std::fabs(static_cast<long double>(x1[kk]) - x2[l]) -
                          std::fabs(static_cast<long double>(y1[i]) - y2[j]);
          if (!a.empty()) e += a[p];
          if (!b.empty()) e += b[q];
          k[p][q] = std::exp(e / eps);
        }
      }
    }
  }
  return k;
}

inline std::vector<double> sorted_uniform(std::size_t n, std::mt19937_64& rng, double lo = 0.0,
                                          double hi = 1.0) {
  std::uniform_real_distribution<double> d(lo, hi);
  std::vector<double> v;
  while (v.size() < n) {
    v.push_back(d(rng));
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
  }
  return v;
}

inline std::vector<double> uniform(std::size_t n, std::mt19937_64& rng, double lo = 0.0,
                                   double hi = 1.0) {
  std::uniform_real_distribution<double> d(lo, hi);
  std::vector<double> v(n);
  for (double& e : v) e = d(rng);
  return v;
}

}  // namespace oracle
