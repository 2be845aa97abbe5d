#pragma once

// Reference computations for the tests. They work on plain nested vectors
// and share no code with the library beyond reading its types.

#include <cmath>
#include <cstddef>
#include <functional>
#include <vector>

#include "rdm/probspace.hpp"

namespace oracle {

using Matrix = std::vector<std::vector<double>>;

inline double binary_entropy(double p) {
  if (p <= 0.0 || p >= 1.0) return 0.0;
  return -p * std::log2(p) - (1.0 - p) * std::log2(1.0 - p);
}

inline Matrix rows_of(const rdm::Channel& c) {
  Matrix m(c.rows(), std::vector<double>(c.cols()));
  for (std::size_t i = 0; i < c.rows(); ++i) {
    for (std::size_t j = 0; j < c.cols(); ++j) m[i][j] = c(i, j);
  }
  return m;
}

inline Matrix joint(const rdm::FiniteDistribution& p, const rdm::Channel& c) {
  auto m = rows_of(c);
  for (std::size_t i = 0; i < m.size(); ++i) {
    for (double& v : m[i]) v *= p[i];
  }
  return m;
}

inline Matrix transpose(const Matrix& m) {
  Matrix t(m.empty() ? 0 : m[0].size(), std::vector<double>(m.size()));
  for (std::size_t i = 0; i < m.size(); ++i) {
    for (std::size_t j = 0; j < m[i].size(); ++j) t[j][i] = m[i][j];
  }
  return t;
}

/// I(A;B) in bits from a joint table: sum p(a,b) log p(a,b) / (p(a) p(b)).
inline double mi_from_joint(const Matrix& j) {
  std::vector<double> pa(j.size(), 0.0);
  std::vector<double> pb(j.empty() ? 0 : j[0].size(), 0.0);
  for (std::size_t a = 0; a < j.size(); ++a) {
    for (std::size_t b = 0; b < j[a].size(); ++b) {
      pa[a] += j[a][b];
      pb[b] += j[a][b];
    }
  }
  double mi = 0.0;
  for (std::size_t a = 0; a < j.size(); ++a) {
    for (std::size_t b = 0; b < j[a].size(); ++b) {
      if (j[a][b] > 0.0) mi += j[a][b] * std::log2(j[a][b] / (pa[a] * pb[b]));
    }
  }
  return mi;
}

inline double expected_distortion(const rdm::FiniteDistribution& p, const rdm::Channel& c,
                                  const rdm::DistortionMatrix& d) {
  double total = 0.0;
  for (std::size_t x = 0; x < c.rows(); ++x) {
    for (std::size_t y = 0; y < c.cols(); ++y) total += p[x] * c(x, y) * d(x, y);
  }
  return total;
}

/// Every deterministic channel (one output per input), as output tables.
inline void for_each_table(std::size_t n, std::size_t m, const std::function<void(const std::vector<std::size_t>&)>& f) {
  std::vector<std::size_t> t(n, 0);
  for (;;) {
    f(t);
    std::size_t i = 0;
    while (i < n && ++t[i] == m) t[i++] = 0;
    if (i == n) return;
  }
}

/// Smallest expected distortion over all deterministic channels.
inline double enumerated_d_min(const rdm::FiniteDistribution& p, const rdm::DistortionMatrix& d) {
  double best = INFINITY;
  for_each_table(d.rows(), d.cols(), [&](const std::vector<std::size_t>& t) {
    double v = 0.0;
    for (std::size_t x = 0; x < t.size(); ++x) v += p[x] * d(x, t[x]);
    best = std::min(best, v);
  });
  return best;
}

/// Smallest expected distortion over constant channels.
inline double enumerated_d_max(const rdm::FiniteDistribution& p, const rdm::DistortionMatrix& d) {
  double best = INFINITY;
  for (std::size_t y = 0; y < d.cols(); ++y) {
    double v = 0.0;
    for (std::size_t x = 0; x < d.rows(); ++x) v += p[x] * d(x, y);
    best = std::min(best, v);
  }
  return best;
}

/// R(D) of a uniform binary source with Hamming distortion.
inline double binary_hamming_rd(double d) { return d >= 0.5 ? 0.0 : 1.0 - binary_entropy(d); }

}  // namespace oracle
