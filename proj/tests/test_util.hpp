#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "rdm/probspace.hpp"

namespace testutil {

inline rdm::FiniteDistribution random_distribution(std::mt19937_64& rng, std::size_t n, double floor = 0.05) {
  std::uniform_real_distribution<double> u(floor, 1.0);
  std::vector<double> m(n);
  double total = 0.0;
  for (auto& v : m) total += (v = u(rng));
  for (auto& v : m) v /= total;
  return rdm::FiniteDistribution(rdm::Alphabet(n), m, 1e-10);
}

inline rdm::Channel random_channel(std::mt19937_64& rng, std::size_t n, std::size_t m) {
  std::exponential_distribution<double> e(1.0);
  std::vector<double> v(n * m);
  for (std::size_t r = 0; r < n; ++r) {
    double total = 0.0;
    for (std::size_t c = 0; c < m; ++c) total += (v[r * m + c] = e(rng));
    for (std::size_t c = 0; c < m; ++c) v[r * m + c] /= total;
  }
  return rdm::Channel(rdm::Alphabet(n), rdm::Alphabet(m), v, 1e-10);
}

inline rdm::DistortionMatrix random_distortion(std::mt19937_64& rng, std::size_t n, std::size_t m) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> v(n * m);
  for (auto& x : v) x = u(rng);
  return rdm::DistortionMatrix(rdm::Alphabet(n), rdm::Alphabet(m), v);
}

inline rdm::DeterministicMap random_map(std::mt19937_64& rng, std::size_t n, std::size_t m) {
  std::vector<std::size_t> t(n);
  for (auto& x : t) x = rng() % m;
  return rdm::DeterministicMap(rdm::Alphabet(n), rdm::Alphabet(m), t);
}

inline double row_sum_error(const rdm::Channel& c) {
  double worst = 0.0;
  for (std::size_t r = 0; r < c.rows(); ++r) {
    double s = 0.0;
    for (double v : c.row(r)) s += v;
    worst = std::max(worst, std::abs(s - 1.0));
  }
  return worst;
}

}  // namespace testutil
