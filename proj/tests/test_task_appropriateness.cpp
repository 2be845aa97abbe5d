#include <cmath>
#include <algorithm>
#include <numeric>
#include <random>

#include "doctest.h"
#include "json.hpp"
#include "rdm/task_appropriateness.hpp"

using namespace rdm;

namespace {

LabeledFeatureSet blobs(std::size_t classes, std::size_t per_class, std::size_t dim, double spread, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, spread);
  LabeledFeatureSet s;
  s.dimension = dim;
  s.class_count = classes;
  for (std::size_t c = 0; c < classes; ++c) {
    // per-class sizes differ so the priors are not uniform
    for (std::size_t i = 0; i < per_class + c; ++i) {
      for (std::size_t k = 0; k < dim; ++k) s.features.push_back(static_cast<double>((c + 1) * (k + 1) % 5) + noise(rng));
      s.labels.push_back(static_cast<std::uint32_t>(c));
    }
  }
  s.count = s.labels.size();
  return s;
}

// Straight definition: nested loops over the raw samples.
double oracle_rho(const LabeledFeatureSet& s) {
  const std::size_t C = s.class_count, d = s.dimension;
  std::vector<std::vector<double>> mu(C, std::vector<double>(d, 0.0));
  std::vector<double> n(C, 0.0);
  for (std::size_t i = 0; i < s.count; ++i) {
    n[s.labels[i]] += 1;
    for (std::size_t k = 0; k < d; ++k) mu[s.labels[i]][k] += s.features[i * d + k];
  }
  for (std::size_t c = 0; c < C; ++c) {
    for (auto& v : mu[c]) v /= n[c];
  }
  std::vector<double> intra(C, 0.0);
  for (std::size_t i = 0; i < s.count; ++i) {
    const auto c = s.labels[i];
    for (std::size_t k = 0; k < d; ++k) intra[c] += std::pow(s.features[i * d + k] - mu[c][k], 2) / n[c];
  }
  double rho = 0.0;
  for (std::size_t i = 0; i < C; ++i) {
    double best = INFINITY;
    for (std::size_t j = 0; j < C; ++j) {
      if (i == j) continue;
      double inter = 0.0;
      for (std::size_t k = 0; k < d; ++k) inter += std::pow(mu[i][k] - mu[j][k], 2);
      best = std::min(best, inter / std::sqrt(intra[i] * intra[j]));
    }
    rho += n[i] / static_cast<double>(s.count) * best;
  }
  return rho;
}

void rotate2d(LabeledFeatureSet& s, double angle) {
  for (std::size_t i = 0; i < s.count; ++i) {
    double x = s.features[2 * i], y = s.features[2 * i + 1];
    s.features[2 * i] = std::cos(angle) * x - std::sin(angle) * y;
    s.features[2 * i + 1] = std::sin(angle) * x + std::cos(angle) * y;
  }
}

}  // namespace

TEST_CASE("rho against the nested-loop definition") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    auto s = blobs(3 + seed % 3, 20, 3, 0.7, seed);
    auto r = compute_report(s);
    CHECK(r.rho == doctest::Approx(oracle_rho(s)).epsilon(1e-12));
    double total = 0.0;
    for (double p : r.priors) total += p;
    CHECK(total == doctest::Approx(1.0));
    CHECK(std::isnan(r.pair(0, 0)));
    CHECK(r.pair(0, 1) == r.pair(1, 0));
  }
}

TEST_CASE("two tight clusters") {
  LabeledFeatureSet s;
  s.dimension = 1;
  s.class_count = 2;
  s.features = {-1.0, 1.0, 9.0, 11.0};
  s.labels = {0, 0, 1, 1};
  s.count = 4;
  auto r = compute_report(s);
  // centroids 0 and 10, spreads 1 and 1
  CHECK(r.rho == doctest::Approx(100.0));
  CHECK(r.centroids[1] == doctest::Approx(10.0));
}

TEST_CASE("invariances") {
  auto s = blobs(3, 25, 2, 0.5, 42);
  const double base = compute_report(s).rho;

  auto rotated = s;
  rotate2d(rotated, 0.7);
  CHECK(compute_report(rotated).rho == doctest::Approx(base).epsilon(1e-10));

  auto scaled = s;
  for (auto& v : scaled.features) v *= 3.5;
  CHECK(compute_report(scaled).rho == doctest::Approx(base).epsilon(1e-10));

  auto shifted = s;
  for (std::size_t i = 0; i < shifted.count; ++i) shifted.features[2 * i] += 100.0;
  CHECK(compute_report(shifted).rho == doctest::Approx(base).epsilon(1e-9));

  auto permuted = s;
  std::mt19937_64 rng(1);
  std::vector<std::size_t> order(s.count);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  for (std::size_t i = 0; i < s.count; ++i) {
    permuted.labels[i] = s.labels[order[i]];
    permuted.features[2 * i] = s.features[2 * order[i]];
    permuted.features[2 * i + 1] = s.features[2 * order[i] + 1];
  }
  CHECK(compute_report(permuted).rho == base);
}

TEST_CASE("tiny jitter gives rho near 1/eps^2") {
  for (double eps : {1e-2, 1e-3}) {
    LabeledFeatureSet s;
    s.dimension = 1;
    s.class_count = 2;
    s.features = {-eps, eps, 1.0 - eps, 1.0 + eps};
    s.labels = {0, 0, 1, 1};
    s.count = 4;
    CHECK(compute_report(s).rho == doctest::Approx(1.0 / (eps * eps)).epsilon(1e-9));
  }
}

TEST_CASE("degenerate cluster") {
  LabeledFeatureSet s;
  s.dimension = 1;
  s.class_count = 2;
  s.features = {1.0, 1.0, 2.0, 3.0};
  s.labels = {0, 0, 1, 1};
  s.count = 4;
  try {
    compute_report(s);
    FAIL("expected DegenerateCluster");
  } catch (const DegenerateCluster& e) {
    CHECK(e.class_id() == 0);
  }
}

TEST_CASE("depth sweep") {
  auto a = blobs(2, 10, 2, 1.0, 1);
  auto b = blobs(2, 10, 2, 0.1, 1);
  auto rows = depth_sweep({{"shallow", a}, {"deep", b}});
  REQUIRE(rows.size() == 2);
  CHECK_FALSE(rows[0].monotone_vs_prev.has_value());
  CHECK(rows[1].monotone_vs_prev == true);
  auto c = blobs(3, 10, 2, 0.1, 1);
  CHECK_THROWS_AS(depth_sweep({{"a", a}, {"c", c}}), ClassCountMismatch);
  CHECK_THROWS(parse_feature_metric("cosine"));
}

TEST_CASE("report JSON") {
  auto r = compute_report(blobs(2, 5, 2, 1.0, 3));
  auto j = nlohmann::json::parse(report_to_json("layer", r));
  CHECK(j["name"] == "layer");
  CHECK(j["rho"].get<double>() == doctest::Approx(r.rho).epsilon(1e-11));
  CHECK(j["pair_scores"][0][0].is_null());
}
