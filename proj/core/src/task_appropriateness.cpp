#include "rdm/task_appropriateness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "json.hpp"
#include "rdm/output.hpp"
#include "rdm/parallel.hpp"

namespace rdm {

FeatureMetric parse_feature_metric(const std::string& text) {
  if (text == "mse") return FeatureMetric::MSE;
  throw std::invalid_argument("unknown feature metric '" + text + "' (only mse is supported)");
}

AppropriatenessReport compute_report(const LabeledFeatureSet& data, FeatureMetric metric) {
  if (metric != FeatureMetric::MSE) throw std::invalid_argument("unsupported feature metric");
  data.validate();
  const std::size_t C = data.class_count;
  const std::size_t d = data.dimension;

  std::vector<std::vector<std::size_t>> members(C);
  for (std::size_t i = 0; i < data.count; ++i) members[data.labels[i]].push_back(i);

  AppropriatenessReport r;
  r.class_count = C;
  r.dimension = d;
  r.centroids.assign(C * d, 0.0);
  r.intra_distortions.assign(C, 0.0);
  r.priors.assign(C, 0.0);

  parallel_for(C, [&](std::size_t c) {
    auto& idx = members[c];
    // A canonical summation order makes the report independent of sample order.
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
      const auto sa = data.sample(a);
      const auto sb = data.sample(b);
      return std::lexicographical_compare(sa.begin(), sa.end(), sb.begin(), sb.end());
    });
    const double n = static_cast<double>(idx.size());
    double* mu = r.centroids.data() + c * d;
    for (std::size_t i : idx) {
      const auto s = data.sample(i);
      for (std::size_t k = 0; k < d; ++k) mu[k] += s[k];
    }
    for (std::size_t k = 0; k < d; ++k) mu[k] /= n;
    double spread = 0.0;
    for (std::size_t i : idx) {
      const auto s = data.sample(i);
      for (std::size_t k = 0; k < d; ++k) spread += (s[k] - mu[k]) * (s[k] - mu[k]);
    }
    r.intra_distortions[c] = spread / n;
    r.priors[c] = n / static_cast<double>(data.count);
  });

  for (std::size_t c = 0; c < C; ++c) {
    if (!(r.intra_distortions[c] > 0.0)) throw DegenerateCluster(c);
  }

  const double nan = std::numeric_limits<double>::quiet_NaN();
  r.pair_scores.assign(C * C, nan);
  r.inter_distortions.assign(C * C, 0.0);
  r.class_scores.assign(C, std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < C; ++i) {
    for (std::size_t j = 0; j < C; ++j) {
      if (i == j) continue;
      double dist = 0.0;
      for (std::size_t k = 0; k < d; ++k) {
        const double diff = r.centroids[i * d + k] - r.centroids[j * d + k];
        dist += diff * diff;
      }
      r.inter_distortions[i * C + j] = dist;
      const double score = dist / std::sqrt(r.intra_distortions[i] * r.intra_distortions[j]);
      r.pair_scores[i * C + j] = score;
      r.class_scores[i] = std::min(r.class_scores[i], score);
    }
  }
  if (C == 1) r.class_scores[0] = 0.0;
  for (std::size_t i = 0; i < C; ++i) r.rho += r.priors[i] * r.class_scores[i];
  return r;
}

std::vector<DepthRow> depth_sweep(const std::vector<std::pair<std::string, LabeledFeatureSet>>& sets) {
  for (std::size_t k = 1; k < sets.size(); ++k) {
    if (sets[k].second.class_count != sets[0].second.class_count) {
      throw ClassCountMismatch("'" + sets[0].first + "' has " + std::to_string(sets[0].second.class_count) +
                               " classes but '" + sets[k].first + "' has " +
                               std::to_string(sets[k].second.class_count));
    }
  }
  std::vector<DepthRow> rows;
  for (const auto& [name, set] : sets) {
    DepthRow row{name, compute_report(set), std::nullopt};
    if (!rows.empty()) row.monotone_vs_prev = row.report.rho >= rows.back().report.rho;
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string report_to_json(const std::string& name, const AppropriatenessReport& r) {
  using nlohmann::ordered_json;
  auto num = [](double v) -> ordered_json {
    if (std::isnan(v)) return nullptr;
    return round_significant(v);
  };
  auto vec = [&](const std::vector<double>& v) {
    ordered_json a = ordered_json::array();
    for (double x : v) a.push_back(num(x));
    return a;
  };
  auto matrix = [&](const std::vector<double>& v, std::size_t cols) {
    ordered_json a = ordered_json::array();
    for (std::size_t i = 0; i * cols < v.size(); ++i) {
      a.push_back(vec(std::vector<double>(v.begin() + i * cols, v.begin() + (i + 1) * cols)));
    }
    return a;
  };
  ordered_json j;
  j["name"] = name;
  j["metric"] = "mse";
  j["rho"] = num(r.rho);
  j["class_count"] = r.class_count;
  j["dimension"] = r.dimension;
  j["priors"] = vec(r.priors);
  j["class_scores"] = vec(r.class_scores);
  j["intra_distortions"] = vec(r.intra_distortions);
  j["pair_scores"] = matrix(r.pair_scores, r.class_count);
  j["inter_distortions"] = matrix(r.inter_distortions, r.class_count);
  if (r.dimension <= 64) j["centroids"] = matrix(r.centroids, r.dimension);
  return j.dump(2) + "\n";
}

}  // namespace rdm
