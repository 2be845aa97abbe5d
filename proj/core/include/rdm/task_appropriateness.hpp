#pragma once

// Cluster separability of labeled features under squared Euclidean
// distortion: per-class spread, centroid distances and the ratio score rho.

#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "rdm/feature_io.hpp"

namespace rdm {

enum class FeatureMetric { MSE };

FeatureMetric parse_feature_metric(const std::string& text);

class DegenerateCluster : public std::domain_error {
 public:
  explicit DegenerateCluster(std::size_t class_id)
      : std::domain_error("class " + std::to_string(class_id) + " has zero intra-cluster distortion"),
        class_id_(class_id) {}
  std::size_t class_id() const noexcept { return class_id_; }

 private:
  std::size_t class_id_;
};

class ClassCountMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct AppropriatenessReport {
  std::size_t class_count = 0;
  std::size_t dimension = 0;
  /// C x C, row-major; the diagonal is NaN.
  std::vector<double> pair_scores;
  /// C x C squared centroid distances.
  std::vector<double> inter_distortions;
  std::vector<double> class_scores;
  std::vector<double> priors;
  std::vector<double> intra_distortions;
  /// C x dimension, row-major.
  std::vector<double> centroids;
  double rho = 0.0;

  double pair(std::size_t i, std::size_t j) const { return pair_scores[i * class_count + j]; }
};

/// Centroids are per-class sample means, spreads are biased (divide by the
/// class size). The result does not depend on sample order.
AppropriatenessReport compute_report(const LabeledFeatureSet& data, FeatureMetric metric = FeatureMetric::MSE);

struct DepthRow {
  std::string name;
  AppropriatenessReport report;
  /// rho >= rho of the previous row; empty for the first row.
  std::optional<bool> monotone_vs_prev;
};

/// All sets must share a class count; ClassCountMismatch names the first offender.
std::vector<DepthRow> depth_sweep(const std::vector<std::pair<std::string, LabeledFeatureSet>>& sets);

std::string report_to_json(const std::string& name, const AppropriatenessReport& report);

}  // namespace rdm
