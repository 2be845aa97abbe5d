#pragma once

// Bjontegaard-Delta comparison of two rate/metric curves.

#include <filesystem>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace rdm {

struct RateMetricPoint {
  double rate = 0.0;
  double metric = 0.0;
};

class InsufficientPoints : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class NoOverlap : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class RateMetricCurve {
 public:
  inline static constexpr std::size_t kMinPoints = 4;

  /// Sorts by rate. Rates must be finite, positive and distinct; metrics finite.
  explicit RateMetricCurve(std::vector<RateMetricPoint> points);

  const std::vector<RateMetricPoint>& points() const noexcept { return points_; }
  std::size_t size() const noexcept { return points_.size(); }
  /// True when the metric never decreases as the rate grows.
  bool metric_monotone() const;

 private:
  std::vector<RateMetricPoint> points_;
};

enum class BDMode { Rate, Metric };
enum class BDFit { Cubic, Pchip };

std::string to_string(BDMode mode);
std::string to_string(BDFit fit);
BDMode parse_bd_mode(const std::string& text);
BDFit parse_bd_fit(const std::string& text);

struct BDResult {
  BDMode mode = BDMode::Rate;
  BDFit fit = BDFit::Cubic;
  /// Average test-minus-anchor difference of the fitted variable
  /// (log10 rate for Rate mode, metric for Metric mode).
  double delta_average = 0.0;
  /// Set for Rate mode: (10^delta - 1) * 100.
  double bd_rate_percent = 0.0;
  /// Set for Metric mode.
  double bd_metric = 0.0;
  /// Integration range: metric values (Rate mode) or log10 rates (Metric mode).
  std::pair<double, double> overlap{0.0, 0.0};
};

/// log10(rate) fitted against the metric, integrated over the common metric range.
BDResult bd_rate(const RateMetricCurve& anchor, const RateMetricCurve& test, BDFit fit = BDFit::Cubic);
/// The metric fitted against log10(rate), integrated over the common log-rate range.
BDResult bd_metric(const RateMetricCurve& anchor, const RateMetricCurve& test, BDFit fit = BDFit::Cubic);

/// Mean of a fitted curve over [lo, hi]; exposed for testing the fits.
double fitted_average(const std::vector<double>& x, const std::vector<double>& y, BDFit fit, double lo, double hi);

struct LoadedCurve {
  RateMetricCurve curve;
  std::vector<std::string> warnings;
};

/// CSV with a header row. Errors name the offending row (1-based, header = 1).
LoadedCurve parse_curve_csv(const std::string& text, const std::string& rate_column = "rate",
                            const std::string& metric_column = "metric");
LoadedCurve load_curve(const std::filesystem::path& path, const std::string& rate_column = "rate",
                       const std::string& metric_column = "metric");

/// {"bd_rate_percent", "bd_metric", "overlap", "mode", "fit"}; the unused
/// quantity of the two is null.
std::string bd_result_to_json(const BDResult& result);

}  // namespace rdm
