#include "rdm/bd_metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include <Eigen/Dense>

#include "json.hpp"
#include "rdm/output.hpp"

namespace rdm {

namespace {

// Least-squares cubic in the scaled variable t = (x - centre) / scale.
struct Cubic {
  double centre = 0.0;
  double scale = 1.0;
  Eigen::Vector4d coef = Eigen::Vector4d::Zero();

  double antiderivative(double x) const {
    const double t = (x - centre) / scale;
    double acc = 0.0;
    double power = t;
    for (int k = 0; k < 4; ++k) {
      acc += coef[k] * power / (k + 1);
      power *= t;
    }
    return acc * scale;
  }
};

Cubic fit_cubic(const std::vector<double>& x, const std::vector<double>& y) {
  Cubic c;
  const auto [lo, hi] = std::minmax_element(x.begin(), x.end());
  c.centre = 0.5 * (*lo + *hi);
  c.scale = std::max(0.5 * (*hi - *lo), 1e-300);
  Eigen::MatrixXd a(x.size(), 4);
  Eigen::VectorXd b(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double t = (x[i] - c.centre) / c.scale;
    a(i, 0) = 1.0;
    a(i, 1) = t;
    a(i, 2) = t * t;
    a(i, 3) = t * t * t;
    b[i] = y[i];
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
  if (qr.rank() < 4) throw std::invalid_argument("cubic fit is rank deficient (too few distinct abscissae)");
  c.coef = qr.solve(b);
  return c;
}

double cubic_integral(const std::vector<double>& x, const std::vector<double>& y, double lo, double hi) {
  const auto c = fit_cubic(x, y);
  return c.antiderivative(hi) - c.antiderivative(lo);
}

// Shape-preserving end slope (three-point formula with the usual clamps).
double pchip_end_slope(double h0, double h1, double d0, double d1) {
  double s = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
  if (std::signbit(s) != std::signbit(d0) || s == 0.0) return 0.0;
  if (std::signbit(d0) != std::signbit(d1) && std::abs(s) > std::abs(3.0 * d0)) return 3.0 * d0;
  return s;
}

double pchip_integral(std::vector<double> x, std::vector<double> y, double lo, double hi) {
  std::vector<std::size_t> order(x.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
  std::vector<double> xs, ys;
  for (auto i : order) {
    xs.push_back(x[i]);
    ys.push_back(y[i]);
  }
  const std::size_t n = xs.size();
  std::vector<double> h(n - 1), delta(n - 1);
  for (std::size_t k = 0; k + 1 < n; ++k) {
    h[k] = xs[k + 1] - xs[k];
    if (!(h[k] > 0.0)) throw std::invalid_argument("pchip fit needs distinct abscissae");
    delta[k] = (ys[k + 1] - ys[k]) / h[k];
  }
  std::vector<double> d(n, 0.0);
  for (std::size_t k = 1; k + 1 < n; ++k) {
    if (delta[k - 1] * delta[k] > 0.0) {
      const double w1 = 2.0 * h[k] + h[k - 1];
      const double w2 = h[k] + 2.0 * h[k - 1];
      d[k] = (w1 + w2) / (w1 / delta[k - 1] + w2 / delta[k]);
    }
  }
  if (n == 2) {
    d[0] = d[1] = delta[0];
  } else {
    d[0] = pchip_end_slope(h[0], h[1], delta[0], delta[1]);
    d[n - 1] = pchip_end_slope(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
  }

  // Antiderivatives of the Hermite basis on t in [0, 1].
  auto integrate = [&](std::size_t k, double a, double b) {
    auto prim = [&](double t) {
      const double t2 = t * t, t3 = t2 * t, t4 = t3 * t;
      const double h00 = t4 / 2 - t3 + t;
      const double h10 = t4 / 4 - 2 * t3 / 3 + t2 / 2;
      const double h01 = -t4 / 2 + t3;
      const double h11 = t4 / 4 - t3 / 3;
      return h[k] * (h00 * ys[k] + h10 * h[k] * d[k] + h01 * ys[k + 1] + h11 * h[k] * d[k + 1]);
    };
    return prim((b - xs[k]) / h[k]) - prim((a - xs[k]) / h[k]);
  };
  double total = 0.0;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    const double a = std::max(lo, xs[k]);
    const double b = std::min(hi, xs[k + 1]);
    if (b > a) total += integrate(k, a, b);
  }
  return total;
}

struct Series {
  std::vector<double> x;
  std::vector<double> y;
};

Series series(const RateMetricCurve& c, BDMode mode) {
  Series s;
  for (const auto& p : c.points()) {
    const double lr = std::log10(p.rate);
    s.x.push_back(mode == BDMode::Rate ? p.metric : lr);
    s.y.push_back(mode == BDMode::Rate ? lr : p.metric);
  }
  return s;
}

BDResult compare(const RateMetricCurve& anchor, const RateMetricCurve& test, BDMode mode, BDFit fit) {
  if (anchor.size() < RateMetricCurve::kMinPoints || test.size() < RateMetricCurve::kMinPoints) {
    throw InsufficientPoints("BD comparison needs at least 4 points per curve");
  }
  const auto a = series(anchor, mode);
  const auto t = series(test, mode);
  const auto [alo, ahi] = std::minmax_element(a.x.begin(), a.x.end());
  const auto [tlo, thi] = std::minmax_element(t.x.begin(), t.x.end());
  const double lo = std::max(*alo, *tlo);
  const double hi = std::min(*ahi, *thi);
  if (!(hi > lo)) {
    throw NoOverlap(std::string("no overlap between the curves' ") + (mode == BDMode::Rate ? "metric" : "rate") +
                    " ranges; insufficient overlap to calculate BD-metrics");
  }
  BDResult r;
  r.mode = mode;
  r.fit = fit;
  r.overlap = {lo, hi};
  r.delta_average = fitted_average(t.x, t.y, fit, lo, hi) - fitted_average(a.x, a.y, fit, lo, hi);
  if (mode == BDMode::Rate) {
    r.bd_rate_percent = (std::pow(10.0, r.delta_average) - 1.0) * 100.0;
  } else {
    r.bd_metric = r.delta_average;
  }
  return r;
}

std::vector<std::string> split_cells(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) {
    const auto b = cell.find_first_not_of(" \t");
    const auto e = cell.find_last_not_of(" \t");
    cells.push_back(b == std::string::npos ? std::string() : cell.substr(b, e - b + 1));
  }
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

}  // namespace

RateMetricCurve::RateMetricCurve(std::vector<RateMetricPoint> points) : points_(std::move(points)) {
  if (points_.size() < kMinPoints) {
    throw InsufficientPoints("a rate-metric curve needs at least " + std::to_string(kMinPoints) + " points, got " +
                             std::to_string(points_.size()));
  }
  for (const auto& p : points_) {
    if (!(p.rate > 0.0) || !std::isfinite(p.rate)) throw std::invalid_argument("rates must be finite and positive");
    if (!std::isfinite(p.metric)) throw std::invalid_argument("metric values must be finite");
  }
  std::sort(points_.begin(), points_.end(), [](const auto& a, const auto& b) { return a.rate < b.rate; });
  for (std::size_t i = 1; i < points_.size(); ++i) {
    if (points_[i].rate == points_[i - 1].rate) {
      throw std::invalid_argument("duplicate rate " + format_number(points_[i].rate) + " in curve");
    }
  }
}

bool RateMetricCurve::metric_monotone() const {
  for (std::size_t i = 1; i < points_.size(); ++i) {
    if (points_[i].metric < points_[i - 1].metric) return false;
  }
  return true;
}

std::string to_string(BDMode mode) { return mode == BDMode::Rate ? "rate" : "metric"; }
std::string to_string(BDFit fit) { return fit == BDFit::Cubic ? "cubic" : "pchip"; }

BDMode parse_bd_mode(const std::string& text) {
  if (text == "rate") return BDMode::Rate;
  if (text == "metric") return BDMode::Metric;
  throw std::invalid_argument("unknown BD mode '" + text + "' (expected rate or metric)");
}

BDFit parse_bd_fit(const std::string& text) {
  if (text == "cubic") return BDFit::Cubic;
  if (text == "pchip") return BDFit::Pchip;
  throw std::invalid_argument("unknown BD fit '" + text + "' (expected cubic or pchip)");
}

double fitted_average(const std::vector<double>& x, const std::vector<double>& y, BDFit fit, double lo, double hi) {
  if (!(hi > lo)) throw std::invalid_argument("fitted_average needs lo < hi");
  const double integral = fit == BDFit::Cubic ? cubic_integral(x, y, lo, hi) : pchip_integral(x, y, lo, hi);
  return integral / (hi - lo);
}

BDResult bd_rate(const RateMetricCurve& anchor, const RateMetricCurve& test, BDFit fit) {
  return compare(anchor, test, BDMode::Rate, fit);
}

BDResult bd_metric(const RateMetricCurve& anchor, const RateMetricCurve& test, BDFit fit) {
  return compare(anchor, test, BDMode::Metric, fit);
}

LoadedCurve parse_curve_csv(const std::string& text, const std::string& rate_column,
                            const std::string& metric_column) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument("curve CSV is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = split_cells(line);
  auto column = [&](const std::string& name) {
    auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw std::invalid_argument("curve CSV has no column '" + name + "'");
    return static_cast<std::size_t>(it - header.begin());
  };
  const auto rc = column(rate_column);
  const auto mc = column(metric_column);

  std::vector<RateMetricPoint> pts;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    const auto cells = split_cells(line);
    if (cells.size() != header.size()) {
      throw std::invalid_argument("row " + std::to_string(row) + ": expected " + std::to_string(header.size()) +
                                  " cells, got " + std::to_string(cells.size()));
    }
    auto number = [&](std::size_t c) {
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(cells[c], &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used == 0 || used != cells[c].size() || !std::isfinite(v)) {
        throw std::invalid_argument("row " + std::to_string(row) + ": '" + cells[c] + "' in column '" + header[c] +
                                    "' is not a finite number");
      }
      return v;
    };
    const double rate = number(rc);
    if (!(rate > 0.0)) throw std::invalid_argument("row " + std::to_string(row) + ": rate must be positive");
    pts.push_back({rate, number(mc)});
  }
  LoadedCurve out{RateMetricCurve(std::move(pts)), {}};
  if (!out.curve.metric_monotone()) out.warnings.push_back("metric is not monotone in rate");
  return out;
}

LoadedCurve load_curve(const std::filesystem::path& path, const std::string& rate_column,
                       const std::string& metric_column) {
  return parse_curve_csv(read_file(path), rate_column, metric_column);
}

std::string bd_result_to_json(const BDResult& r) {
  nlohmann::ordered_json j;
  if (r.mode == BDMode::Rate) {
    j["bd_rate_percent"] = round_significant(r.bd_rate_percent);
    j["bd_metric"] = nullptr;
  } else {
    j["bd_rate_percent"] = nullptr;
    j["bd_metric"] = round_significant(r.bd_metric);
  }
  j["overlap"] = {round_significant(r.overlap.first), round_significant(r.overlap.second)};
  j["mode"] = to_string(r.mode);
  j["fit"] = to_string(r.fit);
  return j.dump() + "\n";
}

}  // namespace rdm
