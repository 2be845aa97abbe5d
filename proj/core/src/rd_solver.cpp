#include "rdm/rd_solver.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace rdm {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Points above the chord of their neighbours by more than this are dropped.
constexpr double kHullTol = 1e-12;

void require_pair(const FiniteDistribution& source, const DistortionMatrix& d) {
  if (!(source.alphabet() == d.row_alphabet())) {
    throw AlphabetMismatch("source alphabet does not match the distortion matrix rows");
  }
}

std::vector<double> row_minima(const DistortionMatrix& d) {
  std::vector<double> out(d.rows());
  for (std::size_t x = 0; x < d.rows(); ++x) {
    double m = kInf;
    for (std::size_t j = 0; j < d.cols(); ++j) m = std::min(m, d(x, j));
    out[x] = m;
  }
  return out;
}

std::vector<double> column_expectations(const FiniteDistribution& source, const DistortionMatrix& d) {
  std::vector<double> out(d.cols(), 0.0);
  for (std::size_t x = 0; x < d.rows(); ++x) {
    for (std::size_t j = 0; j < d.cols(); ++j) out[j] += source[x] * d(x, j);
  }
  return out;
}

RDPoint finish(const FiniteDistribution& source, const DistortionMatrix& d, Channel channel, double slope,
               std::size_t iterations) {
  const double rate = mutual_information(source, channel);
  const double dist = expected_distortion(source, channel, d);
  return RDPoint{rate, dist, slope, std::move(channel), iterations};
}

// Renormalizes after pruning tiny masses to exact zeros.
void prune(std::vector<double>& q, double floor) {
  double total = 0.0;
  for (double& v : q) {
    if (v < floor) v = 0.0;
    total += v;
  }
  for (double& v : q) v /= total;
}

std::vector<RDPoint> canonicalize(std::vector<RDPoint> pts) {
  std::stable_sort(pts.begin(), pts.end(), [](const RDPoint& a, const RDPoint& b) {
    if (a.distortion != b.distortion) return a.distortion < b.distortion;
    return a.rate < b.rate;
  });
  std::vector<RDPoint> mono;
  for (auto& p : pts) {
    if (!mono.empty() && (p.distortion == mono.back().distortion || p.rate >= mono.back().rate)) continue;
    mono.push_back(std::move(p));
  }
  std::vector<RDPoint> hull;
  for (auto& p : mono) {
    while (hull.size() >= 2) {
      const auto& a = hull[hull.size() - 2];
      const auto& b = hull.back();
      const double t = (b.distortion - a.distortion) / (p.distortion - a.distortion);
      const double chord = a.rate + t * (p.rate - a.rate);
      if (b.rate - chord > kHullTol) {
        hull.pop_back();
      } else {
        break;
      }
    }
    hull.push_back(std::move(p));
  }
  return hull;
}

}  // namespace

// ---------------------------------------------------------------------------

RDSolverConfig RDSolverConfig::defaults() {
  RDSolverConfig c;
  c.slope_grid = log_grid(1e-3, 1e3, 64);
  return c;
}

std::vector<double> RDSolverConfig::log_grid(double lo, double hi, std::size_t count) {
  if (!(lo > 0.0) || !(hi > lo) || count < 2) throw std::invalid_argument("log_grid: need 0 < lo < hi, count >= 2");
  std::vector<double> g(count);
  const double a = std::log(lo);
  const double b = std::log(hi);
  for (std::size_t i = 0; i < count; ++i) {
    g[i] = std::exp(a + (b - a) * static_cast<double>(i) / static_cast<double>(count - 1));
  }
  return g;
}

void RDSolverConfig::validate() const {
  if (slope_grid.empty()) throw std::invalid_argument("slope grid must not be empty");
  for (std::size_t i = 0; i < slope_grid.size(); ++i) {
    if (!(slope_grid[i] >= 0.0) || !std::isfinite(slope_grid[i])) {
      throw std::invalid_argument("slopes must be finite and non-negative");
    }
    if (i > 0 && !(slope_grid[i] > slope_grid[i - 1])) {
      throw std::invalid_argument("slope grid must be strictly increasing");
    }
  }
  if (max_iterations == 0) throw std::invalid_argument("max_iterations must be positive");
  if (!(convergence_tol > 0.0)) throw std::invalid_argument("convergence tolerance must be positive");
  if (!(support_prune_tol >= 0.0)) throw std::invalid_argument("support prune tolerance must be non-negative");
}

// ---------------------------------------------------------------------------

RDCurve::RDCurve(std::vector<RDPoint> points, std::string label)
    : points_(std::move(points)), label_(std::move(label)) {
  for (std::size_t i = 1; i < points_.size(); ++i) {
    if (!(points_[i].distortion > points_[i - 1].distortion)) {
      throw std::invalid_argument("curve points must be sorted by strictly increasing distortion");
    }
  }
}

double RDCurve::rate_at(double distortion) const {
  if (points_.empty()) throw std::logic_error("rate_at on an empty curve");
  const double lo = points_.front().distortion;
  const double scale = std::max(1.0, std::abs(lo));
  if (distortion < lo - 1e-12 * scale) {
    std::ostringstream os;
    os << "distortion " << distortion << " is below the minimum achievable " << lo;
    throw std::domain_error(os.str());
  }
  if (distortion <= lo) return points_.front().rate;
  if (distortion >= points_.back().distortion) return points_.back().rate;
  auto it = std::upper_bound(points_.begin(), points_.end(), distortion,
                             [](double v, const RDPoint& p) { return v < p.distortion; });
  const auto& b = *it;
  const auto& a = *(it - 1);
  const double t = (distortion - a.distortion) / (b.distortion - a.distortion);
  return a.rate + t * (b.rate - a.rate);
}

// ---------------------------------------------------------------------------

double d_max(const FiniteDistribution& source, const DistortionMatrix& d) {
  require_pair(source, d);
  auto cols = column_expectations(source, d);
  return *std::min_element(cols.begin(), cols.end());
}

double d_min(const FiniteDistribution& source, const DistortionMatrix& d) {
  require_pair(source, d);
  auto mins = row_minima(d);
  double total = 0.0;
  for (std::size_t x = 0; x < mins.size(); ++x) total += source[x] * mins[x];
  return total;
}

RDPoint zero_rate_point(const FiniteDistribution& source, const DistortionMatrix& d) {
  require_pair(source, d);
  auto cols = column_expectations(source, d);
  const auto best = static_cast<std::size_t>(std::min_element(cols.begin(), cols.end()) - cols.begin());
  auto channel = Channel::constant(d.row_alphabet(), d.col_alphabet(), best);
  return RDPoint{0.0, expected_distortion(source, channel, d), 0.0, std::move(channel), 0};
}

RDPoint blahut_arimoto(const FiniteDistribution& source, const DistortionMatrix& d, double slope,
                       const RDSolverConfig& config) {
  require_pair(source, d);
  if (!(slope >= 0.0) || !std::isfinite(slope)) throw std::invalid_argument("slope must be finite and non-negative");
  if (slope == 0.0) return zero_rate_point(source, d);

  const std::size_t n = d.rows();
  const std::size_t m = d.cols();
  const auto rmin = row_minima(d);

  // Below the critical slope the constant channel is optimal: it is a fixed
  // point whose dual certificate sum_x p(x) exp(-s (d(x,j) - d(x,j*))) <= 1
  // holds for every letter j. Iterating towards it decays like exp(-s dd).
  {
    auto zero = zero_rate_point(source, d);
    std::size_t star = 0;
    while (zero.channel(0, star) != 1.0) ++star;
    bool optimal = true;
    for (std::size_t j = 0; j < m && optimal; ++j) {
      double c = 0.0;
      for (std::size_t x = 0; x < n; ++x) c += source[x] * std::exp(-slope * (d(x, j) - d(x, star)));
      optimal = c <= 1.0;
    }
    if (optimal) {
      zero.slope = slope;
      return zero;
    }
  }

  // Shifted kernel exp(-s (d - rowmin)) has a 1 in every row.
  std::vector<double> kernel(n * m);
  for (std::size_t x = 0; x < n; ++x) {
    for (std::size_t j = 0; j < m; ++j) kernel[x * m + j] = std::exp(-slope * (d(x, j) - rmin[x]));
  }

  std::vector<double> q(m, 1.0 / static_cast<double>(m));
  std::vector<double> rows(n * m);
  std::vector<double> factor(m);
  std::vector<double> log_lambda(n);
  std::vector<double> next(m);
  double previous = kInf;
  double residual = kInf;

  for (std::size_t it = 1; it <= config.max_iterations; ++it) {
    double functional = 0.0;
    std::fill(factor.begin(), factor.end(), 0.0);
    for (std::size_t x = 0; x < n; ++x) {
      double* row = rows.data() + x * m;
      const double* k = kernel.data() + x * m;
      double lambda = 0.0;
      for (std::size_t j = 0; j < m; ++j) lambda += q[j] * k[j];
      const double px = source[x];
      if (lambda > 1e-250) {
        const double inv = 1.0 / lambda;
        for (std::size_t j = 0; j < m; ++j) row[j] = q[j] * k[j] * inv;
        log_lambda[x] = std::log(lambda);
        if (px != 0.0) {
          for (std::size_t j = 0; j < m; ++j) factor[j] += px * k[j] * inv;
        }
      } else {
        // Every supported letter is far from the row minimum: work in logs.
        double top = -kInf;
        for (std::size_t j = 0; j < m; ++j) {
          if (q[j] > 0.0) top = std::max(top, std::log(q[j]) - slope * (d(x, j) - rmin[x]));
        }
        double acc = 0.0;
        for (std::size_t j = 0; j < m; ++j) {
          if (q[j] > 0.0) acc += std::exp(std::log(q[j]) - slope * (d(x, j) - rmin[x]) - top);
        }
        log_lambda[x] = top + std::log(acc);
        for (std::size_t j = 0; j < m; ++j) {
          row[j] = q[j] > 0.0 ? std::exp(std::log(q[j]) - slope * (d(x, j) - rmin[x]) - log_lambda[x]) : 0.0;
          // kernel / lambda is also defined for letters with q_j == 0
          if (px != 0.0) factor[j] += px * std::exp(-slope * (d(x, j) - rmin[x]) - log_lambda[x]);
        }
      }
      if (px == 0.0) continue;
      // I(rows; q) + s D collapses to s rowmin - ln lambda per row.
      functional += px * (slope * rmin[x] - log_lambda[x]);
    }
    functional /= std::numbers::ln2;

    double top_log = -kInf;
    double mean_log = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      next[j] = q[j] * factor[j];
      if (factor[j] > 0.0) {
        const double lf = std::log(factor[j]);
        top_log = std::max(top_log, lf);
        if (next[j] > 0.0) mean_log += next[j] * lf;
      }
    }
    const double gap = (top_log - mean_log) / std::numbers::ln2;
    const double change = std::abs(functional - previous);
    residual = std::min(change, gap);
    previous = functional;

    if (change < config.convergence_tol || gap < config.convergence_tol) {
      Channel channel(d.row_alphabet(), d.col_alphabet(), std::move(rows), kArithmeticTol);
      return finish(source, d, std::move(channel), slope, it);
    }
    std::swap(q, next);
    prune(q, config.support_prune_tol);
  }

  Channel channel(d.row_alphabet(), d.col_alphabet(), std::move(rows), kArithmeticTol);
  auto last = finish(source, d, std::move(channel), slope, config.max_iterations);
  std::ostringstream os;
  os << "Blahut-Arimoto did not converge at slope " << slope << " within " << config.max_iterations
     << " iterations (residual " << residual << ")";
  throw NonConvergence(os.str(), std::move(last), residual);
}

RDPoint min_distortion_point(const FiniteDistribution& source, const DistortionMatrix& d,
                             const RDSolverConfig& config) {
  require_pair(source, d);
  const std::size_t n = d.rows();
  const std::size_t m = d.cols();
  const auto rmin = row_minima(d);
  std::vector<char> allowed(n * m);
  for (std::size_t x = 0; x < n; ++x) {
    for (std::size_t j = 0; j < m; ++j) allowed[x * m + j] = d(x, j) <= rmin[x];
  }

  // Blahut-Arimoto with infinite distortion outside the row minima.
  std::vector<double> q(m, 1.0 / static_cast<double>(m));
  std::vector<double> rows(n * m);
  std::vector<double> factor(m);
  double previous = kInf;
  double residual = kInf;
  for (std::size_t it = 1; it <= config.max_iterations; ++it) {
    std::fill(factor.begin(), factor.end(), 0.0);
    double functional = 0.0;
    for (std::size_t x = 0; x < n; ++x) {
      double lambda = 0.0;
      std::size_t count = 0;
      for (std::size_t j = 0; j < m; ++j) {
        if (allowed[x * m + j]) {
          lambda += q[j];
          ++count;
        }
      }
      for (std::size_t j = 0; j < m; ++j) {
        const bool ok = allowed[x * m + j];
        rows[x * m + j] = !ok ? 0.0 : (lambda > 0.0 ? q[j] / lambda : 1.0 / static_cast<double>(count));
      }
      if (source[x] == 0.0) continue;
      if (!(lambda > 0.0)) throw std::logic_error("restricted solver lost the support of a row");
      for (std::size_t j = 0; j < m; ++j) {
        if (allowed[x * m + j]) factor[j] += source[x] / lambda;
      }
      functional -= source[x] * std::log(lambda);
    }
    functional /= std::numbers::ln2;
    double top_log = -kInf;
    double mean_log = 0.0;
    std::vector<double> next(m);
    for (std::size_t j = 0; j < m; ++j) {
      next[j] = q[j] * factor[j];
      if (factor[j] > 0.0) {
        top_log = std::max(top_log, std::log(factor[j]));
        if (next[j] > 0.0) mean_log += next[j] * std::log(factor[j]);
      }
    }
    const double gap = (top_log - mean_log) / std::numbers::ln2;
    const double change = std::abs(functional - previous);
    residual = std::min(change, gap);
    previous = functional;
    if (change < config.convergence_tol || gap < config.convergence_tol) {
      Channel channel(d.row_alphabet(), d.col_alphabet(), std::move(rows), kArithmeticTol);
      return finish(source, d, std::move(channel), kInf, it);
    }
    q = std::move(next);
    prune(q, config.support_prune_tol);
  }
  Channel channel(d.row_alphabet(), d.col_alphabet(), std::move(rows), kArithmeticTol);
  auto last = finish(source, d, std::move(channel), kInf, config.max_iterations);
  throw NonConvergence("minimum-distortion solve did not converge", std::move(last), residual);
}

RDCurve sweep(const FiniteDistribution& source, const DistortionMatrix& d, const RDSolverConfig& config) {
  config.validate();
  require_pair(source, d);
  std::vector<RDPoint> pts;
  pts.reserve(config.slope_grid.size() + 2);
  pts.push_back(zero_rate_point(source, d));
  std::vector<double> failed;
  std::string first_error;
  for (double s : config.slope_grid) {
    try {
      pts.push_back(blahut_arimoto(source, d, s, config));
    } catch (const NonConvergence& e) {
      failed.push_back(s);
      if (first_error.empty()) first_error = e.what();
    }
  }
  try {
    pts.push_back(min_distortion_point(source, d, config));
  } catch (const NonConvergence& e) {
    failed.push_back(kInf);
    if (first_error.empty()) first_error = e.what();
  }
  if (!failed.empty()) {
    std::ostringstream os;
    os << "sweep failed at " << failed.size() << " slope(s):";
    for (double s : failed) os << ' ' << s;
    os << " (" << first_error << ")";
    throw SweepError(os.str(), std::move(failed));
  }
  return RDCurve(canonicalize(std::move(pts)));
}

DistortionBracket solve_at_distortion(const FiniteDistribution& source, const DistortionMatrix& d,
                                      double target, const RDSolverConfig& config) {
  require_pair(source, d);
  const double lo_d = d_min(source, d);
  const double hi_d = d_max(source, d);
  const double span = std::max(hi_d - lo_d, 1e-300);
  if (target < lo_d - 1e-12 * std::max(1.0, std::abs(lo_d))) {
    std::ostringstream os;
    os << "target distortion " << target << " is below the minimum achievable " << lo_d;
    throw std::domain_error(os.str());
  }
  if (target >= hi_d) {
    auto p = zero_rate_point(source, d);
    return {p, p, 0.0};
  }
  if (target <= lo_d) {
    auto p = min_distortion_point(source, d, config);
    return {p, p, p.rate};
  }

  // Invariant: upper.distortion >= target >= feasible.distortion.
  RDPoint upper = zero_rate_point(source, d);
  std::optional<RDPoint> feasible;
  double s_lo = 0.0;
  double s_hi = kInf;
  double s = 1.0;
  for (int k = 0; k < 24; ++k) {
    auto p = blahut_arimoto(source, d, s, config);
    if (p.distortion >= target) {
      s_lo = s;
      upper = std::move(p);
      s *= 4.0;
    } else {
      s_hi = s;
      feasible = std::move(p);
      if (s_lo > 0.0) break;
      s /= 4.0;
    }
    if (s_lo > 0.0 && std::isfinite(s_hi)) break;
  }
  if (!feasible) feasible = min_distortion_point(source, d, config);

  if (s_lo > 0.0 && std::isfinite(s_hi)) {
    for (int k = 0; k < 200; ++k) {
      if (std::abs(upper.distortion - feasible->distortion) <= 1e-11 * span) break;
      if (s_hi / s_lo < 1.0 + 1e-13) break;
      const double mid = std::sqrt(s_lo * s_hi);
      auto p = blahut_arimoto(source, d, mid, config);
      if (p.distortion >= target) {
        s_lo = mid;
        upper = std::move(p);
      } else {
        s_hi = mid;
        feasible = std::move(p);
      }
    }
  }
  double rate = feasible->rate;
  const double width = upper.distortion - feasible->distortion;
  if (width > 0.0) {
    const double t = (target - feasible->distortion) / width;
    rate = feasible->rate + t * (upper.rate - feasible->rate);
  }
  return {std::move(*feasible), std::move(upper), rate};
}

}  // namespace rdm
