#pragma once

// Rate-distortion functions of (source, distortion matrix) pairs.
//
// The solver is the Blahut-Arimoto alternating minimization of
// I(X; Xhat) + slope * E[d(X, Xhat)]. Sweeping the slope traces the lower
// convex envelope of the achievable (distortion, rate) region. A grid-search
// oracle over quantized channels is provided for tiny instances.

#include <cstddef>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "rdm/probspace.hpp"

namespace rdm {

struct RDSolverConfig {
  std::vector<double> slope_grid;
  std::size_t max_iterations = 50'000;
  double convergence_tol = 1e-9;
  double support_prune_tol = kSupportFloor;

  /// 64 log-spaced slopes over [1e-3, 1e3].
  static RDSolverConfig defaults();
  static std::vector<double> log_grid(double lo, double hi, std::size_t count);
  void validate() const;
};

struct RDPoint {
  double rate = 0.0;        // bits
  double distortion = 0.0;  // units of the distortion matrix
  double slope = 0.0;       // +inf for the minimum-distortion endpoint
  Channel channel;
  std::size_t iterations = 0;
};

class RDCurve {
 public:
  RDCurve() = default;
  explicit RDCurve(std::vector<RDPoint> points, std::string label = {});

  const std::vector<RDPoint>& points() const noexcept { return points_; }
  std::size_t size() const noexcept { return points_.size(); }
  bool empty() const noexcept { return points_.empty(); }
  const std::string& label() const noexcept { return label_; }
  void set_label(std::string label) { label_ = std::move(label); }

  double min_distortion() const { return points_.front().distortion; }
  double max_distortion() const { return points_.back().distortion; }

  /// Linear interpolation on the convex curve; 0 beyond the last point.
  /// Throws std::domain_error below the minimum distortion.
  double rate_at(double distortion) const;

 private:
  std::vector<RDPoint> points_;
  std::string label_;
};

class NonConvergence : public std::runtime_error {
 public:
  NonConvergence(const std::string& what, RDPoint last, double residual)
      : std::runtime_error(what), last_(std::move(last)), residual_(residual) {}
  const RDPoint& last_iterate() const noexcept { return last_; }
  double residual() const noexcept { return residual_; }

 private:
  RDPoint last_;
  double residual_;
};

class SweepError : public std::runtime_error {
 public:
  SweepError(const std::string& what, std::vector<double> failed)
      : std::runtime_error(what), failed_(std::move(failed)) {}
  const std::vector<double>& failed_slopes() const noexcept { return failed_; }

 private:
  std::vector<double> failed_;
};

class InstanceTooLarge : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Zero-rate distortion: min over reproduction letters of the expected column distortion.
double d_max(const FiniteDistribution& source, const DistortionMatrix& d);
/// Expectation of the per-row minimum distortion.
double d_min(const FiniteDistribution& source, const DistortionMatrix& d);

/// One Blahut-Arimoto solve at a fixed slope, started from the uniform
/// reproduction marginal. Slope 0 yields the constant channel on the
/// distortion-minimizing letter.
RDPoint blahut_arimoto(const FiniteDistribution& source, const DistortionMatrix& d, double slope,
                       const RDSolverConfig& config);

/// Minimum-rate channel among those achieving d_min.
RDPoint min_distortion_point(const FiniteDistribution& source, const DistortionMatrix& d,
                             const RDSolverConfig& config);
RDPoint zero_rate_point(const FiniteDistribution& source, const DistortionMatrix& d);

/// Solves every slope of the grid, adds both endpoints, sorts by distortion
/// and discards dominated or non-convex points.
RDCurve sweep(const FiniteDistribution& source, const DistortionMatrix& d, const RDSolverConfig& config);

/// Result of hitting a target distortion by bisection on the slope.
struct DistortionBracket {
  RDPoint feasible;  // distortion <= target
  RDPoint upper;     // distortion >= target
  double rate = 0.0; // chord value at the target
};

DistortionBracket solve_at_distortion(const FiniteDistribution& source, const DistortionMatrix& d,
                                      double target, const RDSolverConfig& config);

/// Minimum of I over channels whose rows lie on the simplex grid with
/// `grid_steps` subdivisions and whose expected distortion is at most `cap`.
/// Each refinement round re-searches a finer local grid around the incumbent.
/// Limited to |source| <= 4, |reproduction| <= 3, grid_steps <= 20.
double brute_force_rd(const FiniteDistribution& source, const DistortionMatrix& d, double cap,
                      std::size_t grid_steps, std::size_t refinement_rounds = 0);

}  // namespace rdm
