#pragma once

// Two-class "squares and circles" toy: a two-stage task model on points
// (u, v), optimal 1-bit quantizers at the input and at the feature layer,
// and the resulting task errors and separability scores.

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "rdm/feature_io.hpp"

namespace rdm {

enum class ToyClass { Square = 0, Circle = 1 };
enum class ToySpace { InputX, LayerY };
enum class QuantizerMethod { AnalyticBins, Lloyd };

std::string to_string(ToyClass c);
std::string to_string(ToySpace s);
std::string to_string(QuantizerMethod m);
QuantizerMethod parse_quantizer_method(const std::string& text);

struct ToyPoint {
  double u = 0.0;
  double v = 0.0;
  ToyClass cls = ToyClass::Square;
};

/// Sampling ranges. The defaults are the standard experiment; widening the
/// v-ranges changes the class geometry.
struct ToyGeometry {
  double u_lo = 0.0;
  double u_hi = 10.0;
  double square_lo = 0.8;
  double square_hi = 1.2;
  double circle_lo = 2.8;
  double circle_hi = 3.2;
  void validate() const;
};

using Vec2 = std::array<double, 2>;

struct ToyQuantizer {
  ToySpace space = ToySpace::InputX;
  /// u coordinate halfway between the representatives.
  double boundary = 5.0;
  std::array<Vec2, 2> reps{};

  bool is_valid() const { return reps[0] != reps[1]; }
  /// Index of the nearest representative; ties go to index 0.
  std::size_t encode(const Vec2& point) const;
};

class LloydNonConvergence : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr std::size_t kLloydMaxIterations = 10'000;
inline constexpr std::size_t kLloydRestarts = 4;

/// Classes equiprobable; u and v independent uniforms within a class.
std::vector<ToyPoint> sample_dataset(std::size_t n, std::uint64_t seed, const ToyGeometry& geometry = {});

Vec2 map_g(double u, double v);
inline Vec2 map_g(const ToyPoint& p) { return map_g(p.u, p.v); }
ToyClass map_h(double u, double v);
inline ToyClass map_h(const Vec2& y) { return map_h(y[0], y[1]); }

/// The point expressed in the given space (identity at the input, g at the layer).
Vec2 embed(const ToyPoint& p, ToySpace space);

/// AnalyticBins returns the known optimum for the standard geometry. Lloyd
/// runs seeded k-means++ 2-means (several restarts) on the embedded data.
ToyQuantizer optimal_one_bit_quantizer(ToySpace space, std::span<const ToyPoint> data, QuantizerMethod method,
                                       std::uint64_t seed = 0);

/// Mean squared error of quantizing the embedded data.
double quantizer_mse(const ToyQuantizer& q, std::span<const ToyPoint> data);

/// Fraction of points whose class after quantizing (then finishing the task
/// model from the quantizer's space) differs from the true class.
double task_error(const ToyQuantizer& q, std::span<const ToyPoint> data);

/// Labels: Square = 0, Circle = 1.
LabeledFeatureSet toy_feature_set(std::span<const ToyPoint> data, ToySpace space);

double toy_appropriateness(ToySpace space, std::size_t n, std::uint64_t seed, const ToyGeometry& geometry = {});

}  // namespace rdm
