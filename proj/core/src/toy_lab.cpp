#include "rdm/toy_lab.hpp"

#include <cmath>
#include <limits>

#include "random.hpp"
#include "rdm/task_appropriateness.hpp"

namespace rdm {

namespace {

double sign(double x) { return static_cast<double>((x > 0.0) - (x < 0.0)); }

double sq_dist(const Vec2& a, const Vec2& b) {
  const double du = a[0] - b[0];
  const double dv = a[1] - b[1];
  return du * du + dv * dv;
}

ToyQuantizer make_quantizer(ToySpace space, Vec2 a, Vec2 b) {
  if (b[0] < a[0] || (b[0] == a[0] && b[1] < a[1])) std::swap(a, b);
  return ToyQuantizer{space, 0.5 * (a[0] + b[0]), {a, b}};
}

struct LloydRun {
  ToyQuantizer q;
  double mse = 0.0;
};

LloydRun lloyd(const std::vector<Vec2>& pts, detail::Rng& rng, ToySpace space) {
  // k-means++ seeding for two centres
  std::array<Vec2, 2> c{};
  c[0] = pts[rng.index(pts.size())];
  double total = 0.0;
  for (const auto& p : pts) total += sq_dist(p, c[0]);
  if (total > 0.0) {
    double target = rng.uniform() * total;
    c[1] = pts.back();
    for (const auto& p : pts) {
      target -= sq_dist(p, c[0]);
      if (target <= 0.0) {
        c[1] = p;
        break;
      }
    }
  } else {
    c[1] = c[0];
  }

  std::vector<unsigned char> assign(pts.size(), 2);
  for (std::size_t it = 0; it < kLloydMaxIterations; ++it) {
    ToyQuantizer q{space, 0.0, c};
    bool changed = false;
    std::array<Vec2, 2> sum{};
    std::array<std::size_t, 2> count{};
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const auto k = static_cast<unsigned char>(q.encode(pts[i]));
      changed |= k != assign[i];
      assign[i] = k;
      sum[k][0] += pts[i][0];
      sum[k][1] += pts[i][1];
      ++count[k];
    }
    if (!changed) {
      double err = 0.0;
      for (std::size_t i = 0; i < pts.size(); ++i) err += sq_dist(pts[i], c[assign[i]]);
      return {make_quantizer(space, c[0], c[1]), err / static_cast<double>(pts.size())};
    }
    for (std::size_t k = 0; k < 2; ++k) {
      if (count[k]) c[k] = {sum[k][0] / static_cast<double>(count[k]), sum[k][1] / static_cast<double>(count[k])};
    }
  }
  throw LloydNonConvergence("Lloyd iteration did not settle within " + std::to_string(kLloydMaxIterations) +
                            " iterations");
}

}  // namespace

std::string to_string(ToyClass c) { return c == ToyClass::Square ? "square" : "circle"; }
std::string to_string(ToySpace s) { return s == ToySpace::InputX ? "X" : "Y"; }
std::string to_string(QuantizerMethod m) { return m == QuantizerMethod::AnalyticBins ? "analytic" : "lloyd"; }

QuantizerMethod parse_quantizer_method(const std::string& text) {
  if (text == "analytic") return QuantizerMethod::AnalyticBins;
  if (text == "lloyd") return QuantizerMethod::Lloyd;
  throw std::invalid_argument("unknown quantizer method '" + text + "' (expected analytic or lloyd)");
}

void ToyGeometry::validate() const {
  if (!(u_hi > u_lo) || !(square_hi >= square_lo) || !(circle_hi >= circle_lo)) {
    throw std::invalid_argument("toy geometry ranges must be ordered");
  }
}

std::size_t ToyQuantizer::encode(const Vec2& point) const {
  return sq_dist(point, reps[1]) < sq_dist(point, reps[0]) ? 1 : 0;
}

std::vector<ToyPoint> sample_dataset(std::size_t n, std::uint64_t seed, const ToyGeometry& geometry) {
  if (n == 0) throw std::invalid_argument("sample_dataset needs n >= 1");
  geometry.validate();
  detail::Rng rng(seed);
  std::vector<ToyPoint> out(n);
  for (auto& p : out) {
    p.cls = rng.uniform() < 0.5 ? ToyClass::Square : ToyClass::Circle;
    p.u = rng.uniform(geometry.u_lo, geometry.u_hi);
    p.v = p.cls == ToyClass::Square ? rng.uniform(geometry.square_lo, geometry.square_hi)
                                    : rng.uniform(geometry.circle_lo, geometry.circle_hi);
  }
  return out;
}

Vec2 map_g(double u, double v) {
  if (v > 2.0) return {2.5 + sign(u - 5.0) * std::sqrt(std::abs(0.04 - (v - 3.0) * (v - 3.0))), v};
  return {7.5 + sign(u - 5.0) * std::sqrt(std::abs(0.04 - (v - 1.0) * (v - 1.0))), v};
}

ToyClass map_h(double, double v) { return v > 2.0 ? ToyClass::Circle : ToyClass::Square; }

Vec2 embed(const ToyPoint& p, ToySpace space) { return space == ToySpace::InputX ? Vec2{p.u, p.v} : map_g(p); }

ToyQuantizer optimal_one_bit_quantizer(ToySpace space, std::span<const ToyPoint> data, QuantizerMethod method,
                                       std::uint64_t seed) {
  if (data.empty()) throw std::invalid_argument("quantizer design needs data");
  if (method == QuantizerMethod::AnalyticBins) {
    return space == ToySpace::InputX ? ToyQuantizer{space, 5.0, {Vec2{2.5, 2.0}, Vec2{7.5, 2.0}}}
                                     : ToyQuantizer{space, 5.0, {Vec2{2.5, 3.0}, Vec2{7.5, 1.0}}};
  }
  std::vector<Vec2> pts;
  pts.reserve(data.size());
  for (const auto& p : data) pts.push_back(embed(p, space));
  detail::Rng rng(seed);
  LloydRun best{{}, std::numeric_limits<double>::infinity()};
  for (std::size_t r = 0; r < kLloydRestarts; ++r) {
    auto run = lloyd(pts, rng, space);
    if (run.mse < best.mse) best = run;
  }
  return best.q;
}

double quantizer_mse(const ToyQuantizer& q, std::span<const ToyPoint> data) {
  double err = 0.0;
  for (const auto& p : data) {
    const auto x = embed(p, q.space);
    err += sq_dist(x, q.reps[q.encode(x)]);
  }
  return err / static_cast<double>(data.size());
}

double task_error(const ToyQuantizer& q, std::span<const ToyPoint> data) {
  if (data.empty()) return 0.0;
  std::array<ToyClass, 2> decided{};
  for (std::size_t k = 0; k < 2; ++k) {
    decided[k] = q.space == ToySpace::InputX ? map_h(map_g(q.reps[k][0], q.reps[k][1])) : map_h(q.reps[k]);
  }
  std::size_t wrong = 0;
  for (const auto& p : data) wrong += decided[q.encode(embed(p, q.space))] != p.cls;
  return static_cast<double>(wrong) / static_cast<double>(data.size());
}

LabeledFeatureSet toy_feature_set(std::span<const ToyPoint> data, ToySpace space) {
  LabeledFeatureSet set;
  set.count = data.size();
  set.dimension = 2;
  set.class_count = 2;
  set.features.reserve(2 * data.size());
  set.labels.reserve(data.size());
  for (const auto& p : data) {
    const auto x = embed(p, space);
    set.features.push_back(x[0]);
    set.features.push_back(x[1]);
    set.labels.push_back(static_cast<std::uint32_t>(p.cls));
  }
  set.metadata = "toy " + to_string(space) + " (u, v)";
  return set;
}

double toy_appropriateness(ToySpace space, std::size_t n, std::uint64_t seed, const ToyGeometry& geometry) {
  const auto data = sample_dataset(n, seed, geometry);
  return compute_report(toy_feature_set(data, space)).rho;
}

}  // namespace rdm
