#include "rdm/theorem_suite.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>

#include "json.hpp"
#include "random.hpp"
#include "rdm/output.hpp"
#include "rdm/parallel.hpp"

namespace rdm {

namespace {

using detail::Rng;

constexpr double kInf = std::numeric_limits<double>::infinity();
// A reproduction letter counts as used above this output mass.
constexpr double kUsedMass = 1e-6;
constexpr double kPosteriorGap = 1e-6;

struct TheoremInfo {
  std::string id;
  std::string description;
};

const std::vector<TheoremInfo>& registry() {
  static const std::vector<TheoremInfo> table = {
      {"thm1", "direct coding into a cut and model splitting at that cut have equal rates"},
      {"thm2", "full-input coding and model splitting have equal rates when every task output of the cut "
               "alphabet is reachable from the input"},
      {"thm2a", "full-input coding and model splitting have equal rates when unreachable task outputs are "
                "dominated by reachable ones"},
      {"cor-multi-split", "full-input coding and splitting at Y1 or Y2 all have equal rates"},
      {"cor-distillation", "with distortion measured at Y2, direct coding into Y1, splitting at Y1 and "
                           "splitting at Y2 have equal rates"},
      {"deeper-split", "splitting at the deeper point Y2 never needs more rate than splitting at Y1"},
      {"thm3", "the rate needed for the task distortion induced by an input-optimal quantizer never exceeds "
               "the input rate"},
      {"thm4", "that rate is strictly lower when the input-optimal quantizer uses two letters with the same "
               "task output and different posteriors"},
      {"merge-transform", "merging two reproduction letters with the same task output keeps the task distortion "
                          "and does not increase mutual information"},
  };
  return table;
}

// ---------------------------------------------------------------------------
// instance generation

std::vector<std::size_t> surjective_table(Rng& rng, std::size_t n, std::size_t m) {
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  rng.shuffle(order);
  std::vector<std::size_t> targets(m);
  for (std::size_t j = 0; j < m; ++j) targets[j] = j;
  rng.shuffle(targets);
  std::vector<std::size_t> table(n);
  for (std::size_t k = 0; k < n; ++k) table[order[k]] = k < m ? targets[k] : rng.index(m);
  return table;
}

DistortionMatrix random_distortion(Rng& rng, DistortionKind kind, const Alphabet& a) {
  switch (kind) {
    case DistortionKind::ZeroOne: return DistortionMatrix::zero_one(a);
    case DistortionKind::Hamming: return DistortionMatrix::hamming(a);
    case DistortionKind::RandomNonneg: break;
  }
  const std::size_t n = a.size();
  std::vector<double> v(n * n, 0.0);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < n; ++c) {
      if (r != c) v[r * n + c] = rng.uniform(0.1, 1.0);
    }
  }
  return DistortionMatrix(a, a, std::move(v));
}

// Gives the unreachable task letter (last index) its distortion column/row.
DistortionMatrix with_extra_task_letter(Rng& rng, const DistortionMatrix& d, bool dominated) {
  const std::size_t n = d.rows();
  const std::size_t extra = n - 1;
  std::vector<double> v(d.values().begin(), d.values().end());
  const std::size_t alt = rng.index(extra);
  for (std::size_t t = 0; t < extra; ++t) {
    double mean = 0.0;
    for (std::size_t u = 0; u < extra; ++u) mean += d(t, u);
    mean /= static_cast<double>(extra - 1);
    const double value = dominated ? d(t, alt) + rng.uniform(0.0, 0.5) * mean : rng.uniform(0.3, 0.7) * mean;
    v[t * n + extra] = value;
    v[extra * n + t] = value;
  }
  v[extra * n + extra] = 0.0;
  return DistortionMatrix(d.row_alphabet(), d.col_alphabet(), std::move(v));
}

// ---------------------------------------------------------------------------
// checks

double level_rate(const ReducedProblem& p, double level, const RDSolverConfig& config) {
  return solve_at_distortion(p.source, p.distortion, level, config).rate;
}

std::vector<double> shared_levels(const std::vector<const ReducedProblem*>& problems, std::size_t count) {
  double lo = -kInf;
  double hi = -kInf;
  for (const auto* p : problems) {
    lo = std::max(lo, d_min(p->source, p->distortion));
    hi = std::max(hi, d_max(p->source, p->distortion));
  }
  return interior_levels(lo, std::max(lo, hi), count);
}

// Largest pairwise rate difference across reductions at common levels.
InstanceCheck equal_rates(const MachineRDInstance& instance, const std::vector<CodingApproach>& approaches,
                          std::size_t levels, const RDSolverConfig& config) {
  std::vector<ReducedProblem> problems;
  for (const auto& a : approaches) problems.push_back(reduce(instance, a));
  std::vector<const ReducedProblem*> ptrs;
  for (const auto& p : problems) ptrs.push_back(&p);
  InstanceCheck out;
  for (double level : shared_levels(ptrs, levels)) {
    std::vector<double> rates;
    for (const auto& p : problems) rates.push_back(level_rate(p, level, config));
    const auto [lo, hi] = std::minmax_element(rates.begin(), rates.end());
    out.violation = std::max(out.violation, *hi - *lo);
    ++out.checks;
  }
  return out;
}

void merge_into(InstanceCheck& acc, const InstanceCheck& other) {
  acc.violation = std::max(acc.violation, other.violation);
  acc.checks += other.checks;
}

std::vector<std::string> cut_names(const TaskModel& model) {
  std::vector<std::pair<std::size_t, std::string>> order;
  for (const auto& [name, pos] : model.cuts()) order.emplace_back(pos, name);
  std::sort(order.begin(), order.end());
  std::vector<std::string> out;
  for (auto& [pos, name] : order) out.push_back(std::move(name));
  return out;
}

void require_cuts(const TaskModel& model, std::initializer_list<const char*> names) {
  for (const char* n : names) {
    if (!model.has_point(n) || model.position(n) == 0 || model.position(n) == model.depth()) {
      throw std::invalid_argument(std::string("instance has no interior point '") + n + "'");
    }
  }
}

// Splitting at a cut, then composing with the input stages, must realize the
// same task distortion and mutual information as a direct-coding channel.
double direct_from_split(const MachineRDInstance& instance, const std::string& cut, const ReducedProblem& split,
                         double level, const RDSolverConfig& config) {
  const auto& model = instance.model();
  auto point = solve_at_distortion(split.source, split.distortion, level, config).feasible;
  const auto g = model.map_between(0, model.position(cut));
  const auto composed = map_then_channel(g, point.channel);
  const auto direct = reduce(instance, CodingApproach::direct(cut, instance.task_name()));
  const double dd = std::abs(expected_distortion(direct.source, composed, direct.distortion) - point.distortion);
  const double di = std::abs(mutual_information(direct.source, composed) - point.rate);
  return std::max(dd, di);
}

// Lifting a split channel into the input alphabet keeps its task distortion
// and cannot raise its rate.
double lift_from_split(const MachineRDInstance& instance, const std::string& cut, const ReducedProblem& split,
                       double level, const RDSolverConfig& config) {
  const auto& model = instance.model();
  auto point = solve_at_distortion(split.source, split.distortion, level, config).feasible;
  const auto g = model.map_between(0, model.position(cut));
  const auto lifted = lift_reproduction(map_then_channel(g, point.channel), model, cut);
  const auto full = reduce(instance, CodingApproach::full_input(instance.task_name()));
  const double dd = std::abs(expected_distortion(full.source, lifted, full.distortion) - point.distortion);
  const double di = std::max(0.0, mutual_information(full.source, lifted) - point.rate - 1e-12);
  return std::max(dd, di);
}

// Replaces every reproduction letter at `cut` whose task output no input
// reaches with a reachable letter that is no worse for every task input.
DeterministicMap substitution_map(const MachineRDInstance& instance, const std::string& cut) {
  const auto& model = instance.model();
  const auto h = model.map_between(model.position(cut), model.depth());
  const auto reach = model.task_map().image();
  const auto& d = instance.task_distortion();
  const auto& ya = h.input();
  std::vector<std::size_t> table(ya.size());
  for (std::size_t y = 0; y < ya.size(); ++y) {
    table[y] = y;
    if (reach[h(y)]) continue;
    bool found = false;
    for (std::size_t z = 0; z < ya.size() && !found; ++z) {
      if (!reach[h(z)]) continue;
      bool dominates = true;
      for (std::size_t t = 0; t < reach.size(); ++t) {
        if (reach[t] && d(t, h(z)) > d(t, h(y))) dominates = false;
      }
      if (dominates) {
        table[y] = z;
        found = true;
      }
    }
    if (!found) {
      throw HypothesisViolated("letter " + ya.label(y) + " at " + cut + " has no reachable substitute");
    }
  }
  return DeterministicMap(ya, ya, std::move(table));
}

double substitution_check(const MachineRDInstance& instance, const std::string& cut, const ReducedProblem& split,
                          double level, const RDSolverConfig& config) {
  auto point = solve_at_distortion(split.source, split.distortion, level, config).feasible;
  const auto moved = channel_then_map(point.channel, substitution_map(instance, cut));
  const double dd = expected_distortion(split.source, moved, split.distortion) - point.distortion;
  const double di = mutual_information(split.source, moved) - point.rate;
  return std::max({0.0, dd - 1e-12, di - 1e-10});
}

bool has_strict_pair(const MachineRDInstance& instance, const Channel& channel) {
  const auto f = instance.model().task_map();
  const auto& p = instance.source();
  const auto marginal = output_marginal(p, channel);
  const std::size_t n = channel.rows();
  const std::size_t m = channel.cols();
  for (std::size_t a = 0; a < m; ++a) {
    if (marginal[a] <= kUsedMass) continue;
    for (std::size_t b = a + 1; b < m; ++b) {
      if (f(a) != f(b) || marginal[b] <= kUsedMass) continue;
      double diff = 0.0;
      for (std::size_t x = 0; x < n; ++x) {
        diff += std::abs(p[x] * channel(x, a) / marginal[a] - p[x] * channel(x, b) / marginal[b]);
      }
      if (diff > kPosteriorGap) return true;
    }
  }
  return false;
}

std::vector<std::pair<std::size_t, std::size_t>> task_equivalent_pairs(const MachineRDInstance& instance) {
  const auto f = instance.model().task_map();
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t a = 0; a < f.input().size(); ++a) {
    for (std::size_t b = a + 1; b < f.input().size(); ++b) {
      if (f(a) == f(b)) out.emplace_back(a, b);
    }
  }
  return out;
}

Channel random_channel(Rng& rng, const Alphabet& in, const Alphabet& out) {
  std::vector<double> v(in.size() * out.size());
  for (std::size_t r = 0; r < in.size(); ++r) {
    double total = 0.0;
    for (std::size_t c = 0; c < out.size(); ++c) {
      v[r * out.size() + c] = -std::log(1.0 - rng.uniform());
      total += v[r * out.size() + c];
    }
    for (std::size_t c = 0; c < out.size(); ++c) v[r * out.size() + c] /= total;
  }
  return Channel(in, out, std::move(v));
}

// Column b = alpha * column a, so both letters have the same posterior.
Channel proportional_channel(Rng& rng, const Alphabet& in, const Alphabet& out, std::size_t a, std::size_t b) {
  const double alpha = rng.uniform(0.2, 3.0);
  const std::size_t m = out.size();
  std::vector<double> v(in.size() * m);
  for (std::size_t r = 0; r < in.size(); ++r) {
    const double ca = rng.uniform(0.05, 0.95) / (1.0 + alpha);
    double rest_total = 0.0;
    std::vector<double> rest(m, 0.0);
    for (std::size_t c = 0; c < m; ++c) {
      if (c == a || c == b) continue;
      rest[c] = -std::log(1.0 - rng.uniform());
      rest_total += rest[c];
    }
    const double remaining = 1.0 - (1.0 + alpha) * ca;
    for (std::size_t c = 0; c < m; ++c) {
      if (c == a) {
        v[r * m + c] = ca;
      } else if (c == b) {
        v[r * m + c] = alpha * ca;
      } else {
        v[r * m + c] = rest_total > 0.0 ? remaining * rest[c] / rest_total : 0.0;
      }
    }
    if (rest_total == 0.0) {
      // only the pair exists: rescale the pair to fill the row
      v[r * m + a] = 1.0 / (1.0 + alpha);
      v[r * m + b] = alpha / (1.0 + alpha);
    }
  }
  return Channel(in, out, std::move(v), kArithmeticTol);
}

InstanceCheck check_merge(const MachineRDInstance& instance, std::uint64_t seed) {
  const auto pairs = task_equivalent_pairs(instance);
  if (pairs.empty()) throw HypothesisViolated("no two inputs share a task output");
  Rng rng(seed ^ 0x9e3779b97f4a7c15ULL);
  const auto& x = instance.model().input_alphabet();
  InstanceCheck out;
  for (std::size_t k = 0; k < kMergeChannelsPerSpec; ++k) {
    const auto [keep, drop] = pairs[rng.index(pairs.size())];
    const bool equal_posteriors = k % 4 == 3;
    const auto channel = equal_posteriors ? proportional_channel(rng, x, x, keep, drop) : random_channel(rng, x, x);
    const auto r = evaluate_merge(instance, channel, keep, drop);
    double v = std::max(std::abs(r.delta_distortion), std::max(0.0, r.delta_information));
    if (r.posteriors_differ) v = std::max(v, r.delta_information + kMergeStrict);
    out.violation = std::max(out.violation, v);
    ++out.checks;
  }
  return out;
}

InstanceCheck check_supervised(const MachineRDInstance& instance, std::size_t levels, const RDSolverConfig& config,
                               bool strict) {
  const auto input = reduce(instance, CodingApproach::full_input(instance.input_name()));
  const double lo = d_min(input.source, input.distortion);
  const double hi = d_max(input.source, input.distortion);
  InstanceCheck out;
  for (double cap : interior_levels(lo, hi, levels)) {
    const auto g = supervised_gap(instance, cap, config);
    if (!strict) {
      out.violation = std::max(out.violation, -g.gap);
      ++out.checks;
    } else if (has_strict_pair(instance, g.input_channel)) {
      out.violation = std::max(out.violation, kStrictMargin - g.gap);
      ++out.checks;
    }
  }
  if (strict && out.checks == 0) {
    throw HypothesisViolated("no level where the input-optimal quantizer uses two task-equivalent letters");
  }
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------

std::string to_string(DistortionKind kind) {
  switch (kind) {
    case DistortionKind::ZeroOne: return "zero-one";
    case DistortionKind::RandomNonneg: return "random";
    case DistortionKind::Hamming: return "hamming";
  }
  return "?";
}

DistortionKind parse_distortion_kind(const std::string& text) {
  if (text == "zero-one") return DistortionKind::ZeroOne;
  if (text == "random") return DistortionKind::RandomNonneg;
  if (text == "hamming") return DistortionKind::Hamming;
  throw std::invalid_argument("unknown distortion kind '" + text + "' (expected zero-one, random or hamming)");
}

void InstanceSpec::validate() const {
  std::vector<std::size_t> chain{x};
  if (y1) chain.push_back(y1);
  if (y2) chain.push_back(y2);
  chain.push_back(t);
  for (std::size_t k = 0; k + 1 < chain.size(); ++k) {
    if (chain[k] < chain[k + 1]) throw std::invalid_argument("alphabet sizes must be non-increasing along the chain");
  }
  if (t < 2) throw std::invalid_argument("task alphabet needs at least 2 letters");
  if (x + 1 > kMaxAlphabetSize) throw std::invalid_argument("input alphabet too large");
  if (!enforce_thm2 && chain.size() == 2) {
    throw std::invalid_argument("an unreachable task letter needs an intermediate point");
  }
  if (enforce_thm2 && dominated_extras) throw std::invalid_argument("dominated_extras requires enforce_thm2 off");
  if (enforce_thm4 && x <= t) throw std::invalid_argument("enforce_thm4 needs more input letters than task letters");
}

MachineRDInstance generate_instance(const InstanceSpec& spec) {
  spec.validate();
  Rng rng(spec.seed);
  std::vector<std::string> names{"X"};
  std::vector<std::size_t> reach{spec.x};
  if (spec.y1) names.push_back("Y1"), reach.push_back(spec.y1);
  if (spec.y2) names.push_back("Y2"), reach.push_back(spec.y2);
  names.push_back("T");
  reach.push_back(spec.t);
  const std::size_t extra = spec.enforce_thm2 ? 0 : 1;

  std::vector<Alphabet> alphabets;
  for (std::size_t k = 0; k < reach.size(); ++k) alphabets.emplace_back(reach[k] + (k == 0 ? 0 : extra));

  std::vector<DeterministicMap> stages;
  for (std::size_t k = 0; k + 1 < reach.size(); ++k) {
    auto table = surjective_table(rng, reach[k], reach[k + 1]);
    if (extra && k > 0) table.push_back(reach[k + 1]);  // extra letter chains to the next extra letter
    stages.emplace_back(alphabets[k], alphabets[k + 1], std::move(table));
  }
  TaskModel model(names, std::move(stages));

  std::vector<double> mass(spec.x);
  double total = 0.0;
  for (auto& m : mass) total += (m = 0.25 + rng.uniform());
  for (auto& m : mass) m /= total;
  FiniteDistribution source(alphabets[0], std::move(mass));

  std::map<std::string, DistortionMatrix> distortions;
  for (std::size_t k = 0; k < names.size(); ++k) {
    auto d = random_distortion(rng, spec.kind, alphabets[k]);
    if (extra && k + 1 == names.size()) d = with_extra_task_letter(rng, d, spec.dominated_extras);
    distortions.emplace(names[k], std::move(d));
  }
  return MachineRDInstance(std::move(source), std::move(model), std::move(distortions));
}

const std::vector<std::string>& theorem_ids() {
  static const std::vector<std::string> ids = [] {
    std::vector<std::string> out;
    for (const auto& t : registry()) out.push_back(t.id);
    return out;
  }();
  return ids;
}

void require_theorem(const std::string& id) {
  for (const auto& t : registry()) {
    if (t.id == id) return;
  }
  std::string valid;
  for (const auto& t : registry()) valid += (valid.empty() ? "" : ", ") + t.id;
  throw std::invalid_argument("unknown theorem id '" + id + "'; valid ids: " + valid);
}

std::string theorem_description(const std::string& id) {
  require_theorem(id);
  for (const auto& t : registry()) {
    if (t.id == id) return t.description;
  }
  return {};
}

double theorem_tolerance(const std::string& id, double equality_tol) {
  require_theorem(id);
  if (id == "deeper-split" || id == "thm3") return kInequalityTol;
  if (id == "thm4") return 0.0;
  if (id == "merge-transform") return kMergeTol;
  return equality_tol;
}

std::vector<InstanceSpec> default_specs(const std::string& id, std::size_t count, std::uint64_t base_seed) {
  require_theorem(id);
  static constexpr std::size_t kInputSizes[] = {4, 6, 8};
  static constexpr DistortionKind kKinds[] = {DistortionKind::ZeroOne, DistortionKind::RandomNonneg,
                                              DistortionKind::Hamming};
  std::vector<InstanceSpec> out;
  for (std::size_t i = 0; i < count; ++i) {
    InstanceSpec s;
    s.seed = base_seed + i;
    s.x = kInputSizes[i % 3];
    s.t = 2 + (i / 3) % 2;
    s.y1 = (s.x + s.t + 1) / 2;
    s.y2 = (s.y1 + s.t) / 2;
    s.kind = kKinds[(i / 6) % 3];
    if (id == "thm2a") {
      s.enforce_thm2 = false;
      s.dominated_extras = true;
    } else if (id == "deeper-split" || id == "thm3") {
      s.enforce_thm2 = i % 2 == 0;
    } else if (id == "thm4" || id == "merge-transform") {
      s.enforce_thm4 = true;
    }
    out.push_back(s);
  }
  return out;
}

InstanceCheck check_instance(const std::string& id, const MachineRDInstance& instance, std::size_t levels,
                             const RDSolverConfig& config, std::uint64_t seed) {
  require_theorem(id);
  const auto& model = instance.model();
  const auto& task = instance.task_name();
  const auto cuts = cut_names(model);
  InstanceCheck out;

  if (id == "thm1" || id == "thm2" || id == "thm2a") {
    if (cuts.empty()) throw std::invalid_argument(id + " needs at least one interior point");
    for (const auto& cut : cuts) {
      const auto left = id == "thm1" ? CodingApproach::direct(cut, task) : CodingApproach::full_input(task);
      const auto split = CodingApproach::split(cut, task);
      merge_into(out, equal_rates(instance, {left, split}, levels, config));
      const auto sp = reduce(instance, split);
      const double lo = d_min(sp.source, sp.distortion);
      const double hi = d_max(sp.source, sp.distortion);
      for (double level : interior_levels(lo, hi, levels)) {
        double v = 0.0;
        if (id == "thm1") v = direct_from_split(instance, cut, sp, level, config);
        if (id == "thm2") v = lift_from_split(instance, cut, sp, level, config);
        if (id == "thm2a") v = substitution_check(instance, cut, sp, level, config);
        out.violation = std::max(out.violation, v);
      }
    }
  } else if (id == "cor-multi-split") {
    require_cuts(model, {"Y1", "Y2"});
    out = equal_rates(instance,
                      {CodingApproach::full_input(task), CodingApproach::split("Y1", task),
                       CodingApproach::split("Y2", task)},
                      levels, config);
  } else if (id == "cor-distillation") {
    require_cuts(model, {"Y1", "Y2"});
    out = equal_rates(instance,
                      {CodingApproach::direct("Y1", "Y2"), CodingApproach::split("Y1", "Y2"),
                       CodingApproach::split("Y2", "Y2")},
                      levels, config);
  } else if (id == "deeper-split") {
    require_cuts(model, {"Y1", "Y2"});
    const auto shallow = reduce(instance, CodingApproach::split("Y1", task));
    const auto deep = reduce(instance, CodingApproach::split("Y2", task));
    for (double level : shared_levels({&shallow, &deep}, levels)) {
      const double excess = level_rate(deep, level, config) - level_rate(shallow, level, config);
      out.violation = std::max(out.violation, excess);
      ++out.checks;
    }
  } else if (id == "thm3" || id == "thm4") {
    out = check_supervised(instance, levels, config, id == "thm4");
  } else if (id == "merge-transform") {
    out = check_merge(instance, seed);
  }
  out.violation = std::max(out.violation, 0.0);
  return out;
}

Verdict verify(const std::string& id, const std::vector<InstanceSpec>& specs, std::size_t levels, double tolerance,
               const RDSolverConfig& config) {
  require_theorem(id);
  config.validate();
  std::vector<std::optional<InstanceCheck>> results(specs.size());
  std::vector<std::string> errors(specs.size());
  parallel_for(specs.size(), [&](std::size_t i) {
    try {
      const auto instance = generate_instance(specs[i]);
      results[i] = check_instance(id, instance, levels, config, specs[i].seed);
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  });

  Verdict v;
  v.theorem = id;
  v.description = theorem_description(id);
  v.tolerance = tolerance;
  for (std::size_t i = 0; i < specs.size(); ++i) {
    const auto seed = specs[i].seed;
    v.seeds.push_back(seed);
    ++v.instances;
    const double violation = results[i] ? results[i]->violation : kInf;
    if (!results[i]) v.errors.push_back("seed " + std::to_string(seed) + ": " + errors[i]);
    v.max_violation = std::max(v.max_violation, violation);
    if (!(violation <= tolerance)) v.failing_seeds.push_back(seed);
  }
  v.pass = v.max_violation <= tolerance;
  return v;
}

Verdict verify_merge_property(const std::vector<InstanceSpec>& specs) {
  return verify("merge-transform", specs, 0, kMergeTol, RDSolverConfig::defaults());
}

Channel merge_task_equivalent(const MachineRDInstance& instance, const Channel& channel, std::size_t keep,
                              std::size_t drop) {
  const auto f = instance.model().task_map();
  if (!(channel.output() == f.input())) throw AlphabetMismatch("channel does not reproduce the input alphabet");
  if (keep >= f.input().size() || drop >= f.input().size()) throw std::out_of_range("merge letter out of range");
  if (f(keep) != f(drop)) {
    throw HypothesisViolated("letters " + f.input().label(keep) + " and " + f.input().label(drop) +
                             " have different task outputs");
  }
  return merge_reproduction_letters(channel, keep, drop);
}

MergeOutcome evaluate_merge(const MachineRDInstance& instance, const Channel& channel, std::size_t keep,
                            std::size_t drop) {
  const auto problem = reduce(instance, CodingApproach::full_input(instance.task_name()));
  const auto merged = merge_task_equivalent(instance, channel, keep, drop);
  MergeOutcome r;
  r.delta_distortion = expected_distortion(problem.source, merged, problem.distortion) -
                       expected_distortion(problem.source, channel, problem.distortion);
  r.delta_information = mutual_information(problem.source, merged) - mutual_information(problem.source, channel);

  const auto& p = problem.source;
  const auto marginal = output_marginal(p, channel);
  if (marginal[keep] > 0.0 && marginal[drop] > 0.0) {
    double diff = 0.0;
    for (std::size_t x = 0; x < channel.rows(); ++x) {
      diff = std::max(diff, std::abs(p[x] * channel(x, keep) / marginal[keep] -
                                     p[x] * channel(x, drop) / marginal[drop]));
    }
    r.posteriors_differ = diff > kPosteriorGap;
  }
  return r;
}

std::string verdict_to_json(const Verdict& verdict) {
  nlohmann::ordered_json j;
  j["theorem"] = verdict.theorem;
  j["description"] = verdict.description;
  j["instances"] = verdict.instances;
  if (std::isfinite(verdict.max_violation)) {
    j["max_violation"] = round_significant(verdict.max_violation);
  } else {
    j["max_violation"] = format_number(verdict.max_violation);
  }
  j["tolerance"] = round_significant(verdict.tolerance);
  j["pass"] = verdict.pass;
  j["failing_seeds"] = verdict.failing_seeds;
  j["seeds"] = verdict.seeds;
  j["errors"] = verdict.errors;
  return j.dump(2) + "\n";
}

}  // namespace rdm
