#include "rdm/machine_rd.hpp"

#include <algorithm>
#include <cmath>

namespace rdm {

std::string to_string(Variant v) {
  switch (v) {
    case Variant::FullInput: return "full";
    case Variant::ModelSplit: return "split";
    case Variant::Direct: return "direct";
  }
  return "?";
}

Variant parse_variant(const std::string& text) {
  if (text == "full") return Variant::FullInput;
  if (text == "split") return Variant::ModelSplit;
  if (text == "direct") return Variant::Direct;
  throw std::invalid_argument("unknown coding approach '" + text + "' (expected full, split or direct)");
}

std::string CodingApproach::describe() const {
  if (variant == Variant::FullInput) return "full->" + target;
  return to_string(variant) + "@" + cut + "->" + target;
}

// ---------------------------------------------------------------------------

MachineRDInstance::MachineRDInstance(FiniteDistribution source, TaskModel model,
                                     std::map<std::string, DistortionMatrix> distortions)
    : source_(std::move(source)), model_(std::move(model)), distortions_(std::move(distortions)) {
  if (!(source_.alphabet() == model_.input_alphabet())) {
    throw AlphabetMismatch("source law is not over the model input alphabet");
  }
  for (const auto& [name, d] : distortions_) {
    if (!model_.has_point(name)) throw std::invalid_argument("distortion given for unknown point '" + name + "'");
    const auto& a = model_.alphabet(name);
    if (!(d.row_alphabet() == a) || !(d.col_alphabet() == a)) {
      throw AlphabetMismatch("distortion matrix for '" + name + "' does not match its alphabet");
    }
  }
  if (!distortions_.count(task_name())) {
    throw MissingDistortion("instance needs a task distortion for '" + task_name() + "'");
  }
}

const DistortionMatrix& MachineRDInstance::task_distortion() const { return distortions_.at(task_name()); }

const DistortionMatrix* MachineRDInstance::input_distortion() const {
  auto it = distortions_.find(input_name());
  return it == distortions_.end() ? nullptr : &it->second;
}

const DistortionMatrix& MachineRDInstance::distortion_at(const std::string& point) const {
  auto it = distortions_.find(point);
  if (it == distortions_.end()) throw MissingDistortion("no distortion matrix for target '" + point + "'");
  return it->second;
}

// ---------------------------------------------------------------------------

void validate(const CodingApproach& approach, const TaskModel& model) {
  if (!model.has_point(approach.target)) {
    throw std::invalid_argument("unknown distortion target '" + approach.target + "'");
  }
  if (approach.variant == Variant::FullInput) return;
  if (approach.cut.empty()) throw std::invalid_argument(to_string(approach.variant) + " coding needs a cut point");
  if (!model.has_point(approach.cut)) throw std::invalid_argument("unknown cut point '" + approach.cut + "'");
  if (model.position(approach.cut) > model.position(approach.target)) {
    throw std::invalid_argument("cut '" + approach.cut + "' is deeper than the distortion target '" +
                                approach.target + "'");
  }
}

const Alphabet& reproduction_alphabet(const MachineRDInstance& instance, const CodingApproach& approach) {
  const auto& model = instance.model();
  return approach.variant == Variant::FullInput ? model.input_alphabet() : model.alphabet(approach.cut);
}

ReducedProblem reduce(const MachineRDInstance& instance, const CodingApproach& approach) {
  const auto& model = instance.model();
  validate(approach, model);
  const auto& dt = instance.distortion_at(approach.target);
  const auto tpos = model.position(approach.target);
  const auto cpos = approach.variant == Variant::FullInput ? std::size_t{0} : model.position(approach.cut);

  // source symbol -> target and reproduction symbol -> target
  const auto rep_to_target = model.map_between(cpos, tpos);
  const bool source_is_cut = approach.variant == Variant::ModelSplit;
  const auto src_to_target = source_is_cut ? rep_to_target : model.map_between(0, tpos);
  FiniteDistribution source =
      source_is_cut ? pushforward(instance.source(), model.map_between(0, cpos)) : instance.source();

  const auto& rows = src_to_target.input();
  const auto& cols = rep_to_target.input();
  std::vector<double> values(rows.size() * cols.size());
  for (std::size_t a = 0; a < rows.size(); ++a) {
    for (std::size_t b = 0; b < cols.size(); ++b) values[a * cols.size() + b] = dt(src_to_target(a), rep_to_target(b));
  }
  return {std::move(source), DistortionMatrix(rows, cols, std::move(values))};
}

RDCurve machine_rd(const MachineRDInstance& instance, const CodingApproach& approach, const RDSolverConfig& config) {
  auto problem = reduce(instance, approach);
  auto curve = sweep(problem.source, problem.distortion, config);
  curve.set_label(approach.describe());
  return curve;
}

double induced_distortion(const MachineRDInstance& instance, const CodingApproach& approach, const Channel& channel,
                          const std::string& target) {
  CodingApproach measured = approach;
  measured.target = target;
  auto problem = reduce(instance, measured);
  return expected_distortion(problem.source, channel, problem.distortion);
}

SupervisedGap supervised_gap(const MachineRDInstance& instance, double input_cap, const RDSolverConfig& config) {
  if (!instance.input_distortion()) throw MissingDistortion("supervised_gap needs an input distortion matrix");
  const auto unsup = CodingApproach::full_input(instance.input_name());
  const auto sup = CodingApproach::full_input(instance.task_name());

  auto input_problem = reduce(instance, unsup);
  auto bracket = solve_at_distortion(input_problem.source, input_problem.distortion, input_cap, config);
  auto& chosen = bracket.feasible;

  const double task_d = induced_distortion(instance, unsup, chosen.channel, instance.task_name());
  auto task_problem = reduce(instance, sup);
  auto task_bracket = solve_at_distortion(task_problem.source, task_problem.distortion, task_d, config);

  SupervisedGap out{input_cap,
                    chosen.distortion,
                    chosen.rate,
                    task_d,
                    task_bracket.rate,
                    chosen.rate - task_bracket.rate,
                    chosen.channel};
  return out;
}

double max_rate_difference(const RDCurve& left, const RDCurve& right, std::span<const double> distortions) {
  double worst = 0.0;
  for (double d : distortions) worst = std::max(worst, std::abs(left.rate_at(d) - right.rate_at(d)));
  return worst;
}

double max_rate_excess(const RDCurve& left, const RDCurve& right, std::span<const double> distortions) {
  double worst = -std::numeric_limits<double>::infinity();
  for (double d : distortions) worst = std::max(worst, right.rate_at(d) - left.rate_at(d));
  return worst;
}

std::vector<double> interior_levels(double lo, double hi, std::size_t count) {
  std::vector<double> out(count);
  for (std::size_t k = 0; k < count; ++k) {
    out[k] = lo + (hi - lo) * static_cast<double>(k + 1) / static_cast<double>(count + 1);
  }
  return out;
}

}  // namespace rdm
