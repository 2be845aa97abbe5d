#pragma once

// Machine-oriented rate-distortion functions. Every coding approach
// (full input, model split, direct) and every distortion target reduces
// to an ordinary (source, distortion matrix) pair for the solver.

#include <map>
#include <optional>
#include <string>

#include "rdm/probspace.hpp"
#include "rdm/rd_solver.hpp"

namespace rdm {

enum class Variant { FullInput, ModelSplit, Direct };

std::string to_string(Variant v);
Variant parse_variant(const std::string& text);

struct CodingApproach {
  Variant variant = Variant::FullInput;
  /// Stage boundary reconstructed by the decoder (ignored for FullInput).
  std::string cut;
  /// Stage boundary where distortion is measured.
  std::string target;

  static CodingApproach full_input(std::string target) { return {Variant::FullInput, {}, std::move(target)}; }
  static CodingApproach split(std::string cut, std::string target) {
    return {Variant::ModelSplit, std::move(cut), std::move(target)};
  }
  static CodingApproach direct(std::string cut, std::string target) {
    return {Variant::Direct, std::move(cut), std::move(target)};
  }

  /// Short tag such as "split@Y1->T".
  std::string describe() const;
};

class MachineRDInstance {
 public:
  /// `distortions` is keyed by model point name; the task output entry is required.
  MachineRDInstance(FiniteDistribution source, TaskModel model, std::map<std::string, DistortionMatrix> distortions);

  const FiniteDistribution& source() const noexcept { return source_; }
  const TaskModel& model() const noexcept { return model_; }
  const std::map<std::string, DistortionMatrix>& distortions() const noexcept { return distortions_; }

  const DistortionMatrix& task_distortion() const;
  /// Distortion at the model input, when provided.
  const DistortionMatrix* input_distortion() const;
  const DistortionMatrix& distortion_at(const std::string& point) const;
  bool has_distortion(const std::string& point) const { return distortions_.count(point) != 0; }

  const std::string& input_name() const { return model_.point_names().front(); }
  const std::string& task_name() const { return model_.point_names().back(); }

 private:
  FiniteDistribution source_;
  TaskModel model_;
  std::map<std::string, DistortionMatrix> distortions_;
};

class MissingDistortion : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct ReducedProblem {
  FiniteDistribution source;
  DistortionMatrix distortion;
};

/// Throws std::invalid_argument for unknown points, a missing cut, or a cut
/// deeper than the target.
void validate(const CodingApproach& approach, const TaskModel& model);

/// Reproduction alphabet of an approach: the input for FullInput, the cut otherwise.
const Alphabet& reproduction_alphabet(const MachineRDInstance& instance, const CodingApproach& approach);

ReducedProblem reduce(const MachineRDInstance& instance, const CodingApproach& approach);

RDCurve machine_rd(const MachineRDInstance& instance, const CodingApproach& approach, const RDSolverConfig& config);

/// Expected distortion at `target` of a channel laid out for `approach`
/// (source rows, reproduction columns). Pure evaluation.
double induced_distortion(const MachineRDInstance& instance, const CodingApproach& approach,
                          const Channel& channel, const std::string& target);

struct SupervisedGap {
  double input_cap = 0.0;
  double input_distortion = 0.0;       // achieved by the input-optimal channel
  double rate_unsupervised = 0.0;      // R_X(D_X; X)
  double induced_task_distortion = 0.0;
  double rate_supervised = 0.0;        // R_X(D_T'; T)
  double gap = 0.0;                    // unsupervised - supervised
  Channel input_channel;
};

/// Input-distortion-optimal quantizer at `input_cap`, its task distortion,
/// and the supervised rate at that task distortion.
SupervisedGap supervised_gap(const MachineRDInstance& instance, double input_cap, const RDSolverConfig& config);

/// Largest |left(D) - right(D)| over the given distortions, by interpolation.
double max_rate_difference(const RDCurve& left, const RDCurve& right, std::span<const double> distortions);
/// Largest right(D) - left(D) (positive when right lies above left).
double max_rate_excess(const RDCurve& left, const RDCurve& right, std::span<const double> distortions);

/// `count` points strictly inside (lo, hi), evenly spaced.
std::vector<double> interior_levels(double lo, double hi, std::size_t count);

}  // namespace rdm
