#pragma once

// Randomized instances and pass/fail checks for the equalities and
// inequalities between machine rate-distortion functions.
//
// Theorem ids:
//   thm1              direct coding vs model splitting at every cut
//   thm2              full-input coding vs model splitting (image condition holds)
//   thm2a             as thm2, when out-of-image letters have a no-worse substitute
//   cor-multi-split   full input, Y1 and Y2 splits all agree
//   cor-distillation  distortion measured at Y2: direct@Y1, split@Y1, split@Y2 agree
//   deeper-split      R_Y2(D;T) <= R_Y1(D;T)
//   thm3              supervised rate never exceeds the unsupervised one
//   thm4              strictly lower when two used letters share a task output
//   merge-transform   merging task-equivalent letters keeps distortion, lowers I

#include <cstdint>
#include <string>
#include <vector>

#include "rdm/machine_rd.hpp"

namespace rdm {

enum class DistortionKind { ZeroOne, RandomNonneg, Hamming };

std::string to_string(DistortionKind kind);
DistortionKind parse_distortion_kind(const std::string& text);

struct InstanceSpec {
  /// Alphabet sizes along X -> Y1 -> Y2 -> T. A zero y1 or y2 drops that point.
  std::size_t x = 6;
  std::size_t y1 = 3;
  std::size_t y2 = 0;
  std::size_t t = 2;
  std::uint64_t seed = 0;
  DistortionKind kind = DistortionKind::ZeroOne;
  /// When false, every intermediate alphabet and T get one extra letter
  /// chained to a task output that no input reaches.
  bool enforce_thm2 = true;
  /// Guarantees two inputs with the same task output.
  bool enforce_thm4 = false;
  /// With enforce_thm2 off: the unreachable task letter is never cheaper
  /// than a fixed reachable one.
  bool dominated_extras = false;

  /// Throws std::invalid_argument on inconsistent sizes or flags.
  void validate() const;
};

/// Deterministic in the spec. Stage maps are surjective onto their
/// reachable part; the source has full support; every point carries a
/// distortion matrix of the requested kind.
MachineRDInstance generate_instance(const InstanceSpec& spec);

struct Verdict {
  std::string theorem;
  std::string description;
  std::size_t instances = 0;
  double max_violation = 0.0;
  double tolerance = 0.0;
  bool pass = true;
  std::vector<std::uint64_t> seeds;
  std::vector<std::uint64_t> failing_seeds;
  /// Solver or construction failures, "seed N: message".
  std::vector<std::string> errors;
};

const std::vector<std::string>& theorem_ids();
std::string theorem_description(const std::string& id);
/// Throws std::invalid_argument listing the valid ids.
void require_theorem(const std::string& id);

/// Tolerance applied to a theorem; `equality_tol` is used by the equality checks.
double theorem_tolerance(const std::string& id, double equality_tol);

inline constexpr double kEqualityTol = 1e-6;
inline constexpr double kInequalityTol = 1e-8;
inline constexpr double kStrictMargin = 1e-4;
inline constexpr double kMergeTol = 1e-12;
inline constexpr double kMergeStrict = 1e-9;
inline constexpr std::size_t kMergeChannelsPerSpec = 20;

/// The suite's default specs for a theorem: `count` consecutive seeds from `base_seed`.
std::vector<InstanceSpec> default_specs(const std::string& id, std::size_t count, std::uint64_t base_seed);

struct InstanceCheck {
  double violation = 0.0;
  /// Comparisons actually made (levels, or channels for merge-transform).
  std::size_t checks = 0;
};

/// One theorem on one instance at `levels` distortion levels. Throws on solver failure.
InstanceCheck check_instance(const std::string& id, const MachineRDInstance& instance, std::size_t levels,
                             const RDSolverConfig& config, std::uint64_t seed = 0);

/// Runs the check on every spec (in parallel) and aggregates in spec order.
Verdict verify(const std::string& id, const std::vector<InstanceSpec>& specs, std::size_t levels, double tolerance,
               const RDSolverConfig& config);

Verdict verify_merge_property(const std::vector<InstanceSpec>& specs);

/// Merge restricted to letters of the full-input reproduction alphabet with
/// equal task output; throws HypothesisViolated otherwise.
Channel merge_task_equivalent(const MachineRDInstance& instance, const Channel& channel, std::size_t keep,
                              std::size_t drop);

struct MergeOutcome {
  double delta_distortion = 0.0;  // after - before
  double delta_information = 0.0;
  bool posteriors_differ = false;
};

/// Merge `drop` into `keep` for a channel over the full-input reduction.
MergeOutcome evaluate_merge(const MachineRDInstance& instance, const Channel& channel, std::size_t keep,
                            std::size_t drop);

/// Stable JSON text for a verdict (numbers rounded to 12 significant digits).
std::string verdict_to_json(const Verdict& verdict);

}  // namespace rdm
