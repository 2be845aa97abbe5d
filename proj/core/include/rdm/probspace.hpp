#pragma once

// Finite probability spaces: alphabets, distributions, channels (quantizers),
// deterministic maps, multi-stage task models and distortion matrices, plus
// the information-theoretic primitives built on them. All logarithms are
// base 2, so every rate is in bits.

#include <cstddef>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace rdm {

/// Desk-scale tooling limit on alphabet sizes.
inline constexpr std::size_t kMaxAlphabetSize = 64;
/// Tolerance on stochasticity when a value is built from user input.
inline constexpr double kConstructionTol = 1e-12;
/// Tolerance on stochasticity after arithmetic.
inline constexpr double kArithmeticTol = 1e-10;
/// Masses below this are treated as exact zeros.
inline constexpr double kSupportFloor = 1e-300;

class AlphabetMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class InvalidDistribution : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when an instance does not satisfy the hypothesis an operation
/// relies on (e.g. a reproduction letter whose task output has no preimage).
class HypothesisViolated : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class Alphabet {
 public:
  explicit Alphabet(std::size_t size, std::vector<std::string> labels = {});

  std::size_t size() const noexcept { return size_; }
  const std::vector<std::string>& labels() const noexcept { return labels_; }
  /// The label of symbol i, or its decimal index when unlabeled.
  std::string label(std::size_t i) const;

  bool operator==(const Alphabet&) const = default;

 private:
  std::size_t size_;
  std::vector<std::string> labels_;
};

class FiniteDistribution {
 public:
  FiniteDistribution(Alphabet alphabet, std::vector<double> mass,
                     double tolerance = kConstructionTol);

  static FiniteDistribution uniform(const Alphabet& alphabet);
  static FiniteDistribution point_mass(const Alphabet& alphabet, std::size_t symbol);

  const Alphabet& alphabet() const noexcept { return alphabet_; }
  std::size_t size() const noexcept { return mass_.size(); }
  std::span<const double> mass() const noexcept { return mass_; }
  double operator[](std::size_t i) const { return mass_[i]; }

 private:
  Alphabet alphabet_;
  std::vector<double> mass_;
};

class DeterministicMap {
 public:
  DeterministicMap(Alphabet input, Alphabet output, std::vector<std::size_t> table);

  static DeterministicMap identity(const Alphabet& alphabet);

  const Alphabet& input() const noexcept { return input_; }
  const Alphabet& output() const noexcept { return output_; }
  std::span<const std::size_t> table() const noexcept { return table_; }
  std::size_t operator()(std::size_t i) const { return table_[i]; }

  /// Symbols of the output alphabet hit by at least one input.
  std::vector<bool> image() const;
  bool is_surjective() const;

 private:
  Alphabet input_;
  Alphabet output_;
  std::vector<std::size_t> table_;
};

/// Row-stochastic matrix p(out | in), stored row-major.
class Channel {
 public:
  Channel(Alphabet input, Alphabet output, std::vector<double> rows,
          double tolerance = kConstructionTol);

  static Channel identity(const Alphabet& alphabet);
  static Channel constant(const Alphabet& input, const Alphabet& output, std::size_t symbol);
  /// Rows of point masses realizing a deterministic map.
  static Channel from_map(const DeterministicMap& map);

  const Alphabet& input() const noexcept { return input_; }
  const Alphabet& output() const noexcept { return output_; }
  std::size_t rows() const noexcept { return input_.size(); }
  std::size_t cols() const noexcept { return output_.size(); }
  double operator()(std::size_t in, std::size_t out) const { return values_[in * cols() + out]; }
  std::span<const double> row(std::size_t in) const {
    return std::span<const double>(values_).subspan(in * cols(), cols());
  }
  std::span<const double> values() const noexcept { return values_; }

 private:
  Alphabet input_;
  Alphabet output_;
  std::vector<double> values_;
};

class DistortionMatrix {
 public:
  DistortionMatrix(Alphabet rows, Alphabet cols, std::vector<double> values);

  /// d(a, b) = [a != b].
  static DistortionMatrix zero_one(const Alphabet& alphabet);
  /// Number of differing bits between the binary codes of the two indices.
  static DistortionMatrix hamming(const Alphabet& alphabet);

  const Alphabet& row_alphabet() const noexcept { return rows_; }
  const Alphabet& col_alphabet() const noexcept { return cols_; }
  std::size_t rows() const noexcept { return rows_.size(); }
  std::size_t cols() const noexcept { return cols_.size(); }
  double operator()(std::size_t r, std::size_t c) const { return values_[r * cols() + c]; }
  std::span<const double> values() const noexcept { return values_; }

  bool operator==(const DistortionMatrix&) const = default;

 private:
  Alphabet rows_;
  Alphabet cols_;
  std::vector<double> values_;
};

/// Chain of deterministic stages X -> ... -> T with a name for every
/// stage boundary. Position 0 is the input, position depth() the task output.
class TaskModel {
 public:
  TaskModel(std::vector<std::string> point_names, std::vector<DeterministicMap> stages);

  std::size_t depth() const noexcept { return stages_.size(); }
  const std::vector<DeterministicMap>& stages() const noexcept { return stages_; }
  const std::vector<std::string>& point_names() const noexcept { return names_; }
  /// Interior boundaries (cut candidates) and their chain positions.
  std::map<std::string, std::size_t> cuts() const;

  bool has_point(const std::string& name) const;
  std::size_t position(const std::string& name) const;
  const Alphabet& alphabet_at(std::size_t position) const;
  const Alphabet& alphabet(const std::string& name) const { return alphabet_at(position(name)); }
  const Alphabet& input_alphabet() const { return alphabet_at(0); }
  const Alphabet& task_alphabet() const { return alphabet_at(depth()); }

  /// Composition of the stages between two positions (identity when equal).
  DeterministicMap map_between(std::size_t from, std::size_t to) const;
  /// The full task model f.
  DeterministicMap task_map() const { return map_between(0, depth()); }

 private:
  std::vector<std::string> names_;
  std::vector<DeterministicMap> stages_;
};

/// (b after a): result(i) = b(a(i)).
DeterministicMap compose(const DeterministicMap& a, const DeterministicMap& b);

FiniteDistribution pushforward(const FiniteDistribution& p, const DeterministicMap& m);

/// X -> Xhat -> m(Xhat): post-process the channel output with a map.
Channel channel_then_map(const Channel& c, const DeterministicMap& m);
/// X -> m(X) -> channel: feed the mapped symbol into the channel.
Channel map_then_channel(const DeterministicMap& m, const Channel& c);
/// Given p over X, a channel X -> Z and a map g: X -> Y, the conditional
/// p(z | y) induced on Y = g(X). Rows of unreachable y are uniform.
Channel induced_channel(const FiniteDistribution& p, const Channel& c, const DeterministicMap& g);

/// Output marginal sum_x p(x) c(z | x).
FiniteDistribution output_marginal(const FiniteDistribution& p, const Channel& c);

double entropy(const FiniteDistribution& p);
double mutual_information(const FiniteDistribution& p, const Channel& c);
double expected_distortion(const FiniteDistribution& p, const Channel& c, const DistortionMatrix& d);

/// Moves every bit of mass from output column `drop` onto column `keep`.
Channel merge_reproduction_letters(const Channel& c, std::size_t keep, std::size_t drop);

/// Replaces every reproduction letter y at `cut` by the lowest-index input
/// x with f(x) == h(y), where h maps the cut to the task output.
/// Throws HypothesisViolated when some h(y) has no preimage under f.
Channel lift_reproduction(const Channel& c, const TaskModel& model, const std::string& cut);

/// The relabeling used by lift_reproduction, exposed for inspection.
DeterministicMap indirect_inverse(const TaskModel& model, const std::string& cut);

}  // namespace rdm
