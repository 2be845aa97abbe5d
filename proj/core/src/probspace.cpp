#include "rdm/probspace.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <optional>
#include <set>
#include <sstream>

namespace rdm {

namespace {

double xlog2x_ratio(double a, double b) {
  // a * log2(a / b) with 0 log 0 = 0.
  if (a <= kSupportFloor) return 0.0;
  return a * std::log2(a / b);
}

void require_same(const Alphabet& a, const Alphabet& b, const char* where) {
  if (!(a == b)) {
    std::ostringstream os;
    os << where << ": alphabet mismatch (size " << a.size() << " vs " << b.size() << ")";
    throw AlphabetMismatch(os.str());
  }
}

void check_stochastic(std::span<const double> row, double tolerance, const std::string& what) {
  double total = 0.0;
  for (double v : row) {
    if (!std::isfinite(v) || v < 0.0) {
      throw InvalidDistribution(what + ": negative or non-finite mass");
    }
    total += v;
  }
  if (std::abs(total - 1.0) > tolerance) {
    std::ostringstream os;
    os.precision(17);
    os << what << ": masses sum to " << total;
    throw InvalidDistribution(os.str());
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// Alphabet

Alphabet::Alphabet(std::size_t size, std::vector<std::string> labels)
    : size_(size), labels_(std::move(labels)) {
  if (size_ == 0) throw std::invalid_argument("alphabet size must be at least 1");
  if (size_ > kMaxAlphabetSize) {
    throw std::invalid_argument("alphabet size " + std::to_string(size_) + " exceeds limit " +
                                std::to_string(kMaxAlphabetSize));
  }
  if (!labels_.empty()) {
    if (labels_.size() != size_) throw std::invalid_argument("alphabet labels must match its size");
    std::set<std::string> seen(labels_.begin(), labels_.end());
    if (seen.size() != labels_.size()) throw std::invalid_argument("alphabet labels must be distinct");
  }
}

std::string Alphabet::label(std::size_t i) const {
  return labels_.empty() ? std::to_string(i) : labels_.at(i);
}

// ---------------------------------------------------------------------------
// FiniteDistribution

FiniteDistribution::FiniteDistribution(Alphabet alphabet, std::vector<double> mass, double tolerance)
    : alphabet_(std::move(alphabet)), mass_(std::move(mass)) {
  if (mass_.size() != alphabet_.size()) {
    throw InvalidDistribution("distribution has " + std::to_string(mass_.size()) +
                              " masses for an alphabet of size " + std::to_string(alphabet_.size()));
  }
  check_stochastic(mass_, tolerance, "distribution");
}

FiniteDistribution FiniteDistribution::uniform(const Alphabet& alphabet) {
  return {alphabet, std::vector<double>(alphabet.size(), 1.0 / static_cast<double>(alphabet.size()))};
}

FiniteDistribution FiniteDistribution::point_mass(const Alphabet& alphabet, std::size_t symbol) {
  std::vector<double> mass(alphabet.size(), 0.0);
  mass.at(symbol) = 1.0;
  return {alphabet, std::move(mass)};
}

// ---------------------------------------------------------------------------
// DeterministicMap

DeterministicMap::DeterministicMap(Alphabet input, Alphabet output, std::vector<std::size_t> table)
    : input_(std::move(input)), output_(std::move(output)), table_(std::move(table)) {
  if (table_.size() != input_.size()) {
    throw std::invalid_argument("map table has " + std::to_string(table_.size()) +
                                " entries for an input alphabet of size " + std::to_string(input_.size()));
  }
  for (std::size_t i = 0; i < table_.size(); ++i) {
    if (table_[i] >= output_.size()) {
      throw std::invalid_argument("map entry " + std::to_string(i) + " = " + std::to_string(table_[i]) +
                                  " is outside the output alphabet");
    }
  }
}

DeterministicMap DeterministicMap::identity(const Alphabet& alphabet) {
  std::vector<std::size_t> table(alphabet.size());
  std::iota(table.begin(), table.end(), std::size_t{0});
  return {alphabet, alphabet, std::move(table)};
}

std::vector<bool> DeterministicMap::image() const {
  std::vector<bool> hit(output_.size(), false);
  for (auto j : table_) hit[j] = true;
  return hit;
}

bool DeterministicMap::is_surjective() const {
  auto hit = image();
  return std::all_of(hit.begin(), hit.end(), [](bool b) { return b; });
}

// ---------------------------------------------------------------------------
// Channel

Channel::Channel(Alphabet input, Alphabet output, std::vector<double> rows, double tolerance)
    : input_(std::move(input)), output_(std::move(output)), values_(std::move(rows)) {
  if (values_.size() != input_.size() * output_.size()) {
    throw InvalidDistribution("channel matrix has wrong shape");
  }
  for (std::size_t i = 0; i < input_.size(); ++i) {
    check_stochastic(row(i), tolerance, "channel row " + std::to_string(i));
  }
}

Channel Channel::identity(const Alphabet& alphabet) { return from_map(DeterministicMap::identity(alphabet)); }

Channel Channel::constant(const Alphabet& input, const Alphabet& output, std::size_t symbol) {
  if (symbol >= output.size()) throw std::out_of_range("constant channel symbol out of range");
  std::vector<double> rows(input.size() * output.size(), 0.0);
  for (std::size_t i = 0; i < input.size(); ++i) rows[i * output.size() + symbol] = 1.0;
  return {input, output, std::move(rows)};
}

Channel Channel::from_map(const DeterministicMap& map) {
  const auto n = map.input().size();
  const auto m = map.output().size();
  std::vector<double> rows(n * m, 0.0);
  for (std::size_t i = 0; i < n; ++i) rows[i * m + map(i)] = 1.0;
  return {map.input(), map.output(), std::move(rows)};
}

// ---------------------------------------------------------------------------
// DistortionMatrix

DistortionMatrix::DistortionMatrix(Alphabet rows, Alphabet cols, std::vector<double> values)
    : rows_(std::move(rows)), cols_(std::move(cols)), values_(std::move(values)) {
  if (values_.size() != rows_.size() * cols_.size()) {
    throw std::invalid_argument("distortion matrix has wrong shape");
  }
  for (double v : values_) {
    if (!std::isfinite(v) || v < 0.0) throw std::invalid_argument("distortion values must be finite and non-negative");
  }
}

DistortionMatrix DistortionMatrix::zero_one(const Alphabet& alphabet) {
  const auto n = alphabet.size();
  std::vector<double> v(n * n, 1.0);
  for (std::size_t i = 0; i < n; ++i) v[i * n + i] = 0.0;
  return {alphabet, alphabet, std::move(v)};
}

DistortionMatrix DistortionMatrix::hamming(const Alphabet& alphabet) {
  const auto n = alphabet.size();
  std::vector<double> v(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) v[i * n + j] = static_cast<double>(std::popcount(i ^ j));
  }
  return {alphabet, alphabet, std::move(v)};
}

// ---------------------------------------------------------------------------
// TaskModel

TaskModel::TaskModel(std::vector<std::string> point_names, std::vector<DeterministicMap> stages)
    : names_(std::move(point_names)), stages_(std::move(stages)) {
  if (stages_.empty()) throw std::invalid_argument("task model needs at least one stage");
  if (names_.size() != stages_.size() + 1) {
    throw std::invalid_argument("task model needs one point name per stage boundary");
  }
  std::set<std::string> seen(names_.begin(), names_.end());
  if (seen.size() != names_.size()) throw std::invalid_argument("task model point names must be distinct");
  for (std::size_t k = 0; k + 1 < stages_.size(); ++k) {
    if (!(stages_[k].output() == stages_[k + 1].input())) {
      throw AlphabetMismatch("task model stages " + std::to_string(k) + " and " + std::to_string(k + 1) +
                             " are not composable");
    }
  }
}

std::map<std::string, std::size_t> TaskModel::cuts() const {
  std::map<std::string, std::size_t> out;
  for (std::size_t k = 1; k < depth(); ++k) out.emplace(names_[k], k);
  return out;
}

bool TaskModel::has_point(const std::string& name) const {
  return std::find(names_.begin(), names_.end(), name) != names_.end();
}

std::size_t TaskModel::position(const std::string& name) const {
  auto it = std::find(names_.begin(), names_.end(), name);
  if (it == names_.end()) throw std::invalid_argument("unknown model point '" + name + "'");
  return static_cast<std::size_t>(it - names_.begin());
}

const Alphabet& TaskModel::alphabet_at(std::size_t pos) const {
  if (pos > depth()) throw std::out_of_range("model position out of range");
  return pos == 0 ? stages_.front().input() : stages_[pos - 1].output();
}

DeterministicMap TaskModel::map_between(std::size_t from, std::size_t to) const {
  if (from > to || to > depth()) throw std::invalid_argument("map_between requires from <= to <= depth");
  DeterministicMap m = DeterministicMap::identity(alphabet_at(from));
  for (std::size_t k = from; k < to; ++k) m = compose(m, stages_[k]);
  return m;
}

// ---------------------------------------------------------------------------
// Operations

DeterministicMap compose(const DeterministicMap& a, const DeterministicMap& b) {
  require_same(a.output(), b.input(), "compose");
  std::vector<std::size_t> table(a.input().size());
  for (std::size_t i = 0; i < table.size(); ++i) table[i] = b(a(i));
  return {a.input(), b.output(), std::move(table)};
}

FiniteDistribution pushforward(const FiniteDistribution& p, const DeterministicMap& m) {
  require_same(p.alphabet(), m.input(), "pushforward");
  std::vector<double> mass(m.output().size(), 0.0);
  for (std::size_t i = 0; i < p.size(); ++i) mass[m(i)] += p[i];
  return {m.output(), std::move(mass), kArithmeticTol};
}

Channel channel_then_map(const Channel& c, const DeterministicMap& m) {
  require_same(c.output(), m.input(), "channel_then_map");
  const auto out = m.output().size();
  std::vector<double> rows(c.rows() * out, 0.0);
  for (std::size_t i = 0; i < c.rows(); ++i) {
    for (std::size_t j = 0; j < c.cols(); ++j) rows[i * out + m(j)] += c(i, j);
  }
  return {c.input(), m.output(), std::move(rows), kArithmeticTol};
}

Channel map_then_channel(const DeterministicMap& m, const Channel& c) {
  require_same(m.output(), c.input(), "map_then_channel");
  const auto out = c.cols();
  std::vector<double> rows(m.input().size() * out);
  for (std::size_t i = 0; i < m.input().size(); ++i) {
    auto src = c.row(m(i));
    std::copy(src.begin(), src.end(), rows.begin() + static_cast<std::ptrdiff_t>(i * out));
  }
  return {m.input(), c.output(), std::move(rows), kArithmeticTol};
}

Channel induced_channel(const FiniteDistribution& p, const Channel& c, const DeterministicMap& g) {
  require_same(p.alphabet(), c.input(), "induced_channel");
  require_same(p.alphabet(), g.input(), "induced_channel");
  const auto ny = g.output().size();
  const auto nz = c.cols();
  std::vector<double> joint(ny * nz, 0.0);
  std::vector<double> py(ny, 0.0);
  for (std::size_t x = 0; x < p.size(); ++x) {
    py[g(x)] += p[x];
    for (std::size_t z = 0; z < nz; ++z) joint[g(x) * nz + z] += p[x] * c(x, z);
  }
  for (std::size_t y = 0; y < ny; ++y) {
    for (std::size_t z = 0; z < nz; ++z) {
      double& v = joint[y * nz + z];
      v = py[y] > kSupportFloor ? v / py[y] : 1.0 / static_cast<double>(nz);
    }
  }
  return {g.output(), c.output(), std::move(joint), kArithmeticTol};
}

FiniteDistribution output_marginal(const FiniteDistribution& p, const Channel& c) {
  require_same(p.alphabet(), c.input(), "output_marginal");
  std::vector<double> q(c.cols(), 0.0);
  for (std::size_t x = 0; x < p.size(); ++x) {
    if (p[x] == 0.0) continue;
    for (std::size_t j = 0; j < c.cols(); ++j) q[j] += p[x] * c(x, j);
  }
  return {c.output(), std::move(q), kArithmeticTol};
}

double entropy(const FiniteDistribution& p) {
  double h = 0.0;
  for (double v : p.mass()) {
    if (v > kSupportFloor) h -= v * std::log2(v);
  }
  return std::max(h, 0.0);
}

double mutual_information(const FiniteDistribution& p, const Channel& c) {
  require_same(p.alphabet(), c.input(), "mutual_information");
  const auto q = output_marginal(p, c);
  double info = 0.0;
  for (std::size_t x = 0; x < p.size(); ++x) {
    if (p[x] <= kSupportFloor) continue;
    double row = 0.0;
    for (std::size_t j = 0; j < c.cols(); ++j) row += xlog2x_ratio(c(x, j), q[j]);
    info += p[x] * row;
  }
  return std::max(info, 0.0);
}

double expected_distortion(const FiniteDistribution& p, const Channel& c, const DistortionMatrix& d) {
  require_same(p.alphabet(), c.input(), "expected_distortion");
  require_same(p.alphabet(), d.row_alphabet(), "expected_distortion");
  require_same(c.output(), d.col_alphabet(), "expected_distortion");
  double total = 0.0;
  for (std::size_t x = 0; x < p.size(); ++x) {
    double row = 0.0;
    for (std::size_t j = 0; j < c.cols(); ++j) row += c(x, j) * d(x, j);
    total += p[x] * row;
  }
  return total;
}

Channel merge_reproduction_letters(const Channel& c, std::size_t keep, std::size_t drop) {
  if (keep >= c.cols() || drop >= c.cols()) throw std::out_of_range("merge: letter index out of range");
  if (keep == drop) throw std::invalid_argument("merge: keep and drop must differ");
  std::vector<double> rows(c.values().begin(), c.values().end());
  for (std::size_t i = 0; i < c.rows(); ++i) {
    rows[i * c.cols() + keep] += rows[i * c.cols() + drop];
    rows[i * c.cols() + drop] = 0.0;
  }
  return {c.input(), c.output(), std::move(rows), kArithmeticTol};
}

namespace {

// For each letter at the cut: lowest x with f(x) == h(letter), if any.
std::vector<std::optional<std::size_t>> representatives(const TaskModel& model, const std::string& cut) {
  const auto pos = model.position(cut);
  const auto f = model.task_map();
  const auto h = model.map_between(pos, model.depth());
  std::vector<std::optional<std::size_t>> first_preimage(model.task_alphabet().size());
  for (std::size_t x = 0; x < f.input().size(); ++x) {
    if (!first_preimage[f(x)]) first_preimage[f(x)] = x;
  }
  std::vector<std::optional<std::size_t>> reps(h.input().size());
  for (std::size_t y = 0; y < reps.size(); ++y) reps[y] = first_preimage[h(y)];
  return reps;
}

}  // namespace

DeterministicMap indirect_inverse(const TaskModel& model, const std::string& cut) {
  auto reps = representatives(model, cut);
  std::vector<std::size_t> table(reps.size());
  for (std::size_t y = 0; y < reps.size(); ++y) {
    if (!reps[y]) {
      throw HypothesisViolated("reproduction letter " + model.alphabet(cut).label(y) + " at '" + cut +
                               "' has a task output outside the image of the task model");
    }
    table[y] = *reps[y];
  }
  return {model.alphabet(cut), model.input_alphabet(), std::move(table)};
}

Channel lift_reproduction(const Channel& c, const TaskModel& model, const std::string& cut) {
  require_same(c.output(), model.alphabet(cut), "lift_reproduction");
  auto reps = representatives(model, cut);
  std::vector<std::size_t> table(reps.size(), 0);
  for (std::size_t y = 0; y < reps.size(); ++y) {
    if (reps[y]) {
      table[y] = *reps[y];
      continue;
    }
    // Only letters the channel actually emits need a preimage.
    for (std::size_t i = 0; i < c.rows(); ++i) {
      if (c(i, y) > kSupportFloor) {
        throw HypothesisViolated("reproduction letter " + c.output().label(y) + " at '" + cut +
                                 "' is used but its task output has no preimage");
      }
    }
  }
  return channel_then_map(c, DeterministicMap(c.output(), model.input_alphabet(), std::move(table)));
}

}  // namespace rdm
