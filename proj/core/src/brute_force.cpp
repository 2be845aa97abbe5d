// Exhaustive grid-search oracle for R(D) on tiny instances. It shares no
// code with the Blahut-Arimoto path beyond the input types.

#include <algorithm>
#include <cmath>
#include <limits>

#include "rdm/rd_solver.hpp"

namespace rdm {

namespace {

struct Candidate {
  std::vector<double> row;
  std::vector<double> weighted;  // p(x) * row
  double weighted_entropy = 0.0; // p(x) * H(row), bits
  double weighted_distortion = 0.0;
};

struct Search {
  std::size_t n = 0;
  std::size_t m = 0;
  double cap = 0.0;
  std::vector<std::vector<Candidate>> candidates;
  std::vector<double> min_tail;  // least distortion achievable by rows x..n-1
  double best = std::numeric_limits<double>::infinity();
  std::vector<std::size_t> best_choice;
  std::vector<std::size_t> choice;

  void run() {
    min_tail.assign(n + 1, 0.0);
    for (std::size_t x = n; x-- > 0;) {
      double lo = std::numeric_limits<double>::infinity();
      for (const auto& c : candidates[x]) lo = std::min(lo, c.weighted_distortion);
      min_tail[x] = min_tail[x + 1] + lo;
    }
    choice.assign(n, 0);
    std::vector<double> marginal(m, 0.0);
    descend(0, marginal, 0.0, 0.0);
  }

  void descend(std::size_t x, const std::vector<double>& marginal, double cond_entropy, double distortion) {
    if (x == n) {
      double h = 0.0;
      for (double v : marginal) {
        if (v > 0.0) h -= v * std::log2(v);
      }
      const double info = std::max(h - cond_entropy, 0.0);
      if (info < best) {
        best = info;
        best_choice = choice;
      }
      return;
    }
    std::vector<double> next(m);
    for (std::size_t k = 0; k < candidates[x].size(); ++k) {
      const auto& c = candidates[x][k];
      const double dist = distortion + c.weighted_distortion;
      if (dist + min_tail[x + 1] > cap) continue;
      for (std::size_t j = 0; j < m; ++j) next[j] = marginal[j] + c.weighted[j];
      choice[x] = k;
      descend(x + 1, next, cond_entropy + c.weighted_entropy, dist);
    }
  }
};

Candidate make_candidate(std::vector<double> row, double px, const DistortionMatrix& d, std::size_t x) {
  Candidate c;
  c.weighted.resize(row.size());
  double h = 0.0;
  double dist = 0.0;
  for (std::size_t j = 0; j < row.size(); ++j) {
    c.weighted[j] = px * row[j];
    if (row[j] > 0.0) h -= row[j] * std::log2(row[j]);
    dist += row[j] * d(x, j);
  }
  c.weighted_entropy = px * h;
  c.weighted_distortion = px * dist;
  c.row = std::move(row);
  return c;
}

void compositions(std::size_t total, std::size_t parts, std::vector<std::size_t>& cur,
                  std::vector<std::vector<std::size_t>>& out) {
  if (parts == 1) {
    cur.push_back(total);
    out.push_back(cur);
    cur.pop_back();
    return;
  }
  for (std::size_t k = 0; k <= total; ++k) {
    cur.push_back(k);
    compositions(total - k, parts - 1, cur, out);
    cur.pop_back();
  }
}

// Integer vectors with zero sum and every entry within [-radius, radius].
std::vector<std::vector<int>> zero_sum_moves(std::size_t m, int radius) {
  std::vector<std::vector<int>> out;
  std::vector<int> v(m, 0);
  auto rec = [&](auto&& self, std::size_t i, int sum) -> void {
    if (i + 1 == m) {
      if (std::abs(sum) <= radius) {
        v[i] = -sum;
        out.push_back(v);
      }
      return;
    }
    for (int a = -radius; a <= radius; ++a) {
      v[i] = a;
      self(self, i + 1, sum + a);
    }
  };
  rec(rec, 0, 0);
  return out;
}

}  // namespace

double brute_force_rd(const FiniteDistribution& source, const DistortionMatrix& d, double cap,
                      std::size_t grid_steps, std::size_t refinement_rounds) {
  if (!(source.alphabet() == d.row_alphabet())) throw AlphabetMismatch("brute_force_rd: source/distortion mismatch");
  const std::size_t n = d.rows();
  const std::size_t m = d.cols();
  if (n > 4 || m > 3) throw InstanceTooLarge("brute_force_rd supports at most 4 source and 3 reproduction letters");
  if (grid_steps == 0 || grid_steps > 20) throw InstanceTooLarge("brute_force_rd grid_steps must be in [1, 20]");

  Search search;
  search.n = n;
  search.m = m;
  // slack for summation order, so a cap equal to an achievable distortion is feasible
  search.cap = cap + 1e-12 * std::max(1.0, std::abs(cap));

  std::vector<std::vector<std::size_t>> grid;
  std::vector<std::size_t> cur;
  compositions(grid_steps, m, cur, grid);
  search.candidates.resize(n);
  for (std::size_t x = 0; x < n; ++x) {
    if (source[x] == 0.0) {
      std::vector<double> row(m, 0.0);
      row[0] = 1.0;
      search.candidates[x].push_back(make_candidate(std::move(row), 0.0, d, x));
      continue;
    }
    for (const auto& g : grid) {
      std::vector<double> row(m);
      for (std::size_t j = 0; j < m; ++j) row[j] = static_cast<double>(g[j]) / static_cast<double>(grid_steps);
      search.candidates[x].push_back(make_candidate(std::move(row), source[x], d, x));
    }
  }
  search.run();
  if (!std::isfinite(search.best)) return search.best;

  // Zoom: re-grid a neighbourhood of twice the previous spacing around the incumbent.
  const int radius = std::max(2, static_cast<int>(grid_steps / 2));
  const auto moves = zero_sum_moves(m, radius);
  double spacing = 1.0 / static_cast<double>(grid_steps);
  for (std::size_t round = 0; round < refinement_rounds; ++round) {
    const double fine = 2.0 * spacing / static_cast<double>(radius);
    std::vector<std::vector<Candidate>> next(n);
    for (std::size_t x = 0; x < n; ++x) {
      const auto centre = search.candidates[x][search.best_choice[x]].row;
      if (source[x] == 0.0) {
        next[x].push_back(make_candidate(centre, 0.0, d, x));
        continue;
      }
      for (const auto& mv : moves) {
        std::vector<double> row(m);
        bool ok = true;
        for (std::size_t j = 0; j < m && ok; ++j) {
          row[j] = centre[j] + fine * mv[j];
          if (row[j] < -1e-15) ok = false;
          row[j] = std::max(row[j], 0.0);
        }
        if (!ok) continue;
        double total = 0.0;
        for (double v : row) total += v;
        for (double& v : row) v /= total;
        next[x].push_back(make_candidate(std::move(row), source[x], d, x));
      }
    }
    // The incumbent (zero move) is always a candidate, so the best never worsens.
    search.candidates = std::move(next);
    search.best = std::numeric_limits<double>::infinity();
    search.run();
    spacing = fine;
  }
  return search.best;
}

}  // namespace rdm
