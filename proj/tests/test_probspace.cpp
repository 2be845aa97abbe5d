#include <cmath>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "rdm/probspace.hpp"
#include "test_util.hpp"

using namespace rdm;

TEST_CASE("alphabet labels") {
  Alphabet a(3, {"a", "b", "c"});
  CHECK(a.label(1) == "b");
  Alphabet b(2);
  CHECK(b.label(1) == "1");
  CHECK_THROWS_AS(Alphabet(2, {"only"}), std::invalid_argument);
  CHECK_THROWS(Alphabet(0));
  CHECK_THROWS(Alphabet(kMaxAlphabetSize + 1));
}

TEST_CASE("distribution validation") {
  Alphabet a(3);
  CHECK_NOTHROW(FiniteDistribution(a, {0.2, 0.3, 0.5}));
  CHECK_THROWS_AS(FiniteDistribution(a, {0.2, 0.3, 0.6}), InvalidDistribution);
  CHECK_THROWS_AS(FiniteDistribution(a, {-0.1, 0.6, 0.5}), InvalidDistribution);
  CHECK_THROWS_AS(FiniteDistribution(a, {0.5, 0.5}), std::invalid_argument);
  CHECK_THROWS_AS(FiniteDistribution(a, {NAN, 0.5, 0.5}), InvalidDistribution);
}

TEST_CASE("channel validation") {
  Alphabet a(2), b(2);
  CHECK_NOTHROW(Channel(a, b, {0.5, 0.5, 1.0, 0.0}));
  CHECK_THROWS_AS(Channel(a, b, {0.5, 0.6, 1.0, 0.0}), InvalidDistribution);
  CHECK_THROWS_AS(Channel(a, b, {1.5, -0.5, 1.0, 0.0}), InvalidDistribution);
  CHECK_THROWS(Channel(a, b, {1.0, 0.0, 1.0}));
}

TEST_CASE("map validation and image") {
  Alphabet a(4), b(3);
  CHECK_THROWS(DeterministicMap(a, b, {0, 1, 3, 0}));
  DeterministicMap m(a, b, {0, 0, 2, 2});
  CHECK_FALSE(m.is_surjective());
  CHECK(m.image() == std::vector<bool>{true, false, true});
  CHECK(DeterministicMap(a, b, {0, 1, 2, 2}).is_surjective());
}

TEST_CASE("entropy of a binary source matches the closed form") {
  for (double p : {0.01, 0.1, 0.25, 0.5, 0.9}) {
    FiniteDistribution d(Alphabet(2), {p, 1 - p});
    CHECK(entropy(d) == doctest::Approx(oracle::binary_entropy(p)).epsilon(1e-14));
  }
  CHECK(entropy(FiniteDistribution::point_mass(Alphabet(4), 2)) == 0.0);
  CHECK(entropy(FiniteDistribution::uniform(Alphabet(8))) == doctest::Approx(3.0));
}

TEST_CASE("mutual information of a binary symmetric channel") {
  for (double e : {0.0, 0.05, 0.2, 0.5}) {
    FiniteDistribution p = FiniteDistribution::uniform(Alphabet(2));
    Channel c(Alphabet(2), Alphabet(2), {1 - e, e, e, 1 - e});
    CHECK(mutual_information(p, c) == doctest::Approx(1.0 - oracle::binary_entropy(e)).epsilon(1e-13));
  }
}

TEST_CASE("mutual information and distortion against the joint-table oracles") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 2 + rng() % 6, m = 2 + rng() % 5;
    auto p = testutil::random_distribution(rng, n, 0.0);
    auto c = testutil::random_channel(rng, n, m);
    auto d = testutil::random_distortion(rng, n, m);
    CHECK(mutual_information(p, c) == doctest::Approx(oracle::mi_from_joint(oracle::joint(p, c))).epsilon(1e-12));
    CHECK(expected_distortion(p, c, d) == doctest::Approx(oracle::expected_distortion(p, c, d)).epsilon(1e-13));
  }
}

TEST_CASE("composition matches marginalizing the joint tensor on 4x3x2") {
  std::mt19937_64 rng(11);
  // map X(4) -> Y(3), channel Y -> Z(2)
  auto m = testutil::random_map(rng, 4, 3);
  auto c = testutil::random_channel(rng, 3, 2);
  auto mc = map_then_channel(m, c);
  for (std::size_t x = 0; x < 4; ++x) {
    for (std::size_t z = 0; z < 2; ++z) {
      double s = 0.0;
      for (std::size_t y = 0; y < 3; ++y) s += (m(x) == y ? 1.0 : 0.0) * c(y, z);
      CHECK(mc(x, z) == doctest::Approx(s).epsilon(1e-15));
    }
  }
  // channel X(4) -> Z(3), map Z -> W(2)
  auto c2 = testutil::random_channel(rng, 4, 3);
  auto m2 = testutil::random_map(rng, 3, 2);
  auto cm = channel_then_map(c2, m2);
  for (std::size_t x = 0; x < 4; ++x) {
    for (std::size_t w = 0; w < 2; ++w) {
      double s = 0.0;
      for (std::size_t z = 0; z < 3; ++z) s += c2(x, z) * (m2(z) == w ? 1.0 : 0.0);
      CHECK(cm(x, w) == doctest::Approx(s).epsilon(1e-15));
    }
  }
}

TEST_CASE("induced channel is the Bayes conditional on the mapped variable") {
  std::mt19937_64 rng(3);
  auto p = testutil::random_distribution(rng, 5);
  auto c = testutil::random_channel(rng, 5, 3);
  DeterministicMap g(Alphabet(5), Alphabet(3), {0, 0, 1, 1, 1});
  auto ic = induced_channel(p, c, g);
  for (std::size_t y = 0; y < 2; ++y) {
    double py = 0.0;
    for (std::size_t x = 0; x < 5; ++x) py += g(x) == y ? p[x] : 0.0;
    for (std::size_t z = 0; z < 3; ++z) {
      double num = 0.0;
      for (std::size_t x = 0; x < 5; ++x) num += g(x) == y ? p[x] * c(x, z) : 0.0;
      CHECK(ic(y, z) == doctest::Approx(num / py).epsilon(1e-13));
    }
  }
  // unreachable y gets a uniform row
  for (std::size_t z = 0; z < 3; ++z) CHECK(ic(2, z) == doctest::Approx(1.0 / 3));
}

TEST_CASE("pushforward and output marginal") {
  FiniteDistribution p(Alphabet(4), {0.1, 0.2, 0.3, 0.4});
  DeterministicMap m(Alphabet(4), Alphabet(2), {1, 0, 1, 0});
  auto q = pushforward(p, m);
  CHECK(q[0] == doctest::Approx(0.6));
  CHECK(q[1] == doctest::Approx(0.4));
  auto via_channel = output_marginal(p, Channel::from_map(m));
  CHECK(via_channel[0] == doctest::Approx(0.6));
}

TEST_CASE("data processing: post-processing never increases information") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 2 + rng() % 6, m = 2 + rng() % 6, k = 1 + rng() % 4;
    auto p = testutil::random_distribution(rng, n, 0.0);
    auto c = testutil::random_channel(rng, n, m);
    auto f = testutil::random_map(rng, m, k);
    auto after = channel_then_map(c, f);
    CHECK(mutual_information(p, after) <= mutual_information(p, c) + 1e-12);
    CHECK(testutil::row_sum_error(after) < 1e-12);
    auto before = map_then_channel(testutil::random_map(rng, n, n), c);
    CHECK(testutil::row_sum_error(before) < 1e-12);
  }
}

TEST_CASE("merging reproduction letters") {
  std::mt19937_64 rng(9);
  auto p = testutil::random_distribution(rng, 4);
  auto c = testutil::random_channel(rng, 4, 3);
  auto merged = merge_reproduction_letters(c, 0, 2);
  for (std::size_t x = 0; x < 4; ++x) {
    CHECK(merged(x, 0) == doctest::Approx(c(x, 0) + c(x, 2)));
    CHECK(merged(x, 1) == doctest::Approx(c(x, 1)));
    CHECK(merged(x, 2) == 0.0);
  }
  CHECK(mutual_information(p, merged) <= mutual_information(p, c) + 1e-12);

  // equal columns: the merged letter carried no extra information
  Channel same(Alphabet(2), Alphabet(3), {0.2, 0.4, 0.4, 0.1, 0.6, 0.3});
  FiniteDistribution q(Alphabet(2), {0.5, 0.5});
  // columns 1 and 2 are not proportional here; build proportional ones
  Channel prop(Alphabet(2), Alphabet(3), {0.2, 0.2, 0.6, 0.3, 0.3, 0.4});
  CHECK(mutual_information(q, merge_reproduction_letters(prop, 0, 1)) ==
        doctest::Approx(mutual_information(q, prop)).epsilon(1e-13));
  CHECK(mutual_information(q, merge_reproduction_letters(same, 1, 2)) < mutual_information(q, same));
  CHECK_THROWS(merge_reproduction_letters(c, 1, 1));
}

TEST_CASE("task model composition") {
  DeterministicMap g(Alphabet(6), Alphabet(3), {0, 0, 1, 1, 2, 2});
  DeterministicMap h(Alphabet(3), Alphabet(2), {0, 1, 1});
  TaskModel model({"X", "Y1", "T"}, {g, h});
  CHECK(model.depth() == 2);
  CHECK(model.position("Y1") == 1);
  CHECK(model.cuts() == std::map<std::string, std::size_t>{{"Y1", 1}});
  auto f = model.task_map();
  for (std::size_t x = 0; x < 6; ++x) CHECK(f(x) == h(g(x)));
  CHECK(model.map_between(1, 1).table()[2] == 2);
  CHECK_THROWS(model.position("Z"));
  CHECK_THROWS(TaskModel({"X", "Y", "T"}, {h}));
  CHECK_THROWS(TaskModel({"X", "T"}, {h, g}));
  CHECK_THROWS(TaskModel({"X", "X", "T"}, {g, h}));
}

TEST_CASE("lift_reproduction picks the lowest-index preimage") {
  DeterministicMap g(Alphabet(4), Alphabet(3), {0, 1, 1, 2});
  DeterministicMap h(Alphabet(3), Alphabet(2), {0, 1, 0});
  TaskModel model({"X", "Y1", "T"}, {g, h});
  auto inv = indirect_inverse(model, "Y1");
  // f = h o g = {0, 1, 1, 0}
  CHECK(inv(0) == 0);
  CHECK(inv(1) == 1);
  CHECK(inv(2) == 0);
  Channel c(Alphabet(4), Alphabet(3), {1, 0, 0, 0, 1, 0, 0, 0.5, 0.5, 0, 0, 1});
  auto lifted = lift_reproduction(c, model, "Y1");
  CHECK(lifted.cols() == 4);
  CHECK(lifted(2, 0) == doctest::Approx(0.5));
  CHECK(lifted(2, 1) == doctest::Approx(0.5));

  DeterministicMap h2(Alphabet(3), Alphabet(3), {0, 1, 2});
  DeterministicMap g2(Alphabet(4), Alphabet(3), {0, 1, 1, 0});
  TaskModel bad({"X", "Y1", "T"}, {g2, h2});
  CHECK_THROWS_AS(indirect_inverse(bad, "Y1"), HypothesisViolated);
}

TEST_CASE("distortion matrix builders") {
  auto h = DistortionMatrix::hamming(Alphabet(4));
  CHECK(h(0, 3) == 2);
  CHECK(h(1, 2) == 2);
  CHECK(h(2, 3) == 1);
  auto z = DistortionMatrix::zero_one(Alphabet(3));
  CHECK(z(1, 1) == 0);
  CHECK(z(1, 2) == 1);
  CHECK_THROWS(DistortionMatrix(Alphabet(2), Alphabet(2), {0, -1, 1, 0}));
}
