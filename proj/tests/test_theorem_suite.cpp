#include <cmath>
#include <random>

#include "doctest.h"
#include "json.hpp"
#include "rdm/instance_io.hpp"
#include "rdm/theorem_suite.hpp"
#include "test_util.hpp"

using namespace rdm;

TEST_CASE("theorem ids and tolerances") {
  const auto& ids = theorem_ids();
  CHECK(ids.size() == 9);
  CHECK_NOTHROW(require_theorem("thm1"));
  try {
    require_theorem("thm9");
    FAIL("expected rejection");
  } catch (const std::invalid_argument& e) {
    CHECK(std::string(e.what()).find("thm2a") != std::string::npos);
  }
  CHECK(theorem_tolerance("thm1", 1e-5) == 1e-5);
  CHECK(theorem_tolerance("thm3", 1e-5) == kInequalityTol);
  CHECK(theorem_tolerance("merge-transform", 1e-5) == kMergeTol);
  for (const auto& id : ids) CHECK_FALSE(theorem_description(id).empty());
}

TEST_CASE("spec validation") {
  InstanceSpec s;
  CHECK_NOTHROW(s.validate());
  s.t = 7;
  CHECK_THROWS(s.validate());
  s = InstanceSpec{};
  s.dominated_extras = true;
  CHECK_THROWS(s.validate());
}

TEST_CASE("generated instances are deterministic and well formed") {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    InstanceSpec s;
    s.x = 6;
    s.y1 = 4;
    s.y2 = 3;
    s.t = 2;
    s.seed = seed;
    s.kind = static_cast<DistortionKind>(seed % 3);
    auto a = generate_instance(s);
    auto b = generate_instance(s);
    CHECK(instance_to_json(a) == instance_to_json(b));
    const auto& model = a.model();
    CHECK(model.depth() == 3);
    for (const auto& st : model.stages()) CHECK(st.is_surjective());
    for (double m : a.source().mass()) CHECK(m > 0.0);
    for (const auto& name : model.point_names()) CHECK(a.has_distortion(name));
  }
  InstanceSpec s;
  s.seed = 1;
  InstanceSpec s2 = s;
  s2.seed = 2;
  CHECK(instance_to_json(generate_instance(s)) != instance_to_json(generate_instance(s2)));
}

TEST_CASE("extra letters when the image condition is not enforced") {
  InstanceSpec s;
  s.enforce_thm2 = false;
  s.y1 = 3;
  s.t = 2;
  auto inst = generate_instance(s);
  CHECK(inst.model().alphabet("Y1").size() == 4);
  CHECK(inst.model().task_alphabet().size() == 3);
  CHECK_FALSE(inst.model().task_map().is_surjective());
}

TEST_CASE("thm4 spec yields two inputs with the same task output") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    InstanceSpec s;
    s.seed = seed;
    s.enforce_thm4 = true;
    s.x = 4;
    s.t = 3;
    s.y1 = 3;
    auto f = generate_instance(s).model().task_map();
    std::vector<int> hits(f.output().size(), 0);
    for (auto v : f.table()) ++hits[v];
    CHECK(*std::max_element(hits.begin(), hits.end()) >= 2);
  }
}

TEST_CASE("one-letter task output gives zero rates everywhere") {
  DeterministicMap f(Alphabet(4), Alphabet(1), {0, 0, 0, 0});
  TaskModel model({"X", "T"}, {f});
  MachineRDInstance inst(FiniteDistribution(Alphabet(4), {0.1, 0.2, 0.3, 0.4}), model,
                         {{"T", DistortionMatrix(Alphabet(1), Alphabet(1), {0.0})}});
  auto curve = machine_rd(inst, CodingApproach::full_input("T"), RDSolverConfig::defaults());
  for (const auto& p : curve.points()) {
    CHECK(p.rate == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(p.distortion == 0.0);
  }
}

TEST_CASE("each theorem holds on a few seeds") {
  const auto cfg = RDSolverConfig::defaults();
  for (const auto& id : theorem_ids()) {
    CAPTURE(id);
    auto v = id == "merge-transform" ? verify_merge_property(default_specs(id, 3, 100))
                                     : verify(id, default_specs(id, 3, 100), 3, theorem_tolerance(id, kEqualityTol), cfg);
    CHECK(v.pass);
    CHECK(v.instances == 3);
    CHECK(v.errors.empty());
    CHECK(v.failing_seeds.empty());
    CHECK(v.seeds == std::vector<std::uint64_t>{100, 101, 102});
  }
}

TEST_CASE("image condition matters: full input can beat splitting") {
  // X = {0,1}, T = {0,1,2}: T letter 2 is unreachable but cheap for every source letter.
  DeterministicMap g(Alphabet(2), Alphabet(3), {0, 1});
  DeterministicMap h(Alphabet(3), Alphabet(3), {0, 1, 2});
  TaskModel model({"X", "Y1", "T"}, {g, h});
  DistortionMatrix dt(Alphabet(3), Alphabet(3), {0, 1, 0.2, 1, 0, 0.2, 1, 1, 0});
  MachineRDInstance inst(FiniteDistribution::uniform(Alphabet(2)), model,
                         {{"T", dt}, {"Y1", DistortionMatrix::zero_one(Alphabet(3))}});
  auto cfg = RDSolverConfig::defaults();
  auto full = machine_rd(inst, CodingApproach::full_input("T"), cfg);
  auto split = machine_rd(inst, CodingApproach::split("Y1", "T"), cfg);
  // at D = 0.2 splitting is free, full input coding is not
  CHECK(split.rate_at(0.2) == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(full.rate_at(0.2) > 0.1);
  CHECK_THROWS_AS(lift_reproduction(Channel::identity(Alphabet(3)), model, "Y1"), std::exception);
}

TEST_CASE("merging task-equivalent letters") {
  InstanceSpec s;
  s.enforce_thm4 = true;
  s.x = 6;
  s.t = 2;
  s.seed = 3;
  auto inst = generate_instance(s);
  auto f = inst.model().task_map();
  std::size_t a = 0, b = 1;
  while (f(a) != f(b)) ++b;
  std::mt19937_64 rng(1);
  auto c = testutil::random_channel(rng, 6, 6);
  auto out = evaluate_merge(inst, c, a, b);
  CHECK(std::abs(out.delta_distortion) < 1e-12);
  CHECK(out.delta_information <= 1e-12);
  CHECK(out.posteriors_differ);
  CHECK(out.delta_information < -1e-9);
  std::size_t other = 0;
  while (f(other) == f(a)) ++other;
  CHECK_THROWS_AS(merge_task_equivalent(inst, c, a, other), HypothesisViolated);
}

TEST_CASE("verdict JSON is stable") {
  Verdict v;
  v.theorem = "thm1";
  v.description = "x";
  v.instances = 2;
  v.max_violation = 1.0 / 3.0;
  v.tolerance = 1e-6;
  v.seeds = {0, 1};
  auto j = nlohmann::json::parse(verdict_to_json(v));
  CHECK(j["theorem"] == "thm1");
  CHECK(j["max_violation"].get<double>() == doctest::Approx(0.333333333333).epsilon(1e-13));
  CHECK(verdict_to_json(v) == verdict_to_json(v));
  v.max_violation = INFINITY;
  CHECK(nlohmann::json::parse(verdict_to_json(v))["max_violation"] == "inf");
}
