#include <algorithm>
#include <filesystem>
#include <cstdlib>
#include <sstream>

#include "cli.hpp"
#include "doctest.h"
#include "json.hpp"
#include "rdm/output.hpp"

namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "rdm");
  std::vector<const char*> argv;
  for (auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  int code = rdm::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  auto p = fs::temp_directory_path() / "rdm_cli_test" / name;
  fs::remove_all(p);
  return p;
}

const std::string kData = RDM_TEST_DATA;

std::vector<std::vector<double>> read_csv(const fs::path& p) {
  std::istringstream in(rdm::read_file(p));
  std::string line;
  std::getline(in, line);
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    std::vector<double> row;
    std::istringstream cells(line);
    std::string c;
    while (std::getline(cells, c, ',')) row.push_back(std::stod(c));
    rows.push_back(row);
  }
  return rows;
}

}  // namespace

TEST_CASE("usage errors exit with 2") {
  CHECK(run({}).code == 2);
  CHECK(run({"frobnicate"}).code == 2);
  CHECK(run({"rd-curve", "--out", "x"}).code == 2);
  CHECK(run({"--help"}).code == 0);
  auto r = run({"verify", "--theorem", "thm7", "--out", scratch("bad").string()});
  CHECK(r.code == 2);
  CHECK(r.err.find("thm1") != std::string::npos);
}

TEST_CASE("rd-curve: split and direct agree row by row") {
  const auto inst = kData + "/instances/six_three_two.json";
  auto a = scratch("split"), b = scratch("direct");
  REQUIRE(run({"rd-curve", "--instance", inst, "--approach", "split", "--cut", "Y1", "--out", a.string()}).code == 0);
  REQUIRE(run({"rd-curve", "--instance", inst, "--approach", "direct", "--cut", "Y1", "--out", b.string()}).code == 0);
  auto ra = read_csv(a / "curve.csv"), rb = read_csv(b / "curve.csv");
  REQUIRE(ra.size() == rb.size());
  for (std::size_t i = 0; i < ra.size(); ++i) {
    CHECK(std::abs(ra[i][1] - rb[i][1]) < 1e-6);
    CHECK(std::abs(ra[i][2] - rb[i][2]) < 1e-6);
  }
  auto meta = nlohmann::json::parse(rdm::read_file(a / "meta.json"));
  CHECK(meta["label"] == "split@Y1->T");
  CHECK(meta["reproduction_alphabet"] == 3);
}

TEST_CASE("rd-curve: json format, unknown target, missing file") {
  const auto inst = kData + "/instances/six_three_two.json";
  auto d = scratch("json");
  CHECK(run({"rd-curve", "--instance", inst, "--format", "json", "--out", d.string()}).code == 0);
  CHECK(nlohmann::json::parse(rdm::read_file(d / "curve.json")).is_array());
  CHECK(run({"rd-curve", "--instance", inst, "--target", "Q", "--out", d.string()}).code == 2);
  CHECK(run({"rd-curve", "--instance", inst, "--approach", "split", "--out", d.string()}).code == 2);
  CHECK(run({"rd-curve", "--instance", kData + "/nope.json", "--out", d.string()}).code == 3);
}

TEST_CASE("rd-curve: constant task") {
  auto d = scratch("constant");
  REQUIRE(run({"rd-curve", "--instance", kData + "/instances/constant_task.json", "--out", d.string()}).code == 0);
  auto rows = read_csv(d / "curve.csv");
  REQUIRE(rows.size() == 1);
  CHECK(rows[0][1] == 0.0);
  CHECK(rows[0][2] == 0.0);
}

TEST_CASE("verify writes a verdict") {
  auto d = scratch("verify");
  auto r = run({"verify", "--theorem", "thm1", "--seeds", "1", "--levels", "2", "--out", d.string()});
  CHECK(r.code == 0);
  CHECK(r.out.rfind("PASS thm1", 0) == 0);
  auto j = nlohmann::json::parse(rdm::read_file(d / "thm1.json"));
  CHECK(j["pass"] == true);
  CHECK(j["instances"] == 1);
}

TEST_CASE("task-app on CSV inputs") {
  auto d = scratch("taskapp");
  fs::create_directories(d);
  rdm::write_file_atomic(d / "a.csv", "label,f0\n0,0\n0,2\n1,3\n1,5\n");
  rdm::write_file_atomic(d / "b.csv", "label,f0\n0,0\n0,1\n1,9\n1,10\n");
  rdm::write_file_atomic(d / "c.csv", "label,f0\n0,0\n0,1\n1,4\n1,5\n2,9\n2,10\n");
  auto out = d / "out";
  auto r = run({"task-app", "--inputs", (d / "a.csv").string(), (d / "b.csv").string(), "--out", out.string()});
  CHECK(r.code == 0);
  auto rho = rdm::read_file(out / "rho.csv");
  CHECK(rho.rfind("name,rho,monotone_vs_prev\na,9,\nb,324,true\n", 0) == 0);
  CHECK(fs::exists(out / "a.json"));
  auto bad = run({"task-app", "--inputs", (d / "a.csv").string(), (d / "c.csv").string(), "--out", out.string()});
  CHECK(bad.code == 2);
  CHECK(bad.err.find("a.csv") != std::string::npos);
  CHECK(bad.err.find("c.csv") != std::string::npos);
}

TEST_CASE("toy writes its artifacts") {
  auto d = scratch("toy");
  auto r = run({"toy", "--n", "20000", "--seed", "1", "--plot-points", "10", "--export-lfs", "--out", d.string()});
  REQUIRE(r.code == 0);
  auto s = nlohmann::json::parse(rdm::read_file(d / "summary.json"));
  CHECK(s["error_y"] == 0.0);
  CHECK(s["points_written"] == 10);
  const auto points = rdm::read_file(d / "points.csv");
  CHECK(std::count(points.begin(), points.end(), '\n') == 11);
  CHECK(fs::exists(d / "x.lfs"));
  auto t = run({"task-app", "--inputs", (d / "x.lfs").string(), (d / "y.lfs").string(), "--out", (d / "ta").string()});
  CHECK(t.code == 0);
  CHECK(t.out.find("monotone=true") != std::string::npos);
}

TEST_CASE("bd") {
  auto r = run({"bd", "--anchor", kData + "/curves/anchor.csv", "--test", kData + "/curves/test.csv"});
  CHECK(r.code == 0);
  auto j = nlohmann::json::parse(r.out);
  CHECK(j["bd_rate_percent"].is_number());
  auto d = scratch("bd");
  fs::create_directories(d);
  rdm::write_file_atomic(d / "far.csv", "rate,metric\n1,90\n2,91\n3,92\n4,93\n");
  auto no = run({"bd", "--anchor", kData + "/curves/anchor.csv", "--test", (d / "far.csv").string()});
  CHECK(no.code == 2);
  CHECK(no.err.find("insufficient overlap") != std::string::npos);
}

TEST_CASE("verify output does not depend on the thread count") {
  auto one = scratch("threads1"), many = scratch("threads4");
  ::setenv("RDM_THREADS", "1", 1);
  REQUIRE(run({"verify", "--theorem", "thm3", "--seeds", "6", "--levels", "2", "--out", one.string()}).code == 0);
  ::setenv("RDM_THREADS", "4", 1);
  REQUIRE(run({"verify", "--theorem", "thm3", "--seeds", "6", "--levels", "2", "--out", many.string()}).code == 0);
  ::unsetenv("RDM_THREADS");
  CHECK(rdm::read_file(one / "thm3.json") == rdm::read_file(many / "thm3.json"));
}
