#include <cmath>
#include <filesystem>

#include "doctest.h"
#include "json.hpp"
#include "rdm/instance_io.hpp"
#include "rdm/output.hpp"
#include "rdm/parallel.hpp"

using namespace rdm;

TEST_CASE("number formatting") {
  CHECK(format_number(0.0) == "0");
  CHECK(format_number(1.0) == "1");
  CHECK(format_number(0.1) == "0.1");
  CHECK(format_number(1.0 / 3.0) == "0.333333333333");
  CHECK(format_number(1e-20) == "1e-20");
  CHECK(format_number(100.0) == "100");
  CHECK(format_number(-2500.0) == "-2500");
  CHECK(format_number(725.25) == "725.25");
  CHECK(format_number(999.99999999999) == "1000");
  CHECK(format_number(1e15) == "1e+15");
  CHECK(format_number(INFINITY) == "inf");
  CHECK(format_number(-INFINITY) == "-inf");
  CHECK(format_number(NAN) == "nan");
  CHECK(format_number(-0.0) == "0");
  CHECK(std::stod(format_number(2.0 / 7.0)) == round_significant(2.0 / 7.0));
}

TEST_CASE("csv writer") {
  CsvWriter w({"a", "b"});
  w.row({"1", "2"});
  CHECK(w.str() == "a,b\n1,2\n");
  CHECK_THROWS(w.row({"1"}));
}

TEST_CASE("atomic writes and reads") {
  auto dir = std::filesystem::temp_directory_path() / "rdm_output_test" / "nested";
  std::filesystem::remove_all(dir.parent_path());
  ensure_directory(dir);
  write_file_atomic(dir / "f.txt", "hello");
  write_file_atomic(dir / "f.txt", "again");
  CHECK(read_file(dir / "f.txt") == "again");
  std::size_t entries = 0;
  for ([[maybe_unused]] auto& e : std::filesystem::directory_iterator(dir)) ++entries;
  CHECK(entries == 1);
  CHECK_THROWS_AS(read_file(dir / "nope"), IoError);
  CHECK_THROWS_AS(ensure_directory(dir / "f.txt"), IoError);
  std::filesystem::remove_all(dir.parent_path());
}

TEST_CASE("parallel_for visits every index and rethrows") {
  std::vector<int> hit(1000, 0);
  parallel_for(hit.size(), [&](std::size_t i) { hit[i] += 1; });
  CHECK(std::all_of(hit.begin(), hit.end(), [](int v) { return v == 1; }));
  CHECK_THROWS_AS(parallel_for(10, [](std::size_t i) {
                    if (i == 7) throw std::runtime_error("boom");
                  }),
                  std::runtime_error);
  CHECK(thread_count() >= 1);
}

namespace {

const char* kInstance = R"({
  "schema": 1,
  "alphabets": {"X": {"size": 3}, "Y1": {"size": 2}, "T": {"size": 2}},
  "source": [0.2, 0.3, 0.5],
  "stages": [{"from": "X", "to": "Y1", "table": [0, 1, 1]},
             {"from": "Y1", "to": "T", "table": [1, 0]}],
  "distortions": {"T": [[0, 1], [1, 0]]}
})";

std::string field_of(const std::string& text) {
  try {
    parse_instance(text);
  } catch (const SchemaError& e) {
    return e.field();
  }
  return "<accepted>";
}

std::string replace(std::string s, const std::string& from, const std::string& to) {
  auto pos = s.find(from);
  REQUIRE(pos != std::string::npos);
  return s.replace(pos, from.size(), to);
}

}  // namespace

TEST_CASE("instance JSON round trip") {
  auto inst = parse_instance(kInstance);
  CHECK(inst.model().depth() == 2);
  CHECK(inst.model().task_map()(0) == 1);
  auto again = parse_instance(instance_to_json(inst));
  CHECK(instance_to_json(again) == instance_to_json(inst));
}

TEST_CASE("instance schema errors name the field") {
  const std::string s = kInstance;
  CHECK(field_of(s) == "<accepted>");
  CHECK(field_of(replace(s, "\"schema\": 1", "\"schema\": 2")) == "/schema");
  CHECK(field_of(replace(s, "[0, 1, 1]", "[0, 1, 2]")) == "/stages/0/table/2");
  CHECK(field_of(replace(s, "[0.2, 0.3, 0.5]", "[0.2, 0.3, 0.6]")) == "/source");
  CHECK(field_of(replace(s, "[[0, 1], [1, 0]]", "[[0, 1], [1]]")) == "/distortions/T/1");
  CHECK(field_of(replace(s, "\"T\": [[0, 1], [1, 0]]", "\"Y1\": [[0, 1], [1, 0]]")) == "/distortions/T");
  CHECK(field_of(replace(s, "\"from\": \"Y1\"", "\"from\": \"X\"")).rfind("/stages", 0) == 0);
  CHECK_THROWS_AS(parse_instance("{not json"), SchemaError);
  CHECK_THROWS_AS(load_instance("/nonexistent/instance.json"), IoError);
}
