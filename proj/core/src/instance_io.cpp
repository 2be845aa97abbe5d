#include "rdm/instance_io.hpp"

#include <algorithm>
#include <optional>
#include <set>

#include "json.hpp"
#include "rdm/output.hpp"

namespace rdm {

namespace {

using nlohmann::json;

const json& member(const json& obj, const std::string& key, const std::string& where) {
  if (!obj.is_object()) throw SchemaError(where, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) throw SchemaError(where + "/" + key, "missing required field");
  return *it;
}

std::size_t as_index(const json& v, const std::string& where) {
  if (!v.is_number_integer() && !v.is_number_unsigned()) throw SchemaError(where, "expected a non-negative integer");
  const auto i = v.get<long long>();
  if (i < 0) throw SchemaError(where, "expected a non-negative integer");
  return static_cast<std::size_t>(i);
}

double as_number(const json& v, const std::string& where) {
  if (!v.is_number()) throw SchemaError(where, "expected a number");
  return v.get<double>();
}

Alphabet parse_alphabet(const json& node, const std::string& where) {
  const auto size = as_index(member(node, "size", where), where + "/size");
  if (size == 0 || size > kMaxAlphabetSize) {
    throw SchemaError(where + "/size", "alphabet size must be in [1, " + std::to_string(kMaxAlphabetSize) + "]");
  }
  std::vector<std::string> labels;
  if (auto it = node.find("labels"); it != node.end()) {
    if (!it->is_array()) throw SchemaError(where + "/labels", "expected an array of strings");
    for (std::size_t i = 0; i < it->size(); ++i) {
      if (!(*it)[i].is_string()) throw SchemaError(where + "/labels/" + std::to_string(i), "expected a string");
      labels.push_back((*it)[i].get<std::string>());
    }
  }
  try {
    return Alphabet(size, std::move(labels));
  } catch (const std::invalid_argument& e) {
    throw SchemaError(where + "/labels", e.what());
  }
}

std::vector<double> parse_vector(const json& node, const std::string& where) {
  if (!node.is_array()) throw SchemaError(where, "expected an array");
  std::vector<double> out;
  for (std::size_t i = 0; i < node.size(); ++i) out.push_back(as_number(node[i], where + "/" + std::to_string(i)));
  return out;
}

}  // namespace

MachineRDInstance parse_instance(std::string_view json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw SchemaError("", std::string("invalid JSON: ") + e.what());
  }
  const auto& schema = member(root, "schema", "");
  if (!schema.is_number_integer() || schema.get<int>() != 1) throw SchemaError("/schema", "unsupported schema version");

  const auto& alphabets_node = member(root, "alphabets", "");
  if (!alphabets_node.is_object() || alphabets_node.empty()) {
    throw SchemaError("/alphabets", "expected a non-empty object");
  }
  std::map<std::string, Alphabet> alphabets;
  for (const auto& [name, node] : alphabets_node.items()) {
    alphabets.emplace(name, parse_alphabet(node, "/alphabets/" + name));
  }
  auto alphabet_named = [&](const json& v, const std::string& where) -> const Alphabet& {
    if (!v.is_string()) throw SchemaError(where, "expected an alphabet name");
    auto it = alphabets.find(v.get<std::string>());
    if (it == alphabets.end()) throw SchemaError(where, "unknown alphabet '" + v.get<std::string>() + "'");
    return it->second;
  };

  const auto& stages_node = member(root, "stages", "");
  if (!stages_node.is_array() || stages_node.empty()) throw SchemaError("/stages", "expected a non-empty array");
  std::vector<std::string> names;
  std::vector<DeterministicMap> stages;
  for (std::size_t k = 0; k < stages_node.size(); ++k) {
    const auto where = "/stages/" + std::to_string(k);
    const auto& st = stages_node[k];
    const auto& from_node = member(st, "from", where);
    const auto& to_node = member(st, "to", where);
    const auto& in = alphabet_named(from_node, where + "/from");
    const auto& out = alphabet_named(to_node, where + "/to");
    const auto from = from_node.get<std::string>();
    if (names.empty()) {
      names.push_back(from);
    } else if (names.back() != from) {
      throw SchemaError(where + "/from", "stage must start where the previous one ends ('" + names.back() + "')");
    }
    const auto to = to_node.get<std::string>();
    for (const auto& n : names) {
      if (n == to) throw SchemaError(where + "/to", "point '" + to + "' appears twice in the chain");
    }
    names.push_back(to);
    const auto& table_node = member(st, "table", where);
    if (!table_node.is_array() || table_node.size() != in.size()) {
      throw SchemaError(where + "/table", "expected " + std::to_string(in.size()) + " entries");
    }
    std::vector<std::size_t> table;
    for (std::size_t i = 0; i < table_node.size(); ++i) {
      const auto tw = where + "/table/" + std::to_string(i);
      const auto v = as_index(table_node[i], tw);
      if (v >= out.size()) throw SchemaError(tw, "index out of range for alphabet '" + to + "'");
      table.push_back(v);
    }
    stages.emplace_back(in, out, std::move(table));
  }
  for (const auto& [name, a] : alphabets) {
    if (std::find(names.begin(), names.end(), name) == names.end()) {
      throw SchemaError("/alphabets/" + name, "alphabet is not used by any stage");
    }
  }
  TaskModel model(names, std::move(stages));

  if (auto it = root.find("cuts"); it != root.end()) {
    if (!it->is_object()) throw SchemaError("/cuts", "expected an object");
    const auto expected = model.cuts();
    for (const auto& [name, pos] : it->items()) {
      const auto where = "/cuts/" + name;
      auto e = expected.find(name);
      if (e == expected.end()) throw SchemaError(where, "not an interior point of the chain");
      if (as_index(pos, where) != e->second) {
        throw SchemaError(where, "position disagrees with the stage chain (expected " + std::to_string(e->second) + ")");
      }
    }
  }

  const auto& source_node = member(root, "source", "");
  auto mass = parse_vector(source_node, "/source");
  if (mass.size() != model.input_alphabet().size()) {
    throw SchemaError("/source", "expected " + std::to_string(model.input_alphabet().size()) + " masses");
  }
  std::optional<FiniteDistribution> source;
  try {
    source.emplace(model.input_alphabet(), std::move(mass));
  } catch (const std::invalid_argument& e) {
    throw SchemaError("/source", e.what());
  }

  const auto& dist_node = member(root, "distortions", "");
  if (!dist_node.is_object()) throw SchemaError("/distortions", "expected an object");
  std::map<std::string, DistortionMatrix> distortions;
  for (const auto& [name, node] : dist_node.items()) {
    const auto where = "/distortions/" + name;
    if (!model.has_point(name)) throw SchemaError(where, "not a point of the stage chain");
    const auto& a = model.alphabet(name);
    if (!node.is_array() || node.size() != a.size()) {
      throw SchemaError(where, "expected a " + std::to_string(a.size()) + "x" + std::to_string(a.size()) + " matrix");
    }
    std::vector<double> values;
    for (std::size_t r = 0; r < node.size(); ++r) {
      auto row = parse_vector(node[r], where + "/" + std::to_string(r));
      if (row.size() != a.size()) throw SchemaError(where + "/" + std::to_string(r), "wrong row length");
      values.insert(values.end(), row.begin(), row.end());
    }
    try {
      distortions.emplace(name, DistortionMatrix(a, a, std::move(values)));
    } catch (const std::invalid_argument& e) {
      throw SchemaError(where, e.what());
    }
  }
  if (!distortions.count(names.back())) {
    throw SchemaError("/distortions/" + names.back(), "task distortion matrix is required");
  }
  return MachineRDInstance(std::move(*source), std::move(model), std::move(distortions));
}

MachineRDInstance load_instance(const std::filesystem::path& path) { return parse_instance(read_file(path)); }

std::string instance_to_json(const MachineRDInstance& instance) {
  const auto& model = instance.model();
  json root;
  root["schema"] = 1;
  json alphabets = json::object();
  for (std::size_t pos = 0; pos <= model.depth(); ++pos) {
    const auto& a = model.alphabet_at(pos);
    json node{{"size", a.size()}};
    if (!a.labels().empty()) node["labels"] = a.labels();
    alphabets[model.point_names()[pos]] = node;
  }
  root["alphabets"] = alphabets;
  json source = json::array();
  for (double m : instance.source().mass()) source.push_back(m);
  root["source"] = source;
  json stages = json::array();
  for (std::size_t k = 0; k < model.depth(); ++k) {
    const auto t = model.stages()[k].table();
    stages.push_back({{"from", model.point_names()[k]},
                      {"to", model.point_names()[k + 1]},
                      {"table", std::vector<std::size_t>(t.begin(), t.end())}});
  }
  root["stages"] = stages;
  json dist = json::object();
  for (const auto& [name, d] : instance.distortions()) {
    json rows = json::array();
    for (std::size_t r = 0; r < d.rows(); ++r) {
      json row = json::array();
      for (std::size_t c = 0; c < d.cols(); ++c) row.push_back(d(r, c));
      rows.push_back(row);
    }
    dist[name] = rows;
  }
  root["distortions"] = dist;
  json cuts = json::object();
  for (const auto& [name, pos] : model.cuts()) cuts[name] = pos;
  root["cuts"] = cuts;
  return root.dump(2) + "\n";
}

}  // namespace rdm
