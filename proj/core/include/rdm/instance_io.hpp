#pragma once

// JSON (de)serialization of MachineRDInstance, schema version 1:
//
//   {"schema": 1,
//    "alphabets": {"X": {"size": 6, "labels": [...]}, "Y1": {...}, "T": {...}},
//    "source": [p0, p1, ...],
//    "stages": [{"from": "X", "to": "Y1", "table": [...]}, ...],
//    "distortions": {"T": [[...], ...], "X": [[...], ...]},
//    "cuts": {"Y1": 1}}
//
// "labels" and "cuts" are optional; when "cuts" is given it must agree with
// the chain order implied by "stages".

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>

#include "rdm/machine_rd.hpp"

namespace rdm {

class SchemaError : public std::invalid_argument {
 public:
  SchemaError(std::string field, const std::string& message)
      : std::invalid_argument(field + ": " + message), field_(std::move(field)) {}
  /// JSON-pointer-like location, e.g. "/stages/1/table/3".
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

MachineRDInstance parse_instance(std::string_view json_text);
MachineRDInstance load_instance(const std::filesystem::path& path);

std::string instance_to_json(const MachineRDInstance& instance);

}  // namespace rdm
