#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "qmadapt/errors.hpp"
#include "qmadapt/ids.hpp"
#include "qmadapt/model.hpp"

namespace qmadapt {

enum class OpType { DEL, ADD, MOD };

inline std::string_view op_type_name(OpType t) {
  switch (t) {
    case OpType::DEL: return "DEL";
    case OpType::ADD: return "ADD";
    case OpType::MOD: return "MOD";
  }
  return "?";
}

/// One elementary model change. ADD carries a payload field map, MOD names
/// one field and a change; a MOD without a change is a sketch used in
/// suggestions and cannot be applied.
struct Operation {
  OpType type = OpType::ADD;
  ElementKind kind = ElementKind::QualityAspect;
  ElementId target;
  nlohmann::json payload = nlohmann::json::object();
  std::string field;
  std::optional<FieldChange> change;

  static Operation del(ElementKind kind, ElementId target) {
    Operation op;
    op.type = OpType::DEL;
    op.kind = kind;
    op.target = std::move(target);
    return op;
  }
  static Operation add(ElementKind kind, nlohmann::json payload) {
    Operation op;
    op.kind = kind;
    op.payload = std::move(payload);
    return op;
  }
  static Operation mod(ElementKind kind, ElementId target, std::string field,
                       std::optional<FieldChange> change = std::nullopt) {
    Operation op;
    op.type = OpType::MOD;
    op.kind = kind;
    op.target = std::move(target);
    op.field = std::move(field);
    op.change = std::move(change);
    return op;
  }
};

inline nlohmann::json operation_to_json(const Operation& op) {
  nlohmann::json j = {{"opType", op_type_name(op.type)}, {"kind", kind_name(op.kind)}};
  switch (op.type) {
    case OpType::ADD:
      j["payload"] = op.payload;
      break;
    case OpType::DEL:
      j["target"] = op.target.str();
      break;
    case OpType::MOD:
      j["target"] = op.target.str();
      j["field"] = op.field;
      if (op.change) {
        const char* key = op.change->mode == FieldChange::Mode::Set   ? "set"
                          : op.change->mode == FieldChange::Mode::Add ? "add"
                                                                      : "remove";
        j[key] = op.change->value;
      }
      break;
  }
  return j;
}

inline Operation operation_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw InputError("operation must be a JSON object");
  auto str = [&](const char* key) -> std::string {
    if (!j.contains(key) || !j.at(key).is_string()) throw InputError(std::string("operation needs string '") + key + "'");
    return j.at(key).get<std::string>();
  };
  Operation op;
  std::string type = str("opType");
  if (type == "DEL") op.type = OpType::DEL;
  else if (type == "ADD") op.type = OpType::ADD;
  else if (type == "MOD") op.type = OpType::MOD;
  else throw InputError("unknown opType '" + type + "'");
  std::string kind = str("kind");
  auto k = parse_kind(kind);
  if (!k) throw InputError("unknown element kind '" + kind + "'");
  op.kind = *k;
  if (op.type == OpType::ADD) {
    op.payload = j.value("payload", nlohmann::json::object());
    if (!op.payload.is_object()) throw InputError("ADD payload must be an object");
    return op;
  }
  op.target = ElementId(str("target"));
  if (op.type == OpType::MOD) {
    op.field = str("field");
    int given = 0;
    for (const char* key : {"set", "add", "remove"}) {
      if (!j.contains(key)) continue;
      ++given;
      FieldChange::Mode mode = std::string_view(key) == "set"   ? FieldChange::Mode::Set
                               : std::string_view(key) == "add" ? FieldChange::Mode::Add
                                                                : FieldChange::Mode::Remove;
      op.change = FieldChange{mode, j.at(key)};
    }
    if (given > 1) throw InputError("MOD takes exactly one of set/add/remove");
  }
  return op;
}

inline nlohmann::json operations_to_json(const std::vector<Operation>& ops) {
  auto arr = nlohmann::json::array();
  for (const auto& op : ops) arr.push_back(operation_to_json(op));
  return arr;
}

inline std::vector<Operation> operations_from_json(const nlohmann::json& j) {
  if (!j.is_array()) throw InputError("operation list must be a JSON array");
  std::vector<Operation> out;
  for (const auto& x : j) out.push_back(operation_from_json(x));
  return out;
}

}  // namespace qmadapt
