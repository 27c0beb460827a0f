#pragma once

#include <string>

#include <json.hpp>

#include "qmadapt/errors.hpp"
#include "qmadapt/fields.hpp"
#include "qmadapt/hash.hpp"
#include "qmadapt/model.hpp"

namespace qmadapt {

/// Canonical text of any JSON value: sorted keys, two-space indent, trailing
/// newline. Byte equality of this form is the equality used by golden tests.
inline std::string canonical_dump(const nlohmann::json& j) { return j.dump(2) + "\n"; }

inline nlohmann::json element_to_json(const Element& e) {
  nlohmann::json j = nlohmann::json::object();
  j["id"] = id_of(e).str();
  for (const auto& f : fields_of(kind_of(e))) j[std::string(f.name)] = f.get(e);
  return j;
}

inline Element element_from_json(ElementKind kind, const nlohmann::json& j) {
  if (!j.is_object()) throw InputError(std::string(kind_name(kind)) + " entry must be an object");
  if (!j.contains("id") || !j.at("id").is_string() || j.at("id").get<std::string>().empty()) {
    throw InputError(std::string(kind_name(kind)) + " entry without a string id");
  }
  Element e = make_element(kind, j.at("id").get<ElementId>());
  for (const auto& [key, value] : j.items()) {
    if (key == "id") continue;
    const FieldDesc* f = find_field(kind, key);
    if (f == nullptr) {
      throw InputError(std::string(kind_name(kind)) + " '" + j.at("id").get<std::string>() +
                       "' has unknown field '" + key + "'");
    }
    f->set(e, value);
  }
  return e;
}

inline nlohmann::json model_to_json(const QualityModel& m) {
  nlohmann::json meta = {{"schema", kModelSchema},
                         {"name", m.meta().name},
                         {"version", m.meta().version},
                         {"provenance", m.meta().provenance},
                         {"nextId", m.next_id()}};
  if (m.meta().goal) meta["goal"] = goal_to_json(*m.meta().goal);
  nlohmann::json j = {{"meta", std::move(meta)}};
  for (ElementKind k : kAllKinds) j[std::string(collection_name(k))] = nlohmann::json::array();
  for (const auto& [id, e] : m.elements()) {
    j[std::string(collection_name(kind_of(e)))].push_back(element_to_json(e));
  }
  return j;
}

/// Builds a model from the file format without integrity checks; callers
/// validate the result.
inline QualityModel model_from_json(const nlohmann::json& doc) {
  if (!doc.is_object()) throw InputError("model document must be a JSON object");
  if (!doc.contains("meta") || !doc.at("meta").is_object()) throw SchemaError("model document lacks 'meta'");
  const auto& meta = doc.at("meta");
  std::string schema = meta.value("schema", std::string());
  if (schema != kModelSchema) {
    throw SchemaError("unsupported model schema '" + schema + "' (expected '" + std::string(kModelSchema) + "')");
  }
  QualityModel m;
  m.meta().name = meta.value("name", std::string());
  m.meta().version = meta.value("version", std::string());
  if (meta.contains("provenance") && !meta.at("provenance").is_null()) m.meta().provenance = meta.at("provenance");
  if (meta.contains("goal") && !meta.at("goal").is_null()) m.meta().goal = parse_goal(meta.at("goal"));
  if (meta.contains("nextId")) {
    if (!meta.at("nextId").is_number_unsigned()) throw InputError("meta.nextId must be a positive integer");
    m.set_next_id(meta.at("nextId").get<std::uint64_t>());
  }
  for (const auto& [key, value] : doc.items()) {
    if (key == "meta") continue;
    std::optional<ElementKind> kind;
    for (ElementKind k : kAllKinds) {
      if (collection_name(k) == key) kind = k;
    }
    if (!kind) throw InputError("unknown top-level key '" + key + "'");
    if (!value.is_array()) throw InputError("collection '" + key + "' must be an array");
    for (const auto& entry : value) m.insert_raw(element_from_json(*kind, entry));
  }
  m.refresh_artifact_roots();
  return m;
}

inline std::string canonical_model_bytes(const QualityModel& m) { return canonical_dump(model_to_json(m)); }

inline std::string model_hash(const QualityModel& m) { return content_hash(canonical_model_bytes(m)); }

}  // namespace qmadapt
