#pragma once

#include <algorithm>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "qmadapt/elements.hpp"
#include "qmadapt/errors.hpp"

namespace qmadapt {

enum class FieldType { Text, Bool, Effect, Names, Tags, Ref };

/// Cardinality of a reference field.
enum class Card { One, Optional, Set, List };

/// Reflection record for one field of one element kind. Serialization,
/// generic updates, diffs and reference scans all go through this table.
struct FieldDesc {
  std::string_view name{};
  FieldType type = FieldType::Text;
  Card card = Card::One;
  std::vector<ElementKind> targets{};
  std::string_view inverse{};         // partner field on the target, if symmetric
  bool required_unless_stub = false;  // Optional refs that only stubs may leave empty
  bool writable = true;
  std::function<nlohmann::json(const Element&)> get{};
  std::function<void(Element&, const nlohmann::json&)> set{};
  std::function<IdList(const Element&)> refs{};
  std::function<void(Element&, const IdList&)> set_refs{};

  bool is_ref() const noexcept { return type == FieldType::Ref; }
  bool single() const noexcept { return card == Card::One || card == Card::Optional; }
  bool accepts(ElementKind k) const { return std::find(targets.begin(), targets.end(), k) != targets.end(); }
};

namespace detail {

inline std::string expect_string(const nlohmann::json& v, std::string_view field) {
  if (v.is_null()) return {};
  if (!v.is_string()) throw InputError("field '" + std::string(field) + "' expects a string");
  return v.get<std::string>();
}

inline IdList expect_ids(const nlohmann::json& v, std::string_view field) {
  IdList out;
  if (v.is_null()) return out;
  if (v.is_string()) {
    out.emplace_back(v.get<std::string>());
    return out;
  }
  if (!v.is_array()) throw InputError("field '" + std::string(field) + "' expects element ids");
  for (const auto& x : v) {
    if (!x.is_string() || x.get<std::string>().empty()) {
      throw InputError("field '" + std::string(field) + "' holds a non-id value");
    }
    out.emplace_back(x.get<std::string>());
  }
  return out;
}

template <typename T>
FieldDesc text(std::string_view name, std::string T::*m, bool writable = true) {
  FieldDesc d{.name = name, .type = FieldType::Text, .writable = writable};
  d.get = [m](const Element& e) { return nlohmann::json(std::get<T>(e).*m); };
  d.set = [m, name](Element& e, const nlohmann::json& v) { std::get<T>(e).*m = expect_string(v, name); };
  return d;
}

template <typename T>
FieldDesc boolean(std::string_view name, bool T::*m) {
  FieldDesc d{.name = name, .type = FieldType::Bool};
  d.get = [m](const Element& e) { return nlohmann::json(std::get<T>(e).*m); };
  d.set = [m, name](Element& e, const nlohmann::json& v) {
    if (v.is_null()) {
      std::get<T>(e).*m = false;
      return;
    }
    if (!v.is_boolean()) throw InputError("field '" + std::string(name) + "' expects a boolean");
    std::get<T>(e).*m = v.get<bool>();
  };
  return d;
}

template <typename T>
FieldDesc names(std::string_view name, NameSet T::*m) {
  FieldDesc d{.name = name, .type = FieldType::Names};
  d.get = [m](const Element& e) {
    auto arr = nlohmann::json::array();
    for (const auto& s : std::get<T>(e).*m) arr.push_back(s);
    return arr;
  };
  d.set = [m, name](Element& e, const nlohmann::json& v) {
    NameSet out;
    if (!v.is_null()) {
      if (!v.is_array()) throw InputError("field '" + std::string(name) + "' expects a string array");
      for (const auto& x : v) {
        if (!x.is_string()) throw InputError("field '" + std::string(name) + "' expects strings");
        std::string s = trim(x.get<std::string>());
        if (!s.empty()) out.insert(std::move(s));
      }
    }
    std::get<T>(e).*m = std::move(out);
  };
  return d;
}

template <typename T>
FieldDesc tags(std::string_view name, ContextTags T::*m) {
  FieldDesc d{.name = name, .type = FieldType::Tags};
  d.get = [m](const Element& e) { return nlohmann::json(std::get<T>(e).*m); };
  d.set = [m](Element& e, const nlohmann::json& v) {
    std::get<T>(e).*m = v.is_null() ? ContextTags{} : v.get<ContextTags>();
  };
  return d;
}

template <typename T>
FieldDesc ref_one(std::string_view name, ElementId T::*m, std::vector<ElementKind> targets,
                  std::string_view inverse = {}) {
  FieldDesc d{.name = name, .type = FieldType::Ref, .card = Card::One, .targets = std::move(targets),
              .inverse = inverse};
  d.get = [m](const Element& e) -> nlohmann::json {
    const ElementId& id = std::get<T>(e).*m;
    return id.empty() ? nlohmann::json(nullptr) : nlohmann::json(id.str());
  };
  d.refs = [m](const Element& e) {
    const ElementId& id = std::get<T>(e).*m;
    return id.empty() ? IdList{} : IdList{id};
  };
  d.set_refs = [m, name](Element& e, const IdList& ids) {
    if (ids.size() > 1) throw InputError("field '" + std::string(name) + "' takes exactly one id");
    std::get<T>(e).*m = ids.empty() ? ElementId{} : ids.front();
  };
  d.set = [d](Element& e, const nlohmann::json& v) { d.set_refs(e, expect_ids(v, d.name)); };
  return d;
}

template <typename T>
FieldDesc ref_opt(std::string_view name, std::optional<ElementId> T::*m, std::vector<ElementKind> targets,
                  std::string_view inverse = {}, bool required_unless_stub = false) {
  FieldDesc d{.name = name, .type = FieldType::Ref, .card = Card::Optional, .targets = std::move(targets),
              .inverse = inverse, .required_unless_stub = required_unless_stub};
  d.get = [m](const Element& e) -> nlohmann::json {
    const auto& id = std::get<T>(e).*m;
    return id ? nlohmann::json(id->str()) : nlohmann::json(nullptr);
  };
  d.refs = [m](const Element& e) {
    const auto& id = std::get<T>(e).*m;
    return id ? IdList{*id} : IdList{};
  };
  d.set_refs = [m, name](Element& e, const IdList& ids) {
    if (ids.size() > 1) throw InputError("field '" + std::string(name) + "' takes at most one id");
    std::get<T>(e).*m = ids.empty() ? std::nullopt : std::optional<ElementId>(ids.front());
  };
  d.set = [d](Element& e, const nlohmann::json& v) { d.set_refs(e, expect_ids(v, d.name)); };
  return d;
}

template <typename T>
FieldDesc ref_set(std::string_view name, IdSet T::*m, std::vector<ElementKind> targets,
                  std::string_view inverse = {}) {
  FieldDesc d{.name = name, .type = FieldType::Ref, .card = Card::Set, .targets = std::move(targets),
              .inverse = inverse};
  d.get = [m](const Element& e) {
    auto arr = nlohmann::json::array();
    for (const auto& id : std::get<T>(e).*m) arr.push_back(id.str());
    return arr;
  };
  d.refs = [m](const Element& e) {
    const auto& s = std::get<T>(e).*m;
    return IdList(s.begin(), s.end());
  };
  d.set_refs = [m](Element& e, const IdList& ids) { std::get<T>(e).*m = IdSet(ids.begin(), ids.end()); };
  d.set = [d](Element& e, const nlohmann::json& v) { d.set_refs(e, expect_ids(v, d.name)); };
  return d;
}

template <typename T>
FieldDesc ref_list(std::string_view name, IdList T::*m, std::vector<ElementKind> targets,
                   std::string_view inverse = {}) {
  FieldDesc d{.name = name, .type = FieldType::Ref, .card = Card::List, .targets = std::move(targets),
              .inverse = inverse};
  d.get = [m](const Element& e) {
    auto arr = nlohmann::json::array();
    for (const auto& id : std::get<T>(e).*m) arr.push_back(id.str());
    return arr;
  };
  d.refs = [m](const Element& e) { return std::get<T>(e).*m; };
  d.set_refs = [m, name](Element& e, const IdList& ids) {
    IdList out;
    for (const auto& id : ids) {
      if (std::find(out.begin(), out.end(), id) != out.end()) {
        throw InputError("field '" + std::string(name) + "' lists '" + id.str() + "' twice");
      }
      out.push_back(id);
    }
    std::get<T>(e).*m = std::move(out);
  };
  d.set = [d](Element& e, const nlohmann::json& v) { d.set_refs(e, expect_ids(v, d.name)); };
  return d;
}

inline FieldDesc effect_field() {
  FieldDesc d{.name = "effect", .type = FieldType::Effect};
  d.get = [](const Element& e) { return nlohmann::json(effect_name(std::get<Impact>(e).effect)); };
  d.set = [](Element& e, const nlohmann::json& v) {
    std::string s = v.is_null() ? "positive" : fold(expect_string(v, "effect"));
    if (s == "positive") std::get<Impact>(e).effect = Effect::Positive;
    else if (s == "negative") std::get<Impact>(e).effect = Effect::Negative;
    else throw InputError("effect must be 'positive' or 'negative'");
  };
  return d;
}

inline std::vector<std::vector<FieldDesc>> build_field_table() {
  using K = ElementKind;
  std::vector<std::vector<FieldDesc>> t(kAllKinds.size());
  t[static_cast<std::size_t>(K::QualityAspect)] = {
      text("name", &QualityAspect::name),
      text("description", &QualityAspect::description),
      ref_opt("parent", &QualityAspect::parent, {K::QualityAspect}, "refinedBy"),
      ref_list("refinedBy", &QualityAspect::refinedBy, {K::QualityAspect}, "parent"),
      names("viewpoints", &QualityAspect::viewpoints),
      ref_set("influencedBy", &QualityAspect::influencedBy, {K::Impact}, "qualityAspect"),
      ref_opt("evaluatedBy", &QualityAspect::evaluatedBy, {K::QualityAspectEvaluation}, "qualityAspect"),
      boolean("stub", &QualityAspect::stub),
  };
  t[static_cast<std::size_t>(K::EntityType)] = {
      text("name", &EntityType::name),
      text("description", &EntityType::description),
      ref_opt("parent", &EntityType::parent, {K::EntityType}, "children"),
      ref_list("children", &EntityType::children, {K::EntityType}, "parent"),
      text("artifactRoot", &EntityType::artifactRoot, false),
      boolean("stub", &EntityType::stub),
  };
  t[static_cast<std::size_t>(K::Property)] = {
      text("name", &Property::name),
      text("description", &Property::description),
  };
  t[static_cast<std::size_t>(K::Factor)] = {
      text("name", &Factor::name),
      text("description", &Factor::description),
      ref_opt("entityType", &Factor::entityType, {K::EntityType}, {}, true),
      ref_opt("property", &Factor::property, {K::Property}, {}, true),
      ref_set("isQuantified", &Factor::isQuantified, {K::Measure}, "quantifies"),
      tags("tags", &Factor::tags),
      boolean("stub", &Factor::stub),
  };
  t[static_cast<std::size_t>(K::Impact)] = {
      ref_one("factor", &Impact::factor, {K::Factor}),
      ref_one("qualityAspect", &Impact::qualityAspect, {K::QualityAspect}, "influencedBy"),
      ref_opt("requirement", &Impact::requirement, {K::QualityRequirement}, "groupedImpacts"),
      effect_field(),
      text("justification", &Impact::justification),
      ref_opt("evaluatedBy", &Impact::evaluatedBy, {K::ImpactEvaluation}, "impact"),
  };
  t[static_cast<std::size_t>(K::QualityRequirement)] = {
      text("name", &QualityRequirement::name),
      text("description", &QualityRequirement::description),
      ref_set("groupedImpacts", &QualityRequirement::groupedImpacts, {K::Impact}, "requirement"),
  };
  t[static_cast<std::size_t>(K::Measure)] = {
      text("name", &Measure::name),
      text("measurementRule", &Measure::measurementRule),
      text("scale", &Measure::scale),
      ref_set("quantifies", &Measure::quantifies, {K::Factor}, "isQuantified"),
      tags("tags", &Measure::tags),
      boolean("stub", &Measure::stub),
  };
  t[static_cast<std::size_t>(K::ImpactEvaluation)] = {
      ref_one("impact", &ImpactEvaluation::impact, {K::Impact}, "evaluatedBy"),
      ref_set("uses", &ImpactEvaluation::uses, {K::Measure}),
      text("evaluationRule", &ImpactEvaluation::evaluationRule),
      text("evaluationScale", &ImpactEvaluation::evaluationScale),
  };
  t[static_cast<std::size_t>(K::QualityAspectEvaluation)] = {
      ref_one("qualityAspect", &QualityAspectEvaluation::qualityAspect, {K::QualityAspect}, "evaluatedBy"),
      text("aggregationRule", &QualityAspectEvaluation::aggregationRule),
      ref_set("considers", &QualityAspectEvaluation::considers,
              {K::ImpactEvaluation, K::QualityAspectEvaluation}),
  };
  return t;
}

}  // namespace detail

inline const std::vector<FieldDesc>& fields_of(ElementKind kind) {
  static const std::vector<std::vector<FieldDesc>> table = detail::build_field_table();
  return table[static_cast<std::size_t>(kind)];
}

inline const FieldDesc* find_field(ElementKind kind, std::string_view name) {
  for (const auto& f : fields_of(kind)) {
    if (f.name == name) return &f;
  }
  return nullptr;
}

inline const FieldDesc& field_of(ElementKind kind, std::string_view name) {
  const FieldDesc* f = find_field(kind, name);
  if (f == nullptr) {
    throw InputError("element kind " + std::string(kind_name(kind)) + " has no field '" + std::string(name) + "'");
  }
  return *f;
}

}  // namespace qmadapt
