#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>

#include <json.hpp>

#include "qmadapt/errors.hpp"

namespace qmadapt {

enum class ElementKind : std::uint8_t {
  QualityAspect,
  EntityType,
  Property,
  Factor,
  Impact,
  QualityRequirement,
  Measure,
  ImpactEvaluation,
  QualityAspectEvaluation,
};

inline constexpr std::array<ElementKind, 9> kAllKinds = {
    ElementKind::QualityAspect,      ElementKind::EntityType,       ElementKind::Property,
    ElementKind::Factor,             ElementKind::Impact,           ElementKind::QualityRequirement,
    ElementKind::Measure,            ElementKind::ImpactEvaluation, ElementKind::QualityAspectEvaluation,
};

inline constexpr std::string_view kind_name(ElementKind k) {
  constexpr std::array<std::string_view, 9> names = {
      "QualityAspect", "EntityType", "Property", "Factor", "Impact", "QualityRequirement",
      "Measure", "ImpactEvaluation", "QualityAspectEvaluation"};
  return names[static_cast<std::size_t>(k)];
}

/// Name of the collection holding elements of kind `k` in the model file.
inline constexpr std::string_view collection_name(ElementKind k) {
  constexpr std::array<std::string_view, 9> names = {
      "qualityAspects", "entityTypes", "properties", "factors", "impacts", "qualityRequirements",
      "measures", "impactEvaluations", "qualityAspectEvaluations"};
  return names[static_cast<std::size_t>(k)];
}

/// Prefix for generated ids.
inline constexpr std::string_view id_prefix(ElementKind k) {
  constexpr std::array<std::string_view, 9> names = {"qa", "et", "p", "f", "i", "r", "m", "ie", "qae"};
  return names[static_cast<std::size_t>(k)];
}

inline std::optional<ElementKind> parse_kind(std::string_view name) {
  for (ElementKind k : kAllKinds) {
    if (kind_name(k) == name) return k;
  }
  return std::nullopt;
}

inline bool is_evaluation_part(ElementKind k) {
  return k == ElementKind::Measure || k == ElementKind::ImpactEvaluation ||
         k == ElementKind::QualityAspectEvaluation;
}

/// Opaque element identity. The kind lives with the element in the model.
class ElementId {
 public:
  ElementId() = default;
  explicit ElementId(std::string value) : value_(std::move(value)) {}

  const std::string& str() const noexcept { return value_; }
  bool empty() const noexcept { return value_.empty(); }

  friend bool operator==(const ElementId&, const ElementId&) = default;
  friend auto operator<=>(const ElementId& a, const ElementId& b) { return a.value_ <=> b.value_; }
  friend std::ostream& operator<<(std::ostream& os, const ElementId& id) { return os << id.value_; }

 private:
  std::string value_;
};

inline void to_json(nlohmann::json& j, const ElementId& id) { j = id.str(); }
inline void from_json(const nlohmann::json& j, ElementId& id) {
  if (!j.is_string()) throw InputError("element id must be a string");
  id = ElementId(j.get<std::string>());
}

}  // namespace qmadapt

template <>
struct std::hash<qmadapt::ElementId> {
  std::size_t operator()(const qmadapt::ElementId& id) const noexcept {
    return std::hash<std::string>{}(id.str());
  }
};
