#pragma once

#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <type_traits>
#include <variant>
#include <vector>

#include "qmadapt/context_tags.hpp"
#include "qmadapt/goal.hpp"
#include "qmadapt/ids.hpp"

namespace qmadapt {

using IdSet = std::set<ElementId>;
using IdList = std::vector<ElementId>;

enum class Effect { Positive, Negative };

inline std::string_view effect_name(Effect e) { return e == Effect::Positive ? "positive" : "negative"; }

// Specification part.

struct QualityAspect {
  ElementId id;
  std::string name;
  std::string description;
  std::optional<ElementId> parent;
  IdList refinedBy;
  NameSet viewpoints;
  IdSet influencedBy;
  std::optional<ElementId> evaluatedBy;
  bool stub = false;

  friend bool operator==(const QualityAspect&, const QualityAspect&) = default;
};

struct EntityType {
  ElementId id;
  std::string name;
  std::string description;
  std::optional<ElementId> parent;
  IdList children;
  std::string artifactRoot;  // derived: name of the tree root
  bool stub = false;

  friend bool operator==(const EntityType&, const EntityType&) = default;
};

struct Property {
  ElementId id;
  std::string name;
  std::string description;

  friend bool operator==(const Property&, const Property&) = default;
};

struct Factor {
  ElementId id;
  std::string name;
  std::string description;
  std::optional<ElementId> entityType;
  std::optional<ElementId> property;
  IdSet isQuantified;
  ContextTags tags;
  bool stub = false;

  friend bool operator==(const Factor&, const Factor&) = default;
};

struct Impact {
  ElementId id;
  ElementId factor;
  ElementId qualityAspect;
  std::optional<ElementId> requirement;
  Effect effect = Effect::Positive;
  std::string justification;
  std::optional<ElementId> evaluatedBy;

  friend bool operator==(const Impact&, const Impact&) = default;
};

struct QualityRequirement {
  ElementId id;
  std::string name;
  std::string description;
  IdSet groupedImpacts;

  friend bool operator==(const QualityRequirement&, const QualityRequirement&) = default;
};

// Evaluation part.

struct Measure {
  ElementId id;
  std::string name;
  std::string measurementRule;
  std::string scale;
  IdSet quantifies;
  ContextTags tags;
  bool stub = false;

  friend bool operator==(const Measure&, const Measure&) = default;
};

struct ImpactEvaluation {
  ElementId id;
  ElementId impact;
  IdSet uses;
  std::string evaluationRule;
  std::string evaluationScale;

  friend bool operator==(const ImpactEvaluation&, const ImpactEvaluation&) = default;
};

struct QualityAspectEvaluation {
  ElementId id;
  ElementId qualityAspect;
  std::string aggregationRule;
  IdSet considers;

  friend bool operator==(const QualityAspectEvaluation&, const QualityAspectEvaluation&) = default;
};

/// Alternatives are in ElementKind order, so `index()` is the kind.
using Element = std::variant<QualityAspect, EntityType, Property, Factor, Impact, QualityRequirement,
                             Measure, ImpactEvaluation, QualityAspectEvaluation>;

namespace detail {
template <typename T, typename V>
struct variant_index;
template <typename T, typename... Ts>
struct variant_index<T, std::variant<Ts...>> {
  static constexpr std::size_t value = [] {
    std::size_t i = 0;
    bool found = false;
    ((found = found || std::is_same_v<T, Ts>, i += found ? 0 : 1), ...);
    return i;
  }();
};
}  // namespace detail

template <typename T>
inline constexpr ElementKind kind_of_v = static_cast<ElementKind>(detail::variant_index<T, Element>::value);

inline ElementKind kind_of(const Element& e) { return static_cast<ElementKind>(e.index()); }

inline const ElementId& id_of(const Element& e) {
  return std::visit([](const auto& x) -> const ElementId& { return x.id; }, e);
}

inline const std::string& name_of(const Element& e) {
  static const std::string kNone;
  return std::visit(
      [](const auto& x) -> const std::string& {
        if constexpr (requires { x.name; }) {
          return x.name;
        } else {
          return kNone;
        }
      },
      e);
}

inline bool is_stub(const Element& e) {
  return std::visit(
      [](const auto& x) {
        if constexpr (requires { x.stub; }) {
          return x.stub;
        } else {
          return false;
        }
      },
      e);
}

namespace detail {
template <typename T>
Element with_id(ElementId id) {
  T x;
  x.id = std::move(id);
  return x;
}
}  // namespace detail

inline Element make_element(ElementKind kind, ElementId id) {
  using detail::with_id;
  switch (kind) {
    case ElementKind::QualityAspect: return with_id<QualityAspect>(std::move(id));
    case ElementKind::EntityType: return with_id<EntityType>(std::move(id));
    case ElementKind::Property: return with_id<Property>(std::move(id));
    case ElementKind::Factor: return with_id<Factor>(std::move(id));
    case ElementKind::Impact: return with_id<Impact>(std::move(id));
    case ElementKind::QualityRequirement: return with_id<QualityRequirement>(std::move(id));
    case ElementKind::Measure: return with_id<Measure>(std::move(id));
    case ElementKind::ImpactEvaluation: return with_id<ImpactEvaluation>(std::move(id));
    case ElementKind::QualityAspectEvaluation: return with_id<QualityAspectEvaluation>(std::move(id));
  }
  throw std::logic_error("unknown element kind");
}

}  // namespace qmadapt
