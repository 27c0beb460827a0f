#pragma once

#include <algorithm>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "qmadapt/goal.hpp"
#include "qmadapt/model.hpp"
#include "qmadapt/operation.hpp"

namespace qmadapt {

enum class Flavor { Consistency, Adaptation };

inline std::string_view flavor_name(Flavor f) { return f == Flavor::Consistency ? "consistency" : "adaptation"; }

/// A rule firing: either a delete the engine performs on its own
/// (consistency) or a task for the user (adaptation).
struct Consequence {
  Flavor flavor = Flavor::Adaptation;
  std::string templateId;
  ElementId target;
  std::string text;
  std::vector<Operation> suggested;
};

inline nlohmann::json consequence_to_json(const Consequence& c) {
  return {{"flavor", flavor_name(c.flavor)},
          {"templateId", c.templateId},
          {"target", c.target.str()},
          {"text", c.text},
          {"suggested", operations_to_json(c.suggested)}};
}

using RulePredicate = bool (*)(const QualityModel&, const AdaptationGoal&, const ElementId&);

/// Static description of a task kind. `satisfied` is the obligation: a task
/// closes by itself once it holds, and is not opened if it already holds.
/// Tasks without it only close explicitly. Explicit completion of a
/// `mandatory` task needs the obligation to hold afterwards.
struct TaskTemplate {
  std::string_view id;
  Flavor flavor = Flavor::Adaptation;
  RulePredicate satisfied = nullptr;
  bool mandatory = false;
};

namespace rules {

inline std::string label(const QualityModel& m, const ElementId& id) {
  std::string out = "'" + id.str() + "'";
  if (m.contains(id)) {
    const std::string& name = name_of(m.at(id));
    if (!trim(name).empty()) out += " (" + name + ")";
  }
  return out;
}

inline std::string label(const Element& e) {
  std::string out = "'" + id_of(e).str() + "'";
  if (!trim(name_of(e)).empty()) out += " (" + name_of(e) + ")";
  return out;
}

inline bool blank(const std::string& s) { return trim(s).empty(); }

template <typename T, typename Pred>
bool any_of_kind(const QualityModel& m, Pred pred) {
  for (const auto& [id, e] : m.elements()) {
    if (const auto* x = std::get_if<T>(&e); x && pred(*x)) return true;
  }
  return false;
}

template <typename T, typename Pred>
std::vector<ElementId> ids_where(const QualityModel& m, Pred pred) {
  std::vector<ElementId> out;
  for (const auto& [id, e] : m.elements()) {
    if (const auto* x = std::get_if<T>(&e); x && pred(*x)) out.push_back(id);
  }
  return out;
}

/// Evaluations an aspect evaluation has to consider: those of the aspect's
/// impacts and of its direct sub-aspects.
inline IdSet required_considers(const QualityModel& m, const QualityAspect& qa) {
  IdSet out;
  for (const auto& i : qa.influencedBy) {
    if (const auto* impact = m.find<Impact>(i); impact && impact->evaluatedBy) out.insert(*impact->evaluatedBy);
  }
  for (const auto& c : qa.refinedBy) {
    if (const auto* child = m.find<QualityAspect>(c); child && child->evaluatedBy) out.insert(*child->evaluatedBy);
  }
  return out;
}

inline bool qae_covers(const QualityModel& m, const ElementId& qae_id) {
  const auto* qae = m.find<QualityAspectEvaluation>(qae_id);
  if (qae == nullptr) return false;
  const auto* qa = m.find<QualityAspect>(qae->qualityAspect);
  return qa != nullptr && required_considers(m, *qa) == qae->considers;
}

inline bool ie_uses_factor_measures(const QualityModel& m, const ElementId& ie_id) {
  const auto* ie = m.find<ImpactEvaluation>(ie_id);
  if (ie == nullptr) return false;
  const auto* impact = m.find<Impact>(ie->impact);
  const auto* factor = impact ? m.find<Factor>(impact->factor) : nullptr;
  if (factor == nullptr) return true;
  return std::includes(ie->uses.begin(), ie->uses.end(), factor->isQuantified.begin(), factor->isQuantified.end());
}

template <typename T>
bool named_and_described(const QualityModel& m, const ElementId& t) {
  const auto* x = m.find<T>(t);
  return x != nullptr && !blank(x->name) && !blank(x->description);
}

inline bool sole_root_aspect(const QualityModel& m, const ElementId& t) {
  int roots = 0;
  bool is_root = false;
  for (const auto* qa : m.all<QualityAspect>()) {
    if (qa->parent) continue;
    ++roots;
    is_root = is_root || qa->id == t;
  }
  return is_root && roots == 1;
}

using G = AdaptationGoal;
using M = QualityModel;
using Id = ElementId;

// Obligations, one per template that has one.

inline bool et_named(const M& m, const G&, const Id& t) { return named_and_described<EntityType>(m, t); }
inline bool et_placed(const M& m, const G& g, const Id& t) {
  const auto* et = m.find<EntityType>(t);
  return et && (et->parent || g.object.count(et->name) != 0);
}
inline bool et_has_factor(const M& m, const G&, const Id& t) {
  return any_of_kind<Factor>(m, [&](const Factor& f) { return f.entityType == t; });
}
inline bool et_not_orphan_leaf(const M& m, const G& g, const Id& t) {
  const auto* et = m.find<EntityType>(t);
  return et && (!et->children.empty() || et_has_factor(m, g, t));
}
inline bool property_used(const M& m, const G&, const Id& t) {
  return any_of_kind<Factor>(m, [&](const Factor& f) { return f.property == t; });
}
inline bool factor_has_property(const M& m, const G&, const Id& t) {
  const auto* f = m.find<Factor>(t);
  return f && f->property;
}
inline bool factor_has_entity_type(const M& m, const G&, const Id& t) {
  const auto* f = m.find<Factor>(t);
  return f && f->entityType;
}
inline bool factor_quantified(const M& m, const G&, const Id& t) {
  const auto* f = m.find<Factor>(t);
  return f && !f->isQuantified.empty();
}
inline bool factor_described(const M& m, const G&, const Id& t) {
  const auto* f = m.find<Factor>(t);
  return f && !blank(f->name) && !blank(f->description);
}
inline bool factor_has_impact(const M& m, const G&, const Id& t) {
  return any_of_kind<Impact>(m, [&](const Impact& i) { return i.factor == t; });
}
inline bool ie_covers_factor(const M& m, const G&, const Id& t) { return ie_uses_factor_measures(m, t); }
inline bool requirement_used(const M& m, const G&, const Id& t) {
  const auto* r = m.find<QualityRequirement>(t);
  return r && !r->groupedImpacts.empty();
}
inline bool aspect_not_bare_leaf(const M& m, const G&, const Id& t) {
  const auto* qa = m.find<QualityAspect>(t);
  return qa && (!qa->refinedBy.empty() || !qa->influencedBy.empty());
}
inline bool always(const M&, const G&, const Id&) { return true; }
inline bool impact_has_requirement(const M& m, const G&, const Id& t) {
  const auto* i = m.find<Impact>(t);
  return i && i->requirement;
}
inline bool impact_justified(const M& m, const G&, const Id& t) {
  const auto* i = m.find<Impact>(t);
  return i && !blank(i->justification);
}
inline bool impact_evaluated(const M& m, const G&, const Id& t) {
  const auto* i = m.find<Impact>(t);
  return i && i->evaluatedBy;
}
inline bool property_named(const M& m, const G&, const Id& t) { return named_and_described<Property>(m, t); }
inline bool qa_named(const M& m, const G&, const Id& t) { return named_and_described<QualityAspect>(m, t); }
inline bool qa_placed(const M& m, const G& g, const Id& t) {
  const auto* qa = m.find<QualityAspect>(t);
  return qa && (qa->parent || g.focus.count(qa->name) != 0 || sole_root_aspect(m, t));
}
inline bool qa_evaluated(const M& m, const G&, const Id& t) {
  const auto* qa = m.find<QualityAspect>(t);
  return qa && qa->evaluatedBy;
}
inline bool qae_coverage(const M& m, const G&, const Id& t) { return qae_covers(m, t); }
inline bool requirement_named(const M& m, const G&, const Id& t) {
  return named_and_described<QualityRequirement>(m, t);
}
inline bool measure_named(const M& m, const G&, const Id& t) {
  const auto* x = m.find<Measure>(t);
  return x && !blank(x->name) && !blank(x->measurementRule);
}
inline bool measure_quantifies(const M& m, const G&, const Id& t) {
  const auto* x = m.find<Measure>(t);
  return x && !x->quantifies.empty();
}
inline bool measure_used(const M& m, const G&, const Id& t) {
  return any_of_kind<ImpactEvaluation>(m, [&](const ImpactEvaluation& ie) { return ie.uses.count(t) != 0; });
}
inline bool ie_has_measure(const M& m, const G&, const Id& t) {
  const auto* x = m.find<ImpactEvaluation>(t);
  return x && !x->uses.empty();
}
inline bool ie_has_rule(const M& m, const G&, const Id& t) {
  const auto* x = m.find<ImpactEvaluation>(t);
  return x && !blank(x->evaluationRule);
}
inline bool qae_complete(const M& m, const G&, const Id& t) {
  const auto* x = m.find<QualityAspectEvaluation>(t);
  return x && !blank(x->aggregationRule) && qae_covers(m, t);
}

}  // namespace rules

inline const std::vector<TaskTemplate>& task_templates() {
  using namespace rules;
  using F = Flavor;
  static const std::vector<TaskTemplate> table = {
      {"entityType.del.factors", F::Consistency},
      {"entityType.del.children", F::Consistency},
      {"factor.del.impacts", F::Consistency},
      {"impact.del.evaluation", F::Consistency},
      {"property.del.factors", F::Consistency},
      {"qualityAspect.del.impacts", F::Consistency},
      {"qualityAspect.del.evaluation", F::Consistency},
      {"qualityAspect.del.children", F::Consistency},
      {"requirement.del.impacts", F::Consistency},

      {"entityType.add.name-description", F::Adaptation, et_named, true},
      {"entityType.add.parent", F::Adaptation, et_placed, true},
      {"entityType.add.factors", F::Adaptation, et_has_factor, false},

      {"factor.del.orphan-property", F::Adaptation, property_used, false},
      {"factor.del.orphan-entity-type", F::Adaptation, et_not_orphan_leaf, false},
      {"factor.del.orphan-measure", F::Adaptation, measure_quantifies, false},
      {"factor.add.property", F::Adaptation, factor_has_property, true},
      {"factor.add.entity-type", F::Adaptation, factor_has_entity_type, true},
      {"factor.add.measure", F::Adaptation, factor_quantified, true},
      {"factor.add.description", F::Adaptation, factor_described, true},
      {"factor.add.impacts", F::Adaptation, factor_has_impact, true},
      {"factor.mod.isQuantified", F::Adaptation, ie_covers_factor, false},

      {"impact.del.orphan-factor", F::Adaptation, factor_has_impact, false},
      {"impact.del.orphan-requirement", F::Adaptation, requirement_used, false},
      {"impact.del.orphan-aspect", F::Adaptation, aspect_not_bare_leaf, false},
      {"impact.add.aspect", F::Adaptation, always, true},
      {"impact.add.factor", F::Adaptation, always, true},
      {"impact.add.requirement", F::Adaptation, impact_has_requirement, true},
      {"impact.add.justification", F::Adaptation, impact_justified, true},
      {"impact.add.evaluation", F::Adaptation, impact_evaluated, true},
      {"impact.mod.factor", F::Adaptation, ie_covers_factor, false},

      {"property.add.name-description", F::Adaptation, property_named, true},
      {"property.add.factors", F::Adaptation, property_used, true},

      {"qualityAspect.add.name-description", F::Adaptation, qa_named, true},
      {"qualityAspect.add.parent", F::Adaptation, qa_placed, true},
      {"qualityAspect.add.refine", F::Adaptation, aspect_not_bare_leaf, false},
      {"qualityAspect.add.evaluation", F::Adaptation, qa_evaluated, true},
      {"qualityAspect.add.impacts", F::Adaptation, aspect_not_bare_leaf, true},
      {"qualityAspect.mod.refinedBy", F::Adaptation, qae_coverage, true},
      {"qualityAspect.mod.influencedBy", F::Adaptation, qae_coverage, true},

      {"requirement.add.name-description", F::Adaptation, requirement_named, true},

      {"measure.del.eval-rule", F::Adaptation},
      {"measure.add.name-rule", F::Adaptation, measure_named, true},
      {"measure.add.factor", F::Adaptation, measure_quantifies, true},
      {"measure.add.evaluation", F::Adaptation, measure_used, true},
      {"measure.mod.measurementRule", F::Adaptation},

      {"impactEvaluation.del.replace", F::Adaptation, impact_evaluated, true},
      {"impactEvaluation.add.impact", F::Adaptation, always, true},
      {"impactEvaluation.add.measure", F::Adaptation, ie_has_measure, true},
      {"impactEvaluation.add.rule", F::Adaptation, ie_has_rule, true},
      {"impactEvaluation.mod.uses", F::Adaptation},

      {"aspectEvaluation.del.replace", F::Adaptation, qa_evaluated, true},
      {"aspectEvaluation.add.aspect", F::Adaptation, always, true},
      {"aspectEvaluation.add.rule", F::Adaptation, qae_complete, true},

      // Manually raised review items, such as those seeded by tailoring.
      {"review.flag", F::Adaptation},
  };
  return table;
}

/// Reconciliation tasks track one open validation rule on one element.
inline constexpr std::string_view kCheckPrefix = "check.";

inline const TaskTemplate* find_template(std::string_view id) {
  static const std::map<std::string, const TaskTemplate*, std::less<>> index = [] {
    std::map<std::string, const TaskTemplate*, std::less<>> out;
    for (const auto& t : task_templates()) out.emplace(std::string(t.id), &t);
    return out;
  }();
  auto it = index.find(id);
  return it == index.end() ? nullptr : it->second;
}

namespace rules {

inline Consequence make(std::string_view tmpl, ElementId target, std::string text,
                        std::vector<Operation> suggested = {}) {
  const TaskTemplate* t = find_template(tmpl);
  if (t == nullptr) throw std::logic_error("unknown task template " + std::string(tmpl));
  return {t->flavor, std::string(tmpl), std::move(target), std::move(text), std::move(suggested)};
}

inline Operation set_field(ElementKind kind, const ElementId& id, std::string field) {
  return Operation::mod(kind, id, std::move(field));
}

}  // namespace rules

/// Elements that must go together with `x` when it is deleted. Only direct
/// dependants are listed; the engine recurses.
inline std::vector<Consequence> consistency_for_delete(const QualityModel& m, const ElementId& x) {
  using rules::make;
  using K = ElementKind;
  std::vector<Consequence> out;
  auto kind = m.kind_of(x);
  if (!kind) throw NotFoundError("no element '" + x.str() + "'");
  auto del = [&](std::string_view tmpl, K k, const ElementId& target, const std::string& why) {
    out.push_back(make(tmpl, target, "Delete " + std::string(kind_name(k)) + " " + rules::label(m, target) + " " + why,
                       {Operation::del(k, target)}));
  };
  const std::string of = "of deleted " + std::string(kind_name(*kind)) + " " + rules::label(m, x) + ".";
  switch (*kind) {
    case K::EntityType: {
      for (const auto& f : rules::ids_where<Factor>(m, [&](const Factor& f) { return f.entityType == x; })) {
        del("entityType.del.factors", K::Factor, f, of);
      }
      for (const auto& c : m.get<EntityType>(x).children) del("entityType.del.children", K::EntityType, c, of);
      break;
    }
    case K::Factor:
      for (const auto& i : rules::ids_where<Impact>(m, [&](const Impact& i) { return i.factor == x; })) {
        del("factor.del.impacts", K::Impact, i, of);
      }
      break;
    case K::Impact:
      if (const auto& ie = m.get<Impact>(x).evaluatedBy) del("impact.del.evaluation", K::ImpactEvaluation, *ie, of);
      break;
    case K::Property:
      for (const auto& f : rules::ids_where<Factor>(m, [&](const Factor& f) { return f.property == x; })) {
        del("property.del.factors", K::Factor, f, of);
      }
      break;
    case K::QualityAspect: {
      const auto& qa = m.get<QualityAspect>(x);
      for (const auto& i : qa.influencedBy) del("qualityAspect.del.impacts", K::Impact, i, of);
      if (qa.evaluatedBy) del("qualityAspect.del.evaluation", K::QualityAspectEvaluation, *qa.evaluatedBy, of);
      for (const auto& c : qa.refinedBy) del("qualityAspect.del.children", K::QualityAspect, c, of);
      break;
    }
    case K::QualityRequirement:
      for (const auto& i : m.get<QualityRequirement>(x).groupedImpacts) {
        del("requirement.del.impacts", K::Impact, i, of);
      }
      break;
    default:
      break;
  }
  return out;
}

/// Tasks raised by deleting `gone`. `m` still holds the element and its
/// links; whether a task is really opened is decided on the state after the
/// whole cascade.
inline std::vector<Consequence> adaptation_for_delete(const QualityModel& m, const AdaptationGoal& g,
                                                      const Element& gone) {
  using rules::label;
  using rules::make;
  using K = ElementKind;
  const bool eval = g.purpose == Purpose::Evaluation;
  std::vector<Consequence> out;
  const std::string what = label(gone);
  if (const auto* f = std::get_if<Factor>(&gone)) {
    if (f->property) {
      out.push_back(make("factor.del.orphan-property", *f->property,
                         "Property " + label(m, *f->property) + " is no longer used by any factor; delete it.",
                         {Operation::del(K::Property, *f->property)}));
    }
    if (f->entityType) {
      out.push_back(make("factor.del.orphan-entity-type", *f->entityType,
                         "Entity type " + label(m, *f->entityType) +
                             " is a leaf no longer used by any factor; delete it.",
                         {Operation::del(K::EntityType, *f->entityType)}));
    }
    for (const auto& mid : f->isQuantified) {
      out.push_back(make("factor.del.orphan-measure", mid,
                         "Measure " + label(m, mid) + " no longer quantifies any factor; delete it or assign it.",
                         {Operation::del(K::Measure, mid)}));
    }
  } else if (const auto* i = std::get_if<Impact>(&gone)) {
    out.push_back(make("impact.del.orphan-factor", i->factor,
                       "Factor " + label(m, i->factor) + " no longer impacts any quality aspect; delete it.",
                       {Operation::del(K::Factor, i->factor)}));
    if (i->requirement) {
      out.push_back(make("impact.del.orphan-requirement", *i->requirement,
                         "Requirement " + label(m, *i->requirement) + " no longer groups any impact; delete it.",
                         {Operation::del(K::QualityRequirement, *i->requirement)}));
    }
    // A leaf aspect without impacts has nothing left to describe.
    out.push_back(make("impact.del.orphan-aspect", i->qualityAspect,
                       "Quality aspect " + label(m, i->qualityAspect) +
                           " is a leaf without impacts; delete it or add impacts.",
                       {Operation::del(K::QualityAspect, i->qualityAspect)}));
  } else if (const auto* mm = std::get_if<Measure>(&gone)) {
    for (const auto& ie : rules::ids_where<ImpactEvaluation>(
             m, [&](const ImpactEvaluation& x) { return x.uses.count(mm->id) != 0; })) {
      out.push_back(make("measure.del.eval-rule", ie,
                         "Adjust the evaluation rule of impact evaluation " + label(m, ie) +
                             " to the removal of measure " + what + ".",
                         {rules::set_field(K::ImpactEvaluation, ie, "evaluationRule")}));
    }
  } else if (const auto* ie = std::get_if<ImpactEvaluation>(&gone)) {
    if (eval) {
      out.push_back(make("impactEvaluation.del.replace", ie->impact,
                         "Impact " + label(m, ie->impact) +
                             " lost its impact evaluation; add a new one or delete the impact.",
                         {Operation::add(K::ImpactEvaluation, {{"impact", ie->impact.str()}}),
                          Operation::del(K::Impact, ie->impact)}));
    }
  } else if (const auto* qae = std::get_if<QualityAspectEvaluation>(&gone)) {
    if (eval) {
      out.push_back(make("aspectEvaluation.del.replace", qae->qualityAspect,
                         "Quality aspect " + label(m, qae->qualityAspect) +
                             " lost its aspect evaluation; add a new one or delete the aspect.",
                         {Operation::add(K::QualityAspectEvaluation, {{"qualityAspect", qae->qualityAspect.str()}}),
                          Operation::del(K::QualityAspect, qae->qualityAspect)}));
    }
  }
  return out;
}

/// Tasks raised by adding element `x` (already in `m`).
inline std::vector<Consequence> adaptation_for_add(const QualityModel& m, const AdaptationGoal& g,
                                                   const ElementId& x) {
  using rules::make;
  using rules::set_field;
  using K = ElementKind;
  const bool eval = g.purpose == Purpose::Evaluation;
  const std::string lx = rules::label(m, x);
  std::vector<Consequence> out;
  switch (*m.kind_of(x)) {
    case K::EntityType:
      out.push_back(make("entityType.add.name-description", x, "Provide name and description of entity type " + lx + ".",
                         {set_field(K::EntityType, x, "name"), set_field(K::EntityType, x, "description")}));
      out.push_back(make("entityType.add.parent", x, "Place entity type " + lx + " below a parent entity type.",
                         {set_field(K::EntityType, x, "parent")}));
      out.push_back(make("entityType.add.factors", x, "Consider which factors characterize entity type " + lx + ".",
                         {Operation::add(K::Factor, {{"entityType", x.str()}})}));
      break;
    case K::Factor:
      out.push_back(make("factor.add.property", x, "Associate factor " + lx + " with a property.",
                         {set_field(K::Factor, x, "property")}));
      out.push_back(make("factor.add.entity-type", x, "Associate factor " + lx + " with an entity type.",
                         {set_field(K::Factor, x, "entityType")}));
      if (eval) {
        out.push_back(make("factor.add.measure", x, "Add measures quantifying factor " + lx + ".",
                           {Operation::add(K::Measure, {{"quantifies", {x.str()}}})}));
      }
      out.push_back(make("factor.add.description", x, "Provide name and description of factor " + lx + ".",
                         {set_field(K::Factor, x, "name"), set_field(K::Factor, x, "description")}));
      out.push_back(make("factor.add.impacts", x, "Add impacts of factor " + lx + " on quality aspects.",
                         {Operation::add(K::Impact, {{"factor", x.str()}})}));
      break;
    case K::Impact: {
      out.push_back(make("impact.add.aspect", x, "Associate impact " + lx + " with a quality aspect."));
      out.push_back(make("impact.add.requirement", x, "Associate impact " + lx + " with a quality requirement.",
                         {set_field(K::Impact, x, "requirement")}));
      out.push_back(make("impact.add.factor", x, "Associate impact " + lx + " with a factor."));
      out.push_back(make("impact.add.justification", x, "Justify impact " + lx + ".",
                         {set_field(K::Impact, x, "justification")}));
      if (eval) {
        out.push_back(make("impact.add.evaluation", x, "Add an impact evaluation for impact " + lx + ".",
                           {Operation::add(K::ImpactEvaluation, {{"impact", x.str()}})}));
      }
      break;
    }
    case K::Property:
      out.push_back(make("property.add.name-description", x, "Provide name and description of property " + lx + ".",
                         {set_field(K::Property, x, "name"), set_field(K::Property, x, "description")}));
      out.push_back(make("property.add.factors", x, "Use property " + lx + " in at least one factor.",
                         {Operation::add(K::Factor, {{"property", x.str()}})}));
      break;
    case K::QualityAspect:
      out.push_back(make("qualityAspect.add.name-description", x,
                         "Provide name and description of quality aspect " + lx + ".",
                         {set_field(K::QualityAspect, x, "name"), set_field(K::QualityAspect, x, "description")}));
      out.push_back(make("qualityAspect.add.parent", x, "Place quality aspect " + lx + " below a parent aspect.",
                         {set_field(K::QualityAspect, x, "parent")}));
      out.push_back(make("qualityAspect.add.refine", x, "Consider refining quality aspect " + lx + " into sub-aspects.",
                         {Operation::add(K::QualityAspect, {{"parent", x.str()}})}));
      if (eval) {
        out.push_back(make("qualityAspect.add.evaluation", x, "Add an aspect evaluation for quality aspect " + lx + ".",
                           {Operation::add(K::QualityAspectEvaluation, {{"qualityAspect", x.str()}})}));
      }
      out.push_back(make("qualityAspect.add.impacts", x,
                         "Associate quality aspect " + lx + " with impacts or sub-aspects.",
                         {Operation::add(K::Impact, {{"qualityAspect", x.str()}})}));
      break;
    case K::QualityRequirement:
      out.push_back(make("requirement.add.name-description", x,
                         "Provide name and description of requirement " + lx + ".",
                         {set_field(K::QualityRequirement, x, "name"),
                          set_field(K::QualityRequirement, x, "description")}));
      break;
    case K::Measure:
      out.push_back(make("measure.add.name-rule", x, "Provide name and measurement rule.",
                         {set_field(K::Measure, x, "name"), set_field(K::Measure, x, "measurementRule")}));
      out.push_back(make("measure.add.factor", x, "Associate with ≥ 1 factor",
                         {set_field(K::Measure, x, "quantifies")}));
      out.push_back(make("measure.add.evaluation", x, "Associate with ≥ 1 impact evaluation",
                         {Operation::mod(K::ImpactEvaluation, ElementId(), "uses")}));
      break;
    case K::ImpactEvaluation:
      out.push_back(make("impactEvaluation.add.impact", x, "Associate impact evaluation " + lx + " with an impact."));
      out.push_back(make("impactEvaluation.add.measure", x,
                         "Associate impact evaluation " + lx + " with the measures it uses.",
                         {set_field(K::ImpactEvaluation, x, "uses")}));
      out.push_back(make("impactEvaluation.add.rule", x, "Provide the evaluation rule of impact evaluation " + lx + ".",
                         {set_field(K::ImpactEvaluation, x, "evaluationRule")}));
      break;
    case K::QualityAspectEvaluation:
      out.push_back(make("aspectEvaluation.add.aspect", x, "Associate aspect evaluation " + lx + " with a quality aspect."));
      out.push_back(make("aspectEvaluation.add.rule", x,
                         "Provide the aggregation rule of aspect evaluation " + lx +
                             " and let it consider the evaluations of all impacts and sub-aspects.",
                         {set_field(K::QualityAspectEvaluation, x, "aggregationRule"),
                          set_field(K::QualityAspectEvaluation, x, "considers")}));
      break;
  }
  return out;
}

/// Tasks raised by a change of `field` on `x`. Called for the field an
/// operation edits and for every link that changed on the other end.
inline std::vector<Consequence> adaptation_for_mod(const QualityModel& m, const AdaptationGoal&, const ElementId& x,
                                                   std::string_view field) {
  using rules::label;
  using rules::make;
  using K = ElementKind;
  std::vector<Consequence> out;
  auto kind = m.kind_of(x);
  if (!kind) return out;
  auto ies_of_factor = [&](const ElementId& factor) {
    std::vector<ElementId> ies;
    for (const auto* i : m.all<Impact>()) {
      if (i->factor == factor && i->evaluatedBy && m.contains(*i->evaluatedBy)) ies.push_back(*i->evaluatedBy);
    }
    std::sort(ies.begin(), ies.end());
    return ies;
  };
  if (*kind == K::Factor && field == "isQuantified") {
    for (const auto& ie : ies_of_factor(x)) {
      out.push_back(make("factor.mod.isQuantified", ie,
                         "Check that all relevant measures of the factor " + label(m, x) +
                             " are associated with the impact evaluation " + label(m, ie) + ".",
                         {Operation::mod(K::ImpactEvaluation, ie, "uses")}));
    }
  } else if (*kind == K::Impact && field == "factor") {
    const auto& impact = m.get<Impact>(x);
    if (impact.evaluatedBy && m.contains(*impact.evaluatedBy)) {
      out.push_back(make("impact.mod.factor", *impact.evaluatedBy,
                         "Check that the impact evaluation " + label(m, *impact.evaluatedBy) +
                             " uses the measures of factor " + label(m, impact.factor) + ".",
                         {Operation::mod(K::ImpactEvaluation, *impact.evaluatedBy, "uses")}));
    }
  } else if (*kind == K::QualityAspect && (field == "refinedBy" || field == "influencedBy")) {
    const auto& qa = m.get<QualityAspect>(x);
    if (qa.evaluatedBy && m.contains(*qa.evaluatedBy)) {
      std::string what = field == "refinedBy" ? "the evaluations of all sub-aspects" : "the evaluations of all impacts";
      out.push_back(make(field == "refinedBy" ? "qualityAspect.mod.refinedBy" : "qualityAspect.mod.influencedBy",
                         *qa.evaluatedBy,
                         "Assure that the aspect evaluation " + label(m, *qa.evaluatedBy) + " of " + label(m, x) +
                             " considers " + what + ".",
                         {Operation::mod(K::QualityAspectEvaluation, *qa.evaluatedBy, "considers")}));
    }
  } else if (*kind == K::Measure && field == "measurementRule") {
    for (const auto& ie : rules::ids_where<ImpactEvaluation>(
             m, [&](const ImpactEvaluation& e) { return e.uses.count(x) != 0; })) {
      out.push_back(make("measure.mod.measurementRule", ie,
                         "Check that the evaluation rule of impact evaluation " + label(m, ie) +
                             " still fits the measurement rule of " + label(m, x) + ".",
                         {Operation::mod(K::ImpactEvaluation, ie, "evaluationRule")}));
    }
  } else if (*kind == K::ImpactEvaluation && field == "uses") {
    out.push_back(make("impactEvaluation.mod.uses", x,
                       "Assure that the evaluation rule of the impact evaluation " + label(m, x) +
                           " considers all used measures.",
                       {Operation::mod(K::ImpactEvaluation, x, "evaluationRule")}));
  }
  return out;
}

}  // namespace qmadapt
