#pragma once

#include <algorithm>
#include <string>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "qmadapt/goal.hpp"
#include "qmadapt/model.hpp"

namespace qmadapt {

enum class Severity { Structural, Operational };

inline std::string_view severity_name(Severity s) { return s == Severity::Structural ? "structural" : "operational"; }

struct Violation {
  std::string rule;  // "V1".."V11"
  ElementId target;
  Severity severity = Severity::Structural;
  std::string message;

  friend bool operator==(const Violation&, const Violation&) = default;
};

inline nlohmann::json violation_to_json(const Violation& v) {
  return {{"rule", v.rule}, {"target", v.target.str()}, {"severity", severity_name(v.severity)}, {"message", v.message}};
}

namespace detail {

inline int rule_number(const std::string& rule) { return std::stoi(rule.substr(1)); }

class ViolationSink {
 public:
  void add(const char* rule, const ElementId& target, Severity sev, std::string message) {
    out_.push_back({rule, target, sev, std::move(message)});
  }
  std::vector<Violation> finish() && {
    std::sort(out_.begin(), out_.end(), [](const Violation& a, const Violation& b) {
      return std::make_tuple(rule_number(a.rule), a.target, a.message) <
             std::make_tuple(rule_number(b.rule), b.target, b.message);
    });
    return std::move(out_);
  }

 private:
  std::vector<Violation> out_;
};

inline std::string join(const std::vector<std::string>& parts) {
  std::string out;
  for (const auto& p : parts) out += (out.empty() ? "" : "; ") + p;
  return out;
}

}  // namespace detail

/// Every rule violation of `model` for the given purpose, ordered by rule
/// number and target id. An empty result means the model is consistent.
inline std::vector<Violation> validate(const QualityModel& model, Purpose purpose) {
  using detail::join;
  detail::ViolationSink sink;
  const bool eval = purpose == Purpose::Evaluation;

  // V1 dangling references, V6 asymmetric links.
  for (const auto& [id, e] : model.elements()) {
    ElementKind kind = kind_of(e);
    for (const auto& f : fields_of(kind)) {
      if (!f.is_ref()) continue;
      for (const auto& t : f.refs(e)) {
        auto tk = model.kind_of(t);
        if (!tk) {
          sink.add("V1", id, Severity::Structural,
                   std::string(f.name) + " references missing element '" + t.str() + "'");
          continue;
        }
        if (!f.accepts(*tk)) {
          sink.add("V1", id, Severity::Structural,
                   std::string(f.name) + " references " + std::string(kind_name(*tk)) + " '" + t.str() + "'");
          continue;
        }
        if (f.inverse.empty()) continue;
        const FieldDesc& back = field_of(*tk, f.inverse);
        IdList back_refs = back.refs(model.at(t));
        if (std::find(back_refs.begin(), back_refs.end(), id) == back_refs.end()) {
          sink.add("V6", id, Severity::Structural,
                   std::string(f.name) + " -> '" + t.str() + "' is not mirrored by " + t.str() + "." +
                       std::string(f.inverse));
        }
      }
    }
  }

  // V2 hierarchy cycles.
  auto check_tree = [&](const ElementId& id, auto parent_of) {
    std::set<ElementId> seen{id};
    std::optional<ElementId> cur = parent_of(id);
    while (cur && model.contains(*cur)) {
      if (*cur == id || !seen.insert(*cur).second) {
        sink.add("V2", id, Severity::Structural, "hierarchy contains a cycle");
        return;
      }
      cur = parent_of(*cur);
    }
  };
  for (const auto* qa : model.all<QualityAspect>()) {
    check_tree(qa->id, [&](const ElementId& x) -> std::optional<ElementId> {
      const auto* p = model.find<QualityAspect>(x);
      return p ? p->parent : std::nullopt;
    });
  }
  for (const auto* et : model.all<EntityType>()) {
    check_tree(et->id, [&](const ElementId& x) -> std::optional<ElementId> {
      const auto* p = model.find<EntityType>(x);
      return p ? p->parent : std::nullopt;
    });
  }

  // V3 factor cardinalities.
  for (const auto* f : model.all<Factor>()) {
    if (f->stub) continue;
    std::vector<std::string> missing;
    if (!f->entityType) missing.push_back("no entity type");
    if (!f->property) missing.push_back("no property");
    if (!missing.empty()) sink.add("V3", f->id, Severity::Structural, "factor has " + join(missing));
  }

  // V4 measures.
  for (const auto* m : model.all<Measure>()) {
    if (m->stub) continue;
    std::vector<std::string> problems;
    if (m->quantifies.empty()) problems.push_back("quantifies no factor");
    if (trim(m->name).empty()) problems.push_back("has no name");
    if (trim(m->measurementRule).empty()) problems.push_back("has no measurement rule");
    if (!problems.empty()) sink.add("V4", m->id, Severity::Operational, "measure " + join(problems));
  }

  // V5 impacts.
  for (const auto* i : model.all<Impact>()) {
    if (i->factor.empty() || i->qualityAspect.empty()) {
      sink.add("V5", i->id, Severity::Structural, "impact must link a factor to a quality aspect");
    } else if (trim(i->justification).empty()) {
      sink.add("V5", i->id, Severity::Operational, "impact has no justification");
    }
  }

  if (eval) {
    // V7 every factor is quantified.
    for (const auto* f : model.all<Factor>()) {
      if (!f->stub && f->isQuantified.empty()) {
        sink.add("V7", f->id, Severity::Operational, "factor has no measure");
      }
    }
    // V8 impact evaluations.
    for (const auto* i : model.all<Impact>()) {
      if (!i->evaluatedBy || !model.contains(*i->evaluatedBy)) {
        sink.add("V8", i->id, Severity::Operational, "impact has no impact evaluation");
      }
    }
    for (const auto* ie : model.all<ImpactEvaluation>()) {
      std::vector<std::string> problems;
      if (ie->uses.empty()) problems.push_back("uses no measure");
      if (trim(ie->evaluationRule).empty()) problems.push_back("has no evaluation rule");
      if (!problems.empty()) sink.add("V8", ie->id, Severity::Operational, "impact evaluation " + join(problems));
    }
    // V9 aspect evaluations.
    for (const auto* qa : model.all<QualityAspect>()) {
      if (qa->stub) continue;
      const auto* qae = model.find<QualityAspectEvaluation>(qa->evaluatedBy);
      if (qae == nullptr) {
        sink.add("V9", qa->id, Severity::Operational, "quality aspect has no aspect evaluation");
        continue;
      }
      IdSet required;
      for (const auto& impact_id : qa->influencedBy) {
        if (const auto* i = model.find<Impact>(impact_id); i && i->evaluatedBy) required.insert(*i->evaluatedBy);
      }
      for (const auto& child : qa->refinedBy) {
        if (const auto* c = model.find<QualityAspect>(child); c && c->evaluatedBy) required.insert(*c->evaluatedBy);
      }
      std::vector<std::string> problems;
      for (const auto& r : required) {
        if (qae->considers.count(r) == 0) problems.push_back("does not consider '" + r.str() + "'");
      }
      for (const auto& c : qae->considers) {
        if (required.count(c) == 0) problems.push_back("considers unrelated '" + c.str() + "'");
      }
      if (trim(qae->aggregationRule).empty()) problems.push_back("has no aggregation rule");
      if (!problems.empty()) sink.add("V9", qae->id, Severity::Operational, "aspect evaluation " + join(problems));
    }
  }

  // V10 stubs.
  for (const auto& [id, e] : model.elements()) {
    if (is_stub(e)) {
      sink.add("V10", id, Severity::Operational,
               "stub " + std::string(kind_name(kind_of(e))) + " is a placeholder to resolve");
    }
  }

  // V11 evaluation part in a specification model.
  if (!eval) {
    for (const auto& [id, e] : model.elements()) {
      if (is_evaluation_part(kind_of(e))) {
        sink.add("V11", id, Severity::Operational,
                 std::string(kind_name(kind_of(e))) + " belongs to the evaluation part");
      }
    }
  }
  return std::move(sink).finish();
}

inline std::vector<Violation> structural_violations(const QualityModel& model) {
  auto all = validate(model, Purpose::Evaluation);
  std::erase_if(all, [](const Violation& v) { return v.severity != Severity::Structural; });
  return all;
}

}  // namespace qmadapt
