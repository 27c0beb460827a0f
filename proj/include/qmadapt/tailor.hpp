#pragma once

#include <algorithm>
#include <array>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "qmadapt/engine.hpp"
#include "qmadapt/goal.hpp"
#include "qmadapt/model.hpp"
#include "qmadapt/model_json.hpp"

namespace qmadapt {

enum class TailorAction { Delete, AddStub, Flag };

inline std::string_view tailor_action_name(TailorAction a) {
  switch (a) {
    case TailorAction::Delete: return "delete";
    case TailorAction::AddStub: return "add-stub";
    case TailorAction::Flag: return "flag-for-review";
  }
  return "?";
}

inline constexpr int kTailoringRules = 10;

/// One proposed tailoring step. `target` is an element id for deletes, the
/// stub name for add-stub and a "context:<dim>=<value>" tag for review flags.
struct TailoringAction {
  int rule = 1;  // 1..10
  TailorAction action = TailorAction::Delete;
  ElementKind kind = ElementKind::EntityType;
  std::string target;
  std::string reason;
  nlohmann::json payload;  // ADD payload for stubs, null otherwise

  std::string rule_id() const { return "TR" + std::to_string(rule); }
};

struct TailoringReport {
  std::string modelHash;
  std::vector<TailoringAction> actions;
  std::vector<std::string> seededTasks;

  std::array<int, kTailoringRules> counts() const {
    std::array<int, kTailoringRules> out{};
    for (const auto& a : actions) ++out[static_cast<std::size_t>(a.rule - 1)];
    return out;
  }
};

struct TailoringOptions {
  bool contextReview = true;  // TR10
};

inline nlohmann::json tailoring_report_to_json(const TailoringReport& r) {
  auto actions = nlohmann::json::array();
  for (const auto& a : r.actions) {
    nlohmann::json j = {{"rule", a.rule_id()},
                        {"action", tailor_action_name(a.action)},
                        {"kind", kind_name(a.kind)},
                        {"target", a.target},
                        {"reason", a.reason}};
    if (!a.payload.is_null()) j["payload"] = a.payload;
    actions.push_back(std::move(j));
  }
  nlohmann::json counts = nlohmann::json::object();
  auto c = r.counts();
  for (int i = 0; i < kTailoringRules; ++i) counts["TR" + std::to_string(i + 1)] = c[static_cast<std::size_t>(i)];
  return {{"modelHash", r.modelHash}, {"actions", std::move(actions)}, {"counts", std::move(counts)},
          {"seededTasks", r.seededTasks}};
}

inline TailoringReport tailoring_report_from_json(const nlohmann::json& j) {
  TailoringReport r;
  try {
    r.modelHash = j.at("modelHash").get<std::string>();
    for (const auto& a : j.at("actions")) {
      TailoringAction t;
      std::string rule = a.at("rule").get<std::string>();
      if (rule.rfind("TR", 0) != 0) throw InputError("bad tailoring rule '" + rule + "'");
      t.rule = std::stoi(rule.substr(2));
      if (t.rule < 1 || t.rule > kTailoringRules) throw InputError("bad tailoring rule '" + rule + "'");
      std::string action = a.at("action").get<std::string>();
      if (action == "delete") t.action = TailorAction::Delete;
      else if (action == "add-stub") t.action = TailorAction::AddStub;
      else if (action == "flag-for-review") t.action = TailorAction::Flag;
      else throw InputError("bad tailoring action '" + action + "'");
      auto kind = parse_kind(a.at("kind").get<std::string>());
      if (!kind) throw InputError("bad element kind in tailoring action");
      t.kind = *kind;
      t.target = a.at("target").get<std::string>();
      t.reason = a.value("reason", "");
      t.payload = a.value("payload", nlohmann::json());
      r.actions.push_back(std::move(t));
    }
    r.seededTasks = j.value("seededTasks", std::vector<std::string>{});
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("malformed tailoring report: ") + e.what());
  } catch (const std::invalid_argument&) {
    throw InputError("malformed tailoring rule id");
  }
  return r;
}

namespace detail {

// Cascade-only delete used to see what earlier rules already removed.
inline void simulate_delete(QualityModel& m, const ElementId& x) {
  if (!m.contains(x)) return;
  for (const auto& c : consistency_for_delete(m, x)) simulate_delete(m, c.target);
  if (!m.contains(x)) return;
  m.detach(x);
  m.remove(x);
}

inline std::string names_text(const NameSet& names) {
  std::string out;
  for (const auto& n : names) out += (out.empty() ? "" : ", ") + n;
  return out.empty() ? "(none)" : out;
}

// Root aspects, or the children of a single umbrella root that is not itself
// a quality in focus.
inline std::vector<const QualityAspect*> top_level_aspects(const QualityModel& m, const NameSet& focus) {
  std::vector<const QualityAspect*> roots;
  for (const auto* qa : m.all<QualityAspect>()) {
    if (!qa->parent) roots.push_back(qa);
  }
  if (roots.size() == 1 && focus.count(roots.front()->name) == 0) {
    std::vector<const QualityAspect*> kids;
    for (const auto& c : roots.front()->refinedBy) {
      if (const auto* k = m.find<QualityAspect>(c)) kids.push_back(k);
    }
    std::sort(kids.begin(), kids.end(), [](auto* a, auto* b) { return a->id < b->id; });
    return kids;
  }
  return roots;
}

inline std::string tags_text(const ContextTags& tags) {
  std::string out;
  for (const auto& [dim, values] : tags.dimensions()) {
    if (!out.empty()) out += "; ";
    out += dim + "=";
    bool first = true;
    for (const auto& v : values) {
      out += (first ? "" : "|") + v;
      first = false;
    }
  }
  return out;
}

inline bool disjoint(const NameSet& a, const NameSet& b) {
  return std::none_of(a.begin(), a.end(), [&](const std::string& x) { return b.count(x) != 0; });
}

}  // namespace detail

/// Proposes the tailoring of reference model `model` (goal `gr`) towards
/// goal `ga`. Rules run in order; an element removed by an earlier rule,
/// directly or through its cascade, is not claimed again. The model is not
/// changed.
inline TailoringReport plan_tailoring(const QualityModel& model, const AdaptationGoal& ga, const AdaptationGoal& gr,
                                      const TailoringOptions& options = {}) {
  using K = ElementKind;
  TailoringReport report;
  report.modelHash = model_hash(model);
  QualityModel sim = model;
  std::vector<TailoringAction> rule_actions;

  auto flush = [&](int rule) {
    std::sort(rule_actions.begin(), rule_actions.end(),
              [](const TailoringAction& a, const TailoringAction& b) { return a.target < b.target; });
    for (auto& a : rule_actions) {
      a.rule = rule;
      report.actions.push_back(std::move(a));
    }
    rule_actions.clear();
  };
  auto claim = [&](K kind, const ElementId& id, std::string reason) {
    if (!sim.contains(id)) return;
    detail::simulate_delete(sim, id);
    rule_actions.push_back({0, TailorAction::Delete, kind, id.str(), std::move(reason), nullptr});
  };
  auto label = [&](const ElementId& id) { return rules::label(model, id); };

  // TR1 entity-type trees for artifacts outside GA.object.
  for (const auto* et : model.all<EntityType>()) {
    if (et->parent || ga.object.count(et->artifactRoot) != 0) continue;
    claim(K::EntityType, et->id,
          "artifact " + label(et->id) + " is not an object of the goal (" + detail::names_text(ga.object) + ")");
  }
  flush(1);

  // TR2 root stubs for goal artifacts the reference model does not cover.
  for (const auto& name : ga.object) {
    if (gr.object.count(name) != 0) continue;
    bool present = false;
    for (const auto* et : model.all<EntityType>()) present = present || (!et->parent && same_name(et->name, name));
    if (present) continue;
    rule_actions.push_back({0, TailorAction::AddStub, K::EntityType, name,
                            "goal object '" + name + "' is not covered by the reference model",
                            {{"name", name}, {"stub", true}}});
  }
  flush(2);

  // TR3 evaluation part of a specification model.
  if (ga.purpose == Purpose::Specification) {
    for (const auto& [id, e] : model.elements()) {
      if (is_evaluation_part(kind_of(e))) {
        claim(kind_of(e), id, "a specification model has no " + std::string(kind_name(kind_of(e))));
      }
    }
  }
  flush(3);

  // TR4 aspects seen only from viewpoints outside GA.viewpoint (topmost only).
  std::set<ElementId> off_viewpoint;
  if (!ga.viewpoint.empty()) {
    for (const auto* qa : model.all<QualityAspect>()) {
      NameSet vp = model.effective_viewpoints(qa->id);
      if (!vp.empty() && detail::disjoint(vp, ga.viewpoint)) off_viewpoint.insert(qa->id);
    }
    for (const auto& id : off_viewpoint) {
      const auto& qa = model.get<QualityAspect>(id);
      if (qa.parent && off_viewpoint.count(*qa.parent) != 0) continue;
      claim(K::QualityAspect, id,
            "aspect " + label(id) + " has viewpoints " + detail::names_text(model.effective_viewpoints(id)) +
                ", none in the goal (" + detail::names_text(ga.viewpoint) + ")");
    }
  }
  flush(4);

  // TR5 evaluations of such aspects that survived TR4.
  for (const auto* qae : model.all<QualityAspectEvaluation>()) {
    if (off_viewpoint.count(qae->qualityAspect) == 0) continue;
    claim(K::QualityAspectEvaluation, qae->id, "evaluates aspect " + label(qae->qualityAspect) + " outside the goal viewpoints");
  }
  flush(5);

  // TR6 top-level aspects outside GA.focus.
  if (!ga.focus.empty()) {
    for (const auto* qa : detail::top_level_aspects(model, ga.focus)) {
      if (ga.focus.count(qa->name) != 0) continue;
      claim(K::QualityAspect, qa->id,
            "aspect " + label(qa->id) + " is not part of the goal focus (" + detail::names_text(ga.focus) + ")");
    }
  }
  flush(6);

  // TR7 stubs for focus qualities the reference model lacks.
  {
    std::optional<ElementId> umbrella;
    std::vector<const QualityAspect*> roots;
    for (const auto* qa : model.all<QualityAspect>()) {
      if (!qa->parent) roots.push_back(qa);
    }
    if (roots.size() == 1 && ga.focus.count(roots.front()->name) == 0) umbrella = roots.front()->id;
    for (const auto& name : ga.focus) {
      if (gr.focus.count(name) != 0) continue;
      bool present = false;
      for (const auto* qa : model.all<QualityAspect>()) present = present || same_name(qa->name, name);
      if (present) continue;
      nlohmann::json payload = {{"name", name}, {"stub", true}};
      if (umbrella && sim.contains(*umbrella)) payload["parent"] = umbrella->str();
      rule_actions.push_back({0, TailorAction::AddStub, K::QualityAspect, name,
                              "focus quality '" + name + "' is not covered by the reference model", payload});
    }
  }
  flush(7);

  // TR8 / TR9 factors and measures whose tags exclude the goal context.
  for (const auto* f : model.all<Factor>()) {
    if (f->tags.applicable_under(ga.context)) continue;
    claim(K::Factor, f->id, "factor " + label(f->id) + " is tagged " + detail::tags_text(f->tags) + ", outside the goal context");
  }
  flush(8);
  for (const auto* mm : model.all<Measure>()) {
    if (mm->tags.applicable_under(ga.context)) continue;
    claim(K::Measure, mm->id, "measure " + label(mm->id) + " is tagged " + detail::tags_text(mm->tags) + ", outside the goal context");
  }
  flush(9);

  // TR10 review items for context values the reference model never targeted.
  if (options.contextReview) {
    for (const auto& [dim, values] : ga.context.dimensions()) {
      for (const auto& value : values) {
        if (gr.context.contains(dim, value)) continue;
        std::string tag = dim + "=" + value;
        rule_actions.push_back({0, TailorAction::Flag, K::Factor, "context:" + tag,
                                "Add stubs for factors and measures for " + tag, nullptr});
      }
    }
  }
  flush(10);
  return report;
}

/// Executes a plan through the session, so every delete cascades and every
/// stub and flag becomes tasks. All or nothing.
inline TailoringReport apply_tailoring(Session& session, const TailoringReport& plan) {
  std::string current = model_hash(session.model());
  if (current != plan.modelHash) {
    throw StaleError("tailoring report was planned for model " + plan.modelHash + ", session model is " + current);
  }
  Session work = session;
  TailoringReport applied = plan;
  applied.seededTasks.clear();
  for (const auto& a : plan.actions) {
    const LogRecord* rec = nullptr;
    switch (a.action) {
      case TailorAction::Delete:
        if (!work.model().contains(ElementId(a.target))) continue;
        rec = &work.apply(Operation::del(a.kind, ElementId(a.target)));
        break;
      case TailorAction::AddStub:
        rec = &work.apply(Operation::add(a.kind, a.payload));
        break;
      case TailorAction::Flag:
        rec = &work.flag(a.target, a.reason + ".", false);
        break;
    }
    applied.seededTasks.insert(applied.seededTasks.end(), rec->spawnedTasks.begin(), rec->spawnedTasks.end());
  }
  session = std::move(work);
  return applied;
}

}  // namespace qmadapt
