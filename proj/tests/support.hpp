#pragma once

#include <algorithm>
#include <filesystem>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "qmadapt/qmadapt.hpp"

namespace qmtest {

using namespace qmadapt;
using json = nlohmann::json;
using K = ElementKind;

inline std::filesystem::path fixture(const std::string& name) { return std::filesystem::path(QM_FIXTURES) / name; }

inline QualityModel fixture_model(const std::string& name) { return load_model(fixture(name)); }
inline AdaptationGoal fixture_goal(const std::string& name) { return load_goal(fixture(name)); }

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static std::mt19937_64 rng{std::random_device{}()};
    path_ = std::filesystem::temp_directory_path() / ("qmadapt-" + tag + "-" + std::to_string(rng()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& s) const { return path_ / s; }

 private:
  std::filesystem::path path_;
};

inline std::vector<std::string> open_task_texts(const Session& s) {
  std::vector<std::string> out;
  for (const auto* t : s.open_tasks()) out.push_back(t->text);
  return out;
}

inline std::vector<std::string> open_task_ids(const Session& s) {
  std::vector<std::string> out;
  for (const auto* t : s.open_tasks()) out.push_back(t->id);
  return out;
}

/// Random models and operations over all nine element kinds.
class Generator {
 public:
  explicit Generator(std::uint64_t seed) : rng_(seed) {}

  std::mt19937_64& rng() { return rng_; }

  std::size_t below(std::size_t n) { return n == 0 ? 0 : std::uniform_int_distribution<std::size_t>(0, n - 1)(rng_); }
  bool chance(double p) { return std::bernoulli_distribution(p)(rng_); }

  template <typename T>
  const T& pick(const std::vector<T>& xs) {
    return xs[below(xs.size())];
  }

  std::vector<ElementId> ids(const QualityModel& m, K kind) const {
    std::vector<ElementId> out;
    for (const auto& [id, e] : m.elements()) {
      if (kind_of(e) == kind) out.push_back(id);
    }
    return out;
  }

  json some_ids(const QualityModel& m, K kind, std::size_t max) {
    auto all = ids(m, kind);
    std::shuffle(all.begin(), all.end(), rng_);
    all.resize(std::min(all.size(), below(max + 1)));
    json arr = json::array();
    for (const auto& id : all) arr.push_back(id.str());
    return arr;
  }

  json tags() {
    static const std::vector<std::pair<std::string, std::vector<std::string>>> dims = {
        {"Domain", {"Embedded", "Web", "Automotive"}},
        {"Language", {"C", "C++", "Assembler", "Java"}},
        {"Paradigm", {"OO", "Functional"}}};
    json t = json::object();
    for (const auto& [dim, values] : dims) {
      if (!chance(0.35)) continue;
      json vs = json::array();
      for (const auto& v : values) {
        if (chance(0.4)) vs.push_back(v);
      }
      if (vs.empty()) vs.push_back(pick(values));
      t[dim] = vs;
    }
    return t;
  }

  json viewpoints() {
    static const std::vector<std::string> all = {"Developer", "User", "Tester", "Manager"};
    json vs = json::array();
    for (const auto& v : all) {
      if (chance(0.3)) vs.push_back(v);
    }
    return vs;
  }

  std::string name(K kind) {
    static const std::vector<std::string> words = {"Reliability", "Safety", "Usability", "Documentation",
                                                   "Source code", "Class", "Method", "Comment density",
                                                   "Complexity", "Coupling", "Test coverage", "Readability"};
    return chance(0.5) ? pick(words) : std::string(kind_name(kind)) + " " + std::to_string(counter_++);
  }

  std::string text() { return chance(0.85) ? "text " + std::to_string(counter_++) : ""; }

  /// A payload for an ADD of `kind` against the current content of `m`.
  /// It is plausible, not guaranteed valid; callers treat rejection as normal.
  json payload(const QualityModel& m, K kind) {
    json p = json::object();
    auto one = [&](K target) -> json {
      auto xs = ids(m, target);
      if (xs.empty()) return nullptr;
      return pick(xs).str();
    };
    auto set_if = [&](const char* key, const json& v) {
      if (!v.is_null()) p[key] = v;
    };
    bool stub = chance(0.1);
    switch (kind) {
      case K::QualityAspect:
        p["name"] = name(kind);
        p["description"] = text();
        if (chance(0.6)) set_if("parent", one(K::QualityAspect));
        if (chance(0.4)) p["viewpoints"] = viewpoints();
        break;
      case K::EntityType:
        p["name"] = name(kind);
        p["description"] = text();
        if (chance(0.5)) set_if("parent", one(K::EntityType));
        break;
      case K::Property:
        p["name"] = name(kind);
        p["description"] = text();
        break;
      case K::Factor:
        p["name"] = name(kind);
        p["description"] = text();
        if (!stub || chance(0.5)) {
          set_if("entityType", one(K::EntityType));
          set_if("property", one(K::Property));
        }
        if (chance(0.3)) p["tags"] = tags();
        break;
      case K::Impact:
        set_if("factor", one(K::Factor));
        set_if("qualityAspect", one(K::QualityAspect));
        p["justification"] = chance(0.9) ? json("because " + std::to_string(counter_++)) : json("");
        p["effect"] = chance(0.7) ? "positive" : "negative";
        if (chance(0.2)) set_if("requirement", one(K::QualityRequirement));
        break;
      case K::QualityRequirement:
        p["name"] = name(kind);
        p["description"] = text();
        break;
      case K::Measure:
        p["name"] = name(kind);
        p["measurementRule"] = text();
        p["scale"] = chance(0.5) ? "ratio" : "ordinal";
        if (!stub) p["quantifies"] = some_ids(m, K::Factor, 2);
        if (chance(0.3)) p["tags"] = tags();
        break;
      case K::ImpactEvaluation: {
        std::vector<ElementId> free;
        for (const auto* i : m.all<Impact>()) {
          if (!i->evaluatedBy) free.push_back(i->id);
        }
        if (!free.empty()) p["impact"] = pick(free).str();
        p["uses"] = some_ids(m, K::Measure, 2);
        p["evaluationRule"] = text();
        break;
      }
      case K::QualityAspectEvaluation: {
        std::vector<const QualityAspect*> free;
        for (const auto* qa : m.all<QualityAspect>()) {
          if (!qa->evaluatedBy) free.push_back(qa);
        }
        if (!free.empty()) {
          const QualityAspect* qa = pick(free);
          p["qualityAspect"] = qa->id.str();
          json considers = json::array();
          for (const auto& i : qa->influencedBy) {
            const auto& imp = m.get<Impact>(i);
            if (imp.evaluatedBy && chance(0.9)) considers.push_back(imp.evaluatedBy->str());
          }
          for (const auto& c : qa->refinedBy) {
            const auto& child = m.get<QualityAspect>(c);
            if (child.evaluatedBy && chance(0.9)) considers.push_back(child.evaluatedBy->str());
          }
          p["considers"] = considers;
        }
        p["aggregationRule"] = text();
        break;
      }
    }
    if (stub && (kind == K::QualityAspect || kind == K::EntityType || kind == K::Factor || kind == K::Measure)) {
      p["stub"] = true;
    }
    return p;
  }

  K any_kind() { return kAllKinds[below(kAllKinds.size())]; }

  /// A model with up to `max_elements` elements of every kind.
  QualityModel model(std::size_t max_elements = 200) {
    QualityModel m = QualityModel::create("random model");
    std::size_t target = 9 + below(max_elements - 8);
    // Kinds in an order that lets later kinds find referents.
    static const std::vector<K> order = {K::QualityAspect, K::EntityType, K::Property, K::Factor,
                                         K::QualityRequirement, K::Impact, K::Measure, K::ImpactEvaluation,
                                         K::QualityAspectEvaluation};
    for (K k : order) try_insert(m, k);
    for (std::size_t attempts = 0; m.size() < target && attempts < target * 4; ++attempts) {
      std::size_t r = below(100);
      K k = r < 15   ? K::QualityAspect
            : r < 25 ? K::EntityType
            : r < 32 ? K::Property
            : r < 50 ? K::Factor
            : r < 65 ? K::Impact
            : r < 68 ? K::QualityRequirement
            : r < 82 ? K::Measure
            : r < 93 ? K::ImpactEvaluation
                     : K::QualityAspectEvaluation;
      try_insert(m, k);
    }
    return m;
  }

  bool try_insert(QualityModel& m, K kind) {
    try {
      m.insert(kind, payload(m, kind));
      return true;
    } catch (const Error&) {
      return false;
    }
  }

  json field_value(const QualityModel& m, const FieldDesc& f) {
    switch (f.type) {
      case FieldType::Text: return text();
      case FieldType::Bool: return chance(0.5);
      case FieldType::Names: return viewpoints();
      case FieldType::Tags: return tags();
      case FieldType::Effect: return chance(0.5) ? "positive" : "negative";
      case FieldType::Ref: {
        K target = f.targets.empty() ? K::QualityAspect : pick(f.targets);
        if (f.single()) {
          auto xs = ids(m, target);
          if (xs.empty() || chance(0.1)) return nullptr;
          return pick(xs).str();
        }
        return some_ids(m, target, 3);
      }
    }
    return nullptr;
  }

  /// A random operation against `m`; may be invalid.
  Operation operation(const QualityModel& m) {
    std::size_t r = below(100);
    if (m.empty() || r < 35) {
      K k = any_kind();
      return Operation::add(k, payload(m, k));
    }
    auto it = m.elements().begin();
    std::advance(it, static_cast<long>(below(m.size())));
    K kind = kind_of(it->second);
    if (r < 65) return Operation::del(kind, it->first);
    std::vector<const FieldDesc*> writable;
    for (const auto& f : fields_of(kind)) {
      if (f.writable) writable.push_back(&f);
    }
    const FieldDesc& f = *pick(writable);
    json v = field_value(m, f);
    if (f.is_ref() && !f.single() && chance(0.4)) {
      return Operation::mod(kind, it->first, std::string(f.name),
                            chance(0.5) ? FieldChange::add(v) : FieldChange::remove(v));
    }
    return Operation::mod(kind, it->first, std::string(f.name), FieldChange::set(v));
  }

  AdaptationGoal goal(Purpose purpose) {
    static const std::vector<std::string> objects = {"Source code", "Class", "Method", "Requirements specification"};
    static const std::vector<std::string> qualities = {"Reliability", "Safety", "Usability", "Maintainability",
                                                       "Documentation"};
    AdaptationGoal g;
    g.purpose = purpose;
    g.object.insert(pick(objects));
    if (chance(0.5)) g.object.insert(pick(objects));
    for (const auto& v : viewpoints()) g.viewpoint.insert(v.get<std::string>());
    if (g.viewpoint.empty()) g.viewpoint.insert("User");
    g.focus.insert(pick(qualities));
    if (chance(0.6)) g.focus.insert(pick(qualities));
    json t = tags();
    if (t.empty()) t = {{"Domain", {"Embedded"}}};
    g.context = t.get<ContextTags>();
    return g;
  }

 private:
  std::mt19937_64 rng_;
  std::uint64_t counter_ = 0;
};

/// Rule ids of violations concerning graph integrity.
inline std::vector<Violation> integrity_violations(const QualityModel& m) {
  std::vector<Violation> out;
  for (auto& v : validate(m, Purpose::Evaluation)) {
    if (v.rule == "V1" || v.rule == "V2" || v.rule == "V6") out.push_back(std::move(v));
  }
  return out;
}

inline bool has_duplicate_open_tasks(const Session& s) {
  std::set<std::pair<std::string, std::string>> seen;
  for (const auto* t : s.open_tasks()) {
    if (!seen.insert({t->templateId, t->target}).second) return true;
  }
  return false;
}

/// Operational violations with no open or waived task on their element.
inline std::vector<Violation> orphan_violations(const Session& s) {
  std::set<std::string> covered;
  for (const auto& t : s.tasks()) {
    if (t.status == TaskStatus::Open || t.status == TaskStatus::Waived) covered.insert(t.target);
  }
  std::vector<Violation> out;
  for (auto& v : validate(s.model(), s.goal().purpose)) {
    if (v.severity == Severity::Operational && covered.count(v.target.str()) == 0) out.push_back(std::move(v));
  }
  return out;
}

/// Resolves a random open task: complete it with its suggested operations when
/// they apply, otherwise waive it. Returns false when nothing was open.
inline bool resolve_some_task(Session& s, Generator& gen) {
  auto open = s.open_tasks();
  if (open.empty()) return false;
  std::string id = open[gen.below(open.size())]->id;
  const AdaptationTask& t = s.task(id);
  if (gen.chance(0.5)) {
    std::vector<Operation> ops;
    for (const auto& op : t.suggested) {
      if (op.type == OpType::DEL) ops.push_back(op);
    }
    try {
      s.complete(id, ops);
      return true;
    } catch (const Error&) {
    }
  }
  s.waive(id, "not relevant here");
  return true;
}

}  // namespace qmtest

namespace qmtest {

// The documentation example: a stub measure M1 for factor F1 and the
// operations that resolve each task it raises.
inline Operation doc_add_m1() {
  return Operation::add(K::Measure, {{"id", "M1"}, {"stub", true}, {"quantifies", {"F1"}}});
}
inline std::vector<Operation> doc_ops_a() {
  return {Operation::mod(K::Measure, ElementId("M1"), "name", FieldChange::set("Comment density")),
          Operation::mod(K::Measure, ElementId("M1"), "measurementRule",
                         FieldChange::set("Comment lines divided by all lines of a file."))};
}
inline std::vector<Operation> doc_ops_uses(const char* ie) {
  return {Operation::mod(K::ImpactEvaluation, ElementId(ie), "uses", FieldChange::add(json::array({"M1"})))};
}
inline std::vector<Operation> doc_ops_rule(const char* ie, const char* rule) {
  return {Operation::mod(K::ImpactEvaluation, ElementId(ie), "evaluationRule", FieldChange::set(rule))};
}

inline AdaptationGoal evaluation_goal() {
  AdaptationGoal g;
  g.object = {"Source code"};
  g.purpose = Purpose::Evaluation;
  g.viewpoint = {"User"};
  g.focus = {"Reliability", "Safety"};
  return g;
}

/// (templateId, target) of the open tasks, in task order.
inline std::vector<std::pair<std::string, std::string>> open_signature(const Session& s) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto* t : s.open_tasks()) out.emplace_back(t->templateId, t->target);
  return out;
}

}  // namespace qmtest
