#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "qmadapt/errors.hpp"
#include "qmadapt/goal.hpp"
#include "qmadapt/model.hpp"
#include "qmadapt/model_json.hpp"
#include "qmadapt/operation.hpp"
#include "qmadapt/rules.hpp"
#include "qmadapt/validate.hpp"

namespace qmadapt {

enum class TaskStatus { Open, Completed, Waived, Obsolete };

inline std::string_view task_status_name(TaskStatus s) {
  switch (s) {
    case TaskStatus::Open: return "open";
    case TaskStatus::Completed: return "completed";
    case TaskStatus::Waived: return "waived";
    case TaskStatus::Obsolete: return "obsolete";
  }
  return "?";
}

inline TaskStatus parse_task_status(std::string_view s) {
  if (s == "open") return TaskStatus::Open;
  if (s == "completed") return TaskStatus::Completed;
  if (s == "waived") return TaskStatus::Waived;
  if (s == "obsolete") return TaskStatus::Obsolete;
  throw InputError("unknown task status '" + std::string(s) + "'");
}

struct AdaptationTask {
  std::string id;
  std::string templateId;
  std::string target;
  bool elementTarget = true;  // false for pseudo-targets such as "context:Language=C"
  std::string text;
  TaskStatus status = TaskStatus::Open;
  std::uint64_t origin = 0;  // seq of the log record that opened the task
  std::vector<Operation> suggested;
  nlohmann::json resolution;  // null while open

  bool open() const { return status == TaskStatus::Open; }
};

inline nlohmann::json task_to_json(const AdaptationTask& t) {
  nlohmann::json j = {{"id", t.id},
                      {"templateId", t.templateId},
                      {"target", t.target},
                      {"targetKind", t.elementTarget ? "element" : "context"},
                      {"text", t.text},
                      {"status", task_status_name(t.status)},
                      {"origin", t.origin},
                      {"suggested", operations_to_json(t.suggested)}};
  if (!t.resolution.is_null()) j["resolution"] = t.resolution;
  return j;
}

inline AdaptationTask task_from_json(const nlohmann::json& j) {
  AdaptationTask t;
  t.id = j.at("id").get<std::string>();
  t.templateId = j.at("templateId").get<std::string>();
  t.target = j.at("target").get<std::string>();
  t.elementTarget = j.value("targetKind", "element") == "element";
  t.text = j.value("text", "");
  t.status = parse_task_status(j.at("status").get<std::string>());
  t.origin = j.value("origin", std::uint64_t{0});
  t.suggested = operations_from_json(j.value("suggested", nlohmann::json::array()));
  t.resolution = j.value("resolution", nlohmann::json());
  return t;
}

/// A consistency delete or engine step that happened without user input.
struct AutoConsequence {
  std::string templateId;
  ElementId target;
  ElementId trigger;

  friend bool operator==(const AutoConsequence&, const AutoConsequence&) = default;
};

/// One entry of the session log.
struct LogRecord {
  std::uint64_t seq = 0;
  std::string action;  // apply | complete | waive | flag
  std::optional<Operation> op;
  std::vector<Operation> ops;
  std::string taskId;
  std::string note;
  nlohmann::json flag;
  std::optional<ElementId> createdElement;
  std::vector<AutoConsequence> autoConsequences;
  std::vector<std::string> spawnedTasks;
  std::vector<std::string> completedTasks;
  std::vector<std::string> obsoletedTasks;
  std::string modelHashAfter;
};

inline nlohmann::json log_record_to_json(const LogRecord& r) {
  nlohmann::json j = {{"seq", r.seq}, {"action", r.action}};
  if (r.op) j["op"] = operation_to_json(*r.op);
  if (r.action == "complete") j["ops"] = operations_to_json(r.ops);
  if (!r.taskId.empty()) j["taskId"] = r.taskId;
  if (!r.note.empty()) j["note"] = r.note;
  if (!r.flag.is_null()) j["flag"] = r.flag;
  if (r.createdElement) j["createdElement"] = r.createdElement->str();
  auto autos = nlohmann::json::array();
  for (const auto& a : r.autoConsequences) {
    autos.push_back({{"templateId", a.templateId}, {"target", a.target.str()}, {"trigger", a.trigger.str()}});
  }
  j["autoConsequences"] = std::move(autos);
  j["spawnedTasks"] = r.spawnedTasks;
  j["completedTasks"] = r.completedTasks;
  j["obsoletedTasks"] = r.obsoletedTasks;
  j["modelHashAfter"] = r.modelHashAfter;
  return j;
}

inline LogRecord log_record_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw InputError("log record must be an object");
  LogRecord r;
  try {
    r.seq = j.at("seq").get<std::uint64_t>();
    r.action = j.at("action").get<std::string>();
    if (j.contains("op")) r.op = operation_from_json(j.at("op"));
    if (j.contains("ops")) r.ops = operations_from_json(j.at("ops"));
    r.taskId = j.value("taskId", "");
    r.note = j.value("note", "");
    r.flag = j.value("flag", nlohmann::json());
    if (j.contains("createdElement")) r.createdElement = j.at("createdElement").get<ElementId>();
    for (const auto& a : j.value("autoConsequences", nlohmann::json::array())) {
      r.autoConsequences.push_back({a.at("templateId").get<std::string>(), a.at("target").get<ElementId>(),
                                    a.at("trigger").get<ElementId>()});
    }
    r.spawnedTasks = j.value("spawnedTasks", std::vector<std::string>{});
    r.completedTasks = j.value("completedTasks", std::vector<std::string>{});
    r.obsoletedTasks = j.value("obsoletedTasks", std::vector<std::string>{});
    r.modelHashAfter = j.at("modelHashAfter").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("malformed log record: ") + e.what());
  }
  if (r.action == "apply" && !r.op) throw InputError("apply record without op");
  return r;
}

/// An adaptation session: the model under change, the goal it is adapted to,
/// the task list and the log. Every action is atomic; a failing action
/// leaves the session untouched.
class Session {
 public:
  Session(QualityModel initial, AdaptationGoal goal)
      : initial_(initial), model_(std::move(initial)), goal_(std::move(goal)) {}

  const QualityModel& initial_model() const noexcept { return initial_; }
  const QualityModel& model() const noexcept { return model_; }
  const AdaptationGoal& goal() const noexcept { return goal_; }
  const std::vector<AdaptationTask>& tasks() const noexcept { return tasks_; }
  const std::vector<LogRecord>& log() const noexcept { return log_; }
  std::uint64_t revision() const noexcept { return log_.size(); }

  const AdaptationTask& task(const std::string& id) const {
    for (const auto& t : tasks_) {
      if (t.id == id) return t;
    }
    throw NotFoundError("no task '" + id + "'");
  }

  std::vector<const AdaptationTask*> open_tasks() const {
    std::vector<const AdaptationTask*> out;
    for (const auto& t : tasks_) {
      if (t.open()) out.push_back(&t);
    }
    return out;
  }

  const LogRecord& apply(const Operation& op) {
    Work w = start("apply");
    w.rec.op = op;
    run_op(w, op, {});
    return commit(std::move(w));
  }

  const LogRecord& complete(const std::string& task_id, const std::vector<Operation>& ops) {
    Work w = start("complete");
    w.rec.taskId = task_id;
    w.rec.ops = ops;
    require_open(w, task_id);
    for (const auto& op : ops) run_op(w, op, task_id);
    AdaptationTask& t = task_in(w, task_id);
    if (!obligation_met(w, t)) {
      throw TaskStateError("task '" + task_id + "' is not fulfilled by the given operations");
    }
    t.status = TaskStatus::Completed;
    t.resolution = {{"ops", operations_to_json(ops)}};
    w.rec.completedTasks.push_back(task_id);
    if (t.elementTarget) w.closed.insert(t.target);
    return commit(std::move(w));
  }

  const LogRecord& waive(const std::string& task_id, const std::string& note) {
    if (trim(note).empty()) throw InputError("waiving a task needs a non-empty note");
    Work w = start("waive");
    w.rec.taskId = task_id;
    w.rec.note = note;
    require_open(w, task_id);
    AdaptationTask& t = task_in(w, task_id);
    t.status = TaskStatus::Waived;
    t.resolution = {{"note", note}};
    if (t.elementTarget) w.closed.insert(t.target);
    return commit(std::move(w));
  }

  /// Opens a review task that no rule raised. `target` is an element id or,
  /// with `element_target` false, a free-form pseudo-target.
  const LogRecord& flag(const std::string& target, const std::string& text, bool element_target = true) {
    if (trim(text).empty()) throw InputError("a review flag needs a text");
    if (element_target && !model_.contains(ElementId(target))) throw NotFoundError("no element '" + target + "'");
    Work w = start("flag");
    w.rec.flag = {{"target", target}, {"text", text}, {"targetKind", element_target ? "element" : "context"}};
    open_task(w, "review.flag", target, element_target, text, {});
    return commit(std::move(w));
  }

  /// Re-executes a logged action and checks that it has the logged effect.
  const LogRecord& redo(const LogRecord& rec) {
    std::uint64_t step = log_.size() + 1;
    if (rec.seq != step) throw ReplayError(step, "expected seq " + std::to_string(step));
    const LogRecord* got = nullptr;
    try {
      if (rec.action == "apply") {
        if (!rec.op) throw InputError("apply record without op");
        got = &apply(*rec.op);
      } else if (rec.action == "complete") {
        got = &complete(rec.taskId, rec.ops);
      } else if (rec.action == "waive") {
        got = &waive(rec.taskId, rec.note);
      } else if (rec.action == "flag") {
        got = &flag(rec.flag.value("target", ""), rec.flag.value("text", ""),
                    rec.flag.value("targetKind", "element") == "element");
      } else {
        throw InputError("unknown action '" + rec.action + "'");
      }
    } catch (const ReplayError&) {
      throw;
    } catch (const std::exception& e) {
      throw ReplayError(step, std::string("step ") + std::to_string(step) + " failed: " + e.what());
    }
    auto differs = [&](const char* what) {
      throw ReplayError(step, std::string("step ") + std::to_string(step) + ": " + what + " differs from the log");
    };
    if (got->autoConsequences != rec.autoConsequences) differs("autoConsequences");
    if (got->spawnedTasks != rec.spawnedTasks) differs("spawnedTasks");
    if (got->completedTasks != rec.completedTasks) differs("completedTasks");
    if (got->obsoletedTasks != rec.obsoletedTasks) differs("obsoletedTasks");
    if (got->createdElement != rec.createdElement) differs("createdElement");
    if (got->modelHashAfter != rec.modelHashAfter) differs("modelHashAfter");
    return *got;
  }

 private:
  struct Work {
    QualityModel model;
    std::vector<AdaptationTask> tasks;
    std::uint64_t next_task = 1;
    LogRecord rec;
    std::set<std::string> closed;  // targets of tasks closed in this action
  };

  Work start(std::string action) const {
    Work w{model_, tasks_, next_task_, {}, {}};
    w.rec.seq = log_.size() + 1;
    w.rec.action = std::move(action);
    return w;
  }

  const LogRecord& commit(Work&& w) {
    unstub(w);
    reconcile(w);
    w.rec.modelHashAfter = model_hash(w.model);
    model_ = std::move(w.model);
    tasks_ = std::move(w.tasks);
    next_task_ = w.next_task;
    log_.push_back(std::move(w.rec));
    return log_.back();
  }

  static AdaptationTask& task_in(Work& w, const std::string& id) {
    for (auto& t : w.tasks) {
      if (t.id == id) return t;
    }
    throw NotFoundError("no task '" + id + "'");
  }

  static void require_open(Work& w, const std::string& id) {
    const AdaptationTask& t = task_in(w, id);
    if (!t.open()) {
      throw TaskStateError("task '" + id + "' is " + std::string(task_status_name(t.status)) + ", not open");
    }
  }

  bool obligation_met(const Work& w, const AdaptationTask& t) const {
    if (!t.elementTarget || !w.model.contains(ElementId(t.target))) return true;
    if (t.templateId.rfind(kCheckPrefix, 0) == 0) {
      std::string rule = t.templateId.substr(kCheckPrefix.size());
      for (const auto& v : validate(w.model, goal_.purpose)) {
        if (v.rule == rule && v.target.str() == t.target) return false;
      }
      return true;
    }
    const TaskTemplate* tmpl = find_template(t.templateId);
    if (tmpl == nullptr || !tmpl->mandatory || tmpl->satisfied == nullptr) return true;
    return tmpl->satisfied(w.model, goal_, ElementId(t.target));
  }

  void open_task(Work& w, const std::string& templ, const std::string& target, bool element_target,
                 const std::string& text, std::vector<Operation> suggested) {
    AdaptationTask t;
    t.id = "T" + std::to_string(w.next_task++);
    t.templateId = templ;
    t.target = target;
    t.elementTarget = element_target;
    t.text = text;
    t.origin = w.rec.seq;
    t.suggested = std::move(suggested);
    w.rec.spawnedTasks.push_back(t.id);
    w.tasks.push_back(std::move(t));
  }

  // Fields that differ between two states, on elements present in both.
  static std::vector<std::pair<ElementId, std::string>> changed_fields(const QualityModel& before,
                                                                       const QualityModel& after) {
    std::vector<std::pair<ElementId, std::string>> out;
    for (const auto& [id, e] : after.elements()) {
      auto it = before.elements().find(id);
      if (it == before.elements().end() || it->second == e) continue;
      for (const auto& f : fields_of(kind_of(e))) {
        if (f.get(it->second) != f.get(e)) out.emplace_back(id, std::string(f.name));
      }
    }
    return out;
  }

  void cascade(Work& w, const ElementId& x, std::set<ElementId>& visited, std::vector<Consequence>& pending) {
    if (!w.model.contains(x) || !visited.insert(x).second) return;
    for (const auto& c : consistency_for_delete(w.model, x)) {
      if (!w.model.contains(c.target) || visited.count(c.target) != 0) continue;
      w.rec.autoConsequences.push_back({c.templateId, c.target, x});
      cascade(w, c.target, visited, pending);
    }
    Element gone = w.model.at(x);
    auto adapt = adaptation_for_delete(w.model, goal_, gone);
    pending.insert(pending.end(), adapt.begin(), adapt.end());
    w.model.detach(x);
    w.model.remove(x);
  }

  void run_op(Work& w, const Operation& op, const std::string& exclude) {
    std::vector<Consequence> pending;
    QualityModel before = w.model;
    std::vector<std::pair<ElementId, std::string>> changes;
    if (op.type == OpType::ADD) {
      ElementId id = w.model.insert(op.kind, op.payload);
      if (w.rec.action == "apply") w.rec.createdElement = id;
      pending = adaptation_for_add(w.model, goal_, id);
      changes = changed_fields(before, w.model);
    } else {
      auto kind = w.model.kind_of(op.target);
      if (!kind) throw NotFoundError("no element '" + op.target.str() + "'");
      if (*kind != op.kind) {
        throw KindError("'" + op.target.str() + "' is a " + std::string(kind_name(*kind)) + ", not a " +
                        std::string(kind_name(op.kind)));
      }
      if (op.type == OpType::MOD) {
        if (!op.change) throw InputError("MOD of '" + op.target.str() + "' needs a set, add or remove value");
        w.model.update(op.target, op.field, *op.change);
        changes = changed_fields(before, w.model);
        auto own = std::find(changes.begin(), changes.end(), std::make_pair(op.target, op.field));
        if (own != changes.end()) std::rotate(changes.begin(), own, own + 1);
      } else {
        std::set<ElementId> visited;
        cascade(w, op.target, visited, pending);
        changes = changed_fields(before, w.model);
      }
    }
    for (const auto& [id, field] : changes) {
      auto more = adaptation_for_mod(w.model, goal_, id, field);
      pending.insert(pending.end(), more.begin(), more.end());
    }
    spawn(w, pending);
    obsolete(w, exclude);
    auto_complete(w, exclude);
  }

  void spawn(Work& w, const std::vector<Consequence>& pending) {
    for (const auto& c : pending) {
      if (!w.model.contains(c.target)) continue;
      const TaskTemplate* tmpl = find_template(c.templateId);
      if (tmpl->satisfied != nullptr && tmpl->satisfied(w.model, goal_, c.target)) continue;
      auto same = std::find_if(w.tasks.begin(), w.tasks.end(), [&](const AdaptationTask& t) {
        return t.open() && t.templateId == c.templateId && t.target == c.target.str();
      });
      if (same != w.tasks.end()) {
        same->text = c.text;
        same->suggested = c.suggested;
        continue;
      }
      open_task(w, c.templateId, c.target.str(), true, c.text, c.suggested);
    }
  }

  void obsolete(Work& w, const std::string& exclude) {
    for (auto& t : w.tasks) {
      if (!t.open() || !t.elementTarget || t.id == exclude || w.model.contains(ElementId(t.target))) continue;
      t.status = TaskStatus::Obsolete;
      t.resolution = {{"obsolete", "target deleted"}};
      w.rec.obsoletedTasks.push_back(t.id);
    }
  }

  void auto_complete(Work& w, const std::string& exclude) {
    for (auto& t : w.tasks) {
      if (!t.open() || !t.elementTarget || t.id == exclude) continue;
      const TaskTemplate* tmpl = find_template(t.templateId);
      if (tmpl == nullptr || tmpl->satisfied == nullptr) continue;
      if (!tmpl->satisfied(w.model, goal_, ElementId(t.target))) continue;
      t.status = TaskStatus::Completed;
      t.resolution = {{"auto", true}};
      w.rec.completedTasks.push_back(t.id);
      w.closed.insert(t.target);
    }
  }

  // A stub whose last task closed becomes a regular element, provided it
  // meets the requirements of one.
  void unstub(Work& w) {
    for (const auto& target : w.closed) {
      ElementId id(target);
      if (!w.model.contains(id) || !is_stub(w.model.at(id))) continue;
      bool busy = std::any_of(w.tasks.begin(), w.tasks.end(),
                              [&](const AdaptationTask& t) { return t.open() && t.target == target; });
      if (busy) continue;
      try {
        w.model.update(id, "stub", FieldChange::set(false));
      } catch (const IntegrityError&) {
        continue;
      }
      w.rec.autoConsequences.push_back({"engine.unstub", id, id});
    }
  }

  // Keeps one open task per element with an operational violation, and
  // closes such tasks once the violation is gone.
  void reconcile(Work& w) {
    std::set<std::pair<std::string, std::string>> live;
    std::vector<Violation> operational;
    for (auto& v : validate(w.model, goal_.purpose)) {
      if (v.severity != Severity::Operational) continue;
      live.emplace(v.rule, v.target.str());
      operational.push_back(std::move(v));
    }
    std::set<std::string> covered;
    for (auto& t : w.tasks) {
      if (t.open() && t.templateId.rfind(kCheckPrefix, 0) == 0 &&
          live.count({t.templateId.substr(kCheckPrefix.size()), t.target}) == 0) {
        t.status = TaskStatus::Completed;
        t.resolution = {{"auto", true}};
        w.rec.completedTasks.push_back(t.id);
        continue;
      }
      if (t.elementTarget && (t.open() || t.status == TaskStatus::Waived)) covered.insert(t.target);
    }
    for (const auto& v : operational) {
      if (!covered.insert(v.target.str()).second) continue;
      open_task(w, std::string(kCheckPrefix) + v.rule, v.target.str(), true,
                "Resolve " + v.rule + " on " + rules::label(w.model, v.target) + ": " + v.message + ".", {});
    }
  }

  QualityModel initial_;
  QualityModel model_;
  AdaptationGoal goal_;
  std::vector<AdaptationTask> tasks_;
  std::vector<LogRecord> log_;
  std::uint64_t next_task_ = 1;
};

inline const LogRecord& apply_operation(Session& s, const Operation& op) { return s.apply(op); }

inline const LogRecord& complete_task(Session& s, const std::string& task_id, const std::vector<Operation>& ops) {
  return s.complete(task_id, ops);
}

inline const LogRecord& waive_task(Session& s, const std::string& task_id, const std::string& note) {
  return s.waive(task_id, note);
}

inline std::vector<const AdaptationTask*> open_tasks(const Session& s) { return s.open_tasks(); }

/// Rebuilds a session from its initial state and log. Throws ReplayError
/// naming the first step whose effect differs from the record.
inline Session replay(const QualityModel& initial, const AdaptationGoal& goal, const std::vector<LogRecord>& log) {
  Session s(initial, goal);
  for (const auto& rec : log) s.redo(rec);
  return s;
}

/// Consequences of applying `op` to `model`: the direct consistency deletes
/// and the adaptation tasks of the operation's own rule cell. For deletes,
/// adaptation entries whose condition no longer holds after the cascade are
/// dropped. The model is not changed.
inline std::vector<Consequence> consequences_of(const QualityModel& model, const AdaptationGoal& goal,
                                                const Operation& op) {
  QualityModel work = model;
  if (op.type == OpType::ADD) {
    ElementId id = work.insert(op.kind, op.payload);
    return adaptation_for_add(work, goal, id);
  }
  auto kind = model.kind_of(op.target);
  if (!kind) throw NotFoundError("no element '" + op.target.str() + "'");
  if (*kind != op.kind) throw KindError("'" + op.target.str() + "' is a " + std::string(kind_name(*kind)));
  if (op.type == OpType::MOD) {
    if (op.change) work.update(op.target, op.field, *op.change);
    return adaptation_for_mod(work, goal, op.target, op.field);
  }
  std::vector<Consequence> out = consistency_for_delete(model, op.target);
  std::vector<Consequence> adapt = adaptation_for_delete(model, goal, model.at(op.target));
  // Simulate the cascade to judge the conditions on the final state.
  Session probe(model, goal);
  probe.apply(op);
  for (auto& c : adapt) {
    if (!probe.model().contains(c.target)) continue;
    const TaskTemplate* tmpl = find_template(c.templateId);
    if (tmpl->satisfied != nullptr && tmpl->satisfied(probe.model(), goal, c.target)) continue;
    out.push_back(std::move(c));
  }
  return out;
}

}  // namespace qmadapt
