#pragma once

#include <csignal>
#include <cstdlib>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "qmadapt/qmadapt.hpp"
#include "qmadapt/service.hpp"

namespace qmadapt::cli {

enum Exit : int { kOk = 0, kNegative = 1, kUsage = 2 };

namespace detail {

// Input that could not be read or understood at all.
inline bool is_load_failure(const Error& e) {
  const std::string& c = e.code();
  return c == "io" || c == "parse" || c == "schema" || c == "input";
}

inline std::string fixed(const Rational& r, int digits = 4) {
  std::ostringstream ss;
  ss << std::fixed << std::setprecision(digits) << r.to_double();
  return ss.str();
}

inline FitnessWeights weights_from_flag(const std::string& text) {
  nlohmann::json doc = nlohmann::json::object();
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    auto eq = item.find('=');
    if (eq == std::string::npos) throw InputError("--weights expects name=value pairs, got '" + item + "'");
    doc[trim(item.substr(0, eq))] = trim(item.substr(eq + 1));
  }
  return parse_weights(doc);
}

inline std::vector<Operation> ops_from_file(const fs::path& path) {
  nlohmann::json doc = load_json(path);
  if (doc.is_object() && doc.contains("ops")) doc = doc.at("ops");
  return operations_from_json(doc);
}

inline void print_tasks(std::ostream& out, const Session& s, bool all) {
  std::size_t shown = 0;
  for (const auto& t : s.tasks()) {
    if (!all && !t.open()) continue;
    ++shown;
    out << t.id << "  [" << task_status_name(t.status) << "]  " << t.templateId << "  " << t.target << "\n    "
        << t.text << "\n";
  }
  if (shown == 0) out << (all ? "no tasks\n" : "no open tasks\n");
}

inline void print_report(std::ostream& out, const TailoringReport& r) {
  for (const auto& a : r.actions) {
    out << a.rule_id() << "  " << tailor_action_name(a.action) << "  " << kind_name(a.kind) << "  " << a.target
        << "\n    " << a.reason << "\n";
  }
  auto c = r.counts();
  out << "actions:";
  for (int i = 0; i < kTailoringRules; ++i) {
    if (c[static_cast<std::size_t>(i)] > 0) out << " TR" << i + 1 << "=" << c[static_cast<std::size_t>(i)];
  }
  out << (r.actions.empty() ? " none\n" : "\n");
}

inline std::string changes_text(const LogRecord& rec) {
  std::string out;
  auto list = [&](const char* label, const std::vector<std::string>& ids) {
    if (ids.empty()) return;
    out += std::string(label) + ":";
    for (const auto& id : ids) out += " " + id;
    out += "\n";
  };
  if (rec.action == "waive") out += "waived: " + rec.taskId + "\n";
  list("completed", rec.completedTasks);
  list("opened", rec.spawnedTasks);
  list("obsolete", rec.obsoletedTasks);
  return out;
}

}  // namespace detail

inline Service* g_service = nullptr;

inline void stop_service(int) {
  if (g_service != nullptr) g_service->stop();
}

/// Runs one command line. Output goes to `out`, diagnostics to `err`.
inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Adapt software quality models to an adaptation goal", "qm-adapt"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "qm-adapt 1.0.0");

  // validate
  std::string v_model, v_purpose = "evaluation";
  bool v_json = false;
  auto* validate_cmd = app.add_subcommand("validate", "Check a quality model against the consistency rules");
  validate_cmd->add_option("model", v_model, "Model file (.qm.json)")->required();
  validate_cmd->add_option("--purpose", v_purpose, "specification or evaluation")
      ->check(CLI::IsMember({"specification", "evaluation"}));
  validate_cmd->add_flag("--json", v_json, "Machine-readable output");

  // rank
  std::string r_goal, r_pool, r_weights;
  bool r_json = false;
  auto* rank_cmd = app.add_subcommand("rank", "Rank the reference models of a pool against a goal");
  rank_cmd->add_option("goal", r_goal, "Goal file (.goal.json)")->required();
  rank_cmd->add_option("pool", r_pool, "Pool directory (default: $QM_ADAPT_POOL)");
  rank_cmd->add_option("--weights", r_weights, "Weights, e.g. object=1,focus=2");
  rank_cmd->add_flag("--json", r_json, "Machine-readable output");

  // tailor
  std::string t_model, t_goal, t_out;
  bool t_dry = false, t_no_tr10 = false, t_json = false;
  auto* tailor_cmd = app.add_subcommand("tailor", "Tailor a reference model to a goal");
  tailor_cmd->add_option("model", t_model, "Reference model with an embedded goal")->required();
  tailor_cmd->add_option("goal", t_goal, "Target goal file")->required();
  auto* out_opt = tailor_cmd->add_option("--out", t_out, "Session directory to create");
  auto* dry_opt = tailor_cmd->add_flag("--dry-run", t_dry, "Print the plan without applying it");
  tailor_cmd->add_flag("--no-tr10", t_no_tr10, "Skip context review flags");
  tailor_cmd->add_flag("--json", t_json, "Machine-readable output");
  out_opt->excludes(dry_opt);

  // tasks
  std::string k_dir, k_task, k_ops, k_note;
  bool k_json = false, k_all = false;
  auto* tasks_cmd = app.add_subcommand("tasks", "List and resolve adaptation tasks of a session");
  tasks_cmd->add_option("session", k_dir, "Session directory")->required();
  tasks_cmd->add_flag("--json", k_json, "Machine-readable output");
  tasks_cmd->require_subcommand(0, 1);
  auto* list_cmd = tasks_cmd->add_subcommand("list", "List tasks (default)");
  list_cmd->add_flag("--all", k_all, "Include closed tasks");
  auto* complete_cmd = tasks_cmd->add_subcommand("complete", "Complete a task");
  complete_cmd->add_option("task", k_task, "Task id")->required();
  complete_cmd->add_option("--ops", k_ops, "JSON file with the operations that resolve the task");
  auto* waive_cmd = tasks_cmd->add_subcommand("waive", "Waive a task with a note");
  waive_cmd->add_option("task", k_task, "Task id")->required();
  waive_cmd->add_option("--note", k_note, "Why the task does not apply")->required();

  // audit
  std::string a_base, a_adapted, a_gold, a_minutes;
  bool a_json = false;
  auto* audit_cmd = app.add_subcommand("audit", "Score an adapted model against a gold delta");
  audit_cmd->add_option("--base", a_base, "Model before adaptation")->required();
  audit_cmd->add_option("--adapted", a_adapted, "Model after adaptation")->required();
  audit_cmd->add_option("--gold", a_gold, "Gold delta (.gold.json)")->required();
  audit_cmd->add_option("--minutes", a_minutes, "Time spent, for efficiency");
  audit_cmd->add_flag("--json", a_json, "Machine-readable output");

  // serve
  int s_port = 8080;
  std::string s_host = "127.0.0.1", s_pool, s_state = ".qm-adapt-sessions";
  auto* serve_cmd = app.add_subcommand("serve", "Serve the HTTP API");
  serve_cmd->add_option("--port", s_port, "TCP port")->check(CLI::Range(0, 65535));
  serve_cmd->add_option("--host", s_host, "Bind address");
  serve_cmd->add_option("--pool", s_pool, "Pool directory (default: $QM_ADAPT_POOL)");
  serve_cmd->add_option("--state", s_state, "Directory for session state");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    std::ostringstream o, x;
    int code = app.exit(e, o, x);
    out << o.str();
    err << x.str();
    return code == 0 ? kOk : kUsage;
  }

  auto env_pool = []() -> std::string {
    const char* p = std::getenv("QM_ADAPT_POOL");
    return p == nullptr ? "" : p;
  };

  try {
    if (*validate_cmd) {
      QualityModel m = model_from_json(load_json(v_model));
      auto violations = validate(m, parse_purpose(v_purpose));
      if (v_json) {
        auto arr = nlohmann::json::array();
        for (const auto& v : violations) arr.push_back(violation_to_json(v));
        out << canonical_dump({{"model", v_model},
                               {"purpose", v_purpose},
                               {"consistent", violations.empty()},
                               {"violations", std::move(arr)}});
      } else {
        for (const auto& v : violations) {
          out << v.rule << "  " << severity_name(v.severity) << "  " << v.target.str() << "  " << v.message << "\n";
        }
        out << v_model << ": " << violations.size() << " violation(s) for purpose " << v_purpose << "\n";
      }
      return violations.empty() ? kOk : kNegative;
    }

    if (*rank_cmd) {
      std::string dir = r_pool.empty() ? env_pool() : r_pool;
      if (dir.empty()) throw InputError("no pool directory given and QM_ADAPT_POOL is unset");
      AdaptationGoal ga = load_goal(r_goal);
      std::optional<FitnessWeights> weights;
      if (!r_weights.empty()) weights = detail::weights_from_flag(r_weights);
      ModelPool pool = load_pool(dir);
      RankResult result = rank_reference_models(ga, pool.goals(), weights);
      std::vector<std::string> warnings = pool.warnings;
      warnings.insert(warnings.end(), result.warnings.begin(), result.warnings.end());
      if (r_json) {
        auto arr = nlohmann::json::array();
        for (const auto& r : result.ranked) arr.push_back({{"modelId", r.model_id}, {"fitness", fitness_to_json(r.fitness)}});
        out << canonical_dump({{"ranked", std::move(arr)}, {"warnings", warnings}});
      } else {
        out << std::left << std::setw(28) << "model" << " total   object  purpose viewpt  focus   context\n";
        for (const auto& r : result.ranked) {
          const auto& f = r.fitness;
          out << std::left << std::setw(28) << r.model_id << " " << detail::fixed(f.total) << "  "
              << detail::fixed(f.object) << "  " << detail::fixed(f.purpose) << "  " << detail::fixed(f.viewpoint)
              << "  " << detail::fixed(f.focus) << "  " << detail::fixed(f.context) << "\n";
        }
        for (const auto& w : warnings) err << "warning: " << w << "\n";
      }
      return result.ranked.empty() ? kNegative : kOk;
    }

    if (*tailor_cmd) {
      if (!t_dry && t_out.empty()) throw InputError("tailor needs --out <dir> or --dry-run");
      QualityModel model = load_model(t_model);
      AdaptationGoal ga = load_goal(t_goal);
      if (!model.meta().goal) throw InputError("'" + t_model + "' has no embedded reference goal");
      TailoringOptions options;
      options.contextReview = !t_no_tr10;
      TailoringReport plan = plan_tailoring(model, ga, *model.meta().goal, options);
      if (!t_dry) {
        Session s(std::move(model), ga);
        plan = apply_tailoring(s, plan);
        persist_session(s, t_out);
        write_file(fs::path(t_out) / "report.json", canonical_dump(tailoring_report_to_json(plan)));
      }
      if (t_json) {
        out << canonical_dump(tailoring_report_to_json(plan));
      } else {
        detail::print_report(out, plan);
        if (!t_dry) out << "session written to " << t_out << " with " << plan.seededTasks.size() << " open task(s)\n";
      }
      return kOk;
    }

    if (*tasks_cmd) {
      Session s = restore_session(k_dir);
      if (*complete_cmd || *waive_cmd) {
        const LogRecord& rec = *complete_cmd
                                   ? s.complete(k_task, k_ops.empty() ? std::vector<Operation>{}
                                                                      : detail::ops_from_file(k_ops))
                                   : s.waive(k_task, k_note);
        persist_session(s, k_dir);
        if (k_json) {
          out << canonical_dump({{"record", log_record_to_json(rec)}, {"tasks", tasks_to_json(s.tasks())}});
        } else {
          out << detail::changes_text(rec);
          detail::print_tasks(out, s, false);
        }
        return kOk;
      }
      if (k_json) {
        auto arr = nlohmann::json::array();
        for (const auto& t : s.tasks()) {
          if (k_all || t.open()) arr.push_back(task_to_json(t));
        }
        out << canonical_dump(arr);
      } else {
        detail::print_tasks(out, s, k_all);
      }
      return kOk;
    }

    if (*audit_cmd) {
      QualityModel base = model_from_json(load_json(a_base));
      QualityModel adapted = model_from_json(load_json(a_adapted));
      AdaptationDelta gold = delta_from_json(load_json(a_gold));
      std::optional<Rational> minutes;
      if (!a_minutes.empty()) minutes = Rational::parse(a_minutes);
      AuditResult r = audit(diff_models(base, adapted), gold, minutes);
      if (a_json) {
        out << canonical_dump(audit_to_json(r));
      } else {
        out << "completeness  " << r.completeness.str() << "  (" << detail::fixed(r.completeness) << ")\n"
            << "correctness   " << r.correctness.str() << "  (" << detail::fixed(r.correctness) << ")\n";
        if (r.efficiency) {
          out << "efficiency    " << r.efficiency->str() << "  (" << detail::fixed(*r.efficiency)
              << " elements/min)\n";
        }
        for (const auto& e : r.missed) out << "missed     " << delta_entry_to_json(e).dump() << "\n";
        for (const auto& e : r.incorrect) out << "incorrect  " << delta_entry_to_json(e).dump() << "\n";
      }
      return kOk;
    }

    if (*serve_cmd) {
      ServiceConfig config;
      config.pool = s_pool.empty() ? env_pool() : s_pool;
      config.state = s_state;
      Service service(config);
      g_service = &service;
      std::signal(SIGINT, stop_service);
      std::signal(SIGTERM, stop_service);
      err << "listening on " << s_host << ":" << s_port << "\n";
      bool ok = service.listen(s_host, s_port);
      g_service = nullptr;
      if (!ok) {
        err << "error: cannot listen on " << s_host << ":" << s_port << "\n";
        return kUsage;
      }
      return kOk;
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return detail::is_load_failure(e) ? kUsage : kNegative;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}

}  // namespace qmadapt::cli
