#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>

#include <httplib.h>
#include <json.hpp>

#include "qmadapt/audit.hpp"
#include "qmadapt/engine.hpp"
#include "qmadapt/goal.hpp"
#include "qmadapt/store.hpp"
#include "qmadapt/tailor.hpp"

namespace qmadapt {

struct ServiceConfig {
  fs::path pool;
  fs::path state = ".qm-adapt-sessions";
};

/// HTTP facade over pools, ranking, tailoring, sessions and audit. Writes to
/// one session are serialized; every accepted write bumps the session
/// revision by one and is persisted before the response is sent.
class Service {
 public:
  explicit Service(ServiceConfig config) : config_(std::move(config)) { restore_all(); }

  void install(httplib::Server& srv) {
    srv.Get("/pool", wrap([this](const httplib::Request&) { return reply(200, pool_json()); }));
    srv.Post("/rank", wrap([this](const httplib::Request& req) { return reply(200, rank(body_of(req))); }));
    srv.Post("/sessions", wrap([this](const httplib::Request& req) { return reply(201, create(body_of(req))); }));
    srv.Post(R"(/sessions/([^/]+)/tailor)", wrap([this](const httplib::Request& req) {
               return reply(200, tailor(req.matches[1], body_of(req, true)));
             }));
    srv.Get(R"(/sessions/([^/]+)/model)", wrap([this](const httplib::Request& req) {
              auto e = entry(req.matches[1]);
              std::lock_guard lock(e->mu);
              return reply(200, model_to_json(e->session.model()));
            }));
    srv.Get(R"(/sessions/([^/]+)/tasks)", wrap([this](const httplib::Request& req) {
              auto e = entry(req.matches[1]);
              std::lock_guard lock(e->mu);
              return reply(200, {{"revision", e->revision}, {"tasks", tasks_to_json(e->session.tasks())}});
            }));
    srv.Get(R"(/sessions/([^/]+)/validate)", wrap([this](const httplib::Request& req) {
              auto e = entry(req.matches[1]);
              std::lock_guard lock(e->mu);
              auto arr = nlohmann::json::array();
              for (const auto& v : validate(e->session.model(), e->session.goal().purpose)) {
                arr.push_back(violation_to_json(v));
              }
              return reply(200, {{"revision", e->revision},
                                 {"purpose", purpose_name(e->session.goal().purpose)},
                                 {"violations", std::move(arr)}});
            }));
    srv.Get(R"(/sessions/([^/]+)/log)", wrap([this](const httplib::Request& req) {
              auto e = entry(req.matches[1]);
              std::lock_guard lock(e->mu);
              auto records = nlohmann::json::array();
              for (const auto& r : e->session.log()) records.push_back(log_record_to_json(r));
              return reply(200, {{"header", session_header(e->session)}, {"records", std::move(records)}});
            }));
    srv.Post(R"(/sessions/([^/]+)/operations)", wrap([this](const httplib::Request& req) {
               nlohmann::json body = body_of(req);
               auto ops = operations_from_json(field(body, "ops"));
               return reply(200, write(req.matches[1], body, [&](Session& s) {
                              auto created = nlohmann::json::array();
                              for (const auto& op : ops) {
                                const auto& rec = s.apply(op);
                                if (rec.createdElement) created.push_back(rec.createdElement->str());
                              }
                              return nlohmann::json{{"createdElements", created}};
                            }));
             }));
    srv.Post(R"(/sessions/([^/]+)/tasks/([^/]+)/complete)", wrap([this](const httplib::Request& req) {
               nlohmann::json body = body_of(req);
               auto ops = operations_from_json(body.value("ops", nlohmann::json::array()));
               std::string tid = req.matches[2];
               return reply(200, write(req.matches[1], body, [&](Session& s) {
                              s.complete(tid, ops);
                              return nlohmann::json::object();
                            }));
             }));
    srv.Post(R"(/sessions/([^/]+)/tasks/([^/]+)/waive)", wrap([this](const httplib::Request& req) {
               nlohmann::json body = body_of(req);
               std::string note = body.value("note", "");
               std::string tid = req.matches[2];
               return reply(200, write(req.matches[1], body, [&](Session& s) {
                              s.waive(tid, note);
                              return nlohmann::json::object();
                            }));
             }));
    srv.Post(R"(/sessions/([^/]+)/audit)", wrap([this](const httplib::Request& req) {
               nlohmann::json body = body_of(req);
               auto e = entry(req.matches[1]);
               AdaptationDelta gold = delta_from_json(field(body, "goldDelta"));
               std::optional<Rational> minutes;
               if (body.contains("minutes")) minutes = rational_from_json(body.at("minutes"));
               std::lock_guard lock(e->mu);
               AdaptationDelta performed = diff_models(e->session.initial_model(), e->session.model());
               return reply(200, audit_to_json(audit(performed, gold, minutes)));
             }));
  }

  /// Binds and serves until `stop()`; returns false if the port is taken.
  bool listen(const std::string& host, int port) {
    install(server_);
    return server_.listen(host, port);
  }

  void stop() { server_.stop(); }

  httplib::Server& server() { return server_; }

 private:
  struct Entry {
    std::mutex mu;
    std::string id;
    std::string referenceModelId;
    Session session;
    TailoringReport plan;
    bool tailored = false;
    std::uint64_t revision = 0;

    Entry(std::string i, std::string ref, Session s) : id(std::move(i)), referenceModelId(std::move(ref)), session(std::move(s)) {}
  };

  struct Reply {
    int status;
    nlohmann::json body;
  };

  static Reply reply(int status, nlohmann::json body) { return {status, std::move(body)}; }

  static Rational rational_from_json(const nlohmann::json& j) {
    if (j.is_string()) return Rational::parse(j.get<std::string>());
    if (j.is_number_integer()) return Rational(j.get<std::int64_t>());
    if (j.is_number()) return Rational::approximate(j.get<double>());
    throw InputError("'minutes' must be a number");
  }

  static nlohmann::json body_of(const httplib::Request& req, bool optional = false) {
    if (req.body.empty()) {
      if (optional) return nlohmann::json::object();
      throw InputError("request body is empty");
    }
    nlohmann::json j = parse_json_text(req.body, "request body");
    if (!j.is_object()) throw InputError("request body must be a JSON object");
    return j;
  }

  static const nlohmann::json& field(const nlohmann::json& body, const char* key) {
    if (!body.contains(key)) throw InputError(std::string("request body lacks '") + key + "'");
    return body.at(key);
  }

  static int status_for(const Error& e) {
    const std::string& c = e.code();
    if (c == "input" || c == "parse" || c == "schema") return 400;
    if (c == "not-found") return 404;
    if (c == "stale" || c == "conflict") return 409;
    return 422;
  }

  static nlohmann::json error_body(const std::string& code, const std::string& message,
                                   nlohmann::json details = nlohmann::json::object()) {
    return {{"code", code}, {"message", message}, {"details", std::move(details)}};
  }

  template <typename F>
  httplib::Server::Handler wrap(F f) {
    return [f = std::move(f)](const httplib::Request& req, httplib::Response& res) {
      Reply r{500, nullptr};
      try {
        r = f(req);
      } catch (const Error& e) {
        nlohmann::json details = nlohmann::json::object();
        if (const auto* b = dynamic_cast<const BlockedDeleteError*>(&e)) details["referrers"] = b->referrers();
        if (const auto* s = dynamic_cast<const StructuralError*>(&e)) details["violations"] = s->details();
        if (const auto* p = dynamic_cast<const ParseError*>(&e)) {
          details["line"] = p->line();
          details["column"] = p->column();
        }
        if (const auto* rp = dynamic_cast<const ReplayError*>(&e)) details["step"] = rp->step();
        r = {status_for(e), error_body(e.code(), e.what(), std::move(details))};
      } catch (const nlohmann::json::exception& e) {
        r = {400, error_body("input", e.what())};
      } catch (const std::exception& e) {
        r = {500, error_body("internal", e.what())};
      }
      res.status = r.status;
      res.set_content(canonical_dump(r.body), "application/json");
    };
  }

  class ConflictError : public Error {
   public:
    explicit ConflictError(const std::string& m) : Error("conflict", m) {}
  };

  ModelPool pool() const {
    if (config_.pool.empty()) throw NotFoundError("no reference model pool configured");
    return load_pool(config_.pool);
  }

  nlohmann::json pool_json() const {
    ModelPool p = pool();
    auto arr = nlohmann::json::array();
    for (const auto& e : p.entries) {
      arr.push_back({{"modelId", e.modelId},
                     {"schema", e.schema},
                     {"goal", e.goal ? goal_to_json(*e.goal) : nlohmann::json()}});
    }
    return {{"entries", std::move(arr)}, {"warnings", p.warnings}};
  }

  nlohmann::json rank(const nlohmann::json& body) const {
    const nlohmann::json& goal_doc = body.contains("goal") ? body.at("goal") : body;
    AdaptationGoal ga = parse_goal(goal_doc);
    std::optional<FitnessWeights> weights;
    if (body.contains("weights")) weights = parse_weights(body.at("weights"));
    RankResult result = rank_reference_models(ga, pool().goals(), weights);
    auto arr = nlohmann::json::array();
    for (const auto& r : result.ranked) arr.push_back({{"modelId", r.model_id}, {"fitness", fitness_to_json(r.fitness)}});
    return {{"ranked", std::move(arr)}, {"warnings", result.warnings}};
  }

  nlohmann::json handle(const Entry& e) const {
    return {{"sessionId", e.id}, {"modelHash", model_hash(e.session.model())}, {"revision", e.revision}};
  }

  nlohmann::json create(const nlohmann::json& body) {
    AdaptationGoal ga = parse_goal(field(body, "goal"));
    std::string ref = field(body, "referenceModelId").get<std::string>();
    QualityModel model = load_model(pool().at(ref).path);
    if (!model.meta().goal) throw InputError("reference model '" + ref + "' has no embedded goal");
    TailoringOptions options;
    if (body.contains("options")) options.contextReview = body.at("options").value("tr10", true);
    TailoringReport plan = plan_tailoring(model, ga, *model.meta().goal, options);
    std::lock_guard lock(map_mu_);
    std::string id = "s" + std::to_string(++last_id_);
    auto e = std::make_shared<Entry>(id, ref, Session(std::move(model), std::move(ga)));
    e->plan = std::move(plan);
    persist(*e);
    sessions_[id] = e;
    return {{"session", handle(*e)}, {"report", tailoring_report_to_json(e->plan)}};
  }

  nlohmann::json tailor(const std::string& id, const nlohmann::json& body) {
    auto e = entry(id);
    std::lock_guard lock(e->mu);
    if (e->tailored) throw ConflictError("session '" + id + "' is already tailored");
    check_revision(*e, body, false);
    Session work = e->session;
    TailoringReport applied = apply_tailoring(work, e->plan);
    e->session = std::move(work);
    e->plan = applied;
    e->tailored = true;
    ++e->revision;
    persist(*e);
    auto spawned = nlohmann::json::array();
    for (const auto& tid : applied.seededTasks) spawned.push_back(task_to_json(e->session.task(tid)));
    return {{"session", handle(*e)}, {"report", tailoring_report_to_json(applied)}, {"spawnedTasks", spawned}};
  }

  static void check_revision(const Entry& e, const nlohmann::json& body, bool required) {
    if (!body.contains("revision")) {
      if (required) throw InputError("request body lacks 'revision'");
      return;
    }
    if (!body.at("revision").is_number_unsigned()) throw InputError("'revision' must be a non-negative integer");
    auto rev = body.at("revision").get<std::uint64_t>();
    if (rev != e.revision) {
      throw StaleError("revision " + std::to_string(rev) + " is stale; session '" + e.id + "' is at revision " +
                       std::to_string(e.revision));
    }
  }

  template <typename F>
  nlohmann::json write(const std::string& id, const nlohmann::json& body, F change) {
    auto e = entry(id);
    std::lock_guard lock(e->mu);
    check_revision(*e, body, true);
    Session work = e->session;
    std::size_t before = work.log().size();
    nlohmann::json extra = change(work);
    e->session = std::move(work);
    ++e->revision;
    persist(*e);
    auto spawned = nlohmann::json::array();
    auto completed = nlohmann::json::array();
    auto obsoleted = nlohmann::json::array();
    for (std::size_t i = before; i < e->session.log().size(); ++i) {
      const auto& rec = e->session.log()[i];
      for (const auto& t : rec.spawnedTasks) spawned.push_back(t);
      for (const auto& t : rec.completedTasks) completed.push_back(t);
      for (const auto& t : rec.obsoletedTasks) obsoleted.push_back(t);
    }
    extra["session"] = handle(*e);
    extra["spawnedTasks"] = spawned;
    extra["completedTasks"] = completed;
    extra["obsoletedTasks"] = obsoleted;
    return extra;
  }

  std::shared_ptr<Entry> entry(const std::string& id) {
    std::lock_guard lock(map_mu_);
    auto it = sessions_.find(id);
    if (it == sessions_.end()) throw NotFoundError("no session '" + id + "'");
    return it->second;
  }

  void persist(const Entry& e) const {
    fs::path dir = config_.state / e.id;
    persist_session(e.session, dir);
    nlohmann::json meta = {{"sessionId", e.id},
                           {"referenceModelId", e.referenceModelId},
                           {"revision", e.revision},
                           {"tailored", e.tailored},
                           {"plan", tailoring_report_to_json(e.plan)}};
    write_file(dir / "service.json", canonical_dump(meta));
  }

  void restore_all() {
    std::error_code ec;
    if (!fs::is_directory(config_.state, ec)) return;
    for (const auto& d : fs::directory_iterator(config_.state, ec)) {
      if (!d.is_directory() || !fs::exists(d.path() / "service.json")) continue;
      nlohmann::json meta = load_json(d.path() / "service.json");
      std::string id = meta.at("sessionId").get<std::string>();
      auto e = std::make_shared<Entry>(id, meta.value("referenceModelId", ""), restore_session(d.path()));
      e->revision = meta.value("revision", std::uint64_t{0});
      e->tailored = meta.value("tailored", false);
      e->plan = tailoring_report_from_json(meta.at("plan"));
      if (id.size() > 1 && id[0] == 's') {
        try {
          last_id_ = std::max<std::uint64_t>(last_id_, std::stoull(id.substr(1)));
        } catch (const std::exception&) {
        }
      }
      sessions_[id] = std::move(e);
    }
  }

  ServiceConfig config_;
  httplib::Server server_;
  std::mutex map_mu_;
  std::map<std::string, std::shared_ptr<Entry>> sessions_;
  std::uint64_t last_id_ = 0;
};

}  // namespace qmadapt
