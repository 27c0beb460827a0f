#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "qmadapt/engine.hpp"
#include "qmadapt/errors.hpp"
#include "qmadapt/goal.hpp"
#include "qmadapt/hash.hpp"
#include "qmadapt/model_json.hpp"
#include "qmadapt/validate.hpp"

namespace qmadapt {

namespace fs = std::filesystem;

inline constexpr std::string_view kModelExt = ".qm.json";
inline constexpr std::string_view kGoalExt = ".goal.json";
inline constexpr std::string_view kLogExt = ".session.jsonl";
inline constexpr std::string_view kGoldExt = ".gold.json";
inline constexpr std::string_view kSessionFormat = "qm-adapt-session/1";

inline std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Writes through a sibling temporary file so readers never see a torn file.
inline void write_file(const fs::path& path, const std::string& bytes) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write '" + path.string() + "'");
    out << bytes;
    if (!out.flush()) throw IoError("cannot write '" + path.string() + "'");
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw IoError("cannot write '" + path.string() + "': " + ec.message());
}

/// Parses JSON text; syntax errors carry 1-based line and column.
inline nlohmann::json parse_json_text(const std::string& text, const std::string& source) {
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    std::size_t offset = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
    std::size_t line = 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<long>(offset), '\n'));
    std::size_t last_nl = text.rfind('\n', offset == 0 ? 0 : offset - 1);
    std::size_t column = last_nl == std::string::npos || offset == 0 ? offset + 1 : offset - last_nl;
    throw ParseError(source + ":" + std::to_string(line) + ":" + std::to_string(column) + ": invalid JSON", line,
                     column);
  }
}

inline nlohmann::json load_json(const fs::path& path) { return parse_json_text(read_file(path), path.string()); }

/// Builds a model from a parsed document and rejects structural violations.
inline QualityModel checked_model(const nlohmann::json& doc, const std::string& source) {
  QualityModel m = model_from_json(doc);
  auto bad = structural_violations(m);
  if (!bad.empty()) {
    std::vector<std::string> details;
    for (const auto& v : bad) details.push_back(v.rule + " " + v.target.str() + ": " + v.message);
    std::string message =
        source + ": " + std::to_string(bad.size()) + " structural violation(s), first: " + details.front();
    throw StructuralError(std::move(message), std::move(details));
  }
  return m;
}

inline QualityModel load_model(const fs::path& path) { return checked_model(load_json(path), path.string()); }

inline void save_model(const QualityModel& m, const fs::path& path) { write_file(path, canonical_model_bytes(m)); }

inline AdaptationGoal load_goal(const fs::path& path) {
  nlohmann::json doc = load_json(path);
  if (doc.is_object() && doc.contains("goal") && doc.at("goal").is_object()) doc = doc.at("goal");
  return parse_goal(doc);
}

inline void save_goal(const AdaptationGoal& g, const fs::path& path) { write_file(path, canonical_dump(goal_to_json(g))); }

struct PoolEntry {
  std::string modelId;
  fs::path path;
  std::optional<AdaptationGoal> goal;
  std::string schema;
};

struct ModelPool {
  std::vector<PoolEntry> entries;
  std::vector<std::string> warnings;

  std::vector<PoolGoal> goals() const {
    std::vector<PoolGoal> out;
    for (const auto& e : entries) out.push_back({e.modelId, e.goal});
    return out;
  }

  const PoolEntry& at(const std::string& id) const {
    for (const auto& e : entries) {
      if (e.modelId == id) return e;
    }
    throw NotFoundError("no model '" + id + "' in the pool");
  }
};

inline bool has_suffix(const std::string& s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

/// Indexes every `*.qm.json` in `dir`; the model id is the file name without
/// the extension. Unreadable models become warnings.
inline ModelPool load_pool(const fs::path& dir) {
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) throw IoError("cannot read pool directory '" + dir.string() + "'");
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir, ec)) {
    std::string name = entry.path().filename().string();
    if (entry.is_regular_file() && has_suffix(name, kModelExt)) files.push_back(entry.path());
  }
  if (ec) throw IoError("cannot read pool directory '" + dir.string() + "': " + ec.message());
  std::sort(files.begin(), files.end());
  ModelPool pool;
  for (const auto& file : files) {
    std::string name = file.filename().string();
    std::string id = name.substr(0, name.size() - kModelExt.size());
    try {
      QualityModel m = load_model(file);
      pool.entries.push_back({id, file, m.meta().goal, std::string(kModelSchema)});
      if (!m.meta().goal) pool.warnings.push_back("model '" + id + "' has no embedded goal");
    } catch (const Error& e) {
      pool.warnings.push_back("skipped '" + name + "': " + e.what());
    }
  }
  return pool;
}

// Session directories.

inline nlohmann::json session_header(const Session& s) {
  return {{"format", kSessionFormat},
          {"hashAlgorithm", kHashAlgorithm},
          {"initialModelHash", model_hash(s.initial_model())},
          {"goal", goal_to_json(s.goal())}};
}

inline std::string session_log_text(const Session& s) {
  std::string out = session_header(s).dump() + "\n";
  for (const auto& rec : s.log()) out += log_record_to_json(rec).dump() + "\n";
  return out;
}

inline nlohmann::json tasks_to_json(const std::vector<AdaptationTask>& tasks) {
  auto arr = nlohmann::json::array();
  for (const auto& t : tasks) arr.push_back(task_to_json(t));
  return arr;
}

/// Writes initial model, goal, log, current model and task list.
inline void persist_session(const Session& s, const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create '" + dir.string() + "': " + ec.message());
  save_model(s.initial_model(), dir / "initial.qm.json");
  save_goal(s.goal(), dir / "goal.goal.json");
  write_file(dir / "session.session.jsonl", session_log_text(s));
  save_model(s.model(), dir / "model.qm.json");
  write_file(dir / "tasks.json", canonical_dump(tasks_to_json(s.tasks())));
}

/// Reads a session log. A trailing line that does not parse (an interrupted
/// write) ends the log; everything before it is kept.
inline std::pair<nlohmann::json, std::vector<LogRecord>> read_session_log(const std::string& text,
                                                                          const std::string& source) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw InputError(source + ": empty session log");
  nlohmann::json header = parse_json_text(line, source);
  if (!header.is_object() || header.value("format", "") != kSessionFormat) {
    throw SchemaError(source + ": not a " + std::string(kSessionFormat) + " log");
  }
  if (header.value("hashAlgorithm", "") != kHashAlgorithm) {
    throw SchemaError(source + ": unsupported hash algorithm '" + header.value("hashAlgorithm", "") + "'");
  }
  std::vector<LogRecord> records;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded()) break;
    records.push_back(log_record_from_json(j));
  }
  return {std::move(header), std::move(records)};
}

inline Session restore_session(const fs::path& dir) {
  QualityModel initial = load_model(dir / "initial.qm.json");
  fs::path log_path = dir / "session.session.jsonl";
  auto [header, records] = read_session_log(read_file(log_path), log_path.string());
  std::string expected = header.value("initialModelHash", "");
  std::string actual = model_hash(initial);
  if (expected != actual) {
    throw ReplayError(0, "initial model hash " + actual + " does not match the log (" + expected + ")");
  }
  AdaptationGoal goal = parse_goal(header.at("goal"));
  return replay(initial, goal, records);
}

}  // namespace qmadapt
