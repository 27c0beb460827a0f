#pragma once

#include <algorithm>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "qmadapt/errors.hpp"
#include "qmadapt/model.hpp"
#include "qmadapt/model_json.hpp"
#include "qmadapt/operation.hpp"
#include "qmadapt/rational.hpp"
#include "qmadapt/text.hpp"

namespace qmadapt {

/// What a gold entry demands of the adapted value.
struct Expectation {
  enum class Kind { Value, NonEmpty, Empty, MinCount };
  Kind kind = Kind::NonEmpty;
  nlohmann::json value;
  std::size_t minCount = 0;

  bool holds(const nlohmann::json& observed) const {
    auto size_of = [](const nlohmann::json& v) -> std::size_t {
      if (v.is_null()) return 0;
      if (v.is_string()) return trim(v.get<std::string>()).empty() ? 0 : 1;
      if (v.is_array() || v.is_object()) return v.size();
      return 1;
    };
    switch (kind) {
      case Kind::Value: return observed == value;
      case Kind::NonEmpty: return size_of(observed) > 0;
      case Kind::Empty: return size_of(observed) == 0;
      case Kind::MinCount: return observed.is_array() && observed.size() >= minCount;
    }
    return false;
  }
};

inline nlohmann::json expectation_to_json(const Expectation& e) {
  switch (e.kind) {
    case Expectation::Kind::Value: return {{"value", e.value}};
    case Expectation::Kind::NonEmpty: return {{"predicate", "non-empty"}};
    case Expectation::Kind::Empty: return {{"predicate", "empty"}};
    case Expectation::Kind::MinCount: return {{"predicate", "min-count:" + std::to_string(e.minCount)}};
  }
  return nullptr;
}

inline Expectation expectation_from_json(const nlohmann::json& j) {
  Expectation e;
  if (!j.is_object()) throw InputError("expect must be an object");
  if (j.contains("value")) {
    e.kind = Expectation::Kind::Value;
    e.value = j.at("value");
    return e;
  }
  std::string p = j.value("predicate", "");
  if (p == "non-empty") {
    e.kind = Expectation::Kind::NonEmpty;
  } else if (p == "empty") {
    e.kind = Expectation::Kind::Empty;
  } else if (p.rfind("min-count:", 0) == 0) {
    e.kind = Expectation::Kind::MinCount;
    try {
      e.minCount = std::stoul(p.substr(10));
    } catch (const std::exception&) {
      throw InputError("bad predicate '" + p + "'");
    }
  } else {
    throw InputError("expect needs a value or a predicate (non-empty, empty, min-count:N), got '" + p + "'");
  }
  return e;
}

/// One adapted (or to-be-adapted) element. `element` is an id, or a name for
/// elements whose id is not shared; `name` is the element's name when known.
struct DeltaEntry {
  std::string element;
  OpType op = OpType::MOD;
  std::string field;
  std::string name;
  std::optional<Expectation> expect;  // gold side
  nlohmann::json observed;            // performed side: new field value or added element

  auto key() const { return std::make_tuple(element, static_cast<int>(op), field); }
};

inline nlohmann::json delta_entry_to_json(const DeltaEntry& e) {
  nlohmann::json j = {{"element", e.element}, {"op", op_type_name(e.op)}};
  if (!e.field.empty()) j["field"] = e.field;
  if (!e.name.empty() && e.name != e.element) j["name"] = e.name;
  if (e.expect) j["expect"] = expectation_to_json(*e.expect);
  if (!e.observed.is_null()) j["value"] = e.observed;
  return j;
}

struct AdaptationDelta {
  std::vector<DeltaEntry> entries;
  bool elementLevel = false;  // MOD entries match per element, not per field
};

inline nlohmann::json delta_to_json(const AdaptationDelta& d) {
  auto arr = nlohmann::json::array();
  for (const auto& e : d.entries) arr.push_back(delta_entry_to_json(e));
  return {{"elementLevel", d.elementLevel}, {"entries", std::move(arr)}};
}

/// Reads a gold delta: a plain entry array or {elementLevel, entries}.
inline AdaptationDelta delta_from_json(const nlohmann::json& j) {
  AdaptationDelta d;
  const nlohmann::json* entries = &j;
  if (j.is_object()) {
    d.elementLevel = j.value("elementLevel", false);
    if (!j.contains("entries")) throw InputError("delta object lacks 'entries'");
    entries = &j.at("entries");
  }
  if (!entries->is_array()) throw InputError("delta entries must be an array");
  std::set<std::tuple<std::string, int, std::string>> seen;
  for (const auto& x : *entries) {
    if (!x.is_object() || !x.contains("element") || !x.at("element").is_string() || !x.contains("op")) {
      throw InputError("delta entry needs 'element' and 'op'");
    }
    DeltaEntry e;
    e.element = x.at("element").get<std::string>();
    std::string op = x.at("op").get<std::string>();
    if (op == "DEL") e.op = OpType::DEL;
    else if (op == "ADD") e.op = OpType::ADD;
    else if (op == "MOD") e.op = OpType::MOD;
    else throw InputError("delta op must be DEL, ADD or MOD, got '" + op + "'");
    e.field = x.value("field", "");
    e.name = x.value("name", "");
    if (x.contains("expect")) e.expect = expectation_from_json(x.at("expect"));
    if (x.contains("value")) e.observed = x.at("value");
    if (!seen.insert({fold(e.element), static_cast<int>(e.op), e.field}).second) {
      throw InputError("duplicate delta entry for '" + e.element + "' " + op + (e.field.empty() ? "" : " " + e.field));
    }
    d.entries.push_back(std::move(e));
  }
  return d;
}

/// Element-level differences from `base` to `adapted`. Added elements carry
/// their whole content; edits on them are not listed separately.
inline AdaptationDelta diff_models(const QualityModel& base, const QualityModel& adapted) {
  AdaptationDelta d;
  for (const auto& [id, e] : base.elements()) {
    if (!adapted.contains(id)) d.entries.push_back({id.str(), OpType::DEL, "", name_of(e), std::nullopt, nullptr});
  }
  for (const auto& [id, e] : adapted.elements()) {
    auto it = base.elements().find(id);
    if (it == base.elements().end()) {
      d.entries.push_back({id.str(), OpType::ADD, "", name_of(e), std::nullopt, element_to_json(e)});
      continue;
    }
    if (it->second == e) continue;
    if (kind_of(it->second) != kind_of(e)) {
      d.entries.push_back({id.str(), OpType::DEL, "", name_of(it->second), std::nullopt, nullptr});
      d.entries.push_back({id.str(), OpType::ADD, "", name_of(e), std::nullopt, element_to_json(e)});
      continue;
    }
    for (const auto& f : fields_of(kind_of(e))) {
      if (!f.writable) continue;
      nlohmann::json after = f.get(e);
      if (f.get(it->second) != after) {
        d.entries.push_back({id.str(), OpType::MOD, std::string(f.name), name_of(e), std::nullopt, after});
      }
    }
  }
  std::sort(d.entries.begin(), d.entries.end(), [](const DeltaEntry& a, const DeltaEntry& b) {
    return a.key() < b.key();
  });
  return d;
}

struct AuditResult {
  Rational completeness;
  Rational correctness;
  std::optional<Rational> efficiency;
  std::vector<DeltaEntry> matched;    // gold entries the performed delta touched
  std::vector<DeltaEntry> missed;     // gold entries never touched
  std::vector<DeltaEntry> incorrect;  // touched, but the expectation fails
};

namespace detail {

inline bool element_matches(const DeltaEntry& gold, const DeltaEntry& done) {
  if (gold.element == done.element) return true;
  return !done.name.empty() && same_name(gold.element, done.name);
}

inline nlohmann::json observed_for(const DeltaEntry& gold, const DeltaEntry& done) {
  if (done.op == OpType::ADD && !gold.field.empty() && done.observed.is_object()) {
    return done.observed.value(gold.field, nlohmann::json());
  }
  return done.observed;
}

// Performed entries that count as adapting `gold`.
inline std::vector<const DeltaEntry*> touching(const DeltaEntry& gold, const AdaptationDelta& performed,
                                               bool element_level) {
  std::vector<const DeltaEntry*> out;
  for (const auto& p : performed.entries) {
    if (p.op != gold.op || !element_matches(gold, p)) continue;
    if (gold.op == OpType::MOD && !element_level && !gold.field.empty() && gold.field != p.field) continue;
    out.push_back(&p);
  }
  return out;
}

inline bool correct(const DeltaEntry& gold, const std::vector<const DeltaEntry*>& hits) {
  if (!gold.expect) return true;
  return std::any_of(hits.begin(), hits.end(),
                     [&](const DeltaEntry* p) { return gold.expect->holds(observed_for(gold, *p)); });
}

inline void require_gold(const AdaptationDelta& gold) {
  if (gold.entries.empty()) throw InputError("gold delta is empty; the measures are undefined");
}

}  // namespace detail

/// Share of gold entries the performed adaptation touched.
inline Rational completeness(const AdaptationDelta& performed, const AdaptationDelta& gold) {
  detail::require_gold(gold);
  std::int64_t hit = 0;
  for (const auto& g : gold.entries) hit += detail::touching(g, performed, gold.elementLevel).empty() ? 0 : 1;
  return Rational(hit, static_cast<std::int64_t>(gold.entries.size()));
}

/// Share of gold entries adapted with an acceptable result.
inline Rational correctness(const AdaptationDelta& performed, const AdaptationDelta& gold) {
  detail::require_gold(gold);
  std::int64_t ok = 0;
  for (const auto& g : gold.entries) {
    auto hits = detail::touching(g, performed, gold.elementLevel);
    ok += !hits.empty() && detail::correct(g, hits) ? 1 : 0;
  }
  return Rational(ok, static_cast<std::int64_t>(gold.entries.size()));
}

/// Correctly adapted elements per minute.
inline Rational efficiency(std::int64_t correct_count, const Rational& minutes) {
  if (minutes <= Rational(0)) throw InputError("duration must be positive");
  if (correct_count < 0) throw InputError("correct count must not be negative");
  return Rational(correct_count) / minutes;
}

inline AuditResult audit(const AdaptationDelta& performed, const AdaptationDelta& gold,
                         std::optional<Rational> minutes = std::nullopt) {
  detail::require_gold(gold);
  AuditResult r;
  std::int64_t ok = 0;
  for (const auto& g : gold.entries) {
    auto hits = detail::touching(g, performed, gold.elementLevel);
    if (hits.empty()) {
      r.missed.push_back(g);
    } else if (detail::correct(g, hits)) {
      r.matched.push_back(g);
      ++ok;
    } else {
      r.matched.push_back(g);
      r.incorrect.push_back(g);
    }
  }
  auto n = static_cast<std::int64_t>(gold.entries.size());
  r.completeness = Rational(static_cast<std::int64_t>(r.matched.size()), n);
  r.correctness = Rational(ok, n);
  if (minutes) r.efficiency = efficiency(ok, *minutes);
  return r;
}

inline nlohmann::json rational_to_json(const Rational& r) { return {{"exact", r.str()}, {"decimal", r.to_double()}}; }

inline nlohmann::json audit_to_json(const AuditResult& r) {
  auto list = [](const std::vector<DeltaEntry>& xs) {
    auto arr = nlohmann::json::array();
    for (const auto& x : xs) arr.push_back(delta_entry_to_json(x));
    return arr;
  };
  nlohmann::json j = {{"completeness", rational_to_json(r.completeness)},
                      {"correctness", rational_to_json(r.correctness)},
                      {"efficiency", r.efficiency ? rational_to_json(*r.efficiency) : nlohmann::json()},
                      {"matchedEntries", list(r.matched)},
                      {"missedEntries", list(r.missed)},
                      {"incorrectEntries", list(r.incorrect)}};
  return j;
}

}  // namespace qmadapt
