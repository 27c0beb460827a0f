#pragma once

#include <algorithm>
#include <array>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "qmadapt/context_tags.hpp"
#include "qmadapt/errors.hpp"
#include "qmadapt/rational.hpp"
#include "qmadapt/text.hpp"

namespace qmadapt {

enum class Purpose { Specification, Evaluation };

inline std::string_view purpose_name(Purpose p) {
  return p == Purpose::Specification ? "specification" : "evaluation";
}

inline Purpose parse_purpose(std::string_view text) {
  std::string f = fold(text);
  if (f == "specification") return Purpose::Specification;
  if (f == "evaluation") return Purpose::Evaluation;
  throw InputError("unknown purpose '" + std::string(text) + "' (expected specification or evaluation)");
}

using NameSet = std::set<std::string, FoldedLess>;

/// Relative weights of the five goal parameters in the fitness total.
struct FitnessWeights {
  Rational object{1};
  Rational purpose{1};
  Rational viewpoint{1};
  Rational focus{1};
  Rational context{1};

  friend bool operator==(const FitnessWeights&, const FitnessWeights&) = default;
};

/// The five-parameter adaptation goal (object, purpose, viewpoint, focus,
/// context) used both for the target model and as the embedded goal of a
/// reference model.
struct AdaptationGoal {
  NameSet object;
  Purpose purpose = Purpose::Evaluation;
  NameSet viewpoint;
  NameSet focus;
  ContextTags context;
  std::optional<FitnessWeights> weights;

  friend bool operator==(const AdaptationGoal& a, const AdaptationGoal& b) {
    auto same = [](const NameSet& x, const NameSet& y) {
      return x.size() == y.size() && std::equal(x.begin(), x.end(), y.begin(), [](auto& l, auto& r) {
               return same_name(l, r);
             });
    };
    return same(a.object, b.object) && a.purpose == b.purpose && same(a.viewpoint, b.viewpoint) &&
           same(a.focus, b.focus) && a.context == b.context && a.weights == b.weights;
  }
};

namespace detail {

inline NameSet parse_name_set(const nlohmann::json& doc, const char* key) {
  if (!doc.contains(key)) throw InputError(std::string("goal is missing parameter '") + key + "'");
  const auto& arr = doc.at(key);
  NameSet out;
  auto add = [&](const nlohmann::json& v) {
    if (!v.is_string()) throw InputError(std::string("goal parameter '") + key + "' must hold strings");
    std::string name = trim(v.get<std::string>());
    if (!name.empty()) out.insert(std::move(name));
  };
  if (arr.is_string()) {
    add(arr);
  } else if (arr.is_array()) {
    for (const auto& v : arr) add(v);
  } else {
    throw InputError(std::string("goal parameter '") + key + "' must be a string array");
  }
  if (out.empty()) throw InputError(std::string("goal parameter '") + key + "' must not be empty");
  return out;
}

inline Rational weight_from_json(const nlohmann::json& v, std::string_view key) {
  Rational w;
  if (v.is_number_integer()) {
    w = Rational(v.get<std::int64_t>());
  } else if (v.is_number()) {
    w = Rational::approximate(v.get<double>());
  } else if (v.is_string()) {
    w = Rational::parse(v.get<std::string>());
  } else {
    throw InputError("weight '" + std::string(key) + "' must be a number");
  }
  if (w < Rational(0)) throw InputError("weight '" + std::string(key) + "' must not be negative");
  return w;
}

inline nlohmann::json names_to_json(const NameSet& names) {
  auto arr = nlohmann::json::array();
  for (const auto& n : names) arr.push_back(n);
  return arr;
}

}  // namespace detail

inline FitnessWeights parse_weights(const nlohmann::json& doc) {
  if (!doc.is_object()) throw InputError("weights must be an object");
  FitnessWeights w;
  for (const auto& [key, value] : doc.items()) {
    Rational r = detail::weight_from_json(value, key);
    if (key == "object") w.object = r;
    else if (key == "purpose") w.purpose = r;
    else if (key == "viewpoint") w.viewpoint = r;
    else if (key == "focus") w.focus = r;
    else if (key == "context") w.context = r;
    else throw InputError("unknown weight '" + key + "'");
  }
  if (w.object + w.purpose + w.viewpoint + w.focus + w.context == Rational(0)) {
    throw InputError("weights must not all be zero");
  }
  return w;
}

inline nlohmann::json weights_to_json(const FitnessWeights& w) {
  auto r = [](const Rational& x) -> nlohmann::json {
    if (x.den() == 1) return x.num();
    return x.str();
  };
  return {{"object", r(w.object)},
          {"purpose", r(w.purpose)},
          {"viewpoint", r(w.viewpoint)},
          {"focus", r(w.focus)},
          {"context", r(w.context)}};
}

/// Reads the goal file format. Every parameter is required.
inline AdaptationGoal parse_goal(const nlohmann::json& doc) {
  if (!doc.is_object()) throw InputError("goal document must be a JSON object");
  AdaptationGoal g;
  g.object = detail::parse_name_set(doc, "object");
  if (!doc.contains("purpose")) throw InputError("goal is missing parameter 'purpose'");
  if (!doc.at("purpose").is_string()) throw InputError("goal parameter 'purpose' must be a string");
  g.purpose = parse_purpose(doc.at("purpose").get<std::string>());
  g.viewpoint = detail::parse_name_set(doc, "viewpoint");
  g.focus = detail::parse_name_set(doc, "focus");
  if (!doc.contains("context")) throw InputError("goal is missing parameter 'context'");
  g.context = doc.at("context").get<ContextTags>();
  if (doc.contains("weights") && !doc.at("weights").is_null()) g.weights = parse_weights(doc.at("weights"));
  return g;
}

inline nlohmann::json goal_to_json(const AdaptationGoal& g) {
  nlohmann::json j = {{"object", detail::names_to_json(g.object)},
                      {"purpose", purpose_name(g.purpose)},
                      {"viewpoint", detail::names_to_json(g.viewpoint)},
                      {"focus", detail::names_to_json(g.focus)},
                      {"context", g.context}};
  if (g.weights) j["weights"] = weights_to_json(*g.weights);
  return j;
}

inline void to_json(nlohmann::json& j, const AdaptationGoal& g) { j = goal_to_json(g); }
inline void from_json(const nlohmann::json& j, AdaptationGoal& g) { g = parse_goal(j); }

struct GoalFitness {
  Rational total;
  Rational object;
  Rational purpose;
  Rational viewpoint;
  Rational focus;
  Rational context;
};

inline nlohmann::json fitness_to_json(const GoalFitness& f) {
  auto r = [](const Rational& x) {
    return nlohmann::json{{"exact", x.str()}, {"decimal", x.to_double()}};
  };
  return {{"total", r(f.total)},
          {"perParameter",
           {{"object", r(f.object)},
            {"purpose", r(f.purpose)},
            {"viewpoint", r(f.viewpoint)},
            {"focus", r(f.focus)},
            {"context", r(f.context)}}}};
}

namespace detail {

// Share of `wanted` that `offered` covers.
inline Rational coverage(const NameSet& wanted, const NameSet& offered) {
  if (wanted.empty()) return Rational(1);
  std::int64_t hits = 0;
  for (const auto& w : wanted) hits += offered.count(w) != 0 ? 1 : 0;
  return Rational(hits, static_cast<std::int64_t>(wanted.size()));
}

inline Rational context_compatibility(const ContextTags& ga, const ContextTags& gr) {
  if (ga.empty()) return Rational(1);
  std::int64_t ok = 0;
  for (const auto& [dim, values] : ga.dimensions()) {
    const auto* offered = gr.values(dim);
    if (offered == nullptr) {
      ++ok;
      continue;
    }
    for (const auto& v : values) {
      if (offered->count(v) != 0) {
        ++ok;
        break;
      }
    }
  }
  return Rational(ok, static_cast<std::int64_t>(ga.size()));
}

}  // namespace detail

/// How well a reference goal `gr` serves the target goal `ga`. Elements of
/// `gr` beyond what `ga` asks for cost nothing; they get tailored away.
inline GoalFitness goal_fitness(const AdaptationGoal& ga, const AdaptationGoal& gr,
                                const std::optional<FitnessWeights>& weights = std::nullopt) {
  FitnessWeights w = weights ? *weights : ga.weights.value_or(FitnessWeights{});
  GoalFitness f;
  f.object = detail::coverage(ga.object, gr.object);
  f.purpose = ga.purpose == gr.purpose ? Rational(1) : Rational(0);
  f.viewpoint = detail::coverage(ga.viewpoint, gr.viewpoint);
  f.focus = detail::coverage(ga.focus, gr.focus);
  f.context = detail::context_compatibility(ga.context, gr.context);
  Rational weight_sum = w.object + w.purpose + w.viewpoint + w.focus + w.context;
  if (weight_sum == Rational(0)) throw InputError("weights must not all be zero");
  f.total = (w.object * f.object + w.purpose * f.purpose + w.viewpoint * f.viewpoint +
             w.focus * f.focus + w.context * f.context) /
            weight_sum;
  return f;
}

struct PoolGoal {
  std::string model_id;
  std::optional<AdaptationGoal> goal;
};

struct RankedModel {
  std::string model_id;
  GoalFitness fitness;
};

struct RankResult {
  std::vector<RankedModel> ranked;
  std::vector<std::string> warnings;
};

/// Orders the pool by descending fitness total; ties go to the smaller id.
inline RankResult rank_reference_models(const AdaptationGoal& ga, const std::vector<PoolGoal>& pool,
                                        const std::optional<FitnessWeights>& weights = std::nullopt) {
  if (pool.empty()) throw InputError("reference model pool is empty");
  RankResult result;
  for (const auto& entry : pool) {
    if (!entry.goal) {
      result.warnings.push_back("model '" + entry.model_id + "' has no embedded goal; skipped");
      continue;
    }
    result.ranked.push_back({entry.model_id, goal_fitness(ga, *entry.goal, weights)});
  }
  std::sort(result.ranked.begin(), result.ranked.end(), [](const RankedModel& a, const RankedModel& b) {
    if (a.fitness.total != b.fitness.total) return a.fitness.total > b.fitness.total;
    return a.model_id < b.model_id;
  });
  return result;
}

}  // namespace qmadapt
