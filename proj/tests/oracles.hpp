#pragma once

// Reference computations that share no code with the library. They work on
// raw JSON documents and plain integer fractions.

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <map>
#include <numeric>
#include <set>
#include <string>
#include <utility>

#include <json.hpp>

namespace oracle {

using json = nlohmann::json;

struct Frac {
  std::int64_t n = 0;
  std::int64_t d = 1;

  Frac() = default;
  Frac(std::int64_t num, std::int64_t den) : n(num), d(den) {
    std::int64_t g = std::gcd(n, d);
    if (g != 0) {
      n /= g;
      d /= g;
    }
    if (d < 0) {
      n = -n;
      d = -d;
    }
  }
  friend Frac operator+(Frac a, Frac b) { return Frac(a.n * b.d + b.n * a.d, a.d * b.d); }
  friend Frac operator/(Frac a, std::int64_t k) { return Frac(a.n, a.d * k); }
  friend bool operator==(Frac a, Frac b) { return a.n == b.n && a.d == b.d; }
  std::string str() const { return d == 1 ? std::to_string(n) : std::to_string(n) + "/" + std::to_string(d); }
};

inline std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

inline std::set<std::string> names(const json& arr) {
  std::set<std::string> out;
  for (const auto& v : arr) out.insert(lower(v.get<std::string>()));
  return out;
}

// Share of `want` found in `have`.
inline Frac covered(const json& want, const json& have) {
  auto w = names(want);
  auto h = names(have);
  std::int64_t hit = 0;
  for (const auto& x : w) hit += h.count(x);
  return Frac(hit, static_cast<std::int64_t>(w.size()));
}

/// Equal-weight fitness of goal document `gr` for goal document `ga`.
inline Frac fitness(const json& ga, const json& gr) {
  Frac object = covered(ga["object"], gr["object"]);
  Frac purpose(ga["purpose"] == gr["purpose"] ? 1 : 0, 1);
  Frac viewpoint = covered(ga["viewpoint"], gr["viewpoint"]);
  Frac focus = covered(ga["focus"], gr["focus"]);
  std::map<std::string, json> offered;
  for (const auto& [k, v] : gr["context"].items()) offered[lower(k)] = v;
  std::int64_t ok = 0, dims = 0;
  for (const auto& [k, v] : ga["context"].items()) {
    ++dims;
    auto it = offered.find(lower(k));
    if (it == offered.end()) {
      ++ok;
      continue;
    }
    auto a = names(v);
    auto b = names(it->second);
    ok += std::any_of(a.begin(), a.end(), [&](const std::string& x) { return b.count(x) != 0; }) ? 1 : 0;
  }
  Frac context = dims == 0 ? Frac(1, 1) : Frac(ok, dims);
  return (object + purpose + viewpoint + focus + context) / 5;
}

struct AuditCounts {
  std::int64_t gold = 0;
  std::int64_t touched = 0;
  std::int64_t correct = 0;
};

/// Brute-force counting over a gold delta and a list of performed changes,
/// both as raw JSON arrays. A performed change touches a gold entry when
/// element, op and (for field-level MOD entries) field agree; it is correct
/// when the gold entry has no expectation or the new value satisfies it.
inline AuditCounts count_audit(const json& gold, const json& performed) {
  AuditCounts c;
  for (const auto& g : gold) {
    ++c.gold;
    bool touched = false, correct = false;
    for (const auto& p : performed) {
      if (p["element"] != g["element"] || p["op"] != g["op"]) continue;
      if (g["op"] == "MOD" && g.contains("field") && p.value("field", "") != g["field"]) continue;
      touched = true;
      if (!g.contains("expect")) {
        correct = true;
        continue;
      }
      const json& want = g["expect"];
      const json value = p.value("value", json());
      if (want.contains("value")) {
        correct = correct || value == want["value"];
      } else if (want["predicate"] == "non-empty") {
        bool empty = value.is_null() || (value.is_string() && value.get<std::string>().empty()) ||
                     ((value.is_array() || value.is_object()) && value.empty());
        correct = correct || !empty;
      }
    }
    c.touched += touched ? 1 : 0;
    c.correct += correct ? 1 : 0;
  }
  return c;
}

}  // namespace oracle
