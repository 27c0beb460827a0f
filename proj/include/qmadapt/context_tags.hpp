#pragma once

#include <map>
#include <set>
#include <string>
#include <string_view>

#include <json.hpp>

#include "qmadapt/errors.hpp"
#include "qmadapt/text.hpp"

namespace qmadapt {

/// Dimension -> values annotation ("Language" -> {"C", "C++"}). Keys and
/// values compare case-insensitively; a dimension that is absent places no
/// restriction on that dimension.
class ContextTags {
 public:
  using ValueSet = std::set<std::string, FoldedLess>;
  using Map = std::map<std::string, ValueSet, FoldedLess>;

  ContextTags() = default;

  void add(std::string_view dimension, std::string_view value) {
    std::string v = trim(value);
    if (v.empty()) throw InputError("empty value for context dimension '" + std::string(dimension) + "'");
    dims_[trim(dimension)].insert(std::move(v));
  }

  bool empty() const noexcept { return dims_.empty(); }
  std::size_t size() const noexcept { return dims_.size(); }
  const Map& dimensions() const noexcept { return dims_; }

  bool has(std::string_view dimension) const { return dims_.find(dimension) != dims_.end(); }

  const ValueSet* values(std::string_view dimension) const {
    auto it = dims_.find(dimension);
    return it == dims_.end() ? nullptr : &it->second;
  }

  bool contains(std::string_view dimension, std::string_view value) const {
    const ValueSet* vs = values(dimension);
    return vs != nullptr && vs->find(value) != vs->end();
  }

  /// True when an element carrying these tags may be used under `context`:
  /// every tagged dimension must be specified by the context with at least
  /// one shared value.
  bool applicable_under(const ContextTags& context) const {
    for (const auto& [dim, vals] : dims_) {
      const ValueSet* wanted = context.values(dim);
      if (wanted == nullptr) return false;
      bool shared = false;
      for (const auto& v : vals) {
        if (wanted->count(v) != 0) {
          shared = true;
          break;
        }
      }
      if (!shared) return false;
    }
    return true;
  }

  friend bool operator==(const ContextTags& a, const ContextTags& b) {
    if (a.dims_.size() != b.dims_.size()) return false;
    for (const auto& [dim, vals] : a.dims_) {
      const ValueSet* other = b.values(dim);
      if (other == nullptr || other->size() != vals.size()) return false;
      for (const auto& v : vals) {
        if (other->count(v) == 0) return false;
      }
    }
    return true;
  }

 private:
  Map dims_;
};

inline void to_json(nlohmann::json& j, const ContextTags& tags) {
  j = nlohmann::json::object();
  for (const auto& [dim, vals] : tags.dimensions()) {
    auto arr = nlohmann::json::array();
    for (const auto& v : vals) arr.push_back(v);
    j[dim] = std::move(arr);
  }
}

inline void from_json(const nlohmann::json& j, ContextTags& tags) {
  if (!j.is_object()) throw InputError("context tags must be an object of string arrays");
  ContextTags out;
  for (const auto& [dim, vals] : j.items()) {
    if (trim(dim).empty()) throw InputError("empty context dimension name");
    if (vals.is_string()) {
      out.add(dim, vals.get<std::string>());
      continue;
    }
    if (!vals.is_array() || vals.empty()) {
      throw InputError("context dimension '" + dim + "' needs a non-empty array of strings");
    }
    for (const auto& v : vals) {
      if (!v.is_string()) throw InputError("context dimension '" + dim + "' has a non-string value");
      out.add(dim, v.get<std::string>());
    }
  }
  tags = std::move(out);
}

}  // namespace qmadapt
