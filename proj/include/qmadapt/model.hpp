#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "qmadapt/elements.hpp"
#include "qmadapt/errors.hpp"
#include "qmadapt/fields.hpp"
#include "qmadapt/goal.hpp"

namespace qmadapt {

inline constexpr std::string_view kModelSchema = "qm-adapt/1";

struct ModelMeta {
  std::string name;
  std::string version;
  std::optional<AdaptationGoal> goal;
  nlohmann::json provenance = nlohmann::json::object();

  friend bool operator==(const ModelMeta&, const ModelMeta&) = default;
};

/// One inbound reference: element `from` points at the queried id via `field`.
struct InboundRef {
  ElementId from;
  std::string field;

  friend bool operator==(const InboundRef&, const InboundRef&) = default;
  friend auto operator<=>(const InboundRef&, const InboundRef&) = default;
};

/// A requested change of one field. `Add`/`Remove` apply to set- and
/// list-valued fields; scalars only support `Set`.
struct FieldChange {
  enum class Mode { Set, Add, Remove };

  Mode mode = Mode::Set;
  nlohmann::json value;

  static FieldChange set(nlohmann::json v) { return {Mode::Set, std::move(v)}; }
  static FieldChange add(nlohmann::json v) { return {Mode::Add, std::move(v)}; }
  static FieldChange remove(nlohmann::json v) { return {Mode::Remove, std::move(v)}; }
};

/// The typed element graph. Every mutating member either succeeds or throws
/// with the model unchanged; symmetric links are maintained on both ends.
class QualityModel {
 public:
  QualityModel() = default;

  static QualityModel create(std::string_view name) {
    if (trim(name).empty()) throw InputError("model name must not be empty");
    QualityModel m;
    m.meta_.name = trim(name);
    return m;
  }

  const ModelMeta& meta() const noexcept { return meta_; }
  ModelMeta& meta() noexcept { return meta_; }

  std::uint64_t next_id() const noexcept { return next_id_; }
  void set_next_id(std::uint64_t n) { next_id_ = std::max<std::uint64_t>(n, 1); }

  std::size_t size() const noexcept { return elements_.size(); }
  bool empty() const noexcept { return elements_.empty(); }
  const std::map<ElementId, Element>& elements() const noexcept { return elements_; }

  bool contains(const ElementId& id) const { return elements_.count(id) != 0; }

  std::optional<ElementKind> kind_of(const ElementId& id) const {
    auto it = elements_.find(id);
    if (it == elements_.end()) return std::nullopt;
    return qmadapt::kind_of(it->second);
  }

  const Element& at(const ElementId& id) const {
    auto it = elements_.find(id);
    if (it == elements_.end()) throw NotFoundError("no element '" + id.str() + "'");
    return it->second;
  }

  template <typename T>
  const T* find(const ElementId& id) const {
    auto it = elements_.find(id);
    if (it == elements_.end()) return nullptr;
    return std::get_if<T>(&it->second);
  }

  template <typename T>
  const T* find(const std::optional<ElementId>& id) const {
    return id ? find<T>(*id) : nullptr;
  }

  template <typename T>
  const T& get(const ElementId& id) const {
    const T* p = find<T>(id);
    if (p == nullptr) {
      throw NotFoundError("no " + std::string(kind_name(kind_of_v<T>)) + " '" + id.str() + "'");
    }
    return *p;
  }

  /// Elements of one kind in ascending id order.
  template <typename T>
  std::vector<const T*> all() const {
    std::vector<const T*> out;
    for (const auto& [id, e] : elements_) {
      if (const T* p = std::get_if<T>(&e)) out.push_back(p);
    }
    return out;
  }

  std::size_t count(ElementKind kind) const {
    return static_cast<std::size_t>(std::count_if(elements_.begin(), elements_.end(), [&](const auto& kv) {
      return qmadapt::kind_of(kv.second) == kind;
    }));
  }

  /// Id the next generated insert would receive.
  ElementId peek_id(ElementKind kind) const {
    std::uint64_t n = next_id_;
    while (contains(generate_id(kind, n))) ++n;
    return generate_id(kind, n);
  }

  /// Adds an element built from a field map. `payload` may carry an explicit
  /// unused `id`; otherwise a fresh id is generated.
  ElementId insert(ElementKind kind, const nlohmann::json& payload) {
    if (!payload.is_object()) throw InputError("element payload must be an object");
    return transact([&] {
      ElementId id;
      if (payload.contains("id")) {
        id = payload.at("id").get<ElementId>();
        if (id.empty()) throw InputError("element id must not be empty");
        if (contains(id)) throw IntegrityError("element id '" + id.str() + "' already exists");
      } else {
        while (contains(generate_id(kind, next_id_))) ++next_id_;
        id = generate_id(kind, next_id_++);
      }
      Element e = make_element(kind, id);
      std::vector<std::pair<const FieldDesc*, IdList>> links;
      for (const auto& [key, value] : payload.items()) {
        if (key == "id") continue;
        const FieldDesc& desc = field_of(kind, key);
        if (!desc.writable) throw InputError("field '" + key + "' is derived and cannot be set");
        if (desc.is_ref()) {
          Element probe = make_element(kind, id);
          desc.set(probe, value);  // cardinality and shape check
          IdList targets = desc.refs(probe);
          check_targets(id, desc, targets);
          links.emplace_back(&desc, std::move(targets));
        } else {
          desc.set(e, value);
        }
      }
      journal_put(id, std::move(e));
      for (const auto& [desc, targets] : links) {
        for (const auto& t : targets) connect(id, *desc, t);
      }
      finish_change();
      return id;
    });
  }

  /// Removes an element that nothing references any more.
  void remove(const ElementId& id) {
    if (!contains(id)) throw NotFoundError("no element '" + id.str() + "'");
    auto refs = references_to(id);
    if (!refs.empty()) {
      std::vector<std::string> names;
      std::string msg = "cannot delete '" + id.str() + "': still referenced by";
      for (const auto& r : refs) {
        names.push_back(r.from.str() + "." + r.field);
        msg += " " + names.back();
      }
      throw BlockedDeleteError(msg, std::move(names));
    }
    transact([&] {
      journal_touch(id);
      elements_.erase(id);
      return 0;
    });
  }

  void update(const ElementId& id, std::string_view field, const FieldChange& change) {
    auto found = kind_of(id);
    if (!found) throw NotFoundError("no element '" + id.str() + "'");
    ElementKind kind = *found;
    const FieldDesc& desc = field_of(kind, field);
    if (!desc.writable) throw InputError("field '" + std::string(field) + "' is derived and cannot be set");
    transact([&] {
      if (desc.is_ref()) {
        update_refs(id, desc, change);
      } else {
        nlohmann::json value = change.value;
        if (change.mode != FieldChange::Mode::Set) {
          if (desc.type != FieldType::Names) {
            throw InputError("field '" + std::string(field) + "' only supports replacement");
          }
          value = merge_names(desc.get(elements_.at(id)), change);
        }
        desc.set(mut(id), value);
      }
      finish_change();
      return 0;
    });
  }

  /// Clears every detachable inbound reference to `id` (set/list members and
  /// optional links). Returns the references that were cleared. Required
  /// references must have been removed beforehand by cascading deletes.
  /// Only the referrers change; `id` keeps its own links until it is removed.
  std::vector<InboundRef> detach(const ElementId& id) {
    auto refs = references_to(id);
    transact([&] {
      for (const auto& r : refs) {
        if (!contains(r.from)) continue;
        const FieldDesc& desc = field_of(*kind_of(r.from), r.field);
        if (desc.card == Card::One || (desc.required_unless_stub && !is_stub(elements_.at(r.from)))) {
          throw std::logic_error("required reference " + r.from.str() + "." + r.field + " -> " + id.str() +
                                 " must be cascaded before detaching");
        }
        remove_ref(mut(r.from), desc, id);
      }
      finish_change();
      return 0;
    });
    return refs;
  }

  /// Complete inbound reference list, ordered by referrer id then field.
  std::vector<InboundRef> references_to(const ElementId& id) const {
    if (!contains(id)) throw NotFoundError("no element '" + id.str() + "'");
    std::vector<InboundRef> out;
    for (const auto& [from, e] : elements_) {
      if (from == id) continue;
      for (const auto& f : fields_of(qmadapt::kind_of(e))) {
        if (!f.is_ref()) continue;
        IdList refs = f.refs(e);
        if (std::find(refs.begin(), refs.end(), id) != refs.end()) out.push_back({from, std::string(f.name)});
      }
    }
    return out;
  }

  /// Depth-first pre-order listing of a quality aspect or entity type tree.
  std::vector<ElementId> subtree(const ElementId& root) const {
    auto kind = kind_of(root);
    if (!kind) throw NotFoundError("no element '" + root.str() + "'");
    if (*kind != ElementKind::QualityAspect && *kind != ElementKind::EntityType) {
      throw KindError("subtree needs a QualityAspect or EntityType, got " + std::string(kind_name(*kind)));
    }
    std::vector<ElementId> out;
    std::set<ElementId> seen;
    std::vector<ElementId> stack{root};
    while (!stack.empty()) {
      ElementId cur = stack.back();
      stack.pop_back();
      if (!seen.insert(cur).second || !contains(cur)) continue;
      out.push_back(cur);
      const IdList& kids = children_of(cur);
      for (auto it = kids.rbegin(); it != kids.rend(); ++it) stack.push_back(*it);
    }
    return out;
  }

  const IdList& children_of(const ElementId& id) const {
    static const IdList kNone;
    const Element& e = at(id);
    if (const auto* qa = std::get_if<QualityAspect>(&e)) return qa->refinedBy;
    if (const auto* et = std::get_if<EntityType>(&e)) return et->children;
    return kNone;
  }

  /// Viewpoints declared on the aspect or, failing that, its nearest ancestor.
  NameSet effective_viewpoints(const ElementId& aspect) const {
    std::set<ElementId> seen;
    const QualityAspect* cur = find<QualityAspect>(aspect);
    while (cur != nullptr && seen.insert(cur->id).second) {
      if (!cur->viewpoints.empty()) return cur->viewpoints;
      cur = find<QualityAspect>(cur->parent);
    }
    return {};
  }

  /// Inserts an element verbatim, with no link maintenance or checks. Meant
  /// for loaders and for building deliberately broken fixtures.
  void insert_raw(Element e) {
    ElementId id = id_of(e);
    if (id.empty()) throw InputError("element without id");
    if (!elements_.emplace(id, std::move(e)).second) {
      throw InputError("duplicate element id '" + id.str() + "'");
    }
  }

  /// Recomputes the derived `artifactRoot` of every entity type.
  void refresh_artifact_roots() {
    for (auto& [id, e] : elements_) {
      if (auto* et = std::get_if<EntityType>(&e)) et->artifactRoot = artifact_root_name(id);
    }
  }

  /// Content equality. The id allocator is not part of the model value.
  friend bool operator==(const QualityModel& a, const QualityModel& b) {
    return a.meta_ == b.meta_ && a.elements_ == b.elements_;
  }

 private:
  using Journal = std::map<ElementId, std::optional<Element>>;

  static ElementId generate_id(ElementKind kind, std::uint64_t n) {
    return ElementId(std::string(id_prefix(kind)) + "-" + std::to_string(n));
  }

  template <typename F>
  auto transact(F&& f) -> decltype(f()) {
    if (journal_ != nullptr) return f();  // nested: the outer transaction owns rollback
    Journal journal;
    std::uint64_t saved_next = next_id_;
    journal_ = &journal;
    try {
      auto result = f();
      journal_ = nullptr;
      return result;
    } catch (...) {
      for (auto& [id, original] : journal) {
        if (original) {
          elements_.insert_or_assign(id, std::move(*original));
        } else {
          elements_.erase(id);
        }
      }
      next_id_ = saved_next;
      journal_ = nullptr;
      throw;
    }
  }

  void journal_touch(const ElementId& id) {
    if (journal_ == nullptr || journal_->count(id) != 0) return;
    auto it = elements_.find(id);
    journal_->emplace(id, it == elements_.end() ? std::nullopt : std::optional<Element>(it->second));
  }

  void journal_put(const ElementId& id, Element e) {
    journal_touch(id);
    elements_.insert_or_assign(id, std::move(e));
  }

  Element& mut(const ElementId& id) {
    journal_touch(id);
    auto it = elements_.find(id);
    if (it == elements_.end()) throw NotFoundError("no element '" + id.str() + "'");
    return it->second;
  }

  void check_targets(const ElementId& self, const FieldDesc& desc, const IdList& targets) const {
    for (const auto& t : targets) {
      auto k = kind_of(t);
      if (!k) throw IntegrityError("field '" + std::string(desc.name) + "' references missing element '" + t.str() + "'");
      if (!desc.accepts(*k)) {
        throw KindError("field '" + std::string(desc.name) + "' cannot reference " + std::string(kind_name(*k)) +
                        " '" + t.str() + "'");
      }
      if (t == self) throw IntegrityError("element '" + self.str() + "' cannot reference itself");
    }
  }

  static void add_ref(Element& e, const FieldDesc& desc, const ElementId& target) {
    IdList refs = desc.refs(e);
    if (desc.single()) {
      desc.set_refs(e, {target});
      return;
    }
    if (std::find(refs.begin(), refs.end(), target) == refs.end()) refs.push_back(target);
    desc.set_refs(e, refs);
  }

  static void remove_ref(Element& e, const FieldDesc& desc, const ElementId& target) {
    IdList refs = desc.refs(e);
    refs.erase(std::remove(refs.begin(), refs.end(), target), refs.end());
    desc.set_refs(e, refs);
  }

  void connect(const ElementId& a, const FieldDesc& fa, const ElementId& b) {
    if (fa.single()) {
      IdList cur = fa.refs(elements_.at(a));
      if (!cur.empty() && cur.front() != b) disconnect(a, fa, cur.front());
    }
    add_ref(mut(a), fa, b);
    if (fa.inverse.empty()) return;
    const FieldDesc& fb = field_of(*kind_of(b), fa.inverse);
    if (fb.single()) {
      IdList cur = fb.refs(elements_.at(b));
      if (!cur.empty() && cur.front() != a) disconnect(b, fb, cur.front());
    }
    add_ref(mut(b), fb, a);
  }

  void disconnect(const ElementId& a, const FieldDesc& fa, const ElementId& b) {
    remove_ref(mut(a), fa, b);
    if (fa.inverse.empty() || !contains(b)) return;
    remove_ref(mut(b), field_of(*kind_of(b), fa.inverse), a);
  }

  static nlohmann::json merge_names(const nlohmann::json& current, const FieldChange& change) {
    nlohmann::json items = change.value.is_array() ? change.value : nlohmann::json::array({change.value});
    nlohmann::json out = nlohmann::json::array();
    for (const auto& c : current) {
      bool drop = change.mode == FieldChange::Mode::Remove &&
                  std::any_of(items.begin(), items.end(), [&](const auto& x) {
                    return x.is_string() && same_name(x.template get<std::string>(), c.template get<std::string>());
                  });
      if (!drop) out.push_back(c);
    }
    if (change.mode == FieldChange::Mode::Add) {
      for (const auto& x : items) out.push_back(x);
    }
    return out;
  }

  void update_refs(const ElementId& id, const FieldDesc& desc, const FieldChange& change) {
    IdList current = desc.refs(elements_.at(id));
    IdList given = detail::expect_ids(change.value, desc.name);
    IdList wanted;
    switch (change.mode) {
      case FieldChange::Mode::Set:
        wanted = given;
        break;
      case FieldChange::Mode::Add:
        if (desc.single()) throw InputError("field '" + std::string(desc.name) + "' holds one id; use set");
        wanted = current;
        for (const auto& g : given) {
          if (std::find(wanted.begin(), wanted.end(), g) == wanted.end()) wanted.push_back(g);
        }
        break;
      case FieldChange::Mode::Remove:
        wanted = current;
        for (const auto& g : given) wanted.erase(std::remove(wanted.begin(), wanted.end(), g), wanted.end());
        break;
    }
    if (desc.single() && wanted.size() > 1) {
      throw InputError("field '" + std::string(desc.name) + "' takes at most one id");
    }
    {
      IdList dedup;
      for (const auto& w : wanted) {
        if (std::find(dedup.begin(), dedup.end(), w) == dedup.end()) dedup.push_back(w);
      }
      wanted = std::move(dedup);
    }
    check_targets(id, desc, wanted);
    for (const auto& c : current) {
      if (std::find(wanted.begin(), wanted.end(), c) == wanted.end()) disconnect(id, desc, c);
    }
    for (const auto& w : wanted) {
      if (std::find(current.begin(), current.end(), w) == current.end()) connect(id, desc, w);
    }
    if (desc.card == Card::List && change.mode == FieldChange::Mode::Set && desc.refs(elements_.at(id)) != wanted) {
      desc.set_refs(mut(id), wanted);
    }
  }

  std::string artifact_root_name(const ElementId& id) const {
    std::set<ElementId> seen;
    const EntityType* cur = find<EntityType>(id);
    while (cur != nullptr && cur->parent && seen.insert(cur->id).second) {
      const EntityType* up = find<EntityType>(*cur->parent);
      if (up == nullptr) break;
      cur = up;
    }
    return cur == nullptr ? std::string() : cur->name;
  }

  // Post-mutation checks over the elements touched in this transaction.
  void finish_change() {
    if (journal_ == nullptr) return;
    std::vector<ElementId> touched;
    for (const auto& [id, original] : *journal_) {
      if (contains(id)) touched.push_back(id);
    }
    std::set<ElementId> et_roots;
    for (const auto& id : touched) {
      const Element& e = elements_.at(id);
      ElementKind kind = qmadapt::kind_of(e);
      for (const auto& f : fields_of(kind)) {
        if (!f.is_ref()) continue;
        bool required = f.card == Card::One || (f.required_unless_stub && !is_stub(e));
        if (required && f.refs(e).empty()) {
          throw IntegrityError(std::string(kind_name(kind)) + " '" + id.str() + "' requires a " +
                               std::string(f.name) + " reference");
        }
      }
      if (kind == ElementKind::QualityAspect || kind == ElementKind::EntityType) {
        std::set<ElementId> seen{id};
        ElementId cur = id;
        while (true) {
          const Element& ce = elements_.at(cur);
          std::optional<ElementId> parent = kind == ElementKind::QualityAspect
                                                ? std::get<QualityAspect>(ce).parent
                                                : std::get<EntityType>(ce).parent;
          if (!parent || !contains(*parent)) break;
          if (!seen.insert(*parent).second) {
            throw IntegrityError("hierarchy cycle through '" + id.str() + "'");
          }
          cur = *parent;
        }
        if (kind == ElementKind::EntityType) et_roots.insert(cur);
      }
      if (const auto* qae = std::get_if<QualityAspectEvaluation>(&e)) check_considers(*qae);
    }
    for (const auto& root : et_roots) {
      const std::string& root_name = std::get<EntityType>(elements_.at(root)).name;
      for (const auto& member : subtree(root)) {
        if (std::get<EntityType>(elements_.at(member)).artifactRoot != root_name) {
          std::get<EntityType>(mut(member)).artifactRoot = root_name;
        }
      }
    }
  }

  void check_considers(const QualityAspectEvaluation& qae) const {
    if (qae.considers.empty()) return;
    const auto* aspect = find<QualityAspect>(qae.qualityAspect);
    if (aspect == nullptr) return;
    for (const auto& c : qae.considers) {
      if (journal_ != nullptr && journal_->count(qae.id) != 0) {
        const auto& original = journal_->at(qae.id);
        // Only newly introduced entries are checked; stale ones are reported by validation.
        if (original) {
          const auto* before = std::get_if<QualityAspectEvaluation>(&*original);
          if (before != nullptr && before->considers.count(c) != 0) continue;
        }
      }
      bool allowed = false;
      if (const auto* ie = find<ImpactEvaluation>(c)) {
        allowed = aspect->influencedBy.count(ie->impact) != 0;
      } else if (const auto* sub = find<QualityAspectEvaluation>(c)) {
        const auto* sub_aspect = find<QualityAspect>(sub->qualityAspect);
        allowed = sub_aspect != nullptr && sub_aspect->parent == aspect->id;
      }
      if (!allowed) {
        throw IntegrityError("aspect evaluation '" + qae.id.str() + "' cannot consider '" + c.str() +
                             "': only evaluations of influencing impacts and direct sub-aspects");
      }
    }
  }

  std::map<ElementId, Element> elements_;
  ModelMeta meta_;
  std::uint64_t next_id_ = 1;
  Journal* journal_ = nullptr;
};

// Free-function forms returning the successor state.

inline std::pair<QualityModel, ElementId> insert_element(QualityModel model, ElementKind kind,
                                                         const nlohmann::json& payload) {
  ElementId id = model.insert(kind, payload);
  return {std::move(model), std::move(id)};
}

inline QualityModel remove_element(QualityModel model, const ElementId& id) {
  model.remove(id);
  return model;
}

inline QualityModel update_element(QualityModel model, const ElementId& id, std::string_view field,
                                   const FieldChange& change) {
  model.update(id, field, change);
  return model;
}

}  // namespace qmadapt
