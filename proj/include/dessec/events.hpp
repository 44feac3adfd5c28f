#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "dessec/errors.hpp"

namespace dessec {

using EventId = std::uint32_t;
using Trace = std::vector<std::string>;
using EventSet = std::set<std::string>;

/// Where an event comes from. Everything except `genuine` is produced by the
/// attack-model builders or the verifier renaming and carries a name suffix.
enum class EventKind : std::uint8_t {
  genuine,
  ae_attacked,  // sigma#a
  se_erased,    // sigma#e
  si_onset,     // sigma#i
  renamed,      // sigma#r
};

struct EventAttrs {
  bool observable = true;
  bool controllable = true;
  bool vulnerable = false;
  EventKind kind = EventKind::genuine;

  /// Equality on the physical attributes; `vulnerable` describes the attack
  /// scenario and is not compared.
  bool compatible_with(const EventAttrs& other) const noexcept {
    return observable == other.observable &&
           controllable == other.controllable && kind == other.kind;
  }
};

inline constexpr char artifact_separator = '#';

inline std::string_view kind_suffix(EventKind kind) noexcept {
  switch (kind) {
    case EventKind::ae_attacked: return "a";
    case EventKind::se_erased: return "e";
    case EventKind::si_onset: return "i";
    case EventKind::renamed: return "r";
    case EventKind::genuine: break;
  }
  return "";
}

inline std::string_view kind_name(EventKind kind) noexcept {
  switch (kind) {
    case EventKind::genuine: return "genuine";
    case EventKind::ae_attacked: return "ae-attacked";
    case EventKind::se_erased: return "se-erased";
    case EventKind::si_onset: return "si-onset";
    case EventKind::renamed: return "renamed";
  }
  return "genuine";
}

inline std::optional<EventKind> parse_kind(std::string_view text) noexcept {
  for (auto k : {EventKind::genuine, EventKind::ae_attacked,
                 EventKind::se_erased, EventKind::si_onset,
                 EventKind::renamed}) {
    if (kind_name(k) == text) return k;
  }
  return std::nullopt;
}

/// `artifact_name("b", EventKind::ae_attacked) == "b#a"`.
inline std::string artifact_name(std::string_view base, EventKind kind) {
  if (kind == EventKind::genuine) return std::string(base);
  std::string out(base);
  out += artifact_separator;
  out += kind_suffix(kind);
  return out;
}

/// Kind encoded in the name's suffix; `genuine` when there is none.
inline EventKind kind_from_name(std::string_view name) noexcept {
  auto pos = name.rfind(artifact_separator);
  if (pos == std::string_view::npos || pos + 2 != name.size()) {
    return EventKind::genuine;
  }
  switch (name[pos + 1]) {
    case 'a': return EventKind::ae_attacked;
    case 'e': return EventKind::se_erased;
    case 'i': return EventKind::si_onset;
    case 'r': return EventKind::renamed;
    default: return EventKind::genuine;
  }
}

/// Strips an artifact suffix: `base_event("b#a") == "b"`.
inline std::string base_event(std::string_view name) {
  if (kind_from_name(name) == EventKind::genuine) return std::string(name);
  return std::string(name.substr(0, name.size() - 2));
}

/// True when a user-supplied name would collide with builder-generated ones.
inline bool has_reserved_suffix(std::string_view name) noexcept {
  return kind_from_name(name) != EventKind::genuine;
}

/// Ordered event table. Ids are assigned in insertion order.
class Alphabet {
public:
  /// Adds `name`, or checks compatibility when it is already present.
  EventId add(const std::string& name, const EventAttrs& attrs) {
    if (auto it = index_.find(name); it != index_.end()) {
      EventAttrs& mine = attrs_[it->second];
      if (!mine.compatible_with(attrs)) {
        throw AttributeConflictError("conflicting attributes for event '" +
                                     name + "'");
      }
      mine.vulnerable = mine.vulnerable || attrs.vulnerable;
      return it->second;
    }
    auto id = static_cast<EventId>(names_.size());
    names_.push_back(name);
    attrs_.push_back(attrs);
    index_.emplace(name, id);
    return id;
  }

  std::optional<EventId> find(std::string_view name) const {
    auto it = index_.find(std::string(name));
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  EventId id(std::string_view name) const {
    if (auto id = find(name)) return *id;
    throw LookupError("unknown event '" + std::string(name) + "'");
  }

  bool contains(std::string_view name) const { return find(name).has_value(); }

  std::size_t size() const noexcept { return names_.size(); }
  const std::string& name(EventId e) const { return names_.at(e); }
  const EventAttrs& attrs(EventId e) const { return attrs_.at(e); }
  const EventAttrs& attrs(std::string_view name) const {
    return attrs_[id(name)];
  }
  void set_vulnerable(EventId e, bool v) { attrs_.at(e).vulnerable = v; }

  const std::vector<std::string>& names() const noexcept { return names_; }

  template <typename Pred>
  EventSet select(Pred pred) const {
    EventSet out;
    for (std::size_t i = 0; i < names_.size(); ++i) {
      if (pred(attrs_[i])) out.insert(names_[i]);
    }
    return out;
  }

  EventSet all() const { return EventSet(names_.begin(), names_.end()); }
  EventSet observable() const {
    return select([](const EventAttrs& a) { return a.observable; });
  }
  EventSet unobservable() const {
    return select([](const EventAttrs& a) { return !a.observable; });
  }
  EventSet controllable() const {
    return select([](const EventAttrs& a) { return a.controllable; });
  }
  EventSet uncontrollable() const {
    return select([](const EventAttrs& a) { return !a.controllable; });
  }
  EventSet of_kind(EventKind k) const {
    return select([k](const EventAttrs& a) { return a.kind == k; });
  }

  bool operator==(const Alphabet& other) const {
    if (names_ != other.names_) return false;
    for (std::size_t i = 0; i < attrs_.size(); ++i) {
      const auto& a = attrs_[i];
      const auto& b = other.attrs_[i];
      if (!a.compatible_with(b) || a.vulnerable != b.vulnerable) return false;
    }
    return true;
  }

private:
  std::vector<std::string> names_;
  std::vector<EventAttrs> attrs_;
  std::unordered_map<std::string, EventId> index_;
};

/// Natural projection: erases events outside `observable`.
inline Trace project(const Trace& trace, const EventSet& observable) {
  Trace out;
  for (const auto& e : trace) {
    if (observable.count(e)) out.push_back(e);
  }
  return out;
}

}  // namespace dessec
