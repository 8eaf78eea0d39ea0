#pragma once

// Grammar of the MISC "Entity=" value. A value is a concatenation of
// bracket events:
//   open    "(" eid ["[" i "/" n "]"] ["-" etype ["-" head ["-" other]]]
//   single  open immediately followed by ")"
//   close   eid ["[" i "/" n "]"] ")"
// "other" keeps everything after the third hyphen verbatim.

#include <algorithm>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "corefeval/model.hpp"

namespace corefeval {

struct PartIndex {
  int index = 1;
  int count = 1;
  friend bool operator==(const PartIndex&, const PartIndex&) = default;
};

struct EntityEvent {
  enum class Kind { open, close, single };
  Kind kind = Kind::open;
  std::string eid;
  std::optional<PartIndex> part;
  MentionAttrs attrs;  // open and single only

  friend bool operator==(const EntityEvent&, const EntityEvent&) = default;
};

struct MarkupParse {
  std::vector<EntityEvent> events;
  std::string error;  // empty on success
  bool ok() const { return error.empty(); }
};

namespace detail {

inline bool parse_positive(std::string_view s, int& out) {
  if (s.empty() || s.size() > 6) return false;
  out = 0;
  for (char c : s) {
    if (c < '0' || c > '9') return false;
    out = out * 10 + (c - '0');
  }
  return out > 0;
}

/// Splits "eid[i/n]" into its pieces.
inline bool split_eid(std::string_view text, std::string& eid, std::optional<PartIndex>& part) {
  part.reset();
  const auto bracket = text.find('[');
  if (bracket == std::string_view::npos) {
    eid = std::string(text);
    return !eid.empty();
  }
  if (text.back() != ']') return false;
  const auto inner = text.substr(bracket + 1, text.size() - bracket - 2);
  const auto slash = inner.find('/');
  if (slash == std::string_view::npos) return false;
  PartIndex p;
  if (!parse_positive(inner.substr(0, slash), p.index) || !parse_positive(inner.substr(slash + 1), p.count))
    return false;
  if (p.index > p.count) return false;
  eid = std::string(text.substr(0, bracket));
  part = p;
  return !eid.empty();
}

}  // namespace detail

inline MarkupParse parse_entity_value(std::string_view value) {
  MarkupParse out;
  std::size_t i = 0;
  while (i < value.size()) {
    EntityEvent ev;
    if (value[i] == '(') {
      const auto end = value.find_first_of("()", i + 1);
      const auto body = value.substr(i + 1, (end == std::string_view::npos ? value.size() : end) - i - 1);
      if (end != std::string_view::npos && value[end] == ')') {
        ev.kind = EntityEvent::Kind::single;
        i = end + 1;
      } else {
        ev.kind = EntityEvent::Kind::open;
        i = end == std::string_view::npos ? value.size() : end;
      }
      const auto dash = body.find('-');
      if (!detail::split_eid(body.substr(0, dash), ev.eid, ev.part)) {
        out.error = "malformed entity id in '" + std::string(body) + "'";
        return out;
      }
      if (dash != std::string_view::npos) {
        auto rest = body.substr(dash + 1);
        ev.attrs.fields = 1;
        auto next = rest.find('-');
        ev.attrs.etype = std::string(rest.substr(0, next));
        if (next != std::string_view::npos) {
          rest = rest.substr(next + 1);
          ev.attrs.fields = 2;
          next = rest.find('-');
          ev.attrs.head = std::string(rest.substr(0, next));
          if (next != std::string_view::npos) {
            ev.attrs.fields = 3;
            ev.attrs.other = std::string(rest.substr(next + 1));
          }
        }
      }
    } else {
      const auto end = value.find_first_of("()", i);
      if (end == std::string_view::npos || value[end] != ')') {
        out.error = "unterminated closing bracket in '" + std::string(value.substr(i)) + "'";
        return out;
      }
      ev.kind = EntityEvent::Kind::close;
      if (!detail::split_eid(value.substr(i, end - i), ev.eid, ev.part)) {
        out.error = "malformed entity id in '" + std::string(value.substr(i, end - i)) + "'";
        return out;
      }
      i = end + 1;
    }
    out.events.push_back(std::move(ev));
  }
  return out;
}

inline std::string render_attrs(const MentionAttrs& attrs) {
  std::string out;
  if (attrs.fields >= 1) out += "-" + attrs.etype;
  if (attrs.fields >= 2) out += "-" + attrs.head;
  if (attrs.fields >= 3) out += "-" + attrs.other;
  return out;
}

inline std::string render_event(const EntityEvent& ev) {
  std::string id = ev.eid;
  if (ev.part) id += "[" + std::to_string(ev.part->index) + "/" + std::to_string(ev.part->count) + "]";
  switch (ev.kind) {
    case EntityEvent::Kind::open:
      return "(" + id + render_attrs(ev.attrs);
    case EntityEvent::Kind::single:
      return "(" + id + render_attrs(ev.attrs) + ")";
    case EntityEvent::Kind::close:
      return id + ")";
  }
  return {};
}

/// Concatenates events. An unterminated open directly followed by a close
/// would read back as one token, so closes are hoisted to the front when
/// that adjacency occurs.
inline std::string render_entity_value(std::vector<EntityEvent> events) {
  bool ambiguous = false;
  for (std::size_t i = 0; i + 1 < events.size(); ++i)
    if (events[i].kind == EntityEvent::Kind::open && events[i + 1].kind == EntityEvent::Kind::close)
      ambiguous = true;
  if (ambiguous)
    std::stable_partition(events.begin(), events.end(),
                          [](const EntityEvent& e) { return e.kind == EntityEvent::Kind::close; });
  std::string out;
  for (const auto& ev : events) out += render_event(ev);
  return out;
}

}  // namespace corefeval
