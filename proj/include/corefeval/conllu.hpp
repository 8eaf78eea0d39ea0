#pragma once

// CoNLL-U reader and writer with the CorefUD coreference layer, plus the
// validator, the multiword-token auto-fixer and the input-data stripper.
//
// Parsing never throws on bad data. Structural problems (column count, id
// sequence) stop the parse; everything else is collected as a Violation and
// the parser carries on with a best-effort model.

#include <algorithm>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <tuple>
#include <utility>
#include <vector>

#include "corefeval/entity_markup.hpp"
#include "corefeval/head.hpp"
#include "corefeval/model.hpp"

namespace corefeval {

enum class ViolationCode {
  column_count,
  bad_id,
  duplicate_id,
  id_sequence,
  bad_multiword,
  bad_head,
  bad_deps,
  unresolved_deps_head,
  bad_tree,
  entity_on_multiword,
  malformed_entity,
  close_without_open,
  unclosed_bracket,
  bad_part,
  duplicate_mention,
  head_mismatch,
  split_entity,
};

inline std::string_view to_string(ViolationCode code) {
  switch (code) {
    case ViolationCode::column_count: return "column-count";
    case ViolationCode::bad_id: return "bad-id";
    case ViolationCode::duplicate_id: return "duplicate-id";
    case ViolationCode::id_sequence: return "id-sequence";
    case ViolationCode::bad_multiword: return "bad-multiword";
    case ViolationCode::bad_head: return "bad-head";
    case ViolationCode::bad_deps: return "bad-deps";
    case ViolationCode::unresolved_deps_head: return "unresolved-deps-head";
    case ViolationCode::bad_tree: return "bad-tree";
    case ViolationCode::entity_on_multiword: return "entity-on-multiword";
    case ViolationCode::malformed_entity: return "malformed-entity";
    case ViolationCode::close_without_open: return "close-without-open";
    case ViolationCode::unclosed_bracket: return "unclosed-bracket";
    case ViolationCode::bad_part: return "bad-part";
    case ViolationCode::duplicate_mention: return "duplicate-mention";
    case ViolationCode::head_mismatch: return "head-mismatch";
    case ViolationCode::split_entity: return "split-entity";
  }
  return "unknown";
}

enum class Severity { error, warning };

struct Location {
  std::string doc_id;
  std::string sent_id;
  std::size_t line = 0;
};

struct Violation {
  ViolationCode code;
  Severity severity = Severity::error;
  Location location;
  std::string message;
  bool fixable = false;

  bool structural() const {
    return code == ViolationCode::column_count || code == ViolationCode::bad_id ||
           code == ViolationCode::duplicate_id || code == ViolationCode::id_sequence ||
           code == ViolationCode::bad_multiword;
  }

  std::string str() const {
    std::ostringstream os;
    os << "line " << location.line;
    if (!location.doc_id.empty()) os << " doc=" << location.doc_id;
    if (!location.sent_id.empty()) os << " sent=" << location.sent_id;
    os << " [" << (severity == Severity::error ? "error" : "warning") << "] " << to_string(code);
    if (fixable) os << " (fixable)";
    os << ": " << message;
    return os.str();
  }
};

inline bool has_errors(const std::vector<Violation>& violations) {
  return std::any_of(violations.begin(), violations.end(),
                     [](const Violation& v) { return v.severity == Severity::error; });
}

struct ParseResult {
  Corpus corpus;
  std::vector<Violation> violations;
  bool aborted = false;

  bool ok() const { return !aborted && !has_errors(violations); }
};

namespace detail {

inline std::vector<std::string_view> split_view(std::string_view text, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = text.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(text.substr(start));
      return out;
    }
    out.push_back(text.substr(start, pos - start));
    start = pos + 1;
  }
}

inline std::vector<std::string> split_misc(std::string_view misc) {
  std::vector<std::string> items;
  if (misc == "_" || misc.empty()) return items;
  for (auto item : split_view(misc, '|')) items.emplace_back(item);
  return items;
}

inline std::string join_misc(const std::vector<std::string>& items) {
  if (items.empty()) return "_";
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += '|';
    out += items[i];
  }
  return out;
}

inline bool is_entity_item(std::string_view item) { return item.rfind("Entity=", 0) == 0; }

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return std::string(s.substr(b, e - b + 1));
}

/// Value of "# key = value" comments, or nullopt.
inline std::optional<std::string> comment_value(std::string_view line, std::string_view key) {
  auto rest = line.substr(1);
  const auto b = rest.find_first_not_of(' ');
  if (b == std::string_view::npos) return std::nullopt;
  rest = rest.substr(b);
  if (rest.substr(0, key.size()) != key) return std::nullopt;
  rest = rest.substr(key.size());
  if (!rest.empty() && rest.front() != ' ' && rest.front() != '=') return std::nullopt;
  const auto eq = rest.find('=');
  if (eq == std::string_view::npos) return std::string{};
  return trim(rest.substr(eq + 1));
}

struct EventRecord {
  NodeRef node;
  std::vector<EntityEvent> events;
  std::size_t line = 0;
  std::string sent_id;
};

class CorpusParser {
 public:
  ParseResult run(std::string_view text) {
    if (text.substr(0, 3) == "\xEF\xBB\xBF") text.remove_prefix(3);
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos < text.size() && !result_.aborted) {
      auto end = text.find('\n', pos);
      if (end == std::string_view::npos) end = text.size();
      auto line = text.substr(pos, end - pos);
      if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
      pos = end + 1;
      ++line_no;
      handle_line(line, line_no);
    }
    if (!result_.aborted) {
      finish_sentence(line_no);
      finish_document(line_no);
    }
    return std::move(result_);
  }

 private:
  ParseResult result_;
  Document doc_;
  bool doc_open_ = false;
  Sentence sent_;
  std::vector<std::size_t> node_lines_;
  std::vector<EventRecord> events_;
  std::set<std::string> earlier_doc_eids_;
  int expected_word_ = 1;
  int last_empty_major_ = 0;
  int last_empty_minor_ = 0;
  int mwt_covered_until_ = 0;

  void report(ViolationCode code, std::size_t line, std::string message, bool fixable = false,
              Severity severity = Severity::error) {
    Violation v{code, severity, {doc_.id, sent_.sent_id, line}, std::move(message), fixable};
    if (v.structural()) result_.aborted = true;
    result_.violations.push_back(std::move(v));
  }

  void handle_line(std::string_view line, std::size_t line_no) {
    if (line.empty()) {
      finish_sentence(line_no);
      return;
    }
    if (line.front() == '#') {
      if (auto id = comment_value(line, "newdoc")) {
        finish_sentence(line_no);
        finish_document(line_no);
        doc_.id = *id;
        if (auto eq = comment_value(line, "newdoc id")) doc_.id = *eq;
        doc_open_ = true;
      }
      if (auto sid = comment_value(line, "sent_id")) sent_.sent_id = *sid;
      sent_.comments.emplace_back(line);
      return;
    }
    const auto cols = split_view(line, '\t');
    if (cols.size() != 10) {
      report(ViolationCode::column_count, line_no,
             "expected 10 tab-separated columns, found " + std::to_string(cols.size()));
      return;
    }
    const std::string_view id_col = cols[0];
    if (const auto dash = id_col.find('-'); dash != std::string_view::npos) {
      handle_multiword(cols, line_no, dash);
      return;
    }
    const auto id = NodeId::parse(id_col);
    if (!id) {
      report(ViolationCode::bad_id, line_no, "malformed id '" + std::string(id_col) + "'");
      return;
    }
    if (sent_.find(*id) != nullptr) {
      report(ViolationCode::duplicate_id, line_no, "duplicate id " + id->str());
      return;
    }
    if (id->is_empty()) {
      const int current_major = expected_word_ - 1;
      const int expected_minor = last_empty_major_ == current_major ? last_empty_minor_ + 1 : 1;
      if (id->major != current_major || id->minor != expected_minor) {
        report(ViolationCode::id_sequence, line_no,
               "empty node " + id->str() + " out of sequence (expected " +
                   NodeId{current_major, expected_minor}.str() + ")");
        return;
      }
      last_empty_major_ = id->major;
      last_empty_minor_ = id->minor;
    } else {
      if (id->major != expected_word_) {
        report(ViolationCode::id_sequence, line_no,
               "word id " + id->str() + " out of sequence (expected " + std::to_string(expected_word_) + ")");
        return;
      }
      ++expected_word_;
    }

    Node node;
    node.id = *id;
    node.form = std::string(cols[1]);
    node.lemma = std::string(cols[2]);
    node.upos = std::string(cols[3]);
    node.xpos = std::string(cols[4]);
    node.feats = std::string(cols[5]);
    node.deprel = std::string(cols[7]);
    if (id->is_empty()) {
      if (cols[6] != "_") report(ViolationCode::bad_head, line_no, "empty node " + id->str() + " has a basic HEAD");
    } else {
      int head = 0;
      bool ok = !cols[6].empty() && cols[6].size() < 9;
      for (char c : cols[6]) {
        if (c < '0' || c > '9') ok = false;
        else head = head * 10 + (c - '0');
      }
      if (!ok) report(ViolationCode::bad_head, line_no, "HEAD '" + std::string(cols[6]) + "' is not a number");
      else node.parent = head;
    }
    if (cols[8] != "_") {
      for (auto edge : split_view(cols[8], '|')) {
        const auto colon = edge.find(':');
        std::optional<NodeId> head;
        if (colon != std::string_view::npos) head = NodeId::parse(edge.substr(0, colon));
        if (!head || colon + 1 >= edge.size()) {
          report(ViolationCode::bad_deps, line_no, "malformed DEPS edge '" + std::string(edge) + "'");
          continue;
        }
        node.deps.push_back({*head, std::string(edge.substr(colon + 1))});
      }
    }
    auto items = split_misc(cols[9]);
    for (std::size_t i = 0; i < items.size(); ++i) {
      if (!is_entity_item(items[i])) continue;
      if (node.entity_slot) {
        report(ViolationCode::malformed_entity, line_no, "more than one Entity item in MISC");
        continue;
      }
      node.entity_slot = i;
      record_events(std::string_view(items[i]).substr(7), NodeRef{sentence_index(), *id}, line_no);
    }
    std::erase_if(items, [](const std::string& s) { return is_entity_item(s); });
    node.misc = std::move(items);
    sent_.nodes.push_back(std::move(node));
    node_lines_.push_back(line_no);
  }

  void handle_multiword(const std::vector<std::string_view>& cols, std::size_t line_no, std::size_t dash) {
    const auto first = NodeId::parse(cols[0].substr(0, dash));
    const auto last = NodeId::parse(cols[0].substr(dash + 1));
    if (!first || !last || first->is_empty() || last->is_empty() || last->major <= first->major) {
      report(ViolationCode::bad_multiword, line_no, "malformed multiword range '" + std::string(cols[0]) + "'");
      return;
    }
    if (first->major != expected_word_ || first->major <= mwt_covered_until_) {
      report(ViolationCode::bad_multiword, line_no,
             "multiword range '" + std::string(cols[0]) + "' does not start at the next word");
      return;
    }
    mwt_covered_until_ = last->major;
    MultiwordToken mwt;
    mwt.first = first->major;
    mwt.last = last->major;
    mwt.form = std::string(cols[1]);
    mwt.middle.assign(cols.begin() + 2, cols.begin() + 9);
    auto items = split_misc(cols[9]);
    for (const auto& item : items) {
      if (!is_entity_item(item)) continue;
      report(ViolationCode::entity_on_multiword, line_no,
             "Entity annotation on multiword token " + std::string(cols[0]), true);
      // Interpreted as if already moved to the first word.
      record_events(std::string_view(item).substr(7), NodeRef{sentence_index(), NodeId{first->major, 0}}, line_no);
    }
    std::erase_if(items, [](const std::string& s) { return is_entity_item(s); });
    mwt.misc = std::move(items);
    sent_.multiword_tokens.push_back(std::move(mwt));
  }

  int sentence_index() const { return static_cast<int>(doc_.sentences.size()); }

  void record_events(std::string_view value, NodeRef node, std::size_t line_no) {
    auto parsed = parse_entity_value(value);
    if (!parsed.ok()) {
      report(ViolationCode::malformed_entity, line_no, parsed.error);
      return;
    }
    if (parsed.events.empty()) return;
    if (!events_.empty() && events_.back().node == node) {
      auto& back = events_.back().events;
      back.insert(back.end(), parsed.events.begin(), parsed.events.end());
      return;
    }
    events_.push_back({node, std::move(parsed.events), line_no, sent_.sent_id});
  }

  void finish_sentence(std::size_t line_no) {
    if (sent_.nodes.empty()) {
      if (!sent_.multiword_tokens.empty())
        report(ViolationCode::bad_multiword, line_no, "multiword token without words");
      // Comment-only blocks are carried to the next sentence.
      return;
    }
    const int words = expected_word_ - 1;
    for (const auto& mwt : sent_.multiword_tokens)
      if (mwt.last > words)
        report(ViolationCode::bad_multiword, line_no,
               "multiword range " + std::to_string(mwt.first) + "-" + std::to_string(mwt.last) + " exceeds sentence");
    if (!result_.aborted) check_syntax();
    if (!doc_open_) doc_open_ = true;
    doc_.sentences.push_back(std::move(sent_));
    sent_ = Sentence{};
    node_lines_.clear();
    expected_word_ = 1;
    last_empty_major_ = last_empty_minor_ = 0;
    mwt_covered_until_ = 0;
  }

  void check_syntax() {
    const int words = expected_word_ - 1;
    std::size_t roots = 0;
    for (std::size_t i = 0; i < sent_.nodes.size(); ++i) {
      const auto& node = sent_.nodes[i];
      for (const auto& edge : node.deps)
        if (!edge.head.is_root() && sent_.find(edge.head) == nullptr)
          report(ViolationCode::unresolved_deps_head, node_lines_[i],
                 "DEPS head " + edge.head.str() + " of node " + node.id.str() + " does not exist");
      if (node.is_empty() || !node.parent) continue;
      if (*node.parent > words) {
        report(ViolationCode::bad_head, node_lines_[i], "HEAD " + std::to_string(*node.parent) + " out of range");
        sent_.nodes[i].parent.reset();
        continue;
      }
      if (*node.parent == 0) ++roots;
    }
    if (roots != 1) {
      report(ViolationCode::bad_tree, node_lines_.front(),
             "basic tree has " + std::to_string(roots) + " roots (expected 1)");
      return;
    }
    for (std::size_t i = 0; i < sent_.nodes.size(); ++i) {
      const auto& node = sent_.nodes[i];
      if (node.is_empty() || !node.parent) continue;
      int cur = *node.parent;
      for (int step = 0; cur != 0 && step <= words; ++step) {
        const Node* p = sent_.find(NodeId{cur, 0});
        if (p == nullptr || !p->parent) break;
        cur = *p->parent;
        if (cur == node.id.major) {
          report(ViolationCode::bad_tree, node_lines_[i], "basic tree has a cycle through " + node.id.str());
          return;
        }
      }
    }
  }

  struct OpenBracket {
    std::size_t position;
    MentionAttrs attrs;
    std::size_t line;
    std::string sent_id;
  };

  struct PendingGroup {
    int count = 0;
    std::map<int, Part> parts;
    MentionAttrs attrs;
    bool has_attrs = false;
    std::size_t line = 0;
  };

  void finish_document(std::size_t line_no) {
    if (!doc_open_ && doc_.sentences.empty()) return;
    build_entities(line_no);
    for (const auto& e : doc_.entities) {
      if (earlier_doc_eids_.count(e.id))
        report(ViolationCode::split_entity, line_no,
               "entity " + e.id + " also occurs in an earlier document; split at the document boundary", false,
               Severity::warning);
    }
    for (const auto& e : doc_.entities) earlier_doc_eids_.insert(e.id);
    result_.corpus.documents.push_back(std::move(doc_));
    doc_ = Document{};
    doc_open_ = false;
    events_.clear();
  }

  void build_entities(std::size_t line_no) {
    const auto sequence = doc_.node_sequence();
    std::map<NodeRef, std::size_t> position;
    for (std::size_t i = 0; i < sequence.size(); ++i) position[sequence[i]] = i;

    std::map<std::string, std::vector<OpenBracket>> open;  // key: eid plus part tag
    std::map<std::string, PendingGroup> groups;
    std::vector<std::string> order;  // entity ids by first appearance
    std::map<std::string, std::vector<std::pair<Mention, std::size_t>>> mentions;

    auto touch = [&](const std::string& eid) {
      if (!mentions.count(eid)) {
        order.push_back(eid);
        mentions[eid];
      }
    };
    auto saved_sent = sent_.sent_id;
    auto emit = [&](const std::string& eid, std::vector<Part> parts, const MentionAttrs& attrs, std::size_t line) {
      Mention m;
      for (const auto& part : parts)
        for (std::size_t p = position.at(part.first); p <= position.at(part.last); ++p) m.nodes.push_back(sequence[p]);
      std::sort(m.nodes.begin(), m.nodes.end());
      m.nodes.erase(std::unique(m.nodes.begin(), m.nodes.end()), m.nodes.end());
      m.parts = std::move(parts);
      m.attrs = attrs;
      m.head = derive_head(doc_, m.nodes);
      touch(eid);
      mentions[eid].emplace_back(std::move(m), line);
    };
    auto close_part = [&](const EntityEvent& ev, Part part, const MentionAttrs& attrs, std::size_t line) {
      if (!ev.part) {
        emit(ev.eid, {part}, attrs, line);
        return;
      }
      auto& g = groups[ev.eid];
      if (g.count != 0 && (g.count != ev.part->count || g.parts.count(ev.part->index))) {
        report(ViolationCode::bad_part, line, "inconsistent discontinuous parts for " + ev.eid);
        g = PendingGroup{};
      }
      if (g.count == 0) g.line = line;
      g.count = ev.part->count;
      g.parts[ev.part->index] = part;
      if (!g.has_attrs && (ev.part->index == 1 || attrs.fields > 0)) {
        g.attrs = attrs;
        g.has_attrs = true;
      }
      if (static_cast<int>(g.parts.size()) == g.count) {
        std::vector<Part> parts;
        for (auto& [idx, p] : g.parts) parts.push_back(p);
        std::sort(parts.begin(), parts.end());
        emit(ev.eid, std::move(parts), g.attrs, g.line);
        groups.erase(ev.eid);
      }
    };

    for (const auto& rec : events_) {
      const auto it = position.find(rec.node);
      if (it == position.end()) continue;
      sent_.sent_id = rec.sent_id;
      for (const auto& ev : rec.events) {
        std::string key = ev.eid;
        if (ev.part) key += "[" + std::to_string(ev.part->index) + "/" + std::to_string(ev.part->count) + "]";
        switch (ev.kind) {
          case EntityEvent::Kind::open:
            touch(ev.eid);
            open[key].push_back({it->second, ev.attrs, rec.line, rec.sent_id});
            break;
          case EntityEvent::Kind::single:
            touch(ev.eid);
            close_part(ev, Part{rec.node, rec.node}, ev.attrs, rec.line);
            break;
          case EntityEvent::Kind::close: {
            auto& stack = open[key];
            if (stack.empty()) {
              report(ViolationCode::close_without_open, rec.line, "closing bracket for " + key + " without an opening one");
              break;
            }
            const auto o = stack.back();
            stack.pop_back();
            close_part(ev, Part{sequence[o.position], rec.node}, o.attrs, o.line);
            break;
          }
        }
      }
    }
    for (const auto& [key, stack] : open)
      for (const auto& o : stack) {
        sent_.sent_id = o.sent_id;
        report(ViolationCode::unclosed_bracket, o.line, "bracket for " + key + " is never closed in document");
      }
    for (const auto& [eid, g] : groups)
      report(ViolationCode::bad_part, g.line,
             "discontinuous mention of " + eid + " has " + std::to_string(g.parts.size()) + " of " +
                 std::to_string(g.count) + " parts");
    sent_.sent_id = saved_sent;

    for (const auto& eid : order) {
      auto& list = mentions[eid];
      if (list.empty()) continue;
      std::stable_sort(list.begin(), list.end(),
                       [](const auto& a, const auto& b) { return mention_precedes(a.first, b.first); });
      Entity entity;
      entity.id = eid;
      for (auto& [m, line] : list) {
        const bool duplicate = std::any_of(entity.mentions.begin(), entity.mentions.end(),
                                           [&](const Mention& x) { return x.nodes == m.nodes; });
        if (duplicate) {
          report(ViolationCode::duplicate_mention, line, "entity " + eid + " has two mentions with the same span");
          continue;
        }
        if (auto declared = m.attrs.head_index()) {
          if (static_cast<std::size_t>(*declared) > m.nodes.size())
            report(ViolationCode::head_mismatch, line,
                   "declared head index " + std::to_string(*declared) + " exceeds mention of " + eid, false,
                   Severity::warning);
          else if (m.nodes[static_cast<std::size_t>(*declared) - 1] != m.head)
            report(ViolationCode::head_mismatch, line,
                   "declared head of a mention of " + eid + " differs from the tree-derived head", false,
                   Severity::warning);
        }
        entity.mentions.push_back(std::move(m));
      }
      doc_.entities.push_back(std::move(entity));
    }
    (void)line_no;
  }
};

struct NodeEvent {
  int rank;  // 0 close, 1 open, 2 single
  std::size_t key1;
  std::tuple<std::size_t, std::size_t, std::size_t> key2;
  EntityEvent event;
};

inline std::string render_node_events(std::vector<NodeEvent> events) {
  std::vector<NodeEvent> closes, opens, singles;
  for (auto& e : events) (e.rank == 0 ? closes : e.rank == 1 ? opens : singles).push_back(std::move(e));
  // closes: innermost (latest start) first; opens: outermost (latest end) first
  std::sort(closes.begin(), closes.end(), [](const NodeEvent& a, const NodeEvent& b) {
    return std::tie(b.key1, b.key2) < std::tie(a.key1, a.key2);
  });
  std::sort(opens.begin(), opens.end(), [](const NodeEvent& a, const NodeEvent& b) {
    if (a.key1 != b.key1) return a.key1 > b.key1;
    return a.key2 < b.key2;
  });
  std::sort(singles.begin(), singles.end(), [](const NodeEvent& a, const NodeEvent& b) { return a.key2 < b.key2; });
  std::string out;
  auto append = [&](const std::vector<NodeEvent>& list) {
    for (const auto& e : list) out += render_event(e.event);
  };
  if (!singles.empty()) {
    append(opens);
    append(singles);
    append(closes);
  } else {
    append(closes);
    append(opens);
  }
  return out;
}

}  // namespace detail

inline ParseResult parse_corpus(std::string_view text) { return detail::CorpusParser{}.run(text); }

/// Parses and throws Error listing the first problems when the text is not
/// scoreable.
inline Corpus load_corpus(std::string_view text, std::string_view name = "input") {
  auto result = parse_corpus(text);
  if (!result.ok()) {
    std::string message = std::string(name) + " is not valid CoNLL-U:";
    std::size_t shown = 0;
    for (const auto& v : result.violations) {
      if (v.severity != Severity::error) continue;
      message += "\n  " + v.str();
      if (++shown == 10) break;
    }
    throw Error(message);
  }
  return std::move(result.corpus);
}

inline std::vector<Violation> validate(std::string_view text) { return parse_corpus(text).violations; }

inline std::string serialize_document(const Document& doc) {
  const auto sequence = doc.node_sequence();
  std::map<NodeRef, std::size_t> position;
  for (std::size_t i = 0; i < sequence.size(); ++i) position[sequence[i]] = i;

  // Ties between brackets at one node follow entity ids, not entity order.
  std::vector<std::size_t> by_id(doc.entities.size());
  for (std::size_t i = 0; i < by_id.size(); ++i) by_id[i] = i;
  std::stable_sort(by_id.begin(), by_id.end(),
                   [&](std::size_t a, std::size_t b) { return doc.entities[a].id < doc.entities[b].id; });
  std::vector<std::size_t> id_rank(by_id.size());
  for (std::size_t i = 0; i < by_id.size(); ++i) id_rank[by_id[i]] = i;

  std::map<NodeRef, std::vector<detail::NodeEvent>> events;
  for (std::size_t ei = 0; ei < doc.entities.size(); ++ei) {
    const auto& entity = doc.entities[ei];
    for (std::size_t mi = 0; mi < entity.mentions.size(); ++mi) {
      const auto& m = entity.mentions[mi];
      const std::size_t n = m.parts.size();
      for (std::size_t pi = 0; pi < n; ++pi) {
        const auto& part = m.parts[pi];
        EntityEvent ev;
        ev.eid = entity.id;
        if (n > 1) ev.part = PartIndex{static_cast<int>(pi + 1), static_cast<int>(n)};
        if (pi == 0) ev.attrs = m.attrs;
        const auto start = position.at(part.first);
        const auto end = position.at(part.last);
        const auto order = std::make_tuple(id_rank[ei], mi, pi);
        if (start == end) {
          ev.kind = EntityEvent::Kind::single;
          events[part.first].push_back({2, 0, order, ev});
          continue;
        }
        ev.kind = EntityEvent::Kind::open;
        events[part.first].push_back({1, end, order, ev});
        EntityEvent close{EntityEvent::Kind::close, ev.eid, ev.part, {}};
        events[part.last].push_back({0, start, order, close});
      }
    }
  }

  std::string out;
  for (std::size_t s = 0; s < doc.sentences.size(); ++s) {
    const auto& sent = doc.sentences[s];
    for (const auto& c : sent.comments) {
      out += c;
      out += '\n';
    }
    std::size_t next_mwt = 0;
    for (const auto& node : sent.nodes) {
      while (!node.is_empty() && next_mwt < sent.multiword_tokens.size() &&
             sent.multiword_tokens[next_mwt].first == node.id.major) {
        const auto& mwt = sent.multiword_tokens[next_mwt++];
        out += std::to_string(mwt.first) + "-" + std::to_string(mwt.last) + "\t" + mwt.form;
        for (const auto& col : mwt.middle) out += "\t" + col;
        out += "\t" + detail::join_misc(mwt.misc) + "\n";
      }
      out += node.id.str();
      for (const auto* col : {&node.form, &node.lemma, &node.upos, &node.xpos, &node.feats}) out += "\t" + *col;
      out += "\t" + (node.parent ? std::to_string(*node.parent) : std::string("_"));
      out += "\t" + node.deprel + "\t";
      if (node.deps.empty()) out += "_";
      for (std::size_t i = 0; i < node.deps.size(); ++i) {
        if (i) out += '|';
        out += node.deps[i].head.str() + ":" + node.deps[i].relation;
      }
      auto misc = node.misc;
      const NodeRef ref{static_cast<int>(s), node.id};
      if (auto it = events.find(ref); it != events.end()) {
        const auto slot = std::min(node.entity_slot.value_or(misc.size()), misc.size());
        misc.insert(misc.begin() + static_cast<std::ptrdiff_t>(slot),
                    "Entity=" + detail::render_node_events(it->second));
      }
      out += "\t" + detail::join_misc(misc) + "\n";
    }
    out += '\n';
  }
  return out;
}

inline std::string serialize_corpus(const Corpus& corpus) {
  std::string out;
  for (const auto& doc : corpus.documents) out += serialize_document(doc);
  return out;
}

/// Moves Entity values from multiword-token rows onto the first word of the
/// range. Every other byte of the input is kept as is.
inline std::string autofix(std::string_view text) {
  std::vector<std::string> lines;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) {
      lines.emplace_back(text.substr(pos));
      break;
    }
    lines.emplace_back(text.substr(pos, end - pos));
    pos = end + 1;
  }
  auto columns_of = [](const std::string& line) {
    std::string body = line;
    const bool cr = !body.empty() && body.back() == '\r';
    if (cr) body.pop_back();
    std::vector<std::string> cols;
    for (auto c : detail::split_view(body, '\t')) cols.emplace_back(c);
    return std::make_pair(cols, cr);
  };
  auto join_columns = [](const std::vector<std::string>& cols, bool cr) {
    std::string out;
    for (std::size_t i = 0; i < cols.size(); ++i) {
      if (i) out += '\t';
      out += cols[i];
    }
    if (cr) out += '\r';
    return out;
  };

  for (std::size_t i = 0; i < lines.size(); ++i) {
    auto [cols, cr] = columns_of(lines[i]);
    if (cols.size() != 10 || cols[0].find('-') == std::string::npos || cols[0].front() == '#') continue;
    auto items = detail::split_misc(cols[9]);
    std::vector<EntityEvent> moved;
    bool found = false;
    for (const auto& item : items) {
      if (!detail::is_entity_item(item)) continue;
      found = true;
      auto parsed = parse_entity_value(std::string_view(item).substr(7));
      moved.insert(moved.end(), parsed.events.begin(), parsed.events.end());
    }
    if (!found) continue;
    const std::string first_word = cols[0].substr(0, cols[0].find('-'));
    std::size_t target = i + 1;
    for (; target < lines.size(); ++target) {
      auto [tcols, tcr] = columns_of(lines[target]);
      if (tcols.size() == 10 && tcols[0] == first_word) break;
      if (tcols.size() != 10) {
        target = lines.size();
        break;
      }
    }
    if (target >= lines.size()) continue;
    std::erase_if(items, [](const std::string& s) { return detail::is_entity_item(s); });
    cols[9] = detail::join_misc(items);
    lines[i] = join_columns(cols, cr);

    auto [wcols, wcr] = columns_of(lines[target]);
    auto witems = detail::split_misc(wcols[9]);
    auto slot = witems.size();
    for (std::size_t k = 0; k < witems.size(); ++k) {
      if (!detail::is_entity_item(witems[k])) continue;
      auto parsed = parse_entity_value(std::string_view(witems[k]).substr(7));
      moved.insert(moved.end(), parsed.events.begin(), parsed.events.end());
      slot = k;
    }
    std::erase_if(witems, [](const std::string& s) { return detail::is_entity_item(s); });
    slot = std::min(slot, witems.size());
    witems.insert(witems.begin() + static_cast<std::ptrdiff_t>(slot), "Entity=" + render_entity_value(moved));
    wcols[9] = detail::join_misc(witems);
    lines[target] = join_columns(wcols, wcr);
  }
  std::string out;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (i) out += '\n';
    out += lines[i];
  }
  return out;
}

/// Simulates the participants' input: no coreference layer, no forms on
/// empty nodes, optionally no empty nodes at all.
inline Corpus strip_for_input(const Corpus& corpus, bool drop_zeros) {
  Corpus out = corpus;
  for (auto& doc : out.documents) {
    doc.entities.clear();
    for (auto& sent : doc.sentences) {
      if (drop_zeros) std::erase_if(sent.nodes, [](const Node& n) { return n.is_empty(); });
      for (auto& node : sent.nodes) {
        node.entity_slot.reset();
        std::erase_if(node.misc, [](const std::string& item) {
          return item.rfind("SplitAnte=", 0) == 0 || item.rfind("Bridge=", 0) == 0;
        });
        if (node.is_empty()) node.form = "_";
      }
    }
  }
  return out;
}

}  // namespace corefeval
