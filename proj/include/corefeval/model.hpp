#pragma once

// In-memory model of CorefUD documents: sentences with surface words and
// empty nodes, plus entities made of (possibly discontinuous) mentions.
// Everything here is a plain value type; downstream modules never mutate a
// parsed corpus in place, they build new ones.

#include <algorithm>
#include <compare>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace corefeval {

/// Hard failure: inputs that cannot be compared or processed at all.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// CoNLL-U word id: "k" for surface words (minor == 0), "k.m" for empty
/// nodes. The root pseudo-node is {0, 0}.
struct NodeId {
  int major = 0;
  int minor = 0;

  constexpr bool is_root() const { return major == 0 && minor == 0; }
  constexpr bool is_empty() const { return minor > 0; }

  friend constexpr auto operator<=>(const NodeId&, const NodeId&) = default;

  std::string str() const {
    if (minor == 0) return std::to_string(major);
    return std::to_string(major) + "." + std::to_string(minor);
  }

  /// Parses "k" or "k.m"; nullopt on anything else.
  static std::optional<NodeId> parse(std::string_view text) {
    auto parse_uint = [](std::string_view s) -> std::optional<int> {
      if (s.empty() || s.size() > 9) return std::nullopt;
      int value = 0;
      for (char c : s) {
        if (c < '0' || c > '9') return std::nullopt;
        value = value * 10 + (c - '0');
      }
      return value;
    };
    const auto dot = text.find('.');
    if (dot == std::string_view::npos) {
      auto major = parse_uint(text);
      if (!major) return std::nullopt;
      return NodeId{*major, 0};
    }
    auto major = parse_uint(text.substr(0, dot));
    auto minor = parse_uint(text.substr(dot + 1));
    if (!major || !minor || *minor == 0) return std::nullopt;
    return NodeId{*major, *minor};
  }
};

inline constexpr NodeId kRoot{0, 0};

/// One edge of the enhanced dependency graph (DEPS column).
struct DepEdge {
  NodeId head;  // kRoot for the root
  std::string relation;

  friend auto operator<=>(const DepEdge&, const DepEdge&) = default;
};

struct Node {
  NodeId id;
  std::string form = "_";
  std::string lemma = "_";
  std::string upos = "_";
  std::string xpos = "_";
  std::string feats = "_";
  /// Basic-tree parent; 0 is the root. Absent ("_") for empty nodes.
  std::optional<int> parent;
  std::string deprel = "_";
  std::vector<DepEdge> deps;
  /// MISC items in file order, without the Entity item (the coreference
  /// layer is regenerated from the entity model on output).
  std::vector<std::string> misc;
  /// Index in the original MISC list where the Entity item stood, so that
  /// output puts it back in the same place.
  std::optional<std::size_t> entity_slot;

  bool is_empty() const { return id.is_empty(); }
};

struct MultiwordToken {
  int first = 0;
  int last = 0;
  std::string form;
  /// Columns 3..9 verbatim (normally all "_").
  std::vector<std::string> middle = std::vector<std::string>(7, "_");
  std::vector<std::string> misc;
};

struct Sentence {
  std::string sent_id;
  /// Comment lines verbatim, including the leading '#'.
  std::vector<std::string> comments;
  /// Surface words and empty nodes in NodeId order.
  std::vector<Node> nodes;
  std::vector<MultiwordToken> multiword_tokens;

  const Node* find(NodeId id) const {
    auto it = std::lower_bound(nodes.begin(), nodes.end(), id,
                               [](const Node& n, NodeId key) { return n.id < key; });
    if (it == nodes.end() || it->id != id) return nullptr;
    return &*it;
  }

  std::size_t word_count() const {
    return static_cast<std::size_t>(
        std::count_if(nodes.begin(), nodes.end(), [](const Node& n) { return !n.is_empty(); }));
  }
};

/// Document-scoped node address.
struct NodeRef {
  int sentence = 0;
  NodeId id;

  bool is_empty() const { return id.is_empty(); }
  friend constexpr auto operator<=>(const NodeRef&, const NodeRef&) = default;
};

/// Contiguous run of nodes, inclusive, in document node order.
struct Part {
  NodeRef first;
  NodeRef last;
  friend constexpr auto operator<=>(const Part&, const Part&) = default;
};

/// The opaque tail of an opening bracket "(eid-etype-head-other".
/// `fields` counts how many of the three slots were written.
struct MentionAttrs {
  std::string etype;
  std::string head;
  std::string other;
  int fields = 0;

  std::optional<int> head_index() const {
    if (fields < 2 || head.empty()) return std::nullopt;
    int value = 0;
    for (char c : head) {
      if (c < '0' || c > '9') return std::nullopt;
      value = value * 10 + (c - '0');
    }
    if (value == 0) return std::nullopt;
    return value;
  }

  friend bool operator==(const MentionAttrs&, const MentionAttrs&) = default;
};

struct Mention {
  /// Sorted, unique.
  std::vector<NodeRef> nodes;
  /// One entry for a continuous mention, several for "[i/n]" parts.
  std::vector<Part> parts;
  NodeRef head;
  MentionAttrs attrs;

  bool is_zero() const {
    return !nodes.empty() &&
           std::all_of(nodes.begin(), nodes.end(), [](const NodeRef& r) { return r.is_empty(); });
  }
  bool is_discontinuous() const { return parts.size() > 1; }
  bool contains(const NodeRef& r) const {
    return std::binary_search(nodes.begin(), nodes.end(), r);
  }
  const NodeRef& first() const { return nodes.front(); }
  const NodeRef& last() const { return nodes.back(); }

  /// Span identity: same node set and same part structure.
  bool same_span(const Mention& other) const {
    return nodes == other.nodes && parts == other.parts;
  }
};

/// Document order of mentions: by first node, longer spans first.
inline bool mention_precedes(const Mention& a, const Mention& b) {
  if (a.first() != b.first()) return a.first() < b.first();
  if (a.last() != b.last()) return b.last() < a.last();
  return a.nodes < b.nodes;
}

struct Entity {
  std::string id;
  std::vector<Mention> mentions;

  bool is_singleton() const { return mentions.size() == 1; }
};

struct Document {
  std::string id;
  std::vector<Sentence> sentences;
  std::vector<Entity> entities;

  const Node* find(const NodeRef& r) const {
    if (r.sentence < 0 || static_cast<std::size_t>(r.sentence) >= sentences.size()) return nullptr;
    return sentences[static_cast<std::size_t>(r.sentence)].find(r.id);
  }

  /// All nodes (surface and empty) in document order.
  std::vector<NodeRef> node_sequence() const {
    std::vector<NodeRef> out;
    for (std::size_t s = 0; s < sentences.size(); ++s)
      for (const auto& n : sentences[s].nodes) out.push_back({static_cast<int>(s), n.id});
    return out;
  }

  std::size_t mention_count() const {
    std::size_t n = 0;
    for (const auto& e : entities) n += e.mentions.size();
    return n;
  }
};

struct Corpus {
  std::vector<Document> documents;

  const Document* find(std::string_view doc_id) const {
    for (const auto& d : documents)
      if (d.id == doc_id) return &d;
    return nullptr;
  }
};

/// Recall / precision / F1 as fractions in [0, 1].
struct ScoreTriple {
  double recall = 0.0;
  double precision = 0.0;
  double f1 = 0.0;
  /// Set when a denominator was zero and the score fell back to 0.
  bool degenerate = false;

  static ScoreTriple from(double recall, double precision) {
    ScoreTriple t{recall, precision, 0.0, false};
    if (recall + precision > 0.0) t.f1 = 2.0 * recall * precision / (recall + precision);
    return t;
  }

  /// num/den ratios with zero denominators mapped to 0 and flagged.
  static ScoreTriple from_ratios(double recall_num, double recall_den, double precision_num,
                                 double precision_den) {
    const bool degenerate = recall_den <= 0.0 || precision_den <= 0.0;
    const double r = recall_den > 0.0 ? recall_num / recall_den : 0.0;
    const double p = precision_den > 0.0 ? precision_num / precision_den : 0.0;
    auto t = from(r, p);
    t.degenerate = degenerate;
    return t;
  }
};

}  // namespace corefeval
