#pragma once

// Structural predicates over mentions: head derivation from the dependency
// tree, shape flags, and singleton filtering.

#include <algorithm>
#include <cstddef>
#include <vector>

#include "corefeval/model.hpp"

namespace corefeval {

/// Position of a node in its sentence's tree: the basic parent for surface
/// words, the first enhanced head for empty nodes. Root when unattached.
inline NodeId tree_parent(const Node& node) {
  if (!node.is_empty()) {
    if (node.parent && *node.parent > 0) return NodeId{*node.parent, 0};
    return kRoot;
  }
  if (!node.deps.empty()) return node.deps.front().head;
  return kRoot;
}

namespace detail {

inline bool in_span(const std::vector<NodeRef>& sorted, const NodeRef& r) {
  return std::binary_search(sorted.begin(), sorted.end(), r);
}

inline std::optional<NodeRef> parent_ref(const Document& doc, const NodeRef& r) {
  const Node* node = doc.find(r);
  if (node == nullptr) return std::nullopt;
  const NodeId p = tree_parent(*node);
  if (p.is_root()) return std::nullopt;
  return NodeRef{r.sentence, p};
}

/// True when `ancestor` dominates `node` in the tree (cycle-safe).
inline bool dominates(const Document& doc, const NodeRef& ancestor, const NodeRef& node) {
  if (ancestor.sentence != node.sentence) return false;
  const auto limit = doc.sentences[static_cast<std::size_t>(node.sentence)].nodes.size() + 1;
  auto cur = parent_ref(doc, node);
  for (std::size_t step = 0; cur && step < limit; ++step) {
    if (*cur == ancestor) return true;
    cur = parent_ref(doc, *cur);
  }
  return false;
}

}  // namespace detail

/// Head of a span: the node whose governor lies outside the span. With
/// several such nodes, the one dominating most span nodes wins, then the
/// earliest. Falls back to the first node when no node qualifies.
inline NodeRef derive_head(const Document& doc, std::vector<NodeRef> nodes) {
  if (nodes.empty()) throw Error("malformed mention: empty node set");
  std::sort(nodes.begin(), nodes.end());
  nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
  if (nodes.size() == 1) return nodes.front();

  std::optional<NodeRef> best;
  std::size_t best_governed = 0;
  for (const auto& candidate : nodes) {
    auto parent = detail::parent_ref(doc, candidate);
    if (parent && detail::in_span(nodes, *parent)) continue;
    std::size_t governed = 0;
    for (const auto& other : nodes)
      if (other != candidate && detail::dominates(doc, candidate, other)) ++governed;
    if (!best || governed > best_governed) {
      best = candidate;
      best_governed = governed;
    }
  }
  return best ? *best : nodes.front();
}

inline NodeRef derive_head(const Document& doc, const Mention& mention) {
  return derive_head(doc, mention.nodes);
}

/// Splits a sorted node set into maximal runs of consecutive document nodes.
inline std::vector<Part> contiguous_parts(const Document& doc, const std::vector<NodeRef>& sorted) {
  std::vector<Part> parts;
  auto position = [&](const NodeRef& r) -> std::ptrdiff_t {
    const auto& nodes = doc.sentences[static_cast<std::size_t>(r.sentence)].nodes;
    auto it = std::lower_bound(nodes.begin(), nodes.end(), r.id,
                               [](const Node& n, NodeId key) { return n.id < key; });
    return it - nodes.begin();
  };
  auto adjacent = [&](const NodeRef& a, const NodeRef& b) {
    if (a.sentence == b.sentence) return position(b) == position(a) + 1;
    if (b.sentence != a.sentence + 1 || position(b) != 0) return false;
    const auto& prev = doc.sentences[static_cast<std::size_t>(a.sentence)].nodes;
    return position(a) + 1 == static_cast<std::ptrdiff_t>(prev.size());
  };
  for (const auto& r : sorted) {
    if (!parts.empty() && adjacent(parts.back().last, r))
      parts.back().last = r;
    else
      parts.push_back({r, r});
  }
  return parts;
}

/// Builds a mention over an arbitrary node set, deriving parts and head.
inline Mention make_mention(const Document& doc, std::vector<NodeRef> nodes, MentionAttrs attrs = {}) {
  if (nodes.empty()) throw Error("malformed mention: empty node set");
  std::sort(nodes.begin(), nodes.end());
  nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
  Mention m;
  m.parts = contiguous_parts(doc, nodes);
  m.head = derive_head(doc, nodes);
  m.nodes = std::move(nodes);
  m.attrs = std::move(attrs);
  return m;
}

struct MentionShape {
  bool with_empty = false;
  bool with_gap = false;
  bool non_treelet = false;
  std::size_t length_words = 0;
};

inline MentionShape mention_shape(const Document& doc, const Mention& mention) {
  MentionShape shape;
  std::optional<NodeRef> prev_word;
  for (const auto& r : mention.nodes) {
    if (r.is_empty()) {
      shape.with_empty = true;
      continue;
    }
    ++shape.length_words;
    if (prev_word) {
      const bool next_in_sentence = r.sentence == prev_word->sentence && r.id.major == prev_word->id.major + 1;
      const bool next_sentence =
          r.sentence == prev_word->sentence + 1 && r.id.major == 1 &&
          static_cast<std::size_t>(prev_word->id.major) ==
              doc.sentences[static_cast<std::size_t>(prev_word->sentence)].word_count();
      if (!next_in_sentence && !next_sentence) shape.with_gap = true;
    }
    prev_word = r;
  }
  std::size_t roots = 0;
  for (const auto& r : mention.nodes) {
    auto parent = detail::parent_ref(doc, r);
    if (!parent || !mention.contains(*parent)) ++roots;
  }
  shape.non_treelet = roots > 1;
  return shape;
}

inline std::vector<Entity> drop_singletons(const std::vector<Entity>& entities) {
  std::vector<Entity> out;
  for (const auto& e : entities)
    if (e.mentions.size() >= 2) out.push_back(e);
  return out;
}

inline Corpus drop_singletons(const Corpus& corpus) {
  Corpus out = corpus;
  for (auto& doc : out.documents) doc.entities = drop_singletons(doc.entities);
  return out;
}

}  // namespace corefeval
