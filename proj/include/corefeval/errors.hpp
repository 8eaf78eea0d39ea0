#pragma once

// Error-type decomposition: the prediction is turned into the gold
// clustering by a fixed sequence of edits, and each edit is counted as one
// error. The edits are returned as records so that they can be replayed.

#include <algorithm>
#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "corefeval/head.hpp"
#include "corefeval/model.hpp"
#include "corefeval/score.hpp"

namespace corefeval {

enum class ErrorType { span, extra_mention, extra_entity, conflated, divided, missing_mention, missing_entity };

inline std::string_view to_string(ErrorType t) {
  switch (t) {
    case ErrorType::span: return "span";
    case ErrorType::extra_mention: return "extra-mention";
    case ErrorType::extra_entity: return "extra-entity";
    case ErrorType::conflated: return "conflated-entities";
    case ErrorType::divided: return "divided-entity";
    case ErrorType::missing_mention: return "missing-mention";
    case ErrorType::missing_entity: return "missing-entity";
  }
  return "span";
}

struct ErrorProfile {
  std::size_t span_errors = 0;
  std::size_t extra_entity = 0;
  std::size_t extra_mention = 0;
  std::size_t conflated_entities = 0;
  std::size_t missing_entity = 0;
  std::size_t missing_mention = 0;
  std::size_t divided_entity = 0;

  std::size_t total() const {
    return span_errors + extra_entity + extra_mention + conflated_entities + missing_entity + missing_mention +
           divided_entity;
  }
  std::size_t& operator[](ErrorType t) {
    switch (t) {
      case ErrorType::span: return span_errors;
      case ErrorType::extra_mention: return extra_mention;
      case ErrorType::extra_entity: return extra_entity;
      case ErrorType::conflated: return conflated_entities;
      case ErrorType::divided: return divided_entity;
      case ErrorType::missing_mention: return missing_mention;
      case ErrorType::missing_entity: return missing_entity;
    }
    return span_errors;
  }
  friend bool operator==(const ErrorProfile&, const ErrorProfile&) = default;
};

/// One edit of the prediction.
///   span:            mentions = {old, new} in `entity`
///   extra_mention:   mentions = {removed} from `entity`
///   extra_entity:    `entity` removed
///   conflated:       `mentions` move from `entity` into new entity `target`
///   divided:         all of `entity` merges into `target`
///   missing_mention: mentions = {added} to `entity`
///   missing_entity:  new entity `target` with `mentions`
struct Fix {
  ErrorType type = ErrorType::span;
  std::string doc_id;
  std::string entity;
  std::string target;
  std::vector<Mention> mentions;
};

struct ErrorAnalysis {
  ErrorProfile profile;
  std::vector<Fix> fixes;
};

namespace detail {

class IdSource {
 public:
  explicit IdSource(const Document& doc) {
    for (const auto& e : doc.entities) taken_.insert(e.id);
  }
  std::string next() {
    std::string id;
    do id = "fix" + std::to_string(++counter_);
    while (taken_.count(id));
    taken_.insert(id);
    return id;
  }

 private:
  std::set<std::string> taken_;
  std::size_t counter_ = 0;
};

inline void decompose_document(const Document& gold_doc, const Document& pred_doc, std::vector<Fix>& fixes) {
  const auto gold_entities = drop_singletons(gold_doc.entities);
  const auto pred_entities = drop_singletons(pred_doc.entities);
  const MentionTable gold(gold_entities), pred(pred_entities);
  const auto alignment = align_document(gold_doc, gold, pred_doc, pred, ScoreConfig{});
  IdSource ids(pred_doc);
  auto fix = [&](ErrorType type, std::string entity, std::string target, std::vector<Mention> mentions) {
    fixes.push_back({type, pred_doc.id, std::move(entity), std::move(target), std::move(mentions)});
  };

  std::map<std::size_t, std::size_t> pred_to_gold, gold_to_pred;
  for (const auto& [g, p] : alignment.pairs) {
    pred_to_gold[p] = g;
    gold_to_pred[g] = p;
  }
  // Mention as it stands after span fixes. Aligned zeros are kept as predicted.
  auto current = [&](std::size_t p) -> const Mention& {
    const auto& m = pred.mentions[p];
    return m.is_zero() ? m : gold.mentions[pred_to_gold.at(p)];
  };

  for (const auto& [g, p] : alignment.pairs) {
    const auto& pm = pred.mentions[p];
    if (!pm.is_zero() && !pm.same_span(gold.mentions[g]))
      fix(ErrorType::span, pred_entities[pred.entity_of[p]].id, {}, {pm, gold.mentions[g]});
  }

  struct Piece {
    std::string id;
    std::size_t gold_entity;
  };
  std::vector<Piece> pieces;
  for (std::size_t e = 0; e < pred.clusters.size(); ++e) {
    const auto& id = pred_entities[e].id;
    const auto& cluster = pred.clusters[e];
    const bool any_aligned =
        std::any_of(cluster.begin(), cluster.end(), [&](std::size_t p) { return pred_to_gold.count(p) > 0; });
    if (!any_aligned) {
      fix(ErrorType::extra_entity, id, {}, {});
      continue;
    }
    for (std::size_t p : cluster)
      if (!pred_to_gold.count(p)) fix(ErrorType::extra_mention, id, {}, {pred.mentions[p]});

    // Group by gold entity, first appearance first; the first group stays.
    std::vector<std::size_t> order;
    std::map<std::size_t, std::vector<Mention>> groups;
    for (std::size_t p : cluster) {
      auto it = pred_to_gold.find(p);
      if (it == pred_to_gold.end()) continue;
      const std::size_t ge = gold.entity_of[it->second];
      if (!groups.count(ge)) order.push_back(ge);
      groups[ge].push_back(current(p));
    }
    pieces.push_back({id, order.front()});
    for (std::size_t k = 1; k < order.size(); ++k) {
      const auto target = ids.next();
      fix(ErrorType::conflated, id, target, groups[order[k]]);
      pieces.push_back({target, order[k]});
    }
  }

  for (std::size_t ge = 0; ge < gold.clusters.size(); ++ge) {
    std::vector<std::string> holders;
    for (const auto& piece : pieces)
      if (piece.gold_entity == ge) holders.push_back(piece.id);
    if (holders.empty()) {
      std::vector<Mention> all;
      for (std::size_t g : gold.clusters[ge]) all.push_back(gold.mentions[g]);
      fix(ErrorType::missing_entity, {}, ids.next(), std::move(all));
      continue;
    }
    for (std::size_t k = 1; k < holders.size(); ++k) fix(ErrorType::divided, holders[k], holders.front(), {});
    for (std::size_t g : gold.clusters[ge])
      if (!gold_to_pred.count(g)) fix(ErrorType::missing_mention, holders.front(), {}, {gold.mentions[g]});
  }
}

}  // namespace detail

/// Singletons are ignored on both sides. Fixes are ordered by type within
/// each document: span, extra mention, extra entity, conflated, divided,
/// missing mention, missing entity.
inline ErrorAnalysis decompose_errors(const Corpus& gold, const Corpus& pred) {
  ErrorAnalysis out;
  for (const auto& g : gold.documents) {
    const Document* p = pred.find(g.id);
    if (p == nullptr) throw Error("document " + g.id + " is missing from the prediction");
    check_comparable(g, *p);
    std::vector<Fix> fixes;
    detail::decompose_document(g, *p, fixes);
    std::stable_sort(fixes.begin(), fixes.end(),
                     [](const Fix& a, const Fix& b) { return static_cast<int>(a.type) < static_cast<int>(b.type); });
    for (const auto& f : fixes) ++out.profile[f.type];
    out.fixes.insert(out.fixes.end(), fixes.begin(), fixes.end());
  }
  for (const auto& d : pred.documents)
    if (gold.find(d.id) == nullptr) throw Error("document " + d.id + " is not in the gold data");
  return out;
}

inline ErrorProfile error_decomposition(const Corpus& gold, const Corpus& pred) {
  return decompose_errors(gold, pred).profile;
}

namespace detail {

using Renames = std::map<NodeRef, NodeRef>;

inline bool same_deps(const Node& a, const Node& b) {
  auto x = a.deps, y = b.deps;
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  return x == y;
}

/// Gives the empty node at `from` a free id and updates every reference.
inline NodeRef rename_empty_node(Document& doc, const Document& gold, const NodeRef& from) {
  int minor = 0;
  for (const Document* d : {static_cast<const Document*>(&doc), &gold})
    if (static_cast<std::size_t>(from.sentence) < d->sentences.size())
      for (const auto& n : d->sentences[static_cast<std::size_t>(from.sentence)].nodes)
        if (n.id.major == from.id.major) minor = std::max(minor, n.id.minor);
  const NodeRef to{from.sentence, NodeId{from.id.major, minor + 1}};
  auto& nodes = doc.sentences[static_cast<std::size_t>(from.sentence)].nodes;
  for (auto& n : nodes) {
    if (n.id == from.id) n.id = to.id;
    for (auto& d : n.deps)
      if (d.head == from.id) d.head = to.id;
  }
  std::sort(nodes.begin(), nodes.end(), [](const Node& a, const Node& b) { return a.id < b.id; });
  auto move = [&](NodeRef& r) {
    if (r == from) r = to;
  };
  for (auto& e : doc.entities)
    for (auto& m : e.mentions) {
      for (auto& r : m.nodes) move(r);
      std::sort(m.nodes.begin(), m.nodes.end());
      for (auto& part : m.parts) {
        move(part.first);
        move(part.last);
      }
      move(m.head);
    }
  return to;
}

/// Makes the empty nodes of an inserted gold mention resolve in the
/// predicted document. A predicted node holding the same id with other
/// dependencies is moved aside first.
inline void ensure_nodes(Document& doc, const Document& gold, const Mention& m, Renames& renames) {
  for (const auto& r : m.nodes) {
    if (!r.is_empty()) continue;
    const Node* src = gold.find(r);
    if (src == nullptr || static_cast<std::size_t>(r.sentence) >= doc.sentences.size()) continue;
    if (const Node* have = doc.find(r)) {
      if (same_deps(*have, *src)) continue;
      const auto to = rename_empty_node(doc, gold, r);
      for (auto& [old, now] : renames)
        if (now == r) now = to;
      renames.emplace(r, to);
    }
    auto& nodes = doc.sentences[static_cast<std::size_t>(r.sentence)].nodes;
    auto it = std::lower_bound(nodes.begin(), nodes.end(), r.id, [](const Node& n, NodeId key) { return n.id < key; });
    Node copy = *src;
    copy.entity_slot.reset();
    nodes.insert(it, std::move(copy));
  }
}

inline Entity& entity_named(Document& doc, const std::string& id) {
  for (auto& e : doc.entities)
    if (e.id == id) return e;
  throw Error("fix refers to unknown entity " + id + " in document " + doc.id);
}

/// Removes and returns the mention with the nodes of `m`, looked up as
/// given or, failing that, through the node renames made so far.
inline Mention erase_mention(Entity& e, const Mention& m, const Renames& renames) {
  auto it = std::find_if(e.mentions.begin(), e.mentions.end(), [&](const Mention& x) { return x.nodes == m.nodes; });
  if (it == e.mentions.end()) {
    auto nodes = m.nodes;
    for (auto& r : nodes)
      if (auto found = renames.find(r); found != renames.end()) r = found->second;
    std::sort(nodes.begin(), nodes.end());
    it = std::find_if(e.mentions.begin(), e.mentions.end(), [&](const Mention& x) { return x.nodes == nodes; });
  }
  if (it == e.mentions.end()) throw Error("fix refers to a mention missing from entity " + e.id);
  Mention out = std::move(*it);
  e.mentions.erase(it);
  return out;
}

}  // namespace detail

/// Replays fix records on a prediction. `gold` supplies empty nodes for
/// inserted zeros.
inline Corpus apply_fixes(const Corpus& pred, const Corpus& gold, const std::vector<Fix>& fixes) {
  Corpus out = pred;
  std::map<std::string, detail::Renames> renames;
  for (const auto& f : fixes) {
    Document* doc = nullptr;
    for (auto& d : out.documents)
      if (d.id == f.doc_id) doc = &d;
    const Document* gold_doc = gold.find(f.doc_id);
    if (doc == nullptr || gold_doc == nullptr) throw Error("fix refers to unknown document " + f.doc_id);
    auto& moved = renames[f.doc_id];
    auto insert = [&](Entity& e, const Mention& m) {
      detail::ensure_nodes(*doc, *gold_doc, m, moved);
      e.mentions.push_back(m);
    };
    switch (f.type) {
      case ErrorType::span: {
        auto& e = detail::entity_named(*doc, f.entity);
        detail::erase_mention(e, f.mentions.at(0), moved);
        insert(detail::entity_named(*doc, f.entity), f.mentions.at(1));
        break;
      }
      case ErrorType::extra_mention:
        detail::erase_mention(detail::entity_named(*doc, f.entity), f.mentions.at(0), moved);
        break;
      case ErrorType::extra_entity:
        detail::entity_named(*doc, f.entity);
        std::erase_if(doc->entities, [&](const Entity& e) { return e.id == f.entity; });
        break;
      case ErrorType::conflated: {
        auto& e = detail::entity_named(*doc, f.entity);
        std::vector<Mention> taken;
        for (const auto& m : f.mentions) taken.push_back(detail::erase_mention(e, m, moved));
        doc->entities.push_back({f.target, std::move(taken)});
        break;
      }
      case ErrorType::divided: {
        auto from = detail::entity_named(*doc, f.entity).mentions;
        auto& target = detail::entity_named(*doc, f.target);
        target.mentions.insert(target.mentions.end(), from.begin(), from.end());
        std::erase_if(doc->entities, [&](const Entity& e) { return e.id == f.entity; });
        break;
      }
      case ErrorType::missing_mention:
        insert(detail::entity_named(*doc, f.entity), f.mentions.at(0));
        break;
      case ErrorType::missing_entity: {
        doc->entities.push_back({f.target, {}});
        for (const auto& m : f.mentions) insert(doc->entities.back(), m);
        break;
      }
    }
  }
  for (auto& doc : out.documents)
    for (auto& e : doc.entities) std::stable_sort(e.mentions.begin(), e.mentions.end(), mention_precedes);
  return out;
}

}  // namespace corefeval
