#pragma once

// Seeded generator of synthetic predictions from gold data: span trimming,
// mention dropping, entity splitting and merging, and zero displacement.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "corefeval/head.hpp"
#include "corefeval/model.hpp"

namespace corefeval {

struct PerturbOptions {
  double trim = 0.0;
  double drop = 0.0;
  double split = 0.0;
  double merge = 0.0;
  double displace = 0.0;
  std::uint64_t seed = 1;
};

namespace detail {

/// Platform-independent draws on top of the standard engine.
class Dice {
 public:
  explicit Dice(std::uint64_t seed) : engine_(seed) {}
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  bool chance(double rate) { return rate > 0.0 && uniform() < rate; }
  std::size_t below(std::size_t n) { return static_cast<std::size_t>(engine_() % n); }

 private:
  std::mt19937_64 engine_;
};

/// Whether `m` can join `e` with the bracket markup still readable: mentions
/// of one entity are nested or disjoint, never share a span, and a
/// discontinuous mention overlaps no other mention of its entity.
inline bool fits(const Entity& e, const Mention& m, const Mention* except = nullptr) {
  for (const auto& x : e.mentions) {
    if (&x == except) continue;
    if (x.nodes == m.nodes) return false;
    const bool disjoint = x.last() < m.first() || m.last() < x.first();
    if (disjoint) continue;
    if (x.is_discontinuous() || m.is_discontinuous()) return false;
    const bool m_in_x = !(m.first() < x.first()) && !(x.last() < m.last());
    const bool x_in_m = !(x.first() < m.first()) && !(m.last() < x.last());
    if (!m_in_x && !x_in_m) return false;
  }
  return true;
}

inline void rename_ref(NodeRef& r, int sentence, const std::map<NodeId, NodeId>& renames) {
  if (r.sentence != sentence) return;
  if (auto it = renames.find(r.id); it != renames.end()) r.id = it->second;
}

/// Moves empty node `from` of sentence `s` to `{major, 1}`, closing the gap
/// it leaves among its siblings, and renames every reference.
inline void move_empty_node(Document& doc, int s, NodeId from, int major) {
  auto& sentence = doc.sentences[static_cast<std::size_t>(s)];
  std::map<NodeId, NodeId> renames{{from, NodeId{major, 1}}};
  for (const auto& n : sentence.nodes)
    if (n.id.major == from.major && n.id.minor > from.minor) renames[n.id] = NodeId{n.id.major, n.id.minor - 1};
  for (auto& n : sentence.nodes) {
    if (auto it = renames.find(n.id); it != renames.end()) n.id = it->second;
    for (auto& d : n.deps)
      if (auto it = renames.find(d.head); it != renames.end()) d.head = it->second;
  }
  std::stable_sort(sentence.nodes.begin(), sentence.nodes.end(), [](const Node& a, const Node& b) { return a.id < b.id; });
  for (auto& e : doc.entities)
    for (auto& m : e.mentions) {
      for (auto& r : m.nodes) rename_ref(r, s, renames);
      std::sort(m.nodes.begin(), m.nodes.end());
      for (auto& p : m.parts) {
        rename_ref(p.first, s, renames);
        rename_ref(p.last, s, renames);
      }
      rename_ref(m.head, s, renames);
    }
}

inline void displace_zeros(Document& doc, Dice& dice, double rate) {
  std::set<NodeRef> pinned;  // empty nodes inside multi-node mentions
  for (const auto& e : doc.entities)
    for (const auto& m : e.mentions)
      if (m.nodes.size() > 1)
        for (const auto& r : m.nodes)
          if (r.is_empty()) pinned.insert(r);
  for (std::size_t s = 0; s < doc.sentences.size(); ++s) {
    std::vector<NodeId> candidates;
    for (const auto& n : doc.sentences[s].nodes)
      if (n.is_empty() && !pinned.count({static_cast<int>(s), n.id})) candidates.push_back(n.id);
    // Later nodes first, so that renumbering never touches a pending candidate.
    std::reverse(candidates.begin(), candidates.end());
    for (const auto& id : candidates) {
      if (!dice.chance(rate)) continue;
      const auto words = doc.sentences[s].word_count();
      const int major = static_cast<int>(dice.below(words + 1));
      const auto& nodes = doc.sentences[s].nodes;
      const bool occupied =
          std::any_of(nodes.begin(), nodes.end(), [&](const Node& n) { return n.is_empty() && n.id.major == major; });
      // a node placed inside a bracketed part would join that mention
      const NodeRef target{static_cast<int>(s), NodeId{major, 1}};
      const bool inside = std::any_of(doc.entities.begin(), doc.entities.end(), [&](const Entity& e) {
        return std::any_of(e.mentions.begin(), e.mentions.end(), [&](const Mention& m) {
          return std::any_of(m.parts.begin(), m.parts.end(),
                             [&](const auto& part) { return part.first < target && target < part.last; });
        });
      });
      if (major == id.major || occupied || inside) continue;
      move_empty_node(doc, static_cast<int>(s), id, major);
    }
  }
}

inline void trim_spans(Document& doc, Dice& dice, double rate) {
  for (auto& e : doc.entities)
    for (auto& m : e.mentions) {
      if (m.is_zero() || m.is_discontinuous() || m.nodes.size() < 2 || !dice.chance(rate)) continue;
      auto nodes = m.nodes;
      if (dice.below(2) == 0) nodes.erase(nodes.begin());
      else nodes.pop_back();
      const bool keeps_head = std::binary_search(nodes.begin(), nodes.end(), m.head);
      const bool all_empty = std::all_of(nodes.begin(), nodes.end(), [](const NodeRef& r) { return r.is_empty(); });
      if (!keeps_head || all_empty) continue;
      auto trimmed = make_mention(doc, std::move(nodes), m.attrs);
      if (trimmed.head != m.head || !fits(e, trimmed, &m)) continue;
      m = std::move(trimmed);
    }
}

inline void drop_mentions(Document& doc, Dice& dice, double rate) {
  for (auto& e : doc.entities) {
    std::vector<Mention> kept;
    for (auto& m : e.mentions)
      if (!dice.chance(rate)) kept.push_back(std::move(m));
    e.mentions = std::move(kept);
  }
  std::erase_if(doc.entities, [](const Entity& e) { return e.mentions.empty(); });
}

}  // namespace detail

/// Operations run per document in a fixed order: displacement, trimming,
/// dropping, splitting, merging. The result is a valid corpus.
inline Corpus perturb(const Corpus& gold, const PerturbOptions& options) {
  detail::Dice dice(options.seed);
  Corpus out = gold;
  std::set<std::string> taken;
  for (const auto& doc : out.documents)
    for (const auto& e : doc.entities) taken.insert(e.id);
  std::size_t counter = 0;
  auto fresh_id = [&] {
    std::string id;
    do id = "p" + std::to_string(++counter);
    while (taken.count(id));
    taken.insert(id);
    return id;
  };

  for (auto& doc : out.documents) {
    detail::displace_zeros(doc, dice, options.displace);
    detail::trim_spans(doc, dice, options.trim);
    detail::drop_mentions(doc, dice, options.drop);

    std::vector<Entity> split;
    for (auto& e : doc.entities) {
      if (e.mentions.size() >= 2 && dice.chance(options.split)) {
        const std::size_t half = (e.mentions.size() + 1) / 2;
        Entity rest{fresh_id(), {e.mentions.begin() + static_cast<std::ptrdiff_t>(half), e.mentions.end()}};
        e.mentions.resize(half);
        split.push_back(std::move(e));
        split.push_back(std::move(rest));
      } else {
        split.push_back(std::move(e));
      }
    }
    doc.entities = std::move(split);

    std::vector<Entity> merged;
    for (std::size_t i = 0; i < doc.entities.size(); ++i) {
      Entity e = std::move(doc.entities[i]);
      if (i + 1 < doc.entities.size() && dice.chance(options.merge)) {
        const auto& next = doc.entities[i + 1];
        const bool clash = std::any_of(next.mentions.begin(), next.mentions.end(),
                                       [&](const Mention& m) { return !detail::fits(e, m); });
        if (!clash) {
          e.mentions.insert(e.mentions.end(), next.mentions.begin(), next.mentions.end());
          std::stable_sort(e.mentions.begin(), e.mentions.end(), mention_precedes);
          ++i;
        }
      }
      merged.push_back(std::move(e));
    }
    doc.entities = std::move(merged);

    for (auto& e : doc.entities) {
      for (auto& m : e.mentions)
        if (m.attrs.head_index()) {
          const auto pos = std::lower_bound(m.nodes.begin(), m.nodes.end(), m.head) - m.nodes.begin();
          m.attrs.head = std::to_string(pos + 1);
        }
      std::stable_sort(e.mentions.begin(), e.mentions.end(), mention_precedes);
    }
  }
  return out;
}

}  // namespace corefeval
