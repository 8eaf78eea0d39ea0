#pragma once

// Coreference metrics over an aligned mention universe.
//
// A Universe holds key (gold) and response (predicted) entities as lists of
// mention ids; aligned predicted mentions carry the id of their gold
// counterpart, unaligned ones get ids of their own. Each metric produces a
// tally of numerators and denominators so that documents can be summed
// before the final ratio is taken.

#include <cstddef>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "corefeval/align.hpp"
#include "corefeval/assignment.hpp"
#include "corefeval/model.hpp"

namespace corefeval {

using Cluster = std::vector<std::size_t>;

struct Universe {
  std::vector<Cluster> key;
  std::vector<Cluster> response;
};

/// `gold_entities[k]` lists indices into the gold mention list, likewise for
/// predictions; `alignment` pairs gold and predicted mention indices.
inline Universe build_universe(const std::vector<Cluster>& gold_entities, const std::vector<Cluster>& pred_entities,
                               std::size_t gold_mention_count, const Alignment& alignment) {
  std::unordered_map<std::size_t, std::size_t> pred_to_key;
  for (const auto& [g, p] : alignment.pairs) pred_to_key[p] = g;
  Universe u;
  u.key = gold_entities;
  for (const auto& entity : pred_entities) {
    Cluster c;
    for (std::size_t p : entity) {
      auto it = pred_to_key.find(p);
      c.push_back(it != pred_to_key.end() ? it->second : gold_mention_count + p);
    }
    u.response.push_back(std::move(c));
  }
  return u;
}

struct RatioTally {
  double recall_num = 0.0;
  double recall_den = 0.0;
  double precision_num = 0.0;
  double precision_den = 0.0;

  RatioTally& operator+=(const RatioTally& o) {
    recall_num += o.recall_num;
    recall_den += o.recall_den;
    precision_num += o.precision_num;
    precision_den += o.precision_den;
    return *this;
  }
  ScoreTriple triple() const { return ScoreTriple::from_ratios(recall_num, recall_den, precision_num, precision_den); }
};

namespace detail {

using EntityOf = std::unordered_map<std::size_t, std::size_t>;

inline EntityOf entity_index(const std::vector<Cluster>& clusters) {
  EntityOf out;
  for (std::size_t e = 0; e < clusters.size(); ++e)
    for (std::size_t m : clusters[e]) out[m] = e;
  return out;
}

/// Intersection sizes of one cluster with the clusters of the other side,
/// plus the number of its members missing there.
struct Overlaps {
  std::unordered_map<std::size_t, std::size_t> by_entity;
  std::size_t absent = 0;
};

inline Overlaps overlaps(const Cluster& cluster, const EntityOf& other) {
  Overlaps o;
  for (std::size_t m : cluster) {
    auto it = other.find(m);
    if (it == other.end()) ++o.absent;
    else ++o.by_entity[it->second];
  }
  return o;
}

inline double links(std::size_t n) { return n < 2 ? 0.0 : static_cast<double>(n) * static_cast<double>(n - 1) / 2.0; }

/// Applies `per_cluster(cluster, other_index, other_clusters) -> {num, den}`
/// to the key side (recall) and the response side (precision).
template <class PerCluster>
RatioTally two_sided(const Universe& u, PerCluster per_cluster) {
  RatioTally t;
  const auto key_of = entity_index(u.key);
  const auto response_of = entity_index(u.response);
  for (const auto& k : u.key) {
    auto [num, den] = per_cluster(k, response_of, u.response);
    t.recall_num += num;
    t.recall_den += den;
  }
  for (const auto& r : u.response) {
    auto [num, den] = per_cluster(r, key_of, u.key);
    t.precision_num += num;
    t.precision_den += den;
  }
  return t;
}

}  // namespace detail

/// MUC: each cluster scores |K| minus the number of pieces the other side
/// cuts it into, over |K| - 1.
inline RatioTally muc_tally(const Universe& u) {
  return detail::two_sided(u, [](const Cluster& c, const detail::EntityOf& other, const std::vector<Cluster>&) {
    const auto o = detail::overlaps(c, other);
    const double pieces = static_cast<double>(o.by_entity.size() + o.absent);
    return std::pair{static_cast<double>(c.size()) - pieces, static_cast<double>(c.size()) - 1.0};
  });
}

inline RatioTally b_cubed_tally(const Universe& u) {
  return detail::two_sided(u, [](const Cluster& c, const detail::EntityOf& other, const std::vector<Cluster>&) {
    const auto o = detail::overlaps(c, other);
    double num = 0.0;
    for (const auto& [e, n] : o.by_entity) num += static_cast<double>(n * n);
    return std::pair{c.empty() ? 0.0 : num / static_cast<double>(c.size()), static_cast<double>(c.size())};
  });
}

/// LEA. A singleton has one self-link, resolved when its counterpart is a
/// singleton as well.
inline RatioTally lea_tally(const Universe& u) {
  return detail::two_sided(u, [](const Cluster& c, const detail::EntityOf& other,
                                 const std::vector<Cluster>& other_clusters) {
    const auto o = detail::overlaps(c, other);
    const double size = static_cast<double>(c.size());
    if (c.size() == 1) {
      const bool resolved = !o.by_entity.empty() && other_clusters[o.by_entity.begin()->first].size() == 1;
      return std::pair{resolved ? size : 0.0, size};
    }
    double resolved = 0.0;
    for (const auto& [e, n] : o.by_entity) resolved += detail::links(n);
    const double all = detail::links(c.size());
    return std::pair{all > 0.0 ? size * resolved / all : 0.0, size};
  });
}

/// CEAF-e with phi4 = 2|K ∩ R| / (|K| + |R|) under the optimal one-to-one
/// entity alignment.
inline RatioTally ceaf_e_tally(const Universe& u) {
  const auto response_of = detail::entity_index(u.response);
  std::vector<WeightedEdge> edges;
  for (std::size_t k = 0; k < u.key.size(); ++k) {
    const auto o = detail::overlaps(u.key[k], response_of);
    for (const auto& [r, n] : o.by_entity)
      edges.push_back({k, r, 2.0 * static_cast<double>(n) /
                                 static_cast<double>(u.key[k].size() + u.response[r].size())});
  }
  double total = 0.0;
  for (const auto& [k, r] : max_weight_matching(u.key.size(), u.response.size(), edges)) {
    for (const auto& e : edges)
      if (e.left == k && e.right == r) total += e.weight;
  }
  return {total, static_cast<double>(u.key.size()), total, static_cast<double>(u.response.size())};
}

/// Pair counts for BLANC, summed over documents.
struct BlancTally {
  double coref_key = 0.0;
  double coref_response = 0.0;
  double coref_common = 0.0;
  double non_key = 0.0;
  double non_response = 0.0;
  double non_common = 0.0;

  BlancTally& operator+=(const BlancTally& o) {
    coref_key += o.coref_key;
    coref_response += o.coref_response;
    coref_common += o.coref_common;
    non_key += o.non_key;
    non_response += o.non_response;
    non_common += o.non_common;
    return *this;
  }

  /// Averages the coreference-link and non-coreference-link scores. When
  /// the key has no links of one class, the other class decides alone;
  /// with no key links at all the score is 0.
  ScoreTriple triple() const {
    const auto coref = ScoreTriple::from_ratios(coref_common, coref_key, coref_common, coref_response);
    const auto non = ScoreTriple::from_ratios(non_common, non_key, non_common, non_response);
    if (coref_key <= 0.0 && non_key <= 0.0) {
      ScoreTriple t;
      t.degenerate = true;
      return t;
    }
    if (coref_key <= 0.0) return non;
    if (non_key <= 0.0) return coref;
    ScoreTriple t;
    t.recall = (coref.recall + non.recall) / 2.0;
    t.precision = (coref.precision + non.precision) / 2.0;
    t.f1 = (coref.f1 + non.f1) / 2.0;
    return t;
  }
};

inline BlancTally blanc_tally(const Universe& u) {
  BlancTally t;
  const auto key_of = detail::entity_index(u.key);
  const auto response_of = detail::entity_index(u.response);
  for (const auto& k : u.key) t.coref_key += detail::links(k.size());
  for (const auto& r : u.response) t.coref_response += detail::links(r.size());
  t.non_key = detail::links(key_of.size()) - t.coref_key;
  t.non_response = detail::links(response_of.size()) - t.coref_response;

  // Pairs of mentions present on both sides.
  std::size_t shared = 0;
  double same_key = 0.0, same_response = 0.0;
  for (const auto& k : u.key) {
    const auto o = detail::overlaps(k, response_of);
    same_key += detail::links(k.size() - o.absent);
    shared += k.size() - o.absent;
    for (const auto& [r, n] : o.by_entity) t.coref_common += detail::links(n);
  }
  for (const auto& r : u.response) {
    const auto o = detail::overlaps(r, key_of);
    same_response += detail::links(r.size() - o.absent);
  }
  t.non_common = detail::links(shared) - same_key - same_response + t.coref_common;
  return t;
}

inline ScoreTriple muc(const Universe& u) { return muc_tally(u).triple(); }
inline ScoreTriple b_cubed(const Universe& u) { return b_cubed_tally(u).triple(); }
inline ScoreTriple ceaf_e(const Universe& u) { return ceaf_e_tally(u).triple(); }
inline ScoreTriple lea(const Universe& u) { return lea_tally(u).triple(); }
inline ScoreTriple blanc(const Universe& u) { return blanc_tally(u).triple(); }

inline double conll_f1(const ScoreTriple& muc, const ScoreTriple& b3, const ScoreTriple& ceafe) {
  return (muc.f1 + b3.f1 + ceafe.f1) / 3.0;
}

}  // namespace corefeval
