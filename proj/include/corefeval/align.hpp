#pragma once

// One-to-one alignment of gold and predicted mentions.
//
// Overt mentions are aligned in stages: exact spans first, then partial, then
// head, each stage on the mentions still unpaired. Within a stage the
// maximum-cardinality matching with the largest total span overlap wins,
// which separates several mentions sharing a head.
// Zero mentions are aligned separately, either by their enhanced
// dependencies or by their word ids.

#include <algorithm>
#include <cstddef>
#include <iterator>
#include <map>
#include <set>
#include <string_view>
#include <utility>
#include <vector>

#include "corefeval/assignment.hpp"
#include "corefeval/model.hpp"

namespace corefeval {

enum class MatchStrategy { exact, partial, head };
enum class ZeroMatching { dependency, linear };

inline std::string_view to_string(MatchStrategy s) {
  switch (s) {
    case MatchStrategy::exact: return "exact";
    case MatchStrategy::partial: return "partial";
    case MatchStrategy::head: return "head";
  }
  return "head";
}

inline std::string_view to_string(ZeroMatching z) { return z == ZeroMatching::linear ? "linear" : "dependency"; }

/// Index pairs into the gold and predicted mention lists.
struct Alignment {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  std::vector<std::size_t> unmatched_gold;
  std::vector<std::size_t> unmatched_pred;
  double total_weight = 0.0;
};

inline bool match_exact(const Mention& g, const Mention& p) { return g.same_span(p); }

/// Predicted span inside the gold span and covering the gold head.
inline bool match_partial(const Mention& g, const Mention& p) {
  return std::includes(g.nodes.begin(), g.nodes.end(), p.nodes.begin(), p.nodes.end()) && p.contains(g.head);
}

inline bool match_head(const Mention& g, const Mention& p) { return g.head == p.head; }

inline bool mentions_match(const Mention& g, const Mention& p, MatchStrategy strategy) {
  if (g.is_zero() != p.is_zero()) return false;
  switch (strategy) {
    case MatchStrategy::exact: return match_exact(g, p);
    case MatchStrategy::partial: return match_partial(g, p);
    case MatchStrategy::head: return match_head(g, p);
  }
  return false;
}

inline std::size_t overlap(const Mention& a, const Mention& b) {
  std::size_t n = 0;
  auto i = a.nodes.begin();
  auto j = b.nodes.begin();
  while (i != a.nodes.end() && j != b.nodes.end()) {
    if (*i < *j) ++i;
    else if (*j < *i) ++j;
    else {
      ++n;
      ++i;
      ++j;
    }
  }
  return n;
}

namespace detail {

inline Alignment finish_alignment(std::size_t n_gold, std::size_t n_pred,
                                  std::vector<std::pair<std::size_t, std::size_t>> pairs) {
  Alignment a;
  std::vector<char> gold_used(n_gold, 0), pred_used(n_pred, 0);
  for (const auto& [g, p] : pairs) {
    gold_used[g] = 1;
    pred_used[p] = 1;
  }
  for (std::size_t i = 0; i < n_gold; ++i)
    if (!gold_used[i]) a.unmatched_gold.push_back(i);
  for (std::size_t j = 0; j < n_pred; ++j)
    if (!pred_used[j]) a.unmatched_pred.push_back(j);
  a.pairs = std::move(pairs);
  return a;
}

}  // namespace detail

inline Alignment align_mentions(const std::vector<Mention>& gold, const std::vector<Mention>& pred,
                                MatchStrategy strategy) {
  std::map<NodeRef, std::vector<std::size_t>> pred_by_node;
  for (std::size_t j = 0; j < pred.size(); ++j)
    for (const auto& r : pred[j].nodes) pred_by_node[r].push_back(j);

  double big = 1.0;
  for (const auto& g : gold) big += static_cast<double>(g.nodes.size());

  // Stricter predicates are settled first and their pairs kept, so the pairs
  // of a laxer strategy always extend those of a stricter one.
  std::vector<MatchStrategy> stages{MatchStrategy::exact};
  if (strategy != MatchStrategy::exact) stages.push_back(MatchStrategy::partial);
  if (strategy == MatchStrategy::head) stages.push_back(MatchStrategy::head);

  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  std::vector<bool> gold_used(gold.size(), false), pred_used(pred.size(), false);
  for (MatchStrategy stage : stages) {
    // Every predicate requires the predicted mention to contain the gold head.
    std::vector<WeightedEdge> edges;
    for (std::size_t i = 0; i < gold.size(); ++i) {
      if (gold_used[i]) continue;
      auto it = pred_by_node.find(gold[i].head);
      if (it == pred_by_node.end()) continue;
      for (std::size_t j : it->second)
        if (!pred_used[j] && mentions_match(gold[i], pred[j], stage))
          edges.push_back({i, j, big + static_cast<double>(overlap(gold[i], pred[j]))});
    }
    for (auto [i, j] : max_weight_matching(gold.size(), pred.size(), edges)) {
      gold_used[i] = pred_used[j] = true;
      pairs.emplace_back(i, j);
    }
  }
  std::sort(pairs.begin(), pairs.end());
  auto a = detail::finish_alignment(gold.size(), pred.size(), pairs);
  a.total_weight = static_cast<double>(a.pairs.size());
  return a;
}

/// Union of the enhanced-graph edges of a zero mention's nodes.
inline std::vector<DepEdge> zero_edges(const Document& doc, const Mention& zero) {
  std::vector<DepEdge> edges;
  for (const auto& r : zero.nodes)
    if (const Node* n = doc.find(r)) edges.insert(edges.end(), n->deps.begin(), n->deps.end());
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  return edges;
}

/// F-score of the gold edge set recognized in the predicted one (set
/// semantics); 0 when either side is empty.
template <class T>
double set_f1(const std::vector<T>& gold_sorted, const std::vector<T>& pred_sorted) {
  if (gold_sorted.empty() || pred_sorted.empty()) return 0.0;
  std::vector<T> common;
  std::set_intersection(gold_sorted.begin(), gold_sorted.end(), pred_sorted.begin(), pred_sorted.end(),
                        std::back_inserter(common));
  return 2.0 * static_cast<double>(common.size()) / static_cast<double>(gold_sorted.size() + pred_sorted.size());
}

inline constexpr double kLabeledWeight = 10.0;
inline constexpr double kUnlabeledWeight = 1.0;

inline double zero_pair_weight(const Document& gold_doc, const Mention& gold, const Document& pred_doc,
                               const Mention& pred) {
  if (!gold.is_zero() || !pred.is_zero()) throw Error("zero_pair_weight called on a non-zero mention");
  if (gold.head.sentence != pred.head.sentence) return 0.0;
  const auto g = zero_edges(gold_doc, gold);
  const auto p = zero_edges(pred_doc, pred);
  auto heads = [](const std::vector<DepEdge>& edges) {
    std::vector<NodeId> out;
    for (const auto& e : edges) out.push_back(e.head);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  };
  return kLabeledWeight * set_f1(g, p) + kUnlabeledWeight * set_f1(heads(g), heads(p));
}

/// Among pairs of equal dependency weight, zeros at the same word-order
/// position are preferred. The bonus is far below the granularity of the
/// dependency weights.
inline constexpr double kSamePositionBonus = 1e-7;

inline Alignment align_zeros_dependency(const Document& gold_doc, const std::vector<Mention>& gold,
                                        const Document& pred_doc, const std::vector<Mention>& pred) {
  std::map<int, std::vector<std::size_t>> pred_by_sentence;
  for (std::size_t j = 0; j < pred.size(); ++j) pred_by_sentence[pred[j].head.sentence].push_back(j);
  std::vector<WeightedEdge> edges;
  std::map<std::pair<std::size_t, std::size_t>, double> weight_of;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    auto it = pred_by_sentence.find(gold[i].head.sentence);
    if (it == pred_by_sentence.end()) continue;
    for (std::size_t j : it->second) {
      const double w = zero_pair_weight(gold_doc, gold[i], pred_doc, pred[j]);
      if (w <= 0.0) continue;
      weight_of[{i, j}] = w;
      edges.push_back({i, j, w + (gold[i].nodes == pred[j].nodes ? kSamePositionBonus : 0.0)});
    }
  }
  auto a = detail::finish_alignment(gold.size(), pred.size(), max_weight_matching(gold.size(), pred.size(), edges));
  for (const auto& pr : a.pairs) a.total_weight += weight_of.at(pr);
  return a;
}

inline Alignment align_zeros_linear(const std::vector<Mention>& gold, const std::vector<Mention>& pred) {
  std::map<std::vector<NodeRef>, std::vector<std::size_t>> pred_by_nodes;
  for (std::size_t j = 0; j < pred.size(); ++j) pred_by_nodes[pred[j].nodes].push_back(j);
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    auto it = pred_by_nodes.find(gold[i].nodes);
    if (it == pred_by_nodes.end() || it->second.empty()) continue;
    pairs.emplace_back(i, it->second.front());
    it->second.erase(it->second.begin());
  }
  return detail::finish_alignment(gold.size(), pred.size(), std::move(pairs));
}

}  // namespace corefeval
