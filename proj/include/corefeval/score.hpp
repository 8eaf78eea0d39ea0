#pragma once

// Dataset scoring: per-document alignment and metric tallies, summed over
// the documents of a dataset before ratios are taken.

#include <algorithm>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "corefeval/align.hpp"
#include "corefeval/head.hpp"
#include "corefeval/metrics.hpp"
#include "corefeval/model.hpp"

namespace corefeval {

struct ScoreConfig {
  MatchStrategy strategy = MatchStrategy::head;
  bool keep_singletons = false;
  ZeroMatching zero_matching = ZeroMatching::dependency;
};

inline const std::vector<std::string>& metric_names() {
  static const std::vector<std::string> names{"muc", "bcub", "ceafe", "blanc", "lea"};
  return names;
}

struct ScoreReport {
  std::string system;
  std::string dataset_id;
  ScoreConfig config;
  std::map<std::string, ScoreTriple> per_metric;
  double conll_f1 = 0.0;
  ScoreTriple mor;
  std::optional<ScoreTriple> zero_anaphora;
  std::optional<ScoreTriple> empty_nodes;
  std::vector<std::string> diagnostics;
};

/// Mentions of one document flattened into a single list. Entity clusters
/// hold indices into `mentions`.
struct MentionTable {
  std::vector<Mention> mentions;
  std::vector<Cluster> clusters;
  std::vector<std::size_t> entity_of;
  std::vector<std::size_t> overt;
  std::vector<std::size_t> zeros;

  explicit MentionTable(const std::vector<Entity>& entities) {
    for (std::size_t e = 0; e < entities.size(); ++e) {
      Cluster c;
      for (const auto& m : entities[e].mentions) {
        const std::size_t i = mentions.size();
        (m.is_zero() ? zeros : overt).push_back(i);
        mentions.push_back(m);
        entity_of.push_back(e);
        c.push_back(i);
      }
      clusters.push_back(std::move(c));
    }
  }

  std::vector<Mention> select(const std::vector<std::size_t>& indices) const {
    std::vector<Mention> out;
    for (std::size_t i : indices) out.push_back(mentions[i]);
    return out;
  }
};

/// Aligns zeros and overt mentions separately and merges the two results
/// into one alignment over the full mention tables.
inline Alignment align_document(const Document& gold_doc, const MentionTable& gold, const Document& pred_doc,
                                const MentionTable& pred, const ScoreConfig& config) {
  const auto gz = gold.select(gold.zeros), pz = pred.select(pred.zeros);
  const auto zero = config.zero_matching == ZeroMatching::dependency
                        ? align_zeros_dependency(gold_doc, gz, pred_doc, pz)
                        : align_zeros_linear(gz, pz);
  const auto overt = align_mentions(gold.select(gold.overt), pred.select(pred.overt), config.strategy);
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (const auto& [g, p] : zero.pairs) pairs.emplace_back(gold.zeros[g], pred.zeros[p]);
  for (const auto& [g, p] : overt.pairs) pairs.emplace_back(gold.overt[g], pred.overt[p]);
  std::sort(pairs.begin(), pairs.end());
  auto a = detail::finish_alignment(gold.mentions.size(), pred.mentions.size(), std::move(pairs));
  a.total_weight = zero.total_weight + overt.total_weight;
  return a;
}

/// Documents must agree on sentence count and surface word forms.
inline void check_comparable(const Document& gold, const Document& pred) {
  auto fail = [&](const std::string& why) { throw Error("document " + gold.id + " not comparable: " + why); };
  if (gold.sentences.size() != pred.sentences.size())
    fail(std::to_string(gold.sentences.size()) + " vs " + std::to_string(pred.sentences.size()) + " sentences");
  for (std::size_t s = 0; s < gold.sentences.size(); ++s) {
    std::vector<const std::string*> g, p;
    for (const auto& n : gold.sentences[s].nodes)
      if (!n.is_empty()) g.push_back(&n.form);
    for (const auto& n : pred.sentences[s].nodes)
      if (!n.is_empty()) p.push_back(&n.form);
    const bool same = g.size() == p.size() &&
                      std::equal(g.begin(), g.end(), p.begin(), [](auto* a, auto* b) { return *a == *b; });
    if (!same) fail("surface words differ in sentence " + std::to_string(s + 1));
  }
}

/// Mention overlap: overt mentions count their nodes and are paired to
/// maximize total overlap; each zero is one unit, credited when aligned.
inline RatioTally mor_tally(const MentionTable& gold, const MentionTable& pred, const Alignment& alignment) {
  RatioTally t;
  std::map<NodeRef, std::vector<std::size_t>> pred_by_node;
  for (std::size_t j : pred.overt) {
    t.precision_den += static_cast<double>(pred.mentions[j].nodes.size());
    for (const auto& r : pred.mentions[j].nodes) pred_by_node[r].push_back(j);
  }
  std::vector<WeightedEdge> edges;
  for (std::size_t i : gold.overt) {
    const auto& g = gold.mentions[i];
    t.recall_den += static_cast<double>(g.nodes.size());
    std::vector<std::size_t> candidates;
    for (const auto& r : g.nodes) {
      auto it = pred_by_node.find(r);
      if (it != pred_by_node.end()) candidates.insert(candidates.end(), it->second.begin(), it->second.end());
    }
    std::sort(candidates.begin(), candidates.end());
    candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
    for (std::size_t j : candidates)
      edges.push_back({i, j, static_cast<double>(overlap(g, pred.mentions[j]))});
  }
  for (const auto& [i, j] : max_weight_matching(gold.mentions.size(), pred.mentions.size(), edges))
    t.recall_num += static_cast<double>(overlap(gold.mentions[i], pred.mentions[j]));
  t.precision_num = t.recall_num;

  t.recall_den += static_cast<double>(gold.zeros.size());
  t.precision_den += static_cast<double>(pred.zeros.size());
  std::size_t zero_pairs = 0;
  for (const auto& [g, p] : alignment.pairs)
    if (gold.mentions[g].is_zero()) ++zero_pairs;
  t.recall_num += static_cast<double>(zero_pairs);
  t.precision_num += static_cast<double>(zero_pairs);
  return t;
}

namespace detail {

/// True when mention `i` of `table` has an earlier mention in its entity.
inline bool has_antecedent(const MentionTable& table, std::size_t i) {
  for (std::size_t k : table.clusters[table.entity_of[i]])
    if (k != i && mention_precedes(table.mentions[k], table.mentions[i])) return true;
  return false;
}

}  // namespace detail

/// Anaphoric zeros: recall over gold zeros with an antecedent, precision
/// over predicted zeros with an antecedent. A gold zero is resolved when
/// its predicted counterpart has an earlier mention in its predicted
/// entity that is aligned into the gold zero's entity.
inline RatioTally zero_anaphor_tally(const MentionTable& gold, const MentionTable& pred, const Alignment& alignment) {
  RatioTally t;
  std::map<std::size_t, std::size_t> gold_to_pred, pred_to_gold;
  for (const auto& [g, p] : alignment.pairs) {
    gold_to_pred[g] = p;
    pred_to_gold[p] = g;
  }
  for (std::size_t j : pred.zeros)
    if (detail::has_antecedent(pred, j)) t.precision_den += 1.0;
  for (std::size_t i : gold.zeros) {
    if (!detail::has_antecedent(gold, i)) continue;
    t.recall_den += 1.0;
    auto it = gold_to_pred.find(i);
    if (it == gold_to_pred.end()) continue;
    const std::size_t p = it->second;
    bool resolved = false;
    for (std::size_t q : pred.clusters[pred.entity_of[p]]) {
      if (q == p || !mention_precedes(pred.mentions[q], pred.mentions[p])) continue;
      auto back = pred_to_gold.find(q);
      if (back != pred_to_gold.end() && gold.entity_of[back->second] == gold.entity_of[i]) {
        resolved = true;
        break;
      }
    }
    if (resolved) {
      t.recall_num += 1.0;
      t.precision_num += 1.0;
    }
  }
  return t;
}

/// Empty-node prediction: a predicted empty node is correct when the gold
/// sentence has an unused empty node with the same id and the same
/// enhanced dependencies.
inline RatioTally empty_node_tally(const Document& gold, const Document& pred) {
  RatioTally t;
  for (std::size_t s = 0; s < gold.sentences.size(); ++s) {
    std::vector<const Node*> gold_empty;
    for (const auto& n : gold.sentences[s].nodes)
      if (n.is_empty()) gold_empty.push_back(&n);
    t.recall_den += static_cast<double>(gold_empty.size());
    if (s >= pred.sentences.size()) continue;
    std::vector<char> used(gold_empty.size(), 0);
    for (const auto& n : pred.sentences[s].nodes) {
      if (!n.is_empty()) continue;
      t.precision_den += 1.0;
      auto sorted_deps = [](std::vector<DepEdge> d) {
        std::sort(d.begin(), d.end());
        return d;
      };
      const auto deps = sorted_deps(n.deps);
      for (std::size_t k = 0; k < gold_empty.size(); ++k) {
        if (used[k] || gold_empty[k]->id != n.id || sorted_deps(gold_empty[k]->deps) != deps) continue;
        used[k] = 1;
        t.recall_num += 1.0;
        t.precision_num += 1.0;
        break;
      }
    }
  }
  return t;
}

inline ScoreTriple empty_node_prf(const Document& gold, const Document& pred) {
  check_comparable(gold, pred);
  return empty_node_tally(gold, pred).triple();
}

/// Everything needed to finish a report, summable over documents.
struct ScoreTallies {
  RatioTally muc, bcub, ceafe, lea, mor, zero_anaphora, empty_nodes;
  BlancTally blanc;

  ScoreTallies& operator+=(const ScoreTallies& o) {
    muc += o.muc;
    bcub += o.bcub;
    ceafe += o.ceafe;
    lea += o.lea;
    mor += o.mor;
    zero_anaphora += o.zero_anaphora;
    empty_nodes += o.empty_nodes;
    blanc += o.blanc;
    return *this;
  }
};

inline ScoreTallies tally_document(const Document& gold_doc, const Document& pred_doc, const ScoreConfig& config) {
  check_comparable(gold_doc, pred_doc);
  const auto gold_entities = config.keep_singletons ? gold_doc.entities : drop_singletons(gold_doc.entities);
  const auto pred_entities = config.keep_singletons ? pred_doc.entities : drop_singletons(pred_doc.entities);
  const MentionTable gold(gold_entities), pred(pred_entities);
  const auto alignment = align_document(gold_doc, gold, pred_doc, pred, config);
  const auto u = build_universe(gold.clusters, pred.clusters, gold.mentions.size(), alignment);

  ScoreTallies t;
  t.muc = muc_tally(u);
  t.bcub = b_cubed_tally(u);
  t.ceafe = ceaf_e_tally(u);
  t.lea = lea_tally(u);
  t.blanc = blanc_tally(u);
  t.mor = mor_tally(gold, pred, alignment);
  t.zero_anaphora = zero_anaphor_tally(gold, pred, alignment);
  t.empty_nodes = empty_node_tally(gold_doc, pred_doc);
  return t;
}

inline ScoreReport finish_report(const ScoreTallies& t, const ScoreConfig& config, std::string dataset_id = {}) {
  ScoreReport r;
  r.dataset_id = std::move(dataset_id);
  r.config = config;
  r.per_metric["muc"] = t.muc.triple();
  r.per_metric["bcub"] = t.bcub.triple();
  r.per_metric["ceafe"] = t.ceafe.triple();
  r.per_metric["blanc"] = t.blanc.triple();
  r.per_metric["lea"] = t.lea.triple();
  r.conll_f1 = conll_f1(r.per_metric["muc"], r.per_metric["bcub"], r.per_metric["ceafe"]);
  r.mor = t.mor.triple();
  if (t.zero_anaphora.recall_den > 0.0) r.zero_anaphora = t.zero_anaphora.triple();
  if (t.empty_nodes.recall_den > 0.0) r.empty_nodes = t.empty_nodes.triple();
  for (const auto& [name, triple] : r.per_metric)
    if (triple.degenerate) r.diagnostics.push_back(name + ": zero denominator, scored 0");
  if (r.mor.degenerate) r.diagnostics.push_back("mor: zero denominator, scored 0");
  return r;
}

/// Documents are paired by id; both corpora must hold the same set.
inline ScoreReport score_dataset(const Corpus& gold, const Corpus& pred, const ScoreConfig& config = {},
                                 std::string dataset_id = {}) {
  for (const auto& d : pred.documents)
    if (gold.find(d.id) == nullptr) throw Error("document " + d.id + " is not in the gold data");
  ScoreTallies total;
  for (const auto& g : gold.documents) {
    const Document* p = pred.find(g.id);
    if (p == nullptr) throw Error("document " + g.id + " is missing from the prediction");
    total += tally_document(g, *p, config);
  }
  return finish_report(total, config, std::move(dataset_id));
}

}  // namespace corefeval
