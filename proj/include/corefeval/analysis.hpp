#pragma once

// Corpus statistics and head-UPOS filters.

#include <algorithm>
#include <array>
#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "corefeval/head.hpp"
#include "corefeval/model.hpp"

namespace corefeval {

struct DatasetStats {
  std::size_t docs = 0;
  std::size_t sentences = 0;
  std::size_t words = 0;
  std::size_t empty_nodes = 0;

  std::size_t entities = 0;
  std::size_t entity_max_len = 0;
  std::size_t mentions = 0;
  std::size_t mention_max_len = 0;
  std::size_t mention_words = 0;

  /// Entity sizes 1, 2, 3, 4, 5+.
  std::array<std::size_t, 5> entity_size_histogram{};
  /// Mention lengths in words 0, 1, 2, 3, 4, 5+.
  std::array<std::size_t, 6> mention_length_histogram{};

  std::size_t with_empty = 0;
  std::size_t with_gap = 0;
  std::size_t non_treelet = 0;
  std::map<std::string, std::size_t> head_upos;

  double entities_per_1k() const { return words ? 1000.0 * static_cast<double>(entities) / static_cast<double>(words) : 0.0; }
  double mentions_per_1k() const { return words ? 1000.0 * static_cast<double>(mentions) / static_cast<double>(words) : 0.0; }
  double entity_avg_len() const { return entities ? static_cast<double>(mentions) / static_cast<double>(entities) : 0.0; }
  double mention_avg_len() const {
    return mentions ? static_cast<double>(mention_words) / static_cast<double>(mentions) : 0.0;
  }
  /// Percentage of mentions.
  double share(std::size_t count) const {
    return mentions ? 100.0 * static_cast<double>(count) / static_cast<double>(mentions) : 0.0;
  }
  std::map<std::string, double> head_upos_distribution() const {
    std::map<std::string, double> out;
    for (const auto& [upos, n] : head_upos) out[upos] = static_cast<double>(n) / static_cast<double>(mentions);
    return out;
  }

  DatasetStats& operator+=(const DatasetStats& o) {
    docs += o.docs;
    sentences += o.sentences;
    words += o.words;
    empty_nodes += o.empty_nodes;
    entities += o.entities;
    entity_max_len = std::max(entity_max_len, o.entity_max_len);
    mentions += o.mentions;
    mention_max_len = std::max(mention_max_len, o.mention_max_len);
    mention_words += o.mention_words;
    for (std::size_t i = 0; i < entity_size_histogram.size(); ++i) entity_size_histogram[i] += o.entity_size_histogram[i];
    for (std::size_t i = 0; i < mention_length_histogram.size(); ++i)
      mention_length_histogram[i] += o.mention_length_histogram[i];
    with_empty += o.with_empty;
    with_gap += o.with_gap;
    non_treelet += o.non_treelet;
    for (const auto& [upos, n] : o.head_upos) head_upos[upos] += n;
    return *this;
  }
};

inline DatasetStats document_stats(const Document& doc, bool include_singletons) {
  DatasetStats s;
  s.docs = 1;
  s.sentences = doc.sentences.size();
  for (const auto& sent : doc.sentences)
    for (const auto& n : sent.nodes) (n.is_empty() ? s.empty_nodes : s.words) += 1;
  for (const auto& e : doc.entities) {
    if (!include_singletons && e.is_singleton()) continue;
    ++s.entities;
    s.entity_max_len = std::max(s.entity_max_len, e.mentions.size());
    ++s.entity_size_histogram[std::min<std::size_t>(e.mentions.size(), 5) - 1];
    for (const auto& m : e.mentions) {
      const auto shape = mention_shape(doc, m);
      ++s.mentions;
      s.mention_words += shape.length_words;
      s.mention_max_len = std::max(s.mention_max_len, shape.length_words);
      ++s.mention_length_histogram[std::min<std::size_t>(shape.length_words, 5)];
      s.with_empty += shape.with_empty;
      s.with_gap += shape.with_gap;
      s.non_treelet += shape.non_treelet;
      const Node* head = doc.find(m.head);
      ++s.head_upos[head ? head->upos : "_"];
    }
  }
  return s;
}

inline DatasetStats dataset_stats(const Corpus& corpus, bool include_singletons) {
  DatasetStats s;
  for (const auto& doc : corpus.documents) s += document_stats(doc, include_singletons);
  return s;
}

/// UPOS of the mention head plus that of its flat children.
inline std::set<std::string> head_upos_set(const Document& doc, const Mention& m) {
  std::set<std::string> out;
  const Node* head = doc.find(m.head);
  if (head == nullptr) return out;
  out.insert(head->upos);
  if (head->is_empty()) return out;
  for (const auto& n : doc.sentences[static_cast<std::size_t>(m.head.sentence)].nodes) {
    if (n.is_empty() || !n.parent || *n.parent != head->id.major) continue;
    if (n.deprel == "flat" || n.deprel.rfind("flat:", 0) == 0) out.insert(n.upos);
  }
  return out;
}

/// Keeps entities with at least one mention whose head UPOS set contains `upos`.
inline Corpus filter_entities_by_upos(const Corpus& corpus, const std::string& upos) {
  Corpus out = corpus;
  for (auto& doc : out.documents) {
    std::vector<Entity> kept;
    for (auto& e : doc.entities) {
      const bool match = std::any_of(e.mentions.begin(), e.mentions.end(),
                                     [&](const Mention& m) { return head_upos_set(doc, m).count(upos) > 0; });
      if (match) kept.push_back(std::move(e));
    }
    doc.entities = std::move(kept);
  }
  return out;
}

/// Keeps only mentions whose head UPOS set contains `upos`; entities left
/// without mentions disappear.
inline Corpus filter_mentions_by_upos(const Corpus& corpus, const std::string& upos) {
  Corpus out = corpus;
  for (auto& doc : out.documents) {
    std::vector<Entity> kept;
    for (auto& e : doc.entities) {
      std::vector<Mention> mentions;
      for (auto& m : e.mentions)
        if (head_upos_set(doc, m).count(upos)) mentions.push_back(std::move(m));
      if (mentions.empty()) continue;
      e.mentions = std::move(mentions);
      kept.push_back(std::move(e));
    }
    doc.entities = std::move(kept);
  }
  return out;
}

}  // namespace corefeval
