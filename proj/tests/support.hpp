#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "corefeval.hpp"
#include "oracle.hpp"

#ifndef COREFEVAL_TEST_DATA
#define COREFEVAL_TEST_DATA "tests/data"
#endif

namespace testing_support {

using namespace corefeval;

inline std::string data_path(const std::string& name) { return std::string(COREFEVAL_TEST_DATA) + "/" + name; }

inline std::string fixture_text(const std::string& name) { return read_text(data_path(name)); }

inline Corpus fixture(const std::string& name) { return load_corpus(fixture_text(name), name); }

/// Well-formed fixtures that round-trip byte for byte.
inline const std::vector<std::string>& canonical_fixtures() {
  static const std::vector<std::string> names{"basic.conllu",   "nested.conllu",    "zeros.conllu",
                                              "gapped.conllu",  "multidoc.conllu",  "samehead.conllu",
                                              "zshift_gold.conllu", "mwt_entity_fixed.conllu"};
  return names;
}

/// All canonical fixtures in one corpus, documents renamed to stay unique.
inline Corpus combined_fixtures() {
  Corpus all;
  for (const auto& name : canonical_fixtures()) {
    auto c = fixture(name);
    for (auto& d : c.documents) {
      d.id = name + "/" + d.id;
      all.documents.push_back(std::move(d));
    }
  }
  return all;
}

inline Sentence make_sentence(const std::string& sent_id, int words, std::mt19937_64& rng) {
  Sentence s;
  s.sent_id = sent_id;
  s.comments.push_back("# sent_id = " + sent_id);
  // Random tree: visit words in random order, each attaches to an earlier one.
  std::vector<int> order(static_cast<std::size_t>(words));
  for (int i = 0; i < words; ++i) order[static_cast<std::size_t>(i)] = i + 1;
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<int> parent(static_cast<std::size_t>(words) + 1, 0);
  for (std::size_t k = 1; k < order.size(); ++k)
    parent[static_cast<std::size_t>(order[k])] = order[std::uniform_int_distribution<std::size_t>(0, k - 1)(rng)];
  static const char* upos[] = {"NOUN", "PRON", "PROPN", "VERB", "DET", "ADJ"};
  for (int i = 1; i <= words; ++i) {
    Node n;
    n.id = {i, 0};
    n.form = "w" + std::to_string(i);
    n.lemma = n.form;
    n.upos = upos[std::uniform_int_distribution<int>(0, 5)(rng)];
    n.parent = parent[static_cast<std::size_t>(i)];
    n.deprel = n.parent == 0 ? "root" : (std::uniform_int_distribution<int>(0, 4)(rng) == 0 ? "flat" : "dep");
    n.deps.push_back({NodeId{*n.parent, 0}, n.deprel});
    s.nodes.push_back(std::move(n));
  }
  return s;
}

/// One sentence; parents[i] is the parent of word i + 1.
inline Document tree_doc(const std::vector<int>& parents) {
  Document doc;
  doc.id = "t";
  Sentence s;
  for (std::size_t i = 0; i < parents.size(); ++i) {
    Node n;
    n.id = {static_cast<int>(i) + 1, 0};
    n.form = "w" + std::to_string(i + 1);
    n.parent = parents[i];
    s.nodes.push_back(n);
  }
  doc.sentences.push_back(s);
  return doc;
}

inline void add_empty_node(Sentence& s, int major, int head, const std::string& rel) {
  Node n;
  int minor = 1;
  for (const auto& x : s.nodes)
    if (x.id.major == major && x.id.minor >= minor) minor = x.id.minor + 1;
  n.id = {major, minor};
  n.upos = "PRON";
  n.deps.push_back({NodeId{head, 0}, rel});
  auto it = std::lower_bound(s.nodes.begin(), s.nodes.end(), n.id, [](const Node& a, NodeId b) { return a.id < b; });
  s.nodes.insert(it, std::move(n));
}

/// Same-entity mentions must be nested or disjoint, and an entity holds at
/// most one discontinuous mention, so the bracket markup stays unambiguous.
inline bool compatible(const Entity& e, const Mention& m) {
  for (const auto& x : e.mentions) {
    if (x.nodes == m.nodes) return false;
    if (x.is_discontinuous() && m.is_discontinuous()) return false;
    const bool disjoint = x.last() < m.first() || m.last() < x.first();
    const bool m_in_x = !(m.first() < x.first()) && !(x.last() < m.last());
    const bool x_in_m = !(x.first() < m.first()) && !(m.last() < x.last());
    if (!disjoint && !m_in_x && !x_in_m) return false;
    if ((x.is_discontinuous() || m.is_discontinuous()) && !disjoint) return false;
  }
  return true;
}

inline MentionAttrs random_attrs(const Document& doc, const std::vector<NodeRef>& nodes, std::mt19937_64& rng) {
  MentionAttrs a;
  switch (std::uniform_int_distribution<int>(0, 2)(rng)) {
    case 0: break;
    case 1:
      a.etype = "person";
      a.fields = 1;
      break;
    default: {
      a.etype = "thing";
      const auto head = derive_head(doc, nodes);
      a.head = std::to_string(std::lower_bound(nodes.begin(), nodes.end(), head) - nodes.begin() + 1);
      a.fields = 2;
    }
  }
  return a;
}

/// A random valid corpus: trees, empty nodes with enhanced edges, nested,
/// discontinuous and zero mentions.
inline Corpus random_corpus(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  auto uni = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  Corpus corpus;
  const int docs = uni(1, 2);
  for (int d = 0; d < docs; ++d) {
    Document doc;
    doc.id = "r" + std::to_string(seed) + "-" + std::to_string(d);
    const int sentences = uni(1, 3);
    for (int s = 0; s < sentences; ++s) {
      auto sent = make_sentence(doc.id + "-" + std::to_string(s + 1), uni(3, 8), rng);
      const int words = static_cast<int>(sent.word_count());
      for (int z = uni(0, 2); z > 0; --z) add_empty_node(sent, uni(1, words), uni(1, words), uni(0, 1) ? "nsubj" : "obj");
      doc.sentences.push_back(std::move(sent));
    }
    doc.sentences.front().comments.insert(doc.sentences.front().comments.begin(), "# newdoc id = " + doc.id);

    const int entities = uni(1, 4);
    for (int e = 0; e < entities; ++e) doc.entities.push_back({"e" + std::to_string(d) + "x" + std::to_string(e + 1), {}});
    for (int attempt = uni(2, 10); attempt > 0; --attempt) {
      auto& entity = doc.entities[static_cast<std::size_t>(uni(0, entities - 1))];
      const int s = uni(0, sentences - 1);
      const auto& nodes = doc.sentences[static_cast<std::size_t>(s)].nodes;
      const int n = static_cast<int>(nodes.size());
      std::vector<NodeRef> span;
      const int kind = uni(0, 5);
      if (kind == 0) {  // zero
        std::vector<NodeId> empties;
        for (const auto& x : nodes)
          if (x.is_empty()) empties.push_back(x.id);
        if (empties.empty()) continue;
        span.push_back({s, empties[static_cast<std::size_t>(uni(0, static_cast<int>(empties.size()) - 1))]});
      } else {
        const int a = uni(0, n - 1), b = uni(a, std::min(n - 1, a + 3));
        for (int i = a; i <= b; ++i) span.push_back({s, nodes[static_cast<std::size_t>(i)].id});
        if (kind == 1 && b + 2 < n) {  // second part after a gap
          const int c = uni(b + 2, n - 1);
          span.push_back({s, nodes[static_cast<std::size_t>(c)].id});
        }
        if (std::all_of(span.begin(), span.end(), [](const NodeRef& r) { return r.is_empty(); })) continue;
      }
      auto m = make_mention(doc, span, random_attrs(doc, span, rng));
      if (!compatible(entity, m)) continue;
      // identical spans in two entities cannot be told apart by alignment
      const bool taken = std::any_of(doc.entities.begin(), doc.entities.end(), [&](const Entity& other) {
        return std::any_of(other.mentions.begin(), other.mentions.end(),
                           [&](const Mention& x) { return x.nodes == m.nodes; });
      });
      if (taken) continue;
      entity.mentions.push_back(std::move(m));
    }
    std::erase_if(doc.entities, [](const Entity& e) { return e.mentions.empty(); });
    for (auto& e : doc.entities) std::stable_sort(e.mentions.begin(), e.mentions.end(), mention_precedes);
    corpus.documents.push_back(std::move(doc));
  }
  return corpus;
}

/// Random clusterings over a shared pool of spans in one sentence; span
/// identity is mention identity, so exact matching aligns unambiguously.
struct MicroInstance {
  Document gold;
  Document pred;
  oracle::Clustering key;
  oracle::Clustering response;
  std::vector<std::vector<NodeRef>> pool;
};

inline oracle::Clustering random_clustering(std::mt19937_64& rng, int pool_size) {
  auto uni = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  std::vector<int> ids(static_cast<std::size_t>(pool_size));
  for (int i = 0; i < pool_size; ++i) ids[static_cast<std::size_t>(i)] = i;
  std::shuffle(ids.begin(), ids.end(), rng);
  ids.resize(static_cast<std::size_t>(uni(0, std::min(5, pool_size))));
  const int entities = uni(1, 3);
  oracle::Clustering c(static_cast<std::size_t>(entities));
  for (int id : ids) c[static_cast<std::size_t>(uni(0, entities - 1))].push_back(id);
  std::erase_if(c, [](const std::vector<int>& x) { return x.empty(); });
  return c;
}

inline MicroInstance micro_instance(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  MicroInstance mi;
  mi.gold.id = "micro";
  mi.gold.sentences.push_back(make_sentence("micro-1", 6, rng));
  mi.pred = mi.gold;
  for (int a = 1; a <= 6; ++a)
    for (int b = a; b <= std::min(6, a + 2); ++b) {
      std::vector<NodeRef> span;
      for (int i = a; i <= b; ++i) span.push_back({0, {i, 0}});
      mi.pool.push_back(span);
    }
  std::shuffle(mi.pool.begin(), mi.pool.end(), rng);
  mi.pool.resize(7);
  mi.key = random_clustering(rng, 7);
  mi.response = random_clustering(rng, 7);
  auto fill = [&](Document& doc, const oracle::Clustering& c) {
    for (std::size_t e = 0; e < c.size(); ++e) {
      Entity entity{"e" + std::to_string(e + 1), {}};
      for (int id : c[e]) entity.mentions.push_back(make_mention(doc, mi.pool[static_cast<std::size_t>(id)]));
      doc.entities.push_back(std::move(entity));
    }
  };
  fill(mi.gold, mi.key);
  fill(mi.pred, mi.response);
  return mi;
}

/// Gold and predicted zeros over two shared sentences.
struct ZeroInstance {
  Document gold;
  Document pred;
  std::vector<Mention> gold_zeros;
  std::vector<Mention> pred_zeros;
};

inline ZeroInstance zero_instance(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  auto uni = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  ZeroInstance zi;
  zi.gold.id = "zeros";
  zi.gold.sentences.push_back(make_sentence("z-1", 3, rng));
  zi.gold.sentences.push_back(make_sentence("z-2", 3, rng));
  zi.pred = zi.gold;
  static const char* rels[] = {"nsubj", "obj"};
  auto populate = [&](Document& doc, std::vector<Mention>& out) {
    for (int k = uni(0, 5); k > 0; --k) {
      const int s = uni(0, 1);
      auto& sent = doc.sentences[static_cast<std::size_t>(s)];
      add_empty_node(sent, uni(1, 3), uni(1, 3), rels[uni(0, 1)]);
    }
    for (std::size_t s = 0; s < doc.sentences.size(); ++s)
      for (auto& n : doc.sentences[s].nodes) {
        if (!n.is_empty()) continue;
        if (uni(0, 2) == 0) n.deps.push_back({NodeId{uni(1, 3), 0}, rels[uni(0, 1)]});
        std::sort(n.deps.begin(), n.deps.end());
        n.deps.erase(std::unique(n.deps.begin(), n.deps.end()), n.deps.end());
        out.push_back(make_mention(doc, {{static_cast<int>(s), n.id}}));
      }
  };
  populate(zi.gold, zi.gold_zeros);
  populate(zi.pred, zi.pred_zeros);
  return zi;
}

/// Independent weight: 10 x labeled F + 1 x unlabeled F, same sentence only.
inline double oracle_zero_weight(const Document& gd, const Mention& g, const Document& pd, const Mention& p) {
  if (g.nodes[0].sentence != p.nodes[0].sentence) return 0;
  std::set<std::pair<std::string, std::string>> gl, pl;
  std::set<std::string> gh, ph;
  for (const auto& e : gd.find(g.nodes[0])->deps) {
    gl.insert({e.head.str(), e.relation});
    gh.insert(e.head.str());
  }
  for (const auto& e : pd.find(p.nodes[0])->deps) {
    pl.insert({e.head.str(), e.relation});
    ph.insert(e.head.str());
  }
  return 10 * oracle::set_f(gl, pl) + oracle::set_f(gh, ph);
}

inline oracle::Clustering drop_single(const oracle::Clustering& c) {
  oracle::Clustering out;
  for (const auto& x : c)
    if (x.size() >= 2) out.push_back(x);
  return out;
}

}  // namespace testing_support
