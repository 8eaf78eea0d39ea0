#include <gtest/gtest.h>

#include "support.hpp"

using namespace corefeval;
using testing_support::fixture;
using testing_support::tree_doc;

namespace {

Corpus single(Document doc) {
  Corpus c;
  c.documents.push_back(std::move(doc));
  return c;
}

Mention words(const Document& doc, std::initializer_list<int> ws, int sentence = 0) {
  std::vector<NodeRef> nodes;
  for (int w : ws) nodes.push_back({sentence, {w, 0}});
  return make_mention(doc, nodes);
}

/// "Mr. Brown came and he sat": Brown is a flat child of Mr.
Document brown_doc() {
  auto doc = tree_doc({3, 1, 0, 6, 6, 3});
  auto& n = doc.sentences[0].nodes;
  const char* upos[] = {"NOUN", "PROPN", "VERB", "CCONJ", "PRON", "VERB"};
  for (std::size_t i = 0; i < n.size(); ++i) {
    n[i].upos = upos[i];
    n[i].deprel = "dep";
  }
  n[1].deprel = "flat";
  doc.entities = {{"e1", {words(doc, {1, 2}), words(doc, {5})}}};
  return doc;
}

/// Eight words; e1 has four one-word mentions, e2 is a singleton.
Document four_mention_doc() {
  auto doc = tree_doc({0, 1, 1, 1, 1, 1, 1, 1});
  doc.entities = {{"e1", {words(doc, {1}), words(doc, {3}), words(doc, {5}), words(doc, {7})}}, {"e2", {words(doc, {2})}}};
  return doc;
}

ScoreReport report(const std::string& system, const std::string& dataset, double f1, ScoreConfig config = {}) {
  ScoreReport r;
  r.system = system;
  r.dataset_id = dataset;
  r.config = config;
  r.conll_f1 = f1;
  return r;
}

// Per-dataset primary scores of the winning system, in percent.
const std::vector<double> kWinnerRow{82.22, 74.85, 77.18, 61.58, 69.53, 71.79, 75.66, 79.60, 68.89, 82.46, 68.16,
                                     71.34, 72.02, 63.17, 69.97, 75.79, 79.81, 78.01, 78.50, 83.22, 68.18};

}  // namespace

TEST(Stats, SmallDocument) {
  auto doc = tree_doc({0, 1, 1, 1, 1});
  doc.sentences.push_back(doc.sentences[0]);
  doc.entities = {{"e1", {words(doc, {1, 2}), words(doc, {3}, 1)}}};
  const auto s = dataset_stats(single(doc), false);
  EXPECT_EQ(s.docs, 1u);
  EXPECT_EQ(s.sentences, 2u);
  EXPECT_EQ(s.words, 10u);
  EXPECT_EQ(s.entities, 1u);
  EXPECT_DOUBLE_EQ(s.entities_per_1k(), 100.0);
  EXPECT_DOUBLE_EQ(s.mentions_per_1k(), 200.0);
  EXPECT_EQ(s.mention_max_len, 2u);
  EXPECT_DOUBLE_EQ(s.mention_avg_len(), 1.5);
  EXPECT_DOUBLE_EQ(s.entity_avg_len(), 2.0);
  EXPECT_EQ(s.entity_size_histogram[1], 1u);
}

TEST(Stats, EmptyCorpus) {
  const auto s = dataset_stats(Corpus{}, true);
  EXPECT_EQ(s.docs + s.sentences + s.words + s.entities + s.mentions, 0u);
  EXPECT_EQ(s.entities_per_1k(), 0.0);
  EXPECT_EQ(s.mention_avg_len(), 0.0);
}

TEST(Stats, SingletonsOnlyCountedOnRequest) {
  auto doc = tree_doc({0, 1, 1});
  doc.entities = {{"a", {words(doc, {1})}}, {"b", {words(doc, {3})}}};
  EXPECT_EQ(dataset_stats(single(doc), false).entities, 0u);
  EXPECT_EQ(dataset_stats(single(doc), true).entities, 2u);
}

TEST(Stats, ShapesOnFixtures) {
  const auto z = dataset_stats(fixture("zeros.conllu"), true);
  EXPECT_EQ(z.empty_nodes, 3u);
  EXPECT_EQ(z.with_empty, 3u);
  EXPECT_EQ(z.mention_length_histogram[0], 3u);
  const auto g = dataset_stats(fixture("gapped.conllu"), true);
  EXPECT_EQ(g.with_gap, 1u);
  EXPECT_NEAR(g.share(g.with_gap), 25.0, 1e-12);
}

TEST(Stats, AdditiveOverDocuments) {
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    const auto corpus = testing_support::random_corpus(seed);
    DatasetStats sum;
    for (const auto& d : corpus.documents) sum += dataset_stats(single(d), true);
    const auto whole = dataset_stats(corpus, true);
    EXPECT_EQ(sum.words, whole.words);
    EXPECT_EQ(sum.mentions, whole.mentions);
    EXPECT_EQ(sum.mention_words, whole.mention_words);
    EXPECT_EQ(sum.entity_size_histogram, whole.entity_size_histogram);
    EXPECT_EQ(sum.head_upos, whole.head_upos);
    double total = 0;
    for (const auto& [upos, share] : whole.head_upos_distribution()) total += share;
    if (whole.mentions) {
      EXPECT_NEAR(total, 1.0, 1e-12);
    }
  }
}

TEST(Upos, FlatChildCountsForBothTags) {
  const auto doc = brown_doc();
  EXPECT_EQ(head_upos_set(doc, doc.entities[0].mentions[0]), (std::set<std::string>{"NOUN", "PROPN"}));
  const auto c = single(doc);
  EXPECT_EQ(filter_entities_by_upos(c, "NOUN").documents[0].entities.size(), 1u);
  EXPECT_EQ(filter_entities_by_upos(c, "PROPN").documents[0].entities.size(), 1u);
  EXPECT_EQ(filter_entities_by_upos(c, "PRON").documents[0].entities.size(), 1u);
  EXPECT_TRUE(filter_entities_by_upos(c, "VERB").documents[0].entities.empty());
}

TEST(Upos, MentionFilterCanLeaveSingletons) {
  const auto c = single(brown_doc());
  const auto pron = filter_mentions_by_upos(c, "PRON");
  ASSERT_EQ(pron.documents[0].entities.size(), 1u);
  EXPECT_TRUE(pron.documents[0].entities[0].is_singleton());
  EXPECT_TRUE(drop_singletons(pron).documents[0].entities.empty());
  EXPECT_TRUE(filter_mentions_by_upos(c, "ADJ").documents[0].entities.empty());
}

TEST(Upos, AllMatchingLeavesCorpusUnchanged) {
  auto doc = tree_doc({0, 1, 1});
  for (auto& n : doc.sentences[0].nodes) n.upos = "PRON";
  doc.entities = {{"e1", {words(doc, {1}), words(doc, {2})}}};
  const auto c = single(doc);
  EXPECT_EQ(serialize_corpus(filter_mentions_by_upos(c, "PRON")), serialize_corpus(c));
}

TEST(Upos, FiltersAreIdempotent) {
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    const auto c = testing_support::random_corpus(seed);
    for (const char* tag : {"NOUN", "PRON", "PROPN"}) {
      const auto e = filter_entities_by_upos(c, tag);
      EXPECT_EQ(serialize_corpus(filter_entities_by_upos(e, tag)), serialize_corpus(e));
      const auto m = filter_mentions_by_upos(c, tag);
      EXPECT_EQ(serialize_corpus(filter_mentions_by_upos(m, tag)), serialize_corpus(m));
    }
  }
}

TEST(Errors, IdenticalPredictionHasNoErrors) {
  for (const auto& name : testing_support::canonical_fixtures()) {
    const auto c = fixture(name);
    EXPECT_EQ(error_decomposition(c, c).total(), 0u) << name;
  }
}

TEST(Errors, DeletedEntityIsMissing) {
  const auto gold = fixture("basic.conllu");
  auto pred = gold;
  pred.documents[0].entities.erase(pred.documents[0].entities.begin());
  ErrorProfile expected;
  expected.missing_entity = 1;
  EXPECT_EQ(error_decomposition(gold, pred), expected);
}

TEST(Errors, MergedEntitiesAreConflated) {
  auto gold = tree_doc({0, 1, 1, 1});
  gold.entities = {{"x", {words(gold, {1}), words(gold, {2})}}, {"y", {words(gold, {3}), words(gold, {4})}}};
  auto pred = gold;
  pred.entities = {{"z", {words(gold, {1}), words(gold, {2}), words(gold, {3}), words(gold, {4})}}};
  ErrorProfile expected;
  expected.conflated_entities = 1;
  const auto analysis = decompose_errors(single(gold), single(pred));
  EXPECT_EQ(analysis.profile, expected);
  const auto fixed = apply_fixes(single(pred), single(gold), analysis.fixes);
  EXPECT_DOUBLE_EQ(score_dataset(single(gold), fixed).conll_f1, 1.0);
}

TEST(Errors, SplitEntityIsDivided) {
  const auto gold = single(four_mention_doc());
  PerturbOptions options;
  options.split = 1.0;
  const auto pred = perturb(gold, options);
  ASSERT_EQ(pred.documents[0].entities.size(), 3u);
  ErrorProfile expected;
  expected.divided_entity = 1;
  EXPECT_EQ(error_decomposition(gold, pred), expected);
}

TEST(Errors, SpanAndMentionErrors) {
  auto gold = tree_doc({0, 1, 4, 1, 4, 1});
  gold.entities = {{"x", {words(gold, {3, 4, 5}), words(gold, {1}), words(gold, {6})}}};
  auto pred = gold;
  // span error on the first mention, missing third, extra mention at 2
  pred.entities = {{"x", {words(gold, {4, 5}), words(gold, {1}), words(gold, {2})}}};
  const auto p = error_decomposition(single(gold), single(pred));
  EXPECT_EQ(p.span_errors, 1u);
  EXPECT_EQ(p.missing_mention, 1u);
  EXPECT_EQ(p.extra_mention, 1u);
  EXPECT_EQ(p.total(), 3u);
}

TEST(Errors, ExtraEntity) {
  auto gold = tree_doc({0, 1, 1, 1});
  gold.entities = {{"x", {words(gold, {1}), words(gold, {2})}}};
  auto pred = gold;
  pred.entities.push_back({"y", {words(gold, {3}), words(gold, {4})}});
  ErrorProfile expected;
  expected.extra_entity = 1;
  EXPECT_EQ(error_decomposition(single(gold), single(pred)), expected);
}

TEST(Errors, ReplayRestoresGoldOnPerturbedCorpora) {
  for (std::uint64_t seed = 1; seed <= 60; ++seed) {
    const auto gold = testing_support::random_corpus(seed);
    PerturbOptions options{0.3, 0.3, 0.3, 0.3, 0.3, seed};
    const auto pred = perturb(gold, options);
    const auto analysis = decompose_errors(gold, pred);
    const auto fixed = apply_fixes(pred, gold, analysis.fixes);
    const auto r = score_dataset(gold, fixed);
    EXPECT_NEAR(r.conll_f1, score_dataset(gold, gold).conll_f1, 1e-12) << "seed " << seed;
    EXPECT_TRUE(has_errors(validate(serialize_corpus(fixed))) == false) << "seed " << seed;
  }
}

// Displacement renumbers empty nodes, so a gold id may name another
// predicted node; the replay has to move that node aside.
TEST(Errors, ReplayWithRenumberedEmptyNodes) {
  for (std::uint64_t seed = 1; seed <= 1500; ++seed) {
    const auto gold = testing_support::random_corpus(seed);
    const auto pred = perturb(gold, {0.5, 0.3, 0.3, 0.4, 0.4, seed});
    const auto fixed = apply_fixes(pred, gold, decompose_errors(gold, pred).fixes);
    ASSERT_NEAR(score_dataset(gold, fixed).conll_f1, score_dataset(gold, gold).conll_f1, 1e-12) << "seed " << seed;
  }
}

TEST(Leaderboard, WinnerRowMean) {
  std::vector<ScoreReport> reports;
  for (std::size_t i = 0; i < kWinnerRow.size(); ++i)
    reports.push_back(report("winner", "d" + std::to_string(100 + i), kWinnerRow[i] / 100));
  const auto board = macro_average(reports);
  ASSERT_EQ(board.rows.size(), 1u);
  EXPECT_NEAR(board.rows[0].primary, 0.739014, 1e-6);
  EXPECT_EQ(percent(board.rows[0].primary), "73.90");
  EXPECT_TRUE(board.warnings.empty());
}

TEST(Leaderboard, SimpleMeans) {
  EXPECT_DOUBLE_EQ(macro_average({report("s", "a", 0.42)}).rows[0].primary, 0.42);
  EXPECT_DOUBLE_EQ(macro_average({report("s", "a", 0.0), report("s", "b", 1.0)}).rows[0].primary, 0.5);
}

TEST(Leaderboard, TiesKeepInputOrderAndShareRank) {
  const auto board = macro_average({report("low", "a", 0.1), report("first", "a", 0.5), report("second", "a", 0.5)});
  ASSERT_EQ(board.rows.size(), 3u);
  EXPECT_EQ(board.rows[0].system, "first");
  EXPECT_EQ(board.rows[1].system, "second");
  EXPECT_EQ(board.rows[0].rank, 1u);
  EXPECT_EQ(board.rows[1].rank, 1u);
  EXPECT_EQ(board.rows[2].rank, 3u);
}

TEST(Leaderboard, MissingDatasetCountsZero) {
  const auto board = macro_average({report("full", "a", 0.6), report("full", "b", 0.6), report("part", "a", 0.6)});
  ASSERT_EQ(board.rows.size(), 2u);
  EXPECT_DOUBLE_EQ(board.rows[1].primary, 0.3);
  EXPECT_FALSE(board.warnings.empty());
}

TEST(Leaderboard, SupplementaryColumns) {
  ScoreConfig exact;
  exact.strategy = MatchStrategy::exact;
  ScoreConfig singletons;
  singletons.keep_singletons = true;
  const auto board = macro_average({report("s", "a", 0.7), report("s", "a", 0.6, exact), report("s", "a", 0.75, singletons)});
  ASSERT_EQ(board.rows.size(), 1u);
  EXPECT_DOUBLE_EQ(board.rows[0].primary, 0.7);
  EXPECT_DOUBLE_EQ(*board.rows[0].exact, 0.6);
  EXPECT_DOUBLE_EQ(*board.rows[0].with_singletons, 0.75);
  EXPECT_FALSE(board.rows[0].partial.has_value());
}

TEST(Perturb, DeterministicForASeed) {
  const auto gold = testing_support::combined_fixtures();
  const PerturbOptions options{0.4, 0.2, 0.3, 0.3, 0.5, 42};
  EXPECT_EQ(serialize_corpus(perturb(gold, options)), serialize_corpus(perturb(gold, options)));
  PerturbOptions other = options;
  other.seed = 43;
  EXPECT_NE(serialize_corpus(perturb(gold, options)), serialize_corpus(perturb(gold, other)));
}

TEST(Perturb, ZeroRatesKeepEverything) {
  for (const auto& name : testing_support::canonical_fixtures()) {
    const auto gold = fixture(name);
    EXPECT_EQ(serialize_corpus(perturb(gold, {})), serialize_corpus(gold)) << name;
  }
}

TEST(Perturb, DropAllGivesEmptyPrediction) {
  const auto gold = testing_support::combined_fixtures();
  PerturbOptions options;
  options.drop = 1.0;
  const auto pred = perturb(gold, options);
  for (const auto& d : pred.documents) EXPECT_EQ(d.mention_count(), 0u);
  const auto r = score_dataset(gold, pred);
  for (const auto& [name, t] : r.per_metric) EXPECT_EQ(t.f1, 0.0) << name;
}

TEST(Perturb, OutputIsValid) {
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    const auto gold = testing_support::random_corpus(seed);
    const auto pred = perturb(gold, {0.5, 0.2, 0.5, 0.5, 0.5, seed});
    const auto text = serialize_corpus(pred);
    const auto vs = validate(text);
    EXPECT_TRUE(vs.empty()) << "seed " << seed << ": " << (vs.empty() ? "" : vs[0].str());
    EXPECT_NO_THROW(score_dataset(gold, pred));
  }
}

TEST(Perturb, DisplacedZeroKeepsItsDependencies) {
  const auto gold = fixture("zeros.conllu");
  PerturbOptions options;
  options.displace = 1.0;
  const auto pred = perturb(gold, options);
  const auto r = score_dataset(gold, pred);
  ASSERT_TRUE(r.empty_nodes.has_value());
  EXPECT_LT(r.empty_nodes->f1, 1.0);
  EXPECT_NEAR(r.conll_f1, 1.0, 1e-12);
  ScoreConfig linear;
  linear.zero_matching = ZeroMatching::linear;
  EXPECT_LT(score_dataset(gold, pred, linear).conll_f1, 1.0);
}
