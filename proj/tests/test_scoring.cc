/*
 * Copyright 2026 The ConvexTopics Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <random>

#include "convex_topics/error.h"
#include "convex_topics/parallel.h"
#include "convex_topics/scoring.h"
#include "doctest.h"
#include "support.h"

namespace convex_topics {
namespace {

VocabularyOptions keep_all() {
  VocabularyOptions o;
  o.min_df = 1;
  o.max_df_ratio = 1.0;
  return o;
}

struct Fixture {
  Corpus corpus;
  Vocabulary vocab;
  TopicModel model;
};

Fixture random_fixture(std::mt19937_64& rng, std::size_t n_docs) {
  std::vector<Corpus::RawDocument> raw;
  std::uniform_int_distribution<int> word(0, 14);
  std::uniform_int_distribution<int> len(0, 12);
  for (std::size_t d = 0; d < n_docs; ++d) {
    std::string body;
    for (int k = len(rng); k > 0; --k) body += testing::synthetic_word(word(rng)) + ", ";
    raw.push_back({"doc" + std::to_string(n_docs - d), "", body, {}});
  }
  raw[0].body += testing::synthetic_word(0);
  Fixture f{Corpus::build(raw, {}), {}, {}};
  f.vocab = build_vocabulary(f.corpus, nullptr, keep_all());
  f.model = fit(build_similarity(f.vocab, 0.05), {});
  return f;
}

TEST_CASE("local_weight examples") {
  LocalWeightConfig c;
  c.avg_len = 10;
  CHECK(local_weight(0, 10, c) == 0.0);
  CHECK(local_weight(3, 10, c) == doctest::Approx(0.75));
  CHECK(local_weight(1000000, 10, c) < 1.0);
  CHECK(local_weight(1000000, 10, c) > 0.9999);
  double prev = 0.0;
  for (std::uint32_t tf = 1; tf < 50; ++tf) {
    const double w = local_weight(tf, 30, c);
    CHECK(w > prev);
    prev = w;
  }
  c.length_normalize = false;
  CHECK(local_weight(3, 1000, c) == doctest::Approx(0.75));
  c.k = 0.0;
  CHECK_THROWS_AS(c.validate(), ValidationError);
}

TEST_CASE("score_document examples") {
  const Corpus corpus = Corpus::build(
      {{"a", "", "alpha", {}}, {"b", "", "", {}}, {"c", "", "alpha, beta", {}}}, {});
  const Vocabulary v = build_vocabulary(corpus, nullptr, keep_all());
  const auto map = v.corpus_to_vocab(corpus);
  CsrMatrix r;  // two terms, one topic (column 0)
  r.rows = 2;
  r.cols = 2;
  r.offsets = {0, 1, 2};
  r.indices = {0, 0};
  r.values = {0.6, 0.3};
  const LocalWeightFn w = [](std::uint32_t, std::uint32_t) { return 0.75; };
  CHECK(score_document(corpus.document(0), 0, r, map, w) == doctest::Approx(0.45));
  CHECK(score_document(corpus.document(1), 0, r, map, w) == 0.0);
  CHECK(score_document(corpus.document(2), 0, r, map, w) ==
        doctest::Approx(0.6 * 0.75 + 0.3 * 0.75));
  CHECK(score_document(corpus.document(2), 1, r, map, w) == 0.0);
}

TEST_CASE("ranking order and truncation") {
  const Corpus corpus = Corpus::build(
      {{"b", "", "", {}}, {"a", "", "", {}}, {"c", "", "", {}}}, {});
  std::vector<ScoredDocument> ranking = {{0, 0.5}, {1, 0.5}, {2, 0.9}};
  sort_ranking(ranking, corpus);
  CHECK(ranking == std::vector<ScoredDocument>{{2, 0.9}, {1, 0.5}, {0, 0.5}});

  std::mt19937_64 rng(51);
  const Fixture f = random_fixture(rng, 12);
  const auto weight = default_local_weight({1.0, true, f.corpus.average_length()});
  const auto one = rank_documents(f.corpus, f.vocab, f.model, weight, 1);
  for (const auto& t : one) CHECK(t.ranking.size() == 1);
  const auto all = rank_documents(f.corpus, f.vocab, f.model, weight);
  CHECK(all.size() == f.model.exemplars.size());
  for (const auto& t : all) CHECK(t.ranking.size() == f.corpus.n_docs());
}

TEST_CASE("rank_documents matches a brute-force double loop") {
  std::mt19937_64 rng(52);
  for (int trial = 0; trial < 25; ++trial) {
    const Fixture f = random_fixture(rng, 1 + trial % 20);
    const LocalWeightConfig lw{1.3, true, f.corpus.average_length()};
    WorkerPool pool(1 + trial % 4);
    const auto ranked =
        rank_documents(f.corpus, f.vocab, f.model, default_local_weight(lw), {}, &pool);
    const auto topics = extract_topics(f.model);
    REQUIRE(ranked.size() == topics.size());
    for (std::size_t t = 0; t < topics.size(); ++t) {
      CHECK(ranked[t].topic_id == topics[t].exemplar);
      for (const auto& sd : ranked[t].ranking) {
        const Document& doc = f.corpus.document(sd.doc);
        double want = 0.0;
        for (const auto& [term, tf] : doc.term_freq) {
          const auto it = f.vocab.index.find(f.corpus.dictionary().term(term));
          if (it == f.vocab.index.end()) continue;
          for (std::uint32_t j = 0; j < f.model.n; ++j) {
            if (j != topics[t].exemplar) continue;
            want += f.model.responsibilities.at(it->second, j) * local_weight(tf, doc.length, lw);
          }
        }
        CHECK(sd.score == doctest::Approx(want).epsilon(1e-12));
      }
      for (std::size_t k = 1; k < ranked[t].ranking.size(); ++k) {
        const auto& a = ranked[t].ranking[k - 1];
        const auto& b = ranked[t].ranking[k];
        CHECK((a.score > b.score ||
               (a.score == b.score && f.corpus.document(a.doc).id < f.corpus.document(b.doc).id)));
      }
    }
  }
}

TEST_CASE("positive scaling of a topic column keeps its ranking") {
  std::mt19937_64 rng(53);
  for (int trial = 0; trial < 10; ++trial) {
    const Fixture f = random_fixture(rng, 20);
    TopicModel scaled = f.model;
    for (double& v : scaled.responsibilities.values) v *= 4.0;  // exact in binary
    const auto weight = default_local_weight({1.0, true, f.corpus.average_length()});
    const auto a = rank_documents(f.corpus, f.vocab, f.model, weight);
    const auto b = rank_documents(f.corpus, f.vocab, scaled, weight);
    for (std::size_t t = 0; t < a.size(); ++t) {
      for (std::size_t k = 0; k < a[t].ranking.size(); ++k) {
        CHECK(a[t].ranking[k].doc == b[t].ranking[k].doc);
      }
    }
    // A non-power-of-two factor may perturb exact ties, so compare the
    // ordering by score only.
    TopicModel odd = f.model;
    for (double& v : odd.responsibilities.values) v *= 0.37;
    const auto c = rank_documents(f.corpus, f.vocab, odd, weight);
    for (std::size_t t = 0; t < a.size(); ++t) {
      for (std::size_t k = 0; k < a[t].ranking.size(); ++k) {
        CHECK(c[t].ranking[k].score == doctest::Approx(a[t].ranking[k].score * 0.37).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("rankings are identical across thread counts") {
  std::mt19937_64 rng(54);
  const Fixture f = random_fixture(rng, 20);
  const auto weight = default_local_weight({1.0, true, f.corpus.average_length()});
  WorkerPool one(1);
  const auto base = rank_documents(f.corpus, f.vocab, f.model, weight, {}, &one);
  for (unsigned t : {2u, 4u, 8u}) {
    WorkerPool pool(t);
    CHECK(rank_documents(f.corpus, f.vocab, f.model, weight, {}, &pool) == base);
  }
}

}  // namespace
}  // namespace convex_topics
