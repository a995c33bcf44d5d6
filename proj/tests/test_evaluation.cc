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
#include "convex_topics/evaluation.h"
#include "convex_topics/parallel.h"
#include "doctest.h"
#include "support.h"

namespace convex_topics {
namespace {

using Ids = std::vector<DocIndex>;

EvalConfig loose() {
  EvalConfig c;
  c.min_positives = 1;
  return c;
}

TEST_CASE("average_precision examples") {
  CHECK(average_precision(Ids{7, 1, 8, 2, 3}, Ids{7, 8}) == doctest::Approx(5.0 / 6.0));
  CHECK(average_precision(Ids{4, 5, 0, 1}, Ids{5, 4}) == 1.0);
  CHECK(average_precision(Ids{0, 1, 2, 3}, Ids{3}) == doctest::Approx(0.25));
  CHECK_THROWS_WITH_AS(average_precision(Ids{0, 1}, Ids{}),
                       doctest::Contains("label has no positive documents"), DataError);
  CHECK_THROWS_AS(average_precision(Ids{0, 1}, Ids{9}), DataError);
}

TEST_CASE("average_precision matches the rational oracle") {
  std::mt19937_64 rng(61);
  for (int trial = 0; trial < 2000; ++trial) {
    const std::size_t n = 1 + trial % 60;
    Ids ranking(n);
    std::iota(ranking.begin(), ranking.end(), 0);
    std::shuffle(ranking.begin(), ranking.end(), rng);
    std::set<DocIndex> pos;
    const std::size_t k = std::uniform_int_distribution<std::size_t>(1, n)(rng);
    while (pos.size() < k) pos.insert(std::uniform_int_distribution<DocIndex>(0, n - 1)(rng));
    const Ids p(pos.begin(), pos.end());
    CHECK(testing::rel_err(average_precision(ranking, p), testing::ap_exact(ranking, pos)) <= 1e-12);
  }
}

TEST_CASE("qualified_labels rules") {
  std::vector<std::vector<std::string>> labels(40, {"common"});
  labels[0].push_back("lonely");
  for (int d = 0; d < 6; ++d) labels[d].push_back("six");
  const Corpus c = testing::labeled_corpus(labels);
  CHECK(qualified_labels(c, nullptr, {}) == std::vector<std::string>{"common", "six"});

  BackgroundStats bg;
  bg.universe_size = 100000;
  bg.term_counts = {{"common", 100000}, {"six", 6}, {"lonely", 50000}};
  CHECK(qualified_labels(c, &bg, {}) == std::vector<std::string>{"six"});

  EvalConfig strict;
  strict.min_positives = 100;
  CHECK_THROWS_WITH_AS(qualified_labels(c, nullptr, strict),
                       doctest::Contains("no label qualifies"), DataError);
}

TEST_CASE("maxmap examples") {
  const Corpus c = testing::labeled_corpus({{"x"}, {}, {"x"}, {}});
  const std::vector<DocumentScore> one = {testing::ranking_of(5, {0, 1, 2, 3})};
  const EvalReport r = maxmap(c, one, loose());
  CHECK(r.maxmap == doctest::Approx(average_precision(Ids{0, 1, 2, 3}, Ids{0, 2})));
  CHECK(r.n_used == 1);
  CHECK(r.labels[0].best_topic == 5);

  // Label a: AP 1 under topic 1; label b: AP 1/2 under topic 3.
  const Corpus two = testing::labeled_corpus({{"a"}, {"b"}, {}, {}});
  const std::vector<DocumentScore> rs = {testing::ranking_of(3, {2, 1, 0, 3}), testing::ranking_of(1, {0, 3, 1, 2})};
  const EvalReport r2 = maxmap(two, rs, loose());
  REQUIRE(r2.labels.size() == 2);
  CHECK(r2.labels[0] == LabelAlignment{"a", 1, 1.0});
  CHECK(r2.labels[1].label == "b");
  CHECK(r2.labels[1].best_topic == 3);
  CHECK(r2.labels[1].ap == 0.5);
  CHECK(r2.maxmap == doctest::Approx(0.75));
  EvalConfig n1 = loose();
  n1.top_n = 1;
  CHECK(maxmap(two, rs, n1).maxmap == 1.0);

  // Equal APs resolve to the lowest topic id, whatever the input order.
  const std::vector<DocumentScore> tied = {testing::ranking_of(4, {2, 1, 0, 3}), testing::ranking_of(2, {2, 1, 0, 3})};
  for (const auto& l : maxmap(two, tied, loose()).labels) CHECK(l.best_topic == 2);

  const std::vector<DocumentScore> partial = {testing::ranking_of(0, {0, 1})};
  CHECK_THROWS_AS(maxmap(two, partial, loose()), DataError);
  const std::vector<DocumentScore> dup = {testing::ranking_of(0, {0, 1, 1, 2})};
  CHECK_THROWS_AS(maxmap(two, dup, loose()), DataError);
}

TEST_CASE("maxmap matches exhaustive search") {
  std::mt19937_64 rng(62);
  for (int trial = 0; trial < 1000; ++trial) {
    const testing::EvalInstance inst = testing::random_eval_instance(rng);
    const std::size_t top_n = 1 + trial % 6;
    std::vector<std::pair<std::string, std::uint32_t>> best;
    const double want = testing::maxmap_exact(inst.corpus, inst.rankings, top_n, &best);
    EvalConfig c = loose();
    c.top_n = top_n;
    WorkerPool pool(1 + trial % 3);
    const EvalReport r = maxmap(inst.corpus, inst.rankings, c, nullptr, nullptr, &pool);
    CHECK(testing::rel_err(r.maxmap, want) <= 1e-12);
    std::map<std::string, std::uint32_t> got;
    for (const auto& l : r.labels) got[l.label] = l.best_topic;
    for (const auto& [label, topic] : best) CHECK(got.at(label) == topic);
  }
}

TEST_CASE("maxmap invariances") {
  std::mt19937_64 rng(63);
  for (int trial = 0; trial < 200; ++trial) {
    testing::EvalInstance inst = testing::random_eval_instance(rng);
    const EvalReport base = maxmap(inst.corpus, inst.rankings, loose());

    // Relabel and reorder topics.
    auto shuffled = inst.rankings;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    for (auto& r : shuffled) r.topic_id += 1000;
    CHECK(maxmap(inst.corpus, shuffled, loose()).maxmap == base.maxmap);

    // Append unlabeled documents below every ranking.
    std::vector<std::vector<std::string>> labels;
    for (const auto& d : inst.corpus.documents()) labels.push_back(d.labels);
    const std::size_t extra = 1 + trial % 7;
    for (std::size_t k = 0; k < extra; ++k) labels.emplace_back();
    const Corpus bigger = testing::labeled_corpus(labels);
    auto extended = inst.rankings;
    for (auto& r : extended) {
      for (std::size_t k = 0; k < extra; ++k) {
        r.ranking.push_back({static_cast<DocIndex>(inst.corpus.n_docs() + k), 0.0});
      }
    }
    const EvalReport more = maxmap(bigger, extended, loose());
    CHECK(more.labels == base.labels);

    EvalConfig n1 = loose();
    n1.top_n = 1;
    CHECK(maxmap(inst.corpus, inst.rankings, n1).maxmap == base.labels.front().ap);
  }
}

TEST_CASE("topic restriction keeps the heaviest topics") {
  const Corpus c = testing::labeled_corpus({{"x"}, {}, {}});
  TopicModel m;
  m.n = 3;
  m.q = {0.2, 0.5, 0.3};
  const std::vector<DocumentScore> rs = {testing::ranking_of(0, {0, 1, 2}), testing::ranking_of(1, {2, 1, 0}),
                                         testing::ranking_of(2, {1, 2, 0})};
  EvalConfig cfg = loose();
  cfg.max_topics = 2;
  const EvalReport r = maxmap(c, rs, cfg, nullptr, &m);
  CHECK(r.n_topics == 2);
  // Topic 0 holds the perfect ranking but is the lightest; the two kept
  // topics tie and the lower id wins.
  CHECK(r.labels[0].best_topic == 1);
  CHECK(r.maxmap == doctest::Approx(1.0 / 3.0));
}

}  // namespace
}  // namespace convex_topics
