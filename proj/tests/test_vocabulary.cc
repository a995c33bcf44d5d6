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

#include <algorithm>
#include <random>

#include "convex_topics/error.h"
#include "convex_topics/vocabulary.h"
#include "doctest.h"
#include "support.h"

namespace convex_topics {
namespace {

using testing::hypergeom_sf_exact;
using testing::rel_err;
using testing::to_double;
using Indices = std::vector<std::size_t>;

TEST_CASE("hypergeom_sf examples") {
  CHECK(rel_err(hypergeom_sf(10, 5, 5, 5), 1.0 / 252.0) < 1e-14);
  CHECK(hypergeom_sf(10, 5, 5, 0) == 1.0);
  CHECK(hypergeom_sf(40, 40, 7, 7) == 1.0);
  CHECK_THROWS_AS(hypergeom_sf(10, 11, 5, 1), ValidationError);
  CHECK_THROWS_AS(hypergeom_sf(10, 5, 11, 1), ValidationError);
  CHECK_THROWS_AS(hypergeom_sf(10, 5, 5, 6), ValidationError);
}

TEST_CASE("hypergeom_sf against exact enumeration") {
  std::mt19937_64 rng(21);
  double worst = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const std::uint64_t M = std::uniform_int_distribution<std::uint64_t>(1, 120)(rng);
    const std::uint64_t K = std::uniform_int_distribution<std::uint64_t>(0, M)(rng);
    const std::uint64_t m = std::uniform_int_distribution<std::uint64_t>(0, M)(rng);
    const std::uint64_t k = std::uniform_int_distribution<std::uint64_t>(0, std::min(K, m))(rng);
    worst = std::max(worst, rel_err(hypergeom_sf(M, K, m, k),
                                    to_double(hypergeom_sf_exact(M, K, m, k))));
  }
  CHECK(worst <= 1e-12);
}

TEST_CASE("hypergeom_sf against exact enumeration, larger universes") {
  std::mt19937_64 rng(25);
  double worst = 0.0;
  for (int trial = 0; trial < 300; ++trial) {
    const std::uint64_t M = std::uniform_int_distribution<std::uint64_t>(500, 5000)(rng);
    const std::uint64_t K = std::uniform_int_distribution<std::uint64_t>(0, 200)(rng);
    const std::uint64_t m = std::uniform_int_distribution<std::uint64_t>(0, 300)(rng);
    const std::uint64_t k = std::uniform_int_distribution<std::uint64_t>(0, std::min(K, m))(rng);
    worst = std::max(worst, rel_err(hypergeom_sf(M, K, m, k),
                                    to_double(hypergeom_sf_exact(M, K, m, k))));
  }
  CHECK(worst <= 1e-12);
}

TEST_CASE("hypergeom_sf stays finite at corpus scale") {
  const double p = hypergeom_sf(30000000, 2000, 10000, 500);
  CHECK(p >= 0.0);
  CHECK(p < 1e-300);
  const double q = hypergeom_sf(30000000, 3000000, 10000, 900);
  CHECK(q > 0.99);
  CHECK(q <= 1.0);
}

TEST_CASE("hypergeom_sf is non-increasing in k") {
  std::mt19937_64 rng(22);
  for (int trial = 0; trial < 200; ++trial) {
    const std::uint64_t M = std::uniform_int_distribution<std::uint64_t>(1, 5000)(rng);
    const std::uint64_t K = std::uniform_int_distribution<std::uint64_t>(0, M)(rng);
    const std::uint64_t m = std::uniform_int_distribution<std::uint64_t>(0, M)(rng);
    double prev = 1.0;
    for (std::uint64_t k = 0; k <= std::min(K, m); ++k) {
      const double p = hypergeom_sf(M, K, m, k);
      CHECK(p <= prev * (1 + 1e-13));
      prev = p;
    }
  }
}

TEST_CASE("bh_filter examples") {
  const std::vector<double> p = {0.001, 0.008, 0.039, 0.041};
  CHECK(bh_filter(p, 0.01) == Indices{0});
  CHECK(bh_filter(std::vector<double>(5, 0.0), 0.01) == Indices{0, 1, 2, 3, 4});
  CHECK(bh_filter(std::vector<double>(5, 1.0), 0.01).empty());
  CHECK(bh_filter(std::vector<double>{}, 0.01).empty());
  // Step-up: the third value clears its bound, carrying the second with it.
  CHECK(bh_filter(std::vector<double>{0.001, 0.0069, 0.0074}, 0.01) == Indices{0, 1, 2});
  CHECK_THROWS_AS(bh_filter(std::vector<double>{0.5}, 0.0), ValidationError);
  CHECK_THROWS_AS(bh_filter(std::vector<double>{1.5}, 0.01), ValidationError);
  CHECK_THROWS_AS(bh_filter(std::vector<double>{std::nan("")}, 0.01), ValidationError);
}

std::vector<double> random_p(std::mt19937_64& rng, std::size_t n) {
  // A coarse grid produces ties and exact threshold hits.
  std::uniform_int_distribution<int> coin(0, 2);
  std::uniform_int_distribution<int> grid(0, 40);
  std::uniform_real_distribution<double> u(0.0, 0.05);
  std::vector<double> p(n);
  for (double& v : p) v = coin(rng) == 0 ? grid(rng) * 0.0005 : u(rng);
  return p;
}

TEST_CASE("bh_filter matches the exhaustive step-up oracle") {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 2000; ++trial) {
    const std::size_t n = 1 + trial % 12;
    const auto p = random_p(rng, n);
    const double fdr = trial % 2 ? 0.01 : 0.05;
    CHECK(bh_filter(p, fdr) == testing::bh_exhaustive(p, fdr));
  }
}

TEST_CASE("bh_filter is monotone in fdr and permutation invariant") {
  std::mt19937_64 rng(24);
  for (int trial = 0; trial < 500; ++trial) {
    const auto p = random_p(rng, 1 + trial % 30);
    const auto tight = bh_filter(p, 0.01);
    const auto loose = bh_filter(p, 0.03);
    CHECK(std::includes(loose.begin(), loose.end(), tight.begin(), tight.end()));

    std::vector<std::size_t> perm(p.size());
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<double> shuffled(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) shuffled[i] = p[perm[i]];
    std::vector<std::size_t> mapped;
    for (std::size_t i : bh_filter(shuffled, 0.01)) mapped.push_back(perm[i]);
    std::sort(mapped.begin(), mapped.end());
    CHECK(mapped == tight);
  }
}

Corpus banded_corpus() {
  // 100 documents: "common" in 80, "mid" in 20, "rare" in 2.
  std::vector<Corpus::RawDocument> raw;
  for (int d = 0; d < 100; ++d) {
    std::string body = "filler" + std::string(1, static_cast<char>('a' + d % 26)) +
                       std::string(1, static_cast<char>('a' + d / 26));
    if (d < 80) body += " . common";
    if (d < 20) body += " . mid";
    if (d < 2) body += " . rare";
    raw.push_back({"d" + std::to_string(d), "", body, {}});
  }
  return Corpus::build(raw, {});
}

TEST_CASE("df band without a background") {
  const Corpus c = banded_corpus();
  const Vocabulary v = build_vocabulary(c, nullptr, {});
  CHECK(v.filter == VocabularyFilter::kDfBand);
  CHECK(v.index.count("mid") == 1);
  CHECK(v.index.count("rare") == 0);
  CHECK(v.index.count("common") == 0);
  CHECK(std::isnan(v.p_value[v.index.at("mid")]));
  CHECK(v.df[v.index.at("mid")] == 20);
  CHECK(v.postings[v.index.at("mid")].size() == 20);
  CHECK(std::is_sorted(v.terms.begin(), v.terms.end()));

  VocabularyOptions strict;
  strict.min_df = 50;
  strict.max_df_ratio = 0.6;
  CHECK_THROWS_WITH_AS(build_vocabulary(c, nullptr, strict),
                       doctest::Contains("relax"), DataError);
  VocabularyOptions bad;
  bad.max_df_ratio = 0.0;
  CHECK_THROWS_AS(build_vocabulary(c, nullptr, bad), ValidationError);
}

TEST_CASE("hypergeometric filter keeps enriched terms") {
  std::vector<Corpus::RawDocument> raw;
  for (int d = 0; d < 20; ++d) {
    raw.push_back({"d" + std::to_string(d), "", "aging . uniform", {}});
  }
  const Corpus c = Corpus::build(raw, {});
  BackgroundStats bg;
  bg.universe_size = 100000;
  bg.term_counts = {{"aging", 30}, {"uniform", 100000}};
  const Vocabulary v = build_vocabulary(c, &bg, {});
  CHECK(v.filter == VocabularyFilter::kHypergeometricBH);
  REQUIRE(v.terms == std::vector<std::string>{"aging"});
  CHECK(v.p_value[0] < 1e-50);

  BackgroundStats tiny;
  tiny.universe_size = 5;
  CHECK_THROWS_AS(build_vocabulary(c, &tiny, {}), DataError);
}

TEST_CASE("background counts below the focus df are clamped") {
  std::vector<Corpus::RawDocument> raw;
  for (int d = 0; d < 10; ++d) raw.push_back({"d" + std::to_string(d), "", "aging", {}});
  const Corpus c = Corpus::build(raw, {});
  BackgroundStats bg;
  bg.universe_size = 1000;
  bg.term_counts = {{"aging", 3}};
  const Vocabulary v = build_vocabulary(c, &bg, {});
  REQUIRE(v.size() == 1);
  CHECK(rel_err(v.p_value[0], to_double(hypergeom_sf_exact(1000, 10, 10, 10))) < 1e-12);
}

TEST_CASE("restore_vocabulary rebuilds postings") {
  const Corpus c = banded_corpus();
  const Vocabulary v = build_vocabulary(c, nullptr, {});
  const Vocabulary r = restore_vocabulary(c, v.terms, v.p_value, v.fdr, v.filter);
  CHECK(r.postings == v.postings);
  CHECK(r.df == v.df);
  CHECK_THROWS_AS(restore_vocabulary(c, {"nope"}, {0.5}, 0.01, VocabularyFilter::kDfBand),
                  DataError);
}

}  // namespace
}  // namespace convex_topics
