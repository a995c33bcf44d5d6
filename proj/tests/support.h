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

// Test-side references: exact rational oracles, brute-force re-derivations
// and seeded instance generators. Nothing here calls into the library's
// numerical code, so agreement is evidence rather than tautology.

#ifndef CONVEX_TOPICS_TESTS_SUPPORT_H_
#define CONVEX_TOPICS_TESTS_SUPPORT_H_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "json.hpp"

#include "convex_topics/corpus.h"
#include "convex_topics/scoring.h"
#include "convex_topics/similarity.h"

namespace convex_topics::testing {

using boost::multiprecision::cpp_int;
using boost::multiprecision::cpp_rational;

inline double to_double(const cpp_rational& r) {
  return r.convert_to<double>();
}

inline double rel_err(double got, double want) {
  if (got == want) return 0.0;
  return std::abs(got - want) / std::max(std::abs(want), 1e-300);
}

inline cpp_int binom(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  cpp_int r = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    r *= n - k + i;
    r /= i;
  }
  return r;
}

// P(X >= k), X ~ Hypergeometric(M, K, m), by exact enumeration.
inline cpp_rational hypergeom_sf_exact(std::uint64_t M, std::uint64_t K,
                                       std::uint64_t m, std::uint64_t k) {
  cpp_int num = 0;
  for (std::uint64_t x = k; x <= std::min(K, m); ++x) {
    if (m - x > M - K) continue;
    num += binom(K, x) * binom(M - K, m - x);
  }
  return cpp_rational(num, binom(M, m));
}

// Step-up rule restated without sorting: k* is the largest k with at least k
// p-values under k * fdr / m; exactly those are accepted.
inline std::vector<std::size_t> bh_exhaustive(const std::vector<double>& p,
                                              double fdr) {
  const std::size_t m = p.size();
  std::size_t best = 0;
  for (std::size_t k = 1; k <= m; ++k) {
    const double bound = static_cast<double>(k) * fdr / static_cast<double>(m);
    std::size_t below = 0;
    for (double v : p) below += v <= bound;
    if (below >= k) best = k;
  }
  std::vector<std::size_t> out;
  if (best == 0) return out;
  const double bound = static_cast<double>(best) * fdr / static_cast<double>(m);
  for (std::size_t i = 0; i < m; ++i) {
    if (p[i] <= bound) out.push_back(i);
  }
  return out;
}

inline double dice_exact(std::uint64_t a, std::uint64_t b, std::uint64_t c) {
  return to_double(cpp_rational(2 * c, a + b));
}

// AP as the mean over positives of precision at the positive's rank.
template <class Id>
double ap_exact(const std::vector<Id>& ranking, const std::set<Id>& positives) {
  cpp_rational sum = 0;
  std::uint64_t hits = 0;
  for (std::size_t r = 0; r < ranking.size(); ++r) {
    if (positives.count(ranking[r])) {
      ++hits;
      sum += cpp_rational(hits, r + 1);
    }
  }
  return to_double(sum / positives.size());
}

inline double loglik_dense(const std::vector<std::vector<double>>& s,
                           const std::vector<double>& q) {
  double total = 0.0;
  for (const auto& row : s) {
    double z = 0.0;
    for (std::size_t j = 0; j < q.size(); ++j) z += row[j] * q[j];
    if (z <= 0.0) return -std::numeric_limits<double>::infinity();
    total += std::log(z);
  }
  return total / static_cast<double>(s.size());
}

// Best objective value over the simplex lattice with spacing 1/steps.
inline double grid_search_max(const std::vector<std::vector<double>>& s,
                              int steps = 200) {
  const std::size_t n = s.size();
  double best = -std::numeric_limits<double>::infinity();
  std::vector<int> units(n, 0);
  std::vector<double> q(n);
  auto rec = [&](auto&& self, std::size_t j, int left) -> void {
    if (j + 1 == n) {
      units[j] = left;
      for (std::size_t t = 0; t < n; ++t) q[t] = static_cast<double>(units[t]) / steps;
      best = std::max(best, loglik_dense(s, q));
      return;
    }
    for (int u = 0; u <= left; ++u) {
      units[j] = u;
      self(self, j + 1, left - u);
    }
  };
  rec(rec, 0, steps);
  return best;
}

// Symmetric similarity with unit diagonal and off-diagonal values in
// [0.05, 1), each present with probability `density`.
inline std::vector<std::vector<double>> random_similarity(std::mt19937_64& rng,
                                                          std::size_t n,
                                                          double density) {
  std::vector<std::vector<double>> s(n, std::vector<double>(n, 0.0));
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_real_distribution<double> value(0.05, 1.0);
  for (std::size_t i = 0; i < n; ++i) {
    s[i][i] = 1.0;
    for (std::size_t j = i + 1; j < n; ++j) {
      if (u(rng) < density) s[i][j] = s[j][i] = value(rng);
    }
  }
  return s;
}

inline std::vector<double> random_simplex(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> u(0.05, 1.0);
  std::vector<double> q(n);
  for (double& v : q) v = u(rng);
  const double total = std::accumulate(q.begin(), q.end(), 0.0);
  for (double& v : q) v /= total;
  return q;
}

// Lower-case letter spelling of an index, prefixed so it never collides
// with a stopword: 0 -> "zqa", 1 -> "zqb", ...
inline std::string synthetic_word(std::size_t index) {
  std::string out;
  do {
    out.insert(out.begin(), static_cast<char>('a' + index % 26));
    index /= 26;
  } while (index > 0);
  return "zq" + out;
}

struct SyntheticSpec {
  std::size_t n_docs = 10000;
  std::size_t n_words = 3000;
  std::size_t n_topics = 30;
  std::size_t doc_len = 60;
  std::uint64_t seed = 7;
};

// Topic-structured documents with labels. Tokens are comma separated so no
// phrase candidates form; each word is placed in at least min_df documents
// and its topic spans well under half the corpus, so the df band keeps all
// n_words terms exactly.
inline std::vector<Corpus::RawDocument> synthetic_corpus(const SyntheticSpec& spec) {
  std::mt19937_64 rng(spec.seed);
  const std::size_t per_topic = spec.n_words / spec.n_topics;
  std::vector<Corpus::RawDocument> docs(spec.n_docs);
  std::uniform_int_distribution<std::size_t> pick_topic(0, spec.n_topics - 1);
  std::geometric_distribution<std::size_t> rank(8.0 / static_cast<double>(per_topic));
  for (std::size_t d = 0; d < spec.n_docs; ++d) {
    auto& doc = docs[d];
    char id[32];
    std::snprintf(id, sizeof id, "doc%06zu", d);
    doc.id = id;
    const std::size_t t = d % spec.n_topics;
    const std::size_t t2 = pick_topic(rng);
    doc.labels = {"group" + std::to_string(t)};
    std::string body;
    // Seed words guarantee coverage: three consecutive slots per document
    // cycle through the topic's words, about ten documents each at the
    // default sizes.
    for (std::size_t j = 0; j < 3; ++j) {
      const std::size_t slot = ((d / spec.n_topics) * 3 + j) % per_topic;
      if (j > 0) body += ", ";
      body += synthetic_word(t * per_topic + slot);
    }
    for (std::size_t k = 0; k < spec.doc_len; ++k) {
      const std::size_t topic = k % 4 == 3 ? t2 : t;
      const std::size_t w = std::min(rank(rng), per_topic - 1);
      body += ", ";
      body += synthetic_word(topic * per_topic + w);
    }
    doc.body = std::move(body);
  }
  return docs;
}

inline void write_jsonl(const std::vector<Corpus::RawDocument>& docs,
                        const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  for (const auto& d : docs) {
    nlohmann::json line = {{"id", d.id}, {"title", d.title}, {"text", d.body},
                           {"labels", d.labels}};
    out << line.dump() << "\n";
  }
}

// Documents d0..d(n-1) with the given label sets.
inline Corpus labeled_corpus(const std::vector<std::vector<std::string>>& labels) {
  std::vector<Corpus::RawDocument> raw;
  for (std::size_t d = 0; d < labels.size(); ++d) {
    std::string id = std::to_string(d);
    id.insert(0, id.size() < 4 ? 4 - id.size() : 0, '0');
    raw.push_back({"d" + id, "", "", labels[d]});
  }
  return Corpus::build(raw, {});
}

inline DocumentScore ranking_of(std::uint32_t topic, const std::vector<DocIndex>& order) {
  DocumentScore s{topic, {}};
  for (std::size_t r = 0; r < order.size(); ++r) {
    s.ranking.push_back({order[r], static_cast<double>(order.size() - r)});
  }
  return s;
}

// Small labeled instances: up to 5 labels x 5 topics over at most 25
// documents.
struct EvalInstance {
  Corpus corpus;
  std::vector<DocumentScore> rankings;
};

inline EvalInstance random_eval_instance(std::mt19937_64& rng) {
  const std::size_t n_docs = std::uniform_int_distribution<std::size_t>(3, 25)(rng);
  const std::size_t n_labels = std::uniform_int_distribution<std::size_t>(1, 5)(rng);
  const std::size_t n_topics = std::uniform_int_distribution<std::size_t>(1, 5)(rng);
  std::vector<std::vector<std::string>> labels(n_docs);
  for (std::size_t l = 0; l < n_labels; ++l) {
    const std::string name(1, static_cast<char>('a' + l));
    labels[l % n_docs].push_back(name);  // at least one positive
    for (auto& d : labels) {
      if (std::uniform_int_distribution<int>(0, 3)(rng) == 0) d.push_back(name);
    }
  }
  EvalInstance inst{labeled_corpus(labels), {}};
  std::vector<std::uint32_t> ids(n_topics);
  std::iota(ids.begin(), ids.end(), 0);
  std::shuffle(ids.begin(), ids.end(), rng);
  for (std::size_t t = 0; t < n_topics; ++t) {
    std::vector<DocIndex> order(n_docs);
    std::iota(order.begin(), order.end(), 0);
    // Few distinct orders, so AP ties across topics are common.
    std::shuffle(order.begin(), order.end(), rng);
    if (t > 0 && std::uniform_int_distribution<int>(0, 2)(rng) == 0) {
      order.clear();
      for (const auto& sd : inst.rankings.front().ranking) order.push_back(sd.doc);
    }
    inst.rankings.push_back(ranking_of(ids[t] * 3, order));
  }
  return inst;
}

// Exhaustive (label, topic) search, written independently of the library.
inline double maxmap_exact(const Corpus& c, const std::vector<DocumentScore>& rankings,
                           std::size_t top_n, std::vector<std::pair<std::string, std::uint32_t>>* best) {
  std::map<std::string, std::set<DocIndex>> pos;
  for (DocIndex d = 0; d < c.n_docs(); ++d) {
    for (const auto& l : c.document(d).labels) pos[l].insert(d);
  }
  std::vector<double> aps;
  for (const auto& [label, docs] : pos) {
    double top = -1.0;
    std::uint32_t arg = 0;
    for (const auto& r : rankings) {
      std::vector<DocIndex> order;
      for (const auto& sd : r.ranking) order.push_back(sd.doc);
      const double ap = testing::ap_exact(order, docs);
      if (ap > top || (ap == top && r.topic_id < arg)) {
        top = ap;
        arg = r.topic_id;
      }
    }
    aps.push_back(top);
    best->emplace_back(label, arg);
  }
  std::sort(aps.rbegin(), aps.rend());
  const std::size_t n = std::min(top_n, aps.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) sum += aps[i];
  return sum / static_cast<double>(n);
}

// Newsgroup-style tree: <dir>/<first label>/<id>, with a Subject header.
inline void write_newsgroups(const std::vector<Corpus::RawDocument>& docs,
                             const std::filesystem::path& dir) {
  for (const auto& d : docs) {
    const auto group = dir / (d.labels.empty() ? std::string("misc") : d.labels.front());
    std::filesystem::create_directories(group);
    std::ofstream out(group / d.id, std::ios::binary);
    out << "From: someone@example.org\nSubject: " << d.title << "\n\n" << d.body << "\n";
  }
}

// Fresh scratch directory under the build tree's temp area.
inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("convex_topics_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace convex_topics::testing

#endif  // CONVEX_TOPICS_TESTS_SUPPORT_H_
