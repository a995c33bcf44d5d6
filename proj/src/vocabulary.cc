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

#include "convex_topics/vocabulary.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "convex_topics/error.h"
#include "convex_topics/parallel.h"

namespace convex_topics {
namespace {

// Extended precision: the three terms cancel heavily once n is in the
// thousands, and the tail sum inherits their error.
long double log_choose(std::uint64_t n, std::uint64_t k) {
  const long double nd = n, kd = k;
  return std::lgamma(nd + 1.0L) - std::lgamma(kd + 1.0L) -
         std::lgamma(nd - kd + 1.0L);
}

long double log_pmf(std::uint64_t M, std::uint64_t K, std::uint64_t m,
                    std::uint64_t x) {
  return log_choose(K, x) + log_choose(M - K, m - x) - log_choose(M, m);
}

}  // namespace

double hypergeom_sf(std::uint64_t M, std::uint64_t K, std::uint64_t m,
                    std::uint64_t k) {
  if (!(k <= m && m <= M && k <= K && K <= M)) {
    throw ValidationError(
        "hypergeom_sf: require k <= m <= M and k <= K <= M (got M=" +
        std::to_string(M) + ", K=" + std::to_string(K) +
        ", m=" + std::to_string(m) + ", k=" + std::to_string(k) + ")");
  }
  const std::uint64_t lo = m + K > M ? m + K - M : 0;
  const std::uint64_t hi = std::min(K, m);
  if (k <= lo) return 1.0;
  if (k > hi) return 0.0;

  // Successive pmf ratios are exact rational factors; the tail is summed
  // relative to its largest term, starting from the end nearest the mode.
  const long double Md = M, Kd = K, md = m;
  const auto mode = static_cast<std::uint64_t>(
      std::floor((md + 1.0L) * (Kd + 1.0L) / (Md + 2.0L)));
  constexpr long double kNegligible = 1e-20L;

  if (k > mode) {
    long double term = 1.0L, sum = 1.0L;
    for (std::uint64_t x = k; x < hi; ++x) {
      const long double xd = x;
      term *= (Kd - xd) * (md - xd) / ((xd + 1.0L) * (Md - Kd - md + xd + 1.0L));
      sum += term;
      if (term < kNegligible * sum) break;
    }
    const double p = std::exp(log_pmf(M, K, m, k)) * sum;
    return std::min(1.0, static_cast<double>(p));
  }

  // Lower tail P(X <= k - 1), then complement.
  long double term = 1.0L, sum = 1.0L;
  for (std::uint64_t x = k - 1; x > lo; --x) {
    const long double xd = x;
    term *= xd * (Md - Kd - md + xd) / ((Kd - xd + 1.0L) * (md - xd + 1.0L));
    sum += term;
    if (term < kNegligible * sum) break;
  }
  const long double lower =
      std::exp(log_pmf(M, K, m, k - 1)) * sum;
  return static_cast<double>(std::max(0.0L, 1.0L - lower));
}

std::vector<std::size_t> bh_filter(std::span<const double> p_values,
                                   double fdr) {
  if (!(fdr > 0.0 && fdr < 1.0)) {
    throw ValidationError("fdr must lie in (0, 1)");
  }
  for (double p : p_values) {
    if (!(p >= 0.0 && p <= 1.0)) {
      throw ValidationError("p-values must lie in [0, 1]");
    }
  }
  const std::size_t m = p_values.size();
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return p_values[a] < p_values[b];
  });
  std::size_t last = 0;
  for (std::size_t rank = 1; rank <= m; ++rank) {
    const double bound =
        static_cast<double>(rank) * fdr / static_cast<double>(m);
    if (p_values[order[rank - 1]] <= bound) last = rank;
  }
  std::vector<std::size_t> accepted;
  if (last == 0) return accepted;
  const double threshold = p_values[order[last - 1]];
  for (std::size_t i = 0; i < m; ++i) {
    if (p_values[i] <= threshold) accepted.push_back(i);
  }
  return accepted;
}

void VocabularyOptions::validate() const {
  if (!(fdr > 0.0 && fdr < 1.0)) throw ValidationError("fdr must lie in (0, 1)");
  if (min_df < 1) throw ValidationError("min_df must be at least 1");
  if (!(max_df_ratio > 0.0 && max_df_ratio <= 1.0)) {
    throw ValidationError("max_df_ratio must lie in (0, 1]");
  }
}

std::vector<std::int32_t> Vocabulary::corpus_to_vocab(const Corpus& corpus) const {
  std::vector<std::int32_t> map(corpus.dictionary().size(), -1);
  for (std::size_t i = 0; i < corpus_ids.size(); ++i) {
    map[corpus_ids[i]] = static_cast<std::int32_t>(i);
  }
  return map;
}

namespace {

Vocabulary assemble(const Corpus& corpus, std::vector<TermId> ids,
                    std::vector<double> p_by_id, double fdr,
                    VocabularyFilter filter) {
  const auto& dict = corpus.dictionary();
  std::vector<std::size_t> order(ids.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return dict.term(ids[a]) < dict.term(ids[b]);
  });

  Vocabulary v;
  v.n_docs = corpus.n_docs();
  v.fdr = fdr;
  v.filter = filter;
  for (std::size_t r = 0; r < order.size(); ++r) {
    const TermId t = ids[order[r]];
    v.terms.push_back(dict.term(t));
    v.index.emplace(dict.term(t), static_cast<std::uint32_t>(r));
    v.df.push_back(corpus.df()[t]);
    v.p_value.push_back(p_by_id[order[r]]);
    v.corpus_ids.push_back(t);
  }
  v.postings.assign(v.terms.size(), {});
  const auto map = v.corpus_to_vocab(corpus);
  for (std::size_t d = 0; d < corpus.n_docs(); ++d) {
    for (const auto& [term, count] : corpus.document(static_cast<DocIndex>(d)).term_freq) {
      if (map[term] >= 0) v.postings[map[term]].push_back(static_cast<DocIndex>(d));
    }
  }
  return v;
}

}  // namespace

Vocabulary build_vocabulary(const Corpus& corpus, const BackgroundStats* background,
                            const VocabularyOptions& options, WorkerPool* pool) {
  options.validate();
  if (corpus.n_docs() == 0) throw DataError("corpus is empty");
  const auto& dict = corpus.dictionary();
  const std::size_t n_candidates = dict.size();
  const std::uint64_t n_docs = corpus.n_docs();

  std::vector<TermId> kept;
  std::vector<double> kept_p;
  if (background != nullptr) {
    if (n_docs > background->universe_size) {
      throw DataError("focus corpus (" + std::to_string(n_docs) +
                      " documents) is larger than the background universe (" +
                      std::to_string(background->universe_size) + ")");
    }
    std::vector<double> p(n_candidates);
    WorkerPool serial(1);
    parallel_for(pool ? *pool : serial, n_candidates, kDefaultGrain,
                 [&](std::size_t b, std::size_t e) {
                   for (std::size_t t = b; t < e; ++t) {
                     const std::uint64_t k = corpus.df()[t];
                     const std::uint64_t K = std::max<std::uint64_t>(
                         background->count(dict.term(static_cast<TermId>(t))), k);
                     p[t] = hypergeom_sf(background->universe_size, K, n_docs, k);
                   }
                 });
    for (std::size_t t : bh_filter(p, options.fdr)) {
      kept.push_back(static_cast<TermId>(t));
      kept_p.push_back(p[t]);
    }
  } else {
    for (std::size_t t = 0; t < n_candidates; ++t) {
      const std::uint32_t df = corpus.df()[t];
      if (df >= options.min_df &&
          static_cast<double>(df) / static_cast<double>(n_docs) <=
              options.max_df_ratio) {
        kept.push_back(static_cast<TermId>(t));
        kept_p.push_back(std::numeric_limits<double>::quiet_NaN());
      }
    }
  }
  if (kept.empty()) {
    throw DataError(
        "vocabulary is empty after filtering; relax fdr, min_df or "
        "max_df_ratio");
  }
  return assemble(corpus, std::move(kept), std::move(kept_p), options.fdr,
                  background ? VocabularyFilter::kHypergeometricBH
                             : VocabularyFilter::kDfBand);
}

Vocabulary restore_vocabulary(const Corpus& corpus, std::vector<std::string> terms,
                              std::vector<double> p_values, double fdr,
                              VocabularyFilter filter) {
  if (terms.empty()) throw DataError("stored vocabulary is empty");
  if (p_values.size() != terms.size()) {
    throw DataError("stored vocabulary: p-value count mismatch");
  }
  std::vector<TermId> ids;
  ids.reserve(terms.size());
  for (const auto& term : terms) {
    auto id = corpus.dictionary().find(term);
    if (!id) {
      throw DataError("stored vocabulary term '" + term +
                      "' does not occur in the corpus");
    }
    ids.push_back(*id);
  }
  Vocabulary v = assemble(corpus, std::move(ids), std::move(p_values), fdr, filter);
  for (std::size_t i = 1; i < v.terms.size(); ++i) {
    if (v.terms[i] == v.terms[i - 1]) {
      throw DataError("stored vocabulary repeats term '" + v.terms[i] + "'");
    }
  }
  return v;
}

}  // namespace convex_topics
