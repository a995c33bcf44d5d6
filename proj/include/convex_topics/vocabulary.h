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

#ifndef CONVEX_TOPICS_VOCABULARY_H_
#define CONVEX_TOPICS_VOCABULARY_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "convex_topics/corpus.h"

namespace convex_topics {

// P(X >= k) for X ~ Hypergeometric(population M, successes K, draws m).
// Evaluated in log space; requires k <= m <= M and k <= K <= M.
double hypergeom_sf(std::uint64_t M, std::uint64_t K, std::uint64_t m,
                    std::uint64_t k);

// Benjamini-Hochberg step-up rule. Returns the accepted indices in ascending
// order. Tied p-values are accepted or rejected together.
std::vector<std::size_t> bh_filter(std::span<const double> p_values,
                                   double fdr = 0.01);

enum class VocabularyFilter { kHypergeometricBH, kDfBand };

struct VocabularyOptions {
  double fdr = 0.01;
  std::uint32_t min_df = 5;
  double max_df_ratio = 0.5;

  void validate() const;
};

// The working vocabulary: terms sorted by string with dense ids.
struct Vocabulary {
  std::vector<std::string> terms;
  std::unordered_map<std::string, std::uint32_t> index;
  std::vector<std::uint32_t> df;
  // Hypergeometric p-value per term; NaN when the df band was used.
  std::vector<double> p_value;
  // Ascending document indices containing each term.
  std::vector<std::vector<DocIndex>> postings;
  // Dictionary id of each term in the corpus it was built from.
  std::vector<TermId> corpus_ids;
  std::size_t n_docs = 0;
  double fdr = 0.01;
  VocabularyFilter filter = VocabularyFilter::kDfBand;

  std::size_t size() const { return terms.size(); }

  // Vocabulary id of every corpus dictionary term, -1 when not retained.
  std::vector<std::int32_t> corpus_to_vocab(const Corpus& corpus) const;
};

// Filters the corpus candidates. With a background collection, terms are
// tested for over-representation and kept under BH control at options.fdr;
// without one, terms inside the document-frequency band are kept.
Vocabulary build_vocabulary(const Corpus& corpus, const BackgroundStats* background,
                            const VocabularyOptions& options,
                            WorkerPool* pool = nullptr);

// Rebuilds a vocabulary over `corpus` from a stored term list (e.g. a
// vocabulary export). p-values are taken as given.
Vocabulary restore_vocabulary(const Corpus& corpus, std::vector<std::string> terms,
                              std::vector<double> p_values, double fdr,
                              VocabularyFilter filter);

}  // namespace convex_topics

#endif  // CONVEX_TOPICS_VOCABULARY_H_
