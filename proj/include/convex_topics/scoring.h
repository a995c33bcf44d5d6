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

#ifndef CONVEX_TOPICS_SCORING_H_
#define CONVEX_TOPICS_SCORING_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "convex_topics/corpus.h"
#include "convex_topics/solver.h"
#include "convex_topics/vocabulary.h"

namespace convex_topics {

// Saturating, length-normalized term weight tf / (tf + k * len / avg_len).
struct LocalWeightConfig {
  double k = 1.0;
  bool length_normalize = true;
  double avg_len = 1.0;

  void validate() const;
};

double local_weight(std::uint32_t tf, std::uint32_t len,
                    const LocalWeightConfig& config);

// Replaceable weighting: (tf, document length) -> weight, zero for tf == 0.
using LocalWeightFn = std::function<double(std::uint32_t, std::uint32_t)>;

LocalWeightFn default_local_weight(const LocalWeightConfig& config);

struct ScoredDocument {
  DocIndex doc = 0;
  double score = 0.0;

  bool operator==(const ScoredDocument&) const = default;
};

// Ranking of documents for one topic: score descending, then document id.
struct DocumentScore {
  std::uint32_t topic_id = 0;
  std::vector<ScoredDocument> ranking;

  bool operator==(const DocumentScore&) const = default;
};

// Sum over the document's vocabulary terms of r_ij * local weight.
double score_document(const Document& doc, std::uint32_t topic,
                      const CsrMatrix& responsibilities,
                      const std::vector<std::int32_t>& corpus_to_vocab,
                      const LocalWeightFn& weight);

// Scores every document for every topic, in extract_topics order. With
// top_k set, each ranking keeps only its first top_k entries.
std::vector<DocumentScore> rank_documents(const Corpus& corpus,
                                          const Vocabulary& vocab,
                                          const TopicModel& model,
                                          const LocalWeightFn& weight,
                                          std::optional<std::size_t> top_k = {},
                                          WorkerPool* pool = nullptr);

// Sorts (score desc, id asc) in place.
void sort_ranking(std::vector<ScoredDocument>& ranking, const Corpus& corpus);

}  // namespace convex_topics

#endif  // CONVEX_TOPICS_SCORING_H_
