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

#ifndef CONVEX_TOPICS_EVALUATION_H_
#define CONVEX_TOPICS_EVALUATION_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "convex_topics/corpus.h"
#include "convex_topics/scoring.h"
#include "convex_topics/solver.h"

namespace convex_topics {

struct EvalConfig {
  std::size_t top_n = 0;  // labels averaged; 0 means min(1000, topic count)
  std::size_t min_positives = 5;
  double fdr = 0.01;
  std::size_t max_topics = 1000;

  void validate() const;
};

struct LabelAlignment {
  std::string label;
  std::uint32_t best_topic = 0;
  double ap = 0.0;

  bool operator==(const LabelAlignment&) const = default;
};

struct EvalReport {
  std::vector<LabelAlignment> labels;  // AP descending, then label
  double maxmap = 0.0;
  std::size_t n_labels_qualified = 0;
  std::size_t n_used = 0;
  std::size_t n_topics = 0;  // topics evaluated

  bool operator==(const EvalReport&) const = default;
};

// Mean over positives of (hits so far / rank) along the full ranking.
double average_precision(std::span<const DocIndex> ranking,
                         std::span<const DocIndex> positives);

// Same value from the 1-based ranks of the positives, in any order.
double average_precision_from_ranks(std::vector<std::size_t> ranks);

// Labels eligible for evaluation, sorted. With a label background the
// enrichment test of the vocabulary filter is applied; otherwise a label
// needs at least min_positives documents.
std::vector<std::string> qualified_labels(const Corpus& corpus,
                                          const BackgroundStats* label_background,
                                          const EvalConfig& config);

// Per qualified label, the best AP over all topic rankings (ties to the
// lowest topic id); the mean of the top N label APs. With more than
// max_topics rankings only the max_topics heaviest topics by q are kept
// (input order when no model is given).
EvalReport maxmap(const Corpus& corpus, std::span<const DocumentScore> rankings,
                  const EvalConfig& config,
                  const BackgroundStats* label_background = nullptr,
                  const TopicModel* model = nullptr, WorkerPool* pool = nullptr);

}  // namespace convex_topics

#endif  // CONVEX_TOPICS_EVALUATION_H_
