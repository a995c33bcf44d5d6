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

#include "convex_topics/evaluation.h"

#include <algorithm>
#include <numeric>
#include <unordered_set>

#include "convex_topics/error.h"
#include "convex_topics/parallel.h"
#include "convex_topics/vocabulary.h"

namespace convex_topics {

void EvalConfig::validate() const {
  if (min_positives < 1) throw ValidationError("min_positives must be at least 1");
  if (!(fdr > 0.0 && fdr < 1.0)) throw ValidationError("fdr must lie in (0, 1)");
  if (max_topics < 1) throw ValidationError("max_topics must be at least 1");
}

double average_precision_from_ranks(std::vector<std::size_t> ranks) {
  if (ranks.empty()) throw DataError("label has no positive documents");
  std::sort(ranks.begin(), ranks.end());
  double sum = 0.0;
  for (std::size_t h = 0; h < ranks.size(); ++h) {
    sum += static_cast<double>(h + 1) / static_cast<double>(ranks[h]);
  }
  return sum / static_cast<double>(ranks.size());
}

double average_precision(std::span<const DocIndex> ranking,
                         std::span<const DocIndex> positives) {
  if (positives.empty()) throw DataError("label has no positive documents");
  const std::unordered_set<DocIndex> wanted(positives.begin(), positives.end());
  std::vector<std::size_t> ranks;
  for (std::size_t r = 0; r < ranking.size(); ++r) {
    if (wanted.count(ranking[r]) > 0) ranks.push_back(r + 1);
  }
  if (ranks.size() != wanted.size()) {
    throw DataError("positive documents missing from the ranking");
  }
  return average_precision_from_ranks(std::move(ranks));
}

std::vector<std::string> qualified_labels(const Corpus& corpus,
                                          const BackgroundStats* label_background,
                                          const EvalConfig& config) {
  config.validate();
  const auto postings = corpus.label_postings();
  std::vector<std::string> out;
  if (label_background != nullptr) {
    const std::uint64_t n_docs = corpus.n_docs();
    if (n_docs > label_background->universe_size) {
      throw DataError("focus corpus is larger than the label background universe");
    }
    std::vector<double> p;
    p.reserve(postings.size());
    for (const auto& [label, docs] : postings) {
      const std::uint64_t k = docs.size();
      const std::uint64_t K = std::max<std::uint64_t>(label_background->count(label), k);
      p.push_back(hypergeom_sf(label_background->universe_size, K, n_docs, k));
    }
    for (std::size_t i : bh_filter(p, config.fdr)) out.push_back(postings[i].first);
  } else {
    for (const auto& [label, docs] : postings) {
      if (docs.size() >= config.min_positives) out.push_back(label);
    }
  }
  if (out.empty()) throw DataError("no label qualifies for evaluation");
  return out;
}

EvalReport maxmap(const Corpus& corpus, std::span<const DocumentScore> rankings,
                  const EvalConfig& config, const BackgroundStats* label_background,
                  const TopicModel* model, WorkerPool* pool) {
  config.validate();
  if (rankings.empty()) throw DataError("no topic rankings to evaluate");
  const std::size_t n_docs = corpus.n_docs();
  for (const auto& r : rankings) {
    if (r.ranking.size() != n_docs) {
      throw DataError("ranking of topic " + std::to_string(r.topic_id) +
                      " does not cover all documents");
    }
  }

  std::vector<std::size_t> topics(rankings.size());
  std::iota(topics.begin(), topics.end(), std::size_t{0});
  if (topics.size() > config.max_topics) {
    if (model != nullptr) {
      std::stable_sort(topics.begin(), topics.end(), [&](std::size_t a, std::size_t b) {
        const double qa = model->q.at(rankings[a].topic_id);
        const double qb = model->q.at(rankings[b].topic_id);
        if (qa != qb) return qa > qb;
        return rankings[a].topic_id < rankings[b].topic_id;
      });
    }
    topics.resize(config.max_topics);
  }

  const auto labels = qualified_labels(corpus, label_background, config);
  const auto all_postings = corpus.label_postings();
  std::vector<const std::vector<DocIndex>*> positives;
  {
    std::size_t k = 0;
    for (const auto& label : labels) {
      while (all_postings[k].first != label) ++k;
      positives.push_back(&all_postings[k].second);
    }
  }

  // ap[t * L + l]
  const std::size_t n_labels = labels.size();
  std::vector<double> ap(topics.size() * n_labels);
  WorkerPool serial(1);
  parallel_for(pool ? *pool : serial, topics.size(), 1, [&](std::size_t b, std::size_t e) {
    std::vector<std::size_t> position(n_docs, 0);
    std::vector<std::size_t> ranks;
    for (std::size_t t = b; t < e; ++t) {
      const auto& ranking = rankings[topics[t]].ranking;
      std::fill(position.begin(), position.end(), 0);
      for (std::size_t r = 0; r < ranking.size(); ++r) {
        if (ranking[r].doc >= n_docs) {
          throw DataError("ranking refers to an unknown document index");
        }
        if (position[ranking[r].doc] != 0) {
          throw DataError("ranking of topic " +
                          std::to_string(rankings[topics[t]].topic_id) +
                          " lists a document twice");
        }
        position[ranking[r].doc] = r + 1;
      }
      for (std::size_t l = 0; l < n_labels; ++l) {
        ranks.clear();
        for (DocIndex d : *positives[l]) ranks.push_back(position[d]);
        ap[t * n_labels + l] = average_precision_from_ranks(ranks);
      }
    }
  });

  EvalReport report;
  report.n_topics = topics.size();
  report.n_labels_qualified = n_labels;
  for (std::size_t l = 0; l < n_labels; ++l) {
    LabelAlignment best{labels[l], rankings[topics[0]].topic_id, ap[l]};
    for (std::size_t t = 1; t < topics.size(); ++t) {
      const double v = ap[t * n_labels + l];
      const std::uint32_t id = rankings[topics[t]].topic_id;
      if (v > best.ap || (v == best.ap && id < best.best_topic)) {
        best.ap = v;
        best.best_topic = id;
      }
    }
    report.labels.push_back(std::move(best));
  }
  std::sort(report.labels.begin(), report.labels.end(),
            [](const LabelAlignment& a, const LabelAlignment& b) {
              return a.ap != b.ap ? a.ap > b.ap : a.label < b.label;
            });
  const std::size_t n =
      config.top_n == 0 ? std::min<std::size_t>(1000, report.n_topics) : config.top_n;
  report.n_used = std::min(n, n_labels);
  double sum = 0.0;
  for (std::size_t l = 0; l < report.n_used; ++l) sum += report.labels[l].ap;
  report.maxmap = sum / static_cast<double>(report.n_used);
  return report;
}

}  // namespace convex_topics
