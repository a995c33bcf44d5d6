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

#include "convex_topics/scoring.h"

#include <algorithm>

#include "convex_topics/error.h"
#include "convex_topics/parallel.h"

namespace convex_topics {

void LocalWeightConfig::validate() const {
  if (!(k > 0.0)) throw ValidationError("local weight k must be positive");
  if (!(avg_len > 0.0)) throw ValidationError("average length must be positive");
}

double local_weight(std::uint32_t tf, std::uint32_t len,
                    const LocalWeightConfig& config) {
  if (tf == 0) return 0.0;
  const double t = tf;
  const double norm =
      config.length_normalize ? static_cast<double>(len) / config.avg_len : 1.0;
  return t / (t + config.k * norm);
}

LocalWeightFn default_local_weight(const LocalWeightConfig& config) {
  config.validate();
  return [config](std::uint32_t tf, std::uint32_t len) {
    return local_weight(tf, len, config);
  };
}

double score_document(const Document& doc, std::uint32_t topic,
                      const CsrMatrix& responsibilities,
                      const std::vector<std::int32_t>& corpus_to_vocab,
                      const LocalWeightFn& weight) {
  double score = 0.0;
  for (const auto& [term, tf] : doc.term_freq) {
    const std::int32_t i = corpus_to_vocab[term];
    if (i < 0) continue;
    const double r = responsibilities.at(static_cast<std::size_t>(i), topic);
    if (r > 0.0) score += r * weight(tf, doc.length);
  }
  return score;
}

void sort_ranking(std::vector<ScoredDocument>& ranking, const Corpus& corpus) {
  const auto& rank = corpus.id_rank();
  std::sort(ranking.begin(), ranking.end(),
            [&](const ScoredDocument& a, const ScoredDocument& b) {
              if (a.score != b.score) return a.score > b.score;
              return rank[a.doc] < rank[b.doc];
            });
}

std::vector<DocumentScore> rank_documents(const Corpus& corpus,
                                          const Vocabulary& vocab,
                                          const TopicModel& model,
                                          const LocalWeightFn& weight,
                                          std::optional<std::size_t> top_k,
                                          WorkerPool* pool) {
  if (vocab.size() != model.n) {
    throw ValidationError("vocabulary size does not match the model");
  }
  if (vocab.n_docs != corpus.n_docs()) {
    throw ValidationError("vocabulary was built on a different corpus");
  }
  const std::size_t n_docs = corpus.n_docs();

  // Local weight of every (term, document) posting, aligned with postings.
  const auto to_vocab = vocab.corpus_to_vocab(corpus);
  std::vector<std::vector<double>> posting_weight(vocab.size());
  for (std::size_t i = 0; i < vocab.size(); ++i) {
    posting_weight[i].reserve(vocab.postings[i].size());
  }
  for (std::size_t d = 0; d < n_docs; ++d) {
    const Document& doc = corpus.document(static_cast<DocIndex>(d));
    for (const auto& [term, tf] : doc.term_freq) {
      if (const auto i = to_vocab[term]; i >= 0) {
        posting_weight[i].push_back(weight(tf, doc.length));
      }
    }
  }

  const auto topics = extract_topics(model);
  std::vector<DocumentScore> out(topics.size());
  WorkerPool serial(1);
  parallel_for(pool ? *pool : serial, topics.size(), 1,
               [&](std::size_t b, std::size_t e) {
    std::vector<double> acc(n_docs, 0.0);
    for (std::size_t t = b; t < e; ++t) {
      // Members in ascending term order fix the summation order.
      auto members = topics[t].members;
      std::sort(members.begin(), members.end());
      for (const auto& [i, r] : members) {
        const auto& docs = vocab.postings[i];
        const auto& w = posting_weight[i];
        for (std::size_t k = 0; k < docs.size(); ++k) acc[docs[k]] += r * w[k];
      }
      DocumentScore& ds = out[t];
      ds.topic_id = topics[t].exemplar;
      ds.ranking.resize(n_docs);
      for (std::size_t d = 0; d < n_docs; ++d) {
        ds.ranking[d] = {static_cast<DocIndex>(d), acc[d]};
        acc[d] = 0.0;
      }
      sort_ranking(ds.ranking, corpus);
      if (top_k && ds.ranking.size() > *top_k) ds.ranking.resize(*top_k);
    }
  });
  return out;
}

}  // namespace convex_topics
