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

#ifndef CONVEX_TOPICS_JSON_IO_H_
#define CONVEX_TOPICS_JSON_IO_H_

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "convex_topics/evaluation.h"
#include "convex_topics/scoring.h"
#include "convex_topics/solver.h"
#include "convex_topics/vocabulary.h"
#include "json.hpp"

namespace convex_topics {

using Json = nlohmann::json;

// {n_docs, fdr, filter, terms: [{term, df, p_value}]}; p_value is null when
// the df band was used.
Json vocabulary_to_json(const Vocabulary& vocab);
Vocabulary vocabulary_from_json(const Json& json, const Corpus& corpus);
// Terms, df and p-values only; no postings. Enough to name model terms.
Vocabulary vocabulary_terms_from_json(const Json& json);

Json solver_config_to_json(const SolverConfig& config);
SolverConfig solver_config_from_json(const Json& json);

// {n, config, converged, iterations, loglik, loglik_trace, q: [[j, q_j]],
//  topics: [{exemplar_id, exemplar_term, members: [[term_id, r]]}]}
Json model_to_json(const TopicModel& model, const Vocabulary* vocab = nullptr);
TopicModel model_from_json(const Json& json);

// [{topic_id, ranking: [[doc_id, score]]}]
Json scores_to_json(const std::vector<DocumentScore>& rankings, const Corpus& corpus);
// Reads rankings by document id. Documents a ranking omits are appended
// after its listed entries as zero scores in id order.
std::vector<DocumentScore> scores_from_json(const Json& json, const Corpus& corpus);

// {maxmap, n_used, n_labels_qualified, n_topics, labels: [{label, best_topic, ap}]}
Json eval_to_json(const EvalReport& report);
EvalReport eval_from_json(const Json& json);

Json read_json(const std::filesystem::path& path);
// Writes json.dump(2) plus a trailing newline.
void write_json(const Json& json, const std::filesystem::path& path);
void write_text(const std::string& text, const std::filesystem::path& path);

}  // namespace convex_topics

#endif  // CONVEX_TOPICS_JSON_IO_H_
