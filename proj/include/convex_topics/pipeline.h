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

#ifndef CONVEX_TOPICS_PIPELINE_H_
#define CONVEX_TOPICS_PIPELINE_H_

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "convex_topics/config.h"
#include "convex_topics/corpus.h"
#include "convex_topics/error.h"
#include "convex_topics/evaluation.h"
#include "convex_topics/json_io.h"
#include "convex_topics/report.h"
#include "convex_topics/scoring.h"
#include "convex_topics/similarity.h"
#include "convex_topics/solver.h"
#include "convex_topics/vocabulary.h"

namespace convex_topics {

// A failure inside a pipeline stage, tagged with the stage name.
class StageError : public Error {
 public:
  StageError(std::string stage, const std::string& cause)
      : Error(stage + ": " + cause), stage_(std::move(stage)) {}
  const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

struct StageRecord {
  std::string stage;
  std::string status;  // "ok", "cached" or "skipped"
  double seconds = 0.0;
  Json details = Json::object();
};

using StageCallback = std::function<void(const StageRecord&)>;

// Artifact file names inside the output directory.
namespace artifacts {
inline constexpr const char* kVocabulary = "vocab.json";
inline constexpr const char* kSimilarity = "similarity.bin";
inline constexpr const char* kSimilarityKey = "similarity.key";
inline constexpr const char* kModel = "model.json";
inline constexpr const char* kScores = "scores.json";
inline constexpr const char* kEval = "eval.json";
inline constexpr const char* kReport = "report.html";
inline constexpr const char* kManifest = "manifest.json";
}  // namespace artifacts

Corpus load_configured_corpus(const RunConfig& config, WorkerPool* pool = nullptr);
std::optional<BackgroundStats> load_optional_background(
    const std::optional<std::filesystem::path>& path);
LocalWeightFn configured_local_weight(const RunConfig& config, const Corpus& corpus);

// Reads similarity.bin from the output directory when its key matches the
// vocabulary and cutoff, otherwise builds and writes it. `cached` reports
// which happened.
SparseSimilarity cached_similarity(const RunConfig& config, const Vocabulary& vocab,
                                   WorkerPool* pool, bool* cached = nullptr);

ReportInput make_report_input(const TopicModel& model, const Vocabulary& vocab,
                              const std::vector<DocumentScore>& rankings,
                              const Corpus& corpus, const std::optional<EvalReport>& eval);

struct PipelineResult {
  Corpus corpus;
  Vocabulary vocab;
  SparseSimilarity similarity;
  TopicModel model;
  std::vector<DocumentScore> rankings;  // untruncated
  std::optional<EvalReport> eval;       // absent for unlabeled corpora
  std::vector<StageRecord> stages;
};

// load -> vocabulary -> similarity -> fit -> rank -> evaluate, writing every
// artifact and a manifest into config.output.
PipelineResult run_pipeline(const RunConfig& config, const StageCallback& on_stage = {});

}  // namespace convex_topics

#endif  // CONVEX_TOPICS_PIPELINE_H_
