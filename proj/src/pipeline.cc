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

#include "convex_topics/pipeline.h"

#include <bit>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "convex_topics/digest.h"
#include "convex_topics/parallel.h"

namespace convex_topics {
namespace {

constexpr int kSimilarityCacheFormat = 1;

std::string hex_bits(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(std::bit_cast<std::uint64_t>(v)));
  return buf;
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Json config_echo(const RunConfig& c) {
  auto opt = [](const std::optional<std::filesystem::path>& p) {
    return p ? Json(p->generic_string()) : Json(nullptr);
  };
  return {{"corpus", c.corpus.generic_string()},
          {"format", corpus_format_name(c.format)},
          {"background", opt(c.background)},
          {"label_background", opt(c.label_background)},
          {"stopwords", opt(c.stopwords)},
          {"max_phrase_len", c.max_phrase_len},
          {"fdr", c.vocab.fdr},
          {"min_df", c.vocab.min_df},
          {"max_df_ratio", c.vocab.max_df_ratio},
          {"cutoff", c.cutoff},
          {"solver", solver_config_to_json(c.solver)},
          {"scoring", {{"k", c.local_k},
                       {"length_normalize", c.length_normalize},
                       {"top_k", c.top_k}}},
          {"eval", {{"top_n", c.eval.top_n},
                    {"min_positives", c.eval.min_positives},
                    {"max_topics", c.eval.max_topics}}},
          {"threads", c.threads},
          {"output", c.output.generic_string()}};
}

template <class F>
auto timed_stage(const std::string& name, std::vector<StageRecord>& stages,
                 const StageCallback& on_stage, F&& body) {
  const auto start = std::chrono::steady_clock::now();
  StageRecord record;
  record.stage = name;
  record.status = "ok";
  try {
    auto result = body(record);
    record.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    stages.push_back(record);
    if (on_stage) on_stage(record);
    return result;
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError(name, e.what());
  }
}

}  // namespace

Corpus load_configured_corpus(const RunConfig& config, WorkerPool* pool) {
  std::optional<StopwordSet> stopwords;
  if (config.stopwords) stopwords = load_stopwords(*config.stopwords);
  CorpusOptions options;
  options.max_phrase_len = config.max_phrase_len;
  options.stopwords = stopwords ? &*stopwords : nullptr;
  return load_corpus(config.corpus, config.format, options, pool);
}

std::optional<BackgroundStats> load_optional_background(
    const std::optional<std::filesystem::path>& path) {
  if (!path) return std::nullopt;
  return load_background(*path);
}

LocalWeightFn configured_local_weight(const RunConfig& config, const Corpus& corpus) {
  LocalWeightConfig lw;
  lw.k = config.local_k;
  lw.length_normalize = config.length_normalize;
  lw.avg_len = corpus.average_length();
  if (!(lw.avg_len > 0.0)) lw.avg_len = 1.0;
  return default_local_weight(lw);
}

SparseSimilarity cached_similarity(const RunConfig& config, const Vocabulary& vocab,
                                   WorkerPool* pool, bool* cached) {
  namespace fs = std::filesystem;
  const std::string key =
      sha256_hex(vocabulary_to_json(vocab).dump() + "\ncutoff=" + hex_bits(config.cutoff) +
                 "\nformat=" + std::to_string(kSimilarityCacheFormat));
  const fs::path bin = config.output / artifacts::kSimilarity;
  const fs::path key_file = config.output / artifacts::kSimilarityKey;
  if (fs::exists(bin) && fs::exists(key_file) && read_text(key_file) == key + "\n") {
    try {
      SparseSimilarity s = read_similarity(bin);
      if (s.n() == vocab.size()) {
        if (cached) *cached = true;
        return s;
      }
    } catch (const DataError&) {
      // Unreadable cache: rebuild below.
    }
  }
  SparseSimilarity s = build_similarity(vocab, config.cutoff, pool);
  fs::create_directories(config.output);
  write_similarity(s, bin);
  write_text(key + "\n", key_file);
  if (cached) *cached = false;
  return s;
}

ReportInput make_report_input(const TopicModel& model, const Vocabulary& vocab,
                              const std::vector<DocumentScore>& rankings,
                              const Corpus& corpus, const std::optional<EvalReport>& eval) {
  ReportInput input;
  input.topics = extract_topics(model, vocab);
  for (const auto& ds : rankings) {
    auto& out = input.rankings[ds.topic_id];
    for (const auto& sd : ds.ranking) {
      out.emplace_back(corpus.document(sd.doc).id, sd.score);
      if (out.size() >= ReportOptions{}.top_documents) break;
    }
  }
  for (const auto& doc : corpus.documents()) {
    if (!doc.title.empty()) input.titles.emplace(doc.id, doc.title);
  }
  input.eval = eval;
  return input;
}

PipelineResult run_pipeline(const RunConfig& config, const StageCallback& on_stage) {
  namespace fs = std::filesystem;
  config.validate(true);
  fs::create_directories(config.output);
  WorkerPool pool(resolve_threads(config.threads));
  SolverConfig solver = config.solver;
  solver.threads = pool.size();

  Json inputs = Json::object();
  inputs["corpus"] = {{"path", config.corpus.generic_string()},
                      {"sha256", sha256_path(config.corpus)}};
  for (const auto& [name, path] :
       {std::pair{"background", config.background},
        std::pair{"label_background", config.label_background},
        std::pair{"stopwords", config.stopwords}}) {
    if (path) inputs[name] = {{"path", path->generic_string()}, {"sha256", sha256_file(*path)}};
  }

  PipelineResult result;
  auto& stages = result.stages;

  result.corpus = timed_stage("load", stages, on_stage, [&](StageRecord& r) {
    Corpus c = load_configured_corpus(config, &pool);
    r.details = {{"n_docs", c.n_docs()}, {"n_candidates", c.dictionary().size()}};
    return c;
  });
  const Corpus& corpus = result.corpus;

  result.vocab = timed_stage("vocabulary", stages, on_stage, [&](StageRecord& r) {
    auto bg = load_optional_background(config.background);
    if (bg) {
      const auto stale = background_violations(corpus, *bg);
      r.details["background_clamped_terms"] = stale.size();
    }
    Vocabulary v = build_vocabulary(corpus, bg ? &*bg : nullptr, config.vocab, &pool);
    write_json(vocabulary_to_json(v), config.output / artifacts::kVocabulary);
    r.details["n_terms"] = v.size();
    r.details["filter"] = bg ? "hypergeometric_bh" : "df_band";
    return v;
  });
  const Vocabulary& vocab = result.vocab;

  result.similarity = timed_stage("similarity", stages, on_stage, [&](StageRecord& r) {
    bool cached = false;
    SparseSimilarity s = cached_similarity(config, vocab, &pool, &cached);
    if (cached) r.status = "cached";
    r.details = {{"n", s.n()}, {"nnz", s.matrix.nnz()}};
    return s;
  });

  result.model = timed_stage("fit", stages, on_stage, [&](StageRecord& r) {
    TopicModel m = fit(result.similarity, solver);
    m.config.threads = config.solver.threads;
    write_json(model_to_json(m, &vocab), config.output / artifacts::kModel);
    r.details = {{"topics", m.exemplars.size()},
                 {"iterations", m.iterations},
                 {"converged", m.converged},
                 {"loglik", m.loglik}};
    return m;
  });

  result.rankings = timed_stage("rank", stages, on_stage, [&](StageRecord& r) {
    auto rankings = rank_documents(corpus, vocab, result.model,
                                   configured_local_weight(config, corpus), std::nullopt,
                                   &pool);
    std::vector<DocumentScore> written = rankings;
    if (config.top_k > 0) {
      for (auto& ds : written) {
        if (ds.ranking.size() > config.top_k) ds.ranking.resize(config.top_k);
      }
    }
    write_json(scores_to_json(written, corpus), config.output / artifacts::kScores);
    r.details = {{"topics", rankings.size()}, {"top_k", config.top_k}};
    return rankings;
  });

  result.eval = timed_stage("evaluate", stages, on_stage, [&](StageRecord& r) {
    std::optional<EvalReport> report;
    bool labeled = false;
    for (const auto& d : corpus.documents()) labeled = labeled || !d.labels.empty();
    if (!labeled) {
      r.status = "skipped";
      r.details = {{"reason", "corpus has no labels"}};
      fs::remove(config.output / artifacts::kEval);
      return report;
    }
    auto label_bg = load_optional_background(config.label_background);
    report = maxmap(corpus, result.rankings, config.eval, label_bg ? &*label_bg : nullptr,
                    &result.model, &pool);
    write_json(eval_to_json(*report), config.output / artifacts::kEval);
    r.details = {{"maxmap", report->maxmap},
                 {"n_used", report->n_used},
                 {"n_labels_qualified", report->n_labels_qualified}};
    return report;
  });

  write_text(render_report(make_report_input(result.model, vocab, result.rankings, corpus,
                                             result.eval)),
             config.output / artifacts::kReport);

  Json stage_list = Json::array();
  for (const auto& s : stages) {
    stage_list.push_back(
        {{"stage", s.stage}, {"status", s.status}, {"seconds", s.seconds}, {"details", s.details}});
  }
  Json manifest = {{"versions", {{"convex_topics", CONVEX_TOPICS_VERSION},
                                 {"similarity_cache_format", kSimilarityCacheFormat}}},
                   {"config", config_echo(config)},
                   {"inputs", std::move(inputs)},
                   {"threads_used", pool.size()},
                   {"stages", std::move(stage_list)}};
  Json files = Json::array();
  for (const char* name : {artifacts::kVocabulary, artifacts::kSimilarity, artifacts::kModel,
                           artifacts::kScores, artifacts::kEval, artifacts::kReport}) {
    if (fs::exists(config.output / name)) {
      files.push_back({{"file", name}, {"sha256", sha256_file(config.output / name)}});
    }
  }
  manifest["artifacts"] = std::move(files);
  write_json(manifest, config.output / artifacts::kManifest);
  return result;
}

}  // namespace convex_topics
