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

#ifndef CONVEX_TOPICS_CONFIG_H_
#define CONVEX_TOPICS_CONFIG_H_

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "convex_topics/corpus.h"
#include "convex_topics/evaluation.h"
#include "convex_topics/similarity.h"
#include "convex_topics/solver.h"
#include "convex_topics/vocabulary.h"

namespace convex_topics {

// Settings of an end-to-end run. Every field has a key in the flat config
// file; see setting_keys().
struct RunConfig {
  std::filesystem::path corpus;
  CorpusFormat format = CorpusFormat::kJsonl;
  std::optional<std::filesystem::path> background;
  std::optional<std::filesystem::path> label_background;
  std::optional<std::filesystem::path> stopwords;
  std::size_t max_phrase_len = 3;
  VocabularyOptions vocab;
  double cutoff = kDefaultCutoff;
  SolverConfig solver;
  double local_k = 1.0;
  bool length_normalize = true;
  std::size_t top_k = 30;  // entries per topic in written scores; 0 keeps all
  EvalConfig eval;
  unsigned threads = 0;
  std::filesystem::path output = "out";

  // Range checks of every numeric field; with check_paths, also that the
  // referenced input files exist.
  void validate(bool check_paths = true) const;
};

struct SettingInfo {
  std::string key;          // config-file key, e.g. "solver.tol"
  std::string flag;         // CLI flag, e.g. "--solver-tol"
  std::string description;  // includes the default
};

const std::vector<SettingInfo>& setting_keys();

// Sets one field from its textual value. Relative paths are resolved against
// base_dir. Throws ValidationError on unknown keys or unparsable values.
void apply_setting(RunConfig& config, std::string_view key, std::string_view value,
                   const std::filesystem::path& base_dir = {});

// Parses a flat key-value file: `key = value` lines, optional [section]
// headers prefixing keys with "section.", '#' comments, optionally quoted
// string values.
RunConfig load_run_config(const std::filesystem::path& path, RunConfig base = {});
void apply_config_text(RunConfig& config, std::string_view text,
                       const std::filesystem::path& base_dir);

}  // namespace convex_topics

#endif  // CONVEX_TOPICS_CONFIG_H_
