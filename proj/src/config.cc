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

#include "convex_topics/config.h"

#include <charconv>
#include <fstream>
#include <functional>
#include <sstream>

#include "convex_topics/error.h"

namespace convex_topics {
namespace {

using Setter = std::function<void(RunConfig&, std::string_view,
                                  const std::filesystem::path&)>;

struct Setting {
  SettingInfo info;
  Setter set;
};

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

double to_double(std::string_view key, std::string_view v) {
  const std::string s(v);
  std::size_t used = 0;
  double out = 0.0;
  try {
    out = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size()) {
    throw ValidationError("invalid number for " + std::string(key) + ": '" + s + "'");
  }
  return out;
}

std::size_t to_size(std::string_view key, std::string_view v) {
  std::size_t out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size() || v.empty()) {
    throw ValidationError("invalid non-negative integer for " + std::string(key) +
                          ": '" + std::string(v) + "'");
  }
  return out;
}

bool to_bool(std::string_view key, std::string_view v) {
  if (v == "true" || v == "1" || v == "on" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "off" || v == "no") return false;
  throw ValidationError("invalid boolean for " + std::string(key) + ": '" +
                        std::string(v) + "'");
}

std::filesystem::path to_path(std::string_view v, const std::filesystem::path& base) {
  std::filesystem::path p{std::string(v)};
  if (p.is_relative() && !base.empty()) p = base / p;
  return p;
}

std::string flag_for(std::string_view key) {
  std::string f = "--";
  for (char c : key) f.push_back(c == '.' || c == '_' ? '-' : c);
  return f;
}

Setting make(std::string key, std::string description, Setter set) {
  SettingInfo info{key, flag_for(key), std::move(description)};
  return {std::move(info), std::move(set)};
}

const std::vector<Setting>& settings() {
  static const std::vector<Setting> kSettings = [] {
    std::vector<Setting> s;
    s.push_back(make("corpus", "corpus file (jsonl) or directory (twenty_news_dir); required by every stage but fit and report",
                     [](RunConfig& c, std::string_view v, const auto& base) {
                       c.corpus = to_path(v, base);
                     }));
    s.push_back(make("format", "corpus format: jsonl | twenty_news_dir (default: jsonl)",
                     [](RunConfig& c, std::string_view v, const auto&) {
                       c.format = parse_corpus_format(v);
                     }));
    s.push_back(make("background",
                     "background term counts TSV; enables the hypergeometric/BH "
                     "vocabulary filter (default: none, df band)",
                     [](RunConfig& c, std::string_view v, const auto& base) {
                       c.background = to_path(v, base);
                     }));
    s.push_back(make("label_background",
                     "background label counts TSV for label qualification "
                     "(default: none, min_positives rule)",
                     [](RunConfig& c, std::string_view v, const auto& base) {
                       c.label_background = to_path(v, base);
                     }));
    s.push_back(make("stopwords", "stopword file, one word per line (default: bundled English list)",
                     [](RunConfig& c, std::string_view v, const auto& base) {
                       c.stopwords = to_path(v, base);
                     }));
    s.push_back(make("max_phrase_len", "longest candidate phrase in tokens (default: 3)",
                     [](RunConfig& c, std::string_view v, const auto&) {
                       c.max_phrase_len = to_size("max_phrase_len", v);
                     }));
    s.push_back(make("fdr", "false discovery rate of the BH filters (default: 0.01, the published setting)",
                     [](RunConfig& c, std::string_view v, const auto&) {
                       c.vocab.fdr = to_double("fdr", v);
                       c.eval.fdr = c.vocab.fdr;
                     }));
    s.push_back(make("min_df", "df band lower bound without a background (default: 5)",
                     [](RunConfig& c, std::string_view v, const auto&) {
                       const auto x = to_size("min_df", v);
                       if (x > UINT32_MAX) throw ValidationError("min_df is too large");
                       c.vocab.min_df = static_cast<std::uint32_t>(x);
                     }));
    s.push_back(make("max_df_ratio", "df band upper bound as a fraction of documents (default: 0.5)",
                     [](RunConfig& c, std::string_view v, const auto&) {
                       c.vocab.max_df_ratio = to_double("max_df_ratio", v);
                     }));
    s.push_back(make("cutoff", "Dice similarities below this are dropped (default: 0.05, the published setting)",
                     [](RunConfig& c, std::string_view v, const auto&) {
                       c.cutoff = to_double("cutoff", v);
                     }));
    s.push_back(make("solver.tol", "relative log-likelihood improvement threshold (default: 1e-9)",
                     [](RunConfig& c, std::string_view v, const auto&) {
                       c.solver.tol = to_double("solver.tol", v);
                     }));
    s.push_back(make("solver.patience", "consecutive sub-tol iterations before stopping (default: 3)",
                     [](RunConfig& c, std::string_view v, const auto&) {
                       c.solver.patience = to_size("solver.patience", v);
                     }));
    s.push_back(make("solver.max_iter", "iteration cap (default: 100000)",
                     [](RunConfig& c, std::string_view v, const auto&) {
                       c.solver.max_iter = to_size("solver.max_iter", v);
                     }));
    s.push_back(make("solver.prune_eps", "prune q_j below this fraction of max q (default: 1e-6)",
                     [](RunConfig& c, std::string_view v, const auto&) {
                       c.solver.prune_eps = to_double("solver.prune_eps", v);
                     }));
    s.push_back(make("solver.kkt_tol", "optimality certificate tolerance on eta (default: 1e-8)",
                     [](RunConfig& c, std::string_view v, const auto&) {
                       c.solver.kkt_tol = to_double("solver.kkt_tol", v);
                     }));
    s.push_back(make("scoring.k", "local weight saturation constant (default: 1.0)",
                     [](RunConfig& c, std::string_view v, const auto&) {
                       c.local_k = to_double("scoring.k", v);
                     }));
    s.push_back(make("scoring.length_normalize", "normalize local weights by document length (default: true)",
                     [](RunConfig& c, std::string_view v, const auto&) {
                       c.length_normalize = to_bool("scoring.length_normalize", v);
                     }));
    s.push_back(make("scoring.top_k", "documents kept per topic in scores.json, 0 for all (default: 30)",
                     [](RunConfig& c, std::string_view v, const auto&) {
                       c.top_k = to_size("scoring.top_k", v);
                     }));
    s.push_back(make("eval.top_n", "labels averaged into MaxMAP, 0 for min(1000, topics) (default: 0)",
                     [](RunConfig& c, std::string_view v, const auto&) {
                       c.eval.top_n = to_size("eval.top_n", v);
                     }));
    s.push_back(make("eval.min_positives", "documents a label needs without a label background (default: 5)",
                     [](RunConfig& c, std::string_view v, const auto&) {
                       c.eval.min_positives = to_size("eval.min_positives", v);
                     }));
    s.push_back(make("eval.max_topics", "topics evaluated, heaviest by q first (default: 1000)",
                     [](RunConfig& c, std::string_view v, const auto&) {
                       c.eval.max_topics = to_size("eval.max_topics", v);
                     }));
    s.push_back(make("threads", "worker threads, 0 for all cores (default: 0)",
                     [](RunConfig& c, std::string_view v, const auto&) {
                       const auto x = to_size("threads", v);
                       if (x > 4096) throw ValidationError("threads must be at most 4096");
                       c.threads = static_cast<unsigned>(x);
                       c.solver.threads = c.threads;
                     }));
    s.push_back(make("output", "output directory (default: out)",
                     [](RunConfig& c, std::string_view v, const auto& base) {
                       c.output = to_path(v, base);
                     }));
    return s;
  }();
  return kSettings;
}

}  // namespace

const std::vector<SettingInfo>& setting_keys() {
  static const std::vector<SettingInfo> kInfos = [] {
    std::vector<SettingInfo> out;
    for (const auto& s : settings()) out.push_back(s.info);
    return out;
  }();
  return kInfos;
}

void apply_setting(RunConfig& config, std::string_view key, std::string_view value,
                   const std::filesystem::path& base_dir) {
  for (const auto& s : settings()) {
    if (s.info.key == key) {
      s.set(config, value, base_dir);
      return;
    }
  }
  throw ValidationError("unknown setting '" + std::string(key) + "'");
}

void apply_config_text(RunConfig& config, std::string_view text,
                       const std::filesystem::path& base_dir) {
  std::istringstream in{std::string(text)};
  std::string line;
  std::string section;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    // Strip comments outside quotes.
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
      if (line[i] == '"') quoted = !quoted;
      if (line[i] == '#' && !quoted) {
        line.resize(i);
        break;
      }
    }
    const std::string t = trim(line);
    if (t.empty()) continue;
    if (t.front() == '[') {
      if (t.back() != ']') {
        throw ValidationError("config line " + std::to_string(line_no) +
                              ": malformed section header");
      }
      section = trim(std::string_view(t).substr(1, t.size() - 2));
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw ValidationError("config line " + std::to_string(line_no) +
                            ": expected key = value");
    }
    std::string key = trim(std::string_view(t).substr(0, eq));
    std::string value = trim(std::string_view(t).substr(eq + 1));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') {
      value = value.substr(1, value.size() - 2);
    }
    if (!section.empty()) key = section + "." + key;
    try {
      apply_setting(config, key, value, base_dir);
    } catch (const ValidationError& e) {
      throw ValidationError("config line " + std::to_string(line_no) + ": " + e.what());
    }
  }
}

RunConfig load_run_config(const std::filesystem::path& path, RunConfig base) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open config file: " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  apply_config_text(base, ss.str(), path.parent_path());
  return base;
}

void RunConfig::validate(bool check_paths) const {
  vocab.validate();
  solver.validate();
  eval.validate();
  if (max_phrase_len < 1) throw ValidationError("max_phrase_len must be at least 1");
  if (!(cutoff >= 0.0 && cutoff < 1.0)) throw ValidationError("cutoff must lie in [0, 1)");
  if (!(local_k > 0.0)) throw ValidationError("scoring.k must be positive");
  if (!check_paths) return;
  namespace fs = std::filesystem;
  if (corpus.empty()) throw ValidationError("no corpus given");
  auto require = [](const fs::path& p, const char* what) {
    if (!fs::exists(p)) {
      throw ValidationError(std::string(what) + " not found: " + p.string());
    }
  };
  require(corpus, "corpus");
  if (background) require(*background, "background file");
  if (label_background) require(*label_background, "label background file");
  if (stopwords) require(*stopwords, "stopword file");
}

}  // namespace convex_topics
