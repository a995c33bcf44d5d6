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

#include "convex_topics/cli.h"

#include <chrono>
#include <map>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "convex_topics/parallel.h"
#include "convex_topics/pipeline.h"

namespace convex_topics {
namespace {

namespace fs = std::filesystem;

constexpr int kUsageError = 1;
constexpr int kRuntimeError = 2;

struct Invocation {
  std::string config_file;
  std::map<std::string, std::string> flags;  // setting key -> value
  std::string scores_file;                   // eval
  std::string report_file;                   // report
};

void add_setting_flags(CLI::App& cmd, Invocation& inv) {
  cmd.add_option("--config", inv.config_file, "flat key = value config file")
      ->check(CLI::ExistingFile);
  for (const auto& s : setting_keys()) {
    cmd.add_option_function<std::string>(
        s.flag, [&inv, key = s.key](const std::string& v) { inv.flags[key] = v; },
        s.description);
  }
}

RunConfig resolve_config(const Invocation& inv) {
  RunConfig config;
  if (!inv.config_file.empty()) config = load_run_config(inv.config_file, config);
  for (const auto& [key, value] : inv.flags) apply_setting(config, key, value);
  config.solver.threads = config.threads;
  return config;
}

class StatusPrinter {
 public:
  explicit StatusPrinter(std::ostream& out) : out_(out) {}

  void operator()(const StageRecord& r) const {
    Json line = {{"stage", r.stage}, {"status", r.status}, {"seconds", r.seconds}};
    for (const auto& [k, v] : r.details.items()) line[k] = v;
    out_ << line.dump() << std::endl;
  }

 private:
  std::ostream& out_;
};

template <class F>
void stage(const std::string& name, const StatusPrinter& print, F&& body) {
  const auto start = std::chrono::steady_clock::now();
  StageRecord r;
  r.stage = name;
  r.status = "ok";
  try {
    body(r);
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError(name, e.what());
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  print(r);
}

void require_file(const fs::path& path, const std::string& what) {
  if (!fs::exists(path)) {
    throw DataError(what + " not found: " + path.string() + " (run the earlier stage first)");
  }
}

void cmd_ingest(const RunConfig& config, const StatusPrinter& print) {
  stage("ingest", print, [&](StageRecord& r) {
    WorkerPool pool(resolve_threads(config.threads));
    Corpus corpus = load_configured_corpus(config, &pool);
    Json labels = Json::object();
    for (const auto& [label, docs] : corpus.label_postings()) labels[label] = docs.size();
    Json stats = {{"n_docs", corpus.n_docs()},
                  {"n_candidates", corpus.dictionary().size()},
                  {"average_length", corpus.average_length()},
                  {"labels", labels}};
    fs::create_directories(config.output);
    write_json(stats, config.output / "corpus_stats.json");
    r.details = {{"n_docs", corpus.n_docs()}, {"n_candidates", corpus.dictionary().size()}};
  });
}

void cmd_vocab(const RunConfig& config, const StatusPrinter& print) {
  stage("vocabulary", print, [&](StageRecord& r) {
    WorkerPool pool(resolve_threads(config.threads));
    Corpus corpus = load_configured_corpus(config, &pool);
    auto bg = load_optional_background(config.background);
    Vocabulary v = build_vocabulary(corpus, bg ? &*bg : nullptr, config.vocab, &pool);
    fs::create_directories(config.output);
    write_json(vocabulary_to_json(v), config.output / artifacts::kVocabulary);
    r.details = {{"n_terms", v.size()}};
  });
}

Vocabulary stored_vocabulary(const RunConfig& config, const Corpus& corpus) {
  const fs::path path = config.output / artifacts::kVocabulary;
  require_file(path, "vocabulary");
  return vocabulary_from_json(read_json(path), corpus);
}

void cmd_similarity(const RunConfig& config, const StatusPrinter& print) {
  stage("similarity", print, [&](StageRecord& r) {
    WorkerPool pool(resolve_threads(config.threads));
    Corpus corpus = load_configured_corpus(config, &pool);
    Vocabulary v = stored_vocabulary(config, corpus);
    bool cached = false;
    SparseSimilarity s = cached_similarity(config, v, &pool, &cached);
    if (cached) r.status = "cached";
    r.details = {{"n", s.n()}, {"nnz", s.matrix.nnz()}};
  });
}

void cmd_fit(const RunConfig& config, const StatusPrinter& print) {
  stage("fit", print, [&](StageRecord& r) {
    const fs::path sim = config.output / artifacts::kSimilarity;
    const fs::path voc = config.output / artifacts::kVocabulary;
    require_file(sim, "similarity matrix");
    require_file(voc, "vocabulary");
    SparseSimilarity s = read_similarity(sim);
    Vocabulary v = vocabulary_terms_from_json(read_json(voc));
    if (v.size() != s.n()) throw DataError("similarity matrix does not match the vocabulary");
    TopicModel m = fit(s, config.solver);
    write_json(model_to_json(m, &v), config.output / artifacts::kModel);
    r.details = {{"topics", m.exemplars.size()},
                 {"iterations", m.iterations},
                 {"converged", m.converged},
                 {"loglik", m.loglik}};
  });
}

TopicModel stored_model(const RunConfig& config) {
  const fs::path path = config.output / artifacts::kModel;
  require_file(path, "model");
  return model_from_json(read_json(path));
}

void cmd_score(const RunConfig& config, const StatusPrinter& print) {
  stage("rank", print, [&](StageRecord& r) {
    WorkerPool pool(resolve_threads(config.threads));
    TopicModel m = stored_model(config);
    Corpus corpus = load_configured_corpus(config, &pool);
    Vocabulary v = stored_vocabulary(config, corpus);
    auto rankings = rank_documents(
        corpus, v, m, configured_local_weight(config, corpus),
        config.top_k > 0 ? std::optional<std::size_t>(config.top_k) : std::nullopt, &pool);
    write_json(scores_to_json(rankings, corpus), config.output / artifacts::kScores);
    r.details = {{"topics", rankings.size()}, {"top_k", config.top_k}};
  });
}

void cmd_eval(const RunConfig& config, const std::string& scores_file,
              const StatusPrinter& print) {
  stage("evaluate", print, [&](StageRecord& r) {
    WorkerPool pool(resolve_threads(config.threads));
    const fs::path model_path = config.output / artifacts::kModel;
    if (scores_file.empty() && !fs::exists(model_path)) {
      throw DataError("no model to evaluate: " + model_path.string() +
                      " is missing and no --scores file was given");
    }
    Corpus corpus = load_configured_corpus(config, &pool);
    std::optional<TopicModel> model;
    if (fs::exists(model_path)) model = stored_model(config);
    std::vector<DocumentScore> rankings;
    if (!scores_file.empty()) {
      rankings = scores_from_json(read_json(scores_file), corpus);
      r.details["rankings"] = "external";
      model.reset();
    } else {
      Vocabulary v = stored_vocabulary(config, corpus);
      rankings = rank_documents(corpus, v, *model, configured_local_weight(config, corpus),
                                std::nullopt, &pool);
      r.details["rankings"] = "model";
    }
    auto label_bg = load_optional_background(config.label_background);
    EvalReport report = maxmap(corpus, rankings, config.eval,
                               label_bg ? &*label_bg : nullptr,
                               model ? &*model : nullptr, &pool);
    fs::create_directories(config.output);
    write_json(eval_to_json(report), config.output / artifacts::kEval);
    r.details["maxmap"] = report.maxmap;
    r.details["n_used"] = report.n_used;
  });
}

void cmd_report(const RunConfig& config, const std::string& report_file,
                const StatusPrinter& print) {
  stage("report", print, [&](StageRecord& r) {
    const fs::path voc = config.output / artifacts::kVocabulary;
    const fs::path scores = config.output / artifacts::kScores;
    const fs::path eval = config.output / artifacts::kEval;
    require_file(voc, "vocabulary");
    require_file(scores, "scores");
    TopicModel m = stored_model(config);
    Vocabulary v = vocabulary_terms_from_json(read_json(voc));
    std::optional<EvalReport> report;
    if (fs::exists(eval)) report = eval_from_json(read_json(eval));
    ReportInput input;
    if (!config.corpus.empty()) {
      // With the corpus at hand the page matches the one `run` writes,
      // titles included.
      WorkerPool pool(resolve_threads(config.threads));
      Corpus corpus = load_configured_corpus(config, &pool);
      input = make_report_input(m, v, scores_from_json(read_json(scores), corpus), corpus,
                                report);
    } else {
      input.topics = extract_topics(m, v);
      for (const auto& entry : read_json(scores)) {
        auto& out = input.rankings[entry.at("topic_id").get<std::uint32_t>()];
        for (const auto& item : entry.at("ranking")) {
          out.emplace_back(item.at(0).get<std::string>(), item.at(1).get<double>());
        }
      }
      input.eval = report;
    }
    const fs::path target =
        report_file.empty() ? config.output / artifacts::kReport : fs::path(report_file);
    write_text(render_report(input), target);
    r.details = {{"topics", input.topics.size()}, {"file", target.generic_string()}};
  });
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"ConvexTopics: exemplar-based convex topic modeling"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(CONVEX_TOPICS_VERSION));

  Invocation inv;
  struct Spec {
    const char* name;
    const char* help;
  };
  const Spec specs[] = {
      {"ingest", "load and tokenize a corpus; writes corpus_stats.json"},
      {"vocab", "filter candidate terms; writes vocab.json"},
      {"similarity", "build the sparse Dice matrix; writes similarity.bin"},
      {"fit", "fit the exemplar model; writes model.json"},
      {"score", "rank documents per topic; writes scores.json"},
      {"eval", "MaxMAP topic alignment against document labels; writes eval.json"},
      {"run", "run every stage end to end"},
      {"report", "render the static HTML report"},
  };
  std::map<std::string, CLI::App*> commands;
  for (const auto& s : specs) {
    CLI::App* cmd = app.add_subcommand(s.name, s.help);
    add_setting_flags(*cmd, inv);
    commands[s.name] = cmd;
  }
  commands["eval"]->add_option("--scores", inv.scores_file,
                               "external rankings in the scores.json format")
      ->check(CLI::ExistingFile);
  commands["report"]->add_option("--report-file", inv.report_file,
                                 "output file (default: <output>/report.html)");

  try {
    std::vector<std::string> args;
    for (int i = argc - 1; i >= 1; --i) args.emplace_back(argv[i]);
    app.parse(std::move(args));
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForVersion&) {
    out << CONVEX_TOPICS_VERSION << "\n";
    return 0;
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return 0;
    }
    err << "error: " << e.what() << "\n";
    return kUsageError;
  }

  const std::string name = app.get_subcommands().front()->get_name();
  const StatusPrinter print(out);
  RunConfig config;
  try {
    config = resolve_config(inv);
    const bool needs_corpus = name != "fit" && name != "report";
    config.validate(needs_corpus || !config.corpus.empty());
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return kUsageError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kRuntimeError;
  }

  try {
    if (name == "ingest") cmd_ingest(config, print);
    else if (name == "vocab") cmd_vocab(config, print);
    else if (name == "similarity") cmd_similarity(config, print);
    else if (name == "fit") cmd_fit(config, print);
    else if (name == "score") cmd_score(config, print);
    else if (name == "eval") cmd_eval(config, inv.scores_file, print);
    else if (name == "report") cmd_report(config, inv.report_file, print);
    else run_pipeline(config, print);
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return kUsageError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kRuntimeError;
  }
  return 0;
}

}  // namespace convex_topics
