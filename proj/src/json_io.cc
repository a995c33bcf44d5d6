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

#include "convex_topics/json_io.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <tuple>

#include "convex_topics/error.h"

namespace convex_topics {
namespace {

template <class T>
T field(const Json& json, const char* key, const char* what) {
  auto it = json.find(key);
  if (it == json.end()) {
    throw DataError(std::string(what) + ": missing field '" + key + "'");
  }
  try {
    return it->get<T>();
  } catch (const Json::exception&) {
    throw DataError(std::string(what) + ": field '" + key + "' has the wrong type");
  }
}

std::string_view filter_name(VocabularyFilter f) {
  return f == VocabularyFilter::kHypergeometricBH ? "hypergeometric_bh" : "df_band";
}

}  // namespace

Json vocabulary_to_json(const Vocabulary& vocab) {
  Json terms = Json::array();
  for (std::size_t i = 0; i < vocab.size(); ++i) {
    Json p = std::isnan(vocab.p_value[i]) ? Json(nullptr) : Json(vocab.p_value[i]);
    terms.push_back({{"term", vocab.terms[i]}, {"df", vocab.df[i]}, {"p_value", p}});
  }
  return {{"n_docs", vocab.n_docs},
          {"fdr", vocab.fdr},
          {"filter", filter_name(vocab.filter)},
          {"terms", std::move(terms)}};
}

Vocabulary vocabulary_from_json(const Json& json, const Corpus& corpus) {
  constexpr const char* kWhat = "vocabulary";
  if (field<std::size_t>(json, "n_docs", kWhat) != corpus.n_docs()) {
    throw DataError("vocabulary was built on a corpus of a different size");
  }
  const double fdr = field<double>(json, "fdr", kWhat);
  const auto filter = json.value("filter", std::string("df_band")) == "hypergeometric_bh"
                          ? VocabularyFilter::kHypergeometricBH
                          : VocabularyFilter::kDfBand;
  std::vector<std::string> terms;
  std::vector<double> p;
  for (const auto& t : field<Json>(json, "terms", kWhat)) {
    terms.push_back(field<std::string>(t, "term", kWhat));
    const auto it = t.find("p_value");
    p.push_back(it == t.end() || it->is_null() ? std::numeric_limits<double>::quiet_NaN()
                                               : it->get<double>());
  }
  Vocabulary v = restore_vocabulary(corpus, std::move(terms), std::move(p), fdr, filter);
  return v;
}

Vocabulary vocabulary_terms_from_json(const Json& json) {
  constexpr const char* kWhat = "vocabulary";
  Vocabulary v;
  v.n_docs = field<std::size_t>(json, "n_docs", kWhat);
  v.fdr = field<double>(json, "fdr", kWhat);
  for (const auto& t : field<Json>(json, "terms", kWhat)) {
    v.terms.push_back(field<std::string>(t, "term", kWhat));
    v.index.emplace(v.terms.back(), static_cast<std::uint32_t>(v.terms.size() - 1));
    v.df.push_back(field<std::uint32_t>(t, "df", kWhat));
    const auto it = t.find("p_value");
    v.p_value.push_back(it == t.end() || it->is_null()
                            ? std::numeric_limits<double>::quiet_NaN()
                            : it->get<double>());
  }
  return v;
}

Json solver_config_to_json(const SolverConfig& config) {
  return {{"tol", config.tol},
          {"patience", config.patience},
          {"max_iter", config.max_iter},
          {"prune_eps", config.prune_eps},
          {"kkt_tol", config.kkt_tol}};
}

SolverConfig solver_config_from_json(const Json& json) {
  SolverConfig c;
  c.tol = json.value("tol", c.tol);
  c.patience = json.value("patience", c.patience);
  c.max_iter = json.value("max_iter", c.max_iter);
  c.prune_eps = json.value("prune_eps", c.prune_eps);
  c.kkt_tol = json.value("kkt_tol", c.kkt_tol);
  return c;
}

Json model_to_json(const TopicModel& model, const Vocabulary* vocab) {
  Json q = Json::array();
  for (auto j : model.exemplars) q.push_back(Json::array({j, model.q[j]}));
  Json topics = Json::array();
  const auto extracted = vocab ? extract_topics(model, *vocab) : extract_topics(model);
  for (const auto& t : extracted) {
    Json members = Json::array();
    for (const auto& [i, r] : t.members) members.push_back(Json::array({i, r}));
    Json topic = {{"exemplar_id", t.exemplar}};
    if (vocab) topic["exemplar_term"] = t.exemplar_term;
    topic["members"] = std::move(members);
    topics.push_back(std::move(topic));
  }
  return {{"n", model.n},
          {"config", solver_config_to_json(model.config)},
          {"converged", model.converged},
          {"iterations", model.iterations},
          {"loglik", model.loglik},
          {"loglik_trace", model.loglik_trace},
          {"q", std::move(q)},
          {"topics", std::move(topics)}};
}

TopicModel model_from_json(const Json& json) {
  constexpr const char* kWhat = "model";
  TopicModel m;
  m.n = field<std::size_t>(json, "n", kWhat);
  m.config = solver_config_from_json(json.value("config", Json::object()));
  m.converged = json.value("converged", false);
  m.iterations = json.value("iterations", std::size_t{0});
  m.loglik_trace = json.value("loglik_trace", std::vector<double>{});
  m.loglik = json.value("loglik", m.loglik_trace.empty() ? 0.0 : m.loglik_trace.back());
  m.q.assign(m.n, 0.0);
  for (const auto& entry : field<Json>(json, "q", kWhat)) {
    const auto j = entry.at(0).get<std::size_t>();
    if (j >= m.n) throw DataError("model: q index out of range");
    m.q[j] = entry.at(1).get<double>();
    m.exemplars.push_back(static_cast<std::uint32_t>(j));
  }
  std::sort(m.exemplars.begin(), m.exemplars.end());

  std::vector<std::tuple<std::uint32_t, std::uint32_t, double>> triples;
  for (const auto& topic : field<Json>(json, "topics", kWhat)) {
    const auto j = field<std::uint32_t>(topic, "exemplar_id", kWhat);
    if (j >= m.n || m.q[j] <= 0.0) {
      throw DataError("model: topic exemplar " + std::to_string(j) + " has no mass");
    }
    for (const auto& member : field<Json>(topic, "members", kWhat)) {
      const auto i = member.at(0).get<std::uint32_t>();
      if (i >= m.n) throw DataError("model: member index out of range");
      triples.emplace_back(i, j, member.at(1).get<double>());
    }
  }
  std::sort(triples.begin(), triples.end());
  CsrMatrix& r = m.responsibilities;
  r.rows = r.cols = m.n;
  r.offsets.assign(m.n + 1, 0);
  for (const auto& [i, j, v] : triples) {
    ++r.offsets[i + 1];
    r.indices.push_back(j);
    r.values.push_back(v);
  }
  for (std::size_t i = 0; i < m.n; ++i) r.offsets[i + 1] += r.offsets[i];
  return m;
}

Json scores_to_json(const std::vector<DocumentScore>& rankings, const Corpus& corpus) {
  Json out = Json::array();
  for (const auto& ds : rankings) {
    Json ranking = Json::array();
    for (const auto& sd : ds.ranking) {
      ranking.push_back(Json::array({corpus.document(sd.doc).id, sd.score}));
    }
    out.push_back({{"topic_id", ds.topic_id}, {"ranking", std::move(ranking)}});
  }
  return out;
}

std::vector<DocumentScore> scores_from_json(const Json& json, const Corpus& corpus) {
  constexpr const char* kWhat = "scores";
  if (!json.is_array()) throw DataError("scores: expected a JSON array");
  std::vector<DocumentScore> out;
  std::vector<char> seen(corpus.n_docs());
  for (const auto& entry : json) {
    DocumentScore ds;
    ds.topic_id = field<std::uint32_t>(entry, "topic_id", kWhat);
    std::fill(seen.begin(), seen.end(), 0);
    for (const auto& item : field<Json>(entry, "ranking", kWhat)) {
      if (!item.is_array() || item.size() != 2 || !item[0].is_string() ||
          !item[1].is_number()) {
        throw DataError("scores: ranking entries must be [doc_id, score]");
      }
      const auto id = item[0].get<std::string>();
      const auto d = corpus.find_document(id);
      if (!d) throw DataError("scores: unknown document id '" + id + "'");
      if (seen[*d]) {
        throw DataError("scores: document '" + id + "' ranked twice in topic " +
                        std::to_string(ds.topic_id));
      }
      seen[*d] = 1;
      ds.ranking.push_back({*d, item[1].get<double>()});
    }
    for (DocIndex d : corpus.by_id()) {
      if (!seen[d]) ds.ranking.push_back({d, 0.0});
    }
    out.push_back(std::move(ds));
  }
  return out;
}

Json eval_to_json(const EvalReport& report) {
  Json labels = Json::array();
  for (const auto& l : report.labels) {
    labels.push_back({{"label", l.label}, {"best_topic", l.best_topic}, {"ap", l.ap}});
  }
  return {{"maxmap", report.maxmap},
          {"n_used", report.n_used},
          {"n_labels_qualified", report.n_labels_qualified},
          {"n_topics", report.n_topics},
          {"labels", std::move(labels)}};
}

EvalReport eval_from_json(const Json& json) {
  constexpr const char* kWhat = "evaluation report";
  EvalReport r;
  r.maxmap = field<double>(json, "maxmap", kWhat);
  r.n_used = field<std::size_t>(json, "n_used", kWhat);
  r.n_labels_qualified = json.value("n_labels_qualified", std::size_t{0});
  r.n_topics = json.value("n_topics", std::size_t{0});
  for (const auto& l : field<Json>(json, "labels", kWhat)) {
    r.labels.push_back({field<std::string>(l, "label", kWhat),
                        field<std::uint32_t>(l, "best_topic", kWhat),
                        field<double>(l, "ap", kWhat)});
  }
  return r;
}

Json read_json(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw DataError(path.string() + ": malformed JSON: " + e.what());
  }
}

void write_text(const std::string& text, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + path.string());
  out << text;
  if (!out) throw DataError("failed writing " + path.string());
}

void write_json(const Json& json, const std::filesystem::path& path) {
  write_text(json.dump(2, ' ', false, Json::error_handler_t::replace) + "\n", path);
}

}  // namespace convex_topics
