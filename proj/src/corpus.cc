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

#include "convex_topics/corpus.h"

#include <algorithm>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>

#include "convex_topics/error.h"
#include "convex_topics/parallel.h"
#include "json.hpp"

namespace convex_topics {
namespace {

bool is_alnum(unsigned char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
         (c >= '0' && c <= '9');
}

// Punctuation that ends a phrase segment. Hyphens, slashes, apostrophes and
// the like only separate tokens.
bool is_clause_punct(unsigned char c) {
  switch (c) {
    case '.': case ',': case ';': case ':': case '!': case '?':
    case '(': case ')': case '[': case ']': case '{': case '}':
    case '"': case '<': case '>': case '|':
      return true;
    default:
      return false;
  }
}

bool all_digits(std::string_view s) {
  return std::all_of(s.begin(), s.end(),
                     [](unsigned char c) { return c >= '0' && c <= '9'; });
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open file: " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void sort_unique(std::vector<std::string>& v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
}

}  // namespace

void TokenStream::append(TokenStream other) {
  const auto offset = static_cast<std::uint32_t>(tokens.size());
  for (auto start : other.segment_starts) segment_starts.push_back(start + offset);
  for (auto& t : other.tokens) tokens.push_back(std::move(t));
}

TokenStream tokenize_stream(std::string_view text,
                            const StopwordSet& stopwords) {
  TokenStream stream;
  bool boundary = true;
  std::string current;
  auto flush = [&] {
    if (current.empty()) return;
    if (current.size() < 2 || all_digits(current) ||
        stopwords.count(current) > 0) {
      boundary = true;
    } else {
      if (boundary) {
        stream.segment_starts.push_back(
            static_cast<std::uint32_t>(stream.tokens.size()));
        boundary = false;
      }
      stream.tokens.push_back(current);
    }
    current.clear();
  };
  for (char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    if (is_alnum(c)) {
      current.push_back(static_cast<char>(std::tolower(c)));
    } else {
      flush();
      if (is_clause_punct(c)) boundary = true;
    }
  }
  flush();
  return stream;
}

std::vector<std::string> tokenize(std::string_view text,
                                  const StopwordSet& stopwords) {
  return tokenize_stream(text, stopwords).tokens;
}

std::unordered_map<std::string, std::uint32_t> candidate_counts(
    const TokenStream& stream, std::size_t max_phrase_len) {
  std::unordered_map<std::string, std::uint32_t> counts;
  const std::size_t n_tokens = stream.tokens.size();
  for (std::size_t s = 0; s < stream.segment_starts.size(); ++s) {
    const std::size_t begin = stream.segment_starts[s];
    const std::size_t end = s + 1 < stream.segment_starts.size()
                                ? stream.segment_starts[s + 1]
                                : n_tokens;
    for (std::size_t i = begin; i < end; ++i) {
      std::string phrase = stream.tokens[i];
      ++counts[phrase];
      for (std::size_t len = 2; len <= max_phrase_len && i + len <= end; ++len) {
        phrase.push_back(' ');
        phrase += stream.tokens[i + len - 1];
        ++counts[phrase];
      }
    }
  }
  return counts;
}

std::set<std::string> extract_candidates(const TokenStream& stream,
                                         std::size_t max_phrase_len) {
  std::set<std::string> out;
  for (auto& [term, count] : candidate_counts(stream, max_phrase_len)) {
    out.insert(term);
  }
  return out;
}

TermId TermDictionary::intern(std::string_view term) {
  if (auto it = index_.find(term); it != index_.end()) return it->second;
  const auto id = static_cast<TermId>(terms_.size());
  terms_.emplace_back(term);
  index_.emplace(terms_.back(), id);
  return id;
}

std::optional<TermId> TermDictionary::find(std::string_view term) const {
  if (auto it = index_.find(term); it != index_.end()) return it->second;
  return std::nullopt;
}

Corpus Corpus::build(std::vector<RawDocument> raw, const CorpusOptions& options,
                     WorkerPool* pool) {
  if (options.max_phrase_len < 1) {
    throw ValidationError("max_phrase_len must be at least 1");
  }
  const StopwordSet& stopwords =
      options.stopwords ? *options.stopwords : default_stopwords();

  Corpus corpus;
  corpus.max_phrase_len_ = options.max_phrase_len;
  corpus.documents_.resize(raw.size());

  {
    std::unordered_set<std::string_view> seen;
    for (const auto& r : raw) {
      if (r.id.empty()) throw DataError("document with empty id");
      if (!seen.insert(r.id).second) {
        throw DataError("duplicate document id '" + r.id + "'");
      }
    }
  }

  WorkerPool serial(1);
  WorkerPool& workers = pool ? *pool : serial;

  // Tokenize in parallel batches, intern sequentially in document order.
  constexpr std::size_t kBatch = 1024;
  std::vector<TokenStream> streams;
  std::vector<std::vector<std::pair<std::string, std::uint32_t>>> counts;
  for (std::size_t batch = 0; batch < raw.size(); batch += kBatch) {
    const std::size_t end = std::min(raw.size(), batch + kBatch);
    streams.assign(end - batch, {});
    counts.assign(end - batch, {});
    parallel_for(workers, end - batch, 16, [&](std::size_t b, std::size_t e) {
      for (std::size_t k = b; k < e; ++k) {
        const RawDocument& r = raw[batch + k];
        TokenStream s = tokenize_stream(r.title, stopwords);
        s.append(tokenize_stream(r.body, stopwords));
        auto c = candidate_counts(s, options.max_phrase_len);
        counts[k].assign(c.begin(), c.end());
        std::sort(counts[k].begin(), counts[k].end());
        streams[k] = std::move(s);
      }
    });
    for (std::size_t k = 0; k < end - batch; ++k) {
      Document& doc = corpus.documents_[batch + k];
      RawDocument& r = raw[batch + k];
      doc.id = std::move(r.id);
      doc.title = std::move(r.title);
      doc.body = std::move(r.body);
      doc.labels = std::move(r.labels);
      sort_unique(doc.labels);
      doc.tokens.reserve(streams[k].tokens.size());
      for (const auto& t : streams[k].tokens) {
        doc.tokens.push_back(corpus.dictionary_.intern(t));
      }
      doc.segment_starts = std::move(streams[k].segment_starts);
      doc.length = static_cast<std::uint32_t>(doc.tokens.size());
      doc.term_freq.reserve(counts[k].size());
      for (const auto& [term, count] : counts[k]) {
        doc.term_freq.emplace_back(corpus.dictionary_.intern(term), count);
      }
      std::sort(doc.term_freq.begin(), doc.term_freq.end());
    }
  }

  corpus.df_.assign(corpus.dictionary_.size(), 0);
  for (const auto& doc : corpus.documents_) {
    for (const auto& [term, count] : doc.term_freq) ++corpus.df_[term];
  }

  const std::size_t n = corpus.documents_.size();
  corpus.by_id_.resize(n);
  std::iota(corpus.by_id_.begin(), corpus.by_id_.end(), DocIndex{0});
  std::sort(corpus.by_id_.begin(), corpus.by_id_.end(),
            [&](DocIndex a, DocIndex b) {
              return corpus.documents_[a].id < corpus.documents_[b].id;
            });
  corpus.id_rank_.resize(n);
  for (std::size_t r = 0; r < n; ++r) {
    corpus.id_rank_[corpus.by_id_[r]] = static_cast<std::uint32_t>(r);
  }
  return corpus;
}

std::uint32_t Corpus::df(std::string_view term) const {
  auto id = dictionary_.find(term);
  return id ? df_[*id] : 0;
}

std::optional<DocIndex> Corpus::find_document(std::string_view id) const {
  auto it = std::lower_bound(
      by_id_.begin(), by_id_.end(), id,
      [&](DocIndex d, std::string_view v) { return documents_[d].id < v; });
  if (it == by_id_.end() || documents_[*it].id != id) return std::nullopt;
  return *it;
}

std::vector<std::pair<std::string, std::vector<DocIndex>>>
Corpus::label_postings() const {
  std::map<std::string, std::vector<DocIndex>> by_label;
  for (std::size_t d = 0; d < documents_.size(); ++d) {
    for (const auto& label : documents_[d].labels) {
      by_label[label].push_back(static_cast<DocIndex>(d));
    }
  }
  return {std::make_move_iterator(by_label.begin()),
          std::make_move_iterator(by_label.end())};
}

double Corpus::average_length() const {
  if (documents_.empty()) return 0.0;
  double total = 0.0;
  for (const auto& doc : documents_) total += doc.length;
  return total / static_cast<double>(documents_.size());
}

Corpus Corpus::with_labels(std::vector<std::vector<std::string>> labels) const {
  if (labels.size() != documents_.size()) {
    throw ValidationError("label list size does not match document count");
  }
  Corpus copy = *this;
  for (std::size_t d = 0; d < labels.size(); ++d) {
    sort_unique(labels[d]);
    copy.documents_[d].labels = std::move(labels[d]);
  }
  return copy;
}

CorpusFormat parse_corpus_format(std::string_view name) {
  if (name == "jsonl") return CorpusFormat::kJsonl;
  if (name == "twenty_news_dir" || name == "20news") {
    return CorpusFormat::kTwentyNewsDir;
  }
  throw ValidationError("unknown corpus format '" + std::string(name) +
                        "' (expected jsonl or twenty_news_dir)");
}

std::string_view corpus_format_name(CorpusFormat format) {
  return format == CorpusFormat::kJsonl ? "jsonl" : "twenty_news_dir";
}

std::vector<Corpus::RawDocument> read_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open corpus file: " + path.string());
  std::vector<Corpus::RawDocument> docs;
  std::string line;
  std::size_t line_no = 0;
  auto fail = [&](const std::string& what) {
    throw DataError(path.string() + ":" + std::to_string(line_no) + ": " + what);
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json obj;
    try {
      obj = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      fail(std::string("malformed JSON: ") + e.what());
    }
    if (!obj.is_object()) fail("record is not a JSON object");
    Corpus::RawDocument doc;
    auto id = obj.find("id");
    if (id == obj.end() || !id->is_string()) fail("missing string field 'id'");
    doc.id = id->get<std::string>();
    auto optional_string = [&](const char* key, std::string& out) {
      auto it = obj.find(key);
      if (it == obj.end() || it->is_null()) return;
      if (!it->is_string()) {
        fail(std::string("field '") + key + "' is not a string");
      }
      out = it->get<std::string>();
    };
    optional_string("title", doc.title);
    optional_string("text", doc.body);
    if (auto labels = obj.find("labels"); labels != obj.end()) {
      if (!labels->is_array()) fail("field 'labels' is not an array");
      for (const auto& l : *labels) {
        if (!l.is_string()) fail("label is not a string");
        doc.labels.push_back(l.get<std::string>());
      }
    }
    docs.push_back(std::move(doc));
  }
  return docs;
}

namespace {

// Splits a news post into (subject, body). A leading block of "Key: value"
// header lines up to the first blank line is removed.
std::pair<std::string, std::string> split_news_post(const std::string& text) {
  std::size_t pos = 0;
  std::string subject;
  bool in_headers = false;
  {
    const std::size_t eol = text.find('\n');
    const std::string first = text.substr(0, eol);
    const std::size_t colon = first.find(':');
    in_headers = colon != std::string::npos && colon > 0 &&
                 first.find(' ') > colon;
  }
  if (!in_headers) return {"", text};
  while (pos < text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string::npos) eol = text.size();
    std::string line = text.substr(pos, eol - pos);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    pos = eol + 1;
    if (line.empty()) break;
    if (line.rfind("Subject:", 0) == 0) {
      subject = line.substr(8);
      const std::size_t first = subject.find_first_not_of(' ');
      subject = first == std::string::npos ? "" : subject.substr(first);
    }
  }
  return {subject, pos < text.size() ? text.substr(pos) : std::string()};
}

}  // namespace

std::vector<Corpus::RawDocument> read_twenty_news_dir(
    const std::filesystem::path& root) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(root)) {
    throw DataError("not a directory: " + root.string());
  }
  std::vector<fs::path> files;
  for (const auto& entry : fs::recursive_directory_iterator(root)) {
    if (!entry.is_regular_file()) continue;
    const auto rel = fs::relative(entry.path(), root);
    bool hidden = false;
    for (const auto& part : rel) {
      if (!part.empty() && part.string()[0] == '.') hidden = true;
    }
    if (hidden) continue;
    if (!rel.has_parent_path() || rel.parent_path().empty()) {
      throw DataError("file outside a newsgroup directory: " + rel.string());
    }
    files.push_back(rel);
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) throw DataError("no documents under " + root.string());
  std::vector<Corpus::RawDocument> docs;
  docs.reserve(files.size());
  for (const auto& rel : files) {
    auto [subject, body] = split_news_post(read_file(root / rel));
    Corpus::RawDocument doc;
    doc.id = rel.generic_string();
    doc.title = std::move(subject);
    doc.body = std::move(body);
    doc.labels = {rel.parent_path().filename().string()};
    docs.push_back(std::move(doc));
  }
  return docs;
}

Corpus load_corpus(const std::filesystem::path& path, CorpusFormat format,
                   const CorpusOptions& options, WorkerPool* pool) {
  auto raw = format == CorpusFormat::kJsonl ? read_jsonl(path)
                                            : read_twenty_news_dir(path);
  return Corpus::build(std::move(raw), options, pool);
}

std::uint64_t BackgroundStats::count(std::string_view term) const {
  auto it = term_counts.find(std::string(term));
  return it == term_counts.end() ? 0 : it->second;
}

BackgroundStats load_background(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open background file: " + path.string());
  BackgroundStats bg;
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  auto fail = [&](const std::string& what) {
    throw DataError(path.string() + ":" + std::to_string(line_no) + ": " + what);
  };
  auto parse_count = [&](const std::string& s) -> std::uint64_t {
    std::size_t used = 0;
    unsigned long long v = 0;
    try {
      v = std::stoull(s, &used);
    } catch (const std::exception&) {
      fail("invalid count '" + s + "'");
    }
    if (used != s.size() || s.empty() || s[0] == '-') {
      fail("invalid count '" + s + "'");
    }
    return v;
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::size_t tab = line.rfind('\t');
    if (tab == std::string::npos) fail("expected <term>TAB<count>");
    const std::string key = line.substr(0, tab);
    const std::uint64_t value = parse_count(line.substr(tab + 1));
    if (!have_header) {
      if (key != "#universe") fail("first line must be '#universe<TAB>M'");
      bg.universe_size = value;
      have_header = true;
      continue;
    }
    if (value > bg.universe_size) {
      fail("count of '" + key + "' exceeds universe size");
    }
    if (!bg.term_counts.emplace(key, value).second) {
      fail("duplicate term '" + key + "'");
    }
  }
  if (!have_header) throw DataError("empty background file: " + path.string());
  return bg;
}

std::vector<std::string> background_violations(const Corpus& corpus,
                                               const BackgroundStats& bg) {
  std::vector<std::string> out;
  const auto& dict = corpus.dictionary();
  for (TermId t = 0; t < dict.size(); ++t) {
    auto it = bg.term_counts.find(dict.term(t));
    if (it != bg.term_counts.end() && corpus.df()[t] > it->second) {
      out.push_back(dict.term(t));
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace convex_topics
