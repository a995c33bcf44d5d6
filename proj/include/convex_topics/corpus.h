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

#ifndef CONVEX_TOPICS_CORPUS_H_
#define CONVEX_TOPICS_CORPUS_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

namespace convex_topics {

class WorkerPool;

using TermId = std::uint32_t;
using DocIndex = std::uint32_t;
using StopwordSet = std::unordered_set<std::string>;

// The bundled English stopword list.
const StopwordSet& default_stopwords();

// Reads a stopword file: one word per line, blank lines and '#' comments
// ignored, words lowercased.
StopwordSet load_stopwords(const std::filesystem::path& path);

// Normalized single tokens of a text together with the positions where a
// new phrase segment starts. A segment is a maximal run of kept tokens not
// interrupted by a stopword, a dropped token (numeric or one character) or
// clause punctuation.
struct TokenStream {
  std::vector<std::string> tokens;
  std::vector<std::uint32_t> segment_starts;

  // Appends another stream; its first token always starts a new segment.
  void append(TokenStream other);
};

TokenStream tokenize_stream(std::string_view text, const StopwordSet& stopwords);

// Lowercases, splits on every non-alphanumeric byte and drops one-character
// tokens, purely numeric tokens and stopwords.
std::vector<std::string> tokenize(std::string_view text,
                                  const StopwordSet& stopwords);

// Single tokens plus every contiguous n-gram (2 <= n <= max_phrase_len)
// inside one segment, space-joined.
std::set<std::string> extract_candidates(const TokenStream& stream,
                                         std::size_t max_phrase_len = 3);

// Counts of every candidate occurrence in the stream (singles and phrases).
std::unordered_map<std::string, std::uint32_t> candidate_counts(
    const TokenStream& stream, std::size_t max_phrase_len);

// Interned term strings. Ids are assigned in first-seen order.
class TermDictionary {
 public:
  TermId intern(std::string_view term);
  std::optional<TermId> find(std::string_view term) const;
  const std::string& term(TermId id) const { return terms_[id]; }
  std::size_t size() const { return terms_.size(); }

 private:
  struct Hash {
    using is_transparent = void;
    std::size_t operator()(std::string_view s) const {
      return std::hash<std::string_view>{}(s);
    }
  };
  std::vector<std::string> terms_;
  std::unordered_map<std::string, TermId, Hash, std::equal_to<>> index_;
};

struct Document {
  std::string id;
  std::string title;
  std::string body;
  std::vector<std::string> labels;  // sorted, unique
  std::vector<TermId> tokens;       // single-term stream
  std::vector<std::uint32_t> segment_starts;
  // Candidate term -> occurrence count, sorted by term id; includes phrases.
  std::vector<std::pair<TermId, std::uint32_t>> term_freq;
  std::uint32_t length = 0;  // number of single tokens
};

struct CorpusOptions {
  std::size_t max_phrase_len = 3;
  const StopwordSet* stopwords = nullptr;  // null: bundled list
};

// An immutable, tokenized document collection with document frequencies of
// every candidate term.
class Corpus {
 public:
  struct RawDocument {
    std::string id;
    std::string title;
    std::string body;
    std::vector<std::string> labels;
  };

  static Corpus build(std::vector<RawDocument> raw, const CorpusOptions& options,
                      WorkerPool* pool = nullptr);

  const std::vector<Document>& documents() const { return documents_; }
  const Document& document(DocIndex d) const { return documents_[d]; }
  std::size_t n_docs() const { return documents_.size(); }
  const TermDictionary& dictionary() const { return dictionary_; }
  std::size_t max_phrase_len() const { return max_phrase_len_; }

  // Document frequency by dictionary id.
  const std::vector<std::uint32_t>& df() const { return df_; }
  std::uint32_t df(std::string_view term) const;

  // Position of each document in ascending id order; the tie-break rank.
  const std::vector<std::uint32_t>& id_rank() const { return id_rank_; }
  // Document indices sorted by id.
  const std::vector<DocIndex>& by_id() const { return by_id_; }
  std::optional<DocIndex> find_document(std::string_view id) const;

  // Label -> sorted document indices carrying it, labels in sorted order.
  std::vector<std::pair<std::string, std::vector<DocIndex>>> label_postings()
      const;

  double average_length() const;

  // Returns a copy whose documents carry `labels[d]` instead.
  Corpus with_labels(std::vector<std::vector<std::string>> labels) const;

 private:
  std::vector<Document> documents_;
  TermDictionary dictionary_;
  std::vector<std::uint32_t> df_;
  std::vector<std::uint32_t> id_rank_;
  std::vector<DocIndex> by_id_;
  std::size_t max_phrase_len_ = 3;
};

enum class CorpusFormat { kJsonl, kTwentyNewsDir };

CorpusFormat parse_corpus_format(std::string_view name);
std::string_view corpus_format_name(CorpusFormat format);

std::vector<Corpus::RawDocument> read_jsonl(const std::filesystem::path& path);
std::vector<Corpus::RawDocument> read_twenty_news_dir(
    const std::filesystem::path& root);

Corpus load_corpus(const std::filesystem::path& path, CorpusFormat format,
                   const CorpusOptions& options, WorkerPool* pool = nullptr);

// Document counts of terms (or labels) in a background collection.
struct BackgroundStats {
  std::uint64_t universe_size = 0;
  std::unordered_map<std::string, std::uint64_t> term_counts;

  std::uint64_t count(std::string_view term) const;
};

BackgroundStats load_background(const std::filesystem::path& path);

// Terms whose focus document frequency exceeds their background count.
std::vector<std::string> background_violations(const Corpus& corpus,
                                               const BackgroundStats& bg);

}  // namespace convex_topics

#endif  // CONVEX_TOPICS_CORPUS_H_
