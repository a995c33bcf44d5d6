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

#include "convex_topics/report.h"

#include <cstdio>
#include <sstream>

namespace convex_topics {
namespace {

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

// Keeps printable ASCII and valid-looking UTF-8 lead/continuation bytes;
// other bytes (e.g. Latin-1 in old news posts) become '?'.
std::string sanitize(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  std::size_t i = 0;
  while (i < text.size()) {
    const auto c = static_cast<unsigned char>(text[i]);
    std::size_t len = c < 0x80 ? 1 : (c >> 5) == 0x6 ? 2 : (c >> 4) == 0xE ? 3
                                   : (c >> 3) == 0x1E ? 4 : 0;
    bool ok = len > 0 && i + len <= text.size();
    for (std::size_t k = 1; ok && k < len; ++k) {
      ok = (static_cast<unsigned char>(text[i + k]) >> 6) == 0x2;
    }
    if (!ok || (len == 1 && c < 0x20 && c != '\t')) {
      out.push_back(len == 1 && (c == '\n' || c == '\r') ? ' ' : '?');
      ++i;
      continue;
    }
    out.append(text.substr(i, len));
    i += len;
  }
  return out;
}

constexpr const char* kStyle = R"(body{font-family:sans-serif;margin:2em;max-width:60em}
table{border-collapse:collapse}td,th{padding:2px 8px;border-bottom:1px solid #ddd;text-align:left}
.topic{margin-top:2em}.terms{color:#333}.num{text-align:right;font-family:monospace}
nav a{margin-right:0.6em})";

}  // namespace

std::string html_escape(std::string_view text) {
  std::string out;
  for (char c : sanitize(text)) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&#39;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

std::string render_report(const ReportInput& input, const ReportOptions& options) {
  std::ostringstream h;
  h << "<!DOCTYPE html>\n<html lang=\"en\">\n<head>\n<meta charset=\"utf-8\">\n"
    << "<title>ConvexTopics report</title>\n<style>\n" << kStyle << "\n</style>\n"
    << "</head>\n<body>\n<h1>ConvexTopics report</h1>\n";
  h << "<p>" << input.topics.size() << " topics.</p>\n";

  if (input.eval) {
    const EvalReport& e = *input.eval;
    h << "<section id=\"maxmap\">\n<h2>MaxMAP topic alignment: " << fixed(e.maxmap, 4)
      << "</h2>\n<p>Mean of the top " << e.n_used << " label APs; "
      << e.n_labels_qualified << " qualified labels; " << e.n_topics
      << " topics evaluated.</p>\n<table>\n<tr><th>Label</th><th>Best topic</th>"
      << "<th class=\"num\">AP</th></tr>\n";
    for (std::size_t l = 0; l < e.labels.size(); ++l) {
      const auto& a = e.labels[l];
      h << "<tr><td>" << html_escape(a.label) << "</td><td><a href=\"#topic-"
        << a.best_topic << "\">" << a.best_topic << "</a></td><td class=\"num\">"
        << fixed(a.ap, 4) << "</td></tr>\n";
    }
    h << "</table>\n</section>\n";
  }

  h << "<nav>\n";
  for (const auto& t : input.topics) {
    h << "<a href=\"#topic-" << t.exemplar << "\">" << html_escape(t.exemplar_term)
      << "</a>\n";
  }
  h << "</nav>\n";

  for (const auto& t : input.topics) {
    h << "<section class=\"topic\" id=\"topic-" << t.exemplar << "\">\n<h2>Topic "
      << t.exemplar << ": " << html_escape(t.exemplar_term) << "</h2>\n"
      << "<p>Exemplar mass q = " << fixed(t.mass, 6) << "; " << t.members.size()
      << " member terms.</p>\n<p class=\"terms\">Topic terms: ";
    const std::size_t n_terms = std::min(options.top_terms, t.members.size());
    for (std::size_t k = 0; k < n_terms; ++k) {
      if (k > 0) h << ", ";
      const std::string& term =
          k < t.member_terms.size() ? t.member_terms[k] : std::to_string(t.members[k].first);
      h << html_escape(term) << " (" << fixed(t.members[k].second, 3) << ")";
    }
    h << "</p>\n";
    auto it = input.rankings.find(t.exemplar);
    if (it != input.rankings.end()) {
      h << "<table>\n<tr><th>#</th><th>Document</th><th class=\"num\">Score</th></tr>\n";
      const std::size_t n_docs = std::min(options.top_documents, it->second.size());
      for (std::size_t k = 0; k < n_docs; ++k) {
        const auto& [id, score] = it->second[k];
        h << "<tr><td>" << k + 1 << "</td><td>" << html_escape(id);
        if (auto title = input.titles.find(id);
            title != input.titles.end() && !title->second.empty()) {
          h << " &mdash; " << html_escape(title->second);
        }
        h << "</td><td class=\"num\">" << fixed(score, 6) << "</td></tr>\n";
      }
      h << "</table>\n";
    }
    h << "</section>\n";
  }
  h << "</body>\n</html>\n";
  return h.str();
}

}  // namespace convex_topics
