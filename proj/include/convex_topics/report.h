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

#ifndef CONVEX_TOPICS_REPORT_H_
#define CONVEX_TOPICS_REPORT_H_

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "convex_topics/evaluation.h"
#include "convex_topics/solver.h"

namespace convex_topics {

struct ReportInput {
  std::vector<Topic> topics;  // with terms, in display order
  // topic id -> (document id, score) ranking
  std::map<std::uint32_t, std::vector<std::pair<std::string, double>>> rankings;
  std::optional<EvalReport> eval;
  std::unordered_map<std::string, std::string> titles;  // document id -> title
};

struct ReportOptions {
  std::size_t top_terms = 20;
  std::size_t top_documents = 30;
};

// A self-contained static HTML page: topics by mass with their exemplar, top
// member terms and top ranked documents, plus the MaxMAP table when an
// evaluation is present.
std::string render_report(const ReportInput& input, const ReportOptions& options = {});

std::string html_escape(std::string_view text);

}  // namespace convex_topics

#endif  // CONVEX_TOPICS_REPORT_H_
