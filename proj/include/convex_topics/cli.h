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

#ifndef CONVEX_TOPICS_CLI_H_
#define CONVEX_TOPICS_CLI_H_

#include <ostream>

namespace convex_topics {

// Entry point of the convextopics tool. Returns 0 on success, 1 on usage
// errors and 2 on runtime errors. Stage status lines go to `out` as one JSON
// object per line; diagnostics go to `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace convex_topics

#endif  // CONVEX_TOPICS_CLI_H_
