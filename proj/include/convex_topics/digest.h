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

#ifndef CONVEX_TOPICS_DIGEST_H_
#define CONVEX_TOPICS_DIGEST_H_

#include <filesystem>
#include <string>
#include <string_view>

namespace convex_topics {

// Lowercase hex SHA-256 digests.
std::string sha256_hex(std::string_view data);
std::string sha256_file(const std::filesystem::path& path);
// For a directory: digest over the sorted relative paths and file contents.
std::string sha256_path(const std::filesystem::path& path);

}  // namespace convex_topics

#endif  // CONVEX_TOPICS_DIGEST_H_
