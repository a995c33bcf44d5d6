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

#ifndef CONVEX_TOPICS_SPARSE_H_
#define CONVEX_TOPICS_SPARSE_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace convex_topics {

// Compressed sparse rows with column indices sorted within each row.
struct CsrMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::uint64_t> offsets{0};
  std::vector<std::uint32_t> indices;
  std::vector<double> values;

  std::size_t nnz() const { return indices.size(); }

  std::span<const std::uint32_t> row_indices(std::size_t i) const {
    return {indices.data() + offsets[i], indices.data() + offsets[i + 1]};
  }
  std::span<const double> row_values(std::size_t i) const {
    return {values.data() + offsets[i], values.data() + offsets[i + 1]};
  }

  // Stored value at (i, j), or 0 when absent.
  double at(std::size_t i, std::size_t j) const;

  CsrMatrix transpose() const;

  bool operator==(const CsrMatrix&) const = default;
};

}  // namespace convex_topics

#endif  // CONVEX_TOPICS_SPARSE_H_
