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

#ifndef CONVEX_TOPICS_SIMILARITY_H_
#define CONVEX_TOPICS_SIMILARITY_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "convex_topics/sparse.h"
#include "convex_topics/vocabulary.h"

namespace convex_topics {

inline constexpr double kDefaultCutoff = 0.05;

// Dice coefficient 2 * codf / (df_i + df_j) of two posting sets.
double dice(std::uint64_t df_i, std::uint64_t df_j, std::uint64_t codf_ij);

// Symmetric term-by-term Dice similarities with a unit diagonal. Off-diagonal
// entries below the cutoff are not stored.
struct SparseSimilarity {
  CsrMatrix matrix;
  double cutoff = kDefaultCutoff;

  std::size_t n() const { return matrix.rows; }
  double at(std::size_t i, std::size_t j) const { return matrix.at(i, j); }

  // Builds a matrix from a dense symmetric array (testing and small inputs).
  // Zero entries are treated as absent; the diagonal must be positive.
  static SparseSimilarity from_dense(const std::vector<std::vector<double>>& dense);

  // Throws DataError when the stored structure breaks symmetry, sortedness
  // or the diagonal rule.
  void validate() const;

  bool operator==(const SparseSimilarity&) const = default;
};

// Enumerates co-occurring pairs through the document -> terms inverted
// index, so the cost is proportional to the sum of squared document
// vocabulary sizes rather than n^2.
SparseSimilarity build_similarity(const Vocabulary& vocab,
                                  double cutoff = kDefaultCutoff,
                                  WorkerPool* pool = nullptr);

// Binary cache: magic "CVXSIM", u16 version, u16 reserved, then n, nnz and
// the cutoff bit pattern as little-endian u64, then n + 1 u64 row offsets,
// nnz u32 column ids and nnz IEEE-754 f64 values.
void write_similarity(const SparseSimilarity& s, const std::filesystem::path& path);
SparseSimilarity read_similarity(const std::filesystem::path& path);

}  // namespace convex_topics

#endif  // CONVEX_TOPICS_SIMILARITY_H_
