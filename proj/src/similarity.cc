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

#include "convex_topics/similarity.h"

#include <algorithm>
#include <array>
#include <bit>
#include <cstring>
#include <fstream>

#include "convex_topics/error.h"
#include "convex_topics/parallel.h"

namespace convex_topics {

double CsrMatrix::at(std::size_t i, std::size_t j) const {
  auto idx = row_indices(i);
  auto it = std::lower_bound(idx.begin(), idx.end(), j);
  if (it == idx.end() || *it != j) return 0.0;
  return values[offsets[i] + static_cast<std::size_t>(it - idx.begin())];
}

CsrMatrix CsrMatrix::transpose() const {
  CsrMatrix t;
  t.rows = cols;
  t.cols = rows;
  t.offsets.assign(cols + 1, 0);
  for (auto j : indices) ++t.offsets[j + 1];
  for (std::size_t j = 0; j < cols; ++j) t.offsets[j + 1] += t.offsets[j];
  t.indices.resize(nnz());
  t.values.resize(nnz());
  std::vector<std::uint64_t> fill(t.offsets.begin(), t.offsets.end() - 1);
  for (std::size_t i = 0; i < rows; ++i) {
    for (auto k = offsets[i]; k < offsets[i + 1]; ++k) {
      const auto pos = fill[indices[k]]++;
      t.indices[pos] = static_cast<std::uint32_t>(i);
      t.values[pos] = values[k];
    }
  }
  return t;
}

double dice(std::uint64_t df_i, std::uint64_t df_j, std::uint64_t codf_ij) {
  if (df_i == 0 || df_j == 0 || codf_ij > std::min(df_i, df_j)) {
    throw ValidationError("dice: require df_i, df_j >= 1 and codf <= min(df_i, df_j)");
  }
  return 2.0 * static_cast<double>(codf_ij) /
         (static_cast<double>(df_i) + static_cast<double>(df_j));
}

SparseSimilarity SparseSimilarity::from_dense(
    const std::vector<std::vector<double>>& dense) {
  SparseSimilarity s;
  s.cutoff = 0.0;
  const std::size_t n = dense.size();
  s.matrix.rows = s.matrix.cols = n;
  for (std::size_t i = 0; i < n; ++i) {
    if (dense[i].size() != n) throw DataError("dense similarity is not square");
    for (std::size_t j = 0; j < n; ++j) {
      if (dense[i][j] != 0.0) {
        s.matrix.indices.push_back(static_cast<std::uint32_t>(j));
        s.matrix.values.push_back(dense[i][j]);
      }
    }
    s.matrix.offsets.push_back(s.matrix.indices.size());
  }
  s.validate();
  return s;
}

void SparseSimilarity::validate() const {
  const CsrMatrix& m = matrix;
  if (m.rows != m.cols) throw DataError("similarity matrix is not square");
  if (m.offsets.size() != m.rows + 1 || m.offsets.front() != 0 ||
      m.offsets.back() != m.nnz() || m.values.size() != m.nnz()) {
    throw DataError("similarity matrix has inconsistent row offsets");
  }
  for (std::size_t i = 0; i < m.rows; ++i) {
    if (m.offsets[i] > m.offsets[i + 1]) {
      throw DataError("similarity matrix has decreasing row offsets");
    }
    auto idx = m.row_indices(i);
    auto val = m.row_values(i);
    bool diagonal = false;
    for (std::size_t k = 0; k < idx.size(); ++k) {
      if (idx[k] >= m.cols || (k > 0 && idx[k] <= idx[k - 1])) {
        throw DataError("similarity row " + std::to_string(i) +
                        " is unsorted, duplicated or out of range");
      }
      if (!(val[k] > 0.0 && val[k] <= 1.0)) {
        throw DataError("similarity value outside (0, 1] in row " +
                        std::to_string(i));
      }
      if (idx[k] == i) {
        if (val[k] != 1.0) throw DataError("similarity diagonal is not 1");
        diagonal = true;
      } else if (m.at(idx[k], i) != val[k]) {
        throw DataError("similarity matrix is not symmetric at (" +
                        std::to_string(i) + ", " + std::to_string(idx[k]) + ")");
      }
    }
    if (!diagonal) throw DataError("similarity diagonal entry missing");
  }
}

SparseSimilarity build_similarity(const Vocabulary& vocab, double cutoff,
                                  WorkerPool* pool) {
  if (!(cutoff >= 0.0 && cutoff < 1.0)) {
    throw ValidationError("cutoff must lie in [0, 1)");
  }
  const std::size_t n = vocab.size();

  std::vector<std::vector<std::uint32_t>> doc_terms(vocab.n_docs);
  for (std::size_t i = 0; i < n; ++i) {
    for (DocIndex d : vocab.postings[i]) {
      doc_terms[d].push_back(static_cast<std::uint32_t>(i));
    }
  }

  // Upper-triangle entries per row, computed with a dense co-occurrence
  // accumulator per chunk of rows.
  using Entry = std::pair<std::uint32_t, double>;
  std::vector<std::vector<Entry>> upper(n);
  WorkerPool serial(1);
  parallel_for(pool ? *pool : serial, n, 64, [&](std::size_t b, std::size_t e) {
    std::vector<std::uint32_t> co(n, 0);
    std::vector<std::uint32_t> touched;
    for (std::size_t i = b; i < e; ++i) {
      for (DocIndex d : vocab.postings[i]) {
        const auto& terms = doc_terms[d];
        for (auto it = std::upper_bound(terms.begin(), terms.end(), i);
             it != terms.end(); ++it) {
          if (co[*it]++ == 0) touched.push_back(*it);
        }
      }
      std::sort(touched.begin(), touched.end());
      const auto df_i = vocab.postings[i].size();
      for (auto j : touched) {
        const double v = dice(df_i, vocab.postings[j].size(), co[j]);
        if (v >= cutoff) upper[i].emplace_back(j, v);
        co[j] = 0;
      }
      touched.clear();
    }
  });

  std::vector<std::vector<Entry>> lower(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (const auto& [j, v] : upper[i]) {
      lower[j].emplace_back(static_cast<std::uint32_t>(i), v);
    }
  }

  SparseSimilarity s;
  s.cutoff = cutoff;
  CsrMatrix& m = s.matrix;
  m.rows = m.cols = n;
  m.offsets.reserve(n + 1);
  for (std::size_t i = 0; i < n; ++i) {
    auto push = [&](std::uint32_t j, double v) {
      m.indices.push_back(j);
      m.values.push_back(v);
    };
    for (const auto& [j, v] : lower[i]) push(j, v);
    push(static_cast<std::uint32_t>(i), 1.0);
    for (const auto& [j, v] : upper[i]) push(j, v);
    m.offsets.push_back(m.indices.size());
    std::vector<Entry>().swap(lower[i]);
    std::vector<Entry>().swap(upper[i]);
  }
  return s;
}

namespace {

constexpr std::array<char, 6> kMagic = {'C', 'V', 'X', 'S', 'I', 'M'};
constexpr std::uint16_t kFormatVersion = 1;

template <class T>
void put_le(std::ostream& out, T value) {
  using U = std::conditional_t<sizeof(T) == 8, std::uint64_t,
            std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint16_t>>;
  const U bits = std::bit_cast<U>(value);
  char bytes[sizeof(U)];
  for (std::size_t b = 0; b < sizeof(U); ++b) {
    bytes[b] = static_cast<char>((bits >> (8 * b)) & 0xFF);
  }
  out.write(bytes, sizeof(U));
}

template <class T>
T get_le(std::istream& in) {
  using U = std::conditional_t<sizeof(T) == 8, std::uint64_t,
            std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint16_t>>;
  unsigned char bytes[sizeof(U)];
  if (!in.read(reinterpret_cast<char*>(bytes), sizeof(U))) {
    throw DataError("similarity cache is truncated");
  }
  U bits = 0;
  for (std::size_t b = 0; b < sizeof(U); ++b) {
    bits |= static_cast<U>(bytes[b]) << (8 * b);
  }
  return std::bit_cast<T>(bits);
}

}  // namespace

void write_similarity(const SparseSimilarity& s, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + path.string());
  out.write(kMagic.data(), kMagic.size());
  put_le<std::uint16_t>(out, kFormatVersion);
  put_le<std::uint16_t>(out, 0);
  put_le<std::uint64_t>(out, s.n());
  put_le<std::uint64_t>(out, s.matrix.nnz());
  put_le<double>(out, s.cutoff);
  for (auto o : s.matrix.offsets) put_le<std::uint64_t>(out, o);
  for (auto j : s.matrix.indices) put_le<std::uint32_t>(out, j);
  for (auto v : s.matrix.values) put_le<double>(out, v);
  if (!out) throw DataError("failed writing " + path.string());
}

SparseSimilarity read_similarity(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open similarity cache: " + path.string());
  std::array<char, 6> magic{};
  if (!in.read(magic.data(), magic.size()) || magic != kMagic) {
    throw DataError("not a similarity cache: " + path.string());
  }
  if (const auto version = get_le<std::uint16_t>(in); version != kFormatVersion) {
    throw DataError("unsupported similarity cache version " +
                    std::to_string(version));
  }
  get_le<std::uint16_t>(in);
  SparseSimilarity s;
  const auto n = get_le<std::uint64_t>(in);
  const auto nnz = get_le<std::uint64_t>(in);
  s.cutoff = get_le<double>(in);
  s.matrix.rows = s.matrix.cols = n;
  s.matrix.offsets.resize(n + 1);
  for (auto& o : s.matrix.offsets) o = get_le<std::uint64_t>(in);
  s.matrix.indices.resize(nnz);
  for (auto& j : s.matrix.indices) j = get_le<std::uint32_t>(in);
  s.matrix.values.resize(nnz);
  for (auto& v : s.matrix.values) v = get_le<double>(in);
  s.validate();
  return s;
}

}  // namespace convex_topics
