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

#ifndef CONVEX_TOPICS_PARALLEL_H_
#define CONVEX_TOPICS_PARALLEL_H_

#include <algorithm>
#include <atomic>
#include <condition_variable>
#include <cstddef>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace convex_topics {

// Default number of elements per work chunk. Chunk boundaries depend only on
// the problem size, never on the worker count, so every per-chunk partial
// result and the order in which partials are combined are fixed.
inline constexpr std::size_t kDefaultGrain = 2048;

// Resolves a requested worker count: 0 means all available cores.
unsigned resolve_threads(unsigned requested);

// A fixed set of worker threads executing indexed chunks of a job. The
// calling thread participates, so a pool of size 1 spawns no threads.
class WorkerPool {
 public:
  explicit WorkerPool(unsigned threads = 1);
  ~WorkerPool();

  WorkerPool(const WorkerPool&) = delete;
  WorkerPool& operator=(const WorkerPool&) = delete;

  unsigned size() const { return static_cast<unsigned>(workers_.size()) + 1; }

  // Calls fn(c) for every c in [0, n_chunks). Blocks until all chunks are
  // done. If any chunk throws, the exception of the lowest failing chunk
  // index is rethrown.
  void run(std::size_t n_chunks, const std::function<void(std::size_t)>& fn);

 private:
  void worker_loop();
  void drain();

  std::vector<std::thread> workers_;
  std::mutex mu_;
  std::condition_variable wake_;
  std::condition_variable done_;
  const std::function<void(std::size_t)>* job_ = nullptr;
  std::size_t n_chunks_ = 0;
  std::atomic<std::size_t> next_{0};
  std::size_t busy_ = 0;
  std::size_t generation_ = 0;
  bool stop_ = false;
  std::size_t error_chunk_ = 0;
  std::exception_ptr error_;
};

inline std::size_t chunk_count(std::size_t n, std::size_t grain) {
  return grain == 0 ? 0 : (n + grain - 1) / grain;
}

// Runs body(begin, end) over [0, n) split into chunks of `grain` elements.
template <class Body>
void parallel_for(WorkerPool& pool, std::size_t n, std::size_t grain,
                  Body&& body) {
  const std::size_t chunks = chunk_count(n, grain);
  pool.run(chunks, [&](std::size_t c) {
    const std::size_t begin = c * grain;
    body(begin, std::min(n, begin + grain));
  });
}

// Sums partial(begin, end) over fixed chunks of [0, n). Partials are combined
// left to right in chunk order, so the result is bit-identical for any pool
// size.
template <class Partial>
double ordered_sum(WorkerPool& pool, std::size_t n, std::size_t grain,
                   Partial&& partial) {
  const std::size_t chunks = chunk_count(n, grain);
  std::vector<double> partials(chunks, 0.0);
  pool.run(chunks, [&](std::size_t c) {
    const std::size_t begin = c * grain;
    partials[c] = partial(begin, std::min(n, begin + grain));
  });
  double total = 0.0;
  for (double p : partials) total += p;
  return total;
}

}  // namespace convex_topics

#endif  // CONVEX_TOPICS_PARALLEL_H_
