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

#ifndef CONVEX_TOPICS_SOLVER_H_
#define CONVEX_TOPICS_SOLVER_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "convex_topics/similarity.h"

namespace convex_topics {

struct SolverConfig {
  double tol = 1e-9;          // relative log-likelihood improvement
  std::size_t patience = 3;   // consecutive sub-tol iterations before stopping
  std::size_t max_iter = 100000;
  double prune_eps = 1e-6;    // relative to max_j q_j
  // Optimality certificate required before stopping: eta_j <= 1 + kkt_tol
  // everywhere and |eta_j - 1| <= kkt_tol on the support.
  double kkt_tol = 1e-8;
  unsigned threads = 0;       // 0: all cores

  void validate() const;
};

// Iterate of the multiplicative updates: the exemplar prior q together with
// the mixture mass z_i = sum_j s_ij q_j and the update factors
// eta_j = (1/n) sum_i s_ij / z_i evaluated at q.
struct SolverState {
  std::vector<double> q;
  std::vector<double> z;
  std::vector<double> eta;
  std::size_t iteration = 0;
  std::vector<double> loglik_history;
};

struct TopicModel {
  std::size_t n = 0;
  SolverConfig config;
  std::vector<double> q;
  std::vector<std::uint32_t> exemplars;  // ascending; the support of q
  CsrMatrix responsibilities;            // term x exemplar, rows sum to 1
  double loglik = 0.0;
  std::vector<double> loglik_trace;
  std::size_t iterations = 0;
  bool converged = false;
};

struct Topic {
  std::uint32_t exemplar = 0;
  std::string exemplar_term;
  double mass = 0.0;  // q of the exemplar
  // (term id, responsibility), by responsibility descending then id.
  std::vector<std::pair<std::uint32_t, double>> members;
  std::vector<std::string> member_terms;
};

// Mean log mixture mass (1/n) sum_i log z_i. Returns -infinity when some
// z_i is zero.
double log_likelihood(const SparseSimilarity& s, std::span<const double> q,
                      WorkerPool* pool = nullptr);

// Builds the state at q. Throws DisconnectedSupportError if some z_i is 0.
SolverState make_state(const SparseSimilarity& s, std::vector<double> q,
                       WorkerPool* pool = nullptr);

// True when eta certifies q as optimal within kkt_tol.
bool kkt_satisfied(const SolverState& state, double kkt_tol);

// One multiplicative update q_j <- eta_j q_j, returning the state at the new
// prior with its log-likelihood appended to the history.
SolverState update_step(const SparseSimilarity& s, const SolverState& state,
                        WorkerPool* pool = nullptr);

struct FitHooks {
  // Strictly positive starting prior (normalized on entry); uniform if unset.
  std::optional<std::vector<double>> initial_q;
  // Called with the state after initialization and after every iteration.
  std::function<void(const SolverState&)> on_iteration;
};

// Maximizes the exemplar log-likelihood from a uniform prior, pruning
// coordinates that decay below prune_eps * max(q) to exact zeros. Stops once
// the relative improvement stays below tol for `patience` iterations and the
// optimality certificate holds; a model that hits max_iter first is returned
// with converged == false.
TopicModel fit(const SparseSimilarity& s, const SolverConfig& config,
               const FitHooks& hooks = {});

// r_ij = s_ij q_j / z_i over stored entries with q_j > 0.
CsrMatrix responsibilities(const SparseSimilarity& s, std::span<const double> q,
                           WorkerPool* pool = nullptr);

// Topics ordered by exemplar mass descending, then exemplar id.
std::vector<Topic> extract_topics(const TopicModel& model);
std::vector<Topic> extract_topics(const TopicModel& model, const Vocabulary& vocab);

}  // namespace convex_topics

#endif  // CONVEX_TOPICS_SOLVER_H_
