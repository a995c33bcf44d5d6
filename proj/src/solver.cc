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

#include "convex_topics/solver.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>

#include "convex_topics/error.h"
#include "convex_topics/parallel.h"

namespace convex_topics {
namespace {

constexpr std::size_t kRowGrain = 1024;
constexpr std::size_t kMaxRevivals = 32;
// Iterations between attempts to drop stalled support coordinates.
constexpr std::size_t kTrimInterval = 50;

WorkerPool& pool_or(WorkerPool* pool, WorkerPool& fallback) {
  return pool ? *pool : fallback;
}

std::vector<double> mixture_mass(const SparseSimilarity& s,
                                 std::span<const double> q, WorkerPool& pool) {
  const CsrMatrix& m = s.matrix;
  std::vector<double> z(m.rows);
  parallel_for(pool, m.rows, kRowGrain, [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) {
      double acc = 0.0;
      for (auto k = m.offsets[i]; k < m.offsets[i + 1]; ++k) {
        acc += m.values[k] * q[m.indices[k]];
      }
      z[i] = acc;
    }
  });
  return z;
}

// eta_j = (1/n) sum_i s_ij / z_i, read along row j by symmetry.
std::vector<double> update_factors(const SparseSimilarity& s,
                                   std::span<const double> z, WorkerPool& pool) {
  const CsrMatrix& m = s.matrix;
  const double inv_n = 1.0 / static_cast<double>(m.rows);
  std::vector<double> eta(m.rows);
  parallel_for(pool, m.rows, kRowGrain, [&](std::size_t b, std::size_t e) {
    for (std::size_t j = b; j < e; ++j) {
      double acc = 0.0;
      for (auto k = m.offsets[j]; k < m.offsets[j + 1]; ++k) {
        acc += m.values[k] / z[m.indices[k]];
      }
      eta[j] = acc * inv_n;
    }
  });
  return eta;
}

double mean_log(std::span<const double> z, WorkerPool& pool) {
  const double total =
      ordered_sum(pool, z.size(), kDefaultGrain, [&](std::size_t b, std::size_t e) {
        double acc = 0.0;
        for (std::size_t i = b; i < e; ++i) acc += std::log(z[i]);
        return acc;
      });
  return total / static_cast<double>(z.size());
}

void normalize(std::vector<double>& q, WorkerPool& pool) {
  const double total =
      ordered_sum(pool, q.size(), kDefaultGrain, [&](std::size_t b, std::size_t e) {
        double acc = 0.0;
        for (std::size_t j = b; j < e; ++j) acc += q[j];
        return acc;
      });
  if (!(total > 0.0) || !std::isfinite(total)) {
    throw DataError("exemplar prior has no positive mass");
  }
  for (double& v : q) v /= total;
}

// Near a degenerate optimum the multiplicative update drives some q_j to zero
// only sublinearly (eta_j -> 1 as q_j -> 0). Once the objective has stalled,
// drop the support coordinates that still fail the certificate with
// eta_j < 1, smallest first; removing q_j gains q_j (1 - eta_j) to first
// order. The drop is kept only if the objective does not decrease, trying
// successively smaller prefixes. Returns the new prior, or nothing.
std::optional<std::vector<double>> trim_stragglers(const SparseSimilarity& s,
                                                   const SolverState& state,
                                                   double kkt_tol, WorkerPool& pool) {
  std::vector<std::size_t> candidates;
  std::size_t support = 0;
  for (std::size_t j = 0; j < state.q.size(); ++j) {
    if (state.q[j] <= 0.0) continue;
    ++support;
    if (state.eta[j] < 1.0 - kkt_tol) candidates.push_back(j);
  }
  std::sort(candidates.begin(), candidates.end(), [&](std::size_t a, std::size_t b) {
    return state.q[a] != state.q[b] ? state.q[a] < state.q[b] : a < b;
  });
  if (candidates.size() >= support) candidates.resize(support - 1);
  const double current = state.loglik_history.back();
  for (std::size_t k = candidates.size(); k > 0; k /= 2) {
    std::vector<double> q = state.q;
    for (std::size_t c = 0; c < k; ++c) q[candidates[c]] = 0.0;
    normalize(q, pool);
    const auto z = mixture_mass(s, q, pool);
    if (std::any_of(z.begin(), z.end(), [](double v) { return !(v > 0.0); })) continue;
    if (mean_log(z, pool) >= current) return q;
  }
  return std::nullopt;
}

}  // namespace

void SolverConfig::validate() const {
  if (!(tol > 0.0)) throw ValidationError("tol must be positive");
  if (!(prune_eps > 0.0 && prune_eps < 1.0)) {
    throw ValidationError("prune_eps must lie in (0, 1)");
  }
  if (max_iter < 1) throw ValidationError("max_iter must be at least 1");
  if (patience < 1) throw ValidationError("patience must be at least 1");
  if (!(kkt_tol > 0.0)) throw ValidationError("kkt_tol must be positive");
}

bool kkt_satisfied(const SolverState& state, double kkt_tol) {
  for (std::size_t j = 0; j < state.q.size(); ++j) {
    if (state.eta[j] > 1.0 + kkt_tol) return false;
    if (state.q[j] > 0.0 && state.eta[j] < 1.0 - kkt_tol) return false;
  }
  return true;
}

double log_likelihood(const SparseSimilarity& s, std::span<const double> q,
                      WorkerPool* pool) {
  if (q.size() != s.n()) {
    throw ValidationError("log_likelihood: prior has " + std::to_string(q.size()) +
                          " entries for " + std::to_string(s.n()) + " terms");
  }
  WorkerPool serial(1);
  WorkerPool& workers = pool_or(pool, serial);
  const auto z = mixture_mass(s, q, workers);
  if (std::any_of(z.begin(), z.end(), [](double v) { return !(v > 0.0); })) {
    return -std::numeric_limits<double>::infinity();
  }
  return mean_log(z, workers);
}

SolverState make_state(const SparseSimilarity& s, std::vector<double> q,
                       WorkerPool* pool) {
  if (q.size() != s.n()) {
    throw ValidationError("prior has " + std::to_string(q.size()) +
                          " entries for " + std::to_string(s.n()) + " terms");
  }
  WorkerPool serial(1);
  WorkerPool& workers = pool_or(pool, serial);
  SolverState state;
  state.z = mixture_mass(s, q, workers);
  for (std::size_t i = 0; i < state.z.size(); ++i) {
    if (!(state.z[i] > 0.0)) {
      throw DisconnectedSupportError(
          "disconnected support: term " + std::to_string(i) +
          " has no exemplar with positive mass among its neighbours");
    }
  }
  state.eta = update_factors(s, state.z, workers);
  state.q = std::move(q);
  return state;
}

SolverState update_step(const SparseSimilarity& s, const SolverState& state,
                        WorkerPool* pool) {
  WorkerPool serial(1);
  WorkerPool& workers = pool_or(pool, serial);
  std::vector<double> q(state.q.size());
  for (std::size_t j = 0; j < q.size(); ++j) q[j] = state.eta[j] * state.q[j];
  // sum_j eta_j q_j = (1/n) sum_i z_i / z_i = 1 up to rounding.
  normalize(q, workers);
  SolverState next = make_state(s, std::move(q), &workers);
  next.iteration = state.iteration + 1;
  next.loglik_history = state.loglik_history;
  next.loglik_history.push_back(mean_log(next.z, workers));
  return next;
}

namespace {

// One multiplicative update with pruning: q <- eta * q, then coordinates
// that are both tiny and still shrinking are set to zero.
std::vector<double> em_map(const SolverState& state, double prune_eps, WorkerPool& pool) {
  const std::size_t n = state.q.size();
  std::vector<double> q(n);
  for (std::size_t j = 0; j < n; ++j) q[j] = state.eta[j] * state.q[j];
  const double cut = prune_eps * *std::max_element(q.begin(), q.end());
  for (std::size_t j = 0; j < n; ++j) {
    if (q[j] > 0.0 && q[j] < cut && state.eta[j] < 1.0) q[j] = 0.0;
  }
  normalize(q, pool);
  return q;
}

double dot(std::span<const double> a, std::span<const double> b, WorkerPool& pool) {
  return ordered_sum(pool, a.size(), kDefaultGrain, [&](std::size_t lo, std::size_t hi) {
    double acc = 0.0;
    for (std::size_t j = lo; j < hi; ++j) acc += a[j] * b[j];
    return acc;
  });
}

// Squared extrapolation (SQUAREM) from three successive iterates of the
// update map. The step length is clipped to [1, max_step]; length 1 would
// reproduce q2, so no proposal is made then.
struct Proposal {
  std::vector<double> q;
  double step = 0.0;
};

std::optional<Proposal> extrapolate(std::span<const double> q0, std::span<const double> q1,
                                    std::span<const double> q2, double max_step,
                                    WorkerPool& pool) {
  const std::size_t n = q0.size();
  std::vector<double> r(n), v(n);
  for (std::size_t j = 0; j < n; ++j) {
    r[j] = q1[j] - q0[j];
    v[j] = q2[j] - 2.0 * q1[j] + q0[j];
  }
  const double rr = dot(r, r, pool);
  const double vv = dot(v, v, pool);
  if (!(vv > 0.0) || !(rr > 0.0)) return std::nullopt;
  const double step = std::min(std::sqrt(rr / vv), max_step);
  if (!(step > 1.0)) return std::nullopt;
  Proposal p{std::vector<double>(n), step};
  double total = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const double x = q0[j] + 2.0 * step * r[j] + step * step * v[j];
    p.q[j] = q2[j] > 0.0 && x > 0.0 ? x : 0.0;
    total += p.q[j];
  }
  if (!(total > 0.0) || !std::isfinite(total)) return std::nullopt;
  normalize(p.q, pool);
  return p;
}

}  // namespace

TopicModel fit(const SparseSimilarity& s, const SolverConfig& config,
               const FitHooks& hooks) {
  config.validate();
  const std::size_t n = s.n();
  if (n == 0) throw DataError("cannot fit an empty similarity matrix");
  WorkerPool pool(resolve_threads(config.threads));

  std::vector<double> q0;
  if (hooks.initial_q) {
    q0 = *hooks.initial_q;
    if (q0.size() != n) throw ValidationError("initial prior has the wrong size");
    for (double v : q0) {
      if (!(v > 0.0) || !std::isfinite(v)) {
        throw ValidationError("initial prior must be strictly positive");
      }
    }
    normalize(q0, pool);
  } else {
    q0.assign(n, 1.0 / static_cast<double>(n));
  }

  SolverState state = make_state(s, std::move(q0), &pool);
  state.loglik_history.push_back(mean_log(state.z, pool));
  if (hooks.on_iteration) hooks.on_iteration(state);

  TopicModel model;
  model.n = n;
  model.config = config;
  std::size_t calm = 0;
  std::size_t revivals = 0;
  std::size_t next_trim = 0;
  double max_step = 4.0;

  // Every recorded iterate goes through here; the objective never decreases
  // between consecutive records.
  auto commit = [&](SolverState next) {
    const double previous = state.loglik_history.back();
    std::vector<double> history = std::move(state.loglik_history);
    next.iteration = state.iteration + 1;
    history.push_back(mean_log(next.z, pool));
    next.loglik_history = std::move(history);
    state = std::move(next);
    if (hooks.on_iteration) hooks.on_iteration(state);
    const double current = state.loglik_history.back();
    const double scale = std::max(std::abs(previous), 1e-300);
    calm = (current - previous) / scale < config.tol ? calm + 1 : 0;
  };
  auto remaining = [&] { return config.max_iter - state.iteration; };

  while (state.iteration < config.max_iter) {
    // Two plain updates, then an extrapolated point that is kept (after one
    // stabilizing update) only if it beats the second plain update.
    const std::vector<double> start = state.q;
    commit(make_state(s, em_map(state, config.prune_eps, pool), &pool));
    if (remaining() >= 2) {
      const std::vector<double> first = state.q;
      commit(make_state(s, em_map(state, config.prune_eps, pool), &pool));
      if (auto p = extrapolate(start, first, state.q, max_step, pool)) {
        try {
          const SolverState jumped = make_state(s, std::move(p->q), &pool);
          SolverState settled = make_state(s, em_map(jumped, config.prune_eps, pool), &pool);
          if (mean_log(settled.z, pool) >= state.loglik_history.back()) {
            commit(std::move(settled));
            if (p->step >= max_step) max_step *= 4.0;
          } else {
            max_step = std::max(4.0, max_step / 4.0);
          }
        } catch (const DisconnectedSupportError&) {
          max_step = std::max(4.0, max_step / 4.0);
        }
      }
    }
    if (calm < config.patience || state.iteration >= config.max_iter) continue;

    // A pruned coordinate with eta_j > 1 would gain mass; reinstate it at
    // the prune threshold and keep iterating.
    if (revivals < kMaxRevivals) {
      const double seed =
          config.prune_eps * *std::max_element(state.q.begin(), state.q.end());
      std::vector<double> r = state.q;
      bool revived = false;
      for (std::size_t j = 0; j < n; ++j) {
        if (r[j] == 0.0 && state.eta[j] > 1.0 + 0.1 * config.kkt_tol) {
          r[j] = seed;
          revived = true;
        }
      }
      if (revived) {
        ++revivals;
        normalize(r, pool);
        commit(make_state(s, std::move(r), &pool));
        calm = 0;
        continue;
      }
    }
    if (kkt_satisfied(state, config.kkt_tol)) {
      model.converged = true;
      break;
    }
    if (state.iteration >= next_trim) {
      next_trim = state.iteration + kTrimInterval;
      if (auto trimmed = trim_stragglers(s, state, config.kkt_tol, pool)) {
        commit(make_state(s, std::move(*trimmed), &pool));
        calm = 0;
      }
    }
  }

  model.iterations = state.iteration;
  model.loglik = state.loglik_history.back();
  model.loglik_trace = state.loglik_history;
  model.q = state.q;
  for (std::size_t j = 0; j < n; ++j) {
    if (model.q[j] > 0.0) model.exemplars.push_back(static_cast<std::uint32_t>(j));
  }
  model.responsibilities = responsibilities(s, model.q, &pool);
  return model;
}

CsrMatrix responsibilities(const SparseSimilarity& s, std::span<const double> q,
                           WorkerPool* pool) {
  if (q.size() != s.n()) throw ValidationError("responsibilities: size mismatch");
  const CsrMatrix& m = s.matrix;
  WorkerPool serial(1);
  WorkerPool& workers = pool_or(pool, serial);

  std::vector<std::uint64_t> counts(m.rows, 0);
  parallel_for(workers, m.rows, kRowGrain, [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) {
      for (auto k = m.offsets[i]; k < m.offsets[i + 1]; ++k) {
        if (q[m.indices[k]] > 0.0) ++counts[i];
      }
    }
  });
  CsrMatrix r;
  r.rows = r.cols = m.rows;
  r.offsets.assign(m.rows + 1, 0);
  for (std::size_t i = 0; i < m.rows; ++i) r.offsets[i + 1] = r.offsets[i] + counts[i];
  r.indices.resize(r.offsets.back());
  r.values.resize(r.offsets.back());
  parallel_for(workers, m.rows, kRowGrain, [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) {
      double z = 0.0;
      for (auto k = m.offsets[i]; k < m.offsets[i + 1]; ++k) {
        z += m.values[k] * q[m.indices[k]];
      }
      if (!(z > 0.0)) {
        throw DisconnectedSupportError("disconnected support: term " +
                                       std::to_string(i) + " has zero mixture mass");
      }
      auto out = r.offsets[i];
      for (auto k = m.offsets[i]; k < m.offsets[i + 1]; ++k) {
        const double qj = q[m.indices[k]];
        if (qj > 0.0) {
          r.indices[out] = m.indices[k];
          r.values[out] = m.values[k] * qj / z;
          ++out;
        }
      }
    }
  });
  return r;
}

std::vector<Topic> extract_topics(const TopicModel& model) {
  const CsrMatrix columns = model.responsibilities.transpose();
  std::vector<Topic> topics;
  topics.reserve(model.exemplars.size());
  for (auto j : model.exemplars) {
    Topic t;
    t.exemplar = j;
    t.mass = model.q[j];
    auto idx = columns.row_indices(j);
    auto val = columns.row_values(j);
    for (std::size_t k = 0; k < idx.size(); ++k) t.members.emplace_back(idx[k], val[k]);
    std::sort(t.members.begin(), t.members.end(), [](const auto& a, const auto& b) {
      return a.second != b.second ? a.second > b.second : a.first < b.first;
    });
    topics.push_back(std::move(t));
  }
  std::sort(topics.begin(), topics.end(), [](const Topic& a, const Topic& b) {
    return a.mass != b.mass ? a.mass > b.mass : a.exemplar < b.exemplar;
  });
  return topics;
}

std::vector<Topic> extract_topics(const TopicModel& model, const Vocabulary& vocab) {
  if (vocab.size() != model.n) {
    throw ValidationError("vocabulary size does not match the model");
  }
  auto topics = extract_topics(model);
  for (auto& t : topics) {
    t.exemplar_term = vocab.terms[t.exemplar];
    for (const auto& [i, r] : t.members) t.member_terms.push_back(vocab.terms[i]);
  }
  return topics;
}

}  // namespace convex_topics
