#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "auclab/distribution.hpp"

namespace auclab {

/// Per-trial seed: master XOR trial index. Results never depend on which
/// worker ran a trial.
inline std::uint64_t trial_seed(std::uint64_t master, std::uint64_t trial) noexcept { return master ^ trial; }

/// Worker count from AUCLAB_THREADS, else the hardware concurrency.
inline std::size_t worker_count() {
  if (const char* env = std::getenv("AUCLAB_THREADS")) {
    try {
      const long v = std::stol(env);
      if (v >= 1) return static_cast<std::size_t>(v);
    } catch (const std::exception&) {
    }
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

/// Evaluates fn(0..count-1) on a worker pool; results are indexed by trial.
/// The first exception thrown by any trial is rethrown after all workers join.
template <class R, class F>
std::vector<R> run_trials(std::size_t count, F&& fn, std::size_t workers = worker_count()) {
  std::vector<R> results(count);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        results[i] = fn(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  workers = std::max<std::size_t>(1, std::min(workers, count));
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);
  return results;
}

struct DistributionSampling {
  std::size_t min_instances = 2;
  std::size_t max_instances = 6;
  double eta_lo = 0.02;
  double eta_hi = 0.98;
};

/// Marginal ~ Dirichlet(1,...,1), eta ~ U(eta_lo, eta_hi), n uniform in range.
inline DiscreteDistribution sample_distribution(std::mt19937_64& rng, const DistributionSampling& s = {}) {
  std::uniform_int_distribution<std::size_t> size(s.min_instances, s.max_instances);
  const std::size_t n = size(rng);
  std::exponential_distribution<double> gamma1(1.0);
  std::uniform_real_distribution<double> eta_draw(s.eta_lo, s.eta_hi);
  std::vector<double> marginal(n);
  std::vector<double> eta(n);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    marginal[i] = gamma1(rng);
    total += marginal[i];
  }
  for (double& m : marginal) m /= total;
  for (double& e : eta) e = eta_draw(rng);
  return DiscreteDistribution(std::move(marginal), std::move(eta));
}

/// Every eta in {0,1}, at least one instance of each class.
inline DiscreteDistribution sample_realizable_distribution(std::mt19937_64& rng, std::size_t min_instances = 2,
                                                           std::size_t max_instances = 6) {
  std::uniform_int_distribution<std::size_t> size(min_instances, max_instances);
  const std::size_t n = size(rng);
  std::exponential_distribution<double> gamma1(1.0);
  std::bernoulli_distribution coin(0.5);
  std::vector<double> marginal(n);
  std::vector<double> eta(n);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    marginal[i] = gamma1(rng);
    total += marginal[i];
  }
  for (double& m : marginal) m /= total;
  for (;;) {
    std::size_t positives = 0;
    for (double& e : eta) {
      e = coin(rng) ? 1.0 : 0.0;
      positives += e == 1.0;
    }
    if (positives > 0 && positives < n) break;
  }
  return DiscreteDistribution(std::move(marginal), std::move(eta));
}

/// Standard normal score per instance.
inline ScoreVector sample_scores(std::mt19937_64& rng, std::size_t n) {
  std::normal_distribution<double> z(0.0, 1.0);
  std::vector<double> f(n);
  for (double& v : f) v = z(rng);
  return ScoreVector(std::move(f));
}

}  // namespace auclab
