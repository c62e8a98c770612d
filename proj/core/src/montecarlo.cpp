// Copyright 2026 The qrepeater Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "qrepeater/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "qrepeater/errors.hpp"
#include "qrepeater/model.hpp"

namespace qrep {

namespace {

// Failed rounds beyond this are drawn in aggregate.
constexpr std::uint64_t kIndividualRoundLimit = 1024;
constexpr double kMaxCount = 4.0e18;

void check_probability(double p) {
  if (p == 0.0) {
    throw ModelError(ModelErrorKind::NonTerminating,
                     "non-terminating process: per-attempt success probability is zero");
  }
  if (!(p > 0.0 && p <= 1.0)) {
    throw InvalidParameter("success probability must lie in (0, 1], got " + std::to_string(p));
  }
}

std::uint64_t to_count(double value) {
  if (!(value < kMaxCount)) throw SimulationAbort("attempt count overflows 64-bit range");
  return static_cast<std::uint64_t>(value);
}

// Failures before the first success of a Bernoulli(p) sequence.
std::uint64_t sample_failures(double p, Rng& rng) {
  if (p >= 1.0) return 0;
  return to_count(std::floor(std::log(open_unit(rng)) / std::log1p(-p)));
}

// Two-pass mean and spread about the first sample, so a constant series
// reports that constant and a zero spread without rounding residue.
Estimate estimate(const std::vector<double>& xs, double* stddev = nullptr) {
  const auto count = static_cast<double>(xs.size());
  const double shift = xs.front();
  double offset = 0.0;
  for (double x : xs) offset += x - shift;
  offset /= count;
  double ss = 0.0;
  for (double x : xs) ss += (x - shift - offset) * (x - shift - offset);
  const double sd = xs.size() > 1 ? std::sqrt(ss / (count - 1.0)) : 0.0;
  if (stddev) *stddev = sd;
  return {shift + offset, sd / std::sqrt(count)};
}

}  // namespace

Rng trial_rng(std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  return Rng(seq);
}

double open_unit(Rng& rng) {
  return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

std::uint64_t sample_chain_round(double p, int n, Rng& rng) {
  check_probability(p);
  if (n < 1) throw InvalidParameter("link count must be >= 1");
  if (p >= 1.0) return 1;
  const double log_q = std::log1p(-p);
  double slowest = 1.0;
  for (int i = 0; i < n; ++i) {
    slowest = std::max(slowest, std::ceil(std::log(open_unit(rng)) / log_q));
  }
  return to_count(slowest);
}

std::uint64_t sample_aggregate_attempts(double p, int n, std::uint64_t rounds, Rng& rng) {
  check_probability(p);
  if (n < 1) throw InvalidParameter("link count must be >= 1");
  if (rounds == 0) return 0;
  if (p >= 1.0) return rounds;

  const double log_p = std::log(p);
  const double log_q = std::log1p(-p);
  std::vector<double> log_fact(static_cast<std::size_t>(n) + 1, 0.0);
  for (int k = 2; k <= n; ++k) log_fact[k] = log_fact[k - 1] + std::log(static_cast<double>(k));

  // entries[j]: times any round entered the state with j links still waiting.
  std::vector<std::uint64_t> entries(static_cast<std::size_t>(n) + 1, 0);
  entries[n] = rounds;
  double total = 0.0;
  std::vector<double> weight;
  std::vector<double> tail;
  for (int j = n; j >= 1; --j) {
    const std::uint64_t visits = entries[j];
    if (visits == 0) continue;

    // Each visit lasts Geometric(1 - q^j) attempts.
    const double leave = -std::expm1(j * log_q);
    total += static_cast<double>(visits);
    if (leave < 1.0) {
      std::negative_binomial_distribution<long long> extra(static_cast<long long>(visits), leave);
      total += static_cast<double>(extra(rng));
    }

    // On leaving, r < j links remain with weight C(j, r) q^r p^(j-r).
    weight.assign(static_cast<std::size_t>(j), 0.0);
    for (int r = 0; r < j; ++r) {
      weight[r] = std::exp(log_fact[j] - log_fact[r] - log_fact[j - r] + r * log_q +
                           (j - r) * log_p);
    }
    // Multinomial split of the exits as a chain of conditional binomials.
    tail.assign(static_cast<std::size_t>(j) + 1, 0.0);
    for (int r = j - 1; r >= 0; --r) tail[r] = tail[r + 1] + weight[r];
    std::uint64_t left = visits;
    for (int r = 0; r < j - 1 && left > 0; ++r) {
      const double share = tail[r] > 0.0 ? std::clamp(weight[r] / tail[r], 0.0, 1.0) : 0.0;
      std::binomial_distribution<long long> pick(static_cast<long long>(left), share);
      const auto moved = static_cast<std::uint64_t>(pick(rng));
      entries[r] += moved;
      left -= moved;
    }
    entries[j - 1] += left;
  }
  return to_count(total);
}

TrialSample simulate_success(const TrialConfig& cfg, std::uint64_t index) {
  const double p = ec_prob(cfg.hw, cfg.chain, cfg.ch);
  check_probability(p);
  const int n = cfg.chain.link_count();
  const double retrieval = cfg.hw.retrieval_probability();
  const double round_success = std::pow(0.5 * retrieval, n - 1) * retrieval;

  Rng rng = trial_rng(cfg.seed, index);
  TrialSample s;
  // Swap and retrieval outcomes are independent of the attempt counts, so the
  // number of failed rounds is drawn first.
  s.failed_rounds = sample_failures(round_success, rng);
  std::uint64_t failed_attempts = 0;
  if (s.failed_rounds <= kIndividualRoundLimit) {
    for (std::uint64_t r = 0; r < s.failed_rounds; ++r) failed_attempts += sample_chain_round(p, n, rng);
  } else {
    failed_attempts = sample_aggregate_attempts(p, n, s.failed_rounds, rng);
  }
  s.attempts = sample_chain_round(p, n, rng);

  const double tick = cfg.ch.delay(cfg.chain.link_length());
  const double signalling = cfg.ch.delay(cfg.chain.total_length());
  s.mem_time = tick * static_cast<double>(s.attempts) + signalling;
  s.elapsed = tick * (static_cast<double>(failed_attempts) + static_cast<double>(s.attempts)) +
              static_cast<double>(s.failed_rounds + 1) * signalling;
  return s;
}

TrialStats simulate(const TrialConfig& cfg) {
  cfg.hw.validate();
  cfg.ch.validate();
  if (cfg.trials < 1) throw InvalidParameter("trials must be >= 1");
  const double p = ec_prob(cfg.hw, cfg.chain, cfg.ch);
  check_probability(p);
  const double retrieval = cfg.hw.retrieval_probability();
  const double round_success = std::pow(0.5 * retrieval, cfg.chain.link_count() - 1) * retrieval;
  if (!(round_success > 0.0) || 1.0 / round_success > kMaxRoundsPerSuccess) {
    throw SimulationAbort("simulation aborted: expected rounds per success exceeds 1e9");
  }

  std::vector<TrialSample> samples(cfg.trials);
  unsigned threads = cfg.threads ? cfg.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::uint64_t>(threads, cfg.trials));

  constexpr std::uint64_t kChunk = 64;
  std::atomic<std::uint64_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    try {
      for (std::uint64_t begin = next.fetch_add(kChunk); begin < cfg.trials && !failed;
           begin = next.fetch_add(kChunk)) {
        const std::uint64_t end = std::min(cfg.trials, begin + kChunk);
        for (std::uint64_t i = begin; i < end; ++i) samples[i] = simulate_success(cfg, i);
      }
    } catch (...) {
      std::lock_guard lock(error_mutex);
      if (!error) error = std::current_exception();
      failed = true;
    }
  };
  {
    std::vector<std::jthread> pool;
    for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
    worker();
  }
  if (error) std::rethrow_exception(error);

  TrialStats stats;
  std::vector<double> attempts, elapsed, mem, rounds;
  attempts.reserve(samples.size());
  elapsed.reserve(samples.size());
  mem.reserve(samples.size());
  rounds.reserve(samples.size());
  for (const auto& s : samples) {
    attempts.push_back(static_cast<double>(s.attempts));
    elapsed.push_back(s.elapsed);
    mem.push_back(s.mem_time);
    rounds.push_back(static_cast<double>(s.failed_rounds + 1));
    ++stats.attempt_histogram[s.attempts];
    stats.rounds += s.failed_rounds + 1;
  }
  stats.attempts = estimate(attempts);
  stats.t_tot = estimate(elapsed);
  stats.mem_time = estimate(mem, &stats.std_mem_time);
  stats.rounds_per_success = estimate(rounds);
  stats.es_success_rate = static_cast<double>(cfg.trials) / static_cast<double>(stats.rounds);
  return stats;
}

}  // namespace qrep
