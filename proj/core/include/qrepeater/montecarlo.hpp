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

#pragma once

#include <cstdint>
#include <map>
#include <random>

#include "qrepeater/params.hpp"

// Seeded sampler of the repeater protocol, independent of the closed forms in
// model.hpp. Each end-to-end success i draws from its own engine keyed by
// (seed, i), so results do not depend on the number of worker threads.

namespace qrep {

using Rng = std::mt19937_64;

/// Engine for trial `index` of a run seeded with `seed`.
Rng trial_rng(std::uint64_t seed, std::uint64_t index);

/// Uniform draw in the open interval (0, 1).
double open_unit(Rng& rng);

/// Attempt on which the slowest of n links succeeds. Each link's attempt
/// count is drawn by inverse CDF, ceil(ln U / ln(1 - p)).
std::uint64_t sample_chain_round(double p, int n, Rng& rng);

/// Total attempts summed over `rounds` independent chain rounds. Tracks how
/// many rounds sit in each "j links still waiting" state instead of walking
/// rounds one by one, so the cost is O(n^2) draws for any round count.
std::uint64_t sample_aggregate_attempts(double p, int n, std::uint64_t rounds, Rng& rng);

struct TrialConfig {
  HardwareParams hw;
  ChainConfig chain{1000.0, 8};
  ChannelParams ch;
  std::uint64_t trials = 10000;  ///< end-to-end successes to collect
  std::uint64_t seed = 42;
  unsigned threads = 0;  ///< 0 = hardware concurrency
};

struct Estimate {
  double mean = 0.0;
  double std_error = 0.0;
};

struct TrialStats {
  Estimate attempts;  ///< slowest-link attempts in the successful round
  Estimate t_tot;     ///< s, elapsed time per delivered pair
  Estimate mem_time;  ///< s, memory time of the successful round
  double std_mem_time = 0.0;
  std::map<std::uint64_t, std::uint64_t> attempt_histogram;  ///< successful rounds
  double es_success_rate = 0.0;  ///< successes / rounds
  std::uint64_t rounds = 0;      ///< rounds of all kinds, including failures
  Estimate rounds_per_success;
};

/// Everything observed while collecting one end-to-end success.
struct TrialSample {
  std::uint64_t failed_rounds = 0;
  std::uint64_t attempts = 0;  ///< slowest-link attempts in the successful round
  double elapsed = 0.0;        ///< s, all rounds up to and including the success
  double mem_time = 0.0;       ///< s, (L0/c) attempts + L/c
};

/// Rounds per success above which simulate() refuses to run.
inline constexpr double kMaxRoundsPerSuccess = 1e9;

/// Repeats distribution rounds until `trials` end-to-end successes. A round
/// costs (L0/c) k + L/c; it succeeds only if all swaps and both final
/// retrievals do, otherwise the chain starts from scratch.
TrialStats simulate(const TrialConfig& cfg);

/// The `index`-th success of the run described by `cfg`; simulate() reduces
/// exactly these samples.
TrialSample simulate_success(const TrialConfig& cfg, std::uint64_t index);

}  // namespace qrep
