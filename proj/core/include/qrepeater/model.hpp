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

#include <cstddef>
#include <vector>

#include "qrepeater/params.hpp"

// Closed-form performance model of a semihierarchical repeater chain.
//
// Every elementary link retries entanglement creation once per clock tick
// L0/c until it succeeds; a central controller waits for all n links, spends
// L/c signalling, then fires all n-1 swaps at once. Any swap or final
// retrieval failure restarts the whole round.

namespace qrep {

/// Truncated distribution over attempt numbers k = 1, 2, ...
struct AttemptDistribution {
  std::vector<double> probs;  ///< probs[k - 1] = P(k)
  double tail_mass = 0.0;     ///< P(k > probs.size())

  double mean() const;
  double variance() const;
};

/// Analytical performance of one chain configuration.
struct RepeaterMetrics {
  double ec_prob = 0.0;            ///< per-attempt link success p
  double expected_attempts = 0.0;  ///< f(n, p) / p
  double t_ec = 0.0;               ///< s, waiting for all links
  double t_cc = 0.0;               ///< s, controller signalling
  double p_es = 0.0;               ///< all n - 1 swaps succeed
  double t_tot = 0.0;              ///< s, mean time per delivered pair
  double mem_time_avg = 0.0;       ///< s
  double mem_time_std = 0.0;       ///< s
};

/// Upper bound on the number of terms any truncated series may use before
/// the model switches to the moment recursion.
inline constexpr std::size_t kMaxSeriesTerms = std::size_t{1} << 17;

/// Single-mode heralding probability (1/2)(eta_D rho 10^(-alpha L0 / 20))^2.
double ec_prob_single_mode(const HardwareParams& hw, const ChainConfig& chain,
                           const ChannelParams& ch);

/// At least one of m modes heralds: 1 - (1 - p_1)^m.
double ec_prob(const HardwareParams& hw, const ChainConfig& chain, const ChannelParams& ch);

/// Geometric law of the attempt on which one link first succeeds.
/// Truncated once the tail (1 - p)^K drops to `tol`.
AttemptDistribution single_link_attempt_dist(double p, double tol = kDefaultTolerance);

/// Law of the attempt on which the last of n independent links succeeds:
/// P_n(k) = [1 - (1-p)^k]^n - [1 - (1-p)^(k-1)]^n.
AttemptDistribution combined_attempt_dist(double p, int n, double tol = kDefaultTolerance);

/// Expected maximum of n geometric attempt counts, f(n, p) / p.
/// Sums the survival function when that takes at most kMaxSeriesTerms terms,
/// otherwise uses max_geometric_moments().
double expected_max_attempts(double p, int n, double tol = kDefaultTolerance);

/// Survival-function series sum_{k>=0} [1 - (1 - (1-p)^k)^n], stopped once
/// the bound n (1-p)^(k+1) / p on the remaining tail is below tol times the
/// accumulated sum. Throws ModelError(TooLarge) past `max_terms`.
double expected_max_attempts_series(double p, int n, double tol = kDefaultTolerance,
                                    std::size_t max_terms = kMaxSeriesTerms);

/// First two moments of the maximum of n geometric attempt counts, scaled
/// by p so they stay finite for vanishing p.
struct ScaledMoments {
  double slowdown = 0.0;       ///< p * E[K], i.e. f(n, p)
  double scaled_second = 0.0;  ///< p^2 * E[K^2]

  double mean(double p) const { return slowdown / p; }
  double variance(double p) const;
};

/// Exact first-step recursion over the number of links still waiting. All
/// terms are nonnegative, so it is stable for any n and p in (0, 1].
ScaledMoments max_geometric_moments(double p, int n);

/// f(n, p) = p * expected_max_attempts(p, n).
double slowdown_factor(double p, int n, double tol = kDefaultTolerance);

/// Full metric set for one configuration.
RepeaterMetrics metrics(const HardwareParams& hw, const ChainConfig& chain,
                        const ChannelParams& ch, double tol = kDefaultTolerance);

/// Same as metrics() but leaves mem_time_std at zero. Used by scans that
/// only rank configurations.
RepeaterMetrics timing_metrics(const HardwareParams& hw, const ChainConfig& chain,
                               const ChannelParams& ch, double tol = kDefaultTolerance);

/// Standard deviation of the memory time (L0/c) k + L/c under P_n(k).
double memory_time_std(const HardwareParams& hw, const ChainConfig& chain,
                       const ChannelParams& ch, double tol = kDefaultTolerance);

/// Memory time of a round whose slowest link needed `attempts` attempts.
double memory_time(const ChainConfig& chain, const ChannelParams& ch, double attempts);

}  // namespace qrep
