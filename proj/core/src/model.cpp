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

#include "qrepeater/model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "qrepeater/errors.hpp"
#include "qrepeater/numerics.hpp"

namespace qrep {

namespace {

using numerics::complement_pow;
using numerics::one_minus_complement_pow;

constexpr std::size_t kMaxDistributionLength = std::size_t{1} << 22;

void check_attempt_probability(double p) {
  if (p == 0.0) {
    throw ModelError(ModelErrorKind::NonTerminating,
                     "non-terminating process: per-attempt success probability is zero");
  }
  if (!(p > 0.0 && p <= 1.0)) {
    throw InvalidParameter("success probability must lie in (0, 1], got " + std::to_string(p));
  }
}

void check_link_count(int n) {
  if (n < 1) throw InvalidParameter("link count must be >= 1, got " + std::to_string(n));
}

void check_tolerance(double tol) {
  if (!(tol > 0.0 && tol < 1.0)) {
    throw InvalidParameter("tolerance must lie in (0, 1), got " + std::to_string(tol));
  }
}

// Smallest K with n (1-p)^K <= bound, as a real number (may be huge).
double attempts_until_tail_below(double p, int n, double bound) {
  if (p >= 1.0) return 1.0;
  return std::max(1.0, std::ceil(std::log(bound / n) / std::log1p(-p)));
}

// P(max of n geometrics > k) = 1 - (1 - (1-p)^k)^n.
double survival(double log_q, int n, double k) {
  const double x = std::exp(k * log_q);
  return one_minus_complement_pow(x, n);
}

// P_n(j + 1) for j >= 1. Writing a = (1-p)^j,
//   P_n(j + 1) = (1-a)^n * expm1(n * log1p(a p / (1-a)))
// which avoids subtracting two numbers close to one.
double pmf_after(double log_q, double p, int n, double j) {
  const double a = std::exp(j * log_q);
  const double one_minus_a = -std::expm1(j * log_q);
  return complement_pow(a, n) * std::expm1(n * std::log1p(a * p / one_minus_a));
}

double attempt_std(double p, int n, double tol) {
  if (p >= 1.0) return 0.0;
  if (attempts_until_tail_below(p, n, tol) > static_cast<double>(kMaxSeriesTerms)) {
    return std::sqrt(max_geometric_moments(p, n).variance(p));
  }
  // Direct second central moment. Past k > mu the remaining terms are below
  // sum_{j>k} j^2 n p q^(j-1) = n q^k (k^2 + 2k/p + (1+q)/p^2), which sets the
  // stopping point; the distribution's own tail-mass cutoff is too early here.
  const double mu = expected_max_attempts(p, n, tol);
  const double log_q = std::log1p(-p);
  const double q = 1.0 - p;
  double var = (1.0 - mu) * (1.0 - mu) * std::pow(p, n);
  for (double k = 2.0;; k += 1.0) {
    const double d = k - mu;
    var += d * d * pmf_after(log_q, p, n, k - 1.0);
    if (k > mu) {
      const double bound =
          n * std::exp(k * log_q) * (k * k + 2.0 * k / p + (1.0 + q) / (p * p));
      if (bound <= tol * var) break;
    }
    if (k > 2.0 * static_cast<double>(kMaxSeriesTerms)) {
      return std::sqrt(max_geometric_moments(p, n).variance(p));
    }
  }
  return std::sqrt(var);
}

}  // namespace

double AttemptDistribution::mean() const {
  double acc = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) acc += static_cast<double>(i + 1) * probs[i];
  return acc;
}

double AttemptDistribution::variance() const {
  const double mu = mean();
  double acc = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    const double d = static_cast<double>(i + 1) - mu;
    acc += d * d * probs[i];
  }
  return acc;
}

double ec_prob_single_mode(const HardwareParams& hw, const ChainConfig& chain,
                           const ChannelParams& ch) {
  hw.validate();
  ch.validate();
  // Each photon crosses half a link before the heralding measurement.
  const double arm = ch.transmission(chain.link_length() / 2.0);
  const double x = hw.detector_efficiency * hw.emission_probability * arm;
  return 0.5 * x * x;
}

double ec_prob(const HardwareParams& hw, const ChainConfig& chain, const ChannelParams& ch) {
  const double single = ec_prob_single_mode(hw, chain, ch);
  return one_minus_complement_pow(single, hw.mode_count);
}

AttemptDistribution single_link_attempt_dist(double p, double tol) {
  check_attempt_probability(p);
  check_tolerance(tol);
  AttemptDistribution dist;
  if (p >= 1.0) {
    dist.probs = {1.0};
    return dist;
  }
  const double log_q = std::log1p(-p);
  const double length = std::max(1.0, std::ceil(std::log(tol) / log_q));
  if (length > static_cast<double>(kMaxDistributionLength)) {
    throw ModelError(ModelErrorKind::TooLarge,
                     "attempt distribution would need more than " +
                         std::to_string(kMaxDistributionLength) + " entries");
  }
  const auto count = static_cast<std::size_t>(length);
  dist.probs.resize(count);
  for (std::size_t k = 1; k <= count; ++k) {
    dist.probs[k - 1] = std::exp(static_cast<double>(k - 1) * log_q) * p;
  }
  dist.tail_mass = std::exp(length * log_q);
  return dist;
}

AttemptDistribution combined_attempt_dist(double p, int n, double tol) {
  check_attempt_probability(p);
  check_link_count(n);
  check_tolerance(tol);
  AttemptDistribution dist;
  if (p >= 1.0) {
    dist.probs = {1.0};
    return dist;
  }
  const double log_q = std::log1p(-p);
  const double estimate = attempts_until_tail_below(p, n, tol);
  if (estimate > static_cast<double>(kMaxDistributionLength)) {
    throw ModelError(ModelErrorKind::TooLarge,
                     "attempt distribution would need more than " +
                         std::to_string(kMaxDistributionLength) + " entries");
  }
  dist.probs.reserve(static_cast<std::size_t>(estimate));

  dist.probs.push_back(std::pow(p, n));
  double k = 1.0;
  double tail = survival(log_q, n, k);
  while (tail > tol) {
    dist.probs.push_back(pmf_after(log_q, p, n, k));
    k += 1.0;
    tail = survival(log_q, n, k);
    if (dist.probs.size() > kMaxDistributionLength) {
      throw ModelError(ModelErrorKind::TooLarge, "attempt distribution exceeded its size budget");
    }
  }
  dist.tail_mass = tail;
  return dist;
}

double expected_max_attempts_series(double p, int n, double tol, std::size_t max_terms) {
  check_attempt_probability(p);
  check_link_count(n);
  check_tolerance(tol);
  if (p >= 1.0) return 1.0;
  const double log_q = std::log1p(-p);
  double sum = 0.0;
  for (std::size_t k = 0;; ++k) {
    if (k >= max_terms) {
      throw ModelError(ModelErrorKind::TooLarge,
                       "survival series did not converge within " + std::to_string(max_terms) +
                           " terms");
    }
    const double kd = static_cast<double>(k);
    sum += survival(log_q, n, kd);
    // Union bound: sum_{j>k} S(j) <= n (1-p)^(k+1) / p.
    const double tail_bound = n * std::exp((kd + 1.0) * log_q) / p;
    if (tail_bound <= tol * sum) break;
  }
  return sum;
}

double ScaledMoments::variance(double p) const {
  const double v = (scaled_second - slowdown * slowdown) / (p * p);
  return std::max(0.0, v);
}

ScaledMoments max_geometric_moments(double p, int n) {
  check_attempt_probability(p);
  check_link_count(n);
  if (p >= 1.0) return {1.0, 1.0};

  // State j = number of links still waiting. From j, a step leaves i links
  // successful with weight C(j,i) p^i q^(j-i); K_j = 1 + K_{j-i}. Solving
  // for the self-loop (i = 0) gives a recursion in j with nonnegative terms.
  // a[j] = p E[K_j], s[j] = p^2 E[K_j^2].
  const double log_p = std::log(p);
  const double log_q = std::log1p(-p);
  std::vector<double> log_fact(static_cast<std::size_t>(n) + 1, 0.0);
  for (int k = 2; k <= n; ++k) log_fact[k] = log_fact[k - 1] + std::log(static_cast<double>(k));

  std::vector<double> a(static_cast<std::size_t>(n) + 1, 0.0);
  std::vector<double> s(static_cast<std::size_t>(n) + 1, 0.0);
  for (int j = 1; j <= n; ++j) {
    const double leave = -std::expm1(j * log_q);
    const double stay = std::exp(j * log_q);
    double first = p;
    double second_rest = 0.0;
    for (int i = 1; i < j; ++i) {
      const double weight =
          std::exp(log_fact[j] - log_fact[i] - log_fact[j - i] + i * log_p + (j - i) * log_q);
      first += weight * a[j - i];
      second_rest += weight * (2.0 * p * a[j - i] + s[j - i]);
    }
    a[j] = first / leave;
    s[j] = (p * p + 2.0 * stay * p * a[j] + second_rest) / leave;
  }
  return {a[n], s[n]};
}

double expected_max_attempts(double p, int n, double tol) {
  check_attempt_probability(p);
  check_link_count(n);
  check_tolerance(tol);
  if (p >= 1.0) return 1.0;
  if (n == 1) return 1.0 / p;
  if (attempts_until_tail_below(p, n, tol) <= static_cast<double>(kMaxSeriesTerms)) {
    return expected_max_attempts_series(p, n, tol);
  }
  return max_geometric_moments(p, n).mean(p);
}

double slowdown_factor(double p, int n, double tol) {
  return p * expected_max_attempts(p, n, tol);
}

double memory_time(const ChainConfig& chain, const ChannelParams& ch, double attempts) {
  return ch.delay(chain.link_length()) * attempts + ch.delay(chain.total_length());
}

RepeaterMetrics timing_metrics(const HardwareParams& hw, const ChainConfig& chain,
                               const ChannelParams& ch, double tol) {
  check_tolerance(tol);
  RepeaterMetrics m;
  m.ec_prob = ec_prob(hw, chain, ch);
  if (m.ec_prob == 0.0) {
    throw ModelError(ModelErrorKind::NonTerminating,
                     "non-terminating process: elementary link success probability underflows "
                     "to zero");
  }
  const int n = chain.link_count();
  m.expected_attempts = expected_max_attempts(m.ec_prob, n, tol);
  m.t_ec = ch.delay(chain.link_length()) * m.expected_attempts;
  m.t_cc = ch.delay(chain.total_length());

  const double retrieval = hw.retrieval_probability();
  m.p_es = std::pow(0.5 * retrieval, n - 1);
  const double final_success = std::pow(retrieval, n);
  if (m.p_es == 0.0 || final_success == 0.0) {
    throw ModelError(ModelErrorKind::Unreachable,
                     "unreachable configuration: swap success probability underflows to zero");
  }
  m.t_tot = (m.t_ec + m.t_cc) * std::ldexp(1.0, n - 1) / final_success;
  if (!std::isfinite(m.t_tot) || !std::isfinite(m.t_ec)) {
    throw ModelError(ModelErrorKind::Unreachable,
                     "unreachable configuration: distribution time is not representable");
  }
  m.mem_time_avg = memory_time(chain, ch, m.expected_attempts);
  return m;
}

RepeaterMetrics metrics(const HardwareParams& hw, const ChainConfig& chain,
                        const ChannelParams& ch, double tol) {
  RepeaterMetrics m = timing_metrics(hw, chain, ch, tol);
  m.mem_time_std =
      ch.delay(chain.link_length()) * attempt_std(m.ec_prob, chain.link_count(), tol);
  return m;
}

double memory_time_std(const HardwareParams& hw, const ChainConfig& chain,
                       const ChannelParams& ch, double tol) {
  check_tolerance(tol);
  const double p = ec_prob(hw, chain, ch);
  if (p == 0.0) {
    throw ModelError(ModelErrorKind::NonTerminating,
                     "non-terminating process: elementary link success probability underflows "
                     "to zero");
  }
  return ch.delay(chain.link_length()) * attempt_std(p, chain.link_count(), tol);
}

}  // namespace qrep
