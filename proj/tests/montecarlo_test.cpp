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

#include <gtest/gtest.h>

#include <boost/math/distributions/chi_squared.hpp>
#include <cmath>
#include <cstdint>
#include <map>
#include <vector>

#include "oracles.hpp"
#include "qrepeater/errors.hpp"
#include "qrepeater/model.hpp"
#include "qrepeater/montecarlo.hpp"

namespace qrep {
namespace {

struct Moments {
  double mean = 0.0;
  double std_error = 0.0;
};

template <typename Draw>
Moments sample_moments(std::uint64_t count, Draw&& draw) {
  double mean = 0.0;
  double m2 = 0.0;
  for (std::uint64_t i = 1; i <= count; ++i) {
    const double x = draw();
    const double d = x - mean;
    mean += d / static_cast<double>(i);
    m2 += d * (x - mean);
  }
  return {mean, std::sqrt(m2 / static_cast<double>(count - 1) / static_cast<double>(count))};
}

void expect_within_se(double expected, Estimate est, double k, const char* what) {
  EXPECT_LE(std::abs(est.mean - expected), k * est.std_error)
      << what << ": mean " << est.mean << " vs " << expected << " (se " << est.std_error << ")";
}

TrialConfig default_config(double length, int n, std::uint64_t trials, std::uint64_t seed = 42) {
  TrialConfig cfg;
  cfg.chain = ChainConfig(length, n);
  cfg.trials = trials;
  cfg.seed = seed;
  return cfg;
}

TEST(SampleChainRound, CertainSuccess) {
  Rng rng(1);
  for (int i = 0; i < 1000; ++i) ASSERT_EQ(sample_chain_round(1.0, 5, rng), 1u);
}

TEST(SampleChainRound, TwoLinksAtOneHalf) {
  Rng rng(2024);
  const Moments m = sample_moments(1000000, [&] { return double(sample_chain_round(0.5, 2, rng)); });
  EXPECT_LE(std::abs(m.mean - 8.0 / 3.0), 3.0 * m.std_error) << m.mean;
}

TEST(SampleChainRound, SingleLinkGeometricMean) {
  Rng rng(99);
  const Moments m = sample_moments(1000000, [&] { return double(sample_chain_round(0.1, 1, rng)); });
  EXPECT_LE(std::abs(m.mean - 10.0), 3.0 * m.std_error) << m.mean;
}

TEST(SampleChainRound, RejectsImpossibleLinks) {
  Rng rng(5);
  EXPECT_THROW(sample_chain_round(0.0, 3, rng), ModelError);
  EXPECT_THROW(sample_chain_round(1.5, 3, rng), InvalidParameter);
}

TEST(SampleChainRound, HistogramFollowsLaw) {
  const double p = 0.3;
  const int n = 4;
  const std::uint64_t samples = 1000000;
  Rng rng(17);
  std::map<std::uint64_t, std::uint64_t> counts;
  for (std::uint64_t i = 0; i < samples; ++i) ++counts[sample_chain_round(p, n, rng)];

  // Pearson statistic; the upper tail beyond the last well-populated bin is
  // pooled so every bin expects at least 5 observations.
  double chi2 = 0.0;
  int bins = 0;
  double covered = 0.0;
  std::uint64_t seen = 0;
  for (long k = 1;; ++k) {
    const double pk = static_cast<double>(oracle::combined_pmf(p, n, k));
    const double expected = pk * samples;
    const double rest = (1.0 - covered - pk) * samples;
    if (rest < 5.0) break;
    const double observed = counts.count(k) ? double(counts[k]) : 0.0;
    chi2 += (observed - expected) * (observed - expected) / expected;
    covered += pk;
    seen += static_cast<std::uint64_t>(observed);
    ++bins;
  }
  const double expected_tail = (1.0 - covered) * samples;
  const double observed_tail = double(samples - seen);
  chi2 += (observed_tail - expected_tail) * (observed_tail - expected_tail) / expected_tail;
  ++bins;

  const boost::math::chi_squared law(bins - 1);
  EXPECT_LT(chi2, boost::math::quantile(boost::math::complement(law, 0.01))) << bins << " bins";
}

TEST(AggregateAttempts, MatchesSumOfRounds) {
  const double p = 0.2;
  const int n = 3;
  const std::uint64_t rounds = 2000;
  const ScaledMoments mom = max_geometric_moments(p, n);
  Rng rng(8);
  const Moments m = sample_moments(400, [&] {
    return double(sample_aggregate_attempts(p, n, rounds, rng)) / double(rounds);
  });
  EXPECT_LE(std::abs(m.mean - mom.mean(p)), 4.0 * m.std_error);
  // The per-replicate spread must match sqrt(Var K / rounds).
  const double predicted = std::sqrt(mom.variance(p) / rounds / 400.0);
  EXPECT_NEAR(m.std_error, predicted, 0.15 * predicted);
}

TEST(AggregateAttempts, EdgeCases) {
  Rng rng(1);
  EXPECT_EQ(sample_aggregate_attempts(0.3, 4, 0, rng), 0u);
  EXPECT_EQ(sample_aggregate_attempts(1.0, 4, 77, rng), 77u);
}

TEST(Simulate, PerfectSingleLink) {
  TrialConfig cfg;
  cfg.hw.detector_efficiency = 1.0;
  cfg.hw.memory_efficiency = 1.0;
  cfg.hw.emission_probability = 1.0;
  cfg.hw.mode_count = 2000;  // 1 - 2^-2000 rounds to exactly 1
  cfg.ch.attenuation_db_per_km = 0.0;
  cfg.chain = ChainConfig(100.0, 1);
  cfg.trials = 500;
  ASSERT_EQ(ec_prob(cfg.hw, cfg.chain, cfg.ch), 1.0);

  const TrialStats s = simulate(cfg);
  const double two_way = 2.0 * 100.0 / cfg.ch.signal_speed_km_per_s;
  EXPECT_EQ(s.t_tot.mean, two_way);
  EXPECT_EQ(s.t_tot.std_error, 0.0);
  EXPECT_EQ(s.mem_time.mean, two_way);
  EXPECT_EQ(s.std_mem_time, 0.0);
  EXPECT_EQ(s.rounds, 500u);
  EXPECT_EQ(s.es_success_rate, 1.0);
  ASSERT_EQ(s.attempt_histogram.size(), 1u);
  EXPECT_EQ(s.attempt_histogram.at(1), 500u);
}

TEST(Simulate, AgreesWithModelAt500Km) {
  const TrialConfig cfg = default_config(500.0, 4, 10000);
  const TrialStats s = simulate(cfg);
  const RepeaterMetrics r = metrics(cfg.hw, cfg.chain, cfg.ch);
  expect_within_se(r.t_tot, s.t_tot, 3.0, "t_tot");
  expect_within_se(r.mem_time_avg, s.mem_time, 3.0, "mem_time");
  expect_within_se(r.expected_attempts, s.attempts, 3.0, "attempts");
  EXPECT_NEAR(s.std_mem_time, r.mem_time_std, 0.05 * r.mem_time_std);
}

TEST(Simulate, LongChainUsesAggregateRounds) {
  // Around 2e7 failed rounds per success: the failed rounds are drawn in bulk.
  const TrialConfig cfg = default_config(1000.0, 16, 300);
  const TrialStats s = simulate(cfg);
  const RepeaterMetrics r = metrics(cfg.hw, cfg.chain, cfg.ch);
  expect_within_se(r.t_tot, s.t_tot, 4.0, "t_tot");
  expect_within_se(r.mem_time_avg, s.mem_time, 4.0, "mem_time");
}

TEST(Simulate, EstimatorsConsistentAcrossSeeds) {
  const TrialConfig base = default_config(500.0, 4, 2000);
  const RepeaterMetrics r = metrics(base.hw, base.chain, base.ch);
  int consistent = 0;
  const int seeds = 100;
  for (int seed = 0; seed < seeds; ++seed) {
    TrialConfig cfg = base;
    cfg.seed = 1000 + seed;
    const TrialStats s = simulate(cfg);
    const auto ok = [](double want, Estimate e) { return std::abs(e.mean - want) <= 4.0 * e.std_error; };
    if (ok(r.t_tot, s.t_tot) && ok(r.mem_time_avg, s.mem_time) && ok(r.expected_attempts, s.attempts)) {
      ++consistent;
    }
  }
  EXPECT_GE(consistent, 99);
}

TEST(Simulate, DeterministicForSeedAndThreadCount) {
  TrialConfig cfg = default_config(1000.0, 8, 3000, 7);
  cfg.threads = 1;
  const TrialStats a = simulate(cfg);
  const TrialStats b = simulate(cfg);
  cfg.threads = 3;
  const TrialStats c = simulate(cfg);
  for (const TrialStats* other : {&b, &c}) {
    EXPECT_EQ(a.t_tot.mean, other->t_tot.mean);
    EXPECT_EQ(a.t_tot.std_error, other->t_tot.std_error);
    EXPECT_EQ(a.mem_time.mean, other->mem_time.mean);
    EXPECT_EQ(a.std_mem_time, other->std_mem_time);
    EXPECT_EQ(a.attempts.mean, other->attempts.mean);
    EXPECT_EQ(a.rounds, other->rounds);
    EXPECT_EQ(a.attempt_histogram, other->attempt_histogram);
  }
  cfg.seed = 8;
  EXPECT_NE(simulate(cfg).t_tot.mean, a.t_tot.mean);
}

TEST(Simulate, MemoryTimeIdentityPerSample) {
  const TrialConfig cfg = default_config(500.0, 4, 1);
  const double tick = 125.0 / cfg.ch.signal_speed_km_per_s;
  const double control = 500.0 / cfg.ch.signal_speed_km_per_s;
  for (std::uint64_t i = 0; i < 2000; ++i) {
    const TrialSample s = simulate_success(cfg, i);
    ASSERT_GE(s.attempts, 1u);
    EXPECT_EQ(s.mem_time, memory_time(cfg.chain, cfg.ch, double(s.attempts)));
    EXPECT_DOUBLE_EQ(s.mem_time, tick * double(s.attempts) + control);
    EXPECT_GE(s.elapsed, s.mem_time * (1.0 - 1e-12));
  }
}

TEST(Simulate, BookkeepingInvariants) {
  const TrialConfig cfg = default_config(250.0, 4, 5000);
  const TrialStats s = simulate(cfg);
  std::uint64_t total = 0;
  for (const auto& [k, count] : s.attempt_histogram) total += count;
  EXPECT_EQ(total, cfg.trials);
  EXPECT_GE(s.rounds, cfg.trials);
  EXPECT_DOUBLE_EQ(s.es_success_rate, double(cfg.trials) / double(s.rounds));
  EXPECT_GE(s.t_tot.std_error, 0.0);
  EXPECT_GE(s.mem_time.std_error, 0.0);
  EXPECT_GE(s.attempts.std_error, 0.0);
}

TEST(Simulate, RejectsBadConfigs) {
  TrialConfig none = default_config(500.0, 4, 0);
  EXPECT_THROW(simulate(none), InvalidParameter);

  TrialConfig hopeless = default_config(1000.0, 30, 10);
  EXPECT_THROW(simulate(hopeless), SimulationAbort);

  TrialConfig dark = default_config(500.0, 4, 10);
  dark.hw.emission_probability = 0.0;
  EXPECT_THROW(simulate(dark), ModelError);
}

}  // namespace
}  // namespace qrep
