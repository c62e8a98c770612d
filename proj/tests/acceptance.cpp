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

// Release acceptance checks. Prints one PASS/FAIL line per check and exits
// nonzero if any check fails.

#include <boost/math/distributions/chi_squared.hpp>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "cli/execute.hpp"
#include "json.hpp"
#include "oracles.hpp"
#include "qrepeater/model.hpp"
#include "qrepeater/montecarlo.hpp"
#include "qrepeater/planner.hpp"

namespace {

using nlohmann::json;
using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct CliResult {
  int status = 0;
  std::string out;
  std::string err;
};

CliResult run_cli(std::vector<const char*> args) {
  args.insert(args.begin(), "qrepeater");
  std::ostringstream out;
  std::ostringstream err;
  const int status = qrep::cli::run(static_cast<int>(args.size()), args.data(), out, err);
  return {status, out.str(), err.str()};
}

std::string fmt(const char* spec, double a, double b = 0.0, double c = 0.0, double d = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, spec, a, b, c, d);
  return buf;
}

// Pearson statistic of `counts` against P_n(k) from the high-precision pmf.
// Adjacent k are pooled until each bin expects at least 5 observations.
struct FitResult {
  double statistic = 0.0;
  int dof = 0;
  double critical = 0.0;
};

FitResult goodness_of_fit(const std::map<std::uint64_t, std::uint64_t>& counts, double p, int n) {
  std::uint64_t total = 0;
  for (const auto& [k, c] : counts) total += c;
  const double samples = static_cast<double>(total);

  std::vector<std::pair<double, double>> bins;  // (expected, observed)
  double exp_acc = 0.0;
  double obs_acc = 0.0;
  double covered = 0.0;
  for (long k = 1; (1.0 - covered) * samples >= 5.0; ++k) {
    const double pk = static_cast<double>(qrep::oracle::combined_pmf(p, n, k));
    covered += pk;
    exp_acc += pk * samples;
    const auto it = counts.find(static_cast<std::uint64_t>(k));
    obs_acc += it == counts.end() ? 0.0 : static_cast<double>(it->second);
    if (exp_acc >= 5.0) {
      bins.emplace_back(exp_acc, obs_acc);
      exp_acc = 0.0;
      obs_acc = 0.0;
    }
  }
  // Everything not yet binned joins the last bin together with the tail.
  double observed_before_last = 0.0;
  for (std::size_t i = 0; i + 1 < bins.size(); ++i) observed_before_last += bins[i].second;
  bins.back().first += (1.0 - covered) * samples + exp_acc;
  bins.back().second = samples - observed_before_last;

  FitResult fit;
  for (const auto& [e, o] : bins) fit.statistic += (o - e) * (o - e) / e;
  fit.dof = static_cast<int>(bins.size()) - 1;
  const boost::math::chi_squared law(fit.dof);
  fit.critical = boost::math::quantile(boost::math::complement(law, 0.01));
  return fit;
}

Outcome golden_curve_b() {
  const auto start = Clock::now();
  const CliResult r = run_cli({"optimize", "--L", "1600", "--format", "json"});
  const double secs = std::chrono::duration<double>(Clock::now() - start).count();
  if (r.status != 0) return {false, "optimize failed: " + r.err};
  const json j = json::parse(r.out);
  const double mem = j["mem_avg_s"].get<double>();
  const bool ok = std::abs(mem - 0.84) <= 0.05 * 0.84 && secs < 1.0;
  return {ok, fmt("L=1600 km best n=%.0f, mean memory time %.4f s (0.84 s +-5%%), %.3f s runtime",
                  j["best_n"].get<double>(), mem, secs)};
}

Outcome golden_fixed_link() {
  const auto start = Clock::now();
  const CliResult fixed = run_cli({"fixed-link", "--L", "1600", "--L0", "125", "--format", "json"});
  const double secs = std::chrono::duration<double>(Clock::now() - start).count();
  const CliResult opt = run_cli({"optimize", "--L", "1600", "--format", "json"});
  if (fixed.status != 0 || opt.status != 0) return {false, "cli failed: " + fixed.err + opt.err};
  const json jf = json::parse(fixed.out);
  const double mem = jf["mem_avg_s"].get<double>();
  const double ratio = json::parse(opt.out)["mem_avg_s"].get<double>() / mem;
  const bool ok = std::abs(mem - 26.5e-3) <= 0.08 * 26.5e-3 && ratio >= 28.0 && ratio <= 36.0 &&
                  secs < 1.0;
  return {ok, fmt("%.0f links of 125 km, mean memory time %.3f ms (26.5 ms +-8%%), ratio %.2f "
                  "(28..36), %.3f s runtime",
                  jf["n"].get<double>(), mem * 1e3, ratio, secs)};
}

Outcome crossover() {
  const auto start = Clock::now();
  const CliResult r = run_cli({"crossover", "--format", "json"});
  const double secs = std::chrono::duration<double>(Clock::now() - start).count();
  if (r.status != 0) return {false, "crossover failed: " + r.err};
  const double x = json::parse(r.out)["crossover_km"].get<double>();
  return {x >= 400.0 && x <= 550.0 && secs < 5.0,
          fmt("repeater overtakes a 10 GHz source at %.1f km (400..550), %.3f s runtime", x, secs)};
}

Outcome direct_anchor() {
  const double t = qrep::direct_transmission_time(500.0, qrep::ChannelParams{}, 1e10);
  const double rel = std::abs(t - 1.0);
  return {rel <= 1e-12, fmt("500 km direct transmission time %.17g s, relative error %.2g", t, rel)};
}

Outcome oracle_equivalence() {
  const auto start = Clock::now();
  double worst = 0.0;
  int points = 0;
  for (int i = 0; i < 10; ++i) {
    const double p = std::pow(10.0, -3.0 + 3.0 * i / 9.0);  // 1e-3 .. 1
    for (int n = 1; n <= 20; ++n) {
      const double got = qrep::expected_max_attempts_series(p, n);
      const double want = qrep::oracle::inclusion_exclusion_max(p, n);
      worst = std::max(worst, std::abs(got - want) / want);
      ++points;
    }
  }
  const double secs = std::chrono::duration<double>(Clock::now() - start).count();
  return {worst <= 1e-8 && secs < 10.0,
          fmt("%.0f grid points, worst relative deviation %.2g (limit 1e-8), %.3f s runtime",
              points, worst, secs)};
}

Outcome monte_carlo() {
  const auto start = Clock::now();
  const std::vector<std::pair<double, int>> configs = {
      {250.0, 1}, {500.0, 1},  {250.0, 4},  {500.0, 4},  {1000.0, 4}, {500.0, 8},
      {1000.0, 8}, {1000.0, 16}, {500.0, 2}, {1000.0, 2}, {1000.0, 12}};
  bool ok = true;
  double worst_t = 0.0;
  double worst_mem = 0.0;
  double worst_std = 0.0;
  std::string failures;
  for (const auto& [length, n] : configs) {
    qrep::TrialConfig cfg;
    cfg.chain = qrep::ChainConfig(length, n);
    cfg.trials = 10000;
    cfg.seed = 42;
    const qrep::TrialStats s = qrep::simulate(cfg);
    const qrep::RepeaterMetrics r = qrep::metrics(cfg.hw, cfg.chain, cfg.ch);
    const double zt = std::abs(s.t_tot.mean - r.t_tot) / s.t_tot.std_error;
    const double zm = std::abs(s.mem_time.mean - r.mem_time_avg) / s.mem_time.std_error;
    const double ds = std::abs(s.std_mem_time - r.mem_time_std) / r.mem_time_std;
    worst_t = std::max(worst_t, zt);
    worst_mem = std::max(worst_mem, zm);
    worst_std = std::max(worst_std, ds);
    if (zt > 4.0 || zm > 4.0 || ds > 0.05) {
      ok = false;
      failures += fmt(" [L=%.0f n=%.0f]", length, n);
    }
  }
  const double secs = std::chrono::duration<double>(Clock::now() - start).count();
  ok = ok && secs < 120.0;
  return {ok, fmt("%.0f configurations x 1e4 successes; worst |z| t_tot %.2f, memory %.2f (limit 4), "
                  "worst sigma deviation %.2f%% (limit 5%%), ",
                  configs.size(), worst_t, worst_mem, 100.0 * worst_std) +
                  fmt("%.1f s runtime", secs) + failures};
}

Outcome distribution_laws() {
  const auto start = Clock::now();
  bool ok = true;
  std::string detail;

  // Normalization and the single-link reduction.
  double worst_norm = 0.0;
  double worst_reduction = 0.0;
  for (double p : {1.0, 0.9, 0.5, 0.1, 0.0986, 0.01, 1e-3}) {
    for (int n : {1, 2, 4, 8, 16, 32, 64}) {
      const auto d = qrep::combined_attempt_dist(p, n);
      const double total = std::accumulate(d.probs.begin(), d.probs.end(), 0.0) + d.tail_mass;
      worst_norm = std::max(worst_norm, std::abs(total - 1.0));
      ok = ok && d.tail_mass <= qrep::kDefaultTolerance;
    }
    const auto a = qrep::single_link_attempt_dist(p);
    const auto b = qrep::combined_attempt_dist(p, 1);
    if (a.probs.size() != b.probs.size()) ok = false;
    for (std::size_t k = 0; k < std::min(a.probs.size(), b.probs.size()); ++k) {
      worst_reduction = std::max(worst_reduction, std::abs(a.probs[k] - b.probs[k]));
    }
  }
  ok = ok && worst_norm <= 1e-10 && worst_reduction <= 1e-12;
  detail += fmt("normalization %.1g (1e-10), reduction %.1g (1e-12)", worst_norm, worst_reduction);

  // Histograms of 1e6 sampled rounds, and of 1e6 simulated successes.
  const auto check = [&](const std::map<std::uint64_t, std::uint64_t>& counts, double p, int n,
                         const char* label) {
    const FitResult fit = goodness_of_fit(counts, p, n);
    ok = ok && fit.statistic < fit.critical;
    detail += std::string("; ") + label +
              fmt(" chi2 %.1f < %.1f (dof %.0f)", fit.statistic, fit.critical, fit.dof);
  };
  for (const auto& [p, n] : std::vector<std::pair<double, int>>{{0.5, 2}, {0.1, 8}, {0.003, 16}}) {
    qrep::Rng rng = qrep::trial_rng(2026, static_cast<std::uint64_t>(n));
    std::map<std::uint64_t, std::uint64_t> counts;
    for (int i = 0; i < 1000000; ++i) ++counts[qrep::sample_chain_round(p, n, rng)];
    check(counts, p, n, fmt("p=%g n=%.0f", p, n).c_str());
  }
  qrep::TrialConfig cfg;
  cfg.chain = qrep::ChainConfig(250.0, 2);
  cfg.trials = 1000000;
  const qrep::TrialStats s = qrep::simulate(cfg);
  check(s.attempt_histogram, qrep::ec_prob(cfg.hw, cfg.chain, cfg.ch), 2, "simulated L=250 n=2");

  const double secs = std::chrono::duration<double>(Clock::now() - start).count();
  ok = ok && secs < 30.0;
  detail += fmt("; %.1f s runtime", secs);
  return {ok, detail};
}

Outcome determinism() {
  bool ok = true;
  std::string detail;
  for (const char* format : {"csv", "json"}) {
    const std::vector<const char*> base = {"simulate", "--L", "1000", "--n", "8", "--trials",
                                           "5000", "--seed", "42", "--format", format};
    std::vector<const char*> one_thread = base;
    one_thread.insert(one_thread.end(), {"--threads", "1"});
    const CliResult a = run_cli(base);
    const CliResult b = run_cli(base);
    const CliResult c = run_cli(one_thread);
    const bool same = a.status == 0 && a.out == b.out && a.out == c.out && !a.out.empty();
    ok = ok && same;
    detail += std::string(format) + (same ? " identical" : " differs") + fmt(" (%.0f bytes)  ", a.out.size());
  }
  return {ok, detail + "seed 42, repeated and single-threaded"};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"optimal-chain memory time at 1600 km", golden_curve_b},
      {"fixed 125 km link memory time at 1600 km", golden_fixed_link},
      {"crossover with direct transmission", crossover},
      {"direct transmission anchor", direct_anchor},
      {"survival series vs inclusion-exclusion", oracle_equivalence},
      {"Monte Carlo cross-validation", monte_carlo},
      {"attempt distribution laws", distribution_laws},
      {"simulation determinism", determinism},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += o.pass ? 0 : 1;
    std::printf("criterion %zu %s: %s: %s\n", i + 1, o.pass ? "PASS" : "FAIL", criteria[i].first,
                o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%zu/%zu criteria passed\n", criteria.size() - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
