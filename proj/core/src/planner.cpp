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

#include "qrepeater/planner.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <thread>

#include "qrepeater/errors.hpp"

namespace qrep {

namespace {

constexpr double kCrossoverLowKm = 10.0;
constexpr double kCrossoverHighKm = 1.0e4;
constexpr double kCrossoverResolutionKm = 1.0;
constexpr double kMinLinkLengthKm = 25.0;
constexpr int kMaxLinks = 128;

struct ScanOutcome {
  int best_n = 0;
  RepeaterMetrics best;
  std::optional<double> runner_up_ratio;
};

// Ranks n by t_tot without computing memory-time spreads.
ScanOutcome scan_link_counts(const HardwareParams& hw, double length, const ChannelParams& ch,
                             int n_max, double tol) {
  ScanOutcome out;
  double second = std::numeric_limits<double>::infinity();
  for (int n = 1; n <= n_max; ++n) {
    RepeaterMetrics m;
    try {
      m = timing_metrics(hw, ChainConfig(length, n), ch, tol);
    } catch (const ModelError&) {
      continue;
    }
    if (out.best_n == 0 || m.t_tot < out.best.t_tot) {
      if (out.best_n != 0) second = out.best.t_tot;
      out.best_n = n;
      out.best = m;
    } else if (m.t_tot < second) {
      second = m.t_tot;
    }
  }
  if (out.best_n == 0) {
    throw ModelError(ModelErrorKind::Unreachable,
                     "unreachable configuration: no link count in [1, " + std::to_string(n_max) +
                         "] is feasible");
  }
  if (std::isfinite(second)) {
    out.runner_up_ratio = out.best.t_tot > 0.0 ? second / out.best.t_tot : 1.0;
  }
  return out;
}

FixedLinkPlan evaluate_fixed_plan(const HardwareParams& hw, double target,
                                  const ChannelParams& ch, double link_length, int count,
                                  double tol) {
  FixedLinkPlan plan;
  plan.link_length = link_length;
  plan.link_count = count;
  plan.node_span = count * link_length;
  plan.extension = target - plan.node_span;
  plan.side = plan.extension >= 0.0 ? ExtensionSide::Below : ExtensionSide::Above;
  plan.metrics = metrics(hw, ChainConfig(plan.node_span, count), ch, tol);

  const double bridge = std::abs(plan.extension);
  if (bridge > 0.0) {
    // One end photon crosses the bridging fiber before the final retrieval.
    const double survival = ch.transmission(bridge);
    plan.metrics.t_tot /= survival;
    plan.metrics.t_cc += ch.delay(bridge);
    plan.metrics.mem_time_avg += ch.delay(bridge);
    if (survival == 0.0 || !std::isfinite(plan.metrics.t_tot)) {
      throw ModelError(ModelErrorKind::Unreachable,
                       "unreachable configuration: extension fiber transmission underflows");
    }
  }
  return plan;
}

// log(repeater time) - log(direct time); positive where direct is faster.
double log_time_gap(const HardwareParams& hw, const ChannelParams& ch, double length,
                    double source_rate, double tol) {
  const auto scan = scan_link_counts(hw, length, ch, default_max_links(length), tol);
  const double log_direct =
      ch.attenuation_db_per_km * length / 10.0 * std::log(10.0) - std::log(source_rate);
  return std::log(scan.best.t_tot) - log_direct;
}

}  // namespace

double direct_transmission_time(double length_km, const ChannelParams& ch,
                                double source_rate_hz) {
  ch.validate();
  if (!(length_km >= 0.0)) throw InvalidParameter("length must be >= 0 km");
  if (!(source_rate_hz > 0.0) || !std::isfinite(source_rate_hz)) {
    throw InvalidParameter("source rate must be finite and > 0");
  }
  const double t = std::pow(10.0, ch.attenuation_db_per_km * length_km / 10.0) / source_rate_hz;
  if (!std::isfinite(t)) {
    throw ModelError(ModelErrorKind::BeyondRepresentable,
                     "direct transmission time beyond representable range at " +
                         std::to_string(length_km) + " km");
  }
  return t;
}

int default_max_links(double total_length_km) {
  const double n = std::ceil(total_length_km / kMinLinkLengthKm);
  if (!(n >= 1.0)) return 1;
  return static_cast<int>(std::min<double>(n, kMaxLinks));
}

OptimizationResult optimize_link_count(const HardwareParams& hw, double total_length_km,
                                       const ChannelParams& ch, int n_max, double tol) {
  if (n_max < 1) throw InvalidParameter("n_max must be >= 1, got " + std::to_string(n_max));
  const auto scan = scan_link_counts(hw, total_length_km, ch, n_max, tol);
  OptimizationResult result;
  result.best_n = scan.best_n;
  result.metrics = metrics(hw, ChainConfig(total_length_km, scan.best_n), ch, tol);
  result.scan_min = 1;
  result.scan_max = n_max;
  result.runner_up_ratio = scan.runner_up_ratio;
  return result;
}

FixedLinkPlan plan_fixed_link(const HardwareParams& hw, double total_length_km,
                              const ChannelParams& ch, double link_length_km, double tol) {
  if (!(link_length_km > 0.0) || !std::isfinite(link_length_km)) {
    throw InvalidParameter("elementary link length must be finite and > 0 km");
  }
  if (!(total_length_km >= link_length_km)) {
    throw InvalidParameter("total length must be at least one elementary link");
  }
  const double ratio = total_length_km / link_length_km;
  const double nearest = std::round(ratio);
  if (std::abs(ratio - nearest) <= 1e-12 * ratio) {
    auto plan = evaluate_fixed_plan(hw, total_length_km, ch, link_length_km,
                                    static_cast<int>(nearest), tol);
    plan.extension = 0.0;
    plan.side = ExtensionSide::Below;
    return plan;
  }

  std::optional<FixedLinkPlan> below;
  std::optional<FixedLinkPlan> above;
  std::optional<ModelError> failure;
  try {
    below = evaluate_fixed_plan(hw, total_length_km, ch, link_length_km,
                                static_cast<int>(std::floor(ratio)), tol);
  } catch (const ModelError& e) {
    failure = e;
  }
  try {
    above = evaluate_fixed_plan(hw, total_length_km, ch, link_length_km,
                                static_cast<int>(std::ceil(ratio)), tol);
  } catch (const ModelError& e) {
    failure = e;
  }
  if (below && above) return above->metrics.t_tot < below->metrics.t_tot ? *above : *below;
  if (below) return *below;
  if (above) return *above;
  throw *failure;
}

double crossover_with_direct(const HardwareParams& hw, const ChannelParams& ch,
                             double source_rate_hz, double tol) {
  hw.validate();
  ch.validate();
  if (!(source_rate_hz > 0.0) || !std::isfinite(source_rate_hz)) {
    throw InvalidParameter("source rate must be finite and > 0");
  }
  double lo = kCrossoverLowKm;
  double hi = kCrossoverHighKm;
  const double gap_lo = log_time_gap(hw, ch, lo, source_rate_hz, tol);
  const double gap_hi = log_time_gap(hw, ch, hi, source_rate_hz, tol);
  if (!(gap_lo > 0.0 && gap_hi < 0.0) && !(gap_lo < 0.0 && gap_hi > 0.0)) {
    throw ModelError(ModelErrorKind::NoCrossover,
                     "no crossover in range [10, 10000] km against direct transmission");
  }
  const bool rising = gap_lo < 0.0;
  while (hi - lo > kCrossoverResolutionKm) {
    const double mid = 0.5 * (lo + hi);
    const double gap = log_time_gap(hw, ch, mid, source_rate_hz, tol);
    if ((gap < 0.0) == rising) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

void SweepSpec::validate() const {
  hw.validate();
  ch.validate();
  if (grid.empty()) throw InvalidParameter("sweep grid is empty");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double v = grid[i];
    if (!std::isfinite(v)) throw InvalidParameter("sweep grid values must be finite");
    if (i > 0 && !(v > grid[i - 1])) {
      throw InvalidParameter("sweep grid must be strictly increasing");
    }
    switch (parameter) {
      case SweepParameter::TotalLength:
        if (v < 0.0) throw InvalidParameter("swept length must be >= 0 km");
        break;
      case SweepParameter::ModeCount:
        if (v < 1.0 || v != std::floor(v) || v > std::numeric_limits<int>::max()) {
          throw InvalidParameter("swept mode count must be a positive integer");
        }
        break;
      case SweepParameter::EmissionProb:
        if (v < 0.0 || v > 1.0) throw InvalidParameter("swept emission probability must lie in [0, 1]");
        break;
    }
  }
  if (parameter != SweepParameter::TotalLength && !(total_length >= 0.0)) {
    throw InvalidParameter("sweep length must be >= 0 km");
  }
  std::visit(
      [](const auto& mode) {
        using Mode = std::decay_t<decltype(mode)>;
        if constexpr (std::is_same_v<Mode, OptimalLinkCount>) {
          if (mode.n_max && *mode.n_max < 1) throw InvalidParameter("n_max must be >= 1");
        } else if constexpr (std::is_same_v<Mode, FixedLinkCount>) {
          if (mode.n < 1) throw InvalidParameter("link count must be >= 1");
        } else if constexpr (std::is_same_v<Mode, FixedLinkLength>) {
          if (!(mode.link_length > 0.0)) throw InvalidParameter("elementary link length must be > 0 km");
        } else {
          if (!(mode.source_rate_hz > 0.0)) throw InvalidParameter("source rate must be > 0");
        }
      },
      mode);
}

namespace {

SweepRecord evaluate_point(const SweepSpec& spec, double value, double tol) {
  SweepRecord rec;
  rec.value = value;
  HardwareParams hw = spec.hw;
  double length = spec.total_length;
  switch (spec.parameter) {
    case SweepParameter::TotalLength:
      length = value;
      break;
    case SweepParameter::ModeCount:
      hw.mode_count = static_cast<int>(value);
      break;
    case SweepParameter::EmissionProb:
      hw.emission_probability = value;
      break;
  }
  rec.total_length = length;
  try {
    std::visit(
        [&](const auto& mode) {
          using Mode = std::decay_t<decltype(mode)>;
          if constexpr (std::is_same_v<Mode, OptimalLinkCount>) {
            const auto opt = optimize_link_count(hw, length, spec.ch,
                                                 mode.n_max.value_or(default_max_links(length)), tol);
            rec.link_count = opt.best_n;
            rec.link_length = length / opt.best_n;
            rec.metrics = opt.metrics;
          } else if constexpr (std::is_same_v<Mode, FixedLinkCount>) {
            const ChainConfig chain(length, mode.n);
            rec.link_count = mode.n;
            rec.link_length = chain.link_length();
            rec.metrics = metrics(hw, chain, spec.ch, tol);
          } else if constexpr (std::is_same_v<Mode, FixedLinkLength>) {
            const auto plan = plan_fixed_link(hw, length, spec.ch, mode.link_length, tol);
            rec.link_count = plan.link_count;
            rec.link_length = plan.link_length;
            rec.extension = plan.extension;
            rec.metrics = plan.metrics;
          } else {
            rec.direct_time = direct_transmission_time(length, spec.ch, mode.source_rate_hz);
          }
        },
        spec.mode);
  } catch (const ModelError& e) {
    rec.error = e.what();
  } catch (const InvalidParameter& e) {
    rec.error = e.what();
  }
  return rec;
}

}  // namespace

std::vector<SweepRecord> run_sweep(const SweepSpec& spec, double tol, unsigned threads) {
  spec.validate();
  std::vector<SweepRecord> records(spec.grid.size());
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(spec.grid.size()));

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < spec.grid.size(); i = next++) {
      records[i] = evaluate_point(spec, spec.grid[i], tol);
    }
  };
  if (threads <= 1) {
    worker();
    return records;
  }
  std::vector<std::jthread> pool;
  pool.reserve(threads);
  for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  pool.clear();
  return records;
}

}  // namespace qrep
