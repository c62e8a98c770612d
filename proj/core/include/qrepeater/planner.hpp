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

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "qrepeater/model.hpp"
#include "qrepeater/params.hpp"

// Scenario-level questions built on the closed-form model: how many links to
// use, how to cover a distance with fixed-length links, where a repeater
// starts beating direct transmission, and parameter sweeps.

namespace qrep {

inline constexpr double kDirectSourceRateHz = 1.0e10;
inline constexpr double kFixedLinkLengthKm = 125.0;

struct OptimizationResult {
  int best_n = 1;
  RepeaterMetrics metrics;
  int scan_min = 1;
  int scan_max = 1;
  /// t_tot of the second-best n over the best; empty if only one n was feasible.
  std::optional<double> runner_up_ratio;
};

enum class ExtensionSide { Below, Above };

/// Links of fixed length L0 laid down from one end; the remainder between the
/// last node and the target is bridged by plain fiber.
struct FixedLinkPlan {
  double link_length = 0.0;
  int link_count = 0;
  double node_span = 0.0;  ///< link_count * link_length
  /// target - node_span: positive when the nodes stop short of the target.
  double extension = 0.0;
  ExtensionSide side = ExtensionSide::Below;
  RepeaterMetrics metrics;  ///< including the extension fiber
};

/// Mean time until a photon from a `source_rate_hz` source survives L km.
double direct_transmission_time(double length_km, const ChannelParams& ch,
                                double source_rate_hz = kDirectSourceRateHz);

/// ceil(L / 25 km), clamped to [1, 128].
int default_max_links(double total_length_km);

/// Exhaustive scan of n in [1, n_max] minimizing t_tot; ties go to smaller n.
/// Link counts whose model evaluation fails are skipped.
OptimizationResult optimize_link_count(const HardwareParams& hw, double total_length_km,
                                       const ChannelParams& ch, int n_max,
                                       double tol = kDefaultTolerance);

/// Evaluates floor(L/L0) and ceil(L/L0) links and keeps the faster plan.
/// The extension fiber divides t_tot by its transmission and adds its delay
/// to t_cc and the memory time.
FixedLinkPlan plan_fixed_link(const HardwareParams& hw, double total_length_km,
                              const ChannelParams& ch, double link_length_km,
                              double tol = kDefaultTolerance);

/// Distance in [10, 1e4] km at which the optimal-n repeater time equals the
/// direct-transmission time, bisected to 1 km.
double crossover_with_direct(const HardwareParams& hw, const ChannelParams& ch,
                             double source_rate_hz = kDirectSourceRateHz,
                             double tol = kDefaultTolerance);

enum class SweepParameter { TotalLength, ModeCount, EmissionProb };

struct OptimalLinkCount {
  std::optional<int> n_max;  ///< default_max_links(L) when empty
};
struct FixedLinkCount {
  int n = 1;
};
struct FixedLinkLength {
  double link_length = kFixedLinkLengthKm;
};
struct DirectTransmission {
  double source_rate_hz = kDirectSourceRateHz;
};
using SweepMode = std::variant<OptimalLinkCount, FixedLinkCount, FixedLinkLength, DirectTransmission>;

struct SweepSpec {
  SweepParameter parameter = SweepParameter::TotalLength;
  std::vector<double> grid;
  HardwareParams hw;
  ChannelParams ch;
  double total_length = 1000.0;  ///< used unless the length is swept
  SweepMode mode = OptimalLinkCount{};

  /// Throws InvalidParameter for an empty or non-increasing grid, or grid
  /// values the swept parameter cannot take.
  void validate() const;
};

struct SweepRecord {
  double value = 0.0;
  double total_length = 0.0;
  int link_count = 0;  ///< 0 for direct transmission
  double link_length = 0.0;
  double extension = 0.0;
  std::optional<RepeaterMetrics> metrics;  ///< repeater modes
  std::optional<double> direct_time;       ///< direct transmission mode
  std::string error;  ///< empty on success
};

/// One record per grid point, in grid order. Points are evaluated in
/// parallel on up to `threads` workers (0 = hardware concurrency).
std::vector<SweepRecord> run_sweep(const SweepSpec& spec, double tol = kDefaultTolerance,
                                   unsigned threads = 0);

}  // namespace qrep
