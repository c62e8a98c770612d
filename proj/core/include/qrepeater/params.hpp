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

// Physical parameters of a repeater chain. Units are km, seconds and dB/km
// throughout; probabilities are dimensionless.

namespace qrep {

inline constexpr double kDefaultTolerance = 1e-12;

/// Telecom fiber. Defaults: 0.2 dB/km, 2e5 km/s.
struct ChannelParams {
  double attenuation_db_per_km = 0.2;
  double signal_speed_km_per_s = 2.0e5;

  /// Fraction of photons surviving `length_km` of fiber.
  double transmission(double length_km) const;
  /// One-way propagation delay over `length_km`.
  double delay(double length_km) const { return length_km / signal_speed_km_per_s; }

  /// Throws InvalidParameter unless attenuation >= 0 and speed > 0.
  void validate() const;
};

/// Detector, memory and source figures of merit.
struct HardwareParams {
  double detector_efficiency = 0.9;   // eta_D
  double memory_efficiency = 0.9;     // eta_M
  double emission_probability = 0.9;  // rho
  int mode_count = 100;               // m

  /// eta_M^2 * eta_D^2: both end photons retrieved and detected.
  double retrieval_probability() const;

  /// Throws InvalidParameter unless probabilities lie in [0, 1] and m >= 1.
  void validate() const;
};

/// A chain of `link_count` equal elementary links spanning `total_length`.
class ChainConfig {
 public:
  /// Throws InvalidParameter if total_length < 0 or link_count < 1.
  ChainConfig(double total_length_km, int link_count);

  double total_length() const noexcept { return total_length_; }
  int link_count() const noexcept { return link_count_; }
  double link_length() const noexcept { return link_length_; }

  friend bool operator==(const ChainConfig&, const ChainConfig&) = default;

 private:
  double total_length_;
  int link_count_;
  double link_length_;
};

}  // namespace qrep
