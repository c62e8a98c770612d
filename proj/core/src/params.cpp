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

#include "qrepeater/params.hpp"

#include <cmath>
#include <string>

#include "qrepeater/errors.hpp"

namespace qrep {

namespace {

void require_probability(double value, const char* name) {
  if (!(value >= 0.0 && value <= 1.0)) {
    throw InvalidParameter(std::string(name) + " must lie in [0, 1], got " +
                           std::to_string(value));
  }
}

}  // namespace

std::string_view to_string(ModelErrorKind kind) noexcept {
  switch (kind) {
    case ModelErrorKind::NonTerminating:
      return "non_terminating";
    case ModelErrorKind::Unreachable:
      return "unreachable";
    case ModelErrorKind::BeyondRepresentable:
      return "beyond_representable";
    case ModelErrorKind::NoCrossover:
      return "no_crossover";
    case ModelErrorKind::TooLarge:
      return "too_large";
  }
  return "unknown";
}

double ChannelParams::transmission(double length_km) const {
  return std::pow(10.0, -attenuation_db_per_km * length_km / 10.0);
}

void ChannelParams::validate() const {
  if (!(attenuation_db_per_km >= 0.0) || !std::isfinite(attenuation_db_per_km)) {
    throw InvalidParameter("attenuation must be finite and >= 0");
  }
  if (!(signal_speed_km_per_s > 0.0) || !std::isfinite(signal_speed_km_per_s)) {
    throw InvalidParameter("signal speed must be finite and > 0");
  }
}

double HardwareParams::retrieval_probability() const {
  const double x = memory_efficiency * detector_efficiency;
  return x * x;
}

void HardwareParams::validate() const {
  require_probability(detector_efficiency, "detector efficiency");
  require_probability(memory_efficiency, "memory efficiency");
  require_probability(emission_probability, "emission probability");
  if (mode_count < 1) {
    throw InvalidParameter("mode count must be >= 1, got " + std::to_string(mode_count));
  }
}

ChainConfig::ChainConfig(double total_length_km, int link_count)
    : total_length_(total_length_km),
      link_count_(link_count),
      link_length_(total_length_km / link_count) {
  if (!(total_length_km >= 0.0) || !std::isfinite(total_length_km)) {
    throw InvalidParameter("total length must be finite and >= 0 km");
  }
  if (link_count < 1) {
    throw InvalidParameter("link count must be >= 1, got " + std::to_string(link_count));
  }
}

}  // namespace qrep
