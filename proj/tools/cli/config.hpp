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
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "qrepeater/params.hpp"
#include "qrepeater/planner.hpp"

namespace qrep::cli {

/// Bad configuration text or flags. Maps to exit status 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Scenario { Eval, Optimize, FixedLink, Sweep, Crossover, Simulate };
enum class OutputFormat { Human, Csv, Json };

std::string_view to_string(Scenario s);
std::optional<Scenario> scenario_from_string(std::string_view name);

struct RunConfig {
  Scenario scenario = Scenario::Eval;
  HardwareParams hw;
  ChannelParams ch;
  double total_length = 0.0;
  int link_count = 1;
  double link_length = kFixedLinkLengthKm;
  std::optional<int> n_max;
  double tol = kDefaultTolerance;
  double source_rate = kDirectSourceRateHz;
  std::uint64_t trials = 10000;
  std::uint64_t seed = 42;
  unsigned threads = 0;
  SweepSpec sweep;  ///< meaningful when scenario == Sweep
  OutputFormat format = OutputFormat::Human;
};

/// One `key = value` setting and where it came from ("line 3", "--rho").
struct Setting {
  std::string value;
  std::string origin;
};
using Settings = std::map<std::string, Setting>;

/// Keys accepted in configuration files; flags are the same names with "--".
const std::vector<std::string>& known_keys();

/// Parses a flat key-value file. '#' starts a comment; blank lines are
/// ignored. Unknown or repeated keys are rejected with their line number.
Settings parse_key_values(std::string_view text);

/// Resolves file settings overridden by flag settings into a RunConfig,
/// filling unset parameters with the default hardware and fiber figures.
RunConfig resolve_config(Scenario scenario, const Settings& file, const Settings& flags);

/// Full command-line front end: subcommand, flags, optional --config file.
/// Throws ConfigError; a request for --help surfaces as HelpRequested.
struct HelpRequested {
  std::string text;
  int exit_code = 0;
};
RunConfig parse_config(int argc, const char* const* argv);

}  // namespace qrep::cli
