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

#include <iosfwd>
#include <string>

#include "cli/config.hpp"

namespace qrep::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitConfigError = 2,
  kExitModelError = 3,
  kExitSimulationAbort = 4,
};

/// Column order shared by every metrics table.
inline constexpr const char* kMetricsCsvHeader =
    "L_km,n,L0_km,p,f_over_p,t_ec_s,t_cc_s,p_es,t_tot_s,mem_avg_s,mem_std_s";

/// Shortest decimal string that parses back to exactly `value`.
std::string shortest(double value);

/// Time with an SI prefix (ns/us/ms/s) or hours, 4 significant digits.
std::string human_time(double seconds);

/// Runs the scenario and writes its records to `out`; diagnostics go to
/// `err` (or to `out` as a JSON error object in json mode).
int execute(const RunConfig& cfg, std::ostream& out, std::ostream& err);

/// parse_config() followed by execute().
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace qrep::cli
