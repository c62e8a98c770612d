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

#include "cli/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "CLI11.hpp"
#include "qrepeater/errors.hpp"

namespace qrep::cli {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

[[noreturn]] void fail(const Setting& s, const std::string& what) {
  throw ConfigError(s.origin + ": " + what + " (got '" + s.value + "')");
}

double to_double(const Setting& s) {
  const std::string_view text = trim(s.value);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size() || !std::isfinite(v)) {
    fail(s, "expected a number");
  }
  return v;
}

template <typename Int>
Int to_integer(const Setting& s) {
  const std::string_view text = trim(s.value);
  Int v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size()) fail(s, "expected an integer");
  return v;
}

double probability(const Setting& s, const char* name) {
  const double v = to_double(s);
  if (v < 0.0 || v > 1.0) fail(s, std::string(name) + " must lie in [0, 1]");
  return v;
}

double positive(const Setting& s, const char* name) {
  const double v = to_double(s);
  if (!(v > 0.0)) fail(s, std::string(name) + " must be > 0");
  return v;
}

double non_negative(const Setting& s, const char* name) {
  const double v = to_double(s);
  if (v < 0.0) fail(s, std::string(name) + " must be >= 0");
  return v;
}

int positive_int(const Setting& s, const char* name) {
  const int v = to_integer<int>(s);
  if (v < 1) fail(s, std::string(name) + " must be >= 1");
  return v;
}

// "a:b:step" (inclusive) or "v1,v2,...".
std::vector<double> parse_grid(const Setting& s) {
  const std::string_view text = trim(s.value);
  std::vector<double> grid;
  auto piece = [&](std::string_view part) {
    return to_double(Setting{std::string(trim(part)), s.origin});
  };
  if (text.find(':') != std::string_view::npos) {
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    for (std::size_t pos; (pos = text.find(':', start)) != std::string_view::npos; start = pos + 1) {
      parts.push_back(text.substr(start, pos - start));
    }
    parts.push_back(text.substr(start));
    if (parts.size() != 3) fail(s, "grid range must be start:stop:step");
    const double lo = piece(parts[0]);
    const double hi = piece(parts[1]);
    const double step = piece(parts[2]);
    if (!(step > 0.0) || hi < lo) fail(s, "grid range needs step > 0 and stop >= start");
    const double count = std::floor((hi - lo) / step + 1e-9);
    if (count > 1e6) fail(s, "grid has more than 10^6 points");
    for (int i = 0; i <= static_cast<int>(count); ++i) grid.push_back(lo + i * step);
  } else {
    std::size_t start = 0;
    for (std::size_t pos; (pos = text.find(',', start)) != std::string_view::npos; start = pos + 1) {
      grid.push_back(piece(text.substr(start, pos - start)));
    }
    grid.push_back(piece(text.substr(start)));
  }
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (!(grid[i] > grid[i - 1])) fail(s, "grid must be strictly increasing");
  }
  return grid;
}

const Setting* lookup(const Settings& file, const Settings& flags, const std::string& key) {
  if (auto it = flags.find(key); it != flags.end()) return &it->second;
  if (auto it = file.find(key); it != file.end()) return &it->second;
  return nullptr;
}

}  // namespace

std::string_view to_string(Scenario s) {
  switch (s) {
    case Scenario::Eval:
      return "eval";
    case Scenario::Optimize:
      return "optimize";
    case Scenario::FixedLink:
      return "fixed-link";
    case Scenario::Sweep:
      return "sweep";
    case Scenario::Crossover:
      return "crossover";
    case Scenario::Simulate:
      return "simulate";
  }
  return "unknown";
}

std::optional<Scenario> scenario_from_string(std::string_view name) {
  for (auto s : {Scenario::Eval, Scenario::Optimize, Scenario::FixedLink, Scenario::Sweep,
                 Scenario::Crossover, Scenario::Simulate}) {
    if (to_string(s) == name) return s;
  }
  return std::nullopt;
}

const std::vector<std::string>& known_keys() {
  static const std::vector<std::string> keys = {
      "scenario", "L",     "n",     "L0",   "m",     "rho",   "eta-d", "eta-m",
      "alpha",    "c",     "tol",   "trials", "seed", "format", "rate", "n-max",
      "threads",  "param", "grid",  "mode",
  };
  return keys;
}

Settings parse_key_values(std::string_view text) {
  Settings out;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto end = std::min(text.find('\n', start), text.size());
    std::string_view line = text.substr(start, end - start);
    start = end + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    const std::string origin = "line " + std::to_string(line_no);
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ConfigError(origin + ": expected 'key = value'");
    const std::string key(trim(line.substr(0, eq)));
    const std::string value(trim(line.substr(eq + 1)));
    const auto& keys = known_keys();
    if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
      throw ConfigError(origin + ": unknown key '" + key + "'");
    }
    if (value.empty()) throw ConfigError(origin + ": missing value for '" + key + "'");
    if (out.count(key)) throw ConfigError(origin + ": duplicate key '" + key + "'");
    out.emplace(key, Setting{value, origin});
  }
  return out;
}

RunConfig resolve_config(Scenario scenario, const Settings& file, const Settings& flags) {
  RunConfig cfg;
  cfg.scenario = scenario;
  auto get = [&](const std::string& key) { return lookup(file, flags, key); };

  if (const auto* s = get("scenario")) {
    const auto named = scenario_from_string(trim(s->value));
    if (!named) fail(*s, "unknown scenario");
    if (*named != scenario) {
      fail(*s, "conflicts with the requested scenario '" + std::string(to_string(scenario)) + "'");
    }
  }
  if (scenario == Scenario::Optimize || scenario == Scenario::Crossover) {
    if (auto it = flags.find("n"); it != flags.end()) {
      fail(it->second, "link count conflicts with scenario '" + std::string(to_string(scenario)) +
                           "', which chooses n itself");
    }
  }

  if (const auto* s = get("eta-d")) cfg.hw.detector_efficiency = probability(*s, "detector efficiency");
  if (const auto* s = get("eta-m")) cfg.hw.memory_efficiency = probability(*s, "memory efficiency");
  if (const auto* s = get("rho")) cfg.hw.emission_probability = probability(*s, "emission probability");
  if (const auto* s = get("m")) cfg.hw.mode_count = positive_int(*s, "mode count");
  if (const auto* s = get("alpha")) cfg.ch.attenuation_db_per_km = non_negative(*s, "attenuation");
  if (const auto* s = get("c")) cfg.ch.signal_speed_km_per_s = positive(*s, "signal speed");
  if (const auto* s = get("tol")) {
    cfg.tol = to_double(*s);
    if (!(cfg.tol > 0.0 && cfg.tol < 1.0)) fail(*s, "tolerance must lie in (0, 1)");
  }
  if (const auto* s = get("trials")) {
    cfg.trials = to_integer<std::uint64_t>(*s);
    if (cfg.trials < 1) fail(*s, "trials must be >= 1");
  }
  if (const auto* s = get("seed")) cfg.seed = to_integer<std::uint64_t>(*s);
  if (const auto* s = get("threads")) cfg.threads = to_integer<unsigned>(*s);
  if (const auto* s = get("rate")) cfg.source_rate = positive(*s, "source rate");
  if (const auto* s = get("n-max")) cfg.n_max = positive_int(*s, "n-max");
  if (const auto* s = get("L0")) cfg.link_length = positive(*s, "elementary link length");
  if (const auto* s = get("n")) cfg.link_count = positive_int(*s, "link count");
  if (const auto* s = get("format")) {
    const auto v = trim(s->value);
    if (v == "human") {
      cfg.format = OutputFormat::Human;
    } else if (v == "csv") {
      cfg.format = OutputFormat::Csv;
    } else if (v == "json") {
      cfg.format = OutputFormat::Json;
    } else {
      fail(*s, "format must be one of human, csv, json");
    }
  }

  const Setting* length = get("L");
  if (length) cfg.total_length = non_negative(*length, "total length");
  auto require = [&](const char* key) {
    if (!get(key)) {
      throw ConfigError("scenario '" + std::string(to_string(scenario)) + "' requires --" + key);
    }
  };

  switch (scenario) {
    case Scenario::Eval:
    case Scenario::Simulate:
      require("L");
      require("n");
      break;
    case Scenario::Optimize:
      require("L");
      break;
    case Scenario::FixedLink:
      require("L");
      if (cfg.total_length < cfg.link_length) {
        fail(*length, "total length must be at least one elementary link (L0 = " +
                          std::to_string(cfg.link_length) + " km)");
      }
      break;
    case Scenario::Crossover:
      break;
    case Scenario::Sweep: {
      require("param");
      require("grid");
      const Setting& param = *get("param");
      const auto name = trim(param.value);
      if (name == "L") {
        cfg.sweep.parameter = SweepParameter::TotalLength;
      } else if (name == "m") {
        cfg.sweep.parameter = SweepParameter::ModeCount;
      } else if (name == "rho") {
        cfg.sweep.parameter = SweepParameter::EmissionProb;
      } else {
        fail(param, "swept parameter must be one of L, m, rho");
      }
      cfg.sweep.grid = parse_grid(*get("grid"));
      cfg.sweep.total_length = length ? cfg.total_length : 1000.0;
      cfg.total_length = cfg.sweep.total_length;
      std::string mode = "optimal";
      if (const auto* s = get("mode")) mode = std::string(trim(s->value));
      if (mode == "optimal") {
        cfg.sweep.mode = OptimalLinkCount{cfg.n_max};
      } else if (mode == "fixed-n") {
        require("n");
        cfg.sweep.mode = FixedLinkCount{cfg.link_count};
      } else if (mode == "fixed-link") {
        cfg.sweep.mode = FixedLinkLength{cfg.link_length};
      } else if (mode == "direct") {
        cfg.sweep.mode = DirectTransmission{cfg.source_rate};
      } else {
        fail(*get("mode"), "sweep mode must be one of optimal, fixed-n, fixed-link, direct");
      }
      break;
    }
  }
  cfg.sweep.hw = cfg.hw;
  cfg.sweep.ch = cfg.ch;
  if (scenario == Scenario::Sweep) {
    try {
      cfg.sweep.validate();
    } catch (const InvalidParameter& e) {
      throw ConfigError(std::string("sweep: ") + e.what());
    }
  }
  return cfg;
}

RunConfig parse_config(int argc, const char* const* argv) {
  CLI::App app{"Performance model, planner and Monte Carlo validator for semihierarchical "
               "quantum repeater chains",
               "qrepeater"};
  app.require_subcommand(1, 1);
  app.fallthrough();

  std::string config_path;
  app.add_option("--config", config_path, "Flat key = value configuration file");

  struct FlagSlot {
    std::string value;
    CLI::Option* option = nullptr;
  };
  std::map<std::string, FlagSlot> slots;
  const std::map<std::string, std::string> help = {
      {"L", "Total distance in km"},
      {"n", "Number of elementary links"},
      {"L0", "Elementary link length in km (fixed-link; default 125)"},
      {"m", "Mode count (default 100)"},
      {"rho", "Source emission probability (default 0.9)"},
      {"eta-d", "Detector efficiency (default 0.9)"},
      {"eta-m", "Memory efficiency (default 0.9)"},
      {"alpha", "Fiber attenuation in dB/km (default 0.2)"},
      {"c", "Signal speed in km/s (default 2e5)"},
      {"tol", "Series truncation tolerance (default 1e-12)"},
      {"trials", "End-to-end successes to simulate (default 10000)"},
      {"seed", "Simulation seed (default 42)"},
      {"format", "Output format: human, csv or json"},
      {"rate", "Direct-transmission source rate in Hz (default 1e10)"},
      {"n-max", "Largest link count scanned by the optimizer"},
      {"threads", "Worker threads, 0 = all cores"},
      {"param", "Swept parameter: L, m or rho"},
      {"grid", "Sweep grid: start:stop:step or v1,v2,..."},
      {"mode", "Sweep mode: optimal, fixed-n, fixed-link or direct"},
  };
  for (const auto& key : known_keys()) {
    if (key == "scenario") continue;
    auto& slot = slots[key];
    slot.option = app.add_option("--" + key, slot.value, help.at(key));
  }

  std::map<std::string, Scenario> by_name;
  for (auto s : {Scenario::Eval, Scenario::Optimize, Scenario::FixedLink, Scenario::Sweep,
                 Scenario::Crossover, Scenario::Simulate}) {
    const std::string name(to_string(s));
    app.add_subcommand(name, "Run the " + name + " scenario");
    by_name.emplace(name, s);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    throw HelpRequested{app.help(), 0};
  } catch (const CLI::ParseError& e) {
    throw ConfigError(e.what());
  }

  Scenario scenario = Scenario::Eval;
  for (const auto* sub : app.get_subcommands()) scenario = by_name.at(sub->get_name());

  Settings file;
  if (!config_path.empty()) {
    std::ifstream in(config_path);
    if (!in) throw ConfigError("cannot read config file '" + config_path + "'");
    std::stringstream buffer;
    buffer << in.rdbuf();
    try {
      file = parse_key_values(buffer.str());
    } catch (const ConfigError& e) {
      throw ConfigError(config_path + ": " + e.what());
    }
    for (auto& [key, setting] : file) setting.origin = config_path + ": " + setting.origin;
  }

  Settings flags;
  for (const auto& [key, slot] : slots) {
    if (slot.option->count() > 0) flags.emplace(key, Setting{slot.value, "--" + key});
  }
  return resolve_config(scenario, file, flags);
}

}  // namespace qrep::cli
