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

#include "cli/execute.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <iomanip>
#include <ostream>
#include <utility>
#include <vector>

#include "json.hpp"
#include "qrepeater/errors.hpp"
#include "qrepeater/model.hpp"
#include "qrepeater/montecarlo.hpp"
#include "qrepeater/planner.hpp"

namespace qrep::cli {

namespace {

using json = nlohmann::ordered_json;

struct MetricsRow {
  double total_length = 0.0;
  int link_count = 0;
  double link_length = 0.0;
  RepeaterMetrics m;
};

std::vector<std::pair<const char*, double>> columns(const MetricsRow& row) {
  return {
      {"L_km", row.total_length},
      {"n", row.link_count},
      {"L0_km", row.link_length},
      {"p", row.m.ec_prob},
      {"f_over_p", row.m.expected_attempts},
      {"t_ec_s", row.m.t_ec},
      {"t_cc_s", row.m.t_cc},
      {"p_es", row.m.p_es},
      {"t_tot_s", row.m.t_tot},
      {"mem_avg_s", row.m.mem_time_avg},
      {"mem_std_s", row.m.mem_time_std},
  };
}

json to_json(const MetricsRow& row) {
  json j;
  for (const auto& [key, value] : columns(row)) {
    if (std::string_view(key) == "n") {
      j[key] = row.link_count;
    } else {
      j[key] = value;
    }
  }
  return j;
}

std::string csv_row(const MetricsRow& row) {
  std::string line;
  for (const auto& [key, value] : columns(row)) {
    if (!line.empty()) line += ',';
    line += std::string_view(key) == "n" ? std::to_string(row.link_count) : shortest(value);
  }
  return line;
}

std::string human_number(double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4g", value);
  return buf;
}

void print_human(std::ostream& out, const std::vector<std::pair<std::string, std::string>>& lines) {
  std::size_t width = 0;
  for (const auto& [k, v] : lines) width = std::max(width, k.size());
  for (const auto& [k, v] : lines) out << std::left << std::setw(static_cast<int>(width) + 2) << k << v << '\n';
}

std::vector<std::pair<std::string, std::string>> human_metrics(const MetricsRow& row) {
  return {
      {"L", human_number(row.total_length) + " km"},
      {"n", std::to_string(row.link_count)},
      {"L0", human_number(row.link_length) + " km"},
      {"p", human_number(row.m.ec_prob)},
      {"f/p", human_number(row.m.expected_attempts)},
      {"T_ec", human_time(row.m.t_ec)},
      {"T_cc", human_time(row.m.t_cc)},
      {"P_es", human_number(row.m.p_es)},
      {"T_tot", human_time(row.m.t_tot)},
      {"<t_M>", human_time(row.m.mem_time_avg)},
      {"sigma(t_M)", human_time(row.m.mem_time_std)},
  };
}

void emit_single(const RunConfig& cfg, const MetricsRow& row, const json& extras,
                 const std::vector<std::pair<std::string, std::string>>& human_extras,
                 std::ostream& out) {
  switch (cfg.format) {
    case OutputFormat::Csv:
      out << kMetricsCsvHeader << '\n' << csv_row(row) << '\n';
      break;
    case OutputFormat::Json: {
      json j;
      j["scenario"] = std::string(to_string(cfg.scenario));
      j.update(to_json(row));
      j.update(extras);
      out << j.dump(2) << '\n';
      break;
    }
    case OutputFormat::Human: {
      auto lines = human_metrics(row);
      lines.insert(lines.begin(), {"scenario", std::string(to_string(cfg.scenario))});
      lines.insert(lines.end(), human_extras.begin(), human_extras.end());
      print_human(out, lines);
      break;
    }
  }
}

void run_eval(const RunConfig& cfg, std::ostream& out) {
  const ChainConfig chain(cfg.total_length, cfg.link_count);
  const MetricsRow row{cfg.total_length, cfg.link_count, chain.link_length(),
                       metrics(cfg.hw, chain, cfg.ch, cfg.tol)};
  emit_single(cfg, row, json::object(), {}, out);
}

void run_optimize(const RunConfig& cfg, std::ostream& out) {
  const int n_max = cfg.n_max.value_or(default_max_links(cfg.total_length));
  const auto opt = optimize_link_count(cfg.hw, cfg.total_length, cfg.ch, n_max, cfg.tol);
  const MetricsRow row{cfg.total_length, opt.best_n, cfg.total_length / opt.best_n, opt.metrics};
  json extras;
  extras["best_n"] = opt.best_n;
  extras["scan_min"] = opt.scan_min;
  extras["scan_max"] = opt.scan_max;
  extras["runner_up_ratio"] = opt.runner_up_ratio ? json(*opt.runner_up_ratio) : json(nullptr);
  emit_single(cfg, row, extras,
              {{"scanned", "n in [" + std::to_string(opt.scan_min) + ", " +
                               std::to_string(opt.scan_max) + "]"},
               {"runner-up", opt.runner_up_ratio ? human_number(*opt.runner_up_ratio) + "x slower"
                                                 : "none"}},
              out);
}

void run_fixed_link(const RunConfig& cfg, std::ostream& out) {
  const auto plan = plan_fixed_link(cfg.hw, cfg.total_length, cfg.ch, cfg.link_length, cfg.tol);
  const MetricsRow row{cfg.total_length, plan.link_count, plan.link_length, plan.metrics};
  const char* side = plan.side == ExtensionSide::Below ? "below" : "above";
  json extras;
  extras["node_span_km"] = plan.node_span;
  extras["extension_km"] = plan.extension;
  extras["side"] = side;
  emit_single(cfg, row, extras,
              {{"node span", human_number(plan.node_span) + " km"},
               {"extension", human_number(plan.extension) + " km (" + side + ")"}},
              out);
}

const char* swept_name(SweepParameter p) {
  switch (p) {
    case SweepParameter::TotalLength:
      return "L";
    case SweepParameter::ModeCount:
      return "m";
    case SweepParameter::EmissionProb:
      return "rho";
  }
  return "?";
}

void run_sweep_scenario(const RunConfig& cfg, std::ostream& out) {
  const auto records = run_sweep(cfg.sweep, cfg.tol, cfg.threads);
  const char* swept = swept_name(cfg.sweep.parameter);

  auto row_of = [](const SweepRecord& r) {
    return MetricsRow{r.total_length, r.link_count, r.link_length, r.metrics.value_or(RepeaterMetrics{})};
  };

  switch (cfg.format) {
    case OutputFormat::Csv: {
      out << kMetricsCsvHeader << ",swept,value,error\n";
      for (const auto& r : records) {
        if (r.metrics) {
          out << csv_row(row_of(r));
        } else {
          // Direct transmission and failed points only fill what they know.
          out << shortest(r.total_length) << ",,,,,,,," << (r.direct_time ? shortest(*r.direct_time) : "")
              << ",,";
        }
        std::string error = r.error;
        for (auto& ch : error) {
          if (ch == ',' || ch == '\n') ch = ';';
        }
        out << ',' << swept << ',' << shortest(r.value) << ',' << error << '\n';
      }
      break;
    }
    case OutputFormat::Json: {
      json j;
      j["scenario"] = "sweep";
      j["swept"] = swept;
      j["records"] = json::array();
      for (const auto& r : records) {
        json rec;
        if (r.metrics) {
          rec = to_json(row_of(r));
          rec["extension_km"] = r.extension;
        } else {
          rec["L_km"] = r.total_length;
          rec["t_tot_s"] = r.direct_time ? json(*r.direct_time) : json(nullptr);
        }
        rec["value"] = r.value;
        rec["error"] = r.error.empty() ? json(nullptr) : json(r.error);
        j["records"].push_back(std::move(rec));
      }
      out << j.dump(2) << '\n';
      break;
    }
    case OutputFormat::Human: {
      out << std::left << std::setw(12) << swept << std::setw(6) << "n" << std::setw(14) << "T_tot"
          << std::setw(14) << "<t_M>" << "sigma(t_M)\n";
      for (const auto& r : records) {
        out << std::setw(12) << human_number(r.value);
        if (!r.error.empty()) {
          out << "error: " << r.error << '\n';
        } else if (r.metrics) {
          out << std::setw(6) << r.link_count << std::setw(14) << human_time(r.metrics->t_tot)
              << std::setw(14) << human_time(r.metrics->mem_time_avg)
              << human_time(r.metrics->mem_time_std) << '\n';
        } else {
          out << std::setw(6) << "-" << human_time(*r.direct_time) << '\n';
        }
      }
      break;
    }
  }
}

void run_crossover(const RunConfig& cfg, std::ostream& out) {
  const double length = crossover_with_direct(cfg.hw, cfg.ch, cfg.source_rate, cfg.tol);
  switch (cfg.format) {
    case OutputFormat::Csv:
      out << "crossover_km,source_rate_hz\n" << shortest(length) << ',' << shortest(cfg.source_rate) << '\n';
      break;
    case OutputFormat::Json: {
      json j;
      j["scenario"] = "crossover";
      j["crossover_km"] = length;
      j["source_rate_hz"] = cfg.source_rate;
      out << j.dump(2) << '\n';
      break;
    }
    case OutputFormat::Human:
      print_human(out, {{"scenario", "crossover"},
                        {"source rate", human_number(cfg.source_rate) + " Hz"},
                        {"crossover", human_number(length) + " km"}});
      break;
  }
}

void run_simulate(const RunConfig& cfg, std::ostream& out) {
  TrialConfig trial{cfg.hw, ChainConfig(cfg.total_length, cfg.link_count), cfg.ch,
                    cfg.trials, cfg.seed, cfg.threads};
  const auto stats = simulate(trial);
  const double link_length = trial.chain.link_length();
  switch (cfg.format) {
    case OutputFormat::Csv:
      out << "L_km,n,L0_km,trials,seed,mean_attempts,mean_attempts_se,mean_t_tot_s,mean_t_tot_se_s,"
             "mean_mem_s,mean_mem_se_s,std_mem_s,es_success_rate,rounds\n";
      out << shortest(cfg.total_length) << ',' << cfg.link_count << ',' << shortest(link_length) << ','
          << cfg.trials << ',' << cfg.seed << ',' << shortest(stats.attempts.mean) << ','
          << shortest(stats.attempts.std_error) << ',' << shortest(stats.t_tot.mean) << ','
          << shortest(stats.t_tot.std_error) << ',' << shortest(stats.mem_time.mean) << ','
          << shortest(stats.mem_time.std_error) << ',' << shortest(stats.std_mem_time) << ','
          << shortest(stats.es_success_rate) << ',' << stats.rounds << '\n';
      break;
    case OutputFormat::Json: {
      json j;
      j["scenario"] = "simulate";
      j["L_km"] = cfg.total_length;
      j["n"] = cfg.link_count;
      j["L0_km"] = link_length;
      j["trials"] = cfg.trials;
      j["seed"] = cfg.seed;
      j["mean_attempts"] = stats.attempts.mean;
      j["mean_attempts_se"] = stats.attempts.std_error;
      j["mean_t_tot_s"] = stats.t_tot.mean;
      j["mean_t_tot_se_s"] = stats.t_tot.std_error;
      j["mean_mem_s"] = stats.mem_time.mean;
      j["mean_mem_se_s"] = stats.mem_time.std_error;
      j["std_mem_s"] = stats.std_mem_time;
      j["es_success_rate"] = stats.es_success_rate;
      j["rounds"] = stats.rounds;
      json hist = json::object();
      for (const auto& [k, count] : stats.attempt_histogram) hist[std::to_string(k)] = count;
      j["attempt_histogram"] = std::move(hist);
      out << j.dump(2) << '\n';
      break;
    }
    case OutputFormat::Human:
      print_human(out, {{"scenario", "simulate"},
                        {"L", human_number(cfg.total_length) + " km"},
                        {"n", std::to_string(cfg.link_count)},
                        {"successes", std::to_string(cfg.trials)},
                        {"seed", std::to_string(cfg.seed)},
                        {"f/p", human_number(stats.attempts.mean) + " +/- " +
                                    human_number(stats.attempts.std_error)},
                        {"T_tot", human_time(stats.t_tot.mean) + " +/- " +
                                      human_time(stats.t_tot.std_error)},
                        {"<t_M>", human_time(stats.mem_time.mean) + " +/- " +
                                      human_time(stats.mem_time.std_error)},
                        {"sigma(t_M)", human_time(stats.std_mem_time)},
                        {"round success", human_number(stats.es_success_rate)},
                        {"rounds", std::to_string(stats.rounds)}});
      break;
  }
}

int report(const RunConfig* cfg, int code, std::string_view kind, const std::string& message,
           std::ostream& out, std::ostream& err) {
  if (cfg && cfg->format == OutputFormat::Json) {
    json j;
    j["error"] = {{"code", std::string(kind)}, {"exit", code}, {"message", message}};
    out << j.dump(2) << '\n';
  } else {
    err << "error (" << kind << "): " << message << '\n';
  }
  return code;
}

}  // namespace

std::string shortest(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return ec == std::errc{} ? std::string(buf, ptr) : std::string("nan");
}

std::string human_time(double seconds) {
  struct Unit {
    double scale;
    const char* name;
  };
  static constexpr Unit kUnits[] = {{1e-9, "ns"}, {1e-6, "us"}, {1e-3, "ms"}, {1.0, "s"}};
  const double mag = std::abs(seconds);
  if (mag >= 3600.0) return human_number(seconds / 3600.0) + " h";
  const Unit* unit = &kUnits[3];
  if (mag > 0.0) {
    for (const auto& u : kUnits) {
      if (mag < u.scale * 1000.0) {
        unit = &u;
        break;
      }
    }
  }
  return human_number(seconds / unit->scale) + " " + unit->name;
}

int execute(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    switch (cfg.scenario) {
      case Scenario::Eval:
        run_eval(cfg, out);
        break;
      case Scenario::Optimize:
        run_optimize(cfg, out);
        break;
      case Scenario::FixedLink:
        run_fixed_link(cfg, out);
        break;
      case Scenario::Sweep:
        run_sweep_scenario(cfg, out);
        break;
      case Scenario::Crossover:
        run_crossover(cfg, out);
        break;
      case Scenario::Simulate:
        run_simulate(cfg, out);
        break;
    }
  } catch (const ConfigError& e) {
    return report(&cfg, kExitConfigError, "config", e.what(), out, err);
  } catch (const InvalidParameter& e) {
    return report(&cfg, kExitConfigError, "invalid_parameter", e.what(), out, err);
  } catch (const ModelError& e) {
    return report(&cfg, kExitModelError, to_string(e.kind()), e.what(), out, err);
  } catch (const SimulationAbort& e) {
    return report(&cfg, kExitSimulationAbort, "simulation_abort", e.what(), out, err);
  }
  return kExitOk;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  try {
    cfg = parse_config(argc, argv);
  } catch (const HelpRequested& help) {
    out << help.text;
    return help.exit_code;
  } catch (const ConfigError& e) {
    return report(nullptr, kExitConfigError, "config", e.what(), out, err);
  }
  return execute(cfg, out, err);
}

}  // namespace qrep::cli
