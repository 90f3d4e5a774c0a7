// Command-line surface for the TMA arrival capacity model: scenario
// validation, capacity reports, pairwise spacing tables, sensitivity sweeps,
// the occupancy simulator and trajectory-statistics extraction.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "tmacap/capacity.hpp"
#include "tmacap/errors.hpp"
#include "tmacap/format.hpp"
#include "tmacap/occupancy_sim.hpp"
#include "tmacap/pairwise_separation.hpp"
#include "tmacap/scenario.hpp"
#include "tmacap/sensitivity.hpp"
#include "tmacap/trajectory_stats.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitInput = 2;
constexpr int kExitSolver = 3;

int log_level() {
  const char* env = std::getenv("TMA_CAP_LOG");
  return env != nullptr ? std::atoi(env) : 0;
}

void log_note(const std::string& msg) {
  if (log_level() >= 1) std::cerr << "[tma] " << msg << "\n";
}

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw tmacap::ScenarioError("cannot open output file " + out_path);
  out << text;
}

struct ScenarioOptions {
  std::string scenario_path;
  double s_override = -1.0;
  double sthr_override = -1.0;
  double speed_scale = 0.0;
};

tmacap::AirspaceScenario load_with_overrides(const ScenarioOptions& opt) {
  tmacap::AirspaceScenario sc = tmacap::load_scenario_file(opt.scenario_path);
  log_note("loaded scenario '" + sc.name + "' with " + std::to_string(sc.paths.size()) +
           " paths");
  if (opt.s_override > 0.0) sc.separation.s_tma = opt.s_override;
  if (opt.sthr_override > 0.0) sc.separation.s_thr = opt.sthr_override;
  if (opt.s_override > 0.0 || opt.sthr_override > 0.0) {
    const auto violations = tmacap::validate(sc);
    if (!violations.empty()) {
      throw tmacap::ScenarioError("separation override invalid: " + violations.front().entity +
                                  ": " + violations.front().message);
    }
  }
  if (opt.speed_scale != 0.0) {
    sc = tmacap::scale_speeds(sc, opt.speed_scale);
  }
  return sc;
}

std::vector<tmacap::SeparationRegime> parse_regimes(const std::string& text) {
  std::vector<tmacap::SeparationRegime> regimes;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, ',')) {
    const auto colon = item.find(':');
    if (colon == std::string::npos) {
      throw tmacap::ScenarioError("bad regime '" + item + "', expected S:Sthr");
    }
    try {
      regimes.push_back({std::stod(item.substr(0, colon)), std::stod(item.substr(colon + 1))});
    } catch (const std::exception&) {
      throw tmacap::ScenarioError("bad regime '" + item + "', expected numeric S:Sthr");
    }
  }
  if (regimes.empty()) throw tmacap::ScenarioError("empty regime list");
  return regimes;
}

nlohmann::json pair_table_json(const tmacap::PairTable& table) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& e : table.entries) {
    rows.push_back({{"lead_path", e.combo.lead_path},
                    {"lead_class", e.combo.lead_class},
                    {"trail_path", e.combo.trail_path},
                    {"trail_class", e.combo.trail_class},
                    {"probability", tmacap::round_sig(e.probability)},
                    {"t0_min", tmacap::round_sig(e.solution.t0_star)},
                    {"delta_t_min", tmacap::round_sig(e.solution.delta_t)},
                    {"binding", tmacap::to_string(e.solution.binding)}});
  }
  return rows;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"TMA arrival capacity from the structural space of arrival flight paths"};
  app.require_subcommand(1);

  std::string out_path;
  std::string format = "table";
  app.add_option("--out", out_path, "Write output to this path instead of stdout");
  app.add_option("--format", format, "Output format")
      ->check(CLI::IsMember({"table", "csv", "json"}));

  ScenarioOptions sopt;
  bool floor_mode = false;

  auto* cmd_validate = app.add_subcommand("validate", "Check a scenario file's invariants");
  cmd_validate->add_option("scenario", sopt.scenario_path, "Scenario JSON file")->required();

  auto* cmd_capacity = app.add_subcommand("capacity", "Estimate D_temp, T_thr and lambda");
  cmd_capacity->add_option("scenario", sopt.scenario_path, "Scenario JSON file")->required();
  cmd_capacity->add_flag("--floor", floor_mode, "Also report floor(lambda)");

  auto* cmd_pairs = app.add_subcommand("pairs", "Dump the pairwise minimal-spacing table");
  cmd_pairs->add_option("scenario", sopt.scenario_path, "Scenario JSON file")->required();

  std::string regimes_text = "5:8,5:5,3:5,3:3";
  double scale_min = -0.10, scale_max = 0.10, scale_step = 0.01;
  bool scale_thr = false;
  auto* cmd_sweep = app.add_subcommand("sweep", "Speed/separation sensitivity sweep");
  cmd_sweep->add_option("scenario", sopt.scenario_path, "Scenario JSON file")->required();
  cmd_sweep->add_option("--regimes", regimes_text, "Separation regimes as S:Sthr,...");
  cmd_sweep->add_option("--scale-min", scale_min, "Lowest speed scale fraction");
  cmd_sweep->add_option("--scale-max", scale_max, "Highest speed scale fraction");
  cmd_sweep->add_option("--scale-step", scale_step, "Speed scale grid step");
  cmd_sweep->add_flag("--scale-thr", scale_thr, "Scale threshold speeds too");

  std::uint64_t seed = 0;
  std::size_t n_aircraft = 100000;
  double warmup = 0.05;
  std::string trace_path;
  auto* cmd_simulate = app.add_subcommand("simulate", "Saturated-stream occupancy simulation");
  cmd_simulate->add_option("scenario", sopt.scenario_path, "Scenario JSON file")->required();
  cmd_simulate->add_option("--n", n_aircraft, "Number of aircraft in the stream");
  cmd_simulate->add_option("--seed", seed, "RNG seed");
  cmd_simulate->add_option("--warmup", warmup, "Warmup fraction excluded from statistics");
  cmd_simulate->add_option("--trace", trace_path, "Write per-aircraft event trace CSV here");

  std::string points_path, gates_path, out_dir = ".", runway = "RWY";
  double radius = -1.0;
  auto* cmd_extract = app.add_subcommand("extract", "Extract tables from trajectory points");
  cmd_extract->add_option("points", points_path, "Trajectory point CSV")->required();
  cmd_extract->add_option("gates", gates_path, "Gate definition JSON")->required();
  cmd_extract->add_option("--radius", radius, "Capture radius override, NM");
  cmd_extract->add_option("--out-dir", out_dir, "Directory for the emitted tables");
  cmd_extract->add_option("--runway", runway, "Runway id for the scenario skeleton");

  for (auto* cmd : {cmd_capacity, cmd_pairs, cmd_simulate}) {
    cmd->add_option("--s", sopt.s_override, "Override in-TMA separation S, NM");
    cmd->add_option("--sthr", sopt.sthr_override, "Override threshold separation, NM");
    cmd->add_option("--speed-scale", sopt.speed_scale, "Scale entry/MP_iap speeds by 1+f");
  }

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand(cmd_validate)) {
      std::ifstream in(sopt.scenario_path);
      if (!in) throw tmacap::ScenarioError("cannot open file " + sopt.scenario_path);
      std::ostringstream buf;
      buf << in.rdbuf();
      const tmacap::AirspaceScenario sc = tmacap::parse_scenario(buf.str());
      const auto violations = tmacap::validate(sc);
      if (violations.empty()) {
        emit("OK: " + sc.name + " (" + std::to_string(sc.paths.size()) + " paths, " +
                 std::to_string(sc.active_paths().size()) + " active)\n",
             out_path);
        return kExitOk;
      }
      std::ostringstream msg;
      for (const auto& v : violations) msg << v.entity << ": " << v.message << "\n";
      emit(msg.str(), out_path);
      return kExitValidation;
    }

    if (app.got_subcommand(cmd_capacity)) {
      const auto sc = load_with_overrides(sopt);
      const tmacap::CapacityReport report = tmacap::capacity(sc);
      log_note("solved " + std::to_string(report.pair_table.entries.size()) + " combinations");
      if (format == "csv") {
        emit(tmacap::capacity_report_csv(report), out_path);
      } else if (format == "json") {
        emit(tmacap::capacity_report_json(report, floor_mode), out_path);
      } else {
        emit(tmacap::capacity_report_table(report, floor_mode), out_path);
      }
      return kExitOk;
    }

    if (app.got_subcommand(cmd_pairs)) {
      const auto sc = load_with_overrides(sopt);
      const tmacap::PairTable table = tmacap::solve_all_pairs(sc);
      if (format == "json") {
        emit(pair_table_json(table).dump(2) + "\n", out_path);
      } else {
        emit(tmacap::pair_table_csv(table), out_path);
      }
      return kExitOk;
    }

    if (app.got_subcommand(cmd_sweep)) {
      const auto sc = tmacap::load_scenario_file(sopt.scenario_path);
      tmacap::SweepSpec spec;
      spec.regimes = parse_regimes(regimes_text);
      spec.speed_scale_grid = tmacap::SweepSpec::make_grid(scale_min, scale_max, scale_step);
      spec.scale_thr_speeds = scale_thr;
      const auto rows = tmacap::run_sweep(sc, spec);
      if (format == "json") {
        nlohmann::json jrows = nlohmann::json::array();
        for (const auto& r : rows) {
          nlohmann::json jr = {{"regime_s_nm", r.regime.s_tma},
                               {"regime_sthr_nm", r.regime.s_thr},
                               {"speed_scale", r.speed_scale},
                               {"status", r.status == tmacap::SweepRowStatus::kOk ? "ok"
                                                                                  : "skipped"}};
          if (r.status == tmacap::SweepRowStatus::kOk) {
            jr["d_temp_min"] = tmacap::round_sig(r.d_temp_min);
            jr["t_bar_thr_min"] = tmacap::round_sig(r.t_bar_thr_min);
            jr["lambda"] = tmacap::round_sig(r.lambda);
          }
          jrows.push_back(std::move(jr));
        }
        emit(jrows.dump(2) + "\n", out_path);
      } else {
        emit(tmacap::sweep_csv(rows), out_path);
      }
      return kExitOk;
    }

    if (app.got_subcommand(cmd_simulate)) {
      const auto sc = load_with_overrides(sopt);
      const tmacap::PairTable table = tmacap::solve_all_pairs(sc);
      tmacap::SimConfig cfg;
      cfg.n_aircraft = n_aircraft;
      cfg.rng_seed = seed;
      cfg.warmup_fraction = warmup;
      std::vector<tmacap::SimTraceRow> trace;
      const tmacap::SimResult result =
          tmacap::simulate(sc, table, cfg, trace_path.empty() ? nullptr : &trace);
      if (!trace_path.empty()) emit(tmacap::sim_trace_csv(trace), trace_path);
      if (format == "csv") {
        std::ostringstream csv;
        csv << "mean_occupancy,max_occupancy,time_avg_occupancy,realized_mean_thr_spacing_min\n"
            << tmacap::format_sig(result.mean_occupancy) << ',' << result.max_occupancy << ','
            << tmacap::format_sig(result.time_avg_occupancy) << ','
            << tmacap::format_sig(result.realized_mean_thr_spacing) << '\n';
        emit(csv.str(), out_path);
      } else if (format == "json") {
        emit(tmacap::sim_result_json(result), out_path);
      } else {
        std::ostringstream tab;
        char buf[160];
        std::snprintf(buf, sizeof(buf),
                      "time_avg_occupancy %.3f  max_occupancy %d  mean_thr_spacing %.3f min\n",
                      result.time_avg_occupancy, result.max_occupancy,
                      result.realized_mean_thr_spacing);
        tab << buf;
        emit(tab.str(), out_path);
      }
      return kExitOk;
    }

    if (app.got_subcommand(cmd_extract)) {
      const auto flights = tmacap::load_points_csv_file(points_path);
      tmacap::GateSet gates = tmacap::load_gates_file(gates_path);
      if (radius > 0.0) gates.capture_radius_nm = radius;
      const auto tables = tmacap::build_tables(flights, gates);
      std::filesystem::create_directories(out_dir);
      emit(tmacap::proportions_csv(tables), out_dir + "/proportions.csv");
      emit(tmacap::class_mix_csv(tables), out_dir + "/class_mix.csv");
      emit(tmacap::speeds_csv(tables), out_dir + "/speeds.csv");
      emit(tmacap::scenario_skeleton_json(tables, runway), out_dir + "/scenario_skeleton.json");
      std::cout << "matched " << tables.n_matched << " flights (" << tables.n_unmatched
                << " unmatched); tables written to " << out_dir << "\n";
      return kExitOk;
    }
  } catch (const tmacap::SolverError& e) {
    std::cerr << "solver error: " << e.what() << "\n";
    return kExitSolver;
  } catch (const tmacap::ScenarioError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitInput;
  }

  return kExitOk;
}
