#include "uavsense/cli.hpp"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "uavsense/errors.hpp"
#include "uavsense/eval.hpp"
#include "uavsense/radio.hpp"
#include "uavsense/report_io.hpp"
#include "uavsense/scenario.hpp"
#include "uavsense/seed.hpp"
#include "uavsense/target_map.hpp"

namespace uavsense {

namespace {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string num(double v) { return fmt::format("{:.17g}", v); }

void write_file(const std::string& path, const std::string& content) {
  const fs::path p(path);
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << content;
  if (!f) throw std::runtime_error("failed writing " + path);
}

std::string resolve_scenario(const std::string& path) {
  if (fs::exists(path)) return path;
  if (const char* dir = std::getenv(kScenarioDirEnv); dir != nullptr && fs::path(path).is_relative()) {
    const fs::path candidate = fs::path(dir) / path;
    if (fs::exists(candidate)) return candidate.string();
  }
  throw ParseError("scenario file not found: " + path);
}

// One output artefact: the flag that names it and where it goes.
struct Output {
  std::string flag;
  std::string path;
};

// Everything needed to rerun a command: canonical, fully explicit arguments
// (no output paths) plus the outputs, written next to the main artefact.
struct Manifest {
  std::string command;
  std::string scenario;
  std::vector<std::string> arguments;
  std::vector<Output> outputs;
  ordered_json parameters = ordered_json::object();
  ordered_json seeds = ordered_json::object();
};

std::string default_manifest_path(const std::string& main_output) { return main_output + ".manifest.json"; }

void write_manifest(const Manifest& m, const std::string& path) {
  ordered_json j;
  j["tool"] = "uavsense";
  j["version"] = kToolVersion;
  j["command"] = m.command;
  j["scenario"] = m.scenario;
  j["arguments"] = m.arguments;
  ordered_json outs = ordered_json::object();
  for (const auto& o : m.outputs) outs[o.flag] = o.path;
  j["outputs"] = outs;
  j["parameters"] = m.parameters;
  j["seeds"] = m.seeds;
  write_file(path, j.dump(2) + "\n");
}

ordered_json solver_parameters(const SweepOptions& o) {
  return {{"detour_candidates", o.detour_candidates},
          {"tour_candidates", o.tour_candidates},
          {"lagrangian",
           {{"k_paths", o.lagrangian.k_paths},
            {"lambda_tolerance", o.lagrangian.lambda_tolerance},
            {"max_bisection_iters", o.lagrangian.max_bisection_iters}}},
          {"aco",
           {{"ants", o.aco.ants},
            {"iterations", o.aco.iterations},
            {"pheromone_influence", o.aco.pheromone_influence},
            {"heuristic_influence", o.aco.heuristic_influence},
            {"evaporation", o.aco.evaporation},
            {"rng_seed", o.aco.rng_seed}}}};
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

struct CommonOptions {
  std::string scenario;
  std::optional<std::uint64_t> seed;
  std::string manifest;
  bool no_timing = false;
};

ScenarioConfig load_with_seed(CommonOptions& common, std::string& resolved) {
  resolved = resolve_scenario(common.scenario);
  ScenarioConfig config = load_scenario_file(resolved);
  if (common.seed) config.solver.rng_seed = *common.seed;
  common.seed = config.solver.rng_seed;
  return config;
}

// ---------------------------------------------------------------- gen-maps

struct GenMapsOptions {
  CommonOptions common;
  std::string snr_out;
  std::string target_out;
  std::string mask_out;
};

int cmd_gen_maps(GenMapsOptions& o, std::ostream& out) {
  std::string scenario;
  const ScenarioConfig config = load_with_seed(o.common, scenario);
  const SnrMap snr = build_snr_map(config);
  const CellMask blocked = obstacle_mask(config);
  const TargetMap target = build_target_map(config, blocked);

  Manifest m;
  m.command = "gen-maps";
  m.scenario = scenario;
  m.arguments = {"--scenario", scenario};
  if (!o.snr_out.empty()) {
    write_file(o.snr_out, export_snr_map(snr));
    m.outputs.push_back({"--snr-out", o.snr_out});
  }
  if (!o.target_out.empty()) {
    write_file(o.target_out, export_target_map(target));
    m.outputs.push_back({"--target-out", o.target_out});
  }
  if (!o.mask_out.empty()) {
    write_file(o.mask_out, export_mask(blocked, config.grid.dimension()));
    m.outputs.push_back({"--mask-out", o.mask_out});
  }
  if (m.outputs.empty()) throw UsageError("gen-maps: give at least one of --snr-out, --target-out, --mask-out");
  const double threshold = db_to_linear(config.snr_threshold_db);
  std::size_t feasible = 0;
  for (double v : snr.values()) feasible += v >= threshold ? 1 : 0;
  out << fmt::format("grid {}x{}: {} SNR-feasible cells, {} blocked cells\n", config.grid.dimension(),
                     config.grid.dimension(), feasible,
                     std::count(blocked.begin(), blocked.end(), true));
  write_manifest(m, o.common.manifest.empty() ? default_manifest_path(m.outputs.front().path)
                                              : o.common.manifest);
  return kExitOk;
}

// -------------------------------------------------------------------- plan

struct PlanOptions {
  CommonOptions common;
  std::string solver;
  std::string initial = "sol1";
  std::optional<double> dbar;
  std::optional<int> ri;
  std::optional<int> rii;
  std::string out_path;
};

SweepOptions options_for(const ScenarioConfig& config, std::optional<int> ri, std::optional<int> rii) {
  SweepOptions opts = sweep_options_from(config);
  if (ri) opts.detour_candidates = *ri;
  if (rii) opts.tour_candidates = *rii;
  if (opts.detour_candidates < 0 || opts.tour_candidates < 0) throw UsageError("--ri/--rii must be >= 0");
  return opts;
}

int cmd_plan(PlanOptions& o, std::ostream& out, std::ostream& err) {
  std::string scenario;
  ScenarioConfig config = load_with_seed(o.common, scenario);
  const SolverTag solver = parse_solver_tag(o.solver);
  const SolverTag initial = parse_solver_tag(o.initial);
  if (initial != SolverTag::kSol1 && initial != SolverTag::kBenchmark) {
    throw UsageError("--initial must be sol1 or benchmark");
  }
  const double dbar = o.dbar.value_or(config.budget.distance_m);
  const SweepOptions opts = options_for(config, o.ri, o.rii);

  const PlanningInstance inst = make_instance(config);
  const FeasibilityReport feas = check_feasibility(inst.graph, dbar);
  if (!feas.feasible) {
    if (!feas.shortest) {
      err << "infeasible: start and finish are not connected through SNR-feasible cells\n";
    } else {
      err << fmt::format("infeasible: minimum flying distance {:.3f} m exceeds the budget {:.3f} m\n",
                         feas.min_distance_m, dbar);
    }
    return kExitInfeasible;
  }

  const bool improves = solver == SolverTag::kSol2 || solver == SolverTag::kSol3;
  const std::optional<SolverTag> init = improves ? std::optional<SolverTag>(initial) : std::nullopt;
  const SolverReport report = run_solver(inst.graph, solver, init, dbar, opts);
  if (auto v = find_violation(report.trajectory, inst.graph, dbar)) {
    throw std::logic_error("solver returned an invalid trajectory: " + *v);
  }
  write_file(o.out_path, report_to_json(report, {dbar, init, !o.common.no_timing}));
  out << fmt::format("{}: total_prob={:.6f} f_d={:.3f} m waypoints={}\n", to_string(solver),
                     report.trajectory.total_prob, report.trajectory.f_d, report.trajectory.waypoints.size());

  Manifest m;
  m.command = "plan";
  m.scenario = scenario;
  m.arguments = {"--scenario", scenario,
                 "--solver", to_string(solver),
                 "--initial", to_string(initial),
                 "--dbar", num(dbar),
                 "--ri", std::to_string(opts.detour_candidates),
                 "--rii", std::to_string(opts.tour_candidates),
                 "--seed", std::to_string(*o.common.seed)};
  if (o.common.no_timing) m.arguments.emplace_back("--no-timing");
  m.outputs.push_back({"--out", o.out_path});
  m.parameters = solver_parameters(opts);
  m.seeds = {{"run", *o.common.seed}, {"aco", opts.aco.rng_seed}};
  write_manifest(m, o.common.manifest.empty() ? default_manifest_path(o.out_path) : o.common.manifest);
  return kExitOk;
}

// ------------------------------------------------------------------- sweep

struct SweepCliOptions {
  CommonOptions common;
  std::string dbar_list;
  std::string solvers = "benchmark,sol1,sol2,sol3";
  std::string initials = "sol1,benchmark";
  std::optional<int> ri;
  std::optional<int> rii;
  std::string out_path;
};

std::vector<double> parse_dbar_list(const std::string& text, const PlanningInstance& inst) {
  std::vector<double> out;
  for (const auto& item : split_list(text)) {
    if (item == "min") {
      const auto f = check_feasibility(inst.graph, std::numeric_limits<double>::infinity());
      if (!f.shortest) throw InfeasibleError("start and finish are not connected");
      out.push_back(f.min_distance_m);
      continue;
    }
    try {
      std::size_t used = 0;
      const double v = std::stod(item, &used);
      if (used != item.size() || !std::isfinite(v) || v < 0.0) throw std::invalid_argument(item);
      out.push_back(v);
    } catch (const std::exception&) {
      throw UsageError("--dbar: '" + item + "' is not a non-negative number or 'min'");
    }
  }
  if (out.empty()) throw UsageError("--dbar: empty budget list");
  return out;
}

std::vector<SolverTag> parse_tags(const std::string& text, const char* flag) {
  std::vector<SolverTag> out;
  for (const auto& item : split_list(text)) {
    try {
      out.push_back(parse_solver_tag(item));
    } catch (const ValidationError&) {
      throw UsageError(std::string(flag) + ": unknown solver '" + item + "'");
    }
  }
  if (out.empty()) throw UsageError(std::string(flag) + ": empty solver list");
  return out;
}

std::string join_tags(const std::vector<SolverTag>& tags) {
  std::string s;
  for (auto t : tags) s += (s.empty() ? "" : ",") + to_string(t);
  return s;
}

int cmd_sweep(SweepCliOptions& o, std::ostream& out) {
  std::string scenario;
  ScenarioConfig config = load_with_seed(o.common, scenario);
  SweepOptions opts = options_for(config, o.ri, o.rii);
  opts.solvers = parse_tags(o.solvers, "--solvers");
  opts.initials = parse_tags(o.initials, "--initials");
  for (auto t : opts.initials) {
    if (t != SolverTag::kSol1 && t != SolverTag::kBenchmark) {
      throw UsageError("--initials: only sol1 and benchmark can seed improvements");
    }
  }
  const PlanningInstance inst = make_instance(config);
  const std::vector<double> dbars = parse_dbar_list(o.dbar_list, inst);

  const SweepResult result = sweep(inst, dbars, opts);
  for (const auto& row : result.rows) {
    if (row.trajectory) {
      if (auto v = find_violation(*row.trajectory, inst.graph, row.dbar_m)) {
        throw std::logic_error("solver returned an invalid trajectory: " + *v);
      }
    }
  }
  write_file(o.out_path, sweep_to_csv(result, !o.common.no_timing));
  out << fmt::format("{} rows written to {}\n", result.rows.size(), o.out_path);

  std::string dbar_text;
  for (double d : dbars) dbar_text += (dbar_text.empty() ? "" : ",") + num(d);
  Manifest m;
  m.command = "sweep";
  m.scenario = scenario;
  m.arguments = {"--scenario", scenario,
                 "--dbar", dbar_text,
                 "--solvers", join_tags(opts.solvers),
                 "--initials", join_tags(opts.initials),
                 "--ri", std::to_string(opts.detour_candidates),
                 "--rii", std::to_string(opts.tour_candidates),
                 "--seed", std::to_string(*o.common.seed)};
  if (o.common.no_timing) m.arguments.emplace_back("--no-timing");
  m.outputs.push_back({"--out", o.out_path});
  m.parameters = solver_parameters(opts);
  m.seeds = {{"run", *o.common.seed}, {"aco", opts.aco.rng_seed}};
  write_manifest(m, o.common.manifest.empty() ? default_manifest_path(o.out_path) : o.common.manifest);
  return kExitOk;
}

// ---------------------------------------------------------------- validate

struct ValidateOptions {
  CommonOptions common;
  std::string trajectory;
  std::uint64_t samples = 100000;
  std::optional<double> dbar;
  std::string out_path;
};

int cmd_validate(ValidateOptions& o, std::ostream& out, std::ostream& err) {
  std::string scenario;
  ScenarioConfig config = load_with_seed(o.common, scenario);
  if (o.samples == 0) throw UsageError("--samples must be >= 1");
  const double dbar = o.dbar.value_or(config.budget.distance_m);
  const PlanningInstance inst = make_instance(config);

  std::ifstream in(o.trajectory);
  if (!in) throw ParseError("cannot open trajectory file " + o.trajectory);
  Trajectory t = read_trajectory_document(in);
  if (std::isnan(t.f_d)) t.f_d = path_distance(t.waypoints, config.grid);
  if (std::isnan(t.f_p)) t.f_p = path_inverse_prob(t.waypoints, inst.target);
  if (std::isnan(t.total_prob)) t.total_prob = total_probability(t.waypoints, inst.target);

  const std::uint64_t sampler_seed = derive_seed(config.solver.rng_seed, SeedStream::kTargetSampler);
  ordered_json report;
  report["trajectory"] = o.trajectory;
  report["dbar_m"] = dbar;
  int code = kExitOk;
  if (auto v = find_violation(t, inst.graph, dbar)) {
    report["feasible"] = false;
    report["violation"] = *v;
    err << "constraint violation: " << *v << "\n";
    code = kExitValidation;
  } else {
    const MonteCarloResult mc = monte_carlo_validate(t, config, inst.blocked, inst.target, o.samples,
                                                     sampler_seed);
    report["feasible"] = true;
    report["analytic_total_prob"] = mc.analytic;
    report["samples"] = mc.samples;
    report["hits"] = mc.hits;
    report["empirical_rate"] = mc.rate;
    report["ci99_low"] = mc.ci_low;
    report["ci99_high"] = mc.ci_high;
    report["verdict"] = mc.analytic_inside() ? "analytic inside CI" : "analytic outside CI";
    out << fmt::format("analytic={:.6f} empirical={:.6f} 99% CI=[{:.6f}, {:.6f}] -> {}\n", mc.analytic,
                       mc.rate, mc.ci_low, mc.ci_high, report["verdict"].get<std::string>());
  }
  write_file(o.out_path, report.dump(2) + "\n");

  Manifest m;
  m.command = "validate";
  m.scenario = scenario;
  m.arguments = {"--scenario", scenario,
                 "--trajectory", o.trajectory,
                 "--samples", std::to_string(o.samples),
                 "--dbar", num(dbar),
                 "--seed", std::to_string(*o.common.seed)};
  m.outputs.push_back({"--out", o.out_path});
  m.seeds = {{"run", *o.common.seed}, {"sampler", sampler_seed}};
  write_manifest(m, o.common.manifest.empty() ? default_manifest_path(o.out_path) : o.common.manifest);
  return code;
}

// ------------------------------------------------------------------ replay

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int cmd_replay(const std::string& manifest_path, const std::string& redirect, std::ostream& out,
               std::ostream& err) {
  std::ifstream in(manifest_path);
  if (!in) throw ParseError("cannot open manifest " + manifest_path);
  nlohmann::json m;
  try {
    m = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("manifest: ") + e.what());
  }
  const auto relocate = [&](const std::string& p) {
    return redirect.empty() ? p : (fs::path(redirect) / fs::path(p).filename()).string();
  };
  std::vector<std::string> args{m.at("command").get<std::string>()};
  for (const auto& a : m.at("arguments")) args.push_back(a.get<std::string>());
  for (const auto& [flag, path] : m.at("outputs").items()) {
    args.push_back(flag);
    args.push_back(relocate(path.get<std::string>()));
  }
  args.emplace_back("--manifest");
  args.push_back(relocate(manifest_path));
  return dispatch(args, out, err);
}

// ---------------------------------------------------------------- dispatch

void add_common(CLI::App* cmd, CommonOptions& c, bool timing) {
  cmd->add_option("--scenario", c.scenario,
                  std::string("Scenario file (JSON). Relative paths not found in the working "
                              "directory are looked up in $") + kScenarioDirEnv)
      ->required();
  cmd->add_option("--seed", c.seed, "Run seed; overrides solver.rng_seed from the scenario");
  cmd->add_option("--manifest", c.manifest, "Run manifest path (default: <main output>.manifest.json)");
  if (timing) cmd->add_flag("--no-timing", c.no_timing, "Omit wallclock measurements from the outputs");
}

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Sensing-probability trajectory planner for cellular-connected UAVs"};
  app.name("uavsense");
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);

  GenMapsOptions gen;
  auto* gen_cmd = app.add_subcommand("gen-maps", "Build the expected-SNR map, target map and obstacle mask");
  add_common(gen_cmd, gen.common, false);
  gen_cmd->add_option("--snr-out", gen.snr_out, "CSV of expected SNR in dB (row i, column j)");
  gen_cmd->add_option("--target-out", gen.target_out, "CSV of per-cell target probabilities");
  gen_cmd->add_option("--mask-out", gen.mask_out, "CSV of blocked-cell flags (1 = blocked)");

  PlanOptions plan;
  auto* plan_cmd = app.add_subcommand("plan", "Plan one trajectory and write a solver report");
  add_common(plan_cmd, plan.common, true);
  plan_cmd->add_option("--solver", plan.solver, "benchmark | sol1 | sol2 | sol3")->required();
  plan_cmd->add_option("--initial", plan.initial, "Initial trajectory for sol2/sol3: sol1 | benchmark")
      ->capture_default_str();
  plan_cmd->add_option("--dbar", plan.dbar, "Distance budget in meters (default: scenario budget)");
  plan_cmd->add_option("--ri", plan.ri, "Detour candidates for sol2 (default: scenario)");
  plan_cmd->add_option("--rii", plan.rii, "Extra tour waypoints for sol3 (default: scenario)");
  plan_cmd->add_option("--out", plan.out_path, "Solver report path (JSON)")->required();

  SweepCliOptions sw;
  auto* sweep_cmd = app.add_subcommand("sweep", "Run solvers over a list of distance budgets");
  add_common(sweep_cmd, sw.common, true);
  sweep_cmd->add_option("--dbar", sw.dbar_list,
                        "Comma-separated budgets in meters; 'min' is the shortest feasible distance")
      ->required();
  sweep_cmd->add_option("--solvers", sw.solvers, "Comma-separated solver list")->capture_default_str();
  sweep_cmd->add_option("--initials", sw.initials, "Initial trajectories for sol2/sol3")->capture_default_str();
  sweep_cmd->add_option("--ri", sw.ri, "Detour candidates for sol2 (default: scenario)");
  sweep_cmd->add_option("--rii", sw.rii, "Extra tour waypoints for sol3 (default: scenario)");
  sweep_cmd->add_option("--out", sw.out_path, "Sweep CSV path")->required();

  ValidateOptions val;
  auto* val_cmd = app.add_subcommand("validate", "Check a trajectory and Monte Carlo its sensing probability");
  add_common(val_cmd, val.common, false);
  val_cmd->add_option("--trajectory", val.trajectory, "Trajectory or solver report (JSON)")->required();
  val_cmd->add_option("--samples", val.samples, "Monte Carlo sample count (>= 1)")->capture_default_str();
  val_cmd->add_option("--dbar", val.dbar, "Distance budget in meters (default: scenario budget)");
  val_cmd->add_option("--out", val.out_path, "Validation report path (JSON)")->required();

  std::string manifest_path;
  std::string redirect;
  auto* replay_cmd = app.add_subcommand("replay", "Rerun a command from its manifest");
  replay_cmd->add_option("--manifest", manifest_path, "Manifest written by an earlier run")->required();
  replay_cmd->add_option("--redirect", redirect, "Write outputs into this directory instead");

  std::vector<const char*> argv{"uavsense"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kExitOk : kExitUsage;
  }

  if (gen_cmd->parsed()) return cmd_gen_maps(gen, out);
  if (plan_cmd->parsed()) return cmd_plan(plan, out, err);
  if (sweep_cmd->parsed()) return cmd_sweep(sw, out);
  if (val_cmd->parsed()) return cmd_validate(val, out, err);
  if (replay_cmd->parsed()) return cmd_replay(manifest_path, redirect, out, err);
  return kExitUsage;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  try {
    return dispatch(args, out, err);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ValidationError& e) {
    err << "validation error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const InfeasibleError& e) {
    err << "infeasible: " << e.what() << "\n";
    return kExitInfeasible;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
}

}  // namespace uavsense
