// Copyright 2026 The Blimp Neurocontrol Authors
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

#include "blimp/cli.h"

#include <CLI11.hpp>
#include <filesystem>
#include <optional>
#include <ostream>

#include "blimp/config.h"
#include "blimp/errors.h"
#include "blimp/evolution.h"
#include "blimp/genome_io.h"
#include "blimp/harness.h"
#include "blimp/sysid.h"
#include "blimp/text.h"

namespace blimp {
namespace {

namespace fs = std::filesystem;

// Bad input the user can fix: maps to exit code 2.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

constexpr std::uint64_t kReevalStream = 0x72656576;  // "reev"

struct CommonOptions {
  std::string config_path;
  std::vector<std::string> sets;
  std::optional<std::uint64_t> seed;
};

void AddCommon(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("--config", o.config_path, "INI experiment configuration")
      ->check(CLI::ExistingFile);
  cmd->add_option("--set", o.sets,
                  "Override a config value, e.g. --set radar.noise_sigma=0.1");
  cmd->add_option("--seed", o.seed, "Seed for all randomness");
}

RunConfig ResolveConfig(const CommonOptions& o) {
  try {
    return o.config_path.empty() ? ParseConfig("", o.sets)
                                 : LoadConfig(o.config_path, o.sets);
  } catch (const FormatError& e) {
    throw UsageError(e.what());
  }
}

template <class Genome>
Genome LoadGenomeOrUsage(const std::string& path) {
  try {
    return LoadGenome<Genome>(path);
  } catch (const FormatError& e) {
    throw UsageError(e.what());
  }
}

// ---------------------------------------------------------------------------

struct EvolveOptions {
  CommonOptions common;
  std::string controller = "snn";
  std::string out_dir;
  std::optional<int> generations;
  std::optional<int> pop;
  std::optional<int> threads;
  std::string resume;
};

template <class Genome>
int RunEvolve(const EvolveOptions& o, EvolutionConfig cfg, std::ostream& out) {
  fs::create_directories(o.out_dir);
  const fs::path dir(o.out_dir);

  std::optional<EvolutionCheckpoint<Genome>> resume;
  if (!o.resume.empty()) {
    try {
      resume = CheckpointFromJson<Genome>(LoadJson(o.resume));
    } catch (const FormatError& e) {
      throw UsageError(e.what());
    }
  }
  EvolveHooks<Genome> hooks;
  if (resume) hooks.resume_from = &*resume;
  hooks.on_generation = [&](const EvolutionCheckpoint<Genome>& ck) {
    SaveJson((dir / "checkpoint.json").string(), ToJson(ck));
  };

  const EvolutionResult<Genome> result = Evolve<Genome>(cfg, hooks);
  WriteFile((dir / "log.csv").string(), GenerationLogCsv(result.log));
  SaveJson((dir / "hof.json").string(), HofToJson<Genome>(result.hof));

  Rng rng = DeriveRng({cfg.seed, kReevalStream});
  const auto ranked = ReevaluateHof<Genome>(result.hof, cfg.reeval_sets,
                                            cfg.episode, cfg.setup, rng);
  SaveJson((dir / "hof_reevaluated.json").string(), HofToJson<Genome>(ranked));
  SaveGenome((dir / "best.json").string(), ranked.front().genome);

  out << "generations=" << result.log.size()
      << " hof_best=" << FormatDouble(result.hof.front().fitness)
      << " reevaluated_best=" << FormatDouble(ranked.front().fitness) << '\n';
  return kExitOk;
}

int CmdEvolve(const EvolveOptions& o, std::ostream& out) {
  RunConfig cfg = ResolveConfig(o.common);
  EvolutionConfig& e = cfg.evolution;
  if (o.common.seed) e.seed = *o.common.seed;
  if (o.generations) e.generations = *o.generations;
  if (o.pop) e.pop_size = *o.pop;
  if (o.threads) e.threads = *o.threads;
  try {
    e.Validate();
  } catch (const FormatError& err) {
    throw UsageError(err.what());
  }
  if (o.controller == "snn") return RunEvolve<SnnGenome>(o, e, out);
  return RunEvolve<AnnGenome>(o, e, out);
}

// ---------------------------------------------------------------------------

struct EvalOptions {
  CommonOptions common;
  std::string controller;
  std::string genome;
  std::optional<bool> hybrid;
  std::string out_path;
  std::string smooth_out;
  std::string summary;
};

std::unique_ptr<Controller> BuildController(const EvalOptions& o,
                                            const RunConfig& cfg) {
  const ControlLimits& limits = cfg.evolution.setup.limits;
  const double dt = cfg.plant().dt;
  if (o.controller == "pid") return std::make_unique<PidController>(cfg.pid, limits);
  if (o.controller == "zero") return std::make_unique<ZeroController>();
  if (o.genome.empty()) {
    throw UsageError("--genome is required for controller '" + o.controller + "'");
  }
  std::unique_ptr<Controller> net;
  const NetworkEvalConfig* net_cfg = nullptr;
  if (o.controller == "ann") {
    net = std::make_unique<AnnController>(LoadGenomeOrUsage<AnnGenome>(o.genome),
                                          limits);
    net_cfg = &cfg.ann;
  } else {
    net = std::make_unique<SnnController>(LoadGenomeOrUsage<SnnGenome>(o.genome),
                                          limits);
    net_cfg = &cfg.snn;
  }
  if (o.hybrid.value_or(net_cfg->hybrid)) {
    return std::make_unique<HybridController>(std::move(net), net_cfg->pd, dt,
                                              limits);
  }
  return net;
}

int CmdEval(const EvalOptions& o, std::ostream& out, std::ostream& err) {
  RunConfig cfg = ResolveConfig(o.common);
  if (o.common.seed) cfg.eval_seed = *o.common.seed;
  auto controller = BuildController(o, cfg);
  DiscretePlant plant(cfg.plant());
  const EvalReport r =
      RunWaypointEval(*controller, plant, cfg.evolution.setup.sensor, cfg.plan,
                      cfg.plant().dt, cfg.eval_seed);
  if (!o.out_path.empty()) WriteFile(o.out_path, TrajectoryCsv(r.trajectory));
  if (r.failed) {
    err << "error: run failed at step " << r.failed_step << '\n';
    return kExitRuntime;
  }
  if (!o.smooth_out.empty()) {
    std::vector<double> u;
    for (const auto& p : r.trajectory) u.push_back(p.u_total);
    const auto smooth = MovingAverage(u, cfg.smooth_window);
    std::string csv = "t,u_total,u_smooth\n";
    for (std::size_t i = 0; i < u.size(); ++i) {
      csv += FormatDouble(r.trajectory[i].t) + ',' + FormatDouble(u[i]) + ',' +
             FormatDouble(smooth[i]) + '\n';
    }
    WriteFile(o.smooth_out, csv);
  }
  if (!o.summary.empty()) {
    SaveJson(o.summary, {{"controller", o.controller},
                         {"rmsae", r.rmsae},
                         {"effort", r.effort},
                         {"pd_fraction", r.pd_fraction},
                         {"steps", r.trajectory.size()}});
  }
  out << "controller=" << o.controller << " rmsae=" << FormatDouble(r.rmsae)
      << " effort=" << FormatDouble(r.effort)
      << " pd_fraction=" << FormatDouble(r.pd_fraction) << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct SysidOptions {
  std::string log;
  std::string out_path;
  std::string residuals;
};

int CmdSysid(const SysidOptions& o, std::ostream& out) {
  FlightLog log;
  try {
    log = LoadFlightLog(o.log);
  } catch (const FormatError& e) {
    throw UsageError(e.what());
  }
  const FitReport r = FitModel(log);
  if (!o.out_path.empty()) SaveJson(o.out_path, FitReportToJson(r));
  if (!o.residuals.empty()) WriteFile(o.residuals, ResidualCsv(r, log));
  out << "a1=" << FormatDouble(r.model.a1) << " a2=" << FormatDouble(r.model.a2)
      << " d1=" << FormatDouble(r.model.d1) << " d2=" << FormatDouble(r.model.d2)
      << " nrmsae=" << FormatDouble(r.nrmsae)
      << " rmsae=" << FormatDouble(r.rmsae) << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct CompareOptions {
  std::string pid, ann, snn;
  std::string out_path;
};

EvalReport LoadReport(const std::string& path) {
  std::vector<TrajectoryPoint> traj;
  try {
    traj = ParseTrajectoryCsv(ReadFile(path));
  } catch (const FormatError& e) {
    throw UsageError(e.what());
  }
  if (traj.size() < 2) throw UsageError("'" + path + "': trajectory too short");
  const double dt = traj[1].t - traj[0].t;
  return ReportFromTrajectory(std::move(traj), dt);
}

int CmdCompare(const CompareOptions& o, std::ostream& out) {
  const EvalReport pid = LoadReport(o.pid);
  const EvalReport ann = LoadReport(o.ann);
  const EvalReport snn = LoadReport(o.snn);
  std::vector<ComparisonRow> rows;
  try {
    rows = CompareControllers(pid, ann, snn);
  } catch (const FormatError& e) {
    throw UsageError(e.what());
  }
  if (!o.out_path.empty()) WriteFile(o.out_path, ComparisonCsv(rows));
  out << ComparisonTable(rows);
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct GenLogOptions {
  CommonOptions common;
  std::string out_path;
  double duration = 300.0;
  double noise = 0.0;
  int hold_max = 25;
};

int CmdGenLog(const GenLogOptions& o) {
  const RunConfig cfg = ResolveConfig(o.common);
  LogGenerator gen;
  gen.model = cfg.plant();
  gen.duration = o.duration;
  gen.noise_sigma = o.noise;
  gen.hold_max = o.hold_max;
  gen.u_max = cfg.evolution.setup.limits.u_max;
  Rng rng = DeriveRng({o.common.seed.value_or(1)});
  WriteFile(o.out_path, FlightLogToCsv(GenerateLog(gen, rng)));
  return kExitOk;
}

}  // namespace

int CliMain(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"Neuroevolution and closed-loop evaluation of blimp altitude "
               "controllers"};
  app.require_subcommand(1);

  EvolveOptions evolve;
  auto* evolve_cmd = app.add_subcommand("evolve", "Evolve an SNN or ANN controller");
  AddCommon(evolve_cmd, evolve.common);
  evolve_cmd->add_option("--controller", evolve.controller)
      ->check(CLI::IsMember({"snn", "ann"}));
  evolve_cmd->add_option("--out", evolve.out_dir, "Output directory")->required();
  evolve_cmd->add_option("--generations", evolve.generations);
  evolve_cmd->add_option("--pop", evolve.pop);
  evolve_cmd->add_option("--threads", evolve.threads);
  evolve_cmd->add_option("--resume", evolve.resume, "Checkpoint to resume from")
      ->check(CLI::ExistingFile);

  EvalOptions eval;
  auto* eval_cmd = app.add_subcommand("eval", "Track the waypoint plan");
  AddCommon(eval_cmd, eval.common);
  eval_cmd->add_option("--controller", eval.controller)
      ->required()
      ->check(CLI::IsMember({"pid", "ann", "snn", "zero"}));
  eval_cmd->add_option("--genome", eval.genome)->check(CLI::ExistingFile);
  eval_cmd->add_flag("--hybrid,!--no-hybrid", eval.hybrid,
                     "Add the parallel PD term");
  eval_cmd->add_option("--out", eval.out_path, "Trajectory CSV");
  eval_cmd->add_option("--smooth-out", eval.smooth_out,
                       "Moving-average command series for display");
  eval_cmd->add_option("--summary", eval.summary, "Metrics JSON");

  SysidOptions sysid;
  auto* sysid_cmd = app.add_subcommand("sysid", "Fit the plant from a flight log");
  sysid_cmd->add_option("--log", sysid.log)->required()->check(CLI::ExistingFile);
  sysid_cmd->add_option("--out", sysid.out_path, "Fit report JSON");
  sysid_cmd->add_option("--residuals", sysid.residuals, "Residual CSV");

  CompareOptions compare;
  auto* compare_cmd =
      app.add_subcommand("compare", "Compare PID, ANN and SNN trajectories");
  compare_cmd->add_option("--pid", compare.pid)->required()->check(CLI::ExistingFile);
  compare_cmd->add_option("--ann", compare.ann)->required()->check(CLI::ExistingFile);
  compare_cmd->add_option("--snn", compare.snn)->required()->check(CLI::ExistingFile);
  compare_cmd->add_option("--out", compare.out_path, "Comparison CSV");

  GenLogOptions genlog;
  auto* genlog_cmd =
      app.add_subcommand("gen-log", "Write a synthetic flight log for sysid");
  AddCommon(genlog_cmd, genlog.common);
  genlog_cmd->add_option("--out", genlog.out_path)->required();
  genlog_cmd->add_option("--duration", genlog.duration, "Seconds");
  genlog_cmd->add_option("--noise", genlog.noise, "Altitude noise sigma, m");
  genlog_cmd->add_option("--hold-max", genlog.hold_max,
                         "Longest command hold, samples");

  std::vector<const char*> argv;
  argv.push_back("blimp");
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (evolve_cmd->parsed()) return CmdEvolve(evolve, out);
    if (eval_cmd->parsed()) return CmdEval(eval, out, err);
    if (sysid_cmd->parsed()) return CmdSysid(sysid, out);
    if (compare_cmd->parsed()) return CmdCompare(compare, out);
    if (genlog_cmd->parsed()) return CmdGenLog(genlog);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitUsage;
}

}  // namespace blimp
