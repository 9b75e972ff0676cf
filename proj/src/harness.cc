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

#include "blimp/harness.h"

#include <cmath>
#include <cstdio>
#include <numeric>

#include "blimp/errors.h"
#include "blimp/text.h"

namespace blimp {
namespace {

constexpr const char* kTrajectoryHeader = "t,h_ref,h_true,h_meas,u_total,u_net,u_pd";

double SumAbs(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += std::abs(x);
  return s;
}

std::vector<double> Column(const std::vector<TrajectoryPoint>& traj,
                           double TrajectoryPoint::*field) {
  std::vector<double> out;
  out.reserve(traj.size());
  for (const auto& p : traj) out.push_back(p.*field);
  return out;
}

void FillMetrics(EvalReport& r) {
  if (r.trajectory.empty()) return;
  r.rmsae = Rmsae(r.trajectory);
  const auto total = Column(r.trajectory, &TrajectoryPoint::u_total);
  const auto net = Column(r.trajectory, &TrajectoryPoint::u_net);
  const auto pd = Column(r.trajectory, &TrajectoryPoint::u_pd);
  r.effort = SumAbs(total);
  r.pd_fraction = SumAbs(pd) == 0.0 ? 0.0 : PdFraction(net, pd);
}

}  // namespace

Schedule DefaultWaypointPlan() {
  return {{3.0, 60.0}, {2.0, 60.0}, {1.0, 60.0}, {2.5, 60.0}, {1.5, 60.0}};
}

void ValidatePlan(const Schedule& plan) {
  if (plan.empty()) throw FormatError("plan: no waypoints");
  for (const Segment& s : plan) {
    if (!(s.setpoint >= 0.0) || !std::isfinite(s.setpoint)) {
      throw FormatError("plan: setpoints must be >= 0");
    }
    if (!(s.hold > 0.0) || !std::isfinite(s.hold)) {
      throw FormatError("plan: holds must be positive");
    }
  }
}

EvalReport RunWaypointEval(Controller& controller, AltitudeDynamics& plant,
                           const SensorPath& sensor, const Schedule& plan,
                           double dt, std::uint64_t seed) {
  ValidatePlan(plan);
  Rng rng = DeriveRng({seed});
  Rollout run =
      SimulateClosedLoop(controller, plant, sensor, plan, dt, 0.0, rng);
  EvalReport r;
  r.plan = plan;
  r.dt = dt;
  r.failed = run.failed;
  r.failed_step = run.failed_step;
  r.trajectory = std::move(run.points);
  if (!r.failed) FillMetrics(r);
  return r;
}

EvalReport ReportFromTrajectory(std::vector<TrajectoryPoint> trajectory,
                                double dt) {
  EvalReport r;
  r.dt = dt;
  for (const auto& p : trajectory) {
    if (r.plan.empty() || r.plan.back().setpoint != p.h_ref) {
      r.plan.push_back({p.h_ref, 0.0});
    }
    r.plan.back().hold += dt;
  }
  r.trajectory = std::move(trajectory);
  FillMetrics(r);
  return r;
}

double ControlEffortRatio(std::span<const double> u_test,
                          std::span<const double> u_ref) {
  if (u_test.empty() || u_ref.empty()) {
    throw FormatError("effort ratio: empty series");
  }
  const double den = SumAbs(u_ref);
  if (den == 0.0) throw ZeroDenominatorError("effort ratio: reference is zero");
  return 100.0 * SumAbs(u_test) / den;
}

double PdFraction(std::span<const double> u_net, std::span<const double> u_pd) {
  if (u_net.size() != u_pd.size()) {
    throw FormatError("pd fraction: series lengths differ");
  }
  const double pd = SumAbs(u_pd);
  const double den = SumAbs(u_net) + pd;
  if (den == 0.0) throw ZeroDenominatorError("pd fraction: no command");
  return 100.0 * pd / den;
}

std::vector<double> MovingAverage(std::span<const double> series,
                                  std::size_t window) {
  if (window == 0) window = 1;
  std::vector<double> out(series.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < series.size(); ++i) {
    acc += series[i];
    if (i >= window) acc -= series[i - window];
    out[i] = acc / static_cast<double>(std::min(i + 1, window));
  }
  return out;
}

std::string TrajectoryCsv(const std::vector<TrajectoryPoint>& traj) {
  std::string out = std::string(kTrajectoryHeader) + '\n';
  for (const auto& p : traj) {
    out += FormatDouble(p.t) + ',' + FormatDouble(p.h_ref) + ',' +
           FormatDouble(p.h_true) + ',' + FormatDouble(p.h_meas) + ',' +
           FormatDouble(p.u_total) + ',' + FormatDouble(p.u_net) + ',' +
           FormatDouble(p.u_pd) + '\n';
  }
  return out;
}

std::vector<TrajectoryPoint> ParseTrajectoryCsv(const std::string& csv) {
  const auto lines = DataLines(csv);
  if (lines.empty() || lines[0] != kTrajectoryHeader) {
    throw FormatError(std::string("trajectory: header must be '") +
                      kTrajectoryHeader + "'");
  }
  std::vector<TrajectoryPoint> traj;
  traj.reserve(lines.size() - 1);
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto f = SplitFields(lines[i], ',');
    if (f.size() != 7) {
      throw FormatError("trajectory: expected 7 fields in row " +
                        std::to_string(i));
    }
    traj.push_back({ParseDouble(f[0]), ParseDouble(f[1]), ParseDouble(f[2]),
                    ParseDouble(f[3]), ParseDouble(f[4]), ParseDouble(f[5]),
                    ParseDouble(f[6])});
  }
  return traj;
}

std::vector<ComparisonRow> CompareControllers(const EvalReport& pid,
                                              const EvalReport& ann,
                                              const EvalReport& snn) {
  for (const EvalReport* r : {&ann, &snn}) {
    bool same = r->dt == pid.dt && r->trajectory.size() == pid.trajectory.size();
    for (std::size_t i = 0; same && i < pid.trajectory.size(); ++i) {
      same = r->trajectory[i].t == pid.trajectory[i].t &&
             r->trajectory[i].h_ref == pid.trajectory[i].h_ref;
    }
    if (!same) throw FormatError("compare: reports use different plans");
  }
  for (const EvalReport* r : {&pid, &ann, &snn}) {
    if (r->failed) throw FormatError("compare: a report is from a failed run");
  }
  const auto pid_u = Column(pid.trajectory, &TrajectoryPoint::u_total);
  auto row = [&](const char* name, const EvalReport& r) {
    return ComparisonRow{
        name, r.rmsae,
        ControlEffortRatio(Column(r.trajectory, &TrajectoryPoint::u_total),
                           pid_u),
        r.pd_fraction};
  };
  return {row("PID", pid), row("ANN", ann), row("SNN", snn)};
}

std::string ComparisonCsv(const std::vector<ComparisonRow>& rows) {
  std::string out = "controller,rmsae,effort_ratio,pd_fraction\n";
  for (const auto& r : rows) {
    out += r.controller + ',' + FormatDouble(r.rmsae) + ',' +
           FormatDouble(r.effort_ratio) + ',' + FormatDouble(r.pd_fraction) +
           '\n';
  }
  return out;
}

std::string ComparisonTable(const std::vector<ComparisonRow>& rows) {
  std::string out;
  char buf[128];
  std::snprintf(buf, sizeof(buf), "%-10s %10s %12s %12s\n", "controller",
                "rmsae[m]", "effort[%]", "pd[%]");
  out += buf;
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof(buf), "%-10s %10.4f %12.2f %12.2f\n",
                  r.controller.c_str(), r.rmsae, r.effort_ratio, r.pd_fraction);
    out += buf;
  }
  return out;
}

}  // namespace blimp
