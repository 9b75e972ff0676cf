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

#ifndef BLIMP_HARNESS_H_
#define BLIMP_HARNESS_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "blimp/controllers.h"
#include "blimp/plant.h"
#include "blimp/simulation.h"

namespace blimp {

// Waypoints {3, 2, 1, 2.5, 1.5} m, each held 60 s.
Schedule DefaultWaypointPlan();
void ValidatePlan(const Schedule& plan);

struct EvalReport {
  Schedule plan;
  double dt = 0.2;
  std::vector<TrajectoryPoint> trajectory;
  double rmsae = 0.0;        // m, on true altitude
  double effort = 0.0;       // sum |u_total|, V
  double pd_fraction = 0.0;  // %
  bool failed = false;
  std::size_t failed_step = 0;
};

// Always outputs 0 V. Baseline for tracking comparisons.
class ZeroController final : public Controller {
 public:
  ControlOutput Step(double) override { return {}; }
  void Reset() override {}
  std::unique_ptr<Controller> Clone() const override {
    return std::make_unique<ZeroController>();
  }
};

// Runs `plan` from h0 = 0 at the plant's sample period with sensor noise drawn
// from `seed`.
EvalReport RunWaypointEval(Controller& controller, AltitudeDynamics& plant,
                           const SensorPath& sensor, const Schedule& plan,
                           double dt, std::uint64_t seed);

// Metrics recomputed from a logged trajectory.
EvalReport ReportFromTrajectory(std::vector<TrajectoryPoint> trajectory,
                                double dt);

// 100 * sum|u_test| / sum|u_ref|.
double ControlEffortRatio(std::span<const double> u_test,
                          std::span<const double> u_ref);

// Share of the parallel PD term in the total commanded magnitude,
// 100 * sum|u_pd| / (sum|u_net| + sum|u_pd|).
double PdFraction(std::span<const double> u_net, std::span<const double> u_pd);

// Trailing moving average for display; the input is left untouched.
std::vector<double> MovingAverage(std::span<const double> series,
                                  std::size_t window);

// t,h_ref,h_true,h_meas,u_total,u_net,u_pd
std::string TrajectoryCsv(const std::vector<TrajectoryPoint>& trajectory);
std::vector<TrajectoryPoint> ParseTrajectoryCsv(const std::string& csv);

struct ComparisonRow {
  std::string controller;
  double rmsae;
  double effort_ratio;  // % of PID
  double pd_fraction;
};

// Rows in the order PID, ANN, SNN. Throws FormatError unless the three
// reports ran the same plan at the same sample period.
std::vector<ComparisonRow> CompareControllers(const EvalReport& pid,
                                              const EvalReport& ann,
                                              const EvalReport& snn);
std::string ComparisonCsv(const std::vector<ComparisonRow>& rows);
std::string ComparisonTable(const std::vector<ComparisonRow>& rows);

}  // namespace blimp

#endif  // BLIMP_HARNESS_H_
