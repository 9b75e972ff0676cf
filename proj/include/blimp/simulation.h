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

#ifndef BLIMP_SIMULATION_H_
#define BLIMP_SIMULATION_H_

#include <cstddef>
#include <span>
#include <vector>

#include "blimp/controllers.h"
#include "blimp/plant.h"
#include "blimp/rng.h"

namespace blimp {

// A reference altitude held for a fixed time.
struct Segment {
  double setpoint;  // m
  double hold;      // s
  bool operator==(const Segment&) const = default;
};

using Schedule = std::vector<Segment>;

// Samples spent on one segment at sample period dt.
std::size_t StepsFor(const Segment& segment, double dt);
std::size_t TotalSteps(const Schedule& schedule, double dt);

struct TrajectoryPoint {
  double t;
  double h_ref;
  double h_true;
  double h_meas;
  double u_total;
  double u_net;
  double u_pd;
};

struct SensorPath {
  RadarModel radar;
  // Apply the radar's median + moving-average chain to each sample.
  bool filtered = false;
};

struct Rollout {
  std::vector<TrajectoryPoint> points;
  bool failed = false;
  std::size_t failed_step = 0;
};

// Runs the loop sense -> error -> controller -> plant, one sample per dt,
// through every segment in order. The controller and plant are reset at the
// start; controller state carries over between segments. Each logged point
// holds the true altitude the command at that step was computed against.
// A non-finite altitude or command stops the run and marks it failed.
Rollout SimulateClosedLoop(Controller& controller, AltitudeDynamics& plant,
                           const SensorPath& sensor, const Schedule& schedule,
                           double dt, double h0, Rng& rng);

// sqrt(mean((h_ref - h)^2)).
double Rmsae(std::span<const double> h_ref, std::span<const double> h);
double Rmsae(const std::vector<TrajectoryPoint>& points);

}  // namespace blimp

#endif  // BLIMP_SIMULATION_H_
