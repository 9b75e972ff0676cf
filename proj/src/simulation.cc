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

#include "blimp/simulation.h"

#include <cmath>
#include <optional>

#include "blimp/errors.h"

namespace blimp {

std::size_t StepsFor(const Segment& segment, double dt) {
  return static_cast<std::size_t>(std::llround(segment.hold / dt));
}

std::size_t TotalSteps(const Schedule& schedule, double dt) {
  std::size_t n = 0;
  for (const Segment& s : schedule) n += StepsFor(s, dt);
  return n;
}

Rollout SimulateClosedLoop(Controller& controller, AltitudeDynamics& plant,
                           const SensorPath& sensor, const Schedule& schedule,
                           double dt, double h0, Rng& rng) {
  Rollout out;
  out.points.reserve(TotalSteps(schedule, dt));
  controller.Reset();
  std::optional<MeasurementFilter> filter;
  if (sensor.filtered) filter.emplace(sensor.radar);

  double h = plant.Reset(h0);
  std::size_t k = 0;
  for (const Segment& segment : schedule) {
    const std::size_t n = StepsFor(segment, dt);
    for (std::size_t i = 0; i < n; ++i, ++k) {
      if (!std::isfinite(h)) {
        out.failed = true;
        out.failed_step = k;
        return out;
      }
      double meas = Sense(sensor.radar, h, rng);
      if (filter) meas = filter->Filter(meas);
      const ControlOutput u = controller.Step(segment.setpoint - meas);
      out.points.push_back({static_cast<double>(k) * dt, segment.setpoint, h,
                            meas, u.total, u.net, u.pd});
      try {
        h = plant.Step(u.total);
      } catch (const StateCorruptionError&) {
        out.failed = true;
        out.failed_step = k;
        return out;
      }
    }
  }
  return out;
}

double Rmsae(std::span<const double> h_ref, std::span<const double> h) {
  if (h_ref.size() != h.size() || h.empty()) {
    throw FormatError("rmsae: series must be non-empty and of equal length");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < h.size(); ++i) {
    const double e = h_ref[i] - h[i];
    sum += e * e;
  }
  return std::sqrt(sum / static_cast<double>(h.size()));
}

double Rmsae(const std::vector<TrajectoryPoint>& points) {
  if (points.empty()) throw FormatError("rmsae: empty trajectory");
  double sum = 0.0;
  for (const TrajectoryPoint& p : points) {
    const double e = p.h_ref - p.h_true;
    sum += e * e;
  }
  return std::sqrt(sum / static_cast<double>(points.size()));
}

}  // namespace blimp
