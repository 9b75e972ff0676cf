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

#include "blimp/plant.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "blimp/errors.h"

namespace blimp {

void PlantModel::Validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) {
    throw FormatError("plant: dt must be positive, got " + std::to_string(dt));
  }
  for (double c : {a1, a2, d1, d2}) {
    if (!std::isfinite(c)) throw FormatError("plant: non-finite coefficient");
  }
}

PlantStep StepPlant(const PlantModel& model, const PlantState& state,
                    double u) {
  if (!std::isfinite(u) || !std::isfinite(state.h_prev1) ||
      !std::isfinite(state.h_prev2) || !std::isfinite(state.u_prev1)) {
    throw StateCorruptionError("plant: non-finite state or command");
  }
  const double h = -model.d1 * state.h_prev1 - model.d2 * state.h_prev2 +
                   model.a1 * u + model.a2 * state.u_prev1;
  if (!std::isfinite(h)) {
    throw StateCorruptionError("plant: altitude diverged");
  }
  return {PlantState{h, state.h_prev1, u}, h};
}

void RadarModel::Validate() const {
  if (!(noise_sigma >= 0.0) || !std::isfinite(noise_sigma)) {
    throw FormatError("radar: noise_sigma must be >= 0");
  }
  if (!(quantization >= 0.0) || !std::isfinite(quantization)) {
    throw FormatError("radar: quantization must be >= 0");
  }
  if (median_window < 1 || median_window % 2 == 0) {
    throw FormatError("radar: median_window must be odd and >= 1");
  }
  if (avg_window < 1) throw FormatError("radar: avg_window must be >= 1");
}

double Quantize(double value, double step) {
  if (!(step > 0.0)) return value;
  // std::round already rounds halves away from zero.
  return std::round(value / step) * step;
}

double Sense(const RadarModel& radar, double true_h, Rng& rng) {
  const double z = std::normal_distribution<double>(0.0, 1.0)(rng);
  return Quantize(true_h + radar.noise_sigma * z, radar.quantization);
}

MeasurementFilter::MeasurementFilter(const RadarModel& radar)
    : median_window_(static_cast<std::size_t>(std::max(1, radar.median_window))),
      avg_window_(static_cast<std::size_t>(std::max(1, radar.avg_window))) {}

double MeasurementFilter::Filter(double raw) {
  raw_.push_back(raw);
  if (raw_.size() > median_window_) raw_.pop_front();

  std::vector<double> window(raw_.begin(), raw_.end());
  const std::size_t mid = window.size() / 2;
  std::nth_element(window.begin(), window.begin() + mid, window.end());
  double median = window[mid];
  if (window.size() % 2 == 0) {
    // Only reachable during warm-up of an odd window.
    const double lower =
        *std::max_element(window.begin(), window.begin() + mid);
    median = 0.5 * (lower + median);
  }

  medians_.push_back(median);
  if (medians_.size() > avg_window_) medians_.pop_front();
  return std::accumulate(medians_.begin(), medians_.end(), 0.0) /
         static_cast<double>(medians_.size());
}

void MeasurementFilter::Reset() {
  raw_.clear();
  medians_.clear();
}

DiscretePlant::DiscretePlant(const PlantModel& model) : model_(model) {
  model_.Validate();
}

double DiscretePlant::Reset(double h0) {
  state_ = PlantState::AtRest(h0);
  return h0;
}

double DiscretePlant::Step(double u) {
  PlantStep next = StepPlant(model_, state_, u);
  state_ = next.state;
  return next.altitude;
}

}  // namespace blimp
