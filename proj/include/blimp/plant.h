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

#ifndef BLIMP_PLANT_H_
#define BLIMP_PLANT_H_

#include <cstddef>
#include <deque>

#include "blimp/rng.h"

namespace blimp {

// Second-order discrete transfer function from motor voltage to altitude:
//
//   h_k = (a1 z^-1 + a2 z^-2) / (1 + d1 z^-1 + d2 z^-2) u_k
//
// There is no z^0 numerator term, so a command first shows up in the
// altitude one step after it is issued.
struct PlantModel {
  double a1 = -0.969e-3;  // m / (V step^2)
  double a2 = 1.019e-3;
  double d1 = -1.99;
  double d2 = 0.99;
  double dt = 0.2;  // s

  // Coefficients identified from flight data.
  static PlantModel Fitted() { return PlantModel{}; }
  // Euler double integrator with the fitted numerator.
  static PlantModel Theoretical() {
    PlantModel m;
    m.d1 = -2.0;
    m.d2 = 1.0;
    return m;
  }

  // Throws FormatError unless dt > 0 and every coefficient is finite.
  void Validate() const;

  bool operator==(const PlantModel&) const = default;
};

// Histories needed to produce the next altitude. With the command at step k
// entering the output directly as u_{k-1} of h_{k+1}, only one past command
// has to be carried.
struct PlantState {
  double h_prev1 = 0.0;
  double h_prev2 = 0.0;
  double u_prev1 = 0.0;

  static PlantState AtRest(double h0) { return {h0, h0, 0.0}; }

  bool operator==(const PlantState&) const = default;
};

struct PlantStep {
  PlantState state;
  double altitude;
};

// Advances the difference equation by one sample. `u` is the command issued
// at step k and the returned altitude is h_{k+1}:
//
//   h_{k+1} = -d1 h_k - d2 h_{k-1} + a1 u_k + a2 u_{k-1}
// Throws StateCorruptionError on non-finite state or command.
PlantStep StepPlant(const PlantModel& model, const PlantState& state, double u);

// Radar observation model: additive Gaussian noise, optional quantization,
// and an optional median + moving-average filter chain.
struct RadarModel {
  double noise_sigma = 0.0667;  // m
  double quantization = 0.0;    // m, 0 disables
  int median_window = 1;        // odd
  int avg_window = 1;

  void Validate() const;
};

// Rounds to the nearest multiple of `step`, ties away from zero. step <= 0 is
// the identity.
double Quantize(double value, double step);

// quantize(true_h + N(0, sigma^2)). Consumes exactly one standard normal
// variate from `rng` regardless of sigma.
double Sense(const RadarModel& radar, double true_h, Rng& rng);

// Median filter followed by a moving average over the median outputs. Windows
// shrink to the available history during warm-up.
class MeasurementFilter {
 public:
  explicit MeasurementFilter(const RadarModel& radar);

  double Filter(double raw);
  void Reset();

 private:
  std::size_t median_window_;
  std::size_t avg_window_;
  std::deque<double> raw_;
  std::deque<double> medians_;
};

// Anything the closed loop can drive with a motor command.
class AltitudeDynamics {
 public:
  virtual ~AltitudeDynamics() = default;
  // Starts an episode and returns the initial true altitude.
  virtual double Reset(double h0) = 0;
  // Applies the command issued at the current step, returns the next altitude.
  virtual double Step(double u) = 0;
};

class DiscretePlant final : public AltitudeDynamics {
 public:
  explicit DiscretePlant(const PlantModel& model);

  double Reset(double h0) override;
  double Step(double u) override;

  const PlantModel& model() const { return model_; }
  const PlantState& state() const { return state_; }

 private:
  PlantModel model_;
  PlantState state_;
};

}  // namespace blimp

#endif  // BLIMP_PLANT_H_
