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

// Identification of the altitude transfer function from flight logs.

#ifndef BLIMP_SYSID_H_
#define BLIMP_SYSID_H_

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "blimp/plant.h"
#include "blimp/rng.h"
#include "json.hpp"

namespace blimp {

// Row k holds the command issued at t_k and the altitude measured at t_k.
struct FlightLog {
  std::vector<double> t;  // s
  std::vector<double> u;  // V
  std::vector<double> h;  // m

  std::size_t size() const { return t.size(); }
  // Median sample spacing.
  double SamplePeriod() const;
  // Equal column lengths, >= 2 rows, finite values, strictly increasing t,
  // every spacing within 10% of the median. Throws FormatError.
  void Validate() const;
};

// CSV with header `t,u,h`; '#' lines are comments.
FlightLog ParseFlightLog(const std::string& csv);
FlightLog LoadFlightLog(const std::string& path);
std::string FlightLogToCsv(const FlightLog& log);

// sqrt(sum (obs - pred)^2 / sum obs^2). Throws ZeroDenominatorError when obs
// is all zero.
double Nrmsae(std::span<const double> pred, std::span<const double> obs);

// Free-run response to `u` from the first two samples of `h_init`: the
// output starts with those two values and continues from the model alone.
std::vector<double> FreeRun(const PlantModel& model, std::span<const double> u,
                            double h_first, double h_second);

struct FitOptions {
  int max_iterations = 4000;
  int restarts = 3;
  double initial_step = 1e-2;  // relative to each coefficient
};

struct FitReport {
  PlantModel model;
  double nrmsae = 0.0;         // free-run, on the mean-subtracted altitude
  double rmsae = 0.0;          // m, same run
  double stage1_nrmsae = 0.0;  // equation-error least squares
  double h_mean = 0.0;         // subtracted before fitting
  double h_first = 0.0;        // estimated initial free-run states,
  double h_second = 0.0;       // mean-subtracted
  std::vector<double> predicted;  // mean-subtracted
  std::vector<double> residuals;  // observed - predicted
};

// Equation-error least squares for (a1, a2, d1, d2) on the mean-subtracted
// log, refined by Nelder-Mead on the free-run NRMSAE (jointly with the two
// initial states of the free run). Never worse than the least-squares start,
// which is scored from the first two logged samples. Needs >= 50 samples.
// Throws DegenerateDataError if the regression is rank deficient.
FitReport FitModel(const FlightLog& log, const FitOptions& options = {});

// How the two initial states of a validation free run are obtained.
enum class InitialState {
  kFirstSamples,  // the log's first two altitudes, taken as exact
  kEstimated,     // least-squares fit given the model and the commands
};

// Least-squares (h_first, h_second) for a free run of `model` under `u`
// matching `h`. Exact on noiseless data from the model.
std::pair<double, double> EstimateInitialState(const PlantModel& model,
                                               std::span<const double> u,
                                               std::span<const double> h);

// Free-run RMSAE of `model` under the log's commands against the raw logged
// altitude. Two noisy first samples fix the initial slope badly enough to
// swamp the error of a near-integrating model, hence the estimated default.
double ValidateModel(const PlantModel& model, const FlightLog& log,
                     InitialState init = InitialState::kEstimated);

// Synthetic excitation: piecewise-constant random commands in [-u_max, u_max]
// held for a random 1..hold_max samples, plant simulated from rest, altitude
// observed with optional Gaussian noise.
struct LogGenerator {
  PlantModel model;
  double duration = 300.0;  // s
  double u_max = 3.3;
  int hold_max = 25;        // samples
  double noise_sigma = 0.0;
  double h0 = 0.0;
};

FlightLog GenerateLog(const LogGenerator& gen, Rng& rng);

nlohmann::json FitReportToJson(const FitReport& report);
// t,h_obs,h_model,residual (altitudes mean-subtracted).
std::string ResidualCsv(const FitReport& report, const FlightLog& log);

}  // namespace blimp

#endif  // BLIMP_SYSID_H_
