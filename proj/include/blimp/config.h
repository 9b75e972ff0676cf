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

// Experiment configuration. INI-style file:
//
//   [plant]            a1 a2 d1 d2 dt
//   [radar]            noise_sigma quantization median_window avg_window filtered
//   [controller]       u_max
//   [controller.pid]   kp ki kd mode
//   [controller.ann]   kp kd hybrid
//   [controller.snn]   kp kd hybrid
//   [evolution]        pop_size tournament_size p_mut_individual p_mut_param
//                      generations hof_size reeval_sets threads seed
//                      mut_weight mut_bias mut_threshold mut_alpha mut_tau
//   [episode]          n_setpoints setpoint_min setpoint_max hold
//   [eval]             waypoints hold seed smooth_window
//
// Every key is optional; unknown sections or keys are rejected.

#ifndef BLIMP_CONFIG_H_
#define BLIMP_CONFIG_H_

#include <cstdint>
#include <string>
#include <vector>

#include "blimp/controllers.h"
#include "blimp/evolution.h"
#include "blimp/plant.h"
#include "blimp/simulation.h"

namespace blimp {

struct NetworkEvalConfig {
  PdGains pd;
  bool hybrid = false;
};

struct RunConfig {
  EvolutionConfig evolution;  // holds plant, radar and limits in `setup`
  PidParams pid;
  NetworkEvalConfig ann{{1.3, 0.4}, false};
  NetworkEvalConfig snn{{1.4, 0.3}, false};
  Schedule plan;
  std::uint64_t eval_seed = 1;
  std::size_t smooth_window = 5;

  RunConfig();

  const PlantModel& plant() const { return evolution.setup.plant; }
  PlantModel& plant() { return evolution.setup.plant; }
  void Validate() const;
};

// `text` is the file content; each override is "section.key=value" and is
// applied after the file. Throws FormatError.
RunConfig ParseConfig(const std::string& text,
                      const std::vector<std::string>& overrides = {});
RunConfig LoadConfig(const std::string& path,
                     const std::vector<std::string>& overrides = {});

}  // namespace blimp

#endif  // BLIMP_CONFIG_H_
