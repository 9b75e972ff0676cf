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

// Mutation-only evolutionary optimizer for the neurocontrollers.
//
// Each generation: evaluate every individual on one random episode set with
// fresh sensor noise, fold the results into the hall of fame, then breed N
// offspring by tournament selection followed by mutation. There is no
// crossover and no elitism in the breeding population; the hall of fame keeps
// the best individuals ever evaluated.
//
// All randomness is keyed on the run seed. Selection and mutation draw from a
// single sequential stream; each evaluation gets its own stream derived from
// (seed, generation, index), so results do not depend on thread count.

#ifndef BLIMP_EVOLUTION_H_
#define BLIMP_EVOLUTION_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "blimp/controllers.h"
#include "blimp/plant.h"
#include "blimp/rng.h"
#include "blimp/simulation.h"
#include "json.hpp"

namespace blimp {

// Half-widths of the uniform additive perturbation per parameter class.
struct MutationRanges {
  double weight = 2.5;
  double bias = 2.5;
  double threshold = 0.5;
  double alpha = 1.0;
  double tau = 0.5;

  double HalfWidth(ParamClass cls) const;
};

// How random episode sets are drawn.
struct EpisodeSpec {
  int n_setpoints = 10;
  double setpoint_min = 0.0;  // m
  double setpoint_max = 3.0;  // m
  double hold = 15.0;         // s per setpoint
  double h0 = 0.0;            // m

  void Validate() const;
};

Schedule DrawSchedule(const EpisodeSpec& spec, Rng& rng);

// Everything a fitness rollout needs besides the genome.
struct EvaluationSetup {
  PlantModel plant;
  SensorPath sensor;
  ControlLimits limits;
  double h0 = 0.0;
};

struct EvolutionConfig {
  int pop_size = 100;
  int tournament_size = 3;
  double p_mut_individual = 0.4;
  double p_mut_param = 0.6;
  int generations = 300;
  int hof_size = 5;
  int reeval_sets = 5;
  MutationRanges ranges;
  EpisodeSpec episode;
  EvaluationSetup setup;
  std::uint64_t seed = 1;
  int threads = 1;

  void Validate() const;
};

template <class Genome>
struct EvaluatedIndividual {
  Genome genome;
  double fitness = std::numeric_limits<double>::infinity();
  int generation = 0;  // generation in which it was created
  std::uint64_t id = 0;
};

// Orders by fitness, ties by id.
template <class Genome>
bool BetterThan(const EvaluatedIndividual<Genome>& a,
                const EvaluatedIndividual<Genome>& b) {
  if (a.fitness != b.fitness) return a.fitness < b.fitness;
  return a.id < b.id;
}

// Uniform over each parameter's domain.
template <class Genome>
Genome RandomGenome(Rng& rng);

template <class Genome>
std::vector<Genome> InitPopulation(const EvolutionConfig& config, Rng& rng);

// Index of the best of `m` uniform draws with replacement.
template <class Genome>
std::size_t TournamentSelect(
    std::span<const EvaluatedIndividual<Genome>> population, int m, Rng& rng);

struct MutationStats {
  std::uint64_t calls = 0;
  std::uint64_t genomes_touched = 0;
  std::uint64_t params_seen = 0;      // in touched genomes
  std::uint64_t params_perturbed = 0;
};

// With probability p_mut_individual, perturbs each parameter independently
// with probability p_mut_param by U(-r, r) and clamps it to its domain.
template <class Genome>
Genome Mutate(const Genome& genome, const EvolutionConfig& config, Rng& rng,
              MutationStats* stats = nullptr);

// RMSAE of a controller over one schedule on true altitude; +inf if the run
// fails or the result is not finite.
double EvaluateController(Controller& controller, const Schedule& schedule,
                          const EvaluationSetup& setup, Rng& rng);

template <class Genome>
double Evaluate(const Genome& genome, const Schedule& schedule,
                const EvaluationSetup& setup, Rng& rng);

// The `capacity` lowest-fitness individuals ever offered. An identical genome
// is stored once, with its best fitness.
template <class Genome>
class HallOfFame {
 public:
  explicit HallOfFame(std::size_t capacity) : capacity_(capacity) {}

  void Update(std::span<const EvaluatedIndividual<Genome>> individuals);

  const std::vector<EvaluatedIndividual<Genome>>& members() const {
    return members_;
  }
  std::size_t capacity() const { return capacity_; }
  bool empty() const { return members_.empty(); }
  const EvaluatedIndividual<Genome>& best() const { return members_.front(); }

 private:
  std::size_t capacity_;
  std::vector<EvaluatedIndividual<Genome>> members_;  // sorted ascending
};

struct GenerationStats {
  int generation = 0;
  double best = 0.0;  // of this generation's population
  double mean = 0.0;
  double stddev = 0.0;
  std::uint64_t evaluations = 0;  // cumulative
  double hof_best = 0.0;

  bool operator==(const GenerationStats&) const = default;
};

// Full optimizer state between generations; restoring it resumes a run
// exactly.
template <class Genome>
struct EvolutionCheckpoint {
  int next_generation = 0;
  std::vector<EvaluatedIndividual<Genome>> population;  // not yet evaluated
  std::vector<EvaluatedIndividual<Genome>> hof;
  std::string rng_state;
  std::uint64_t next_id = 0;
  std::uint64_t evaluations = 0;
  std::vector<GenerationStats> log;
};

template <class Genome>
struct EvolutionResult {
  std::vector<EvaluatedIndividual<Genome>> hof;
  std::vector<GenerationStats> log;
};

template <class Genome>
struct EvolveHooks {
  // Called after each generation with the state needed to resume.
  std::function<void(const EvolutionCheckpoint<Genome>&)> on_generation;
  const EvolutionCheckpoint<Genome>* resume_from = nullptr;
};

template <class Genome>
EvolutionResult<Genome> Evolve(const EvolutionConfig& config,
                               const EvolveHooks<Genome>& hooks = {});

// Each member's fitness becomes its mean RMSAE over the given schedules;
// sorted ascending, ties by id. Noise streams are keyed on (noise_seed, member
// id, set index), so the ranking does not depend on input order.
template <class Genome>
std::vector<EvaluatedIndividual<Genome>> ReevaluateOn(
    std::span<const EvaluatedIndividual<Genome>> members,
    std::span<const Schedule> schedules, const EvaluationSetup& setup,
    std::uint64_t noise_seed);

// Draws `n_sets` fresh schedules and a noise seed from `rng`, then calls
// ReevaluateOn.
template <class Genome>
std::vector<EvaluatedIndividual<Genome>> ReevaluateHof(
    std::span<const EvaluatedIndividual<Genome>> hof, int n_sets,
    const EpisodeSpec& episode, const EvaluationSetup& setup, Rng& rng);

// Checkpoint and hall-of-fame files.
template <class Genome>
nlohmann::json ToJson(const EvolutionCheckpoint<Genome>& ckpt);
template <class Genome>
EvolutionCheckpoint<Genome> CheckpointFromJson(const nlohmann::json& j);
template <class Genome>
nlohmann::json HofToJson(std::span<const EvaluatedIndividual<Genome>> hof);
template <class Genome>
std::vector<EvaluatedIndividual<Genome>> HofFromJson(const nlohmann::json& j);

// generation,best,mean,std,evaluations,hof_best
std::string GenerationLogCsv(std::span<const GenerationStats> log);

}  // namespace blimp

#endif  // BLIMP_EVOLUTION_H_
