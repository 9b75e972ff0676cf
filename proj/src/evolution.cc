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

#include "blimp/evolution.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <sstream>
#include <thread>

#include "blimp/errors.h"
#include "blimp/genome_io.h"
#include "blimp/text.h"

namespace blimp {
namespace {

// Stream tags mixed into DeriveRng keys.
constexpr std::uint64_t kMainStream = 0x6d61696e;      // "main"
constexpr std::uint64_t kScheduleStream = 0x73636864;  // "schd"
constexpr std::uint64_t kEvalStream = 0x6576616c;      // "eval"

std::unique_ptr<Controller> MakeController(const SnnGenome& g,
                                           const ControlLimits& limits) {
  return std::make_unique<SnnController>(g, limits);
}

std::unique_ptr<Controller> MakeController(const AnnGenome& g,
                                           const ControlLimits& limits) {
  return std::make_unique<AnnController>(g, limits);
}

nlohmann::json NumberOrNull(double v) {
  if (std::isfinite(v)) return v;
  return nullptr;
}

double NumberOrInf(const nlohmann::json& j) {
  if (j.is_null()) return std::numeric_limits<double>::infinity();
  return j.get<double>();
}

template <class Genome>
nlohmann::json IndividualToJson(const EvaluatedIndividual<Genome>& ind) {
  return {{"id", ind.id},
          {"generation", ind.generation},
          {"fitness", NumberOrNull(ind.fitness)},
          {"genome", ToJson(ind.genome)}};
}

template <class Genome>
EvaluatedIndividual<Genome> IndividualFromJson(const nlohmann::json& j) {
  EvaluatedIndividual<Genome> ind;
  ind.id = j.at("id").get<std::uint64_t>();
  ind.generation = j.at("generation").get<int>();
  ind.fitness = NumberOrInf(j.at("fitness"));
  ind.genome = GenomeFromJson<Genome>(j.at("genome"));
  return ind;
}

// Runs fn(i) for i in [0, n) on up to `threads` workers.
template <class Fn>
void ParallelFor(std::size_t n, int threads, Fn&& fn) {
  const std::size_t workers =
      std::min<std::size_t>(n, static_cast<std::size_t>(std::max(1, threads)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) fn(i);
    });
  }
}

}  // namespace

double MutationRanges::HalfWidth(ParamClass cls) const {
  switch (cls) {
    case ParamClass::kWeight:
      return weight;
    case ParamClass::kBias:
      return bias;
    case ParamClass::kThreshold:
      return threshold;
    case ParamClass::kAlpha:
      return alpha;
    case ParamClass::kTau:
      return tau;
  }
  return 0.0;
}

void EpisodeSpec::Validate() const {
  if (n_setpoints < 1) throw FormatError("episode: n_setpoints must be >= 1");
  if (!(hold > 0.0)) throw FormatError("episode: hold must be positive");
  if (!(setpoint_min <= setpoint_max) || !std::isfinite(setpoint_min) ||
      !std::isfinite(setpoint_max)) {
    throw FormatError("episode: invalid setpoint range");
  }
}

Schedule DrawSchedule(const EpisodeSpec& spec, Rng& rng) {
  Schedule s;
  s.reserve(static_cast<std::size_t>(spec.n_setpoints));
  for (int i = 0; i < spec.n_setpoints; ++i) {
    s.push_back({Uniform(rng, spec.setpoint_min, spec.setpoint_max), spec.hold});
  }
  return s;
}

void EvolutionConfig::Validate() const {
  if (tournament_size < 1 || pop_size < tournament_size) {
    throw FormatError("evolution: need pop_size >= tournament_size >= 1");
  }
  for (double p : {p_mut_individual, p_mut_param}) {
    if (!(p >= 0.0 && p <= 1.0)) {
      throw FormatError("evolution: probabilities must be in [0, 1]");
    }
  }
  if (hof_size < 1) throw FormatError("evolution: hof_size must be >= 1");
  if (generations < 1) throw FormatError("evolution: generations must be >= 1");
  if (reeval_sets < 1) throw FormatError("evolution: reeval_sets must be >= 1");
  if (threads < 1) throw FormatError("evolution: threads must be >= 1");
  episode.Validate();
  setup.plant.Validate();
  setup.sensor.radar.Validate();
  setup.limits.Validate();
}

template <class Genome>
Genome RandomGenome(Rng& rng) {
  Genome g;
  g.ForEachParam([&](ParamClass cls, double& v) {
    const ParamDomain d = DomainOf(cls);
    v = Uniform(rng, d.lo, d.hi);
  });
  return g;
}

template <class Genome>
std::vector<Genome> InitPopulation(const EvolutionConfig& config, Rng& rng) {
  std::vector<Genome> pop;
  pop.reserve(static_cast<std::size_t>(config.pop_size));
  for (int i = 0; i < config.pop_size; ++i) pop.push_back(RandomGenome<Genome>(rng));
  return pop;
}

template <class Genome>
std::size_t TournamentSelect(
    std::span<const EvaluatedIndividual<Genome>> population, int m, Rng& rng) {
  if (population.empty()) throw FormatError("tournament: empty population");
  std::uniform_int_distribution<std::size_t> pick(0, population.size() - 1);
  std::size_t best = pick(rng);
  for (int i = 1; i < m; ++i) {
    const std::size_t cand = pick(rng);
    if (BetterThan(population[cand], population[best])) best = cand;
  }
  return best;
}

template <class Genome>
Genome Mutate(const Genome& genome, const EvolutionConfig& config, Rng& rng,
              MutationStats* stats) {
  if (stats) ++stats->calls;
  Genome out = genome;
  if (!(Uniform(rng, 0.0, 1.0) < config.p_mut_individual)) return out;
  if (stats) ++stats->genomes_touched;
  out.ForEachParam([&](ParamClass cls, double& v) {
    if (stats) ++stats->params_seen;
    if (!(Uniform(rng, 0.0, 1.0) < config.p_mut_param)) return;
    if (stats) ++stats->params_perturbed;
    const double r = config.ranges.HalfWidth(cls);
    const ParamDomain d = DomainOf(cls);
    v = std::clamp(v + Uniform(rng, -r, r), d.lo, d.hi);
  });
  return out;
}

double EvaluateController(Controller& controller, const Schedule& schedule,
                          const EvaluationSetup& setup, Rng& rng) {
  DiscretePlant plant(setup.plant);
  const Rollout r = SimulateClosedLoop(controller, plant, setup.sensor, schedule,
                                       setup.plant.dt, setup.h0, rng);
  if (r.failed || r.points.empty()) {
    return std::numeric_limits<double>::infinity();
  }
  const double f = Rmsae(r.points);
  return std::isfinite(f) ? f : std::numeric_limits<double>::infinity();
}

template <class Genome>
double Evaluate(const Genome& genome, const Schedule& schedule,
                const EvaluationSetup& setup, Rng& rng) {
  auto controller = MakeController(genome, setup.limits);
  return EvaluateController(*controller, schedule, setup, rng);
}

template <class Genome>
void HallOfFame<Genome>::Update(
    std::span<const EvaluatedIndividual<Genome>> individuals) {
  for (const auto& ind : individuals) {
    auto same = std::find_if(members_.begin(), members_.end(), [&](const auto& m) {
      return m.genome == ind.genome;
    });
    if (same != members_.end()) {
      if (!BetterThan(ind, *same)) continue;
      members_.erase(same);
    } else if (members_.size() >= capacity_ &&
               !BetterThan(ind, members_.back())) {
      continue;
    }
    auto pos = std::upper_bound(members_.begin(), members_.end(), ind,
                                [](const auto& a, const auto& b) {
                                  return BetterThan(a, b);
                                });
    members_.insert(pos, ind);
    if (members_.size() > capacity_) members_.pop_back();
  }
}

template <class Genome>
EvolutionResult<Genome> Evolve(const EvolutionConfig& config,
                               const EvolveHooks<Genome>& hooks) {
  config.Validate();
  const auto n = static_cast<std::size_t>(config.pop_size);

  Rng rng = DeriveRng({config.seed, kMainStream});
  HallOfFame<Genome> hof(static_cast<std::size_t>(config.hof_size));
  std::vector<EvaluatedIndividual<Genome>> population;
  std::vector<GenerationStats> log;
  std::uint64_t next_id = 0;
  std::uint64_t evaluations = 0;
  int start = 0;

  if (hooks.resume_from) {
    const auto& ck = *hooks.resume_from;
    start = ck.next_generation;
    population = ck.population;
    hof.Update(ck.hof);
    std::istringstream(ck.rng_state) >> rng;
    next_id = ck.next_id;
    evaluations = ck.evaluations;
    log = ck.log;
    if (population.size() != n) {
      throw FormatError("checkpoint population size does not match config");
    }
  } else {
    for (Genome& g : InitPopulation<Genome>(config, rng)) {
      population.push_back({std::move(g), 0.0, 0, next_id++});
    }
  }

  for (int gen = start; gen < config.generations; ++gen) {
    const auto ug = static_cast<std::uint64_t>(gen);
    Rng schedule_rng = DeriveRng({config.seed, kScheduleStream, ug});
    const Schedule schedule = DrawSchedule(config.episode, schedule_rng);

    ParallelFor(n, config.threads, [&](std::size_t i) {
      Rng eval_rng = DeriveRng({config.seed, kEvalStream, ug, i});
      population[i].fitness =
          Evaluate(population[i].genome, schedule, config.setup, eval_rng);
    });
    evaluations += n;
    hof.Update(population);

    GenerationStats st;
    st.generation = gen;
    st.evaluations = evaluations;
    st.best = std::numeric_limits<double>::infinity();
    double sum = 0.0;
    for (const auto& ind : population) {
      st.best = std::min(st.best, ind.fitness);
      sum += ind.fitness;
    }
    st.mean = sum / static_cast<double>(n);
    double var = 0.0;
    for (const auto& ind : population) {
      var += (ind.fitness - st.mean) * (ind.fitness - st.mean);
    }
    st.stddev = std::sqrt(var / static_cast<double>(n));
    st.hof_best = hof.best().fitness;
    log.push_back(st);

    // Bred even after the last generation so a finished run can be extended
    // from its checkpoint.
    std::vector<EvaluatedIndividual<Genome>> offspring;
    offspring.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t parent =
          TournamentSelect<Genome>(population, config.tournament_size, rng);
      offspring.push_back({Mutate(population[parent].genome, config, rng),
                           std::numeric_limits<double>::infinity(), gen + 1,
                           next_id++});
    }

    if (hooks.on_generation) {
      EvolutionCheckpoint<Genome> ck;
      ck.next_generation = gen + 1;
      ck.population = offspring;
      ck.hof = hof.members();
      std::ostringstream rs;
      rs << rng;
      ck.rng_state = rs.str();
      ck.next_id = next_id;
      ck.evaluations = evaluations;
      ck.log = log;
      hooks.on_generation(ck);
    }
    population = std::move(offspring);
  }

  return {hof.members(), log};
}

template <class Genome>
std::vector<EvaluatedIndividual<Genome>> ReevaluateOn(
    std::span<const EvaluatedIndividual<Genome>> members,
    std::span<const Schedule> schedules, const EvaluationSetup& setup,
    std::uint64_t noise_seed) {
  if (schedules.empty()) throw FormatError("reevaluate: no schedules");
  std::vector<EvaluatedIndividual<Genome>> out(members.begin(), members.end());
  for (auto& ind : out) {
    double sum = 0.0;
    for (std::size_t s = 0; s < schedules.size(); ++s) {
      Rng rng = DeriveRng({noise_seed, ind.id, s});
      sum += Evaluate(ind.genome, schedules[s], setup, rng);
    }
    ind.fitness = sum / static_cast<double>(schedules.size());
  }
  std::sort(out.begin(), out.end(),
            [](const auto& a, const auto& b) { return BetterThan(a, b); });
  return out;
}

template <class Genome>
std::vector<EvaluatedIndividual<Genome>> ReevaluateHof(
    std::span<const EvaluatedIndividual<Genome>> hof, int n_sets,
    const EpisodeSpec& episode, const EvaluationSetup& setup, Rng& rng) {
  if (n_sets < 1) throw FormatError("reevaluate: n_sets must be >= 1");
  const std::uint64_t noise_seed = rng();
  std::vector<Schedule> schedules;
  for (int i = 0; i < n_sets; ++i) schedules.push_back(DrawSchedule(episode, rng));
  return ReevaluateOn<Genome>(hof, schedules, setup, noise_seed);
}

template <class Genome>
nlohmann::json ToJson(const EvolutionCheckpoint<Genome>& ck) {
  nlohmann::json pop = nlohmann::json::array();
  for (const auto& ind : ck.population) pop.push_back(IndividualToJson(ind));
  nlohmann::json log = nlohmann::json::array();
  for (const auto& s : ck.log) {
    log.push_back({{"generation", s.generation},
                   {"best", NumberOrNull(s.best)},
                   {"mean", NumberOrNull(s.mean)},
                   {"std", NumberOrNull(s.stddev)},
                   {"evaluations", s.evaluations},
                   {"hof_best", NumberOrNull(s.hof_best)}});
  }
  return {{"type", GenomeTraits<Genome>::kName},
          {"next_generation", ck.next_generation},
          {"next_id", ck.next_id},
          {"evaluations", ck.evaluations},
          {"rng_state", ck.rng_state},
          {"population", pop},
          {"hof", HofToJson<Genome>(ck.hof)},
          {"log", log}};
}

template <class Genome>
EvolutionCheckpoint<Genome> CheckpointFromJson(const nlohmann::json& j) {
  try {
    if (j.at("type").get<std::string>() != GenomeTraits<Genome>::kName) {
      throw FormatError("checkpoint: genome type mismatch");
    }
    EvolutionCheckpoint<Genome> ck;
    ck.next_generation = j.at("next_generation").get<int>();
    ck.next_id = j.at("next_id").get<std::uint64_t>();
    ck.evaluations = j.at("evaluations").get<std::uint64_t>();
    ck.rng_state = j.at("rng_state").get<std::string>();
    for (const auto& p : j.at("population")) {
      ck.population.push_back(IndividualFromJson<Genome>(p));
    }
    ck.hof = HofFromJson<Genome>(j.at("hof"));
    for (const auto& s : j.at("log")) {
      GenerationStats st;
      st.generation = s.at("generation").get<int>();
      st.best = NumberOrInf(s.at("best"));
      st.mean = NumberOrInf(s.at("mean"));
      st.stddev = NumberOrInf(s.at("std"));
      st.evaluations = s.at("evaluations").get<std::uint64_t>();
      st.hof_best = NumberOrInf(s.at("hof_best"));
      ck.log.push_back(st);
    }
    return ck;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("checkpoint: ") + e.what());
  }
}

template <class Genome>
nlohmann::json HofToJson(std::span<const EvaluatedIndividual<Genome>> hof) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& ind : hof) arr.push_back(IndividualToJson(ind));
  return arr;
}

template <class Genome>
std::vector<EvaluatedIndividual<Genome>> HofFromJson(const nlohmann::json& j) {
  if (!j.is_array()) throw FormatError("hall of fame: expected an array");
  std::vector<EvaluatedIndividual<Genome>> out;
  try {
    for (const auto& e : j) out.push_back(IndividualFromJson<Genome>(e));
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("hall of fame: ") + e.what());
  }
  return out;
}

std::string GenerationLogCsv(std::span<const GenerationStats> log) {
  std::string out = "generation,best,mean,std,evaluations,hof_best\n";
  for (const auto& s : log) {
    out += std::to_string(s.generation) + ',' + FormatDouble(s.best) + ',' +
           FormatDouble(s.mean) + ',' + FormatDouble(s.stddev) + ',' +
           std::to_string(s.evaluations) + ',' + FormatDouble(s.hof_best) + '\n';
  }
  return out;
}

#define BLIMP_INSTANTIATE_EVOLUTION(G)                                        \
  template G RandomGenome<G>(Rng&);                                           \
  template std::vector<G> InitPopulation<G>(const EvolutionConfig&, Rng&);    \
  template std::size_t TournamentSelect<G>(                                   \
      std::span<const EvaluatedIndividual<G>>, int, Rng&);                    \
  template G Mutate<G>(const G&, const EvolutionConfig&, Rng&,                \
                       MutationStats*);                                       \
  template double Evaluate<G>(const G&, const Schedule&,                      \
                              const EvaluationSetup&, Rng&);                  \
  template class HallOfFame<G>;                                               \
  template EvolutionResult<G> Evolve<G>(const EvolutionConfig&,               \
                                        const EvolveHooks<G>&);               \
  template std::vector<EvaluatedIndividual<G>> ReevaluateOn<G>(               \
      std::span<const EvaluatedIndividual<G>>, std::span<const Schedule>,     \
      const EvaluationSetup&, std::uint64_t);                                 \
  template std::vector<EvaluatedIndividual<G>> ReevaluateHof<G>(              \
      std::span<const EvaluatedIndividual<G>>, int, const EpisodeSpec&,       \
      const EvaluationSetup&, Rng&);                                          \
  template nlohmann::json ToJson<G>(const EvolutionCheckpoint<G>&);           \
  template EvolutionCheckpoint<G> CheckpointFromJson<G>(const nlohmann::json&); \
  template nlohmann::json HofToJson<G>(std::span<const EvaluatedIndividual<G>>); \
  template std::vector<EvaluatedIndividual<G>> HofFromJson<G>(                \
      const nlohmann::json&);

BLIMP_INSTANTIATE_EVOLUTION(SnnGenome)
BLIMP_INSTANTIATE_EVOLUTION(AnnGenome)

#undef BLIMP_INSTANTIATE_EVOLUTION

}  // namespace blimp
