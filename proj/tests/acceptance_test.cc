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

// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits non-zero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "blimp/cli.h"
#include "blimp/controllers.h"
#include "blimp/evolution.h"
#include "blimp/harness.h"
#include "blimp/plant.h"
#include "blimp/sysid.h"
#include "blimp/text.h"

namespace {

using namespace blimp;
using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass;
  std::string detail;
};

double Seconds(Clock::time_point since) {
  return std::chrono::duration<double>(Clock::now() - since).count();
}

std::string Fmt(const char* fmt, double a, double b = 0, double c = 0,
                double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), fmt, a, b, c, d);
  return buf;
}

// 1. Simulated plant versus a direct transcription of the difference
//    equation.
Outcome PlantOracle() {
  const auto t0 = Clock::now();
  constexpr int kSteps = 1000;
  Rng rng(20260101);
  std::vector<double> u(kSteps);
  for (double& x : u) x = Uniform(rng, -3.3, 3.3);

  std::vector<double> sim(kSteps + 1, 0.0);
  PlantState s;
  for (int k = 0; k < kSteps; ++k) {
    PlantStep next = StepPlant(PlantModel::Fitted(), s, u[k]);
    sim[k + 1] = next.altitude;
    s = next.state;
  }

  // h[k] = 1.99 h[k-1] - 0.99 h[k-2] - 0.969e-3 u[k-1] + 1.019e-3 u[k-2]
  std::vector<double> ref(kSteps + 1, 0.0);
  for (int k = 1; k <= kSteps; ++k) {
    const double h1 = ref[k - 1];
    const double h2 = k >= 2 ? ref[k - 2] : 0.0;
    const double u1 = u[k - 1];
    const double u2 = k >= 2 ? u[k - 2] : 0.0;
    ref[k] = 1.99 * h1 - 0.99 * h2 - 0.969e-3 * u1 + 1.019e-3 * u2;
  }

  double worst = 0.0;
  for (int k = 1; k <= kSteps; ++k) {
    const double scale = std::max(std::abs(ref[k]), 1e-300);
    worst = std::max(worst, std::abs(sim[k] - ref[k]) / scale);
  }
  const double secs = Seconds(t0);
  return {worst <= 1e-9 && secs < 1.0,
          Fmt("max relative deviation %.3g (limit 1e-9), %.3f s (limit 1 s)",
              worst, secs)};
}

// 2. Noiseless self-identification.
Outcome SelfIdentification() {
  const auto t0 = Clock::now();
  LogGenerator gen;
  gen.duration = 300.0;
  Rng rng(1);
  const FlightLog log = GenerateLog(gen, rng);
  const FitReport r = FitModel(log);
  const PlantModel truth = PlantModel::Fitted();
  const double errs[] = {std::abs(r.model.a1 / truth.a1 - 1.0),
                         std::abs(r.model.a2 / truth.a2 - 1.0),
                         std::abs(r.model.d1 / truth.d1 - 1.0),
                         std::abs(r.model.d2 / truth.d2 - 1.0)};
  const double worst = *std::max_element(std::begin(errs), std::end(errs));
  const double secs = Seconds(t0);
  return {worst <= 1e-6 && secs < 10.0,
          Fmt("worst coefficient relative error %.3g (limit 1e-6), %.3f s "
              "(limit 10 s)",
              worst, secs)};
}

// 3. Small SNN evolution with radar noise.
Outcome EvolutionQuality() {
  const auto t0 = Clock::now();
  EvolutionConfig cfg;
  cfg.pop_size = 20;
  cfg.generations = 50;
  cfg.seed = 1;
  cfg.threads = 1;
  cfg.setup.sensor.radar.noise_sigma = 0.0667;
  const auto result = Evolve<SnnGenome>(cfg);

  bool monotone = true;
  for (std::size_t i = 1; i < result.log.size(); ++i) {
    monotone = monotone && result.log[i].hof_best <= result.log[i - 1].hof_best;
  }
  Rng rng = DeriveRng({cfg.seed, 0x72656576});
  const auto ranked = ReevaluateHof<SnnGenome>(result.hof, 5, cfg.episode,
                                               cfg.setup, rng);
  const double best = ranked.front().fitness;
  const double secs = Seconds(t0);
  return {best < 0.5 && monotone && secs < 300.0,
          Fmt("reevaluated best RMSAE %.4f m (limit < 0.5), %.1f s (limit "
              "300 s), HOF best non-increasing: ",
              best, secs) +
              (monotone ? "yes" : "no")};
}

// 4. PID, evolved ANN and evolved SNN on the waypoint plan.
Outcome FullProtocol() {
  EvolutionConfig cfg;  // full-size runs: 100 individuals, 300 generations
  cfg.seed = 1;
  const auto ann = Evolve<AnnGenome>(cfg);
  const auto snn = Evolve<SnnGenome>(cfg);
  Rng ra = DeriveRng({cfg.seed, 0x72656576});
  Rng rs = DeriveRng({cfg.seed, 0x72656576});
  const AnnGenome ann_best =
      ReevaluateHof<AnnGenome>(ann.hof, cfg.reeval_sets, cfg.episode, cfg.setup, ra)
          .front()
          .genome;
  const SnnGenome snn_best =
      ReevaluateHof<SnnGenome>(snn.hof, cfg.reeval_sets, cfg.episode, cfg.setup, rs)
          .front()
          .genome;

  const ControlLimits limits;
  const SensorPath sensor;  // 0.0667 m radar noise
  auto run = [&](Controller& c) {
    DiscretePlant plant(PlantModel::Fitted());
    return RunWaypointEval(c, plant, sensor, DefaultWaypointPlan(), 0.2, 1);
  };
  PidController pid(PidParams{}, limits);
  AnnController annc(ann_best, limits);
  SnnController snnc(snn_best, limits);
  const EvalReport rp = run(pid), ra_rep = run(annc), rs_rep = run(snnc);
  const auto rows = CompareControllers(rp, ra_rep, rs_rep);
  std::fputs(ComparisonTable(rows).c_str(), stdout);

  const double bound = std::sqrt(4.5) / 4.0;
  bool tracking = true;
  for (const auto& row : rows) tracking = tracking && row.rmsae <= bound;
  const double e_ann = rows[1].effort_ratio;
  const double e_snn = rows[2].effort_ratio;
  const bool effort = e_snn <= e_ann && e_ann <= 1.2 * std::min(e_snn, e_ann);
  return {tracking && effort,
          Fmt("RMSAE PID %.4f / ANN %.4f / SNN %.4f m (each limit %.4f)",
              rows[0].rmsae, rows[1].rmsae, rows[2].rmsae, bound) +
              Fmt("; effort SNN %.1f%% <= ANN %.1f%% <= 120%% of min: ",
                  e_snn, e_ann) +
              (effort ? "yes" : "no")};
}

// 5. Mutation rates and domains over 1e5 calls.
Outcome MutationAudit() {
  const auto t0 = Clock::now();
  EvolutionConfig cfg;
  Rng rng(5);
  MutationStats st;
  bool domains = true;
  SnnGenome g = RandomGenome<SnnGenome>(rng);
  for (int i = 0; i < 100000; ++i) {
    const SnnGenome m = Mutate(g, cfg, rng, &st);
    domains = domains && WithinDomain(m);
    if (i % 100 == 0) g = RandomGenome<SnnGenome>(rng);
  }
  const double ind = static_cast<double>(st.genomes_touched) / st.calls;
  const double par = static_cast<double>(st.params_perturbed) / st.params_seen;
  const double secs = Seconds(t0);
  const bool ok = std::abs(ind - 0.4) <= 0.01 && std::abs(par - 0.6) <= 0.01 &&
                  domains && secs < 30.0;
  return {ok, Fmt("individual rate %.4f, parameter rate %.4f (0.40/0.60 +- "
                  "0.01), %.2f s",
                  ind, par, secs) +
                  (domains ? ", domains respected" : ", DOMAIN VIOLATION")};
}

// 6. The CLI reproduces evolve outputs byte for byte, serial and threaded.
Outcome Determinism() {
  namespace fs = std::filesystem;
  const fs::path root = fs::temp_directory_path() / "blimp_acceptance_determinism";
  fs::remove_all(root);
  auto evolve = [&](const std::string& name, const std::string& threads) {
    std::ostringstream out, err;
    return CliMain({"evolve", "--out", (root / name).string(), "--seed", "7",
                    "--pop", "20", "--generations", "10", "--threads", threads},
                   out, err);
  };
  bool ok = evolve("a", "1") == kExitOk && evolve("b", "1") == kExitOk &&
            evolve("c", "4") == kExitOk;
  for (const char* f : {"log.csv", "hof.json"}) {
    if (!ok) break;
    const std::string a = ReadFile((root / "a" / f).string());
    ok = !a.empty() && a == ReadFile((root / "b" / f).string()) &&
         a == ReadFile((root / "c" / f).string());
  }
  fs::remove_all(root);
  return {ok, ok ? "log.csv and hof.json identical across 2 serial runs and a "
                   "4-thread run"
                 : "outputs differ or a run failed"};
}

// 7. Every error maps to exactly one input spike.
Outcome EncoderTotality() {
  // interval j is [lo_j, hi_j) with lo_0 = -inf and hi_9 = +inf
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> lo{-inf}, hi;
  for (double e : kEncoderEdges) {
    hi.push_back(e);
    lo.push_back(e);
  }
  hi.push_back(inf);

  std::vector<double> samples;
  Rng rng(7);
  for (int i = 0; i < 1000000; ++i) samples.push_back(Uniform(rng, -10.0, 10.0));
  for (double e : kEncoderEdges) {
    samples.push_back(e);
    samples.push_back(std::nextafter(e, -inf));
    samples.push_back(std::nextafter(e, inf));
  }
  samples.push_back(-10.0);
  samples.push_back(10.0);

  std::vector<std::uint64_t> hits(kInputNeurons, 0);
  std::uint64_t bad = 0;
  for (double e : samples) {
    const InputSpikes s = EncodeError(e);
    int count = 0;
    std::size_t fired = 0;
    for (std::size_t j = 0; j < s.size(); ++j) {
      if (s[j]) {
        ++count;
        fired = j;
      }
    }
    int members = 0;
    std::size_t member = 0;
    for (std::size_t j = 0; j < lo.size(); ++j) {
      if (e >= lo[j] && e < hi[j]) {
        ++members;
        member = j;
      }
    }
    if (count != 1 || members != 1 || fired != member) {
      ++bad;
    } else {
      ++hits[fired];
    }
  }
  const bool covered =
      std::all_of(hits.begin(), hits.end(), [](std::uint64_t h) { return h > 0; });
  return {bad == 0 && covered,
          Fmt("%.0f samples, %.0f violations, all 10 intervals hit: ",
              static_cast<double>(samples.size()), static_cast<double>(bad)) +
              (covered ? "yes" : "no")};
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    std::function<Outcome()> run;
  };
  const Criterion criteria[] = {
      {"1 plant oracle equivalence", PlantOracle},
      {"2 model self-identification", SelfIdentification},
      {"3 evolution smoke-and-quality", EvolutionQuality},
      {"4 full-protocol comparison", FullProtocol},
      {"5 statistical mutation audit", MutationAudit},
      {"6 determinism", Determinism},
      {"7 encoder totality", EncoderTotality},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failures;
    std::printf("%s criterion %s: %s\n", o.pass ? "PASS" : "FAIL", c.name,
                o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n",
              static_cast<int>(std::size(criteria)) - failures, std::size(criteria));
  return failures == 0 ? 0 : 1;
}
