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

#include "blimp/sysid.h"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "blimp/errors.h"

namespace blimp {
namespace {

FlightLog Slice(const FlightLog& log, std::size_t begin, std::size_t end) {
  FlightLog out;
  out.t.assign(log.t.begin() + begin, log.t.begin() + end);
  out.u.assign(log.u.begin() + begin, log.u.begin() + end);
  out.h.assign(log.h.begin() + begin, log.h.begin() + end);
  return out;
}

FlightLog Synthetic(double sigma, double duration, std::uint64_t seed) {
  LogGenerator gen;
  gen.noise_sigma = sigma;
  gen.duration = duration;
  Rng rng(seed);
  return GenerateLog(gen, rng);
}

void ExpectRelNear(double got, double want, double rel) {
  EXPECT_NEAR(got, want, rel * std::abs(want)) << "want " << want;
}

TEST(Nrmsae, Examples) {
  const std::vector<double> x{0.3, -1.2, 2.5};
  EXPECT_EQ(Nrmsae(x, x), 0.0);
  EXPECT_DOUBLE_EQ(Nrmsae(std::vector<double>(4, 0.0),
                          std::vector<double>(4, 1.0)),
                   1.0);
  EXPECT_DOUBLE_EQ(Nrmsae(std::vector<double>{1, 0}, std::vector<double>{2, 0}),
                   0.5);
}

TEST(Nrmsae, NormalizesByObserved) {
  // sqrt(((3-3)^2 + (4-0)^2) / (9 + 16))
  EXPECT_DOUBLE_EQ(Nrmsae(std::vector<double>{3, 0}, std::vector<double>{3, 4}),
                   0.8);
  // swapping roles divides by the other energy
  EXPECT_DOUBLE_EQ(Nrmsae(std::vector<double>{3, 4}, std::vector<double>{3, 0}),
                   4.0 / 3.0);
}

TEST(Nrmsae, Errors) {
  EXPECT_THROW(Nrmsae(std::vector<double>{1, 2}, std::vector<double>{0, 0}),
               ZeroDenominatorError);
  EXPECT_THROW(Nrmsae(std::vector<double>{1}, std::vector<double>{1, 2}),
               FormatError);
  EXPECT_THROW(Nrmsae(std::vector<double>{}, std::vector<double>{}),
               FormatError);
}

TEST(NrmsaeProperty, SelfIsZero) {
  Rng rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> x(1 + trial);
    for (double& v : x) v = Uniform(rng, -5, 5);
    EXPECT_EQ(Nrmsae(x, x), 0.0);
  }
}

TEST(FlightLog, CsvRoundTripIsExact) {
  const FlightLog log = Synthetic(0.05, 30, 4);
  const FlightLog back = ParseFlightLog(FlightLogToCsv(log));
  EXPECT_EQ(back.t, log.t);
  EXPECT_EQ(back.u, log.u);
  EXPECT_EQ(back.h, log.h);
}

TEST(FlightLog, ParseRejectsBadInput) {
  EXPECT_THROW(ParseFlightLog(""), FormatError);
  EXPECT_THROW(ParseFlightLog("time,u,h\n0,0,0\n0.2,0,0\n"), FormatError);
  EXPECT_THROW(ParseFlightLog("t,u,h\n0,0\n0.2,0,0\n"), FormatError);
  EXPECT_THROW(ParseFlightLog("t,u,h\n0,0,0\n0.2,x,0\n"), FormatError);
  // non-increasing time
  EXPECT_THROW(ParseFlightLog("t,u,h\n0,0,0\n0.2,0,0\n0.2,0,0\n"), FormatError);
  // 0.25 spacing against a 0.2 median is outside 10%
  EXPECT_THROW(ParseFlightLog("t,u,h\n0,0,0\n0.2,0,0\n0.4,0,0\n0.65,0,0\n"),
               FormatError);
  EXPECT_NO_THROW(
      ParseFlightLog("# comment\nt,u,h\n0,0,0\n0.2,0,0\n0.41,0,0\n0.6,0,0\n"));
}

TEST(FlightLog, SamplePeriodIsMedian) {
  FlightLog log{{0.0, 0.2, 0.41, 0.6}, {0, 0, 0, 0}, {0, 0, 0, 0}};
  EXPECT_DOUBLE_EQ(log.SamplePeriod(), 0.2);
}

TEST(FitModel, NoiselessRecoversCoefficients) {
  const FlightLog log = Synthetic(0.0, 300, 1);
  const FitReport r = FitModel(log);
  const PlantModel truth = PlantModel::Fitted();
  ExpectRelNear(r.model.a1, truth.a1, 1e-6);
  ExpectRelNear(r.model.a2, truth.a2, 1e-6);
  ExpectRelNear(r.model.d1, truth.d1, 1e-6);
  ExpectRelNear(r.model.d2, truth.d2, 1e-6);
  EXPECT_NEAR(r.model.dt, 0.2, 1e-12);
  EXPECT_LT(r.nrmsae, 1e-6);
  EXPECT_EQ(r.residuals.size(), log.size());
  EXPECT_EQ(r.predicted.size(), log.size());
}

TEST(FitModel, NoiselessRecoveryIsSeedIndependent) {
  for (std::uint64_t seed : {2, 3, 4}) {
    const FitReport r = FitModel(Synthetic(0.0, 300, seed));
    ExpectRelNear(r.model.a1, -0.969e-3, 1e-6);
    ExpectRelNear(r.model.d2, 0.99, 1e-6);
  }
}

TEST(FitModel, NoisyFitGeneralizesToNoiselessContinuation) {
  // Fit on the first 300 s of a noisy log; score on the following 300 s of
  // the same excitation without noise, started from its true state.
  std::vector<double> scores;
  for (std::uint64_t seed = 1; seed <= 8; ++seed) {
    LogGenerator gen;
    gen.duration = 600;
    gen.noise_sigma = 0.05;
    Rng noisy_rng(seed);
    const FlightLog noisy = GenerateLog(gen, noisy_rng);
    gen.noise_sigma = 0.0;
    Rng clean_rng(seed);
    const FlightLog clean = GenerateLog(gen, clean_rng);
    const std::size_t half = noisy.size() / 2;

    const FitReport r = FitModel(Slice(noisy, 0, half));
    const FlightLog held = Slice(clean, half, clean.size());
    const std::vector<double> pred =
        FreeRun(r.model, held.u, held.h[0], held.h[1]);
    scores.push_back(Nrmsae(pred, held.h));
  }
  std::sort(scores.begin(), scores.end());
  EXPECT_LT(0.5 * (scores[3] + scores[4]), 0.1);
  EXPECT_LT(scores.back(), 0.2);
}

TEST(FitModel, RefinementNeverWorseThanLeastSquares) {
  for (std::uint64_t seed = 10; seed < 16; ++seed) {
    const FitReport r = FitModel(Synthetic(0.05, 120, seed));
    EXPECT_GE(r.nrmsae, 0.0);
    EXPECT_LE(r.nrmsae, r.stage1_nrmsae);
    EXPECT_LT(r.nrmsae, r.stage1_nrmsae) << "noisy data should need stage 2";
  }
}

TEST(FitModel, ScaleConsistent) {
  const FlightLog log = Synthetic(0.05, 200, 21);
  const FitReport base = FitModel(log);
  for (double c : {3.7, 0.25}) {
    FlightLog scaled = log;
    for (double& h : scaled.h) h *= c;
    const FitReport r = FitModel(scaled);
    ExpectRelNear(r.model.a1, c * base.model.a1, 1e-6);
    ExpectRelNear(r.model.a2, c * base.model.a2, 1e-6);
    ExpectRelNear(r.model.d1, base.model.d1, 1e-6);
    ExpectRelNear(r.model.d2, base.model.d2, 1e-6);
    EXPECT_NEAR(r.nrmsae, base.nrmsae, 1e-6 * base.nrmsae);
  }
}

TEST(FitModel, MeanIsSubtracted) {
  FlightLog log = Synthetic(0.0, 100, 8);
  const FitReport base = FitModel(log);
  for (double& h : log.h) h += 12.5;
  const FitReport shifted = FitModel(log);
  EXPECT_NEAR(shifted.h_mean, base.h_mean + 12.5, 1e-9);
  ExpectRelNear(shifted.model.d1, base.model.d1, 1e-6);
  ExpectRelNear(shifted.model.a1, base.model.a1, 1e-5);
}

TEST(FitModel, DegenerateData) {
  const std::size_t n = 100;
  FlightLog log;
  for (std::size_t k = 0; k < n; ++k) {
    log.t.push_back(0.2 * static_cast<double>(k));
    log.u.push_back(1.0);
    log.h.push_back(2.0);
  }
  EXPECT_THROW(FitModel(log), DegenerateDataError);
  std::fill(log.u.begin(), log.u.end(), 0.0);
  EXPECT_THROW(FitModel(log), DegenerateDataError);
  // Constant command makes the two input regressors collinear.
  for (std::size_t k = 0; k < n; ++k) {
    log.u[k] = 1.0;
    log.h[k] = std::sin(0.1 * static_cast<double>(k));
  }
  EXPECT_THROW(FitModel(log), DegenerateDataError);
}

TEST(FitModel, NeedsFiftySamples) {
  const FlightLog log = Synthetic(0.0, 300, 1);
  EXPECT_THROW(FitModel(Slice(log, 0, 49)), FormatError);
  EXPECT_NO_THROW(FitModel(Slice(log, 0, 50)));
}

TEST(ValidateModel, SelfGeneratedIsZero) {
  const FlightLog log = Synthetic(0.0, 300, 5);
  EXPECT_LT(ValidateModel(PlantModel::Fitted(), log), 1e-9);
  EXPECT_LT(
      ValidateModel(PlantModel::Fitted(), log, InitialState::kFirstSamples),
      1e-9);
}

TEST(ValidateModel, ZeroNumeratorGivesFreeDecay) {
  FlightLog log = Synthetic(0.0, 60, 6);
  for (std::size_t k = 0; k < log.size(); ++k) log.h[k] += 1.0 + 0.01 * k;
  PlantModel m = PlantModel::Fitted();
  m.a1 = m.a2 = 0.0;
  // hand recursion of the zero-input response
  std::vector<double> decay{log.h[0], log.h[1]};
  for (std::size_t k = 2; k < log.size(); ++k) {
    decay.push_back(1.99 * decay[k - 1] - 0.99 * decay[k - 2]);
  }
  double ss = 0.0;
  for (std::size_t k = 0; k < log.size(); ++k) {
    ss += (log.h[k] - decay[k]) * (log.h[k] - decay[k]);
  }
  const double want = std::sqrt(ss / static_cast<double>(log.size()));
  EXPECT_GT(want, 0.0);
  EXPECT_NEAR(ValidateModel(m, log, InitialState::kFirstSamples), want,
              1e-9 * want);
}

TEST(ValidateModel, NoisyLogWithinNoiseBand) {
  const double sigma = 0.0667;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const double rmsae =
        ValidateModel(PlantModel::Fitted(), Synthetic(sigma, 300, seed));
    EXPECT_GE(rmsae, 0.9 * sigma) << seed;
    EXPECT_LE(rmsae, 2.0 * sigma) << seed;
  }
}

TEST(EstimateInitialState, ExactOnNoiselessData) {
  const FlightLog log = Slice(Synthetic(0.0, 100, 7), 100, 500);
  const auto [h0, h1] = EstimateInitialState(PlantModel::Fitted(), log.u, log.h);
  EXPECT_NEAR(h0, log.h[0], 1e-9);
  EXPECT_NEAR(h1, log.h[1], 1e-9);
}

TEST(FreeRun, StartsFromGivenSamples) {
  const std::vector<double> u{1.0, 2.0, 3.0, 4.0};
  const PlantModel m = PlantModel::Fitted();
  const auto y = FreeRun(m, u, 0.5, 0.7);
  ASSERT_EQ(y.size(), 4u);
  EXPECT_EQ(y[0], 0.5);
  EXPECT_EQ(y[1], 0.7);
  EXPECT_DOUBLE_EQ(y[2], 1.99 * 0.7 - 0.99 * 0.5 + m.a1 * 2.0 + m.a2 * 1.0);
}

TEST(GenerateLog, ShapeAndDeterminism) {
  const FlightLog a = Synthetic(0.05, 300, 9);
  const FlightLog b = Synthetic(0.05, 300, 9);
  EXPECT_EQ(a.size(), 1500u);
  EXPECT_EQ(a.h, b.h);
  EXPECT_NO_THROW(a.Validate());
  for (double u : a.u) EXPECT_LE(std::abs(u), 3.3);
}

TEST(FitReport, JsonAndResiduals) {
  const FlightLog log = Synthetic(0.0, 30, 2);
  const FitReport r = FitModel(log);
  const nlohmann::json j = FitReportToJson(r);
  EXPECT_EQ(j["model"]["d1"].get<double>(), r.model.d1);
  EXPECT_EQ(j["samples"].get<std::size_t>(), log.size());
  const std::string csv = ResidualCsv(r, log);
  EXPECT_EQ(csv.rfind("t,h_obs,h_model,residual\n", 0), 0u);
  EXPECT_EQ(static_cast<std::size_t>(std::count(csv.begin(), csv.end(), '\n')),
            log.size() + 1);
}

}  // namespace
}  // namespace blimp
