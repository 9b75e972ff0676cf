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

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <tuple>
#include <utility>

#include "blimp/errors.h"
#include "blimp/text.h"

namespace blimp {
namespace {

constexpr std::size_t kMinFitSamples = 50;

PlantModel ToModel(const std::vector<double>& p, double dt) {
  PlantModel m;
  m.a1 = p[0];
  m.a2 = p[1];
  m.d1 = p[2];
  m.d2 = p[3];
  m.dt = dt;
  return m;
}

double FreeRunNrmsae(const PlantModel& m, std::span<const double> u,
                     std::span<const double> obs, double h_first,
                     double h_second) {
  try {
    const std::vector<double> pred = FreeRun(m, u, h_first, h_second);
    const double v = Nrmsae(pred, obs);
    return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
  } catch (const StateCorruptionError&) {
    return std::numeric_limits<double>::infinity();
  }
}

// Nelder-Mead in coordinates scaled by `scale`, starting from `x0`. The best
// vertex never gets worse than f(x0).
using Vec = std::vector<double>;

Vec NelderMead(const std::function<double(const Vec&)>& f, const Vec& x0,
               const Vec& scale, double step, int max_iter) {
  const std::size_t n = x0.size();
  std::vector<Vec> simplex(n + 1, x0);
  std::vector<double> fv(n + 1);
  for (std::size_t i = 0; i < n; ++i) simplex[i + 1][i] += step * scale[i];
  for (std::size_t i = 0; i <= n; ++i) fv[i] = f(simplex[i]);

  auto blend = [n](const Vec& a, const Vec& b, double t) {
    Vec r(n);
    for (std::size_t i = 0; i < n; ++i) r[i] = a[i] + t * (b[i] - a[i]);
    return r;
  };

  std::vector<std::size_t> order(n + 1);
  for (int it = 0; it < max_iter; ++it) {
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });
    const std::size_t best = order[0];
    const std::size_t worst = order[n];
    const std::size_t second = order[n - 1];
    if (std::isfinite(fv[worst]) &&
        fv[worst] - fv[best] <= 1e-15 * (1.0 + std::abs(fv[best]))) {
      break;
    }
    double spread = 0.0;
    for (std::size_t i = 0; i <= n; ++i) {
      for (std::size_t d = 0; d < n; ++d) {
        spread = std::max(spread, std::abs(simplex[i][d] - simplex[best][d]) /
                                      (scale[d] * (1.0 + std::abs(x0[d]))));
      }
    }
    if (spread < 1e-13) break;

    Vec centroid(n, 0.0);
    for (std::size_t i = 0; i <= n; ++i) {
      if (i == worst) continue;
      for (std::size_t d = 0; d < n; ++d) {
        centroid[d] += simplex[i][d] / static_cast<double>(n);
      }
    }
    const Vec reflected = blend(centroid, simplex[worst], -1.0);
    const double fr = f(reflected);
    if (fr < fv[best]) {
      const Vec expanded = blend(centroid, simplex[worst], -2.0);
      const double fe = f(expanded);
      if (fe < fr) {
        simplex[worst] = expanded;
        fv[worst] = fe;
      } else {
        simplex[worst] = reflected;
        fv[worst] = fr;
      }
      continue;
    }
    if (fr < fv[second]) {
      simplex[worst] = reflected;
      fv[worst] = fr;
      continue;
    }
    const bool outside = fr < fv[worst];
    const Vec contracted =
        blend(centroid, outside ? reflected : simplex[worst], 0.5);
    const double fc = f(contracted);
    if (fc < std::min(fr, fv[worst])) {
      simplex[worst] = contracted;
      fv[worst] = fc;
      continue;
    }
    for (std::size_t i = 0; i <= n; ++i) {
      if (i == best) continue;
      simplex[i] = blend(simplex[best], simplex[i], 0.5);
      fv[i] = f(simplex[i]);
    }
  }
  const auto it = std::min_element(fv.begin(), fv.end());
  return simplex[static_cast<std::size_t>(it - fv.begin())];
}

// Equation-error regression h_k = -d1 h_{k-1} - d2 h_{k-2} + a1 u_{k-1} +
// a2 u_{k-2} over k > skip + 1. Returns a1, a2, d1, d2.
Vec LeastSquaresArx(std::span<const double> h, std::span<const double> u,
                    std::size_t skip) {
  const std::size_t n = h.size();
  const Eigen::Index rows = static_cast<Eigen::Index>(n - skip - 2);
  Eigen::MatrixXd X(rows, 4);
  Eigen::VectorXd y(rows);
  for (std::size_t k = skip + 2; k < n; ++k) {
    const auto r = static_cast<Eigen::Index>(k - skip - 2);
    X(r, 0) = h[k - 1];
    X(r, 1) = h[k - 2];
    X(r, 2) = u[k - 1];
    X(r, 3) = u[k - 2];
    y(r) = h[k];
  }
  Eigen::Vector4d col_scale;
  for (Eigen::Index c = 0; c < 4; ++c) {
    col_scale(c) = X.col(c).norm();
    if (col_scale(c) == 0.0) {
      throw DegenerateDataError("sysid: regressor column is identically zero");
    }
    X.col(c) /= col_scale(c);
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
  qr.setThreshold(1e-10);
  if (qr.rank() < 4) {
    throw DegenerateDataError("sysid: regression is rank deficient");
  }
  const Eigen::Vector4d theta =
      (qr.solve(y).array() / col_scale.array()).matrix();
  return {theta(2), theta(3), -theta(0), -theta(1)};
}

// Denominators with real poles concentrated near 1 and lightly damped
// complex pairs.
std::vector<std::pair<double, double>> DenominatorGrid() {
  static const double kReal[] = {1.01,  1.003, 1.0,  0.999, 0.997, 0.99,
                                 0.98,  0.95,  0.9,  0.8,   0.6,   0.3,
                                 0.0,   -0.5};
  std::vector<std::pair<double, double>> out;
  for (std::size_t i = 0; i < std::size(kReal); ++i) {
    for (std::size_t j = i; j < std::size(kReal); ++j) {
      out.push_back({-(kReal[i] + kReal[j]), kReal[i] * kReal[j]});
    }
  }
  for (double r : {0.999, 0.99, 0.95, 0.9, 0.8}) {
    for (double phi : {0.01, 0.03, 0.1, 0.3, 1.0}) {
      out.push_back({-2.0 * r * std::cos(phi), r * r});
    }
  }
  return out;
}

// Best free-run NRMSAE over (a1, a2, h_first, h_second) for the denominator
// (d1, d2). On success `full` receives a1, a2, d1, d2, h_first, h_second.
double ProfiledNrmsae(double d1, double d2, double dt,
                      std::span<const double> u, std::span<const double> h,
                      Vec* full) {
  const double inf = std::numeric_limits<double>::infinity();
  if (!std::isfinite(d1) || !std::isfinite(d2)) return inf;
  const std::size_t n = h.size();
  const std::vector<double> zeros(n, 0.0);
  Eigen::MatrixXd B(static_cast<Eigen::Index>(n), 4);
  try {
    const Vec unit[4] = {{1, 0, d1, d2}, {0, 1, d1, d2}, {0, 0, d1, d2},
                         {0, 0, d1, d2}};
    for (int c = 0; c < 4; ++c) {
      const PlantModel m = ToModel(unit[c], dt);
      const std::vector<double> col =
          c < 2 ? FreeRun(m, u, 0.0, 0.0)
                : FreeRun(m, zeros, c == 2 ? 1.0 : 0.0, c == 3 ? 1.0 : 0.0);
      for (std::size_t k = 0; k < n; ++k) {
        B(static_cast<Eigen::Index>(k), c) = col[k];
      }
    }
  } catch (const StateCorruptionError&) {
    return inf;
  }
  Eigen::Vector4d col_scale;
  for (Eigen::Index c = 0; c < 4; ++c) {
    col_scale(c) = B.col(c).norm();
    if (!std::isfinite(col_scale(c)) || col_scale(c) == 0.0) return inf;
    B.col(c) /= col_scale(c);
  }
  const Eigen::Map<const Eigen::VectorXd> y(h.data(),
                                            static_cast<Eigen::Index>(n));
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(B);
  const Eigen::Vector4d coef =
      (qr.solve(y).array() / col_scale.array()).matrix();
  if (!coef.allFinite()) return inf;
  Vec p{coef(0), coef(1), d1, d2, coef(2), coef(3)};
  // Score the actual recursion rather than the superposition.
  const double f = FreeRunNrmsae(ToModel(p, dt), u, h, p[4], p[5]);
  if (full != nullptr) *full = std::move(p);
  return f;
}

}  // namespace

double FlightLog::SamplePeriod() const {
  if (t.size() < 2) throw FormatError("flight log: need at least two rows");
  std::vector<double> d(t.size() - 1);
  for (std::size_t i = 1; i < t.size(); ++i) d[i - 1] = t[i] - t[i - 1];
  std::nth_element(d.begin(), d.begin() + d.size() / 2, d.end());
  return d[d.size() / 2];
}

void FlightLog::Validate() const {
  if (u.size() != t.size() || h.size() != t.size()) {
    throw FormatError("flight log: column lengths differ");
  }
  if (t.size() < 2) throw FormatError("flight log: need at least two rows");
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (!std::isfinite(t[i]) || !std::isfinite(u[i]) || !std::isfinite(h[i])) {
      throw FormatError("flight log: non-finite value in row " +
                        std::to_string(i));
    }
    if (i > 0 && !(t[i] > t[i - 1])) {
      throw FormatError("flight log: time not strictly increasing at row " +
                        std::to_string(i));
    }
  }
  const double dt = SamplePeriod();
  for (std::size_t i = 1; i < t.size(); ++i) {
    if (std::abs((t[i] - t[i - 1]) - dt) >= 0.1 * dt) {
      throw FormatError("flight log: non-uniform sampling at row " +
                        std::to_string(i));
    }
  }
}

FlightLog ParseFlightLog(const std::string& csv) {
  const std::vector<std::string> lines = DataLines(csv);
  if (lines.empty()) throw FormatError("flight log: empty file");
  const auto header = SplitFields(lines[0], ',');
  if (header.size() != 3 || header[0] != "t" || header[1] != "u" ||
      header[2] != "h") {
    throw FormatError("flight log: header must be 't,u,h'");
  }
  FlightLog log;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto f = SplitFields(lines[i], ',');
    if (f.size() != 3) {
      throw FormatError("flight log: expected 3 fields in data row " +
                        std::to_string(i));
    }
    log.t.push_back(ParseDouble(f[0]));
    log.u.push_back(ParseDouble(f[1]));
    log.h.push_back(ParseDouble(f[2]));
  }
  log.Validate();
  return log;
}

FlightLog LoadFlightLog(const std::string& path) {
  return ParseFlightLog(ReadFile(path));
}

std::string FlightLogToCsv(const FlightLog& log) {
  std::string out = "t,u,h\n";
  for (std::size_t i = 0; i < log.size(); ++i) {
    out += FormatDouble(log.t[i]) + ',' + FormatDouble(log.u[i]) + ',' +
           FormatDouble(log.h[i]) + '\n';
  }
  return out;
}

double Nrmsae(std::span<const double> pred, std::span<const double> obs) {
  if (pred.size() != obs.size() || obs.empty()) {
    throw FormatError("nrmsae: series must be non-empty and of equal length");
  }
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < obs.size(); ++i) {
    num += (obs[i] - pred[i]) * (obs[i] - pred[i]);
    den += obs[i] * obs[i];
  }
  if (den == 0.0) {
    throw ZeroDenominatorError("nrmsae: observed series is all zero");
  }
  return std::sqrt(num / den);
}

std::vector<double> FreeRun(const PlantModel& model, std::span<const double> u,
                            double h_first, double h_second) {
  const std::size_t n = u.size();
  std::vector<double> out;
  out.reserve(n);
  if (n > 0) out.push_back(h_first);
  if (n > 1) out.push_back(h_second);
  if (n < 3) return out;
  PlantState s{h_second, h_first, u[0]};
  for (std::size_t k = 2; k < n; ++k) {
    PlantStep next = StepPlant(model, s, u[k - 1]);
    s = next.state;
    out.push_back(next.altitude);
  }
  return out;
}

FitReport FitModel(const FlightLog& log, const FitOptions& options) {
  log.Validate();
  const std::size_t n = log.size();
  if (n < kMinFitSamples) {
    throw FormatError("sysid: need at least 50 samples, got " +
                      std::to_string(n));
  }
  const double dt = log.SamplePeriod();
  const double mean =
      std::accumulate(log.h.begin(), log.h.end(), 0.0) / static_cast<double>(n);
  std::vector<double> h(n);
  for (std::size_t i = 0; i < n; ++i) h[i] = log.h[i] - mean;

  const std::span<const double> u(log.u);
  const Vec theta = LeastSquaresArx(h, u, 0);
  // Search vector: a1, a2, d1, d2, then the two initial free-run states. The
  // initial states are free because a noisy first sample, propagated through
  // near-integrating dynamics, would otherwise dominate the error.
  const Vec stage1{theta[0], theta[1], theta[2], theta[3], h[0], h[1]};
  auto objective = [&](const Vec& p) {
    return FreeRunNrmsae(ToModel(p, dt), u, h, p[4], p[5]);
  };

  FitReport report;
  report.h_mean = mean;
  report.stage1_nrmsae = objective(stage1);

  Vec best = stage1;
  double best_f = report.stage1_nrmsae;
  if (best_f > 1e-12 || !std::isfinite(best_f)) {
    // For a fixed denominator the free run is linear in (a1, a2) and in the
    // two initial states, so those are solved exactly and only (d1, d2) is
    // searched: first over a pole grid, then by Nelder-Mead.
    auto profile = [&](double d1, double d2, Vec* full) {
      return ProfiledNrmsae(d1, d2, dt, u, h, full);
    };
    auto profile_f = [&](const Vec& d) {
      return profile(d[0], d[1], nullptr);
    };

    std::vector<std::pair<double, Vec>> seeds;
    seeds.push_back({profile(stage1[2], stage1[3], nullptr),
                     {stage1[2], stage1[3]}});
    for (const auto& [d1, d2] : DenominatorGrid()) {
      seeds.push_back({profile(d1, d2, nullptr), {d1, d2}});
    }
    std::sort(seeds.begin(), seeds.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    seeds.resize(std::min<std::size_t>(seeds.size(), 4));

    for (const auto& [f0, d0] : seeds) {
      if (!std::isfinite(f0)) continue;
      Vec d = d0;
      double step = options.initial_step;
      for (int r = 0; r < std::max(1, options.restarts); ++r) {
        const Vec cand =
            NelderMead(profile_f, d, {1.0, 1.0}, step, options.max_iterations);
        if (profile_f(cand) <= profile_f(d)) d = cand;
        step *= 0.1;
      }
      Vec full;
      const double f = profile(d[0], d[1], &full);
      if (f < best_f) {
        best = full;
        best_f = f;
      }
    }
  }

  report.model = ToModel(best, dt);
  report.nrmsae = best_f;
  if (std::isfinite(best_f)) {
    report.h_first = best[4];
    report.h_second = best[5];
    report.predicted = FreeRun(report.model, u, best[4], best[5]);
    report.residuals.resize(n);
    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      report.residuals[i] = h[i] - report.predicted[i];
      ss += report.residuals[i] * report.residuals[i];
    }
    report.rmsae = std::sqrt(ss / static_cast<double>(n));
  } else {
    report.rmsae = std::numeric_limits<double>::infinity();
  }
  return report;
}

std::pair<double, double> EstimateInitialState(const PlantModel& model,
                                               std::span<const double> u,
                                               std::span<const double> h) {
  const std::size_t n = h.size();
  if (u.size() != n || n < 2) {
    throw FormatError("initial state: need two or more paired samples");
  }
  const std::vector<double> zeros(n, 0.0);
  const std::vector<double> forced = FreeRun(model, u, 0.0, 0.0);
  const std::vector<double> e1 = FreeRun(model, zeros, 1.0, 0.0);
  const std::vector<double> e2 = FreeRun(model, zeros, 0.0, 1.0);
  Eigen::MatrixXd B(static_cast<Eigen::Index>(n), 2);
  Eigen::VectorXd y(static_cast<Eigen::Index>(n));
  for (std::size_t k = 0; k < n; ++k) {
    const auto r = static_cast<Eigen::Index>(k);
    B(r, 0) = e1[k];
    B(r, 1) = e2[k];
    y(r) = h[k] - forced[k];
  }
  const Eigen::Vector2d x = B.colPivHouseholderQr().solve(y);
  return {x(0), x(1)};
}

double ValidateModel(const PlantModel& model, const FlightLog& log,
                     InitialState init) {
  log.Validate();
  double h_first = log.h[0];
  double h_second = log.h[1];
  if (init == InitialState::kEstimated) {
    std::tie(h_first, h_second) = EstimateInitialState(model, log.u, log.h);
  }
  const std::vector<double> pred = FreeRun(model, log.u, h_first, h_second);
  double ss = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    ss += (log.h[i] - pred[i]) * (log.h[i] - pred[i]);
  }
  return std::sqrt(ss / static_cast<double>(pred.size()));
}

FlightLog GenerateLog(const LogGenerator& gen, Rng& rng) {
  gen.model.Validate();
  const auto n =
      static_cast<std::size_t>(std::llround(gen.duration / gen.model.dt));
  FlightLog log;
  log.t.reserve(n);
  log.u.reserve(n);
  log.h.reserve(n);
  std::uniform_int_distribution<int> hold(1, std::max(1, gen.hold_max));
  PlantState s = PlantState::AtRest(gen.h0);
  double h = gen.h0;
  double u = 0.0;
  int left = 0;
  for (std::size_t k = 0; k < n; ++k) {
    if (left == 0) {
      u = Uniform(rng, -gen.u_max, gen.u_max);
      left = hold(rng);
    }
    --left;
    const double z = std::normal_distribution<double>(0.0, 1.0)(rng);
    log.t.push_back(static_cast<double>(k) * gen.model.dt);
    log.u.push_back(u);
    log.h.push_back(h + gen.noise_sigma * z);
    PlantStep next = StepPlant(gen.model, s, u);
    s = next.state;
    h = next.altitude;
  }
  return log;
}

nlohmann::json FitReportToJson(const FitReport& r) {
  return {{"model",
           {{"a1", r.model.a1},
            {"a2", r.model.a2},
            {"d1", r.model.d1},
            {"d2", r.model.d2},
            {"dt", r.model.dt}}},
          {"nrmsae", r.nrmsae},
          {"rmsae", r.rmsae},
          {"stage1_nrmsae", r.stage1_nrmsae},
          {"h_mean", r.h_mean},
          {"samples", r.residuals.size()}};
}

std::string ResidualCsv(const FitReport& r, const FlightLog& log) {
  std::string out = "t,h_obs,h_model,residual\n";
  for (std::size_t i = 0; i < r.predicted.size(); ++i) {
    out += FormatDouble(log.t[i]) + ',' + FormatDouble(log.h[i] - r.h_mean) +
           ',' + FormatDouble(r.predicted[i]) + ',' +
           FormatDouble(r.residuals[i]) + '\n';
  }
  return out;
}

}  // namespace blimp
