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

#include "blimp/controllers.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "blimp/errors.h"

namespace blimp {

void ControlLimits::Validate() const {
  if (!(u_max > 0.0) || !std::isfinite(u_max)) {
    throw FormatError("controller: u_max must be positive");
  }
}

std::string_view PidModeName(PidMode mode) {
  return mode == PidMode::kLiteral ? "literal" : "accumulating";
}

PidMode ParsePidMode(std::string_view name) {
  if (name == "literal") return PidMode::kLiteral;
  if (name == "accumulating") return PidMode::kAccumulating;
  throw FormatError("unknown pid mode '" + std::string(name) + "'");
}

PidResult PidStep(const PidParams& params, const PidState& state, double e,
                  const ControlLimits& limits) {
  PidState next = state;
  double u = params.kp * e + params.kd / params.T * (e - state.e_prev);
  if (params.mode == PidMode::kLiteral) {
    u += params.ki * params.T * (e + state.e_prev);
  } else {
    next.integ += params.T * (e + state.e_prev) / 2.0;
    u += params.ki * next.integ;
  }
  next.e_prev = e;
  return {next, Clamp(u, limits), u};
}

ParamDomain DomainOf(ParamClass cls) {
  switch (cls) {
    case ParamClass::kWeight:
    case ParamClass::kBias:
      return {-5.0, 5.0};
    case ParamClass::kThreshold:
    case ParamClass::kTau:
      return {0.0, 1.0};
    case ParamClass::kAlpha:
      return {0.0, 2.0};
  }
  return {0.0, 0.0};
}

double AnnForward(const AnnGenome& g, double e, const ControlLimits& limits) {
  std::array<double, AnnGenome::kHidden1> h1;
  for (std::size_t i = 0; i < h1.size(); ++i) {
    h1[i] = std::tanh(g.w1[i] * e + g.b1[i]);
  }
  std::array<double, AnnGenome::kHidden2> h2;
  for (std::size_t i = 0; i < h2.size(); ++i) {
    double z = g.b2[i];
    for (std::size_t j = 0; j < h1.size(); ++j) z += g.w2[i][j] * h1[j];
    h2[i] = std::tanh(z);
  }
  double u = g.b3;
  for (std::size_t i = 0; i < h2.size(); ++i) u += g.w3[i] * h2[i];
  return Clamp(u, limits);
}

std::size_t EncodeIndex(double e) {
  // Number of lower edges at or below e. NaN compares false everywhere and
  // lands in interval 0.
  std::size_t n = 0;
  for (double edge : kEncoderEdges) {
    if (e >= edge) ++n;
  }
  return n;
}

InputSpikes EncodeError(double e) {
  InputSpikes s{};
  s[EncodeIndex(e)] = 1;
  return s;
}

SnnResult SnnStep(const SnnGenome& g, const SnnState& state,
                  const InputSpikes& spikes, const ControlLimits& limits) {
  SnnResult r{state, {}, 0.0};
  double drive = 0.0;
  for (std::size_t i = 0; i < kHiddenNeurons; ++i) {
    double current = 0.0;
    for (std::size_t j = 0; j < kInputNeurons; ++j) {
      if (spikes[j]) current += g.w_hidden[j][i];
    }
    double v = g.tau_v[i] * state.v[i] + g.alpha_v[i] * current;
    std::uint8_t fired = 0;
    if (v >= g.theta[i]) {
      fired = 1;
      v = 0.0;
    }
    r.state.v[i] = v;
    r.spikes[i] = fired;
    r.state.x[i] = g.tau_t[i] * state.x[i] + g.alpha_t[i] * fired;
    drive += g.w_out[i] * r.state.x[i];
  }
  r.u = limits.u_max * std::tanh(drive);
  return r;
}

// ---------------------------------------------------------------------------

PidController::PidController(const PidParams& params,
                             const ControlLimits& limits)
    : params_(params), limits_(limits) {
  limits_.Validate();
  if (!(params_.T > 0.0)) throw FormatError("pid: T must be positive");
}

ControlOutput PidController::Step(double error) {
  PidResult r = PidStep(params_, state_, error, limits_);
  state_ = r.state;
  return {r.u, r.u, 0.0};
}

std::unique_ptr<Controller> PidController::Clone() const {
  auto c = std::make_unique<PidController>(params_, limits_);
  c->state_ = state_;
  return c;
}

AnnController::AnnController(const AnnGenome& genome,
                             const ControlLimits& limits)
    : genome_(genome), limits_(limits) {
  limits_.Validate();
}

ControlOutput AnnController::Step(double error) {
  const double u = AnnForward(genome_, error, limits_);
  return {u, u, 0.0};
}

std::unique_ptr<Controller> AnnController::Clone() const {
  return std::make_unique<AnnController>(genome_, limits_);
}

SnnController::SnnController(const SnnGenome& genome,
                             const ControlLimits& limits)
    : genome_(genome), limits_(limits) {
  limits_.Validate();
}

ControlOutput SnnController::Step(double error) {
  SnnResult r = SnnStep(genome_, state_, EncodeError(error), limits_);
  state_ = r.state;
  return {r.u, r.u, 0.0};
}

std::unique_ptr<Controller> SnnController::Clone() const {
  auto c = std::make_unique<SnnController>(genome_, limits_);
  c->state_ = state_;
  return c;
}

HybridController::HybridController(std::unique_ptr<Controller> net,
                                   const PdGains& pd, double T,
                                   const ControlLimits& limits)
    : net_(std::move(net)),
      pd_{pd.kp, 0.0, pd.kd, T, PidMode::kLiteral},
      limits_(limits) {
  limits_.Validate();
  if (!net_) throw FormatError("hybrid: missing network controller");
  if (!(T > 0.0)) throw FormatError("hybrid: T must be positive");
}

ControlOutput HybridController::Step(double error) {
  const ControlOutput net = net_->Step(error);
  PidResult pd = PidStep(pd_, pd_state_, error, limits_);
  pd_state_ = pd.state;
  return {Clamp(net.total + pd.u_raw, limits_), net.total, pd.u_raw};
}

void HybridController::Reset() {
  net_->Reset();
  pd_state_ = {};
}

std::unique_ptr<Controller> HybridController::Clone() const {
  auto c = std::make_unique<HybridController>(
      net_->Clone(), PdGains{pd_.kp, pd_.kd}, pd_.T, limits_);
  c->pd_state_ = pd_state_;
  return c;
}

}  // namespace blimp
