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

#ifndef BLIMP_CONTROLLERS_H_
#define BLIMP_CONTROLLERS_H_

#include <array>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <string_view>

namespace blimp {

struct ControlLimits {
  double u_max = 3.3;  // V
  void Validate() const;
};

inline double Clamp(double u, const ControlLimits& limits) {
  if (u > limits.u_max) return limits.u_max;
  if (u < -limits.u_max) return -limits.u_max;
  return u;
}

// ---------------------------------------------------------------------------
// PID

enum class PidMode {
  // u = Kp e_k + Kd/T (e_k - e_{k-1}) + Ki T (e_k + e_{k-1}); no memory beyond
  // the previous error.
  kLiteral,
  // Ki term uses a trapezoid-accumulated integral of the error.
  kAccumulating,
};

std::string_view PidModeName(PidMode mode);
PidMode ParsePidMode(std::string_view name);

struct PidParams {
  double kp = 6.0;
  double ki = 0.4;
  double kd = 0.9;
  double T = 0.2;  // s
  PidMode mode = PidMode::kLiteral;
};

struct PidState {
  double e_prev = 0.0;
  double integ = 0.0;  // m s
};

struct PidResult {
  PidState state;
  double u;      // clamped
  double u_raw;  // before clamping
};

PidResult PidStep(const PidParams& params, const PidState& state, double e,
                  const ControlLimits& limits);

// ---------------------------------------------------------------------------
// Parameter classes shared by the evolvable genomes.

enum class ParamClass : std::uint8_t { kWeight, kBias, kThreshold, kAlpha, kTau };

struct ParamDomain {
  double lo;
  double hi;
};

// Closed domain every evolved parameter of the class must stay in.
ParamDomain DomainOf(ParamClass cls);

// ---------------------------------------------------------------------------
// ANN, 1-3-2-1 with tanh on the first two layers and a linear output.

struct AnnGenome {
  static constexpr std::size_t kHidden1 = 3;
  static constexpr std::size_t kHidden2 = 2;
  static constexpr std::size_t kParamCount =
      kHidden1 * 2 + kHidden2 * kHidden1 + kHidden2 + kHidden2 + 1;

  std::array<double, kHidden1> w1{};                          // 3x1
  std::array<double, kHidden1> b1{};
  std::array<std::array<double, kHidden1>, kHidden2> w2{};    // 2x3
  std::array<double, kHidden2> b2{};
  std::array<double, kHidden2> w3{};                          // 1x2
  double b3 = 0.0;

  // Visits every evolvable parameter in serialization order.
  template <class F>
  void ForEachParam(F&& f) {
    Visit(*this, f);
  }
  template <class F>
  void ForEachParam(F&& f) const {
    Visit(*this, f);
  }

  bool operator==(const AnnGenome&) const = default;

 private:
  template <class Self, class F>
  static void Visit(Self& g, F& f) {
    for (auto& w : g.w1) f(ParamClass::kWeight, w);
    for (auto& b : g.b1) f(ParamClass::kBias, b);
    for (auto& row : g.w2)
      for (auto& w : row) f(ParamClass::kWeight, w);
    for (auto& b : g.b2) f(ParamClass::kBias, b);
    for (auto& w : g.w3) f(ParamClass::kWeight, w);
    f(ParamClass::kBias, g.b3);
  }
};

double AnnForward(const AnnGenome& genome, double e,
                  const ControlLimits& limits);

// ---------------------------------------------------------------------------
// SNN: 10 position-coded inputs, 5 LIF neurons, 1 tanh readout over traces.

inline constexpr std::size_t kInputNeurons = 10;
inline constexpr std::size_t kHiddenNeurons = 5;

using InputSpikes = std::array<std::uint8_t, kInputNeurons>;

// Lower bounds of input intervals 1..9. Interval j (1 <= j <= 8) covers
// [kEncoderEdges[j-1], kEncoderEdges[j]); interval 0 is everything below the
// first edge and interval 9 everything at or above the last.
inline constexpr std::array<double, kInputNeurons - 1> kEncoderEdges = {
    -0.4, -0.3, -0.2, -0.1, 0.0, 0.1, 0.2, 0.3, 0.4};

std::size_t EncodeIndex(double e);
InputSpikes EncodeError(double e);

struct SnnGenome {
  static constexpr std::size_t kParamCount =
      kInputNeurons * kHiddenNeurons + 6 * kHiddenNeurons;

  // w_hidden[j][i]: synapse from input j to hidden neuron i.
  std::array<std::array<double, kHiddenNeurons>, kInputNeurons> w_hidden{};
  std::array<double, kHiddenNeurons> w_out{};
  std::array<double, kHiddenNeurons> theta{};
  std::array<double, kHiddenNeurons> alpha_v{};
  std::array<double, kHiddenNeurons> tau_v{};
  std::array<double, kHiddenNeurons> alpha_t{};
  std::array<double, kHiddenNeurons> tau_t{};

  template <class F>
  void ForEachParam(F&& f) {
    Visit(*this, f);
  }
  template <class F>
  void ForEachParam(F&& f) const {
    Visit(*this, f);
  }

  bool operator==(const SnnGenome&) const = default;

 private:
  template <class Self, class F>
  static void Visit(Self& g, F& f) {
    for (auto& row : g.w_hidden)
      for (auto& w : row) f(ParamClass::kWeight, w);
    for (auto& w : g.w_out) f(ParamClass::kWeight, w);
    for (auto& v : g.theta) f(ParamClass::kThreshold, v);
    for (auto& v : g.alpha_v) f(ParamClass::kAlpha, v);
    for (auto& v : g.tau_v) f(ParamClass::kTau, v);
    for (auto& v : g.alpha_t) f(ParamClass::kAlpha, v);
    for (auto& v : g.tau_t) f(ParamClass::kTau, v);
  }
};

struct SnnState {
  std::array<double, kHiddenNeurons> v{};  // membrane potentials
  std::array<double, kHiddenNeurons> x{};  // spike traces

  bool operator==(const SnnState&) const = default;
};

struct SnnResult {
  SnnState state;
  std::array<std::uint8_t, kHiddenNeurons> spikes;
  double u;
};

// One network update. Per hidden neuron: synaptic current, leaky membrane
// update, threshold test (v >= theta fires and resets v to 0), trace update.
// The output is u_max * tanh(w_out . x).
SnnResult SnnStep(const SnnGenome& genome, const SnnState& state,
                  const InputSpikes& spikes, const ControlLimits& limits);

// True when every parameter lies inside its class domain.
template <class Genome>
bool WithinDomain(const Genome& genome) {
  bool ok = true;
  genome.ForEachParam([&](ParamClass cls, double v) {
    const ParamDomain d = DomainOf(cls);
    ok = ok && v >= d.lo && v <= d.hi;
  });
  return ok;
}

// ---------------------------------------------------------------------------
// Stateful controllers behind one interface: error in, motor voltage out.

struct ControlOutput {
  double total = 0.0;  // clamped command sent to the motors
  double net = 0.0;    // primary controller's own output
  double pd = 0.0;     // parallel PD contribution, unclamped
};

class Controller {
 public:
  virtual ~Controller() = default;
  virtual ControlOutput Step(double error) = 0;
  // Zeroes all episode-carried state.
  virtual void Reset() = 0;
  virtual std::unique_ptr<Controller> Clone() const = 0;
};

class PidController final : public Controller {
 public:
  PidController(const PidParams& params, const ControlLimits& limits);
  ControlOutput Step(double error) override;
  void Reset() override { state_ = {}; }
  std::unique_ptr<Controller> Clone() const override;
  const PidState& state() const { return state_; }

 private:
  PidParams params_;
  ControlLimits limits_;
  PidState state_;
};

class AnnController final : public Controller {
 public:
  AnnController(const AnnGenome& genome, const ControlLimits& limits);
  ControlOutput Step(double error) override;
  void Reset() override {}
  std::unique_ptr<Controller> Clone() const override;

 private:
  AnnGenome genome_;
  ControlLimits limits_;
};

class SnnController final : public Controller {
 public:
  SnnController(const SnnGenome& genome, const ControlLimits& limits);
  ControlOutput Step(double error) override;
  void Reset() override { state_ = {}; }
  std::unique_ptr<Controller> Clone() const override;
  const SnnState& state() const { return state_; }

 private:
  SnnGenome genome_;
  ControlLimits limits_;
  SnnState state_;
};

struct PdGains {
  double kp = 0.0;
  double kd = 0.0;
};

// Evolved network plus a small parallel PD term. The sum is clamped; the two
// components are reported as produced.
class HybridController final : public Controller {
 public:
  HybridController(std::unique_ptr<Controller> net, const PdGains& pd,
                   double T, const ControlLimits& limits);
  ControlOutput Step(double error) override;
  void Reset() override;
  std::unique_ptr<Controller> Clone() const override;

 private:
  std::unique_ptr<Controller> net_;
  PidParams pd_;
  ControlLimits limits_;
  PidState pd_state_;
};

}  // namespace blimp

#endif  // BLIMP_CONTROLLERS_H_
