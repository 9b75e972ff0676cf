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

#include "blimp/config.h"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <charconv>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <sstream>

#include "blimp/errors.h"
#include "blimp/harness.h"
#include "blimp/text.h"

namespace blimp {
namespace {

namespace pt = boost::property_tree;

using Setter = std::function<void(const std::string&)>;
using SectionTable = std::map<std::string, Setter>;

int ParseInt(const std::string& v) {
  const double d = ParseDouble(v);
  if (d != static_cast<double>(static_cast<long long>(d)) ||
      std::abs(d) > std::numeric_limits<int>::max()) {
    throw FormatError("not an integer: '" + v + "'");
  }
  return static_cast<int>(d);
}

std::uint64_t ParseSeed(const std::string& v) {
  const std::string_view t = Trim(v);
  std::uint64_t out = 0;
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), out);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty()) {
    throw FormatError("not a seed: '" + v + "'");
  }
  return out;
}

bool ParseBool(const std::string& v) {
  const std::string_view t = Trim(v);
  if (t == "true" || t == "1" || t == "yes" || t == "on") return true;
  if (t == "false" || t == "0" || t == "no" || t == "off") return false;
  throw FormatError("not a boolean: '" + v + "'");
}

std::map<std::string, SectionTable> MakeTables(RunConfig& c, double& wp_hold,
                                               std::vector<double>& wps,
                                               bool& wps_set) {
  auto real = [](double& dst) {
    return [&dst](const std::string& v) { dst = ParseDouble(v); };
  };
  auto integer = [](int& dst) {
    return [&dst](const std::string& v) { dst = ParseInt(v); };
  };
  auto flag = [](bool& dst) {
    return [&dst](const std::string& v) { dst = ParseBool(v); };
  };
  EvolutionConfig& e = c.evolution;
  PlantModel& p = e.setup.plant;
  RadarModel& r = e.setup.sensor.radar;

  std::map<std::string, SectionTable> t;
  t["plant"] = {{"a1", real(p.a1)},
                {"a2", real(p.a2)},
                {"d1", real(p.d1)},
                {"d2", real(p.d2)},
                {"dt", real(p.dt)}};
  t["radar"] = {{"noise_sigma", real(r.noise_sigma)},
                {"quantization", real(r.quantization)},
                {"median_window", integer(r.median_window)},
                {"avg_window", integer(r.avg_window)},
                {"filtered", flag(e.setup.sensor.filtered)}};
  t["controller"] = {{"u_max", real(e.setup.limits.u_max)}};
  t["controller.pid"] = {
      {"kp", real(c.pid.kp)},
      {"ki", real(c.pid.ki)},
      {"kd", real(c.pid.kd)},
      {"mode", [&c](const std::string& v) {
         c.pid.mode = ParsePidMode(Trim(v));
       }}};
  for (auto [name, net] :
       {std::pair{"controller.ann", &c.ann}, std::pair{"controller.snn", &c.snn}}) {
    t[name] = {{"kp", real(net->pd.kp)},
               {"kd", real(net->pd.kd)},
               {"hybrid", flag(net->hybrid)}};
  }
  t["evolution"] = {
      {"pop_size", integer(e.pop_size)},
      {"tournament_size", integer(e.tournament_size)},
      {"p_mut_individual", real(e.p_mut_individual)},
      {"p_mut_param", real(e.p_mut_param)},
      {"generations", integer(e.generations)},
      {"hof_size", integer(e.hof_size)},
      {"reeval_sets", integer(e.reeval_sets)},
      {"threads", integer(e.threads)},
      {"seed", [&e](const std::string& v) { e.seed = ParseSeed(v); }},
      {"mut_weight", real(e.ranges.weight)},
      {"mut_bias", real(e.ranges.bias)},
      {"mut_threshold", real(e.ranges.threshold)},
      {"mut_alpha", real(e.ranges.alpha)},
      {"mut_tau", real(e.ranges.tau)}};
  t["episode"] = {{"n_setpoints", integer(e.episode.n_setpoints)},
                  {"setpoint_min", real(e.episode.setpoint_min)},
                  {"setpoint_max", real(e.episode.setpoint_max)},
                  {"hold", real(e.episode.hold)}};
  t["eval"] = {{"waypoints",
                [&](const std::string& v) {
                  wps.clear();
                  for (auto f : SplitFields(v, ',')) wps.push_back(ParseDouble(f));
                  wps_set = true;
                }},
               {"hold", real(wp_hold)},
               {"seed", [&c](const std::string& v) { c.eval_seed = ParseSeed(v); }},
               {"smooth_window", [&c](const std::string& v) {
                  const int w = ParseInt(v);
                  if (w < 1) throw FormatError("smooth_window must be >= 1");
                  c.smooth_window = static_cast<std::size_t>(w);
                }}};
  return t;
}

void ApplyOverride(pt::ptree& tree, const std::string& item) {
  const auto eq = item.find('=');
  const auto dot = item.substr(0, eq).rfind('.');
  if (eq == std::string::npos || dot == std::string::npos || dot == 0) {
    throw FormatError("override must look like section.key=value: '" + item +
                      "'");
  }
  const std::string section = item.substr(0, dot);
  const std::string key = item.substr(dot + 1, eq - dot - 1);
  auto it = tree.find(section);
  pt::ptree* sec = nullptr;
  if (it == tree.not_found()) {
    sec = &tree.push_back({section, pt::ptree()})->second;
  } else {
    sec = &it->second;
  }
  auto kit = sec->find(key);
  if (kit == sec->not_found()) {
    sec->push_back({key, pt::ptree(item.substr(eq + 1))});
  } else {
    kit->second.data() = item.substr(eq + 1);
  }
}

}  // namespace

RunConfig::RunConfig() : plan(DefaultWaypointPlan()) {}

void RunConfig::Validate() const {
  evolution.Validate();
  ValidatePlan(plan);
  if (smooth_window < 1) throw FormatError("eval: smooth_window must be >= 1");
}

RunConfig ParseConfig(const std::string& text,
                      const std::vector<std::string>& overrides) {
  pt::ptree tree;
  try {
    std::istringstream in(text);
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw FormatError(std::string("config: ") + e.what());
  }
  for (const auto& o : overrides) ApplyOverride(tree, o);

  RunConfig c;
  double wp_hold = 60.0;
  std::vector<double> wps;
  bool wps_set = false;
  auto tables = MakeTables(c, wp_hold, wps, wps_set);

  for (const auto& [section, body] : tree) {
    if (!body.data().empty() && body.empty()) {
      throw FormatError("config: key '" + section + "' outside any section");
    }
    auto table = tables.find(section);
    if (table == tables.end()) {
      throw FormatError("config: unknown section [" + section + "]");
    }
    for (const auto& [key, value] : body) {
      auto setter = table->second.find(key);
      if (setter == table->second.end()) {
        throw FormatError("config: unknown key '" + key + "' in [" + section +
                          "]");
      }
      try {
        setter->second(value.data());
      } catch (const FormatError& e) {
        throw FormatError("config: [" + section + "] " + key + ": " + e.what());
      }
    }
  }

  if (wps_set || wp_hold != 60.0) {
    if (!wps_set) {
      for (const Segment& s : DefaultWaypointPlan()) wps.push_back(s.setpoint);
    }
    c.plan.clear();
    for (double w : wps) c.plan.push_back({w, wp_hold});
  }
  c.pid.T = c.plant().dt;
  c.Validate();
  return c;
}

RunConfig LoadConfig(const std::string& path,
                     const std::vector<std::string>& overrides) {
  return ParseConfig(ReadFile(path), overrides);
}

}  // namespace blimp
