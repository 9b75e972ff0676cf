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

#include "blimp/genome_io.h"

#include <fstream>
#include <sstream>
#include <vector>

#include "blimp/errors.h"

namespace blimp {
namespace {

using nlohmann::json;

template <std::size_t N>
json Layer(const std::array<double, N>& v) {
  return {{"shape", {N}}, {"values", v}};
}

template <std::size_t R, std::size_t C>
json Layer(const std::array<std::array<double, C>, R>& m) {
  std::vector<double> flat;
  flat.reserve(R * C);
  for (const auto& row : m) flat.insert(flat.end(), row.begin(), row.end());
  return {{"shape", {R, C}}, {"values", flat}};
}

std::vector<double> ReadLayer(const json& j, const char* name,
                              std::vector<std::size_t> shape) {
  if (!j.contains(name)) {
    throw FormatError(std::string("genome: missing field '") + name + "'");
  }
  const json& layer = j.at(name);
  std::vector<std::size_t> got;
  std::vector<double> values;
  try {
    got = layer.at("shape").get<std::vector<std::size_t>>();
    values = layer.at("values").get<std::vector<double>>();
  } catch (const json::exception& e) {
    throw FormatError(std::string("genome: bad layer '") + name +
                      "': " + e.what());
  }
  if (got != shape) {
    throw FormatError(std::string("genome: shape mismatch for '") + name + "'");
  }
  std::size_t n = 1;
  for (std::size_t d : shape) n *= d;
  if (values.size() != n) {
    throw FormatError(std::string("genome: value count mismatch for '") +
                      name + "'");
  }
  return values;
}

template <std::size_t N>
void Read(const json& j, const char* name, std::array<double, N>& out) {
  const auto v = ReadLayer(j, name, {N});
  std::copy(v.begin(), v.end(), out.begin());
}

template <std::size_t R, std::size_t C>
void Read(const json& j, const char* name,
          std::array<std::array<double, C>, R>& out) {
  const auto v = ReadLayer(j, name, {R, C});
  for (std::size_t r = 0; r < R; ++r) {
    std::copy(v.begin() + r * C, v.begin() + (r + 1) * C, out[r].begin());
  }
}

void ExpectType(const json& j, std::string_view type) {
  if (GenomeTypeOf(j) != type) {
    throw FormatError("genome: expected type '" + std::string(type) +
                      "', got '" + GenomeTypeOf(j) + "'");
  }
}

}  // namespace

std::string GenomeTypeOf(const json& j) {
  if (!j.is_object() || !j.contains("type") || !j.at("type").is_string()) {
    throw FormatError("genome: missing type tag");
  }
  return j.at("type").get<std::string>();
}

json ToJson(const SnnGenome& g) {
  return {{"type", GenomeTraits<SnnGenome>::kName},
          {"w_hidden", Layer(g.w_hidden)},
          {"w_out", Layer(g.w_out)},
          {"theta", Layer(g.theta)},
          {"alpha_v", Layer(g.alpha_v)},
          {"tau_v", Layer(g.tau_v)},
          {"alpha_t", Layer(g.alpha_t)},
          {"tau_t", Layer(g.tau_t)}};
}

json ToJson(const AnnGenome& g) {
  return {{"type", GenomeTraits<AnnGenome>::kName},
          {"w1", Layer(g.w1)},
          {"b1", Layer(g.b1)},
          {"w2", Layer(g.w2)},
          {"b2", Layer(g.b2)},
          {"w3", Layer(g.w3)},
          {"b3", Layer(std::array<double, 1>{g.b3})}};
}

void FromJson(const json& j, SnnGenome& g) {
  ExpectType(j, GenomeTraits<SnnGenome>::kName);
  Read(j, "w_hidden", g.w_hidden);
  Read(j, "w_out", g.w_out);
  Read(j, "theta", g.theta);
  Read(j, "alpha_v", g.alpha_v);
  Read(j, "tau_v", g.tau_v);
  Read(j, "alpha_t", g.alpha_t);
  Read(j, "tau_t", g.tau_t);
}

void FromJson(const json& j, AnnGenome& g) {
  ExpectType(j, GenomeTraits<AnnGenome>::kName);
  Read(j, "w1", g.w1);
  Read(j, "b1", g.b1);
  Read(j, "w2", g.w2);
  Read(j, "b2", g.b2);
  Read(j, "w3", g.w3);
  std::array<double, 1> b3;
  Read(j, "b3", b3);
  g.b3 = b3[0];
}

void SaveJson(const std::string& path, const json& j) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError("cannot write '" + path + "'");
  out << j.dump(2) << '\n';
  if (!out) throw FormatError("write failed for '" + path + "'");
}

json LoadJson(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw FormatError("'" + path + "': " + e.what());
  }
}

}  // namespace blimp
