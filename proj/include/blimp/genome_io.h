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

// Genome files are JSON objects with a "type" tag and one entry per named
// layer, each holding its shape and a row-major value list:
//
//   {"type": "snn",
//    "w_hidden": {"shape": [10, 5], "values": [...]},
//    "w_out":    {"shape": [5],     "values": [...]}, ...}
//
// Doubles are written in shortest round-trip form, so save/load is bit-exact.

#ifndef BLIMP_GENOME_IO_H_
#define BLIMP_GENOME_IO_H_

#include <string>
#include <string_view>

#include "blimp/controllers.h"
#include "json.hpp"

namespace blimp {

template <class Genome>
struct GenomeTraits;

template <>
struct GenomeTraits<SnnGenome> {
  static constexpr std::string_view kName = "snn";
};

template <>
struct GenomeTraits<AnnGenome> {
  static constexpr std::string_view kName = "ann";
};

nlohmann::json ToJson(const SnnGenome& genome);
nlohmann::json ToJson(const AnnGenome& genome);

// Throw FormatError on a wrong type tag, missing field or shape mismatch.
void FromJson(const nlohmann::json& j, SnnGenome& genome);
void FromJson(const nlohmann::json& j, AnnGenome& genome);

template <class Genome>
Genome GenomeFromJson(const nlohmann::json& j) {
  Genome g;
  FromJson(j, g);
  return g;
}

// Reads the "type" tag without decoding the rest.
std::string GenomeTypeOf(const nlohmann::json& j);

void SaveJson(const std::string& path, const nlohmann::json& j);
nlohmann::json LoadJson(const std::string& path);

template <class Genome>
void SaveGenome(const std::string& path, const Genome& genome) {
  SaveJson(path, ToJson(genome));
}

template <class Genome>
Genome LoadGenome(const std::string& path) {
  return GenomeFromJson<Genome>(LoadJson(path));
}

}  // namespace blimp

#endif  // BLIMP_GENOME_IO_H_
