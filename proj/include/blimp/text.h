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

#ifndef BLIMP_TEXT_H_
#define BLIMP_TEXT_H_

#include <string>
#include <string_view>
#include <vector>

namespace blimp {

// Shortest decimal form that parses back to the same double; "inf", "-inf"
// and "nan" for non-finite values.
std::string FormatDouble(double value);

// Whole-string parse; throws FormatError on garbage or trailing characters.
double ParseDouble(std::string_view text);

std::string_view Trim(std::string_view text);
std::vector<std::string_view> SplitFields(std::string_view line, char sep);

// Splits into lines, dropping '\r' and skipping blank lines and lines whose
// first non-blank character is '#'.
std::vector<std::string> DataLines(const std::string& content);

std::string ReadFile(const std::string& path);
void WriteFile(const std::string& path, const std::string& content);

}  // namespace blimp

#endif  // BLIMP_TEXT_H_
