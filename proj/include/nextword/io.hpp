// Copyright 2026 The nextword Authors
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

#pragma once

#include <string>
#include <vector>

namespace nextword {

// Writes content to path via a temporary file in the same directory followed
// by a rename, so readers never observe a half-written file.
void atomic_write(const std::string& path, const std::string& content);

std::string read_file(const std::string& path);  // throws DataError if missing
std::vector<std::string> read_lines(const std::string& path);
bool file_exists(const std::string& path);

std::vector<std::string> split_ws(const std::string& line);
std::vector<std::string> split_tab(const std::string& line);

// Shortest decimal form that round-trips the exact double.
std::string fmt_double(double v);
// Fraction rendered as a percent with three fixed decimals, e.g. 12.713.
std::string pct(double v);
double parse_double(const std::string& s);  // throws DataError on junk
int64_t parse_int(const std::string& s);    // throws DataError on junk

}  // namespace nextword
