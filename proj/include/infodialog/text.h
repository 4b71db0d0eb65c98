// Copyright 2026 The InfoDialog Authors.
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

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace infodialog {

std::string to_lower(std::string_view s);
std::string trim(std::string_view s);

// Splits on `sep` and trims every piece. Empty pieces are dropped.
std::vector<std::string> split_list(std::string_view s, char sep);

std::string join(const std::vector<std::string> &parts, std::string_view sep);

// Lower-cased word sequence used for case-insensitive phrase matching.
// Punctuation other than apostrophes is dropped.
std::vector<std::string> phrase_words(std::string_view s);

bool all_digits(std::string_view s);

// "HH:MM" (24 hour) <-> minutes after midnight.
std::optional<int> parse_hhmm(std::string_view s);
std::string format_hhmm(int minutes);

// Spoken form, e.g. 630 -> "10:30 am", 720 -> "12:00 pm".
std::string format_clock(int minutes);

// 64-bit FNV-1a over the bytes of `data`, rendered as 16 hex digits.
std::string fnv1a_hex(std::string_view data);

}  // namespace infodialog
