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
#include <string>
#include <variant>

namespace infodialog {

// A field or cell value: either a number (also used for minutes after
// midnight) or canonical text.
using Value = std::variant<std::int64_t, std::string>;

inline bool is_number(const Value &v) {
  return std::holds_alternative<std::int64_t>(v);
}

inline std::string to_string(const Value &v) {
  if (auto n = std::get_if<std::int64_t>(&v)) return std::to_string(*n);
  return std::get<std::string>(v);
}

}  // namespace infodialog
