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

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace infodialog {

// Line-oriented sectioned configuration file.
//
//   # full-line comment
//   [section arg1 arg2]
//   key = value
//   free-form line
//
// Lines before the first header belong to a section with an empty name.
// Blank lines and comment lines are skipped; everything else is kept
// verbatim (trimmed) with its 1-based line number so that callers can
// report ParseError at the offending location.
struct ConfLine {
  int number = 0;
  std::string text;

  // Splits "key = value" at the first '='. Returns nullopt when there is
  // no '=' or the key is empty.
  std::optional<std::pair<std::string, std::string>> key_value() const;

  bool operator==(const ConfLine &) const = default;
};

struct ConfSection {
  std::string name;
  std::vector<std::string> args;
  int number = 0;
  std::vector<ConfLine> lines;

  bool operator==(const ConfSection &) const = default;
};

struct ConfFile {
  std::string file;  // name used in error messages
  std::vector<ConfSection> sections;

  static ConfFile parse(std::string_view text, std::string file_name);
  static ConfFile load(const std::filesystem::path &path);

  std::vector<const ConfSection *> find_all(std::string_view name) const;
};

std::string read_file(const std::filesystem::path &path);

}  // namespace infodialog
