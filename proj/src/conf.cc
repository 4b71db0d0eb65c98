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

#include "infodialog/conf.h"

#include <fstream>
#include <sstream>

#include "infodialog/errors.h"
#include "infodialog/text.h"

namespace infodialog {

std::optional<std::pair<std::string, std::string>> ConfLine::key_value() const {
  auto eq = text.find('=');
  if (eq == std::string::npos) return std::nullopt;
  std::string key = trim(std::string_view(text).substr(0, eq));
  if (key.empty()) return std::nullopt;
  return std::make_pair(key, trim(std::string_view(text).substr(eq + 1)));
}

ConfFile ConfFile::parse(std::string_view text, std::string file_name) {
  ConfFile conf;
  conf.file = std::move(file_name);
  conf.sections.push_back(ConfSection{});
  int number = 0;
  size_t pos = 0;
  while (pos <= text.size()) {
    size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string line = trim(text.substr(pos, end - pos));
    ++number;
    pos = end + 1;
    if (line.empty() || line[0] == '#') continue;
    if (line[0] == '[') {
      if (line.back() != ']')
        throw ParseError(conf.file, number, "unterminated section header");
      std::istringstream words(line.substr(1, line.size() - 2));
      ConfSection section;
      section.number = number;
      if (!(words >> section.name))
        throw ParseError(conf.file, number, "empty section header");
      std::string arg;
      while (words >> arg) section.args.push_back(arg);
      conf.sections.push_back(std::move(section));
      continue;
    }
    conf.sections.back().lines.push_back(ConfLine{number, std::move(line)});
  }
  if (conf.sections.front().lines.empty()) conf.sections.erase(conf.sections.begin());
  return conf;
}

ConfFile ConfFile::load(const std::filesystem::path &path) {
  return parse(read_file(path), path.filename().string());
}

std::vector<const ConfSection *> ConfFile::find_all(std::string_view name) const {
  std::vector<const ConfSection *> out;
  for (const auto &s : sections)
    if (s.name == name) out.push_back(&s);
  return out;
}

std::string read_file(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace infodialog
