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

#include "infodialog/interactor.h"

#include <algorithm>
#include <cctype>
#include <iostream>
#include <random>

#include "infodialog/errors.h"
#include "infodialog/text.h"

namespace infodialog {

namespace {

bool predicate_holds(const SlotPredicate &p, const InteractionTemplate &t) {
  switch (p.kind) {
    case SlotPredicate::Kind::kPresent: return t.has(p.slot);
    case SlotPredicate::Kind::kAbsent: return !t.has(p.slot);
    case SlotPredicate::Kind::kEquals: return t.has(p.slot) && t.text(p.slot) == p.value;
  }
  return false;
}

}  // namespace

const TemplateRule *match_rule(const InteractionTemplate &t, const std::vector<TemplateRule> &rules) {
  for (const auto &r : rules) {
    if (r.act != t.act) continue;
    if (std::all_of(r.predicates.begin(), r.predicates.end(),
                    [&](const SlotPredicate &p) { return predicate_holds(p, t); }))
      return &r;
  }
  return nullptr;
}

std::string expand(std::string_view output, const InteractionTemplate &t) {
  std::string out;
  size_t i = 0;
  while (i < output.size()) {
    char c = output[i];
    if (c == '\\' && i + 1 < output.size() && output[i + 1] == 'n') {
      out += '\n';
      i += 2;
      continue;
    }
    if (c != '{') {
      out += c;
      ++i;
      continue;
    }
    auto close = output.find('}', i);
    if (close == std::string_view::npos) {
      out += output.substr(i);
      break;
    }
    std::string body(output.substr(i + 1, close - i - 1));
    i = close + 1;
    if (body.rfind("list:", 0) == 0) {
      auto parts = body.substr(5);
      // list:slot|sep|last
      std::vector<std::string> fields;
      size_t start = 0;
      for (size_t p; (p = parts.find('|', start)) != std::string::npos; start = p + 1)
        fields.push_back(parts.substr(start, p - start));
      fields.push_back(parts.substr(start));
      std::string sep = fields.size() > 1 ? fields[1] : ", ";
      std::string last = fields.size() > 2 ? fields[2] : sep;
      auto items = t.list(fields[0]);
      for (size_t k = 0; k < items.size(); ++k) {
        if (k > 0) out += (k + 1 == items.size()) ? last : sep;
        out += items[k];
      }
    } else if (body.rfind("numbered:", 0) == 0) {
      auto items = t.list(body.substr(9));
      for (size_t k = 0; k < items.size(); ++k) {
        if (k > 0) out += '\n';
        out += std::to_string(k + 1) + ". " + items[k];
      }
    } else {
      out += t.text(body);
    }
  }
  return out;
}

std::string render(const InteractionTemplate &t, const std::vector<TemplateRule> &rules,
                   const RenderOptions &options) {
  const TemplateRule *rule = match_rule(t, rules);
  if (!rule) throw NoRuleMatched(std::string(name_of(t.act)));
  size_t pick = 0;
  if (options.vary && rule->variants.size() > 1) {
    std::mt19937 gen(options.seed ^ (static_cast<std::uint32_t>(options.turn) * 0x9E3779B9u));
    pick = gen() % rule->variants.size();
  }
  std::string text = expand(rule->variants[pick], t);
  if (!text.empty()) text[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(text[0])));
  return text;
}

std::string render_or_apologize(const InteractionTemplate &t, const std::vector<TemplateRule> &rules,
                                const RenderOptions &options) {
  try {
    return render(t, rules, options);
  } catch (const NoRuleMatched &e) {
    std::cerr << "render: " << e.what() << "\n";
    return std::string(kGenericApology);
  }
}

std::string help_text(UpperState state, const std::optional<LowerState> &sub_state,
                      const std::optional<std::string> &expected_field, const DomainPack &pack) {
  std::vector<std::string> keys;
  auto add = [&](std::string_view name) {
    if (expected_field) keys.push_back(std::string(name) + " " + *expected_field);
    keys.emplace_back(name);
  };
  if (sub_state) add(name_of(*sub_state));
  add(name_of(state));
  keys.emplace_back("*");
  for (const auto &k : keys)
    if (auto it = pack.help.find(k); it != pack.help.end()) return it->second;
  return {};
}

InteractionTemplate meta_answer(const std::string &semantic_class, const DomainPack &pack, size_t cap) {
  std::vector<std::string> values;
  for (const auto &e : pack.lexicon.entries)
    if (e.semantic_class == semantic_class &&
        std::find(values.begin(), values.end(), e.canonical) == values.end())
      values.push_back(e.canonical);
  InteractionTemplate t;
  t.act = Act::kMetaAnswer;
  std::string topic = semantic_class;
  std::replace(topic.begin(), topic.end(), '_', ' ');
  if (auto fields = pack.schema.fields_of_class(semantic_class); fields.size() == 1)
    topic = fields[0]->label;
  auto words = phrase_words(topic);
  if (!words.empty()) {
    std::string &w = words.back();
    if (w.size() > 1 && w.back() == 'y' && std::string("aeiou").find(w[w.size() - 2]) == std::string::npos)
      w = w.substr(0, w.size() - 1) + "ies";
    else if (w.back() == 's' || w.back() == 'x')
      w += "es";
    else
      w += "s";
  }
  t.slots["topic"] = join(words, " ");
  t.slots["total"] = std::to_string(values.size());
  if (values.size() > cap) {
    t.slots["more"] = std::to_string(values.size() - cap);
    values.resize(cap);
  }
  t.slots["values"] = values;
  return t;
}

}  // namespace infodialog
