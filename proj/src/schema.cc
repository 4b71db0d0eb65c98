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

#include "infodialog/schema.h"

#include <algorithm>
#include <set>

#include "infodialog/conf.h"
#include "infodialog/errors.h"
#include "infodialog/text.h"

namespace infodialog {

bool is_builtin_class(std::string_view cls) {
  return cls == kTimeOfDayClass || cls == kDateClass || cls == kNumberClass;
}

const FieldSpec *ApplicationSchema::field(std::string_view name) const {
  for (const auto &f : fields)
    if (f.name == name) return &f;
  return nullptr;
}

int ApplicationSchema::field_index(std::string_view name) const {
  for (size_t i = 0; i < fields.size(); ++i)
    if (fields[i].name == name) return static_cast<int>(i);
  return -1;
}

std::vector<const FieldSpec *> ApplicationSchema::fields_of_class(std::string_view cls) const {
  std::vector<const FieldSpec *> out;
  for (const auto &f : fields)
    if (f.semantic_class == cls) out.push_back(&f);
  return out;
}

const QueryTypeSpec *ApplicationSchema::query_type(std::string_view name) const {
  for (const auto &q : query_types)
    if (q.name == name) return &q;
  return nullptr;
}

const ReportColumn *ApplicationSchema::report_column(std::string_view name) const {
  for (const auto &r : report_columns)
    if (r.name == name) return &r;
  return nullptr;
}

const RelaxPolicy *ApplicationSchema::relax_policy(std::string_view field) const {
  auto it = relaxable_fields.find(std::string(field));
  return it == relaxable_fields.end() ? nullptr : &it->second;
}

size_t Lexicon::max_words() const {
  size_t n = 0;
  for (const auto &e : entries) n = std::max(n, e.words.size());
  return n;
}

std::vector<TermReading> resolve_user_term(std::string_view term,
                                           const std::optional<std::string> &class_filter,
                                           const Lexicon &lexicon) {
  std::vector<TermReading> out;
  auto words = phrase_words(term);
  if (words.empty()) return out;
  for (const auto &e : lexicon.entries) {
    if (e.words != words) continue;
    if (class_filter && e.semantic_class != *class_filter) continue;
    out.push_back({e.canonical, e.semantic_class});
  }
  return out;
}

std::optional<WordCategory> WordLists::category(const std::string &word) const {
  auto it = categories.find(word);
  if (it == categories.end()) return std::nullopt;
  return it->second;
}

std::optional<std::string> ScrapeSpec::code_for_window(int minutes) const {
  for (const auto &[m, code] : window_codes)
    if (m == minutes) return code;
  return std::nullopt;
}

std::optional<int> ScrapeSpec::window_for_code(std::string_view code) const {
  for (const auto &[m, c] : window_codes)
    if (c == code) return m;
  return std::nullopt;
}

const CgiForm *DomainPack::form(std::string_view id) const {
  for (const auto &f : forms)
    if (f.id == id) return &f;
  return nullptr;
}

std::filesystem::path default_data_dir() { return INFODIALOG_DATA_DIR; }
std::filesystem::path default_packs_dir() { return INFODIALOG_PACKS_DIR; }

// ---------------------------------------------------------------------------
// Render rules.

std::vector<TemplateRule> parse_render_rules(std::string_view text, const std::string &file) {
  std::vector<TemplateRule> rules;
  ConfFile conf = ConfFile::parse(text, file);
  for (const auto &section : conf.sections) {
    for (const auto &line : section.lines) {
      auto arrow = line.text.find("=>");
      if (arrow == std::string::npos)
        throw ParseError(file, line.number, "rule has no '=>'");
      auto head = split_list(std::string_view(line.text).substr(0, arrow), ' ');
      if (head.empty()) throw ParseError(file, line.number, "rule has no act");
      auto act = parse_act(head[0]);
      if (!act) throw ParseError(file, line.number, "unknown act " + head[0]);
      TemplateRule rule;
      rule.act = *act;
      rule.file = file;
      rule.line = line.number;
      for (size_t i = 1; i < head.size(); ++i) {
        SlotPredicate p;
        const std::string &tok = head[i];
        if (tok[0] == '!') {
          p.kind = SlotPredicate::Kind::kAbsent;
          p.slot = tok.substr(1);
        } else if (auto eq = tok.find('='); eq != std::string::npos) {
          p.kind = SlotPredicate::Kind::kEquals;
          p.slot = tok.substr(0, eq);
          p.value = tok.substr(eq + 1);
        } else {
          p.slot = tok;
        }
        if (p.slot.empty()) throw ParseError(file, line.number, "empty slot predicate");
        rule.predicates.push_back(std::move(p));
      }
      std::string body = std::string(line.text.substr(arrow + 2));
      size_t start = 0;
      while (true) {
        auto bar = body.find("||", start);
        std::string variant = trim(std::string_view(body).substr(
            start, bar == std::string::npos ? std::string::npos : bar - start));
        if (variant.empty()) throw ParseError(file, line.number, "empty rule output");
        rule.variants.push_back(std::move(variant));
        if (bar == std::string::npos) break;
        start = bar + 2;
      }
      rules.push_back(std::move(rule));
    }
  }
  return rules;
}

std::vector<std::string> placeholders_of(std::string_view output) {
  std::vector<std::string> names;
  size_t pos = 0;
  while ((pos = output.find('{', pos)) != std::string_view::npos) {
    auto close = output.find('}', pos);
    if (close == std::string_view::npos) break;
    std::string inner(output.substr(pos + 1, close - pos - 1));
    if (auto colon = inner.find(':'); colon != std::string::npos) inner = inner.substr(colon + 1);
    if (auto bar = inner.find('|'); bar != std::string::npos) inner = inner.substr(0, bar);
    names.push_back(inner);
    pos = close + 1;
  }
  return names;
}

// ---------------------------------------------------------------------------
// Word lists.

namespace {

std::optional<WordCategory> parse_category(std::string_view name) {
  if (name == "wh") return WordCategory::kWh;
  if (name == "prep") return WordCategory::kPrep;
  if (name == "det") return WordCategory::kDet;
  if (name == "pron") return WordCategory::kPron;
  if (name == "verb") return WordCategory::kVerb;
  if (name == "particle") return WordCategory::kParticle;
  if (name == "conj") return WordCategory::kConj;
  if (name == "noun") return WordCategory::kNoun;
  return std::nullopt;
}

}  // namespace

WordLists parse_function_words(std::string_view text, const std::string &file, WordLists base) {
  ConfFile conf = ConfFile::parse(text, file);
  for (const auto &section : conf.sections) {
    auto cat = parse_category(section.name);
    if (!cat) throw ParseError(file, section.number, "unknown word category '" + section.name + "'");
    for (const auto &line : section.lines)
      for (const auto &w : split_list(line.text, ','))
        for (const auto &word : phrase_words(w)) base.categories[word] = *cat;
  }
  return base;
}

WordLists parse_cue_words(std::string_view text, const std::string &file, WordLists base) {
  ConfFile conf = ConfFile::parse(text, file);
  for (const auto &section : conf.sections) {
    if ((section.name != "role" && section.name != "class") || section.args.size() != 1)
      throw ParseError(file, section.number, "expected [role NAME] or [class NAME]");
    for (const auto &line : section.lines) {
      for (const auto &phrase : split_list(line.text, ',')) {
        Cue cue;
        cue.words = phrase_words(phrase);
        if (cue.words.empty()) continue;
        (section.name == "role" ? cue.role : cue.semantic_class) = section.args[0];
        base.cues.push_back(std::move(cue));
      }
    }
  }
  return base;
}

// ---------------------------------------------------------------------------
// Pack loading.

namespace {

const char *const kPackFiles[] = {"schema", "db-map", "lexicon", "consistency",
                                  "render-rules", "help", "scrape"};

std::string required_value(const ConfSection &s, const std::map<std::string, ConfLine> &kv,
                           const std::string &key, const std::string &file) {
  auto it = kv.find(key);
  if (it == kv.end())
    throw ParseError(file, s.number, "[" + s.name + "] is missing '" + key + "'");
  return it->second.key_value()->second;
}

std::map<std::string, ConfLine> keyed(const ConfSection &s, const std::string &file) {
  std::map<std::string, ConfLine> out;
  for (const auto &line : s.lines) {
    auto kv = line.key_value();
    if (!kv) throw ParseError(file, line.number, "expected 'key = value'");
    if (!out.emplace(kv->first, line).second)
      throw ParseError(file, line.number, "duplicate key '" + kv->first + "'");
  }
  return out;
}

std::string value_or(const std::map<std::string, ConfLine> &kv, const std::string &key,
                     std::string fallback = {}) {
  auto it = kv.find(key);
  return it == kv.end() ? fallback : it->second.key_value()->second;
}

int parse_int(const std::string &text, const std::string &file, int line) {
  if (!all_digits(text)) throw ParseError(file, line, "expected a number, got '" + text + "'");
  return std::stoi(text);
}

std::vector<std::vector<std::string>> parse_triggers(const std::string &value) {
  std::vector<std::vector<std::string>> out;
  for (const auto &phrase : split_list(value, '|')) {
    auto words = phrase_words(phrase);
    if (!words.empty()) out.push_back(std::move(words));
  }
  return out;
}

std::string section_arg(const ConfSection &s, const std::string &file) {
  if (s.args.size() != 1)
    throw ParseError(file, s.number, "[" + s.name + "] takes exactly one name");
  return s.args[0];
}

void parse_schema(const ConfFile &conf, ApplicationSchema &schema) {
  const std::string &file = conf.file;
  std::set<std::string> names;
  for (const auto &s : conf.sections) {
    if (s.name == "domain") {
      auto kv = keyed(s, file);
      schema.domain_name = required_value(s, kv, "name", file);
      schema.key_field = value_or(kv, "key");
      schema.row_label = value_or(kv, "row_label");
      schema.dataset = value_or(kv, "dataset");
      if (kv.count("few_threshold"))
        schema.few_threshold = parse_int(value_or(kv, "few_threshold"), file,
                                         kv.at("few_threshold").number);
      if (kv.count("approx_window"))
        schema.approx_window = parse_int(value_or(kv, "approx_window"), file,
                                         kv.at("approx_window").number);
    } else if (s.name == "field") {
      FieldSpec f;
      f.name = section_arg(s, file);
      if (!names.insert(f.name).second)
        throw ParseError(file, s.number, "duplicate field '" + f.name + "'");
      auto kv = keyed(s, file);
      f.semantic_class = required_value(s, kv, "class", file);
      f.prompt = required_value(s, kv, "prompt", file);
      f.label = value_or(kv, "label", f.name);
      f.role = value_or(kv, "role");
      std::string ask = value_or(kv, "ask", "yes");
      if (ask != "yes" && ask != "no")
        throw ParseError(file, kv.at("ask").number, "ask must be yes or no");
      f.askable = ask == "yes";
      schema.fields.push_back(std::move(f));
    } else if (s.name == "class") {
      NumericClass c;
      c.name = section_arg(s, file);
      auto kv = keyed(s, file);
      std::string digits = required_value(s, kv, "digits", file);
      int line = kv.at("digits").number;
      auto dash = digits.find('-');
      if (dash == std::string::npos) {
        c.min_digits = c.max_digits = parse_int(digits, file, line);
      } else {
        c.min_digits = parse_int(trim(digits.substr(0, dash)), file, line);
        c.max_digits = parse_int(trim(digits.substr(dash + 1)), file, line);
      }
      if (c.min_digits < 1 || c.max_digits < c.min_digits)
        throw ParseError(file, line, "bad digit range");
      schema.numeric_classes.push_back(std::move(c));
    } else if (s.name == "query") {
      QueryTypeSpec q;
      q.name = section_arg(s, file);
      auto kv = keyed(s, file);
      q.label = value_or(kv, "label", q.name);
      q.triggers = parse_triggers(required_value(s, kv, "triggers", file));
      q.answer_fields = split_list(required_value(s, kv, "answer", file), ',');
      if (q.triggers.empty()) throw ParseError(file, s.number, "query has no triggers");
      schema.query_types.push_back(std::move(q));
    } else if (s.name == "mandatory") {
      for (const auto &line : s.lines) schema.mandatory_sets.push_back(split_list(line.text, ','));
    } else if (s.name == "out_of_scope") {
      for (const auto &line : s.lines) {
        auto kv = line.key_value();
        if (!kv) throw ParseError(file, line.number, "expected 'term = explanation'");
        schema.out_of_scope_terms.emplace_back(kv->first, kv->second);
      }
    } else if (s.name == "relax") {
      RelaxPolicy p;
      p.field = section_arg(s, file);
      auto kv = keyed(s, file);
      int line = s.number;
      for (const auto &step : split_list(required_value(s, kv, "steps", file), ',')) {
        line = kv.at("steps").number;
        p.widen_steps.push_back(parse_int(step, file, line));
      }
      for (size_t i = 1; i < p.widen_steps.size(); ++i)
        if (p.widen_steps[i] <= p.widen_steps[i - 1])
          throw ParseError(file, line, "relax steps must be strictly increasing");
      if (p.widen_steps.empty()) throw ParseError(file, line, "relax policy has no steps");
      schema.relaxable_fields[p.field] = std::move(p);
    } else if (s.name == "action") {
      ActionSpec a;
      a.name = section_arg(s, file);
      auto kv = keyed(s, file);
      a.label = value_or(kv, "label", a.name);
      a.triggers = parse_triggers(required_value(s, kv, "triggers", file));
      a.verify_user = value_or(kv, "verify", "no") == "yes";
      a.notice = required_value(s, kv, "notice", file);
      schema.actions.push_back(std::move(a));
    } else if (s.name == "accounts") {
      auto kv = keyed(s, file);
      for (const auto &pin : split_list(required_value(s, kv, "pins", file), ','))
        schema.demo_pins.push_back(parse_int(pin, file, kv.at("pins").number));
    } else {
      throw ParseError(file, s.number, "unknown section [" + s.name + "]");
    }
  }
  if (schema.domain_name.empty()) throw ParseError(file, 1, "missing [domain] name");
}

void parse_db_map(const ConfFile &conf, DomainPack &pack) {
  const std::string &file = conf.file;
  auto &schema = pack.schema;
  for (const auto &s : conf.sections) {
    if (s.name == "table") {
      schema.table = section_arg(s, file);
      for (const auto &line : s.lines) {
        auto kv = line.key_value();
        if (!kv) throw ParseError(file, line.number, "expected 'field = column'");
        auto it = std::find_if(schema.fields.begin(), schema.fields.end(),
                               [&](const FieldSpec &f) { return f.name == kv->first; });
        if (it == schema.fields.end()) throw DanglingReference(file, kv->first, line.number);
        it->db_column = kv->second;
      }
    } else if (s.name == "cgi") {
      for (const auto &line : s.lines) {
        auto kv = line.key_value();
        if (!kv) throw ParseError(file, line.number, "expected 'field = param'");
        auto it = std::find_if(schema.fields.begin(), schema.fields.end(),
                               [&](const FieldSpec &f) { return f.name == kv->first; });
        if (it == schema.fields.end()) throw DanglingReference(file, kv->first, line.number);
        it->cgi_param = kv->second;
      }
    } else if (s.name == "report") {
      for (const auto &line : s.lines) {
        auto kv = line.key_value();
        if (!kv) throw ParseError(file, line.number, "expected 'name = column'");
        schema.report_columns.push_back({kv->first, kv->second});
      }
    } else if (s.name == "form") {
      CgiForm form;
      form.id = section_arg(s, file);
      auto kv = keyed(s, file);
      form.path = required_value(s, kv, "path", file);
      for (const auto &h : split_list(value_or(kv, "hidden"), ',')) {
        auto eq = h.find('=');
        if (eq == std::string::npos)
          throw ParseError(file, kv.at("hidden").number, "hidden needs name=value");
        form.hidden.emplace_back(trim(h.substr(0, eq)), trim(h.substr(eq + 1)));
      }
      form.params = split_list(required_value(s, kv, "params", file), ',');
      form.required = split_list(value_or(kv, "required"), ',');
      for (const auto &r : form.required)
        if (std::find(form.params.begin(), form.params.end(), r) == form.params.end())
          throw DanglingReference(file, r, kv.at("required").number);
      pack.forms.push_back(std::move(form));
    } else {
      throw ParseError(file, s.number, "unknown section [" + s.name + "]");
    }
  }
}

Lexicon parse_lexicon(const ConfFile &conf) {
  Lexicon lex;
  std::set<std::tuple<std::vector<std::string>, std::string, std::string>> seen;
  for (const auto &s : conf.sections) {
    if (!s.name.empty()) throw ParseError(conf.file, s.number, "lexicon has no sections");
    for (const auto &line : s.lines) {
      auto parts = split_list(line.text, '|');
      if (parts.size() != 3)
        throw ParseError(conf.file, line.number, "expected 'surface|class|canonical'");
      LexiconEntry e{parts[0], parts[1], parts[2], phrase_words(parts[0]), line.number};
      if (e.words.empty()) throw ParseError(conf.file, line.number, "empty surface");
      if (!seen.emplace(e.words, e.semantic_class, e.canonical).second)
        throw ParseError(conf.file, line.number, "duplicate lexicon entry");
      lex.entries.push_back(std::move(e));
    }
  }
  return lex;
}

void parse_consistency(const ConfFile &conf, ApplicationSchema &schema) {
  for (const auto &s : conf.sections) {
    if (s.name != "rule") throw ParseError(conf.file, s.number, "expected [rule NAME]");
    ConsistencyRule r;
    r.id = section_arg(s, conf.file);
    auto kv = keyed(s, conf.file);
    std::string rel = required_value(s, kv, "relation", conf.file);
    if (rel == "not_equal") r.relation = Relation::kNotEqual;
    else if (rel == "less_than") r.relation = Relation::kLessThan;
    else if (rel == "greater_than") r.relation = Relation::kGreaterThan;
    else throw ParseError(conf.file, kv.at("relation").number, "unknown relation " + rel);
    r.left_field = required_value(s, kv, "left", conf.file);
    r.right_field = required_value(s, kv, "right", conf.file);
    r.message = required_value(s, kv, "message", conf.file);
    for (const auto *side : {&r.left_field, &r.right_field})
      if (!schema.field(*side))
        throw DanglingReference(conf.file, *side,
                                kv.at(side == &r.left_field ? "left" : "right").number);
    if (r.left_field == r.right_field)
      throw ParseError(conf.file, s.number, "rule compares a field with itself");
    if (r.relation != Relation::kNotEqual &&
        schema.field(r.left_field)->semantic_class != schema.field(r.right_field)->semantic_class)
      throw ParseError(conf.file, s.number, "ordering rule across different classes");
    schema.consistency_rules.push_back(std::move(r));
  }
}

std::map<std::string, std::string> parse_help(const ConfFile &conf,
                                              std::map<std::string, std::string> base) {
  for (const auto &s : conf.sections) {
    for (const auto &line : s.lines) {
      auto kv = line.key_value();
      if (!kv) throw ParseError(conf.file, line.number, "expected 'KEY = text'");
      auto words = split_list(kv->first, ' ');
      std::string key = join(words, " ");
      base[key] = kv->second;
    }
  }
  return base;
}

void parse_scrape(const ConfFile &conf, ScrapeSpec &spec) {
  for (const auto &s : conf.sections) {
    if (s.name == "markers") {
      auto kv = keyed(s, conf.file);
      spec.result_begin = required_value(s, kv, "result_begin", conf.file);
      spec.result_end = required_value(s, kv, "result_end", conf.file);
      spec.row_begin = required_value(s, kv, "row_begin", conf.file);
      spec.row_end = required_value(s, kv, "row_end", conf.file);
      spec.cell_begin = required_value(s, kv, "cell_begin", conf.file);
      spec.cell_end = required_value(s, kv, "cell_end", conf.file);
      spec.no_match = required_value(s, kv, "no_match", conf.file);
    } else if (s.name == "cells") {
      auto kv = keyed(s, conf.file);
      spec.cell_columns = split_list(required_value(s, kv, "order", conf.file), ',');
    } else if (s.name == "window_params") {
      for (const auto &[k, line] : keyed(s, conf.file)) spec.window_params[k] = line.key_value()->second;
    } else if (s.name == "window_codes") {
      for (const auto &line : s.lines) {
        auto kv = line.key_value();
        if (!kv) throw ParseError(conf.file, line.number, "expected 'minutes = code'");
        spec.window_codes.emplace_back(parse_int(kv->first, conf.file, line.number), kv->second);
      }
    } else {
      throw ParseError(conf.file, s.number, "unknown section [" + s.name + "]");
    }
  }
}

void check_field(const ApplicationSchema &schema, const std::string &name,
                 const std::string &file) {
  if (!schema.field(name)) throw DanglingReference(file, name);
}

void validate(DomainPack &pack) {
  auto &schema = pack.schema;
  const std::string sfile = "schema.conf";
  if (schema.fields.empty()) throw ParseError(sfile, 1, "schema declares no fields");

  for (const auto &q : schema.query_types)
    for (const auto &a : q.answer_fields)
      if (!schema.field(a) && !schema.report_column(a)) throw DanglingReference(sfile, a);

  bool any_set = false;
  for (const auto &set : schema.mandatory_sets) {
    any_set = any_set || !set.empty();
    for (const auto &f : set) check_field(schema, f, sfile);
  }
  if (!any_set) throw ParseError(sfile, 1, "no non-empty mandatory set");

  for (const auto &[name, policy] : schema.relaxable_fields) check_field(schema, name, sfile);
  if (!schema.key_field.empty()) check_field(schema, schema.key_field, sfile);
  for (const auto &name : placeholders_of(schema.row_label)) check_field(schema, name, sfile);

  std::set<std::string> lexicon_classes;
  for (const auto &e : pack.lexicon.entries) lexicon_classes.insert(e.semantic_class);
  std::set<std::string> numeric;
  for (const auto &c : schema.numeric_classes) numeric.insert(c.name);

  for (const auto &f : schema.fields) {
    if (!is_builtin_class(f.semantic_class) && !lexicon_classes.count(f.semantic_class) &&
        !numeric.count(f.semantic_class))
      throw DanglingReference(sfile, f.semantic_class);
    if (f.db_column.empty()) throw DanglingReference("db-map.conf", f.name);
  }
  for (const auto &cue : pack.words.cues)
    if (!cue.semantic_class.empty() && !lexicon_classes.count(cue.semantic_class) &&
        !numeric.count(cue.semantic_class) && !is_builtin_class(cue.semantic_class))
      throw DanglingReference("cue-words.conf", cue.semantic_class);

  for (const auto &form : pack.forms)
    for (const auto &param : form.params) {
      bool known = pack.scrape.window_params.count(param) > 0;
      for (const auto &[t, w] : pack.scrape.window_params) known = known || w == param;
      for (const auto &f : schema.fields) known = known || f.cgi_param == param;
      if (!known) throw DanglingReference("db-map.conf", param);
    }

  for (const auto &rule : pack.rules) {
    const ActSlots &slots = slots_of(rule.act);
    auto declared = [&](const std::string &name) {
      if (std::find(slots.required.begin(), slots.required.end(), name) != slots.required.end())
        return true;
      if (std::find(slots.optional.begin(), slots.optional.end(), name) != slots.optional.end())
        return true;
      return slots.row_fields && (schema.field(name) || schema.report_column(name));
    };
    for (const auto &variant : rule.variants)
      for (const auto &name : placeholders_of(variant))
        if (!declared(name)) throw DanglingReference(rule.file, name, rule.line);
    for (const auto &p : rule.predicates)
      if (!declared(p.slot)) throw DanglingReference(rule.file, p.slot, rule.line);
  }

  for (const auto &[key, text] : pack.help) {
    if (key == "*") continue;
    auto words = split_list(key, ' ');
    if (!parse_upper_state(words[0]) && !parse_lower_state(words[0]))
      throw DanglingReference("help.conf", words[0]);
    if (words.size() > 2) throw ParseError("help.conf", 1, "bad help key '" + key + "'");
    if (words.size() == 2) check_field(schema, words[1], "help.conf");
  }
}

}  // namespace

DomainPack load_domain_pack(const std::filesystem::path &root,
                            const std::filesystem::path &data_dir) {
  for (const char *name : kPackFiles)
    if (!std::filesystem::is_regular_file(root / (std::string(name) + ".conf")))
      throw MissingFile(name);
  auto load = [&](const char *name) { return ConfFile::load(root / (std::string(name) + ".conf")); };

  DomainPack pack;
  pack.root = root;
  parse_schema(load("schema"), pack.schema);
  parse_db_map(load("db-map"), pack);
  pack.lexicon = parse_lexicon(load("lexicon"));
  parse_consistency(load("consistency"), pack.schema);
  parse_scrape(load("scrape"), pack.scrape);

  auto framework = [&](const char *name) { return read_file(data_dir / name); };
  auto optional_pack_file = [&](const char *name) -> std::optional<std::string> {
    if (std::filesystem::is_regular_file(root / name)) return read_file(root / name);
    return std::nullopt;
  };

  pack.words = parse_function_words(framework("function-words.conf"), "function-words.conf");
  if (auto extra = optional_pack_file("function-words.conf"))
    pack.words = parse_function_words(*extra, "function-words.conf", std::move(pack.words));
  pack.words = parse_cue_words(framework("cue-words.conf"), "cue-words.conf", std::move(pack.words));
  if (auto extra = optional_pack_file("cue-words.conf"))
    pack.words = parse_cue_words(*extra, "cue-words.conf", std::move(pack.words));

  pack.rules = parse_render_rules(read_file(root / "render-rules.conf"), "render-rules.conf");
  pack.domain_rule_count = pack.rules.size();
  auto defaults = parse_render_rules(framework("render-rules.conf"), "default render-rules.conf");
  pack.rules.insert(pack.rules.end(), defaults.begin(), defaults.end());

  pack.help = parse_help(ConfFile::parse(framework("help.conf"), "default help.conf"), {});
  pack.help = parse_help(load("help"), std::move(pack.help));

  validate(pack);
  return pack;
}

}  // namespace infodialog
