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
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "infodialog/states.h"

namespace infodialog {

// Classes produced by the built-in taggers, independent of any domain.
inline constexpr std::string_view kTimeOfDayClass = "time_of_day";
inline constexpr std::string_view kDateClass = "date";
inline constexpr std::string_view kNumberClass = "number";
// Pseudo-class carried by tags of out-of-scope terms.
inline constexpr std::string_view kOutOfScopeClass = "out_of_scope";

bool is_builtin_class(std::string_view cls);

struct FieldSpec {
  std::string name;
  std::string semantic_class;
  std::string label;   // human wording, e.g. "departure city"
  std::string prompt;  // question asked when the field is missing
  std::string db_column;
  std::optional<std::string> cgi_param;
  std::string role;    // cue-word role ("departure", "arrival"); may be empty
  bool askable = true; // may be asked for by GET_CONSTRAINT

  bool operator==(const FieldSpec &) const = default;
};

struct QueryTypeSpec {
  std::string name;
  std::string label;
  std::vector<std::vector<std::string>> triggers;  // word sequences
  std::vector<std::string> answer_fields;          // fields or report columns

  bool operator==(const QueryTypeSpec &) const = default;
};

enum class Relation { kNotEqual, kLessThan, kGreaterThan };

struct ConsistencyRule {
  std::string id;
  Relation relation = Relation::kNotEqual;
  std::string left_field;
  std::string right_field;
  std::string message;

  bool operator==(const ConsistencyRule &) const = default;
};

struct RelaxPolicy {
  std::string field;
  std::vector<int> widen_steps;  // strictly increasing window sizes, minutes

  bool operator==(const RelaxPolicy &) const = default;
};

// A domain class recognised from spoken or written numbers by digit count.
struct NumericClass {
  std::string name;
  int min_digits = 1;
  int max_digits = 1;

  bool operator==(const NumericClass &) const = default;
};

// A post-success action (the SUCCESS sub-dialogue).
struct ActionSpec {
  std::string name;
  std::string label;
  std::vector<std::vector<std::string>> triggers;
  bool verify_user = false;
  std::string notice;  // side-effect notice read before commit

  bool operator==(const ActionSpec &) const = default;
};

struct ReportColumn {
  std::string name;
  std::string column;

  bool operator==(const ReportColumn &) const = default;
};

struct ApplicationSchema {
  std::string domain_name;
  std::vector<FieldSpec> fields;
  std::vector<QueryTypeSpec> query_types;
  std::vector<std::vector<std::string>> mandatory_sets;
  std::vector<ConsistencyRule> consistency_rules;
  std::vector<std::pair<std::string, std::string>> out_of_scope_terms;
  std::map<std::string, RelaxPolicy> relaxable_fields;
  std::vector<NumericClass> numeric_classes;
  std::vector<ActionSpec> actions;
  std::vector<std::int64_t> demo_pins;
  std::vector<ReportColumn> report_columns;
  std::string table;       // relational table name (for logs)
  std::string key_field;   // identifies one row; used for ordinal selection
  std::string row_label;   // e.g. "flight {flight_number} from ..."
  std::string dataset;     // file name relative to the pack root
  int few_threshold = 5;
  int approx_window = 120;

  const FieldSpec *field(std::string_view name) const;
  int field_index(std::string_view name) const;  // -1 when absent
  std::vector<const FieldSpec *> fields_of_class(std::string_view cls) const;
  const QueryTypeSpec *query_type(std::string_view name) const;
  const ReportColumn *report_column(std::string_view name) const;
  const RelaxPolicy *relax_policy(std::string_view field) const;

  bool operator==(const ApplicationSchema &) const = default;
};

struct LexiconEntry {
  std::string surface;
  std::string semantic_class;
  std::string canonical;
  std::vector<std::string> words;  // lower-cased surface words
  int line = 0;

  bool operator==(const LexiconEntry &) const = default;
};

struct TermReading {
  std::string canonical;
  std::string semantic_class;

  bool operator==(const TermReading &) const = default;
};

struct Lexicon {
  std::vector<LexiconEntry> entries;  // file order

  size_t max_words() const;
  bool operator==(const Lexicon &) const = default;
};

// Case-insensitive exact match of `term` against lexicon surfaces, in
// lexicon file order, optionally restricted to one class.
std::vector<TermReading> resolve_user_term(std::string_view term,
                                           const std::optional<std::string> &class_filter,
                                           const Lexicon &lexicon);

// Renderer rule: "ACT [slot | !slot | slot=value]... => text || variant".
struct SlotPredicate {
  enum class Kind { kPresent, kAbsent, kEquals };
  Kind kind = Kind::kPresent;
  std::string slot;
  std::string value;

  bool operator==(const SlotPredicate &) const = default;
};

struct TemplateRule {
  Act act = Act::kGreet;
  std::vector<SlotPredicate> predicates;
  std::vector<std::string> variants;  // first is the default output
  std::string file;
  int line = 0;

  bool operator==(const TemplateRule &) const = default;
};

std::vector<TemplateRule> parse_render_rules(std::string_view text, const std::string &file);

// Placeholder names referenced by a rule output ({x}, {list:x|..}, {numbered:x}).
std::vector<std::string> placeholders_of(std::string_view output);

enum class WordCategory { kWh, kPrep, kDet, kPron, kVerb, kParticle, kConj, kNoun };

// A cue phrase that steers a tag towards a field role or a semantic class.
struct Cue {
  std::vector<std::string> words;
  std::string role;
  std::string semantic_class;

  bool operator==(const Cue &) const = default;
};

struct WordLists {
  std::map<std::string, WordCategory> categories;
  std::vector<Cue> cues;

  std::optional<WordCategory> category(const std::string &word) const;
  bool operator==(const WordLists &) const = default;
};

WordLists parse_function_words(std::string_view text, const std::string &file,
                               WordLists base = {});
WordLists parse_cue_words(std::string_view text, const std::string &file,
                          WordLists base);

struct CgiForm {
  std::string id;
  std::string path;
  std::vector<std::pair<std::string, std::string>> hidden;  // e.g. fltAns=byNumber
  std::vector<std::string> params;                          // declaration order
  std::vector<std::string> required;

  bool operator==(const CgiForm &) const = default;
};

struct ScrapeSpec {
  std::string result_begin;
  std::string result_end;
  std::string row_begin;
  std::string row_end;
  std::string cell_begin;
  std::string cell_end;
  std::string no_match;
  std::vector<std::string> cell_columns;
  std::map<std::string, std::string> window_params;    // time param -> window param
  std::vector<std::pair<int, std::string>> window_codes;  // minutes -> code

  std::optional<std::string> code_for_window(int minutes) const;
  std::optional<int> window_for_code(std::string_view code) const;
  bool operator==(const ScrapeSpec &) const = default;
};

// Everything needed to run dialogues in one domain. Immutable after load.
struct DomainPack {
  ApplicationSchema schema;
  Lexicon lexicon;
  std::vector<TemplateRule> rules;  // domain rules first, then defaults
  size_t domain_rule_count = 0;
  std::map<std::string, std::string> help;  // "STATE field" / "STATE" / "*"
  WordLists words;
  std::vector<CgiForm> forms;
  ScrapeSpec scrape;
  std::filesystem::path root;

  const CgiForm *form(std::string_view id) const;
  bool operator==(const DomainPack &) const = default;
};

std::filesystem::path default_data_dir();
std::filesystem::path default_packs_dir();

// Loads and cross-validates a domain pack directory. Framework defaults
// (function words, cue words, render rules, help) come from `data_dir`
// and are extended by same-named files in the pack.
DomainPack load_domain_pack(const std::filesystem::path &root,
                            const std::filesystem::path &data_dir = default_data_dir());

}  // namespace infodialog
