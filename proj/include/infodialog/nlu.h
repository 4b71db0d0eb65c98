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

#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "infodialog/frame.h"
#include "infodialog/schema.h"

namespace infodialog {

enum class TokenCategory { kWord, kNumber, kPunct };

struct Token {
  std::string text;
  std::string lower;
  int index = 0;
  TokenCategory category = TokenCategory::kWord;

  bool operator==(const Token &) const = default;
};

// Half-open token range.
struct Span {
  int begin = 0;
  int end = 0;

  int size() const { return end - begin; }
  bool contains(int i) const { return i >= begin && i < end; }
  bool operator==(const Span &) const = default;
};

enum class TagSource { kDomainIndependent, kDomainSpecific };

struct SemanticTag {
  Span span;
  std::vector<Reading> readings;  // at least one; several when ambiguous
  TagSource source = TagSource::kDomainIndependent;
  bool approx = false;
  std::string surface;

  const std::string &semantic_class() const { return readings.front().semantic_class; }
  const Value &value() const { return readings.front().value; }
  bool operator==(const SemanticTag &) const = default;
};

struct Annotation {
  std::vector<Token> tokens;
  std::vector<SemanticTag> tags;  // ordered by span, non-overlapping

  bool operator==(const Annotation &) const = default;
};

enum class ChunkKind { kNP, kPP, kVP, kWH, kUnknown };

std::string_view name_of(ChunkKind k);

struct PhraseChunk {
  ChunkKind kind = ChunkKind::kNP;
  Span span;
  std::vector<int> tags;  // indices into Annotation::tags

  bool operator==(const PhraseChunk &) const = default;
};

struct CorrectionAct {
  std::optional<Value> old_value;  // absent for "no, X"
  Value new_value;
  std::string semantic_class;      // empty when the two sides disagree
  std::vector<int> tags;           // tags consumed by the act

  bool operator==(const CorrectionAct &) const = default;
};

struct ActReport {
  bool silence = false;
  bool quit = false;
  bool help = false;
  bool repeat = false;
  bool dont_know = false;
  bool affirm = false;
  bool deny = false;
  std::optional<std::string> meta_topic;  // semantic class asked about
  std::optional<CorrectionAct> correction;
  std::optional<std::string> action;      // post-success action trigger
  std::optional<int> ordinal;             // "the second one" -> 1

  bool operator==(const ActReport &) const = default;
};

struct CandidateBinding {
  std::string field;
  Value value;
  std::string semantic_class;
  bool approx = false;
  std::string term;

  bool operator==(const CandidateBinding &) const = default;
};

struct ExtractionResult {
  std::vector<CandidateBinding> bindings;
  std::vector<AmbiguityReport> ambiguities;
  ActReport acts;
  std::vector<std::string> unknown_terms;
  std::vector<std::pair<std::string, std::string>> out_of_scope_hits;
  std::optional<std::string> query_type;
  std::vector<SemanticTag> tags;
  bool resolved_pending = false;  // answered the previous clarification

  bool operator==(const ExtractionResult &) const = default;
};

std::vector<Token> tokenize(std::string_view utterance);

// Built-in time and date taggers first, then lexicon longest match (with
// out-of-scope terms), then numbers. Tags never overlap.
Annotation annotate(std::string_view utterance, const DomainPack &pack);

// Finite-state chunking over coarse word categories. Every token lands in
// exactly one chunk.
std::vector<PhraseChunk> chunk(const std::vector<Token> &tokens,
                               const std::vector<SemanticTag> &tags, const DomainPack &pack);

ActReport detect_acts(const std::vector<Token> &tokens, const std::vector<SemanticTag> &tags,
                      const DomainPack &pack, const DialogueContext &context);

ExtractionResult extract(const Annotation &annotation, const std::vector<PhraseChunk> &chunks,
                         const ActReport &acts, const DomainPack &pack,
                         const DialogueContext &context);

// annotate -> chunk -> detect_acts -> extract.
ExtractionResult understand(std::string_view utterance, const DomainPack &pack,
                            const DialogueContext &context);

struct MergeResult {
  DialogueContext context;
  std::set<std::string> changed_fields;
  std::vector<AmbiguityReport> open_ambiguities;
  bool query_type_changed = false;
  std::optional<std::string> corrected_field;
};

// Folds one turn's extraction into the frame. Throws
// CorrectionTargetNotFound when a correction names a value that is not
// bound.
MergeResult merge(const DialogueContext &context, const ExtractionResult &extraction,
                  const DomainPack &pack);

// Number words / digits helpers shared with the dialogue manager.
std::optional<std::string> spelled_digits(const std::vector<std::string> &words);

}  // namespace infodialog
