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

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "infodialog/states.h"
#include "infodialog/value.h"

namespace infodialog {

// One interpretation of a tagged term.
struct Reading {
  std::string semantic_class;
  Value value;

  bool operator==(const Reading &) const = default;
};

enum class AmbiguityKind { kLexical, kClass, kField };

std::string_view name_of(AmbiguityKind k);

struct AmbiguityReport {
  AmbiguityKind kind = AmbiguityKind::kLexical;
  std::string term;
  std::vector<std::string> candidates;  // canonical values, classes, or field names
  std::vector<Reading> readings;        // what the term may mean
  bool approx = false;

  bool operator==(const AmbiguityReport &) const = default;
};

enum class BindingStatus { kNew, kConfirmed, kCorrected };

std::string_view name_of(BindingStatus s);

// One slot of the query frame.
struct FieldBinding {
  std::string field;
  Value value;
  std::string semantic_class;
  BindingStatus status = BindingStatus::kNew;
  int turn = 0;
  bool approx = false;
  int window = 0;  // +/- minutes for time fields; 0 = exact

  bool operator==(const FieldBinding &) const = default;
};

using Bindings = std::map<std::string, FieldBinding>;

// The dialogue frame plus the bookkeeping the state machine carries from
// one turn to the next.
struct DialogueContext {
  Bindings bindings;
  std::optional<std::string> query_type;
  UpperState upper_state = UpperState::kInitial;
  std::optional<LowerState> sub_state;
  std::optional<std::string> expected_field;
  InteractionTemplate last_template;
  std::optional<std::pair<std::string, Value>> pending_confirmation;
  int turn_index = 0;
  std::optional<size_t> candidate_rows_count;

  // Ambiguity the last CLARIFY_AMBIGUITY asked about.
  std::optional<AmbiguityReport> pending_ambiguity;
  // Bindings of the item matched by the previous SUCCESS; valid for one turn.
  std::optional<Bindings> followup_bindings;
  // Key values of the rows listed by the previous ENUMERATE.
  std::vector<Value> enumerated_keys;
  // Fields the user could not supply during GET_CONSTRAINT.
  std::vector<std::string> excluded_fields;
  std::optional<std::string> pending_action;
  int verify_attempts = 0;
  // Window offered by the open RELAX_PROPOSAL.
  std::optional<std::pair<std::string, int>> pending_relax;

  bool operator==(const DialogueContext &) const = default;
};

}  // namespace infodialog
