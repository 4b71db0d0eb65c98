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

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "infodialog/frame.h"
#include "infodialog/nlu.h"
#include "infodialog/query.h"
#include "infodialog/schema.h"
#include "infodialog/states.h"

namespace infodialog {

struct DialogOptions {
  // FEW_MATCHES vs MANY_MATCHES threshold; 0 takes the pack's value.
  size_t few_threshold = 0;
};

struct StateDecision {
  UpperState state = UpperState::kInitial;
  std::optional<LowerState> sub_state;
  std::string cause;  // e.g. "status_quo:dont_know", "ambiguous:field"
  InteractionTemplate template_;
  bool queried = false;
  std::optional<size_t> match_count;
  int classification_queries = 0;
  int probe_queries = 0;
  std::optional<std::string> committed_action;
};

struct TurnOutcome {
  StateDecision decision;
  DialogueContext context;
};

// One turn of the two-layer state machine: QUIT, META_QUERY and
// OUT_OF_BOUNDS are tried on the raw extraction, then an active
// sub-dialogue gets the turn, then the extraction is merged and the rest of
// the chain runs. A QuerierUnavailable from the back-end yields a
// SYSTEM_TROUBLE template and the unchanged context.
TurnOutcome decide_state(const DialogueContext &context, const ExtractionResult &extraction,
                         const DomainPack &pack, Querier &querier,
                         const DialogOptions &options = {});

// Field among `unbound_fields` (schema order) minimizing
// E(f) = sum_v count_v^2 / N over `rows`; the first one when the back-end
// offers no row access.
std::string select_informative_field(const std::vector<Row> &rows,
                                     const std::vector<std::string> &unbound_fields,
                                     const ApplicationSchema &schema, bool has_row_access = true);

// Expected residual of one field times N, i.e. sum_v count_v^2.
size_t residual_score(const std::vector<Row> &rows, const FieldSpec &field);

// Row slots for templates: one per schema field and report column, in
// display form.
std::map<std::string, std::string> row_slots(const Row &row, const ApplicationSchema &schema);
std::string row_label(const Row &row, const ApplicationSchema &schema);

// Display form of a bound value ("10:30 am" for times).
std::string display_value(const ApplicationSchema &schema, const std::string &field, const Value &v,
                          bool approx = false);

// The greeting for a fresh session.
InteractionTemplate greeting(const DomainPack &pack);

}  // namespace infodialog
