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

#include "infodialog/states.h"

#include <algorithm>

namespace infodialog {
namespace {

constexpr std::array<std::string_view, 14> kUpperNames = {
    "INITIAL",      "QUIT",        "META_QUERY",        "OUT_OF_BOUNDS",
    "STATUS_QUO",   "AMBIGUOUS",   "INCONSISTENT",      "CORRECTION",
    "MANDATORY_FIELDS", "SUCCESS", "DATABASE_CONFLICT", "UNKNOWN_QUERY",
    "FEW_MATCHES",  "MANY_MATCHES",
};

constexpr std::array<std::string_view, 5> kLowerNames = {
    "VERIFY_USER", "SIDE_EFFECTS", "RELAX_CONSTRAINT", "CONFIRM_VALUE",
    "GET_CONSTRAINT",
};

constexpr std::array<std::string_view, 20> kActNames = {
    "GREET",          "GOODBYE",           "HELP",
    "META_ANSWER",    "NOTIFY_OOB",        "NOTIFY_UNKNOWN_WORD",
    "REPEAT_LAST",    "NO_NEW_INFO",       "CLARIFY_AMBIGUITY",
    "NOTIFY_INCONSISTENT", "ACK_CORRECTION", "ASK_FIELD",
    "ASK_QUERY_TYPE", "REPORT_ANSWER",     "ENUMERATE",
    "CONFIRM_FIELD",  "RELAX_PROPOSAL",    "VERIFY_PROMPT",
    "SIDE_EFFECT_NOTICE", "SYSTEM_TROUBLE",
};

}  // namespace

UpperState owner_of(LowerState s) {
  switch (s) {
    case LowerState::kVerifyUser:
    case LowerState::kSideEffects:
      return UpperState::kSuccess;
    case LowerState::kRelaxConstraint:
    case LowerState::kConfirmValue:
      return UpperState::kDatabaseConflict;
    case LowerState::kGetConstraint:
      return UpperState::kManyMatches;
  }
  return UpperState::kInitial;
}

std::string_view name_of(UpperState s) { return kUpperNames[static_cast<size_t>(s)]; }
std::string_view name_of(LowerState s) { return kLowerNames[static_cast<size_t>(s)]; }
std::string_view name_of(Act a) { return kActNames[static_cast<size_t>(a)]; }

std::optional<UpperState> parse_upper_state(std::string_view name) {
  auto it = std::find(kUpperNames.begin(), kUpperNames.end(), name);
  if (it == kUpperNames.end()) return std::nullopt;
  return static_cast<UpperState>(it - kUpperNames.begin());
}

std::optional<LowerState> parse_lower_state(std::string_view name) {
  auto it = std::find(kLowerNames.begin(), kLowerNames.end(), name);
  if (it == kLowerNames.end()) return std::nullopt;
  return static_cast<LowerState>(it - kLowerNames.begin());
}

std::optional<Act> parse_act(std::string_view name) {
  auto it = std::find(kActNames.begin(), kActNames.end(), name);
  if (it == kActNames.end()) return std::nullopt;
  return static_cast<Act>(it - kActNames.begin());
}

const ActSlots &slots_of(Act a) {
  static const std::array<ActSlots, 20> table = {{
      /* GREET */ {{}, {"domain"}},
      /* GOODBYE */ {{}, {}},
      /* HELP */ {{"state", "text"}, {"expected_field", "sub_state"}},
      /* META_ANSWER */ {{"topic", "values"}, {"more", "total"}},
      /* NOTIFY_OOB */ {{"term", "explanation", "reentry_hint"}, {}},
      /* NOTIFY_UNKNOWN_WORD */ {{"word"}, {}},
      /* REPEAT_LAST */ {{}, {}},
      /* NO_NEW_INFO */ {{"cause"}, {"prompt", "expected_field"}},
      /* CLARIFY_AMBIGUITY */ {{"kind", "term", "candidates"}, {}},
      /* NOTIFY_INCONSISTENT */
      {{"rule", "message", "left_field", "left_value", "right_field", "right_value"}, {}},
      /* ACK_CORRECTION */ {{"old", "new"}, {"field", "unmatched", "next_prompt"}},
      /* ASK_FIELD */ {{"field", "prompt"}, {"count", "reason"}},
      /* ASK_QUERY_TYPE */ {{"options"}, {"count", "row"}},
      /* REPORT_ANSWER */ {{"count"}, {"query_type", "row", "answers", "constraints"}, true},
      /* ENUMERATE */ {{"count", "rows"}, {"query_type", "more"}},
      /* CONFIRM_FIELD */ {{"field", "value"}, {"label"}},
      /* RELAX_PROPOSAL */ {{"field", "value", "window", "count"}, {"label", "window_hours"}},
      /* VERIFY_PROMPT */ {{"action"}, {"retry", "failed"}},
      /* SIDE_EFFECT_NOTICE */ {{"action", "notice"}, {"committed", "cancelled", "row"}, true},
      /* SYSTEM_TROUBLE */ {{}, {"detail"}},
  }};
  return table[static_cast<size_t>(a)];
}

std::string InteractionTemplate::text(std::string_view slot) const {
  auto it = slots.find(std::string(slot));
  if (it == slots.end()) return {};
  if (auto s = std::get_if<std::string>(&it->second)) return *s;
  const auto &items = std::get<std::vector<std::string>>(it->second);
  std::string out;
  for (size_t i = 0; i < items.size(); ++i) {
    if (i) out += ", ";
    out += items[i];
  }
  return out;
}

std::vector<std::string> InteractionTemplate::list(std::string_view slot) const {
  auto it = slots.find(std::string(slot));
  if (it == slots.end()) return {};
  if (auto s = std::get_if<std::string>(&it->second)) return {*s};
  return std::get<std::vector<std::string>>(it->second);
}

bool slot_complete(const InteractionTemplate &t) {
  for (const auto &name : slots_of(t.act).required)
    if (!t.has(name)) return false;
  return true;
}

}  // namespace infodialog
