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

#include <array>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace infodialog {

// Domain-independent dialogue states, in the order the dialogue manager
// tries them. The first nine are decided without a back-end query.
enum class UpperState {
  kInitial,
  kQuit,
  kMetaQuery,
  kOutOfBounds,
  kStatusQuo,
  kAmbiguous,
  kInconsistent,
  kCorrection,
  kMandatoryFields,
  kSuccess,
  kDatabaseConflict,
  kUnknownQuery,
  kFewMatches,
  kManyMatches,
};

inline constexpr std::array<UpperState, 14> kAllUpperStates = {
    UpperState::kInitial,         UpperState::kQuit,
    UpperState::kMetaQuery,       UpperState::kOutOfBounds,
    UpperState::kStatusQuo,       UpperState::kAmbiguous,
    UpperState::kInconsistent,    UpperState::kCorrection,
    UpperState::kMandatoryFields, UpperState::kSuccess,
    UpperState::kDatabaseConflict, UpperState::kUnknownQuery,
    UpperState::kFewMatches,      UpperState::kManyMatches,
};

inline bool is_post_query(UpperState s) {
  return static_cast<int>(s) >= static_cast<int>(UpperState::kSuccess);
}

// Domain-specific sub-dialogue states.
enum class LowerState {
  kVerifyUser,
  kSideEffects,
  kRelaxConstraint,
  kConfirmValue,
  kGetConstraint,
};

inline constexpr std::array<LowerState, 5> kAllLowerStates = {
    LowerState::kVerifyUser, LowerState::kSideEffects,
    LowerState::kRelaxConstraint, LowerState::kConfirmValue,
    LowerState::kGetConstraint,
};

// The upper state that owns a sub-dialogue state.
UpperState owner_of(LowerState s);

std::string_view name_of(UpperState s);
std::string_view name_of(LowerState s);
std::optional<UpperState> parse_upper_state(std::string_view name);
std::optional<LowerState> parse_lower_state(std::string_view name);

// Feedback acts produced by the dialogue manager and rendered by the
// interactor.
enum class Act {
  kGreet,
  kGoodbye,
  kHelp,
  kMetaAnswer,
  kNotifyOob,
  kNotifyUnknownWord,
  kRepeatLast,
  kNoNewInfo,
  kClarifyAmbiguity,
  kNotifyInconsistent,
  kAckCorrection,
  kAskField,
  kAskQueryType,
  kReportAnswer,
  kEnumerate,
  kConfirmField,
  kRelaxProposal,
  kVerifyPrompt,
  kSideEffectNotice,
  kSystemTrouble,
};

inline constexpr std::array<Act, 20> kAllActs = {
    Act::kGreet,          Act::kGoodbye,           Act::kHelp,
    Act::kMetaAnswer,     Act::kNotifyOob,         Act::kNotifyUnknownWord,
    Act::kRepeatLast,     Act::kNoNewInfo,         Act::kClarifyAmbiguity,
    Act::kNotifyInconsistent, Act::kAckCorrection, Act::kAskField,
    Act::kAskQueryType,   Act::kReportAnswer,      Act::kEnumerate,
    Act::kConfirmField,   Act::kRelaxProposal,     Act::kVerifyPrompt,
    Act::kSideEffectNotice, Act::kSystemTrouble,
};

std::string_view name_of(Act a);
std::optional<Act> parse_act(std::string_view name);

// Slot declarations per act. Required slots must be present in every
// template of that act; optional ones may be. Acts flagged `row_fields`
// may also carry one slot per schema field.
struct ActSlots {
  std::vector<std::string> required;
  std::vector<std::string> optional;
  bool row_fields = false;
};
const ActSlots &slots_of(Act a);

using SlotValue = std::variant<std::string, std::vector<std::string>>;

// Language-neutral feedback record.
struct InteractionTemplate {
  Act act = Act::kGreet;
  std::map<std::string, SlotValue> slots;

  bool has(std::string_view slot) const { return slots.find(std::string(slot)) != slots.end(); }
  // Scalar view of a slot; lists are joined with ", ". Empty when absent.
  std::string text(std::string_view slot) const;
  // List view of a slot; a scalar becomes a one-element list.
  std::vector<std::string> list(std::string_view slot) const;

  bool operator==(const InteractionTemplate &) const = default;
};

// True when every required slot of the act is present.
bool slot_complete(const InteractionTemplate &t);

}  // namespace infodialog
