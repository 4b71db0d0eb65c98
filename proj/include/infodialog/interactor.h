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
#include <optional>
#include <string>
#include <vector>

#include "infodialog/schema.h"
#include "infodialog/states.h"

namespace infodialog {

inline constexpr size_t kMetaValueCap = 10;

struct RenderOptions {
  std::uint32_t seed = 0;
  int turn = 0;
  bool vary = false;  // pick among rule variants
};

// First rule whose act and predicates match, or nullptr.
const TemplateRule *match_rule(const InteractionTemplate &t, const std::vector<TemplateRule> &rules);

// Expands placeholders of one rule output against the template slots.
std::string expand(std::string_view output, const InteractionTemplate &t);

// Throws NoRuleMatched.
std::string render(const InteractionTemplate &t, const std::vector<TemplateRule> &rules,
                   const RenderOptions &options = {});

// render(), with NoRuleMatched turned into a generic apology.
std::string render_or_apologize(const InteractionTemplate &t, const std::vector<TemplateRule> &rules,
                                const RenderOptions &options = {});

inline constexpr std::string_view kGenericApology =
    "Sorry, something went wrong on my side. Could you say that again?";

// Help keyed by sub-state or state, with and without the expected field,
// falling back to the global entry.
std::string help_text(UpperState state, const std::optional<LowerState> &sub_state,
                      const std::optional<std::string> &expected_field, const DomainPack &pack);

// META_ANSWER listing the known values of a semantic class.
InteractionTemplate meta_answer(const std::string &semantic_class, const DomainPack &pack,
                                size_t cap = kMetaValueCap);

}  // namespace infodialog
