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


#include <doctest.h>

#include <set>

#include "infodialog/conf.h"
#include "infodialog/errors.h"
#include "infodialog/interactor.h"
#include "testing.h"

using namespace infodialog;

namespace {

const DomainPack &fp() { return testing::flights().pack; }

InteractionTemplate tmpl(Act act, std::map<std::string, SlotValue> slots = {}) {
  return {act, std::move(slots)};
}

std::vector<TemplateRule> defaults() {
  return parse_render_rules(read_file(default_data_dir() / "render-rules.conf"), "defaults");
}

// A slot-complete template for every act, with the optional slots that
// select each default rule variant.
std::vector<InteractionTemplate> sample_templates() {
  std::vector<InteractionTemplate> out;
  for (Act act : kAllActs) {
    const ActSlots &slots = slots_of(act);
    InteractionTemplate t{act, {}};
    for (const auto &name : slots.required) t.slots[name] = std::string("x");
    out.push_back(t);
    for (const auto &name : slots.optional) {
      InteractionTemplate more = t;
      more.slots[name] = std::string("y");
      out.push_back(more);
    }
  }
  return out;
}

}  // namespace

TEST_SUITE("interactor") {

TEST_CASE("ask field renders the field prompt") {
  auto t = tmpl(Act::kAskField, {{"field", std::string("departure_city")},
                                 {"prompt", fp().schema.field("departure_city")->prompt}});
  CHECK(render(t, fp().rules) == "Which city does the flight leave from?");
}

TEST_CASE("first matching rule wins, so domain rules override defaults") {
  auto rules = defaults();
  auto greet = tmpl(Act::kGreet);
  CHECK(render(greet, rules) == "Welcome. How can I help you?");
  CHECK(render(greet, fp().rules).rfind("Welcome to the American Airlines", 0) == 0);
  auto override = parse_render_rules("ASK_FIELD => Domain wording.\n", "pack");
  auto combined = override;
  combined.insert(combined.end(), rules.begin(), rules.end());
  auto ask = tmpl(Act::kAskField, {{"field", std::string("gate")}, {"prompt", std::string("Gate?")}});
  CHECK(render(ask, combined) == "Domain wording.");
  for (const auto &t : sample_templates())
    if (t.act != Act::kAskField) CHECK(render(t, combined) == render(t, rules));
}

TEST_CASE("predicates select among rules") {
  auto rules = defaults();
  auto many = tmpl(Act::kAskField, {{"field", std::string("gate")},
                                    {"prompt", std::string("Which gate?")},
                                    {"reason", std::string("many")},
                                    {"count", std::string("14")}});
  CHECK(render(many, rules) == "I found 14 matches. Which gate?");
  many.slots["reason"] = std::string("denied");
  CHECK(render(many, rules) == "Let's try that again. Which gate?");
  auto match = match_rule(tmpl(Act::kGoodbye), rules);
  REQUIRE(match);
  CHECK(match->act == Act::kGoodbye);
}

TEST_CASE("enumerate prints one numbered line per row") {
  auto t = tmpl(Act::kEnumerate, {{"count", std::string("3")},
                                  {"rows", std::vector<std::string>{"flight 1", "flight 2", "flight 3"}}});
  CHECK(render(t, fp().rules) == "I found 3 matches:\n1. flight 1\n2. flight 2\n3. flight 3");
}

TEST_CASE("list expansion") {
  auto t = tmpl(Act::kMetaAnswer, {{"topic", std::string("cities")},
                                   {"values", std::vector<std::string>{"A", "B", "C"}}});
  CHECK(expand("{list:values|, | and }", t) == "A, B and C");
  CHECK(expand("{list:values|; }", t) == "A; B; C");
  t.slots["values"] = std::vector<std::string>{"A"};
  CHECK(expand("{list:values|, | and }", t) == "A");
  CHECK(expand("{topic}\\n{topic}", t) == "cities\ncities");
}

TEST_CASE("render totality over the default rules") {
  auto rules = defaults();
  for (const auto &t : sample_templates()) {
    CHECK(slot_complete(t));
    CHECK_NOTHROW(render(t, rules));
    CHECK(render(t, rules).find('{') == std::string::npos);
  }
}

TEST_CASE("a missing rule throws, and the apology path covers it") {
  std::vector<TemplateRule> none;
  CHECK_THROWS_AS(render(tmpl(Act::kGoodbye), none), NoRuleMatched);
  CHECK(render_or_apologize(tmpl(Act::kGoodbye), none) == kGenericApology);
}

TEST_CASE("variants are chosen deterministically from seed and turn") {
  auto rules = parse_render_rules("GOODBYE => Bye. || So long. || Farewell. || See you.\n", "v");
  auto t = tmpl(Act::kGoodbye);
  CHECK(render(t, rules) == "Bye.");
  CHECK(render(t, rules, {99, 3, false}) == "Bye.");
  std::set<std::string> seen;
  for (int turn = 0; turn < 40; ++turn) {
    auto a = render(t, rules, {7, turn, true});
    CHECK(a == render(t, rules, {7, turn, true}));
    seen.insert(a);
  }
  CHECK(seen.size() > 1);
}

TEST_CASE("rendered text starts with a capital") {
  auto rules = parse_render_rules("HELP => {text}\n", "h");
  CHECK(render(tmpl(Act::kHelp, {{"state", std::string("INITIAL")}, {"text", std::string("say hi")}}),
               rules) == "Say hi");
}

TEST_CASE("help text falls back from field to state to global") {
  auto field = help_text(UpperState::kMandatoryFields, std::nullopt, std::string("departure_city"), fp());
  CHECK(field.find("\"from Boston\"") != std::string::npos);
  auto state = help_text(UpperState::kMandatoryFields, std::nullopt, std::string("gate"), fp());
  CHECK(state == fp().help.at("MANDATORY_FIELDS"));
  auto global = help_text(UpperState::kStatusQuo, std::nullopt, std::nullopt, fp());
  CHECK(global == fp().help.at("*"));
  auto sub = help_text(UpperState::kManyMatches, LowerState::kGetConstraint, std::nullopt, fp());
  CHECK(sub == fp().help.at("GET_CONSTRAINT"));
  auto framework = help_text(UpperState::kAmbiguous, std::nullopt, std::nullopt, fp());
  CHECK(framework == "I need you to pick one of the choices I just offered.");
}

TEST_CASE("meta answers list at most ten values") {
  auto t = meta_answer("city", fp());
  CHECK(t.text("topic") == "cities");
  auto values = t.list("values");
  CHECK(values.size() == kMetaValueCap);
  CHECK(values.front() == "Atlanta");
  CHECK(t.text("total") == "20");
  CHECK(t.text("more") == "10");
  auto text = render(t, fp().rules);
  CHECK(text.rfind("I know about these cities: Atlanta, Boston, Chicago,", 0) == 0);
  CHECK(text.find("and 10 more.") != std::string::npos);

  auto few = meta_answer("city", fp(), 50);
  CHECK_FALSE(few.has("more"));
  CHECK(few.list("values").size() == 20);
}

}  // TEST_SUITE
