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

#include "infodialog/errors.h"
#include "infodialog/nlu.h"
#include "testing.h"

using namespace infodialog;

namespace {

const DomainPack &fp() { return testing::flights().pack; }

std::vector<ChunkKind> kinds(const std::vector<PhraseChunk> &chunks) {
  std::vector<ChunkKind> out;
  for (const auto &c : chunks) out.push_back(c.kind);
  return out;
}

std::vector<PhraseChunk> chunk_of(std::string_view text, const DomainPack &pack = fp()) {
  auto a = annotate(text, pack);
  return chunk(a.tokens, a.tags, pack);
}

ActReport acts_of(std::string_view text, const DialogueContext &ctx = {}) {
  auto a = annotate(text, fp());
  return detect_acts(a.tokens, a.tags, fp(), ctx);
}

const CandidateBinding *binding(const ExtractionResult &ex, const std::string &field) {
  for (const auto &b : ex.bindings)
    if (b.field == field) return &b;
  return nullptr;
}

FieldBinding bound(const std::string &field, Value v, const std::string &cls, int turn = 1) {
  FieldBinding b;
  b.field = field;
  b.value = std::move(v);
  b.semantic_class = cls;
  b.turn = turn;
  return b;
}

}  // namespace

TEST_SUITE("nlu") {

TEST_CASE("tokenizer splits words, numbers and punctuation") {
  auto t = tokenize("What time does flight 472 reach Dallas?");
  REQUIRE(t.size() == 8);
  CHECK(t[4].text == "472");
  CHECK(t[4].category == TokenCategory::kNumber);
  CHECK(t[7].category == TokenCategory::kPunct);
  CHECK(t[6].lower == "dallas");
  for (size_t i = 0; i < t.size(); ++i) CHECK(t[i].index == static_cast<int>(i));
  auto u = tokenize("I don’t know, 10:30 a.m.");
  CHECK(u[1].lower == "don't");
  CHECK(u[4].text == "10:30");
  CHECK(u[5].lower == "a.m.");
  CHECK(tokenize("").empty());
}

TEST_CASE("empty utterance annotates to nothing") {
  auto a = annotate("", fp());
  CHECK(a.tokens.empty());
  CHECK(a.tags.empty());
}

TEST_CASE("spelled-out times normalize to minutes after midnight") {
  auto a = annotate("arriving around ten thirty a m", fp());
  REQUIRE(a.tags.size() == 1);
  CHECK(a.tags[0].semantic_class() == kTimeOfDayClass);
  CHECK(a.tags[0].value() == Value(std::int64_t{10 * 60 + 30}));
  CHECK(a.tags[0].approx);
  CHECK(a.tags[0].source == TagSource::kDomainIndependent);
}

TEST_CASE("time forms") {
  auto minutes = [](std::string_view text) -> std::optional<std::int64_t> {
    for (const auto &t : annotate(text, fp()).tags)
      if (t.semantic_class() == kTimeOfDayClass) return std::get<std::int64_t>(t.value());
    return std::nullopt;
  };
  CHECK(minutes("at 10:30") == 630);
  CHECK(minutes("at 4 pm") == 16 * 60);
  CHECK(minutes("at noon") == 12 * 60);
  CHECK(minutes("at midnight") == 0);
  CHECK(minutes("at 12 am") == 0);
  CHECK(minutes("at 12:15 pm") == 12 * 60 + 15);
  CHECK(minutes("at three o'clock") == 15 * 60);
  CHECK(minutes("around 7") == 7 * 60);
  CHECK(minutes("at 10:32") == 630);
  CHECK(minutes("at 9:48 p.m.") == 21 * 60 + 50);
  CHECK(minutes("at 11:58 pm") == 23 * 60 + 55);
  CHECK(minutes("five thirty pm") == 17 * 60 + 30);
  // Bare numbers are not times.
  CHECK_FALSE(minutes("flight 7"));
  CHECK_FALSE(minutes("at 25:00"));
}

TEST_CASE("lexicon aliases tag as the canonical value with the full span") {
  auto a = annotate("from Big Apple", fp());
  REQUIRE(a.tags.size() == 1);
  CHECK(a.tags[0].semantic_class() == "city");
  CHECK(a.tags[0].value() == Value(std::string("New York")));
  CHECK(a.tags[0].span == Span{1, 3});
  CHECK(a.tags[0].source == TagSource::kDomainSpecific);
}

TEST_CASE("longest lexicon match wins") {
  auto a = annotate("to new york city", fp());
  REQUIRE(a.tags.size() == 1);
  CHECK(a.tags[0].span == Span{1, 4});
}

TEST_CASE("numbers become numeric classes by digit count") {
  auto a = annotate("flight four seven two", fp());
  REQUIRE(a.tags.size() == 1);
  CHECK(a.tags[0].semantic_class() == "flight_number");
  CHECK(a.tags[0].value() == Value(std::int64_t{472}));
  auto pin = annotate("1234", fp());
  REQUIRE(pin.tags.size() == 1);
  CHECK(pin.tags[0].semantic_class() == "pin");
  CHECK(spelled_digits({"four", "seventy", "two"}) == "472");
  CHECK(spelled_digits({"four", "hundred", "seventy", "two"}) == "472");
  CHECK(spelled_digits({"one", "two", "three", "four"}) == "1234");
  CHECK_FALSE(spelled_digits({"hello"}));
}

TEST_CASE("tags never overlap") {
  for (std::string_view u : {"from new york to newark around ten thirty am",
                             "flight 472 from Dallas to Newark", "big apple big d at noon"}) {
    auto a = annotate(u, fp());
    for (size_t i = 1; i < a.tags.size(); ++i) CHECK(a.tags[i - 1].span.end <= a.tags[i].span.begin);
    for (const auto &t : a.tags) {
      CHECK(t.span.size() > 0);
      CHECK(t.span.end <= static_cast<int>(a.tokens.size()));
    }
  }
}

TEST_CASE("chunker: when does flight four seven two arrive") {
  auto c = chunk_of("when does flight four seven two arrive");
  CHECK(kinds(c) ==
        std::vector<ChunkKind>{ChunkKind::kWH, ChunkKind::kVP, ChunkKind::kNP, ChunkKind::kVP});
  REQUIRE(c[2].tags.size() == 1);
}

TEST_CASE("chunker: unknown content word forms an UNKNOWN chunk") {
  auto a = annotate("what time does my plane leave", fp());
  auto c = chunk(a.tokens, a.tags, fp());
  bool found = false;
  for (const auto &ch : c)
    if (ch.kind == ChunkKind::kUnknown && ch.span.contains(4)) found = true;
  CHECK(found);
}

TEST_CASE("chunker: a lone city is one NP") {
  auto c = chunk_of("Newark");
  REQUIRE(c.size() == 1);
  CHECK(c[0].kind == ChunkKind::kNP);
  CHECK(c[0].tags == std::vector<int>{0});
}

TEST_CASE("chunks partition the tokens and hold every tag once") {
  for (std::string_view u : {"I want to go from Boston to Dallas arriving around 4 pm",
                             "which flights leave Newark", "uh, the second one please",
                             "what cities do you know about", "no, Dallas"}) {
    auto a = annotate(u, fp());
    auto c = chunk(a.tokens, a.tags, fp());
    int next = 0;
    std::multiset<int> seen;
    for (const auto &ch : c) {
      CHECK(ch.span.begin == next);
      CHECK(ch.span.size() > 0);
      next = ch.span.end;
      seen.insert(ch.tags.begin(), ch.tags.end());
      for (int t : ch.tags) {
        CHECK(ch.span.begin <= a.tags[t].span.begin);
        CHECK(a.tags[t].span.end <= ch.span.end);
      }
    }
    CHECK(next == static_cast<int>(a.tokens.size()));
    CHECK(seen.size() == a.tags.size());
    for (size_t i = 0; i < a.tags.size(); ++i) CHECK(seen.count(static_cast<int>(i)) == 1);
  }
}

TEST_CASE("acts: correction with old and new value") {
  auto r = acts_of("I said Dallas, not Dulles");
  REQUIRE(r.correction);
  CHECK(r.correction->old_value == Value(std::string("Dulles")));
  CHECK(r.correction->new_value == Value(std::string("Dallas")));
  CHECK(r.correction->semantic_class == "city");
  auto b = acts_of("not Dulles, Dallas");
  REQUIRE(b.correction);
  CHECK(b.correction->old_value == Value(std::string("Dulles")));
  auto c = acts_of("no, Dallas");
  REQUIRE(c.correction);
  CHECK_FALSE(c.correction->old_value);
  CHECK(c.correction->new_value == Value(std::string("Dallas")));
}

TEST_CASE("acts: meta, dont_know, quit, help, repeat, affirm, deny, silence") {
  CHECK(acts_of("what cities do you know about").meta_topic == "city");
  CHECK(acts_of("which cities do you fly to?").meta_topic == "city");
  CHECK(acts_of("i don't know").dont_know);
  CHECK(acts_of("no idea").dont_know);
  CHECK(acts_of("bye").quit);
  CHECK(acts_of("quit").quit);
  CHECK(acts_of("stop").quit);
  CHECK(acts_of("help").help);
  CHECK(acts_of("what can I say?").help);
  CHECK(acts_of("repeat that").repeat);
  CHECK(acts_of("yes").affirm);
  CHECK(acts_of("yeah go ahead").affirm);
  CHECK(acts_of("no").deny);
  CHECK(acts_of("not right").deny);
  CHECK(acts_of("").silence);
  auto none = acts_of("flight 472 from Dallas");
  CHECK_FALSE(none.quit);
  CHECK_FALSE(none.help);
  CHECK_FALSE(none.correction);
  CHECK_FALSE(none.meta_topic);
}

TEST_CASE("acts: actions and ordinals") {
  CHECK(acts_of("please notify me when it lands").action == "notify_landing");
  CHECK(acts_of("the second one").ordinal == 1);
  CHECK(acts_of("the last one").ordinal == -1);
}

TEST_CASE("extract: cue words route cities to fields") {
  auto ex = understand("flight 472 from Dallas to Newark", fp(), {});
  CHECK(ex.ambiguities.empty());
  REQUIRE(ex.bindings.size() == 3);
  CHECK(binding(ex, "flight_number")->value == Value(std::int64_t{472}));
  CHECK(binding(ex, "departure_city")->value == Value(std::string("Dallas")));
  CHECK(binding(ex, "arrival_city")->value == Value(std::string("Newark")));
}

TEST_CASE("extract: verbs are cues too") {
  auto ex = understand("the flight that leaves Boston and reaches Dallas", fp(), {});
  CHECK(binding(ex, "departure_city")->value == Value(std::string("Boston")));
  CHECK(binding(ex, "arrival_city")->value == Value(std::string("Dallas")));
  CHECK(ex.query_type == "arrival_info");
  auto t = understand("arriving around 4 pm", fp(), {});
  REQUIRE(binding(t, "arrival_time"));
  CHECK(binding(t, "arrival_time")->approx);
}

TEST_CASE("extract: a trigger is a cue only when it is a cue word") {
  DialogueContext ctx;
  ctx.query_type = "arrival_info";
  CHECK(understand("leaving at 2:30 pm", fp(), ctx).query_type == std::nullopt);
  CHECK(understand("leaving at 2:30 pm", fp(), {}).query_type == "departure_info");
  DialogueContext lib;
  lib.query_type = "location_info";
  CHECK(understand("who wrote Bleak House", testing::library().pack, lib).query_type == "author_info");
}

TEST_CASE("extract: answering a field clarification sets no query type") {
  auto ctx = testing::context_after({"Newark"});
  REQUIRE(ctx.pending_ambiguity);
  auto ex = understand("the departure city", fp(), ctx);
  CHECK(ex.resolved_pending);
  CHECK(ex.query_type == std::nullopt);
  CHECK(understand("the departure time", fp(), {}).query_type == "departure_info");
}

TEST_CASE("extract: a bare city is field-ambiguous") {
  auto ex = understand("Newark", fp(), {});
  CHECK(ex.bindings.empty());
  REQUIRE(ex.ambiguities.size() == 1);
  CHECK(ex.ambiguities[0].kind == AmbiguityKind::kField);
  CHECK(ex.ambiguities[0].term == "Newark");
  CHECK(ex.ambiguities[0].candidates == std::vector<std::string>{"departure_city", "arrival_city"});
}

TEST_CASE("extract: out-of-scope terms") {
  auto ex = understand("what time does Delta flight 472 reach Dallas?", fp(), {});
  REQUIRE(ex.out_of_scope_hits.size() == 1);
  CHECK(ex.out_of_scope_hits[0].first == "Delta");
  CHECK(ex.out_of_scope_hits[0].second.find("American Airlines") != std::string::npos);
}

TEST_CASE("extract: unknown content words") {
  auto ex = understand("what time does my plane leave", fp(), {});
  CHECK(ex.unknown_terms == std::vector<std::string>{"plane"});
  CHECK(ex.query_type == "departure_info");
}

TEST_CASE("extract: each term is accounted for once") {
  for (std::string_view u :
       {"flight 472 from Dallas to Newark", "Newark", "Delta flight 472", "my plane from Boston",
        "from Boston to Dallas around 4 pm"}) {
    auto a = annotate(u, fp());
    auto ex = understand(u, fp(), {});
    size_t accounted = ex.bindings.size() + ex.ambiguities.size() + ex.unknown_terms.size() +
                       ex.out_of_scope_hits.size();
    size_t unknown_words = 0;
    for (const auto &c : chunk(a.tokens, a.tags, fp()))
      if (c.kind == ChunkKind::kUnknown) ++unknown_words;
    CHECK_MESSAGE(accounted == a.tags.size() + ex.unknown_terms.size(), u);
    CHECK(unknown_words >= (ex.unknown_terms.empty() ? 0u : 1u));
  }
}

TEST_CASE("nlu functions are pure") {
  DialogueContext ctx;
  ctx.expected_field = "arrival_city";
  auto a = understand("I said Dallas, not Dulles", fp(), ctx);
  auto b = understand("I said Dallas, not Dulles", fp(), ctx);
  CHECK(a == b);
}

TEST_CASE("extract: library class ambiguity and cue resolution") {
  const auto &lp = testing::library().pack;
  auto ex = understand("is Dickens available", lp, {});
  REQUIRE(ex.ambiguities.size() == 1);
  CHECK(ex.ambiguities[0].kind == AmbiguityKind::kClass);
  CHECK(ex.ambiguities[0].candidates == std::vector<std::string>{"author", "title"});
  CHECK(ex.query_type == "availability_info");
  auto by = understand("books by Dickens", lp, {});
  REQUIRE(by.ambiguities.size() == 1);
  CHECK(by.ambiguities[0].kind == AmbiguityKind::kLexical);
  CHECK(by.ambiguities[0].candidates ==
        std::vector<std::string>{"Dickens, Charles", "Dickens, Monica"});
  auto title = understand("the book Dickens", lp, {});
  CHECK(title.ambiguities.empty());
  REQUIRE(binding(title, "title"));
  CHECK(binding(title, "title")->value == Value(std::string("Dickens")));
}

TEST_CASE("merge: correction replaces the binding holding the old value") {
  DialogueContext ctx;
  ctx.bindings["arrival_city"] = bound("arrival_city", std::string("Dulles"), "city");
  ctx.turn_index = 2;
  auto m = merge(ctx, understand("I said Dallas, not Dulles", fp(), ctx), fp());
  const auto &b = m.context.bindings.at("arrival_city");
  CHECK(b.value == Value(std::string("Dallas")));
  CHECK(b.status == BindingStatus::kCorrected);
  CHECK(m.corrected_field == "arrival_city");
  CHECK(m.changed_fields == std::set<std::string>{"arrival_city"});
}

TEST_CASE("merge: correction of an unbound value throws") {
  DialogueContext ctx;
  ctx.bindings["arrival_city"] = bound("arrival_city", std::string("Miami"), "city");
  CHECK_THROWS_AS(merge(ctx, understand("I said Dallas, not Dulles", fp(), ctx), fp()),
                  CorrectionTargetNotFound);
}

TEST_CASE("merge: the expected field resolves field ambiguity") {
  DialogueContext ctx;
  ctx.expected_field = "arrival_city";
  auto m = merge(ctx, understand("Newark", fp(), ctx), fp());
  CHECK(m.open_ambiguities.empty());
  CHECK(m.context.bindings.at("arrival_city").value == Value(std::string("Newark")));
  DialogueContext none;
  auto n = merge(none, understand("Newark", fp(), none), fp());
  CHECK(n.open_ambiguities.size() == 1);
  CHECK(n.context.bindings.empty());
}

TEST_CASE("merge is idempotent and latest-turn-wins") {
  DialogueContext ctx;
  auto ex = understand("flight 472 from Boston", fp(), ctx);
  auto once = merge(ctx, ex, fp());
  auto twice = merge(once.context, ex, fp());
  CHECK(twice.context.bindings == once.context.bindings);
  CHECK(twice.changed_fields.empty());

  auto later = understand("from Dallas", fp(), once.context);
  auto m = merge(once.context, later, fp());
  CHECK(m.context.bindings.at("departure_city").value == Value(std::string("Dallas")));
  CHECK(m.changed_fields == std::set<std::string>{"departure_city"});

  DialogueContext corrected;
  corrected.bindings["arrival_city"] = bound("arrival_city", std::string("Dulles"), "city");
  auto fix = understand("I said Dallas, not Dulles", fp(), corrected);
  auto c1 = merge(corrected, fix, fp());
  auto c2 = merge(c1.context, fix, fp());
  CHECK(c2.context.bindings == c1.context.bindings);
}

}  // TEST_SUITE
