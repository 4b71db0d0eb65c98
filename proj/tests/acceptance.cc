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


// Acceptance suite: prints one PASS/FAIL line per criterion and exits
// non-zero when any criterion fails.

#include <algorithm>
#include <chrono>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "infodialog/dialog.h"
#include "infodialog/errors.h"
#include "infodialog/flight.h"
#include "infodialog/nlu.h"
#include "infodialog/query.h"
#include "infodialog/service.h"
#include "infodialog/text.h"
#include "testing.h"

using namespace infodialog;
namespace fs = std::filesystem;

namespace {

// Collects failure notes for one criterion.
struct Check {
  std::vector<std::string> failures;

  void expect(bool ok, const std::string &what) {
    if (!ok) failures.push_back(what);
  }
  template <typename A, typename B>
  void equal(const A &actual, const B &expected, const std::string &what) {
    if (!(actual == expected)) {
      std::ostringstream s;
      s << what << ": got <" << actual << "> want <" << expected << ">";
      failures.push_back(s.str());
    }
  }
};

std::string state_label(UpperState s, const std::optional<LowerState> &sub) {
  std::string out(name_of(s));
  if (sub) out += "/" + std::string(name_of(*sub));
  return out;
}

std::string joined(const std::vector<std::string> &v) { return join(v, " > "); }

// ---------------------------------------------------------------------------
// Scripted dialogues (criteria 1, 3 and 9).

struct Scenario {
  std::string name;
  std::string domain;
  std::vector<std::string> utterances;
  std::vector<std::string> states;  // greeting first
  std::string final_reply;
};

struct ScenarioRun {
  std::vector<std::string> states;
  std::string final_reply;
  std::vector<TranscriptEntry> entries;
  std::vector<TurnDebug> debug;
};

ScenarioRun play(const Scenario &s, SessionConfig config = {}) {
  config.domain = s.domain;
  Session session("scenario", testing::registry().get(s.domain), config);
  ScenarioRun run;
  for (const auto &u : s.utterances) run.debug.push_back(session.step(u).debug);
  run.entries = session.transcript();
  for (const auto &e : run.entries) run.states.push_back(state_label(e.state, e.sub_state));
  run.final_reply = run.entries.back().reply;
  return run;
}

void check_scenario(Check &check, const Scenario &s, std::vector<ScenarioRun> *runs = nullptr) {
  auto run = play(s);
  check.equal(joined(run.states), joined(s.states), s.name + " states");
  check.equal(run.final_reply, s.final_reply, s.name + " final reply");
  if (runs) runs->push_back(std::move(run));
}

const std::vector<Scenario> &state_scenarios() {
  static const std::vector<Scenario> scenarios = {
      {"initial", "flights", {}, {"INITIAL"},
       "Welcome to the American Airlines flight information system. You can ask about the arrival or "
       "departure of any flight."},
      {"quit", "flights", {"from Boston", "goodbye"},
       {"INITIAL", "MANDATORY_FIELDS", "QUIT"},
       "Goodbye, and thank you for calling."},
      {"meta query", "flights", {"what cities do you know about"},
       {"INITIAL", "META_QUERY"},
       "I know about these cities: Atlanta, Boston, Chicago, Dallas, Denver, Detroit, Dulles, Houston, "
       "Las Vegas, Los Angeles and 10 more."},
      {"out of bounds", "flights", {"what time does Delta flight 472 reach Dallas?"},
       {"INITIAL", "OUT_OF_BOUNDS"},
       "Sorry, I only have information about American Airlines flights. You can ask me about the "
       "arrival or departure of any American Airlines flight."},
      {"status quo", "flights", {"from Boston to Dallas", "i don't know"},
       {"INITIAL", "MANDATORY_FIELDS", "STATUS_QUO"},
       "That's all right. About what time does the flight arrive? You can also say \"help\"."},
      {"ambiguous", "flights", {"Newark"},
       {"INITIAL", "AMBIGUOUS"},
       "Is Newark the departure city or the arrival city?"},
      {"inconsistent", "flights", {"leaving from Boston", "going to Boston"},
       {"INITIAL", "MANDATORY_FIELDS", "INCONSISTENT"},
       "The departure city and the arrival city can't be the same. I have Boston as the departure "
       "city and Boston as the arrival city."},
      {"correction", "flights", {"from Boston to Dulles", "I said Dallas, not Dulles"},
       {"INITIAL", "MANDATORY_FIELDS", "CORRECTION"},
       "OK, Dallas, not Dulles. About what time does the flight arrive?"},
      {"mandatory fields", "flights", {"when does it leave"},
       {"INITIAL", "MANDATORY_FIELDS"},
       "What is the flight number?"},
      {"success", "flights", {"flight 472", "when does it arrive?"},
       {"INITIAL", "UNKNOWN_QUERY", "SUCCESS"},
       "Flight 472 from New York to Dallas arrives in Dallas at 10:30 am."},
      {"database conflict", "flights", {"from Newark to Miami arriving around 3 pm"},
       {"INITIAL", "DATABASE_CONFLICT/CONFIRM_VALUE"},
       "I have Newark as the departure city. Is that right?"},
      {"unknown query", "flights", {"flight 472"},
       {"INITIAL", "UNKNOWN_QUERY"},
       "I found flight 472 from New York to Dallas. Would you like to know the gate, the status, the "
       "arrival time or the departure time?"},
      {"few matches", "flights", {"from Newark to Miami arriving around ten am"},
       {"INITIAL", "FEW_MATCHES"},
       "I found 3 matches:\n1. flight 136 from Newark to Miami\n2. flight 234 from Newark to Miami\n"
       "3. flight 356 from Newark to Miami"},
      {"many matches", "flights", {"from Boston to Dallas arriving around 5 pm"},
       {"INITIAL", "MANY_MATCHES/GET_CONSTRAINT"},
       "I found 8 matches. What is the flight number?"},
  };
  return scenarios;
}

const std::vector<Scenario> &library_scenarios() {
  static const std::vector<Scenario> scenarios = {
      {"dickens class then lexical ambiguity", "library",
       {"is Dickens available?", "the author", "Charles", "the second one"},
       {"INITIAL", "AMBIGUOUS", "AMBIGUOUS", "FEW_MATCHES", "SUCCESS"},
       "Oliver Twist by Dickens, Charles is checked out."},
      {"dickens the title", "library", {"where is the book Dickens"},
       {"INITIAL", "SUCCESS"},
       "Dickens by Ackroyd, Peter is at the Main branch, shelf 823 ACK."},
      {"ask for the title first", "library", {"is it available", "Emma"},
       {"INITIAL", "MANDATORY_FIELDS", "SUCCESS"},
       "Emma by Austen, Jane is available."},
      {"who wrote it", "library", {"who wrote Bleak House"},
       {"INITIAL", "SUCCESS"},
       "Bleak House was written by Dickens, Charles."},
      {"out of scope", "library", {"do you have any dvds by Dickens"},
       {"INITIAL", "OUT_OF_BOUNDS"},
       "Sorry, I can only look up books. You can ask me a question in your own words, say \"repeat that\" to "
       "hear my last answer, or say \"goodbye\" to stop."},
  };
  return scenarios;
}

// ---------------------------------------------------------------------------
// Criterion 2: order soundness.

const std::vector<UpperState> kDecisionOrder = {
    UpperState::kQuit,          UpperState::kMetaQuery,       UpperState::kOutOfBounds,
    UpperState::kStatusQuo,     UpperState::kAmbiguous,       UpperState::kInconsistent,
    UpperState::kCorrection,    UpperState::kMandatoryFields, UpperState::kSuccess,
    UpperState::kDatabaseConflict, UpperState::kUnknownQuery, UpperState::kFewMatches,
    UpperState::kManyMatches,
};

int rank_of(UpperState s) {
  return static_cast<int>(std::find(kDecisionOrder.begin(), kDecisionOrder.end(), s) - kDecisionOrder.begin());
}

struct Probe {
  DialogueContext ctx;
  ExtractionResult ex;
};

bool violates(const ConsistencyRule &rule, const Bindings &b) {
  auto l = b.find(rule.left_field), r = b.find(rule.right_field);
  if (l == b.end() || r == b.end()) return false;
  const Value &a = l->second.value, &c = r->second.value;
  switch (rule.relation) {
    case Relation::kNotEqual:
      return to_lower(to_string(a)) == to_lower(to_string(c));
    case Relation::kLessThan:
      return !(a < c);
    case Relation::kGreaterThan:
      return !(c < a);
  }
  return false;
}

// Independent statement of each state's trigger condition.
std::set<UpperState> triggered(const Probe &p) {
  const DomainPack &pack = testing::flights().pack;
  const ApplicationSchema &schema = pack.schema;
  std::set<UpperState> out;
  const ActReport &acts = p.ex.acts;
  if (acts.quit) out.insert(UpperState::kQuit);
  if (acts.help || acts.meta_topic) out.insert(UpperState::kMetaQuery);
  if (!p.ex.out_of_scope_hits.empty() || !p.ex.unknown_terms.empty()) out.insert(UpperState::kOutOfBounds);

  MergeResult m = merge(p.ctx, p.ex, pack);
  bool news = !m.changed_fields.empty() || !m.open_ambiguities.empty() || m.corrected_field ||
              m.query_type_changed;
  if (!news) out.insert(UpperState::kStatusQuo);
  if (!m.open_ambiguities.empty()) out.insert(UpperState::kAmbiguous);
  for (const auto &rule : schema.consistency_rules)
    if (violates(rule, m.context.bindings)) out.insert(UpperState::kInconsistent);
  if (acts.correction) out.insert(UpperState::kCorrection);

  bool complete = false;
  for (const auto &set : schema.mandatory_sets)
    complete = complete || std::all_of(set.begin(), set.end(), [&](const std::string &f) {
                 return m.context.bindings.count(f) > 0;
               });
  if (!complete) {
    out.insert(UpperState::kMandatoryFields);
    return out;
  }
  size_t count = 0;
  for (const auto &row : testing::flights().store.rows()) {
    bool all = true;
    for (const auto &[name, b] : m.context.bindings) {
      const Value &v = row.at(schema.field(name)->db_column);
      if (b.approx || b.window > 0) {
        int w = b.window > 0 ? b.window : schema.approx_window;
        all = all && std::llabs(std::get<std::int64_t>(v) - std::get<std::int64_t>(b.value)) <= w;
      } else {
        all = all && v == b.value;
      }
    }
    count += all;
  }
  bool typed = m.context.query_type.has_value();
  size_t k = static_cast<size_t>(schema.few_threshold);
  if (count == 0) out.insert(UpperState::kDatabaseConflict);
  if (count == 1 && typed) out.insert(UpperState::kSuccess);
  if (count >= 1 && !typed) out.insert(UpperState::kUnknownQuery);
  if (count >= 2 && count <= k) out.insert(UpperState::kFewMatches);
  if (count > k) out.insert(UpperState::kManyMatches);
  return out;
}

FieldBinding binding_of(const std::string &field, Value v, int turn = 1) {
  FieldBinding b;
  b.field = field;
  b.value = std::move(v);
  b.semantic_class = testing::flights().pack.schema.field(field)->semantic_class;
  b.turn = turn;
  return b;
}

Probe probe(Bindings ctx_bindings, std::string_view utterance) {
  Probe p;
  p.ctx.bindings = std::move(ctx_bindings);
  p.ctx.turn_index = 1;
  p.ex = understand(utterance, testing::flights().pack, p.ctx);
  return p;
}

// Minimal context in which `s` alone is triggered.
Probe base_probe(UpperState s) {
  Bindings boston{{"departure_city", binding_of("departure_city", std::string("Boston"))}};
  switch (s) {
    case UpperState::kQuit: return probe(boston, "goodbye");
    case UpperState::kMetaQuery: return probe({}, "what cities do you know about");
    case UpperState::kOutOfBounds: return probe({}, "what time does Delta flight 472 reach Dallas?");
    case UpperState::kStatusQuo: return probe(boston, "i don't know");
    case UpperState::kAmbiguous: return probe({}, "Newark");
    case UpperState::kInconsistent: return probe(boston, "to Boston");
    case UpperState::kCorrection: {
      Bindings b = boston;
      b["arrival_city"] = binding_of("arrival_city", std::string("Dulles"));
      return probe(b, "I said Dallas, not Dulles");
    }
    case UpperState::kMandatoryFields: return probe({}, "from Boston");
    case UpperState::kSuccess: return probe({}, "when does flight 472 arrive");
    case UpperState::kDatabaseConflict: return probe({}, "from Newark to Miami arriving around 3 pm");
    case UpperState::kUnknownQuery: return probe({}, "flight 472");
    case UpperState::kFewMatches: return probe({}, "from Newark to Miami arriving around ten am");
    case UpperState::kManyMatches: return probe({}, "from Boston to Dallas arriving around 5 pm");
    default: return probe({}, "");
  }
}

// The partner's information, already in the frame before this turn.
Probe settled(const Probe &partner) {
  MergeResult m = merge(partner.ctx, partner.ex, testing::flights().pack);
  Probe p;
  p.ctx = m.context;
  p.ctx.expected_field.reset();
  p.ex = understand("i don't know", testing::flights().pack, p.ctx);
  return p;
}

// Adds the trigger of `earlier` to a context where `later` is triggered.
std::optional<Probe> combine(UpperState earlier, UpperState later) {
  const DomainPack &pack = testing::flights().pack;
  Probe p = base_probe(later);
  switch (earlier) {
    case UpperState::kQuit:
      p.ex.acts.quit = true;
      return p;
    case UpperState::kMetaQuery:
      if (rank_of(later) % 2) p.ex.acts.help = true;
      else p.ex.acts.meta_topic = "city";
      return p;
    case UpperState::kOutOfBounds:
      p.ex.out_of_scope_hits.push_back({"Delta", "Sorry, I only have information about American Airlines flights."});
      return p;
    case UpperState::kStatusQuo:
      if (later == UpperState::kAmbiguous || later == UpperState::kCorrection) return std::nullopt;
      return settled(p);
    case UpperState::kAmbiguous: {
      auto extra = understand("Newark", pack, p.ctx).ambiguities;
      p.ex.ambiguities.insert(p.ex.ambiguities.end(), extra.begin(), extra.end());
      return p;
    }
    case UpperState::kInconsistent: {
      Bindings boston{{"departure_city", binding_of("departure_city", std::string("Boston"))}};
      if (later == UpperState::kCorrection) {
        boston["arrival_city"] = binding_of("arrival_city", std::string("Dulles"));
        return probe(boston, "I said Boston, not Dulles");
      }
      if (later == UpperState::kMandatoryFields) return probe(boston, "to Boston");
      if (later == UpperState::kDatabaseConflict) return probe(boston, "to Boston arriving around 5 pm");
      return std::nullopt;
    }
    case UpperState::kCorrection: {
      // The partner's frame, with one value said wrongly before and
      // corrected now.
      MergeResult m = merge(p.ctx, p.ex, pack);
      if (m.context.bindings.empty()) return std::nullopt;
      Probe c;
      c.ctx = m.context;
      c.ctx.expected_field.reset();
      const FieldBinding &target = c.ctx.bindings.begin()->second;
      Value right = target.value;
      Value wrong = is_number(right) ? Value(std::get<std::int64_t>(right) + 1)
                                     : Value(std::string(to_string(right) == "Dulles" ? "Denver" : "Dulles"));
      c.ctx.bindings.begin()->second.value = wrong;
      c.ex.acts.correction = CorrectionAct{wrong, right, target.semantic_class, {}};
      return c;
    }
    case UpperState::kUnknownQuery:
      // The other post-query triggers are mutually exclusive by count.
      if (later != UpperState::kFewMatches && later != UpperState::kManyMatches) return std::nullopt;
      p.ex.query_type.reset();
      return p;
    default:
      return std::nullopt;
  }
}

// ---------------------------------------------------------------------------
// Criterion 4: exhaustive expected-residual oracle.

std::string oracle_field(const std::vector<Row> &rows, const std::vector<std::string> &unbound,
                         const ApplicationSchema &schema) {
  std::string best;
  double best_e = 0;
  for (const auto &f : schema.fields) {
    if (std::find(unbound.begin(), unbound.end(), f.name) == unbound.end()) continue;
    std::map<std::string, double> counts;
    for (const auto &r : rows) {
      const Value &v = r.at(f.db_column);
      counts[(is_number(v) ? "n:" : "s:") + to_string(v)] += 1;
    }
    double e = 0;
    for (const auto &[value, c] : counts) e += c * c;
    e /= static_cast<double>(rows.size());
    if (best.empty() || e < best_e) {
      best = f.name;
      best_e = e;
    }
  }
  return best;
}

// ---------------------------------------------------------------------------
// Criterion 8: independent checks of the dataset guarantees.

std::vector<std::string> guarantees(const std::vector<FlightRow> &rows, size_t k) {
  std::vector<std::string> out;
  std::set<int> numbers;
  for (const auto &r : rows)
    if (!numbers.insert(r.flight_number).second) out.push_back("duplicate flight number");
  std::map<std::pair<std::string, std::string>, std::vector<int>> by_pair;
  for (const auto &r : rows) by_pair[{r.departure_city, r.arrival_city}].push_back(r.arrival_time);
  bool many = false, few = false;
  for (const auto &[pair, times] : by_pair) {
    for (int start : times) {
      size_t in = std::count_if(times.begin(), times.end(),
                                [&](int t) { return t >= start && t <= start + 120; });
      many = many || in > k;
    }
    few = few || (times.size() >= 2 && times.size() <= k);
  }
  if (!many) out.push_back("no MANY window");
  if (!few) out.push_back("no FEW pair");
  auto has = [&](const std::string &city) {
    return std::any_of(rows.begin(), rows.end(), [&](const FlightRow &r) {
      return r.departure_city == city || r.arrival_city == city;
    });
  };
  if (!has("Dallas")) out.push_back("no Dallas");
  if (!has("Dulles")) out.push_back("no Dulles");
  return out;
}

// ---------------------------------------------------------------------------

std::vector<std::string> sorted_rows(const std::vector<Row> &rows, const std::vector<Column> &columns) {
  std::vector<std::string> out;
  for (const auto &r : rows) {
    std::string line;
    for (const auto &c : columns) line += format_cell(r.at(c.name), c.type) + "|";
    out.push_back(line);
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

int main() {
  int failed = 0;
  auto report = [&](int n, const std::string &what, const Check &c) {
    bool ok = c.failures.empty();
    std::cout << "criterion " << n << ": " << (ok ? "PASS" : "FAIL") << " - " << what << "\n";
    for (const auto &f : c.failures) std::cout << "    " << f << "\n";
    std::cout.flush();
    failed += !ok;
  };
  const Domain &flights = testing::flights();
  const DomainPack &pack = flights.pack;

  // 1. One scripted dialogue per upper state.
  std::vector<ScenarioRun> runs;
  {
    Check c;
    auto start = std::chrono::steady_clock::now();
    std::set<std::string> covered;
    for (const auto &s : state_scenarios()) {
      check_scenario(c, s, &runs);
      std::string last = s.states.back();
      covered.insert(last.substr(0, last.find('/')));
    }
    double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    c.equal(covered.size(), kAllUpperStates.size(), "distinct final states");
    c.expect(seconds < 5.0, "runtime " + std::to_string(seconds) + " s");
    report(1, std::to_string(state_scenarios().size()) + " state scenarios, " + std::to_string(seconds).substr(0, 5) + " s", c);
  }

  // 2. Earlier states win when two triggers hold.
  {
    Check c;
    int pairs = 0;
    for (size_t i = 0; i < kDecisionOrder.size(); ++i)
      for (size_t j = i + 1; j < kDecisionOrder.size(); ++j) {
        auto p = combine(kDecisionOrder[i], kDecisionOrder[j]);
        if (!p) continue;
        std::string name = std::string(name_of(kDecisionOrder[i])) + " vs " + std::string(name_of(kDecisionOrder[j]));
        auto holds = triggered(*p);
        if (!holds.count(kDecisionOrder[i]) || !holds.count(kDecisionOrder[j])) {
          c.failures.push_back(name + ": construction does not trigger both states");
          continue;
        }
        LocalQuerier q(flights.store);
        auto out = decide_state(p->ctx, p->ex, pack, q);
        c.equal(std::string(name_of(out.decision.state)), std::string(name_of(kDecisionOrder[i])), name);
        ++pairs;
      }
    c.expect(pairs >= 30, "only " + std::to_string(pairs) + " pairs");
    report(2, std::to_string(pairs) + " order-soundness pairs", c);
  }

  // 3. Query frugality over every scripted dialogue.
  {
    Check c;
    std::vector<ScenarioRun> all = runs;
    for (const auto &s : library_scenarios()) all.push_back(play(s));
    for (const auto &e : fs::directory_iterator(INFODIALOG_TRANSCRIPTS_DIR)) {
      if (e.path().extension() != ".jsonl") continue;
      TranscriptFile t = read_transcript(e.path());
      Scenario s{e.path().stem().string(), t.config.domain, {}, {}, {}};
      for (size_t i = 1; i < t.entries.size(); ++i) s.utterances.push_back(t.entries[i].utterance);
      all.push_back(play(s, t.config));
    }
    size_t turns = 0;
    for (const auto &run : all)
      for (size_t t = 1; t < run.entries.size(); ++t) {
        const auto &e = run.entries[t];
        const auto &d = run.debug[t - 1];
        ++turns;
        std::string where = std::string(name_of(e.state)) + " on \"" + e.utterance + "\"";
        if (is_post_query(e.state)) {
          c.equal(d.classification_queries, 1, where + " classification queries");
          c.equal(d.querier_invocations, d.classification_queries + d.probe_queries, where + " invocations");
        } else {
          c.equal(d.querier_invocations, 0, where + " invocations");
        }
      }
    report(3, std::to_string(turns) + " scripted turns checked", c);
  }

  // 4. GET_CONSTRAINT field choice equals the exhaustive argmin.
  {
    Check c;
    std::mt19937 rng(20260704);
    std::vector<std::string> all_fields;
    for (const auto &f : pack.schema.fields) all_fields.push_back(f.name);
    for (int i = 0; i < 100; ++i) {
      // Two datasets together reach the 1000-row bound.
      auto first = generate_dataset(rng(), kMaxRows), second = generate_dataset(rng(), 100);
      first.insert(first.end(), second.begin(), second.end());
      std::vector<Row> rows = to_store(first).rows();
      std::shuffle(rows.begin(), rows.end(), rng);
      size_t n = i % 4 == 0 ? 2 + rng() % 4 : 2 + rng() % 999;
      rows.resize(n);
      std::vector<std::string> unbound;
      while (unbound.empty())
        for (const auto &f : all_fields)
          if (rng() % 2) unbound.push_back(f);
      std::shuffle(unbound.begin(), unbound.end(), rng);
      c.equal(select_informative_field(rows, unbound, pack.schema), oracle_field(rows, unbound, pack.schema),
              "slice " + std::to_string(i));
    }
    report(4, "100 random slices agree with the exhaustive oracle", c);
  }

  // 5. Local and CGI back-ends agree.
  {
    Check c;
    MockSite site(flights.store, pack, {});
    int port = site.start();
    auto transport = http_transport("http://127.0.0.1:" + std::to_string(port));
    std::mt19937 rng(4242);
    const auto &rows = flights.store.rows();
    auto city = [&] { return std::string(kCities[rng() % kCities.size()]); };
    size_t nonzero = 0;
    for (int i = 0; i < 200; ++i) {
      const Row &seed_row = rows[rng() % rows.size()];
      bool real = rng() % 10 < 7;
      auto text = [&](const char *col) { return real ? seed_row.at(col) : Value(city()); };
      std::vector<QueryConstraint> cs;
      int form = i % 3;
      if (form == 0) {
        std::int64_t number = real ? std::get<std::int64_t>(seed_row.at("fltNumber")) : 100 + rng() % 900;
        cs.push_back({"fltNumber", ConstraintOp::kEq, number, 0});
        if (rng() % 3 == 0) cs.push_back({"depCity", ConstraintOp::kEq, text("depCity"), 0});
        if (rng() % 3 == 0) cs.push_back({"arrCity", ConstraintOp::kEq, text("arrCity"), 0});
      } else {
        const char *time_col = form == 1 ? "arrTime" : "depTime";
        cs.push_back({"depCity", ConstraintOp::kEq, text("depCity"), 0});
        cs.push_back({"arrCity", ConstraintOp::kEq, text("arrCity"), 0});
        std::int64_t center = real ? std::get<std::int64_t>(seed_row.at(time_col)) + 5 * (static_cast<int>(rng() % 49) - 24)
                                   : 300 + 5 * (rng() % 228);
        center = std::clamp<std::int64_t>(center, 0, 23 * 60 + 55);
        int window = std::array<int, 4>{0, 120, 240, 480}[rng() % 4];
        if (window == 0) cs.push_back({time_col, ConstraintOp::kEq, center, 0});
        else cs.push_back({time_col, ConstraintOp::kWithinWindow, center, window});
      }
      auto local = exec_local(flights.store, cs, kNoRowCap);
      CgiRequest req = build_cgi_request(cs, pack);
      c.expect(residual_constraints(cs, req, pack).empty(), "set " + std::to_string(i) + " not fully expressible");
      HttpReply reply = transport(req);
      if (reply.status != 200) {
        c.failures.push_back(req.url() + " -> HTTP " + std::to_string(reply.status));
        continue;
      }
      auto remote = scrape_rows(reply.body, pack.scrape, flights.store.columns(), kNoRowCap);
      c.equal(remote.count, local.count, req.url() + " count");
      c.expect(sorted_rows(remote.rows, flights.store.columns()) == sorted_rows(local.rows, flights.store.columns()),
               req.url() + " rows differ");
      nonzero += local.count > 0;
    }
    site.stop();
    c.expect(nonzero >= 50, "only " + std::to_string(nonzero) + " sets matched any row");
    report(5, "200 constraint sets agree across back-ends (" + std::to_string(nonzero) + " non-empty)", c);
  }

  // 6. Recorded transcripts replay byte for byte.
  {
    Check c;
    std::vector<fs::path> files;
    for (const auto &e : fs::directory_iterator(INFODIALOG_TRANSCRIPTS_DIR))
      if (e.path().extension() == ".jsonl") files.push_back(e.path());
    std::sort(files.begin(), files.end());
    c.expect(files.size() >= 10, "only " + std::to_string(files.size()) + " transcripts");
    bool relax_chain = false, narrow_chain = false;
    for (const auto &path : files) {
      TranscriptFile t = read_transcript(path);
      for (const auto &m : replay(t, testing::registry()))
        c.failures.push_back(path.filename().string() + " turn " + std::to_string(m.turn) + ": want <" +
                             m.expected + "> got <" + m.actual + ">");
      std::vector<std::string> seq;
      for (const auto &e : t.entries) seq.push_back(state_label(e.state, e.sub_state));
      auto has_chain = [&](std::vector<std::string> chain) {
        return std::search(seq.begin(), seq.end(), chain.begin(), chain.end()) != seq.end();
      };
      relax_chain = relax_chain || has_chain({"DATABASE_CONFLICT/CONFIRM_VALUE", "DATABASE_CONFLICT/RELAX_CONSTRAINT",
                                              "FEW_MATCHES"});
      narrow_chain = narrow_chain || has_chain({"MANY_MATCHES/GET_CONSTRAINT", "SUCCESS"});
    }
    c.expect(relax_chain, "no CONFIRM_VALUE > RELAX_CONSTRAINT > FEW_MATCHES transcript");
    c.expect(narrow_chain, "no MANY_MATCHES/GET_CONSTRAINT > SUCCESS transcript");
    report(6, std::to_string(files.size()) + " transcripts replay identically", c);
  }

  // 7. Pinned CGI requests for the three mandatory sets.
  {
    Check c;
    auto request_for = [&](std::vector<std::pair<std::string, Value>> values, const std::string &approx_field) {
      Bindings b;
      for (auto &[field, v] : values) {
        b[field] = binding_of(field, v);
        b[field].approx = field == approx_field;
      }
      return build_cgi_request(compile_constraints(b, pack), pack).url();
    };
    c.equal(request_for({{"flight_number", std::int64_t{472}}}, ""), std::string("/aa/flight?fltAns=byNumber&fltNumber=472"),
            "flight number");
    c.equal(request_for({{"departure_city", std::string("New York")},
                         {"arrival_city", std::string("Dallas")},
                         {"arrival_time", std::int64_t{630}}},
                        "arrival_time"),
            std::string("/aa/flight?fltAns=byArrival&depCity=New%20York&arrCity=Dallas&arrTime=1030&arrWin=2"),
            "cities and arrival time");
    c.equal(request_for({{"departure_city", std::string("Boston")},
                         {"arrival_city", std::string("Dallas")},
                         {"departure_time", std::int64_t{870}}},
                        "departure_time"),
            std::string("/aa/flight?fltAns=byDeparture&depCity=Boston&arrCity=Dallas&depTime=1430&depWin=2"),
            "cities and departure time");
    report(7, "3 pinned CGI requests", c);
  }

  // 8. Dataset fixture digest and guarantees.
  {
    Check c;
    c.equal(fnv1a_hex(""), std::string("cbf29ce484222325"), "fnv1a of empty");
    c.equal(fnv1a_hex("a"), std::string("af63dc4c8601ec8c"), "fnv1a of a");
    auto rows = generate_dataset(7, 200);
    c.equal(rows.size(), size_t{200}, "row count");
    c.equal(fnv1a_hex(serialize_dataset(rows)), std::string("0623885c446bd18e"), "digest");
    for (const auto &g : guarantees(rows, static_cast<size_t>(pack.schema.few_threshold))) c.failures.push_back(g);
    report(8, "generate_dataset(7, 200) digest and guarantees", c);
  }

  // 9. Porting: the library pack with no engine changes.
  {
    Check c;
    const Domain &library = testing::library();
    c.equal(library.pack.schema.fields.size(), size_t{3}, "library fields");
    c.equal(resolve_user_term("Dickens", std::nullopt, library.pack.lexicon).size(), size_t{3}, "Dickens readings");
    for (const auto &s : library_scenarios()) check_scenario(c, s);
    report(9, std::to_string(library_scenarios().size()) + " library dialogues", c);
  }

  std::cout << (failed ? "FAILED" : "ALL PASSED") << "\n";
  return failed ? 1 : 0;
}
