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

#include "infodialog/dialog.h"

#include <algorithm>
#include <cstdio>
#include <map>

#include "infodialog/errors.h"
#include "infodialog/interactor.h"
#include "infodialog/text.h"

namespace infodialog {

std::string display_value(const ApplicationSchema &schema, const std::string &field, const Value &v,
                          bool approx) {
  const FieldSpec *f = schema.field(field);
  if (f && f->semantic_class == kTimeOfDayClass && is_number(v))
    return (approx ? "around " : "") + format_clock(static_cast<int>(std::get<std::int64_t>(v)));
  return to_string(v);
}

std::map<std::string, std::string> row_slots(const Row &row, const ApplicationSchema &schema) {
  std::map<std::string, std::string> out;
  for (const auto &f : schema.fields)
    if (auto it = row.find(f.db_column); it != row.end())
      out[f.name] = display_value(schema, f.name, it->second);
  for (const auto &r : schema.report_columns)
    if (auto it = row.find(r.column); it != row.end()) out[r.name] = to_string(it->second);
  return out;
}

std::string row_label(const Row &row, const ApplicationSchema &schema) {
  InteractionTemplate t;
  for (auto &[k, v] : row_slots(row, schema)) t.slots[k] = v;
  return expand(schema.row_label, t);
}

size_t residual_score(const std::vector<Row> &rows, const FieldSpec &field) {
  std::map<std::string, size_t> counts;
  for (const auto &row : rows) {
    auto it = row.find(field.db_column);
    ++counts[it == row.end() ? std::string("\x01") : (is_number(it->second) ? "#" : "$") + to_string(it->second)];
  }
  size_t sum = 0;
  for (const auto &[v, c] : counts) sum += c * c;
  return sum;
}

std::string select_informative_field(const std::vector<Row> &rows,
                                     const std::vector<std::string> &unbound_fields,
                                     const ApplicationSchema &schema, bool has_row_access) {
  if (unbound_fields.empty()) return {};
  std::vector<std::string> ordered = unbound_fields;
  std::stable_sort(ordered.begin(), ordered.end(), [&](const std::string &a, const std::string &b) {
    return schema.field_index(a) < schema.field_index(b);
  });
  if (!has_row_access) return ordered.front();
  std::string best;
  size_t best_score = 0;
  for (const auto &name : ordered) {
    const FieldSpec *f = schema.field(name);
    if (!f) continue;
    size_t score = residual_score(rows, *f);
    if (best.empty() || score < best_score) {
      best = name;
      best_score = score;
    }
  }
  return best;
}

InteractionTemplate greeting(const DomainPack &pack) {
  InteractionTemplate t;
  t.act = Act::kGreet;
  t.slots["domain"] = pack.schema.domain_name;
  return t;
}

namespace {

InteractionTemplate make(Act act) {
  InteractionTemplate t;
  t.act = act;
  return t;
}

int ambiguity_rank(AmbiguityKind k) {
  switch (k) {
    case AmbiguityKind::kLexical: return 0;
    case AmbiguityKind::kClass: return 1;
    case AmbiguityKind::kField: return 2;
  }
  return 3;
}

class Turn {
 public:
  Turn(const DialogueContext &before, const ExtractionResult &ex, const DomainPack &pack,
       Querier &querier, const DialogOptions &options)
      : before_(before), ex_(ex), pack_(pack), schema_(pack.schema), querier_(querier) {
    k_ = options.few_threshold ? options.few_threshold : static_cast<size_t>(schema_.few_threshold);
    ctx_ = before;
    ctx_.turn_index = before.turn_index + 1;
  }

  TurnOutcome run();

 private:
  TurnOutcome finish(UpperState state, std::string cause, InteractionTemplate t);
  TurnOutcome keep_state(UpperState state, std::string cause, InteractionTemplate t);
  std::optional<TurnOutcome> step_subdialogue();
  TurnOutcome chain();
  std::optional<TurnOutcome> mandatory(const std::optional<std::string> &reason);
  TurnOutcome query_step();
  TurnOutcome conflict(const QueryResultSet &result);
  TurnOutcome relax_or_give_up();
  TurnOutcome no_match();
  TurnOutcome success(const QueryResultSet &result);
  TurnOutcome status_quo();

  std::vector<QueryConstraint> constraints() const { return compile_constraints(ctx_.bindings, pack_); }
  QueryResultSet classify_query() {
    ++decision_.classification_queries;
    decision_.queried = true;
    auto r = querier_.query(constraints(), kNoRowCap);
    decision_.match_count = r.count;
    ctx_.candidate_rows_count = r.count;
    return r;
  }
  std::string label_of(const std::string &field) const {
    const FieldSpec *f = schema_.field(field);
    return f ? f->label : field;
  }
  std::string describe_bindings() const;
  void reset(bool keep_followup);
  std::optional<std::vector<std::string>> missing_of_best_set() const;
  const ActionSpec *action(const std::optional<std::string> &name) const {
    if (!name) return nullptr;
    for (const auto &a : schema_.actions)
      if (a.name == *name) return &a;
    return nullptr;
  }

  const DialogueContext &before_;
  const ExtractionResult &ex_;
  const DomainPack &pack_;
  const ApplicationSchema &schema_;
  Querier &querier_;
  size_t k_ = 5;
  DialogueContext ctx_;
  StateDecision decision_;
  MergeResult merged_;
  bool correction_unmatched_ = false;
  bool restored_followup_ = false;
  bool reset_ = false;
};

TurnOutcome Turn::finish(UpperState state, std::string cause, InteractionTemplate t) {
  decision_.state = state;
  decision_.cause = std::move(cause);
  decision_.template_ = t;
  decision_.sub_state = ctx_.sub_state;
  if (!reset_) ctx_.upper_state = ctx_.sub_state ? owner_of(*ctx_.sub_state) : state;
  ctx_.last_template = std::move(t);
  return {decision_, ctx_};
}

// For turns that leave an active sub-dialogue (and its upper state) alone.
TurnOutcome Turn::keep_state(UpperState state, std::string cause, InteractionTemplate t) {
  decision_.state = state;
  decision_.cause = std::move(cause);
  decision_.template_ = t;
  if (ctx_.sub_state) {
    decision_.sub_state = ctx_.sub_state;
  } else {
    ctx_.upper_state = state;
  }
  ctx_.last_template = std::move(t);
  return {decision_, ctx_};
}

void Turn::reset(bool keep_followup) {
  DialogueContext fresh;
  fresh.turn_index = ctx_.turn_index;
  fresh.query_type = ctx_.query_type;
  if (keep_followup) fresh.followup_bindings = ctx_.bindings;
  else fresh.query_type.reset();
  ctx_ = std::move(fresh);
  reset_ = true;
}

std::string Turn::describe_bindings() const {
  std::vector<std::string> parts;
  for (const auto &f : schema_.fields) {
    auto it = ctx_.bindings.find(f.name);
    if (it == ctx_.bindings.end()) continue;
    parts.push_back("the " + f.label + " " +
                    display_value(schema_, f.name, it->second.value, it->second.approx));
  }
  if (parts.empty()) return "your request";
  std::string out;
  for (size_t i = 0; i < parts.size(); ++i) {
    if (i) out += (i + 1 == parts.size()) ? " and " : ", ";
    out += parts[i];
  }
  return out;
}

// Among partially bound sets (all sets when none is), the one with the
// fewest missing fields; nullopt once some set is complete.
std::optional<std::vector<std::string>> Turn::missing_of_best_set() const {
  std::optional<std::vector<std::string>> best;
  bool best_partial = false;
  for (const auto &set : schema_.mandatory_sets) {
    std::vector<std::string> missing;
    for (const auto &f : set)
      if (!ctx_.bindings.count(f)) missing.push_back(f);
    if (missing.empty()) return std::nullopt;
    bool partial = missing.size() < set.size();
    if (!best || (partial && !best_partial) ||
        (partial == best_partial && missing.size() < best->size())) {
      best = std::move(missing);
      best_partial = partial;
    }
  }
  return best;
}

TurnOutcome Turn::run() {
  const ActReport &acts = ex_.acts;
  ctx_.followup_bindings.reset();

  if (acts.quit) {
    reset(false);
    return finish(UpperState::kQuit, "quit", make(Act::kGoodbye));
  }
  if (acts.meta_topic) {
    return keep_state(UpperState::kMetaQuery, "meta:values", meta_answer(*acts.meta_topic, pack_));
  }
  if (acts.help) {
    auto t = make(Act::kHelp);
    t.slots["state"] = std::string(name_of(before_.upper_state));
    if (before_.sub_state) t.slots["sub_state"] = std::string(name_of(*before_.sub_state));
    if (before_.expected_field) t.slots["expected_field"] = *before_.expected_field;
    t.slots["text"] = help_text(before_.upper_state, before_.sub_state, before_.expected_field, pack_);
    return keep_state(UpperState::kMetaQuery, "meta:help", t);
  }
  if (!ex_.out_of_scope_hits.empty()) {
    auto t = make(Act::kNotifyOob);
    t.slots["term"] = ex_.out_of_scope_hits.front().first;
    t.slots["explanation"] = ex_.out_of_scope_hits.front().second;
    t.slots["reentry_hint"] = help_text(UpperState::kOutOfBounds, std::nullopt, std::nullopt, pack_);
    return keep_state(UpperState::kOutOfBounds, "oob:out_of_scope", t);
  }
  if (!ex_.unknown_terms.empty()) {
    auto t = make(Act::kNotifyUnknownWord);
    t.slots["word"] = ex_.unknown_terms.front();
    return keep_state(UpperState::kOutOfBounds, "oob:unknown_word", t);
  }

  if (before_.followup_bindings && ex_.bindings.empty() && ex_.ambiguities.empty() &&
      !acts.correction && (ex_.query_type || acts.action)) {
    ctx_.bindings = *before_.followup_bindings;
    restored_followup_ = true;
    if (acts.action) ctx_.pending_action = acts.action;
  }

  if (ctx_.sub_state) {
    if (auto out = step_subdialogue()) return *out;
  }
  return chain();
}

std::optional<TurnOutcome> Turn::step_subdialogue() {
  const ActReport &acts = ex_.acts;
  bool new_info = !ex_.bindings.empty() || !ex_.ambiguities.empty() || acts.correction.has_value() ||
                  ex_.resolved_pending || (ex_.query_type && ex_.query_type != ctx_.query_type);
  LowerState sub = *ctx_.sub_state;
  switch (sub) {
    case LowerState::kGetConstraint:
      if (!new_info && acts.dont_know && ctx_.expected_field) {
        ctx_.excluded_fields.push_back(*ctx_.expected_field);
        ctx_.expected_field.reset();
        ctx_.sub_state.reset();
        return query_step();
      }
      return std::nullopt;

    case LowerState::kConfirmValue:
      if (new_info || !ctx_.pending_confirmation) return std::nullopt;
      if (acts.affirm) {
        auto it = ctx_.bindings.find(ctx_.pending_confirmation->first);
        if (it != ctx_.bindings.end()) it->second.status = BindingStatus::kConfirmed;
        ctx_.pending_confirmation.reset();
        ctx_.sub_state.reset();
        return query_step();
      }
      if (acts.deny) {
        std::string field = ctx_.pending_confirmation->first;
        ctx_.bindings.erase(field);
        ctx_.pending_confirmation.reset();
        ctx_.sub_state.reset();
        if (auto asked = mandatory("denied")) return asked;
        return query_step();
      }
      return std::nullopt;

    case LowerState::kRelaxConstraint:
      if (new_info || !ctx_.pending_relax) return std::nullopt;
      if (acts.affirm) {
        auto [field, window] = *ctx_.pending_relax;
        auto it = ctx_.bindings.find(field);
        if (it != ctx_.bindings.end()) {
          it->second.window = window;
          it->second.approx = true;
        }
        ctx_.pending_relax.reset();
        ctx_.sub_state.reset();
        return query_step();
      }
      if (acts.deny) {
        ctx_.pending_relax.reset();
        ctx_.sub_state.reset();
        classify_query();
        return no_match();
      }
      return std::nullopt;

    case LowerState::kVerifyUser: {
      if (new_info) return std::nullopt;
      const ActionSpec *a = action(ctx_.pending_action);
      if (!a) return std::nullopt;
      std::optional<std::int64_t> pin;
      for (const auto &tag : ex_.tags)
        for (const auto &r : tag.readings)
          if (is_number(r.value) && schema_.fields_of_class(r.semantic_class).empty())
            pin = std::get<std::int64_t>(r.value);
      if (!pin && !acts.deny) return std::nullopt;
      auto result = classify_query();
      auto t = make(Act::kVerifyPrompt);
      t.slots["action"] = a->label;
      if (acts.deny && !pin) {
        auto notice = make(Act::kSideEffectNotice);
        notice.slots["action"] = a->label;
        notice.slots["notice"] = a->notice;
        notice.slots["cancelled"] = "yes";
        reset(false);
        return finish(UpperState::kSuccess, "success:cancelled", notice);
      }
      if (std::find(schema_.demo_pins.begin(), schema_.demo_pins.end(), *pin) != schema_.demo_pins.end() &&
          result.count == 1) {
        auto notice = make(Act::kSideEffectNotice);
        notice.slots["action"] = a->label;
        notice.slots["notice"] = a->notice;
        notice.slots["row"] = row_label(result.rows.front(), schema_);
        for (auto &[k, v] : row_slots(result.rows.front(), schema_)) notice.slots[k] = v;
        ctx_.sub_state = LowerState::kSideEffects;
        ctx_.verify_attempts = 0;
        return finish(UpperState::kSuccess, "success:verified", notice);
      }
      ++ctx_.verify_attempts;
      if (ctx_.verify_attempts >= 3) {
        t.slots["failed"] = "yes";
        reset(false);
        return finish(UpperState::kSuccess, "success:verify_failed", t);
      }
      t.slots["retry"] = "yes";
      return finish(UpperState::kSuccess, "success:verify_retry", t);
    }

    case LowerState::kSideEffects: {
      if (new_info || (!acts.affirm && !acts.deny)) return std::nullopt;
      const ActionSpec *a = action(ctx_.pending_action);
      if (!a) return std::nullopt;
      classify_query();
      auto t = make(Act::kSideEffectNotice);
      t.slots["action"] = a->label;
      t.slots["notice"] = a->notice;
      std::string cause = "success:cancelled";
      if (acts.affirm) {
        t.slots["committed"] = "yes";
        decision_.committed_action = a->name;
        cause = "success:committed";
      } else {
        t.slots["cancelled"] = "yes";
      }
      reset(false);
      return finish(UpperState::kSuccess, cause, t);
    }
  }
  return std::nullopt;
}

TurnOutcome Turn::status_quo() {
  const ActReport &acts = ex_.acts;
  if (acts.repeat) {
    InteractionTemplate t =
        before_.last_template == InteractionTemplate{} ? make(Act::kRepeatLast) : before_.last_template;
    return keep_state(UpperState::kStatusQuo, "status_quo:repeat", t);
  }
  std::string cause = acts.silence ? "silence" : acts.dont_know ? "dont_know" : "no_new_info";
  auto t = make(Act::kNoNewInfo);
  t.slots["cause"] = cause;
  if (ctx_.expected_field) {
    t.slots["expected_field"] = *ctx_.expected_field;
    if (const FieldSpec *f = schema_.field(*ctx_.expected_field)) t.slots["prompt"] = f->prompt;
  } else if (ctx_.sub_state && before_.last_template != InteractionTemplate{}) {
    // Yes/no sub-dialogues re-ask their pending question.
    t.slots["prompt"] = render_or_apologize(before_.last_template, pack_.rules);
  }
  return keep_state(UpperState::kStatusQuo, "status_quo:" + cause, t);
}

TurnOutcome Turn::chain() {
  const ActReport &acts = ex_.acts;
  try {
    merged_ = merge(ctx_, ex_, pack_);
  } catch (const CorrectionTargetNotFound &) {
    ExtractionResult without = ex_;
    without.acts.correction.reset();
    merged_ = merge(ctx_, without, pack_);
    correction_unmatched_ = true;
  }

  bool changed = !merged_.changed_fields.empty() || merged_.corrected_field.has_value() ||
                 correction_unmatched_ || merged_.query_type_changed ||
                 !merged_.open_ambiguities.empty() || ex_.resolved_pending || restored_followup_ ||
                 (acts.affirm && before_.upper_state == UpperState::kCorrection);
  if (!changed) return status_quo();

  ctx_ = merged_.context;
  ctx_.sub_state.reset();
  ctx_.pending_ambiguity.reset();
  ctx_.pending_confirmation.reset();
  ctx_.pending_relax.reset();
  std::optional<std::string> previous_expected = ctx_.expected_field;
  ctx_.expected_field.reset();

  if (!merged_.open_ambiguities.empty()) {
    auto amb = *std::min_element(merged_.open_ambiguities.begin(), merged_.open_ambiguities.end(),
                                 [](const AmbiguityReport &a, const AmbiguityReport &b) {
                                   return ambiguity_rank(a.kind) < ambiguity_rank(b.kind);
                                 });
    ctx_.pending_ambiguity = amb;
    ctx_.expected_field = previous_expected;
    auto t = make(Act::kClarifyAmbiguity);
    t.slots["kind"] = std::string(name_of(amb.kind));
    t.slots["term"] = amb.term;
    std::vector<std::string> shown;
    for (const auto &c : amb.candidates) {
      if (amb.kind == AmbiguityKind::kField) {
        shown.push_back(label_of(c));
      } else if (amb.kind == AmbiguityKind::kClass) {
        std::string s = c;
        std::replace(s.begin(), s.end(), '_', ' ');
        shown.push_back(s);
      } else {
        shown.push_back(c);
      }
    }
    t.slots["candidates"] = shown;
    return finish(UpperState::kAmbiguous, "ambiguous:" + std::string(name_of(amb.kind)), t);
  }

  for (const auto &rule : schema_.consistency_rules) {
    auto l = ctx_.bindings.find(rule.left_field);
    auto r = ctx_.bindings.find(rule.right_field);
    if (l == ctx_.bindings.end() || r == ctx_.bindings.end()) continue;
    const Value &lv = l->second.value, &rv = r->second.value;
    bool ok = true;
    switch (rule.relation) {
      case Relation::kNotEqual:
        ok = is_number(lv) || is_number(rv) ? lv != rv
                                            : to_lower(to_string(lv)) != to_lower(to_string(rv));
        break;
      case Relation::kLessThan:
        ok = !(is_number(lv) && is_number(rv)) || std::get<std::int64_t>(lv) < std::get<std::int64_t>(rv);
        break;
      case Relation::kGreaterThan:
        ok = !(is_number(lv) && is_number(rv)) || std::get<std::int64_t>(lv) > std::get<std::int64_t>(rv);
        break;
    }
    if (ok) continue;
    auto t = make(Act::kNotifyInconsistent);
    t.slots["rule"] = rule.id;
    t.slots["message"] = rule.message;
    t.slots["left_field"] = label_of(rule.left_field);
    t.slots["left_value"] = display_value(schema_, rule.left_field, lv, l->second.approx);
    t.slots["right_field"] = label_of(rule.right_field);
    t.slots["right_value"] = display_value(schema_, rule.right_field, rv, r->second.approx);
    return finish(UpperState::kInconsistent, "inconsistent:" + rule.id, t);
  }

  if (merged_.corrected_field || correction_unmatched_) {
    const CorrectionAct &c = *acts.correction;
    auto t = make(Act::kAckCorrection);
    std::string field = merged_.corrected_field.value_or("");
    std::string old_text;
    if (c.old_value) {
      old_text = display_value(schema_, field, *c.old_value);
    } else if (auto it = before_.bindings.find(field); it != before_.bindings.end()) {
      old_text = display_value(schema_, field, it->second.value, it->second.approx);
    } else {
      old_text = "that";
    }
    t.slots["old"] = old_text;
    t.slots["new"] = display_value(schema_, field, c.new_value);
    if (correction_unmatched_) {
      t.slots["unmatched"] = "yes";
    } else {
      t.slots["field"] = field;
      if (auto missing = missing_of_best_set()) {
        const FieldSpec *f = schema_.field(missing->front());
        t.slots["next_prompt"] = f->prompt;
        ctx_.expected_field = f->name;
      }
    }
    return finish(UpperState::kCorrection, "correction", t);
  }

  if (auto asked = mandatory(std::nullopt)) return *asked;
  return query_step();
}

std::optional<TurnOutcome> Turn::mandatory(const std::optional<std::string> &reason) {
  auto missing = missing_of_best_set();
  if (!missing) return std::nullopt;
  const FieldSpec *f = schema_.field(missing->front());
  auto t = make(Act::kAskField);
  t.slots["field"] = f->name;
  t.slots["prompt"] = f->prompt;
  if (reason) t.slots["reason"] = *reason;
  ctx_.expected_field = f->name;
  return finish(UpperState::kMandatoryFields, "mandatory:" + f->name, t);
}

TurnOutcome Turn::query_step() {
  auto result = classify_query();
  if (result.count == 0) return conflict(result);
  if (result.count == 1 && ctx_.query_type) return success(result);
  ctx_.enumerated_keys.clear();
  if (!ctx_.query_type) {
    ctx_.excluded_fields.clear();
    auto t = make(Act::kAskQueryType);
    std::vector<std::string> options;
    for (const auto &q : schema_.query_types) options.push_back(q.label);
    t.slots["options"] = options;
    t.slots["count"] = std::to_string(result.count);
    if (result.count == 1) t.slots["row"] = row_label(result.rows.front(), schema_);
    return finish(UpperState::kUnknownQuery, "unknown_query", t);
  }
  const FieldSpec *key = schema_.field(schema_.key_field);
  if (result.count <= k_) {
    ctx_.excluded_fields.clear();
    auto t = make(Act::kEnumerate);
    std::vector<std::string> rows;
    for (const auto &row : result.rows) {
      rows.push_back(row_label(row, schema_));
      if (key)
        if (auto it = row.find(key->db_column); it != row.end()) ctx_.enumerated_keys.push_back(it->second);
    }
    t.slots["count"] = std::to_string(result.count);
    t.slots["rows"] = rows;
    t.slots["query_type"] = *ctx_.query_type;
    return finish(UpperState::kFewMatches, "few", t);
  }

  std::vector<std::string> unbound;
  for (const auto &f : schema_.fields)
    if (f.askable && !ctx_.bindings.count(f.name) &&
        std::find(ctx_.excluded_fields.begin(), ctx_.excluded_fields.end(), f.name) ==
            ctx_.excluded_fields.end())
      unbound.push_back(f.name);
  if (unbound.empty()) {
    auto t = make(Act::kEnumerate);
    std::vector<std::string> rows;
    for (size_t i = 0; i < result.rows.size() && i < k_; ++i) {
      rows.push_back(row_label(result.rows[i], schema_));
      if (key)
        if (auto it = result.rows[i].find(key->db_column); it != result.rows[i].end())
          ctx_.enumerated_keys.push_back(it->second);
    }
    t.slots["count"] = std::to_string(result.count);
    t.slots["rows"] = rows;
    t.slots["more"] = std::to_string(result.count - rows.size());
    t.slots["query_type"] = *ctx_.query_type;
    return finish(UpperState::kManyMatches, "many:enumerate", t);
  }
  std::string field = select_informative_field(result.rows, unbound, schema_, querier_.has_row_access());
  const FieldSpec *f = schema_.field(field);
  auto t = make(Act::kAskField);
  t.slots["field"] = f->name;
  t.slots["prompt"] = f->prompt;
  t.slots["count"] = std::to_string(result.count);
  t.slots["reason"] = std::string("many");
  ctx_.expected_field = f->name;
  ctx_.sub_state = LowerState::kGetConstraint;
  return finish(UpperState::kManyMatches, "many:get_constraint", t);
}

TurnOutcome Turn::conflict(const QueryResultSet &) {
  ctx_.enumerated_keys.clear();
  ctx_.excluded_fields.clear();
  for (const auto &f : schema_.fields) {
    auto it = ctx_.bindings.find(f.name);
    if (it == ctx_.bindings.end() || schema_.relax_policy(f.name) ||
        it->second.status == BindingStatus::kConfirmed)
      continue;
    auto t = make(Act::kConfirmField);
    t.slots["field"] = f.name;
    t.slots["value"] = display_value(schema_, f.name, it->second.value, it->second.approx);
    t.slots["label"] = f.label;
    ctx_.pending_confirmation = std::make_pair(f.name, it->second.value);
    ctx_.sub_state = LowerState::kConfirmValue;
    return finish(UpperState::kDatabaseConflict, "conflict:confirm", t);
  }
  return relax_or_give_up();
}

TurnOutcome Turn::relax_or_give_up() {
  for (const auto &f : schema_.fields) {
    auto it = ctx_.bindings.find(f.name);
    const RelaxPolicy *policy = schema_.relax_policy(f.name);
    if (it == ctx_.bindings.end() || !policy) continue;
    const FieldBinding &b = it->second;
    int current = b.window > 0 ? b.window : (b.approx ? schema_.approx_window : 0);
    for (int step : policy->widen_steps) {
      if (step <= current) continue;
      Bindings probe = ctx_.bindings;
      probe[f.name].window = step;
      probe[f.name].approx = true;
      ++decision_.probe_queries;
      auto r = querier_.query(compile_constraints(probe, pack_), kDefaultRowCap);
      if (r.count == 0) continue;
      char hours[32];
      std::snprintf(hours, sizeof hours, "%g", step / 60.0);
      auto t = make(Act::kRelaxProposal);
      t.slots["field"] = f.name;
      t.slots["label"] = f.label;
      t.slots["value"] = display_value(schema_, f.name, b.value);
      t.slots["window"] = std::to_string(step);
      t.slots["window_hours"] = std::string(hours);
      t.slots["count"] = std::to_string(r.count);
      ctx_.pending_relax = std::make_pair(f.name, step);
      ctx_.sub_state = LowerState::kRelaxConstraint;
      return finish(UpperState::kDatabaseConflict, "conflict:relax", t);
    }
  }
  return no_match();
}

TurnOutcome Turn::no_match() {
  auto t = make(Act::kReportAnswer);
  t.slots["count"] = std::string("0");
  t.slots["constraints"] = describe_bindings();
  if (ctx_.query_type) t.slots["query_type"] = *ctx_.query_type;
  reset(false);
  return finish(UpperState::kDatabaseConflict, "conflict:no_match", t);
}

TurnOutcome Turn::success(const QueryResultSet &result) {
  const Row &row = result.rows.front();
  auto slots = row_slots(row, schema_);
  const ActionSpec *a = action(ctx_.pending_action ? ctx_.pending_action : ex_.acts.action);
  if (a && restored_followup_) {
    ctx_.pending_action = a->name;
    ctx_.verify_attempts = 0;
    if (a->verify_user) {
      auto t = make(Act::kVerifyPrompt);
      t.slots["action"] = a->label;
      ctx_.sub_state = LowerState::kVerifyUser;
      return finish(UpperState::kSuccess, "success:verify", t);
    }
    auto t = make(Act::kSideEffectNotice);
    t.slots["action"] = a->label;
    t.slots["notice"] = a->notice;
    t.slots["row"] = row_label(row, schema_);
    for (auto &[k, v] : slots) t.slots[k] = v;
    ctx_.sub_state = LowerState::kSideEffects;
    return finish(UpperState::kSuccess, "success:notice", t);
  }
  auto t = make(Act::kReportAnswer);
  t.slots["count"] = std::string("1");
  t.slots["query_type"] = *ctx_.query_type;
  t.slots["row"] = row_label(row, schema_);
  for (auto &[k, v] : slots) t.slots[k] = v;
  std::vector<std::string> answers;
  if (const QueryTypeSpec *q = schema_.query_type(*ctx_.query_type)) {
    for (const auto &name : q->answer_fields) {
      std::string label = name;
      if (const FieldSpec *f = schema_.field(name)) label = f->label;
      if (auto it = slots.find(name); it != slots.end()) answers.push_back("the " + label + " is " + it->second);
    }
  }
  t.slots["answers"] = join(answers, ", ");
  reset(!restored_followup_);
  return finish(UpperState::kSuccess, "success", t);
}

}  // namespace

TurnOutcome decide_state(const DialogueContext &context, const ExtractionResult &extraction,
                         const DomainPack &pack, Querier &querier, const DialogOptions &options) {
  Turn turn(context, extraction, pack, querier, options);
  try {
    return turn.run();
  } catch (const QuerierUnavailable &e) {
    StateDecision d;
    d.state = context.upper_state;
    d.sub_state = context.sub_state;
    d.cause = "system_trouble";
    d.queried = true;
    d.template_.act = Act::kSystemTrouble;
    d.template_.slots["detail"] = std::string(e.what());
    return {d, context};
  }
}

}  // namespace infodialog
