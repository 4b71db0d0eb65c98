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

#include "infodialog/nlu.h"

#include <algorithm>
#include <cctype>
#include <map>

#include "infodialog/errors.h"
#include "infodialog/text.h"

namespace infodialog {

std::string_view name_of(AmbiguityKind k) {
  switch (k) {
    case AmbiguityKind::kLexical: return "lexical";
    case AmbiguityKind::kClass: return "class";
    case AmbiguityKind::kField: return "field";
  }
  return "";
}

std::string_view name_of(BindingStatus s) {
  switch (s) {
    case BindingStatus::kNew: return "new";
    case BindingStatus::kConfirmed: return "confirmed";
    case BindingStatus::kCorrected: return "corrected";
  }
  return "";
}

std::string_view name_of(ChunkKind k) {
  switch (k) {
    case ChunkKind::kNP: return "NP";
    case ChunkKind::kPP: return "PP";
    case ChunkKind::kVP: return "VP";
    case ChunkKind::kWH: return "WH";
    case ChunkKind::kUnknown: return "UNKNOWN";
  }
  return "";
}

namespace {

const std::map<std::string, int> kUnits = {
    {"zero", 0}, {"oh", 0},   {"one", 1}, {"two", 2},   {"three", 3},
    {"four", 4}, {"five", 5}, {"six", 6}, {"seven", 7}, {"eight", 8}, {"nine", 9},
};
const std::map<std::string, int> kTeens = {
    {"ten", 10},     {"eleven", 11},    {"twelve", 12},   {"thirteen", 13},
    {"fourteen", 14}, {"fifteen", 15},  {"sixteen", 16},  {"seventeen", 17},
    {"eighteen", 18}, {"nineteen", 19},
};
const std::map<std::string, int> kTens = {
    {"twenty", 20}, {"thirty", 30},  {"forty", 40},  {"fifty", 50},
    {"sixty", 60},  {"seventy", 70}, {"eighty", 80}, {"ninety", 90},
};

const std::vector<std::string> kTimePreps = {"at",    "around", "about", "approximately",
                                             "roughly", "by",   "before", "after",
                                             "until", "till",   "near"};
const std::vector<std::string> kApproxWords = {"around", "about", "approximately", "roughly",
                                               "near"};
const std::vector<std::string> kDateWords = {"today",   "tomorrow", "tonight",  "yesterday",
                                             "monday",  "tuesday",  "wednesday", "thursday",
                                             "friday",  "saturday", "sunday"};
const std::vector<std::string> kOrdinals = {"first", "second",  "third",  "fourth", "fifth",
                                            "sixth", "seventh", "eighth", "ninth",  "tenth"};

// Words the act patterns rely on; never reported as unknown.
const std::vector<std::string> kActWords = {
    "bye",   "goodbye", "quit",   "exit",   "stop",    "help",   "repeat", "again",
    "pardon", "come",   "yes",    "yeah",   "yep",     "yup",    "sure",   "correct",
    "right", "ok",      "okay",   "exactly", "alright", "fine",  "go",     "ahead",
    "no",    "nope",    "wrong",  "incorrect", "not",  "don't",  "dont",   "idea",
    "clue",  "dunno",   "said",   "meant",  "mean",    "know",   "what",   "which",
    "you",   "i",       "can",    "say",    "do",      "about",  "last",   "hang",
    "up",    "done",    "all",    "that's", "sounds",  "good",   "please",
};

const std::vector<std::string> kTimeWords = {"am",   "pm",       "a.m.", "p.m.", "a.m",
                                             "p.m",  "o'clock",  "noon", "midnight", "m",
                                             "hundred"};

bool contains(const std::vector<std::string> &v, const std::string &s) {
  return std::find(v.begin(), v.end(), s) != v.end();
}

std::string pluralize(const std::string &w) {
  if (w.empty()) return w;
  if (w.size() > 1 && w.back() == 'y' && std::string("aeiou").find(w[w.size() - 2]) == std::string::npos)
    return w.substr(0, w.size() - 1) + "ies";
  if (w.back() == 's' || w.back() == 'x' || (w.size() > 1 && w.substr(w.size() - 2) == "ch"))
    return w + "es";
  return w + "s";
}

std::vector<std::string> words_of_identifier(const std::string &id) {
  std::string spaced = id;
  std::replace(spaced.begin(), spaced.end(), '_', ' ');
  return phrase_words(spaced);
}

// Position of `phrase` in `words` at or after `from`, or -1.
int find_phrase(const std::vector<std::string> &words, const std::vector<std::string> &phrase,
                size_t from = 0) {
  if (phrase.empty() || phrase.size() > words.size()) return -1;
  for (size_t i = from; i + phrase.size() <= words.size(); ++i)
    if (std::equal(phrase.begin(), phrase.end(), words.begin() + i)) return static_cast<int>(i);
  return -1;
}

bool has_phrase(const std::vector<std::string> &words, std::string_view phrase) {
  return find_phrase(words, phrase_words(phrase)) >= 0;
}

std::optional<int> unit_of(const std::string &w) {
  auto it = kUnits.find(w);
  if (it == kUnits.end()) return std::nullopt;
  return it->second;
}

bool is_number_word(const std::string &w) {
  return kUnits.count(w) || kTeens.count(w) || kTens.count(w) || w == "hundred";
}

// ---------------------------------------------------------------------------
// Time of day.

std::optional<std::pair<int, int>> parse_hour(const std::vector<Token> &t, size_t i) {
  if (i >= t.size()) return std::nullopt;
  const std::string &w = t[i].lower;
  if (all_digits(w) && w.size() <= 2) {
    int h = std::stoi(w);
    if (h <= 23) return std::make_pair(h, static_cast<int>(i + 1));
    return std::nullopt;
  }
  if (auto u = unit_of(w); u && *u >= 1 && w != "oh") return std::make_pair(*u, static_cast<int>(i + 1));
  if (w == "ten" || w == "eleven" || w == "twelve")
    return std::make_pair(kTeens.at(w), static_cast<int>(i + 1));
  return std::nullopt;
}

std::optional<std::pair<int, int>> parse_minutes(const std::vector<Token> &t, size_t j) {
  if (j >= t.size()) return std::nullopt;
  const std::string &w = t[j].lower;
  auto next_unit = [&](size_t k) -> std::optional<int> {
    if (k >= t.size()) return std::nullopt;
    auto u = unit_of(t[k].lower);
    if (u && *u >= 1 && t[k].lower != "oh") return u;
    return std::nullopt;
  };
  if (all_digits(w) && w.size() == 2) {
    int m = std::stoi(w);
    if (m < 60) return std::make_pair(m, static_cast<int>(j + 1));
    return std::nullopt;
  }
  if (w == "oh" || w == "o") {
    if (auto u = next_unit(j + 1)) return std::make_pair(*u, static_cast<int>(j + 2));
    return std::nullopt;
  }
  if (auto it = kTeens.find(w); it != kTeens.end()) return std::make_pair(it->second, static_cast<int>(j + 1));
  if (auto it = kTens.find(w); it != kTens.end() && it->second <= 50) {
    if (auto u = next_unit(j + 1)) return std::make_pair(it->second + *u, static_cast<int>(j + 2));
    return std::make_pair(it->second, static_cast<int>(j + 1));
  }
  return std::nullopt;
}

// (is_pm, next)
std::optional<std::pair<bool, int>> parse_meridiem(const std::vector<Token> &t, size_t k) {
  if (k >= t.size()) return std::nullopt;
  const std::string &w = t[k].lower;
  if (w == "am" || w == "a.m." || w == "a.m") return std::make_pair(false, static_cast<int>(k + 1));
  if (w == "pm" || w == "p.m." || w == "p.m") return std::make_pair(true, static_cast<int>(k + 1));
  if ((w == "a" || w == "p") && k + 1 < t.size() && t[k + 1].lower == "m")
    return std::make_pair(w == "p", static_cast<int>(k + 2));
  return std::nullopt;
}

struct TimeMatch {
  int minutes;
  int end;
};

std::optional<TimeMatch> match_time(const std::vector<Token> &t, size_t i, bool after_prep) {
  const std::string &w = t[i].lower;
  if (w == "noon") return TimeMatch{720, static_cast<int>(i + 1)};
  if (w == "midnight") return TimeMatch{0, static_cast<int>(i + 1)};

  int hour = 0, minute = 0, end = 0;
  bool explicit_minutes = false;
  if (w.find(':') != std::string::npos) {
    auto parsed = parse_hhmm(w);
    if (!parsed) return std::nullopt;
    hour = *parsed / 60;
    minute = *parsed % 60;
    end = static_cast<int>(i + 1);
    explicit_minutes = true;
  } else {
    auto h = parse_hour(t, i);
    if (!h) return std::nullopt;
    hour = h->first;
    end = h->second;
    if (auto m = parse_minutes(t, end)) {
      minute = m->first;
      end = m->second;
      explicit_minutes = true;
    }
  }
  bool oclock = false;
  if (static_cast<size_t>(end) < t.size() && t[end].lower == "o'clock") {
    oclock = true;
    ++end;
  }
  auto mer = parse_meridiem(t, end);
  if (mer) end = mer->second;
  bool colon = w.find(':') != std::string::npos;
  if (!mer && !oclock && !colon && !after_prep) return std::nullopt;
  (void)explicit_minutes;

  if (mer) {
    if (hour < 1 || hour > 12) return std::nullopt;
    if (mer->first && hour < 12) hour += 12;
    if (!mer->first && hour == 12) hour = 0;
  } else if (hour >= 1 && hour <= 4) {
    hour += 12;  // no flights in the small hours; "at three" means 3 pm
  }
  int total = hour * 60 + minute;
  total = (total + 2) / 5 * 5;
  total = std::min(total, 23 * 60 + 55);
  return TimeMatch{total, end};
}

// ---------------------------------------------------------------------------

struct Vocabulary {
  std::set<std::string> known;
};

Vocabulary vocabulary_of(const DomainPack &pack) {
  Vocabulary v;
  for (const auto &[w, c] : pack.words.categories) v.known.insert(w);
  for (const auto &cue : pack.words.cues) v.known.insert(cue.words.begin(), cue.words.end());
  for (const auto &q : pack.schema.query_types)
    for (const auto &t : q.triggers) v.known.insert(t.begin(), t.end());
  for (const auto &a : pack.schema.actions)
    for (const auto &t : a.triggers) v.known.insert(t.begin(), t.end());
  for (const auto &f : pack.schema.fields) {
    for (const auto &w : words_of_identifier(f.name)) v.known.insert(w);
    for (const auto &w : phrase_words(f.label)) {
      v.known.insert(w);
      v.known.insert(pluralize(w));
    }
    for (const auto &w : words_of_identifier(f.semantic_class)) {
      v.known.insert(w);
      v.known.insert(pluralize(w));
    }
  }
  for (const auto &r : pack.schema.report_columns)
    for (const auto &w : words_of_identifier(r.name)) v.known.insert(w);
  for (const auto &w : kActWords) v.known.insert(w);
  for (const auto &w : kTimeWords) v.known.insert(w);
  for (const auto &w : kDateWords) v.known.insert(w);
  for (const auto &w : kOrdinals) v.known.insert(w);
  for (const auto &[w, n] : kUnits) v.known.insert(w);
  for (const auto &[w, n] : kTeens) v.known.insert(w);
  for (const auto &[w, n] : kTens) v.known.insert(w);
  return v;
}

// Field-bearing classes in schema field order.
std::vector<std::string> field_classes(const ApplicationSchema &schema) {
  std::vector<std::string> out;
  for (const auto &f : schema.fields)
    if (!contains(out, f.semantic_class)) out.push_back(f.semantic_class);
  return out;
}

}  // namespace

std::optional<std::string> spelled_digits(const std::vector<std::string> &words) {
  std::string out;
  size_t i = 0;
  auto unit19 = [&](size_t k) -> std::optional<int> {
    if (k >= words.size()) return std::nullopt;
    auto u = unit_of(words[k]);
    if (u && *u >= 1 && words[k] != "oh") return u;
    return std::nullopt;
  };
  while (i < words.size()) {
    const std::string &w = words[i];
    if (all_digits(w)) {
      out += w;
      ++i;
    } else if (auto u = unit_of(w)) {
      if (i + 1 < words.size() && words[i + 1] == "hundred" && *u >= 1) {
        int v = *u * 100;
        i += 2;
        if (i < words.size() && kTens.count(words[i])) {
          v += kTens.at(words[i]);
          ++i;
          if (auto u2 = unit19(i)) {
            v += *u2;
            ++i;
          }
        } else if (i < words.size() && kTeens.count(words[i])) {
          v += kTeens.at(words[i]);
          ++i;
        } else if (auto u2 = unit19(i)) {
          v += *u2;
          ++i;
        }
        out += std::to_string(v);
      } else {
        out += std::to_string(*u);
        ++i;
      }
    } else if (auto it = kTeens.find(w); it != kTeens.end()) {
      out += std::to_string(it->second);
      ++i;
    } else if (auto it = kTens.find(w); it != kTens.end()) {
      int v = it->second;
      ++i;
      if (auto u2 = unit19(i)) {
        v += *u2;
        ++i;
      }
      out += std::to_string(v);
    } else {
      return std::nullopt;
    }
  }
  if (out.empty()) return std::nullopt;
  return out;
}

std::vector<Token> tokenize(std::string_view input) {
  std::string s(input);
  // Typographic apostrophe -> ASCII.
  for (size_t p; (p = s.find("\xE2\x80\x99")) != std::string::npos;) s.replace(p, 3, "'");

  std::vector<Token> tokens;
  auto word_char = [](char c) {
    unsigned char u = static_cast<unsigned char>(c);
    return std::isalnum(u) || c == '\'' || u >= 0x80;
  };
  size_t i = 0, n = s.size();
  while (i < n) {
    char c = s[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    Token tok;
    tok.index = static_cast<int>(tokens.size());
    if (word_char(c)) {
      size_t j = i;
      while (j < n) {
        if (word_char(s[j])) {
          ++j;
        } else if ((s[j] == ':' || s[j] == '.') && j > i && j + 1 < n &&
                   std::isalnum(static_cast<unsigned char>(s[j + 1]))) {
          ++j;
        } else {
          break;
        }
      }
      tok.text = s.substr(i, j - i);
      if (j < n && s[j] == '.' && tok.text.find('.') != std::string::npos) {
        tok.text += '.';
        ++j;
      }
      i = j;
      tok.lower = to_lower(tok.text);
      bool number = all_digits(tok.lower);
      if (!number) {
        auto colon = tok.lower.find(':');
        number = colon != std::string::npos && all_digits(tok.lower.substr(0, colon)) &&
                 all_digits(tok.lower.substr(colon + 1));
      }
      tok.category = number ? TokenCategory::kNumber : TokenCategory::kWord;
    } else {
      tok.text = std::string(1, c);
      tok.lower = tok.text;
      tok.category = TokenCategory::kPunct;
      ++i;
    }
    tokens.push_back(std::move(tok));
  }
  return tokens;
}

Annotation annotate(std::string_view utterance, const DomainPack &pack) {
  Annotation a;
  a.tokens = tokenize(utterance);
  const auto &t = a.tokens;
  const size_t n = t.size();
  std::vector<bool> taken(n, false);
  std::vector<SemanticTag> tags;

  auto surface_of = [&](int b, int e) {
    std::string s;
    for (int k = b; k < e; ++k) {
      if (t[k].category == TokenCategory::kPunct) continue;
      if (!s.empty()) s += ' ';
      s += t[k].text;
    }
    return s;
  };
  auto previous_word = [&](size_t i) -> const Token * {
    for (size_t k = i; k-- > 0;)
      if (t[k].category != TokenCategory::kPunct) return &t[k];
    return nullptr;
  };

  // Time of day and dates.
  for (size_t i = 0; i < n; ++i) {
    if (taken[i] || t[i].category == TokenCategory::kPunct) continue;
    const Token *prev = previous_word(i);
    bool after_prep = prev && contains(kTimePreps, prev->lower);
    if (auto m = match_time(t, i, after_prep)) {
      SemanticTag tag;
      tag.span = {static_cast<int>(i), m->end};
      tag.readings = {{std::string(kTimeOfDayClass), static_cast<std::int64_t>(m->minutes)}};
      tag.source = TagSource::kDomainIndependent;
      tag.approx = prev && contains(kApproxWords, prev->lower);
      tag.surface = surface_of(tag.span.begin, tag.span.end);
      for (int k = tag.span.begin; k < tag.span.end; ++k) taken[k] = true;
      tags.push_back(std::move(tag));
      i = m->end - 1;
      continue;
    }
    if (contains(kDateWords, t[i].lower)) {
      SemanticTag tag;
      tag.span = {static_cast<int>(i), static_cast<int>(i + 1)};
      tag.readings = {{std::string(kDateClass), t[i].lower}};
      tag.surface = t[i].text;
      taken[i] = true;
      tags.push_back(std::move(tag));
    }
  }

  // Lexicon and out-of-scope terms, longest match.
  struct Phrase {
    const std::vector<std::string> *words;
    Reading reading;
  };
  std::vector<Phrase> phrases;
  std::vector<std::vector<std::string>> oos_words;
  oos_words.reserve(pack.schema.out_of_scope_terms.size());
  for (const auto &[term, why] : pack.schema.out_of_scope_terms) oos_words.push_back(phrase_words(term));
  for (size_t k = 0; k < oos_words.size(); ++k)
    phrases.push_back({&oos_words[k], {std::string(kOutOfScopeClass), pack.schema.out_of_scope_terms[k].second}});
  for (const auto &e : pack.lexicon.entries) phrases.push_back({&e.words, {e.semantic_class, e.canonical}});

  for (size_t i = 0; i < n; ++i) {
    if (taken[i] || t[i].category == TokenCategory::kPunct) continue;
    size_t best_len = 0;
    int best_end = 0;
    for (const auto &p : phrases) {
      const auto &w = *p.words;
      if (w.size() <= best_len || w.front() != t[i].lower) continue;
      size_t k = i, matched = 0;
      while (k < n && matched < w.size()) {
        if (taken[k]) break;
        if (t[k].category == TokenCategory::kPunct && matched > 0) {
          ++k;
          continue;
        }
        if (t[k].lower != w[matched]) break;
        ++matched;
        ++k;
      }
      if (matched == w.size()) {
        best_len = w.size();
        best_end = static_cast<int>(k);
      }
    }
    if (best_len == 0) continue;
    SemanticTag tag;
    tag.span = {static_cast<int>(i), best_end};
    tag.source = TagSource::kDomainSpecific;
    tag.surface = surface_of(tag.span.begin, tag.span.end);
    std::vector<std::string> words;
    for (int k = tag.span.begin; k < tag.span.end; ++k)
      if (t[k].category != TokenCategory::kPunct) words.push_back(t[k].lower);
    bool oos = false;
    for (const auto &p : phrases) {
      if (*p.words != words) continue;
      if (p.reading.semantic_class == kOutOfScopeClass) {
        tag.readings = {p.reading};
        oos = true;
        break;
      }
      tag.readings.push_back(p.reading);
    }
    (void)oos;
    for (int k = tag.span.begin; k < tag.span.end; ++k) taken[k] = true;
    tags.push_back(std::move(tag));
    i = best_end - 1;
  }

  // Numbers: digits and spelled digit groups.
  for (size_t i = 0; i < n; ++i) {
    if (taken[i]) continue;
    auto numeric = [&](size_t k) {
      if (k >= n || taken[k]) return false;
      if (t[k].category == TokenCategory::kNumber) return t[k].lower.find(':') == std::string::npos;
      return t[k].category == TokenCategory::kWord && is_number_word(t[k].lower);
    };
    if (!numeric(i) || t[i].lower == "oh" || t[i].lower == "hundred") continue;
    size_t j = i;
    std::vector<std::string> words;
    while (numeric(j)) words.push_back(t[j++].lower);
    auto digits = spelled_digits(words);
    while (!digits && words.size() > 1) {
      words.pop_back();
      --j;
      digits = spelled_digits(words);
    }
    if (!digits || digits->size() > 18) continue;
    SemanticTag tag;
    tag.span = {static_cast<int>(i), static_cast<int>(j)};
    tag.surface = surface_of(tag.span.begin, tag.span.end);
    std::int64_t value = std::stoll(*digits);
    int len = static_cast<int>(digits->size());
    for (const auto &c : pack.schema.numeric_classes)
      if (len >= c.min_digits && len <= c.max_digits) tag.readings.push_back({c.name, value});
    tag.source = tag.readings.empty() ? TagSource::kDomainIndependent : TagSource::kDomainSpecific;
    if (tag.readings.empty()) tag.readings.push_back({std::string(kNumberClass), value});
    for (int k = tag.span.begin; k < tag.span.end; ++k) taken[k] = true;
    tags.push_back(std::move(tag));
    i = j - 1;
  }

  std::sort(tags.begin(), tags.end(),
            [](const SemanticTag &x, const SemanticTag &y) { return x.span.begin < y.span.begin; });
  a.tags = std::move(tags);
  return a;
}

// ---------------------------------------------------------------------------
// Chunking.

namespace {

enum class Coarse { kWh, kPrep, kDet, kPron, kVerb, kNoun, kParticle, kPunct, kUnknown };

struct Unit {
  Span span;
  Coarse cat;
};

std::vector<Unit> units_of(const std::vector<Token> &tokens, const std::vector<SemanticTag> &tags,
                           const DomainPack &pack, const Vocabulary &vocab) {
  std::vector<Unit> units;
  size_t tag = 0;
  for (size_t i = 0; i < tokens.size();) {
    if (tag < tags.size() && tags[tag].span.begin == static_cast<int>(i)) {
      units.push_back({tags[tag].span, Coarse::kNoun});
      i = tags[tag].span.end;
      ++tag;
      continue;
    }
    Coarse c = Coarse::kUnknown;
    const Token &tok = tokens[i];
    if (tok.category == TokenCategory::kPunct) {
      c = Coarse::kPunct;
    } else if (auto cat = pack.words.category(tok.lower)) {
      switch (*cat) {
        case WordCategory::kWh: c = Coarse::kWh; break;
        case WordCategory::kPrep: c = Coarse::kPrep; break;
        case WordCategory::kDet: c = Coarse::kDet; break;
        case WordCategory::kPron: c = Coarse::kPron; break;
        case WordCategory::kVerb: c = Coarse::kVerb; break;
        case WordCategory::kNoun: c = Coarse::kNoun; break;
        case WordCategory::kParticle:
        case WordCategory::kConj: c = Coarse::kParticle; break;
      }
    } else if (vocab.known.count(tok.lower)) {
      c = Coarse::kNoun;
    }
    units.push_back({{static_cast<int>(i), static_cast<int>(i + 1)}, c});
    ++i;
  }
  return units;
}

std::vector<PhraseChunk> chunk_with(const std::vector<Token> &tokens,
                                    const std::vector<SemanticTag> &tags, const DomainPack &pack,
                                    const Vocabulary &vocab) {
  auto units = units_of(tokens, tags, pack, vocab);
  std::vector<PhraseChunk> chunks;
  int pending = -1;  // start of leading particles/punctuation
  size_t i = 0;
  auto open = [&](ChunkKind kind, size_t from, size_t to) {
    PhraseChunk c;
    c.kind = kind;
    c.span = {pending >= 0 ? pending : units[from].span.begin, units[to - 1].span.end};
    pending = -1;
    chunks.push_back(std::move(c));
  };
  auto run = [&](size_t k, std::initializer_list<Coarse> cats) {
    while (k < units.size() && std::find(cats.begin(), cats.end(), units[k].cat) != cats.end()) ++k;
    return k;
  };
  while (i < units.size()) {
    size_t j = i + 1;
    switch (units[i].cat) {
      case Coarse::kWh:
        open(ChunkKind::kWH, i, j);
        break;
      case Coarse::kVerb:
        j = run(i, {Coarse::kVerb});
        open(ChunkKind::kVP, i, j);
        break;
      case Coarse::kPrep:
        j = run(i, {Coarse::kPrep});
        j = run(j, {Coarse::kDet});
        j = run(j, {Coarse::kNoun, Coarse::kPron});
        open(ChunkKind::kPP, i, j);
        break;
      case Coarse::kDet:
        j = run(i, {Coarse::kDet});
        j = run(j, {Coarse::kNoun, Coarse::kPron});
        open(ChunkKind::kNP, i, j);
        break;
      case Coarse::kPron:
      case Coarse::kNoun:
        j = run(i, {Coarse::kNoun, Coarse::kPron});
        open(ChunkKind::kNP, i, j);
        break;
      case Coarse::kUnknown:
        j = run(i, {Coarse::kUnknown});
        open(ChunkKind::kUnknown, i, j);
        break;
      case Coarse::kParticle:
      case Coarse::kPunct:
        if (!chunks.empty()) {
          chunks.back().span.end = units[i].span.end;
        } else if (pending < 0) {
          pending = units[i].span.begin;
        }
        break;
    }
    i = j;
  }
  if (pending >= 0) {
    PhraseChunk c;
    c.kind = ChunkKind::kVP;
    c.span = {pending, static_cast<int>(tokens.size())};
    chunks.push_back(c);
  }
  for (auto &c : chunks)
    for (size_t k = 0; k < tags.size(); ++k)
      if (tags[k].span.begin >= c.span.begin && tags[k].span.end <= c.span.end)
        c.tags.push_back(static_cast<int>(k));
  return chunks;
}

}  // namespace

std::vector<PhraseChunk> chunk(const std::vector<Token> &tokens,
                               const std::vector<SemanticTag> &tags, const DomainPack &pack) {
  return chunk_with(tokens, tags, pack, vocabulary_of(pack));
}

// ---------------------------------------------------------------------------
// Dialogue acts.

namespace {

bool feeds_field(const ApplicationSchema &schema, const SemanticTag &tag) {
  for (const auto &r : tag.readings)
    if (!schema.fields_of_class(r.semantic_class).empty()) return true;
  return false;
}

std::optional<CorrectionAct> make_correction(const ApplicationSchema &schema,
                                             const std::vector<SemanticTag> &tags, int new_tag,
                                             std::optional<int> old_tag) {
  const SemanticTag &x = tags[new_tag];
  if (!feeds_field(schema, x)) return std::nullopt;
  CorrectionAct c;
  c.tags.push_back(new_tag);
  if (!old_tag) {
    c.new_value = x.value();
    c.semantic_class = x.semantic_class();
    return c;
  }
  const SemanticTag &y = tags[*old_tag];
  if (!feeds_field(schema, y)) return std::nullopt;
  c.tags.push_back(*old_tag);
  for (const auto &rx : x.readings)
    for (const auto &ry : y.readings)
      if (rx.semantic_class == ry.semantic_class) {
        c.new_value = rx.value;
        c.old_value = ry.value;
        c.semantic_class = rx.semantic_class;
        return c;
      }
  c.new_value = x.value();
  c.old_value = y.value();
  return c;
}

}  // namespace

ActReport detect_acts(const std::vector<Token> &tokens, const std::vector<SemanticTag> &tags,
                      const DomainPack &pack, const DialogueContext &context) {
  (void)context;
  ActReport acts;
  // Word view (punctuation dropped) and item view (tags collapsed).
  std::vector<std::string> words;
  struct Item {
    int tag = -1;
    std::string word;
  };
  std::vector<Item> items;
  size_t next_tag = 0;
  for (size_t i = 0; i < tokens.size(); ++i) {
    if (tokens[i].category == TokenCategory::kPunct) continue;
    words.push_back(tokens[i].lower);
    if (next_tag < tags.size() && tags[next_tag].span.contains(static_cast<int>(i))) {
      if (items.empty() || items.back().tag != static_cast<int>(next_tag))
        items.push_back({static_cast<int>(next_tag), {}});
      if (static_cast<int>(i) + 1 >= tags[next_tag].span.end) ++next_tag;
      continue;
    }
    items.push_back({-1, tokens[i].lower});
  }
  if (words.empty()) {
    acts.silence = true;
    return acts;
  }
  auto has_word = [&](std::initializer_list<const char *> list) {
    for (const char *w : list)
      if (contains(words, w)) return true;
    return false;
  };
  auto any_phrase = [&](std::initializer_list<const char *> list) {
    for (const char *p : list)
      if (has_phrase(words, p)) return true;
    return false;
  };

  acts.quit = has_word({"bye", "goodbye", "quit", "exit"}) ||
              any_phrase({"hang up", "that's all", "good bye", "i'm done"}) ||
              (contains(words, "stop") && tags.empty());
  acts.help = contains(words, "help") ||
              any_phrase({"what can i say", "what can i ask", "what can you do", "what do i say"});
  acts.repeat = contains(words, "repeat") ||
                any_phrase({"say that again", "come again", "what did you say", "pardon",
                            "one more time"});
  acts.dont_know = any_phrase({"don't know", "dont know", "do not know", "no idea", "not sure",
                               "no clue", "dunno"});

  // Meta query: "what cities do you know about".
  auto classes = field_classes(pack.schema);
  for (size_t k = 0; k + 1 < words.size() && !acts.meta_topic; ++k) {
    if (words[k] != "what" && words[k] != "which") continue;
    int you = find_phrase(words, {"you"}, k + 1);
    bool asks = (you >= 0 && [&] {
                  for (size_t m = you + 1; m < words.size(); ++m)
                    if (words[m] == "know" || words[m] == "have" || words[m] == "cover" ||
                        words[m] == "serve" || words[m] == "support" || words[m] == "fly")
                      return true;
                  return false;
                }()) ||
                find_phrase(words, phrase_words("can i ask about"), k + 1) >= 0;
    if (!asks) continue;
    for (size_t m = k + 1; m < std::min(words.size(), k + 3) && !acts.meta_topic; ++m) {
      for (const auto &cls : classes) {
        auto cls_words = words_of_identifier(cls);
        std::string head = cls_words.empty() ? cls : cls_words.back();
        if (words[m] == head || words[m] == pluralize(head)) {
          acts.meta_topic = cls;
          break;
        }
        for (const auto *f : pack.schema.fields_of_class(cls)) {
          auto label = phrase_words(f->label);
          if (!label.empty() && (words[m] == label.back() || words[m] == pluralize(label.back()))) {
            acts.meta_topic = cls;
            break;
          }
        }
        if (acts.meta_topic) break;
      }
    }
  }

  if (!acts.dont_know) {
    int first_affirm = -1, first_deny = -1;
    static const std::vector<std::string> affirm = {"yes", "yeah", "yep", "yup", "sure", "correct",
                                                    "right", "ok", "okay", "exactly", "alright",
                                                    "fine"};
    static const std::vector<std::string> deny = {"no", "nope", "wrong", "incorrect"};
    for (size_t k = 0; k < words.size(); ++k) {
      bool negated = k > 0 && words[k - 1] == "not";
      if (contains(affirm, words[k])) {
        if (negated) {
          if (first_deny < 0) first_deny = static_cast<int>(k);
        } else if (first_affirm < 0) {
          first_affirm = static_cast<int>(k);
        }
      } else if (contains(deny, words[k]) && first_deny < 0) {
        first_deny = static_cast<int>(k);
      }
    }
    for (const char *p : {"go ahead", "please do", "sounds good"})
      if (int pos = find_phrase(words, phrase_words(p)); pos >= 0 && first_affirm < 0) first_affirm = pos;
    if (first_affirm >= 0 && (first_deny < 0 || first_affirm < first_deny)) acts.affirm = true;
    else if (first_deny >= 0) acts.deny = true;
  }

  // Corrections over the item view.
  auto tag_at = [&](size_t k) { return k < items.size() ? items[k].tag : -1; };
  for (size_t k = 0; k + 2 < items.size() && !acts.correction; ++k) {
    if (tag_at(k) >= 0 && items[k + 1].word == "not" && tag_at(k + 2) >= 0)
      acts.correction = make_correction(pack.schema, tags, tag_at(k), tag_at(k + 2));
  }
  for (size_t k = 0; k + 2 < items.size() && !acts.correction; ++k) {
    if (items[k].word == "not" && tag_at(k + 1) >= 0 && tag_at(k + 2) >= 0)
      acts.correction = make_correction(pack.schema, tags, tag_at(k + 2), tag_at(k + 1));
  }
  if (!acts.correction && items.size() >= 2 && items[0].word == "no" && tag_at(1) >= 0) {
    acts.correction = make_correction(pack.schema, tags, tag_at(1), std::nullopt);
  }

  // Post-success actions, matched on untagged words only.
  std::vector<std::string> plain;
  for (const auto &it : items) plain.push_back(it.tag >= 0 ? std::string("\x01") : it.word);
  for (const auto &a : pack.schema.actions) {
    for (const auto &t : a.triggers)
      if (find_phrase(plain, t) >= 0) {
        acts.action = a.name;
        break;
      }
    if (acts.action) break;
  }

  for (size_t k = 0; k < plain.size(); ++k) {
    auto it = std::find(kOrdinals.begin(), kOrdinals.end(), plain[k]);
    if (it != kOrdinals.end()) {
      acts.ordinal = static_cast<int>(it - kOrdinals.begin());
      break;
    }
    if (plain[k] == "last") {
      acts.ordinal = -1;
      break;
    }
  }
  return acts;
}

// ---------------------------------------------------------------------------
// Pragmatics.

namespace {

struct CueHit {
  int begin;  // token index
  int end;
  const Cue *cue;
  bool prep;
};

std::vector<CueHit> find_cues(const Annotation &a, const DomainPack &pack) {
  std::vector<bool> tagged(a.tokens.size(), false);
  for (const auto &t : a.tags)
    for (int k = t.span.begin; k < t.span.end; ++k) tagged[k] = true;
  std::vector<CueHit> hits;
  for (size_t i = 0; i < a.tokens.size(); ++i) {
    if (tagged[i] || a.tokens[i].category == TokenCategory::kPunct) continue;
    const CueHit *best = nullptr;
    CueHit candidate{};
    for (const auto &cue : pack.words.cues) {
      size_t k = i, m = 0;
      while (k < a.tokens.size() && m < cue.words.size() && !tagged[k] &&
             a.tokens[k].lower == cue.words[m]) {
        ++k;
        ++m;
      }
      if (m != cue.words.size()) continue;
      if (best && best->end - best->begin >= static_cast<int>(m)) continue;
      auto cat = pack.words.category(cue.words.front());
      candidate = {static_cast<int>(i), static_cast<int>(k), &cue,
                   cat && *cat == WordCategory::kPrep};
      best = &candidate;
    }
    if (best) hits.push_back(*best);
  }
  return hits;
}

// Everything extract() needs to settle one term.
struct Settler {
  const DomainPack &pack;
  const Annotation &annotation;
  const std::vector<PhraseChunk> &chunks;
  const std::vector<CueHit> &cues;
  ExtractionResult &out;

  const PhraseChunk *chunk_of(const Span &span) const {
    for (const auto &c : chunks)
      if (span.begin >= c.span.begin && span.end <= c.span.end) return &c;
    return nullptr;
  }

  // Class named by a cue inside the tag's own chunk, before the tag.
  std::optional<std::string> class_cue(const Span *span, const std::vector<std::string> &classes) const {
    if (!span) return std::nullopt;
    const PhraseChunk *c = chunk_of(*span);
    std::optional<std::string> found;
    for (const auto &hit : cues) {
      if (!c || hit.begin < c->span.begin || hit.end > span->begin) continue;
      if (!hit.cue->semantic_class.empty() && contains(classes, hit.cue->semantic_class))
        found = hit.cue->semantic_class;
    }
    return found;
  }

  std::optional<std::string> role_cue(const Span *span) const {
    if (!span) return std::nullopt;
    const PhraseChunk *c = chunk_of(*span);
    std::optional<std::string> in_chunk, governing;
    for (const auto &hit : cues) {
      if (hit.end > span->begin || hit.cue->role.empty()) continue;
      if (c && hit.begin >= c->span.begin) in_chunk = hit.cue->role;
      if (!hit.prep) governing = hit.cue->role;
    }
    return in_chunk ? in_chunk : governing;
  }

  void settle(const std::string &term, std::vector<Reading> readings, bool approx,
              const Span *span) {
    const auto &schema = pack.schema;
    std::erase_if(readings, [&](const Reading &r) {
      return schema.fields_of_class(r.semantic_class).empty();
    });
    if (readings.empty()) return;

    std::vector<std::string> classes;
    for (const auto &r : readings)
      if (!contains(classes, r.semantic_class)) classes.push_back(r.semantic_class);
    if (classes.size() > 1) {
      auto cls = class_cue(span, classes);
      if (!cls) {
        out.ambiguities.push_back({AmbiguityKind::kClass, term, classes, readings, approx});
        return;
      }
      std::erase_if(readings, [&](const Reading &r) { return r.semantic_class != *cls; });
    }

    std::vector<std::string> values;
    for (const auto &r : readings)
      if (!contains(values, to_string(r.value))) values.push_back(to_string(r.value));
    if (values.size() > 1) {
      out.ambiguities.push_back({AmbiguityKind::kLexical, term, values, readings, approx});
      return;
    }

    const Reading &r = readings.front();
    auto fields = schema.fields_of_class(r.semantic_class);
    if (fields.size() == 1) {
      out.bindings.push_back({fields[0]->name, r.value, r.semantic_class, approx, term});
      return;
    }
    if (auto role = role_cue(span)) {
      const FieldSpec *pick = nullptr;
      int matches = 0;
      for (const auto *f : fields)
        if (f->role == *role) {
          pick = f;
          ++matches;
        }
      if (matches == 1) {
        out.bindings.push_back({pick->name, r.value, r.semantic_class, approx, term});
        return;
      }
    }
    std::vector<std::string> names;
    for (const auto *f : fields) names.push_back(f->name);
    out.ambiguities.push_back({AmbiguityKind::kField, term, names, {r}, approx});
  }
};

// Words that single out each candidate of a pending clarification.
std::vector<std::set<std::string>> candidate_words(const AmbiguityReport &amb, const DomainPack &pack) {
  std::vector<std::set<std::string>> out;
  for (const auto &cand : amb.candidates) {
    std::set<std::string> w;
    auto add = [&](const std::vector<std::string> &ws) { w.insert(ws.begin(), ws.end()); };
    switch (amb.kind) {
      case AmbiguityKind::kLexical:
        add(phrase_words(cand));
        break;
      case AmbiguityKind::kClass:
        for (const auto &x : words_of_identifier(cand)) {
          w.insert(x);
          w.insert(pluralize(x));
        }
        for (const auto &cue : pack.words.cues)
          if (cue.semantic_class == cand) add(cue.words);
        for (const auto *f : pack.schema.fields_of_class(cand)) add(phrase_words(f->label));
        break;
      case AmbiguityKind::kField:
        if (const FieldSpec *f = pack.schema.field(cand)) {
          add(words_of_identifier(f->name));
          add(phrase_words(f->label));
          for (const auto &cue : pack.words.cues)
            if (!f->role.empty() && cue.role == f->role) add(cue.words);
        }
        break;
    }
    out.push_back(std::move(w));
  }
  return out;
}

}  // namespace

ExtractionResult extract(const Annotation &annotation, const std::vector<PhraseChunk> &chunks,
                         const ActReport &acts, const DomainPack &pack,
                         const DialogueContext &context) {
  ExtractionResult out;
  out.acts = acts;
  out.tags = annotation.tags;
  const auto &schema = pack.schema;
  const auto &tokens = annotation.tokens;
  Vocabulary vocab = vocabulary_of(pack);
  auto cues = find_cues(annotation, pack);
  Settler settler{pack, annotation, chunks, cues, out};

  std::vector<bool> tagged(tokens.size(), false);
  for (const auto &t : annotation.tags)
    for (int k = t.span.begin; k < t.span.end; ++k) tagged[k] = true;
  std::vector<std::string> plain;
  for (size_t i = 0; i < tokens.size(); ++i) {
    if (tokens[i].category == TokenCategory::kPunct) continue;
    plain.push_back(tagged[i] ? std::string("\x01") : tokens[i].lower);
  }

  bool any_field_tag = false;
  for (const auto &t : annotation.tags)
    any_field_tag = any_field_tag || feeds_field(schema, t);

  // Answer to the previous clarification question.
  std::set<std::string> resolution_words;
  std::optional<std::pair<AmbiguityReport, size_t>> resolved;
  if (context.pending_ambiguity && !any_field_tag) {
    const auto &amb = *context.pending_ambiguity;
    auto cand_words = candidate_words(amb, pack);
    std::vector<size_t> hits;
    for (size_t c = 0; c < cand_words.size(); ++c) {
      for (const auto &w : plain) {
        if (!cand_words[c].count(w)) continue;
        bool unique = true;
        for (size_t o = 0; o < cand_words.size(); ++o)
          if (o != c && cand_words[o].count(w)) unique = false;
        if (unique) {
          hits.push_back(c);
          resolution_words.insert(w);
          break;
        }
      }
    }
    if (hits.size() == 1) {
      resolved = std::make_pair(amb, hits[0]);
    } else if (hits.empty() && acts.ordinal && *acts.ordinal >= 0 &&
               static_cast<size_t>(*acts.ordinal) < amb.candidates.size()) {
      resolved = std::make_pair(amb, static_cast<size_t>(*acts.ordinal));
    }
  }

  // Once a question is on the table, a trigger that is also a cue and only
  // introduces a value ("leaving at 2:30") is a cue for that value, not a
  // new question.
  auto is_cue = [&](const std::vector<std::string> &phrase) {
    return std::any_of(pack.words.cues.begin(), pack.words.cues.end(),
                       [&](const Cue &c) { return c.words == phrase; });
  };
  auto introduces_value = [&](size_t end) {
    for (size_t k = end; k < plain.size(); ++k) {
      if (plain[k] == "\x01") return true;
      auto cat = pack.words.category(plain[k]);
      if (cat != WordCategory::kPrep && cat != WordCategory::kDet) return false;
    }
    return false;
  };
  // Words that answered a clarification ("the departure city") are not
  // triggers.
  auto answers_clarification = [&](size_t at, size_t size) {
    for (size_t k = at; k < at + size; ++k)
      if (resolved && resolution_words.count(plain[k])) return true;
    return false;
  };
  for (const auto &q : schema.query_types) {
    for (const auto &t : q.triggers) {
      for (int at = find_phrase(plain, t); at >= 0; at = find_phrase(plain, t, at + 1)) {
        if (context.query_type && is_cue(t) && introduces_value(at + t.size())) continue;
        if (answers_clarification(at, t.size())) continue;
        out.query_type = q.name;
        break;
      }
      if (out.query_type) break;
    }
    if (out.query_type) break;
  }

  std::set<int> consumed;
  if (acts.correction) consumed.insert(acts.correction->tags.begin(), acts.correction->tags.end());

  for (size_t k = 0; k < annotation.tags.size(); ++k) {
    if (consumed.count(static_cast<int>(k))) continue;
    const SemanticTag &tag = annotation.tags[k];
    if (tag.semantic_class() == kOutOfScopeClass) {
      out.out_of_scope_hits.emplace_back(tag.surface, to_string(tag.value()));
      continue;
    }
    settler.settle(tag.surface, tag.readings, tag.approx, &tag.span);
  }

  if (resolved) {
    const auto &[amb, index] = *resolved;
    const std::string &choice = amb.candidates[index];
    out.resolved_pending = true;
    switch (amb.kind) {
      case AmbiguityKind::kField: {
        const Reading &r = amb.readings.front();
        out.bindings.push_back({choice, r.value, r.semantic_class, amb.approx, amb.term});
        break;
      }
      case AmbiguityKind::kClass: {
        auto readings = amb.readings;
        std::erase_if(readings, [&](const Reading &r) { return r.semantic_class != choice; });
        settler.settle(amb.term, readings, amb.approx, nullptr);
        break;
      }
      case AmbiguityKind::kLexical: {
        auto readings = amb.readings;
        std::erase_if(readings, [&](const Reading &r) { return to_string(r.value) != choice; });
        settler.settle(amb.term, readings, amb.approx, nullptr);
        break;
      }
    }
  }

  // Ordinal selection from the last enumeration.
  if (!resolved && acts.ordinal && !context.enumerated_keys.empty() && !schema.key_field.empty()) {
    int idx = *acts.ordinal < 0 ? static_cast<int>(context.enumerated_keys.size()) - 1 : *acts.ordinal;
    bool key_given = std::any_of(out.bindings.begin(), out.bindings.end(),
                                 [&](const CandidateBinding &b) { return b.field == schema.key_field; });
    if (!key_given && idx >= 0 && static_cast<size_t>(idx) < context.enumerated_keys.size()) {
      const FieldSpec *key = schema.field(schema.key_field);
      out.bindings.push_back({key->name, context.enumerated_keys[idx], key->semantic_class, false,
                              kOrdinals[std::min<size_t>(idx, kOrdinals.size() - 1)]});
    }
  }

  for (size_t i = 0; i < tokens.size(); ++i) {
    if (tagged[i] || tokens[i].category != TokenCategory::kWord) continue;
    const std::string &w = tokens[i].lower;
    if (vocab.known.count(w) || resolution_words.count(w)) continue;
    if (!contains(out.unknown_terms, tokens[i].text)) out.unknown_terms.push_back(tokens[i].text);
  }
  return out;
}

ExtractionResult understand(std::string_view utterance, const DomainPack &pack,
                            const DialogueContext &context) {
  Annotation a = annotate(utterance, pack);
  Vocabulary vocab = vocabulary_of(pack);
  auto chunks = chunk_with(a.tokens, a.tags, pack, vocab);
  ActReport acts = detect_acts(a.tokens, a.tags, pack, context);
  return extract(a, chunks, acts, pack, context);
}

// ---------------------------------------------------------------------------
// Merge.

namespace {

bool same_value(const Value &a, const Value &b) {
  if (is_number(a) || is_number(b)) return a == b;
  return to_lower(std::get<std::string>(a)) == to_lower(std::get<std::string>(b));
}

}  // namespace

MergeResult merge(const DialogueContext &context, const ExtractionResult &extraction,
                  const DomainPack &pack) {
  MergeResult result;
  result.context = context;
  DialogueContext &ctx = result.context;
  const int window = pack.schema.approx_window;

  auto bind = [&](const std::string &field, const Value &value, const std::string &cls, bool approx) {
    auto it = ctx.bindings.find(field);
    if (it != ctx.bindings.end() && same_value(it->second.value, value) && it->second.approx == approx)
      return;
    ctx.bindings[field] = FieldBinding{field, value, cls, BindingStatus::kNew, ctx.turn_index, approx,
                                       approx ? window : 0};
    result.changed_fields.insert(field);
  };

  for (const auto &b : extraction.bindings) bind(b.field, b.value, b.semantic_class, b.approx);

  for (const auto &amb : extraction.ambiguities) {
    if (amb.kind == AmbiguityKind::kField && ctx.expected_field &&
        contains(amb.candidates, *ctx.expected_field)) {
      const Reading &r = amb.readings.front();
      bind(*ctx.expected_field, r.value, r.semantic_class, amb.approx);
      continue;
    }
    result.open_ambiguities.push_back(amb);
  }

  if (const auto &corr = extraction.acts.correction) {
    FieldBinding *target = nullptr;
    auto class_ok = [&](const FieldBinding &b) {
      return corr->semantic_class.empty() || b.semantic_class == corr->semantic_class;
    };
    auto most_recent = [&](auto pred) {
      FieldBinding *best = nullptr;
      for (const auto &f : pack.schema.fields) {
        auto it = ctx.bindings.find(f.name);
        if (it == ctx.bindings.end() || !pred(it->second)) continue;
        if (!best || it->second.turn >= best->turn) best = &it->second;
      }
      return best;
    };
    if (corr->old_value) {
      target = most_recent([&](const FieldBinding &b) { return class_ok(b) && same_value(b.value, *corr->old_value); });
    } else {
      if (ctx.pending_confirmation) {
        auto it = ctx.bindings.find(ctx.pending_confirmation->first);
        if (it != ctx.bindings.end() && class_ok(it->second)) target = &it->second;
      }
      if (!target) target = most_recent(class_ok);
    }
    if (target) {
      if (!same_value(target->value, corr->new_value) || target->status != BindingStatus::kCorrected) {
        target->value = corr->new_value;
        target->status = BindingStatus::kCorrected;
        target->turn = ctx.turn_index;
        result.changed_fields.insert(target->field);
      }
      result.corrected_field = target->field;
    } else {
      FieldBinding *already = most_recent([&](const FieldBinding &b) {
        return class_ok(b) && b.status == BindingStatus::kCorrected && same_value(b.value, corr->new_value);
      });
      if (!already) throw CorrectionTargetNotFound(corr->old_value ? to_string(*corr->old_value) : to_string(corr->new_value));
      result.corrected_field = already->field;
    }
  }

  if (extraction.query_type && extraction.query_type != ctx.query_type) {
    ctx.query_type = extraction.query_type;
    result.query_type_changed = true;
  }
  return result;
}

}  // namespace infodialog
