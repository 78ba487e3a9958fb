// Copyright 2026 The opmin Authors.
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

// Annotated review corpora: the data model shared by every extractor, the
// Customer Review Dataset gold-format parser and the JSON-lines interchange
// reader/writer.

#pragma once

#include <cstddef>
#include <filesystem>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include <json.hpp>

#include "opmin/common.hpp"

namespace opmin {

struct Token {
  std::size_t index = 0;
  std::string surface;
  std::string lemma;
  std::string stem;  // filled by textnorm; not part of the interchange format
  std::string pos;
  std::string chunk = "O";
  std::optional<std::size_t> head;  // nullopt for the root
  std::string deprel;

  bool operator==(const Token&) const = default;
};

// Half-open token range [start, end).
struct ClauseSpan {
  std::size_t start = 0;
  std::size_t end = 0;

  bool operator==(const ClauseSpan&) const = default;
};

inline const std::set<std::string>& gold_flag_names() {
  static const std::set<std::string> names{"u", "p", "s", "cc", "cs"};
  return names;
}

struct GoldAspect {
  std::string term;  // lowercase, whitespace-collapsed
  int strength = 0;  // [-3, +3]
  std::set<std::string> flags;

  bool operator==(const GoldAspect&) const = default;
};

struct GoldAnnotation {
  std::vector<GoldAspect> aspects;

  bool empty() const { return aspects.empty(); }
  bool operator==(const GoldAnnotation&) const = default;
};

struct AnnotatedSentence {
  std::string id;
  std::string doc;
  std::vector<Token> tokens;
  std::vector<ClauseSpan> clauses;
  GoldAnnotation gold;

  std::size_t size() const { return tokens.size(); }
  bool operator==(const AnnotatedSentence&) const = default;
};

struct Corpus {
  std::string name;
  std::vector<AnnotatedSentence> sentences;

  std::size_t size() const { return sentences.size(); }
  bool empty() const { return sentences.empty(); }
  bool has_gold() const {
    for (const auto& s : sentences)
      if (!s.gold.empty()) return true;
    return false;
  }
  bool operator==(const Corpus&) const = default;
};

// ---------------------------------------------------------------------------
// Customer Review Dataset plain-text format

struct CrdSentence {
  std::string doc;    // "d<k>", k counting [t] titles seen so far
  std::string text;   // portion after "##"
  GoldAnnotation gold;
  std::size_t line = 0;
};

struct ParseWarning {
  std::size_t line = 0;
  std::string message;
};

struct CrdParse {
  std::vector<CrdSentence> sentences;
  std::vector<std::string> titles;
  std::vector<ParseWarning> warnings;
};

namespace detail {

// Parses the bracket markers trailing an aspect term, e.g. "[+2][u]".
inline void parse_aspect_markers(std::string_view markers, GoldAspect& aspect, bool& has_strength,
                                 std::size_t line, std::vector<ParseWarning>& warnings) {
  std::size_t i = 0;
  while (i < markers.size()) {
    if (std::isspace(static_cast<unsigned char>(markers[i]))) {
      ++i;
      continue;
    }
    if (markers[i] != '[') {
      warnings.push_back({line, "stray text in aspect markers: '" + std::string(markers) + "'"});
      return;
    }
    auto close = markers.find(']', i);
    if (close == std::string_view::npos) {
      warnings.push_back({line, "unterminated aspect marker: '" + std::string(markers) + "'"});
      return;
    }
    std::string body = text::to_lower(text::trim(markers.substr(i + 1, close - i - 1)));
    i = close + 1;
    if (!body.empty() && (body[0] == '+' || body[0] == '-' || std::isdigit(static_cast<unsigned char>(body[0])))) {
      int value = 0;
      bool ok = body.size() >= 2 || std::isdigit(static_cast<unsigned char>(body[0]));
      if (ok) {
        try {
          std::size_t used = 0;
          value = std::stoi(body, &used);
          ok = used == body.size() && value >= -3 && value <= 3;
        } catch (const std::exception&) {
          ok = false;
        }
      }
      if (!ok) {
        warnings.push_back({line, "unreadable strength marker '[" + body + "]' for '" + aspect.term + "'"});
        value = 0;
      }
      aspect.strength = value;
      has_strength = true;
    } else if (gold_flag_names().count(body)) {
      aspect.flags.insert(body);
    } else {
      warnings.push_back({line, "unknown aspect marker '[" + body + "]' for '" + aspect.term + "'"});
    }
  }
}

inline GoldAnnotation parse_annotation_prefix(std::string_view prefix, std::size_t line,
                                              std::vector<ParseWarning>& warnings) {
  GoldAnnotation gold;
  // Aspects are comma separated; commas never occur inside brackets.
  std::size_t start = 0;
  while (start <= prefix.size()) {
    std::size_t comma = prefix.find(',', start);
    if (comma == std::string_view::npos) comma = prefix.size();
    std::string_view item = prefix.substr(start, comma - start);
    start = comma + 1;
    if (text::trim(item).empty()) {
      if (comma >= prefix.size()) break;
      continue;
    }
    auto bracket = item.find('[');
    GoldAspect aspect;
    aspect.term = text::normalize_term(item.substr(0, bracket));
    if (aspect.term.empty()) {
      warnings.push_back({line, "empty aspect term in '" + std::string(item) + "'"});
      continue;
    }
    bool has_strength = false;
    if (bracket != std::string_view::npos)
      parse_aspect_markers(item.substr(bracket), aspect, has_strength, line, warnings);
    if (!has_strength)
      warnings.push_back({line, "missing strength marker for '" + aspect.term + "'"});
    gold.aspects.push_back(std::move(aspect));
    if (comma >= prefix.size()) break;
  }
  return gold;
}

}  // namespace detail

// Every line is consumed as a title, an annotated sentence, an unannotated
// sentence or a blank; malformed lines produce warnings, never errors.
inline CrdParse parse_crd(std::istream& in) {
  CrdParse out;
  std::string raw;
  std::size_t line_no = 0;
  std::size_t doc_index = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    if (!raw.empty() && raw.back() == '\r') raw.pop_back();
    std::string line = text::trim(raw);
    if (line.empty()) continue;
    if (line.rfind("[t]", 0) == 0) {
      ++doc_index;
      out.titles.push_back(text::trim(std::string_view(line).substr(3)));
      continue;
    }
    CrdSentence sentence;
    sentence.line = line_no;
    sentence.doc = "d" + std::to_string(doc_index);
    auto sep = line.find("##");
    if (sep == std::string::npos) {
      out.warnings.push_back({line_no, "missing '##' separator; treated as unannotated sentence"});
      sentence.text = line;
    } else {
      sentence.text = text::trim(std::string_view(line).substr(sep + 2));
      sentence.gold = detail::parse_annotation_prefix(std::string_view(line).substr(0, sep), line_no,
                                                      out.warnings);
    }
    out.sentences.push_back(std::move(sentence));
  }
  return out;
}

inline CrdParse parse_crd(const std::string& raw_text) {
  std::istringstream in(raw_text);
  return parse_crd(in);
}

// ---------------------------------------------------------------------------
// Structural checks

// Throws DataError naming the offending field.
inline void validate_sentence(const AnnotatedSentence& s) {
  auto fail = [&](const std::string& field, const std::string& msg) {
    throw DataError("sentence '" + s.id + "': field '" + field + "': " + msg);
  };
  if (s.id.empty()) fail("id", "empty id");
  if (s.tokens.empty()) fail("tokens", "sentence has no tokens");
  const std::size_t n = s.tokens.size();
  std::size_t roots = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const Token& t = s.tokens[i];
    if (t.index != i) fail("tokens[" + std::to_string(i) + "].i", "token index not contiguous");
    if (t.head) {
      if (*t.head == i) fail("tokens[" + std::to_string(i) + "].head", "token is its own head");
      if (*t.head >= n) fail("tokens[" + std::to_string(i) + "].head", "head out of range");
    } else {
      ++roots;
    }
    const std::string& c = t.chunk;
    if (c != "O" && c != "B-NP" && c != "I-NP")
      fail("tokens[" + std::to_string(i) + "].chunk", "unknown chunk label '" + c + "'");
    if (c == "I-NP" && (i == 0 || s.tokens[i - 1].chunk == "O"))
      fail("tokens[" + std::to_string(i) + "].chunk", "I-NP not preceded by B-NP/I-NP");
  }
  if (roots != 1) fail("tokens", "expected exactly one root, found " + std::to_string(roots));
  // Every head chain must reach the root within n steps.
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t cur = i, steps = 0;
    while (s.tokens[cur].head) {
      cur = *s.tokens[cur].head;
      if (++steps > n) fail("tokens[" + std::to_string(i) + "].head", "dependency cycle");
    }
  }
  std::vector<ClauseSpan> sorted = s.clauses;
  std::sort(sorted.begin(), sorted.end(),
            [](const ClauseSpan& a, const ClauseSpan& b) { return a.start < b.start; });
  for (std::size_t k = 0; k < sorted.size(); ++k) {
    if (!(sorted[k].start < sorted[k].end) || sorted[k].end > n) fail("clauses", "clause span out of range");
    if (k && sorted[k].start < sorted[k - 1].end) fail("clauses", "overlapping clause spans");
  }
  for (std::size_t k = 0; k < s.gold.aspects.size(); ++k) {
    const auto& a = s.gold.aspects[k];
    std::string field = "gold[" + std::to_string(k) + "]";
    if (text::trim(a.term).empty()) fail(field + ".term", "empty term");
    if (a.strength < -3 || a.strength > 3) fail(field + ".strength", "strength outside [-3, 3]");
    for (const auto& f : a.flags)
      if (!gold_flag_names().count(f)) fail(field + ".flags", "unknown flag '" + f + "'");
  }
}

// Maximal B-NP/I-NP runs as half-open ranges, in sentence order.
inline std::vector<std::pair<std::size_t, std::size_t>> noun_phrases(const AnnotatedSentence& s) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  std::size_t i = 0;
  const std::size_t n = s.tokens.size();
  while (i < n) {
    if (s.tokens[i].chunk != "B-NP" && s.tokens[i].chunk != "I-NP") {
      ++i;
      continue;
    }
    std::size_t j = i + 1;
    while (j < n && s.tokens[j].chunk == "I-NP") ++j;
    out.emplace_back(i, j);
    i = j;
  }
  return out;
}

// Sentences without explicit clauses are treated as a single clause.
inline std::vector<ClauseSpan> clauses_or_whole(const AnnotatedSentence& s) {
  if (!s.clauses.empty()) return s.clauses;
  return {ClauseSpan{0, s.tokens.size()}};
}

// ---------------------------------------------------------------------------
// JSON-lines interchange format

inline nlohmann::ordered_json sentence_to_json(const AnnotatedSentence& s) {
  nlohmann::ordered_json j;
  j["id"] = s.id;
  j["doc"] = s.doc;
  auto tokens = nlohmann::ordered_json::array();
  for (const auto& t : s.tokens) {
    nlohmann::ordered_json tj;
    tj["i"] = t.index;
    tj["surface"] = t.surface;
    tj["lemma"] = t.lemma;
    tj["pos"] = t.pos;
    tj["chunk"] = t.chunk;
    tj["head"] = t.head ? static_cast<long long>(*t.head) : -1LL;
    tj["deprel"] = t.deprel;
    tokens.push_back(std::move(tj));
  }
  j["tokens"] = std::move(tokens);
  auto clauses = nlohmann::ordered_json::array();
  for (const auto& c : s.clauses) clauses.push_back({c.start, c.end});
  j["clauses"] = std::move(clauses);
  auto gold = nlohmann::ordered_json::array();
  for (const auto& a : s.gold.aspects) {
    nlohmann::ordered_json aj;
    aj["term"] = a.term;
    aj["strength"] = a.strength;
    aj["flags"] = std::vector<std::string>(a.flags.begin(), a.flags.end());
    gold.push_back(std::move(aj));
  }
  j["gold"] = std::move(gold);
  return j;
}

namespace detail {

template <class T>
T require_field(const nlohmann::json& obj, const char* key, const std::string& where) {
  if (!obj.is_object() || !obj.contains(key)) throw DataError(where + ": missing field '" + key + "'");
  const auto& v = obj.at(key);
  try {
    if constexpr (std::is_same_v<T, std::string>) {
      if (!v.is_string()) throw DataError("");
    } else if constexpr (std::is_integral_v<T>) {
      if (!v.is_number_integer()) throw DataError("");
    }
    return v.get<T>();
  } catch (const std::exception&) {
    throw DataError(where + ": field '" + key + "' has the wrong type");
  }
}

}  // namespace detail

// `where` prefixes error messages (typically "line N").
inline AnnotatedSentence sentence_from_json(const nlohmann::json& j, const std::string& where) {
  using detail::require_field;
  if (!j.is_object()) throw DataError(where + ": expected a JSON object");
  AnnotatedSentence s;
  s.id = require_field<std::string>(j, "id", where);
  s.doc = require_field<std::string>(j, "doc", where);
  if (!j.contains("tokens") || !j["tokens"].is_array())
    throw DataError(where + ": field 'tokens' missing or not an array");
  for (std::size_t k = 0; k < j["tokens"].size(); ++k) {
    const auto& tj = j["tokens"][k];
    std::string tw = where + ": tokens[" + std::to_string(k) + "]";
    Token t;
    long long idx = require_field<long long>(tj, "i", tw);
    if (idx < 0) throw DataError(tw + ": field 'i' is negative");
    t.index = static_cast<std::size_t>(idx);
    t.surface = require_field<std::string>(tj, "surface", tw);
    t.lemma = require_field<std::string>(tj, "lemma", tw);
    t.stem = t.lemma;
    t.pos = require_field<std::string>(tj, "pos", tw);
    t.chunk = require_field<std::string>(tj, "chunk", tw);
    long long head = require_field<long long>(tj, "head", tw);
    if (head < -1) throw DataError(tw + ": field 'head' must be -1 or a token index");
    if (head >= 0) t.head = static_cast<std::size_t>(head);
    t.deprel = require_field<std::string>(tj, "deprel", tw);
    s.tokens.push_back(std::move(t));
  }
  if (!j.contains("clauses") || !j["clauses"].is_array())
    throw DataError(where + ": field 'clauses' missing or not an array");
  for (const auto& cj : j["clauses"]) {
    if (!cj.is_array() || cj.size() != 2 || !cj[0].is_number_integer() || !cj[1].is_number_integer() ||
        cj[0].get<long long>() < 0 || cj[1].get<long long>() < 0)
      throw DataError(where + ": field 'clauses' entries must be [start, end] pairs");
    s.clauses.push_back({cj[0].get<std::size_t>(), cj[1].get<std::size_t>()});
  }
  if (!j.contains("gold") || !j["gold"].is_array())
    throw DataError(where + ": field 'gold' missing or not an array");
  for (std::size_t k = 0; k < j["gold"].size(); ++k) {
    const auto& gj = j["gold"][k];
    std::string gw = where + ": gold[" + std::to_string(k) + "]";
    GoldAspect a;
    a.term = text::normalize_term(require_field<std::string>(gj, "term", gw));
    a.strength = static_cast<int>(require_field<long long>(gj, "strength", gw));
    if (!gj.contains("flags") || !gj["flags"].is_array())
      throw DataError(gw + ": field 'flags' missing or not an array");
    for (const auto& f : gj["flags"]) {
      if (!f.is_string()) throw DataError(gw + ": field 'flags' must hold strings");
      a.flags.insert(f.get<std::string>());
    }
    s.gold.aspects.push_back(std::move(a));
  }
  try {
    validate_sentence(s);
  } catch (const DataError& e) {
    throw DataError(where + ": " + e.what());
  }
  return s;
}

inline Corpus read_annotated(std::istream& in, std::string name) {
  Corpus corpus;
  corpus.name = std::move(name);
  std::unordered_set<std::string> ids;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (text::trim(line).empty() || line[0] == '#') continue;
    std::string where = "line " + std::to_string(line_no);
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw DataError(where + ": invalid JSON: " + e.what());
    }
    AnnotatedSentence s = sentence_from_json(j, where);
    if (!ids.insert(s.id).second) throw DataError(where + ": field 'id': duplicate id '" + s.id + "'");
    corpus.sentences.push_back(std::move(s));
  }
  if (corpus.sentences.empty()) throw DataError("no sentences");
  return corpus;
}

inline Corpus load_annotated(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open corpus file '" + path.string() + "'");
  try {
    return read_annotated(in, path.stem().string());
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

inline void write_annotated(const Corpus& corpus, std::ostream& out) {
  for (const auto& s : corpus.sentences) out << sentence_to_json(s).dump() << '\n';
}

inline void save_annotated(const Corpus& corpus, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write corpus file '" + path.string() + "'");
  write_annotated(corpus, out);
}

}  // namespace opmin
