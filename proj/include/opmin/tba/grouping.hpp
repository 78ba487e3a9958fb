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

// Multiword term grouping: C-value ranking of n-gram or POS-pattern
// candidates, or noun runs inside NP chunks, and fusion of the selected
// terms into single tokens.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "opmin/common.hpp"
#include "opmin/corpus.hpp"

namespace opmin::tba {

enum class GroupingMethod { kNone, kCValueNgram, kCValuePattern, kNpSubtree };

inline const char* to_string(GroupingMethod m) {
  switch (m) {
    case GroupingMethod::kNone: return "none";
    case GroupingMethod::kCValueNgram: return "cvalue_ngram";
    case GroupingMethod::kCValuePattern: return "cvalue_pattern";
    case GroupingMethod::kNpSubtree: return "np_subtree";
  }
  return "unknown";
}

inline GroupingMethod grouping_from_string(const std::string& s) {
  if (s == "none") return GroupingMethod::kNone;
  if (s == "cvalue_ngram") return GroupingMethod::kCValueNgram;
  if (s == "cvalue_pattern") return GroupingMethod::kCValuePattern;
  if (s == "np_subtree") return GroupingMethod::kNpSubtree;
  throw ConfigError("unknown grouping method '" + s + "'");
}

struct GroupingConfig {
  GroupingMethod method = GroupingMethod::kCValueNgram;
  std::size_t max_n = 4;
  std::optional<std::size_t> limit;
  // Terms scoring at or below this, or seen fewer than min_frequency
  // times, are not grouped.
  double min_score = 0.0;
  std::size_t min_frequency = 2;

  void validate() const {
    if (method != GroupingMethod::kNone && max_n < 2) throw ConfigError("grouping max_n must be >= 2");
  }
};

struct RankedTerm {
  std::vector<std::string> words;  // lowercased lemmas
  std::size_t frequency = 0;
  double score = 0.0;

  std::string key() const { return text::join(words, " "); }
  bool operator==(const RankedTerm&) const = default;
};

namespace detail {

inline std::string lemma_of(const Token& t) { return text::to_lower(t.lemma.empty() ? t.surface : t.lemma); }

// Function-word tags never part of an n-gram term.
inline bool closed_class(const std::string& tag) {
  static const std::set<std::string> tags{"CC", "DT", "EX", "IN", "MD", "PDT", "POS", "PRP", "PRP$",
                                          "RP", "TO", "UH", "WDT", "WP", "WP$", "WRB"};
  return tags.count(tag) > 0;
}

// Candidate spans [b, e) of one sentence for the given method.
inline std::vector<std::pair<std::size_t, std::size_t>> candidate_spans(const AnnotatedSentence& s,
                                                                       const GroupingConfig& config) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  const auto& toks = s.tokens;
  const std::size_t n = toks.size();
  if (config.method == GroupingMethod::kNpSubtree) {
    auto groupable = [&](const Token& t) {
      return (pos::is_noun(t.pos) || t.pos == "CD" || t.pos == "FW") && text::is_wordlike(t.surface);
    };
    for (auto [b, e] : noun_phrases(s)) {
      for (std::size_t i = b; i < e;) {
        if (!groupable(toks[i])) {
          ++i;
          continue;
        }
        std::size_t j = i + 1;
        while (j < e && groupable(toks[j])) ++j;
        if (j - i >= 2) out.emplace_back(i, j);
        i = j;
      }
    }
    return out;
  }
  auto allowed = [&](const Token& t) {
    if (!text::is_wordlike(t.surface) || closed_class(t.pos)) return false;
    if (config.method == GroupingMethod::kCValuePattern) return pos::is_noun(t.pos) || pos::is_adjective(t.pos);
    return true;
  };
  for (std::size_t b = 0; b < n; ++b) {
    if (!allowed(toks[b])) continue;
    for (std::size_t e = b + 1; e < n && e - b < config.max_n; ++e) {
      if (!allowed(toks[e])) break;
      if (pos::is_noun(toks[e].pos)) out.emplace_back(b, e + 1);
    }
  }
  return out;
}

}  // namespace detail

// Candidate terms with their C-value (or raw frequency for np_subtree),
// ranked by score descending, then key ascending.
inline std::vector<RankedTerm> cvalue_rank(const Corpus& corpus, const GroupingConfig& config) {
  config.validate();
  if (config.method == GroupingMethod::kNone) return {};
  std::map<std::vector<std::string>, std::size_t> freq;
  for (const auto& s : corpus.sentences)
    for (auto [b, e] : detail::candidate_spans(s, config)) {
      std::vector<std::string> words;
      for (std::size_t i = b; i < e; ++i) words.push_back(detail::lemma_of(s.tokens[i]));
      ++freq[words];
    }
  std::vector<RankedTerm> out;
  if (config.method == GroupingMethod::kNpSubtree) {
    for (const auto& [words, f] : freq) out.push_back({words, f, static_cast<double>(f)});
  } else {
    // For each candidate, the longer candidates that contain it.
    std::map<std::vector<std::string>, std::pair<std::size_t, std::size_t>> nested;  // count of T_a, sum f(b)
    for (const auto& [words, f] : freq) {
      std::set<std::vector<std::string>> subs;
      for (std::size_t b = 0; b < words.size(); ++b)
        for (std::size_t e = b + 2; e <= words.size(); ++e) {
          if (e - b == words.size()) continue;
          std::vector<std::string> sub(words.begin() + static_cast<long>(b), words.begin() + static_cast<long>(e));
          if (freq.count(sub)) subs.insert(std::move(sub));
        }
      for (const auto& sub : subs) {
        auto& [count, sum] = nested[sub];
        ++count;
        sum += f;
      }
    }
    for (const auto& [words, f] : freq) {
      const double len = std::log2(static_cast<double>(words.size()));
      double score = len * static_cast<double>(f);
      if (auto it = nested.find(words); it != nested.end())
        score = len * (static_cast<double>(f) -
                       static_cast<double>(it->second.second) / static_cast<double>(it->second.first));
      out.push_back({words, f, score});
    }
  }
  std::sort(out.begin(), out.end(), [](const RankedTerm& a, const RankedTerm& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.words < b.words;
  });
  return out;
}

// Terms to fuse: score above min_score and frequent enough, capped at limit.
inline std::vector<RankedTerm> select_groups(std::vector<RankedTerm> ranked, const GroupingConfig& config) {
  std::erase_if(ranked, [&](const RankedTerm& t) {
    return !(t.score > config.min_score) || t.frequency < config.min_frequency;
  });
  if (config.limit && ranked.size() > *config.limit) ranked.resize(*config.limit);
  return ranked;
}

namespace detail {

inline std::size_t depth_of(const AnnotatedSentence& s, std::size_t i) {
  std::size_t d = 0;
  std::optional<std::size_t> cur = s.tokens[i].head;
  while (cur && d <= s.tokens.size()) {
    ++d;
    cur = s.tokens[*cur].head;
  }
  return d;
}

inline std::string fused_chunk(const AnnotatedSentence& s, std::size_t b, std::size_t e) {
  const std::string& first = s.tokens[b].chunk;
  if (first == "B-NP" || first == "I-NP") return first;
  for (std::size_t i = b; i < e; ++i)
    if (s.tokens[i].chunk == "B-NP" || s.tokens[i].chunk == "I-NP") return "B-NP";
  return "O";
}

}  // namespace detail

// Fuses every occurrence of the given terms into one token per occurrence:
// longer matches first, then leftmost; matches crossing a clause boundary
// are skipped. The fused token is a noun whose lemma joins the member
// lemmas with '_' and whose head is that of its shallowest member.
inline AnnotatedSentence group_sentence(const AnnotatedSentence& s, const std::vector<RankedTerm>& terms) {
  if (terms.empty()) return s;
  std::size_t longest = 0;
  std::set<std::vector<std::string>> wanted;
  for (const auto& t : terms) {
    wanted.insert(t.words);
    longest = std::max(longest, t.words.size());
  }
  const std::size_t n = s.tokens.size();
  std::vector<std::pair<std::size_t, std::size_t>> matches;
  for (std::size_t b = 0; b < n; ++b) {
    std::vector<std::string> words;
    for (std::size_t e = b; e < n && e - b < longest; ++e) {
      words.push_back(detail::lemma_of(s.tokens[e]));
      if (words.size() >= 2 && wanted.count(words)) matches.emplace_back(b, e + 1);
    }
  }
  if (matches.empty()) return s;
  std::sort(matches.begin(), matches.end(), [](auto x, auto y) {
    if (x.second - x.first != y.second - y.first) return x.second - x.first > y.second - y.first;
    return x.first < y.first;
  });
  auto crosses_clause = [&](std::size_t b, std::size_t e) {
    for (const auto& c : s.clauses) {
      const bool in_b = b >= c.start && b < c.end;
      const bool in_e = e - 1 >= c.start && e - 1 < c.end;
      if (in_b != in_e) return true;
    }
    return false;
  };
  std::vector<int> owner(n, -1);
  std::vector<std::pair<std::size_t, std::size_t>> chosen;
  for (auto [b, e] : matches) {
    bool free = true;
    for (std::size_t i = b; i < e && free; ++i) free = owner[i] < 0;
    if (!free || crosses_clause(b, e)) continue;
    for (std::size_t i = b; i < e; ++i) owner[i] = static_cast<int>(chosen.size());
    chosen.emplace_back(b, e);
  }
  if (chosen.empty()) return s;

  // Old index -> new index.
  std::vector<std::size_t> remap(n);
  std::vector<std::size_t> group_new_index(chosen.size());
  std::size_t next = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (owner[i] >= 0) {
      auto g = static_cast<std::size_t>(owner[i]);
      if (i == chosen[g].first) group_new_index[g] = next++;
      remap[i] = group_new_index[g];
    } else {
      remap[i] = next++;
    }
  }

  AnnotatedSentence out;
  out.id = s.id;
  out.doc = s.doc;
  out.gold = s.gold;
  for (std::size_t i = 0; i < n; ++i) {
    if (owner[i] >= 0 && i != chosen[static_cast<std::size_t>(owner[i])].first) continue;
    Token t;
    std::size_t source = i;
    if (owner[i] >= 0) {
      auto [b, e] = chosen[static_cast<std::size_t>(owner[i])];
      std::vector<std::string> surfaces, lemmas, stems;
      std::size_t best_depth = SIZE_MAX;
      for (std::size_t k = b; k < e; ++k) {
        surfaces.push_back(s.tokens[k].surface);
        lemmas.push_back(detail::lemma_of(s.tokens[k]));
        stems.push_back(s.tokens[k].stem.empty() ? lemmas.back() : s.tokens[k].stem);
        const std::size_t d = detail::depth_of(s, k);
        if (d <= best_depth) best_depth = d, source = k;
      }
      t.surface = text::join(surfaces, " ");
      t.lemma = text::join(lemmas, "_");
      t.stem = text::join(stems, "_");
      t.pos = "NN";
      t.chunk = detail::fused_chunk(s, b, e);
    } else {
      t = s.tokens[i];
    }
    t.index = out.tokens.size();
    t.deprel = s.tokens[source].deprel;
    t.head.reset();
    if (const auto& h = s.tokens[source].head) t.head = remap[*h];
    out.tokens.push_back(std::move(t));
  }
  // IOB repair: a token following a fused NP token keeps its label valid.
  for (std::size_t i = 0; i < out.tokens.size(); ++i)
    if (out.tokens[i].chunk == "I-NP" && (i == 0 || out.tokens[i - 1].chunk == "O")) out.tokens[i].chunk = "B-NP";
  for (const auto& c : s.clauses) {
    if (c.start >= c.end) continue;
    out.clauses.push_back({remap[c.start], remap[c.end - 1] + 1});
  }
  return out;
}

inline Corpus group_terms(const Corpus& corpus, const std::vector<RankedTerm>& terms) {
  Corpus out;
  out.name = corpus.name;
  out.sentences.reserve(corpus.size());
  for (const auto& s : corpus.sentences) out.sentences.push_back(group_sentence(s, terms));
  return out;
}

}  // namespace opmin::tba
