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

// Dependency-based double propagation: targets and opinion words are
// co-extracted from seed opinion words with eight dependency rules, then
// pruned by clause, dealer pattern and frequency, with a cascade that drops
// items whose every extraction chain passed through a pruned item.

#pragma once

#include <algorithm>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "opmin/common.hpp"
#include "opmin/corpus.hpp"
#include "opmin/extraction.hpp"
#include "opmin/textnorm.hpp"

namespace opmin {

enum class PropagationSchedule {
  kRoundRobin,  // every rule over every sentence against the state at round start
  kSequential,  // rules in reverse order, each seeing the others' additions at once
};

struct DbaConfig {
  std::set<std::string> seeds;
  std::set<std::string> mr_relations{"amod", "nsubj", "csubj", "xsubj", "dobj", "iobj", "prep", "nmod"};
  std::string conj_relation = "conj";
  std::vector<std::string> dealer_patterns{"compared with", "compared to", "vs", "versus", "than"};
  std::size_t dealer_window = 3;
  bool dealer_both_sides = false;  // false: only nouns after the pattern
  std::size_t q = 2;
  std::size_t k = 1;
  std::size_t min_freq = 2;
  Matching matching = Matching::kSurface;
  FuzzyParams fuzzy{};
  bool tree_conjunction = false;  // conj-edge connectivity instead of a CC token in between
  bool clause_pruning = true;
  bool dealer_pruning = true;
  bool cascade = true;
  PropagationSchedule schedule = PropagationSchedule::kRoundRobin;

  void validate() const {
    if (seeds.empty()) throw ConfigError("dba: seed set is empty");
    if (min_freq < 1) throw ConfigError("dba: min_freq must be >= 1");
    fuzzy.validate();
  }
};

// "word[TAB]+1|-1" per line, polarity optional; '#' starts a comment.
inline std::map<std::string, int> load_seed_lexicon(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open seed lexicon '" + path.string() + "'");
  std::map<std::string, int> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos && hash == line.find_first_not_of(" \t")) continue;
    auto tab = line.find('\t');
    std::string word = text::to_lower(text::trim(line.substr(0, tab)));
    if (word.empty()) continue;
    int polarity = 0;
    if (tab != std::string::npos) {
      const std::string p = text::trim(line.substr(tab + 1));
      if (p == "+1" || p == "1") polarity = 1;
      else if (p == "-1") polarity = -1;
      else if (!p.empty())
        throw DataError(path.string() + ": line " + std::to_string(line_no) + ": bad polarity '" + p + "'");
    }
    out[word] = polarity;
  }
  if (out.empty()) throw DataError(path.string() + ": no seed words");
  return out;
}

inline std::set<std::string> lexicon_words(const std::map<std::string, int>& lexicon) {
  std::set<std::string> out;
  for (const auto& [w, p] : lexicon) out.insert(w);
  return out;
}

// Every ninth word of the sorted lexicon starting at `index`.
inline std::set<std::string> lexicon_subset(const std::set<std::string>& words, std::size_t index,
                                            std::size_t parts = 9) {
  if (index >= parts) throw ConfigError("seed subset index out of range");
  std::set<std::string> out;
  std::size_t i = 0;
  for (const auto& w : words)
    if (i++ % parts == index) out.insert(w);
  return out;
}

enum class ItemKind { kTarget, kOpinion };

struct ItemId {
  ItemKind kind = ItemKind::kTarget;
  std::string key;

  auto operator<=>(const ItemId&) const = default;
};

// One application of a rule: `from` at `from_pos` yielded `to` at `to_pos`.
struct Firing {
  std::string rule;
  std::size_t sentence = 0;
  ItemId from;
  std::size_t from_pos = 0;
  ItemId to;
  std::size_t to_pos = 0;

  auto operator<=>(const Firing&) const = default;
};

struct PropagationState {
  std::set<std::string> targets;
  std::set<std::string> opinions;
  std::set<std::string> seeds;  // seed keys
  // Every firing valid at the fixpoint; the provenance graph.
  std::vector<Firing> firings;
  std::size_t rounds = 0;

  bool operator==(const PropagationState& o) const {
    return targets == o.targets && opinions == o.opinions && seeds == o.seeds && firings == o.firings;
  }
};

// Per-token matching keys; empty for tokens that are neither nouns nor
// adjectives.
struct DbaKeys {
  std::vector<std::vector<std::string>> keys;
  StemIndex nouns;
  StemIndex adjectives;
  Matching matching = Matching::kSurface;

  std::string seed_key(const std::string& word) const {
    const std::string w = text::to_lower(word);
    if (matching == Matching::kSurface) return w;
    const std::string st = porter_stem(w);
    return matching == Matching::kFuzzy ? adjectives.canonical(st) : st;
  }
};

inline DbaKeys dba_keys(const Corpus& corpus, const DbaConfig& config) {
  DbaKeys out;
  out.matching = config.matching;
  std::vector<std::string> noun_stems, adj_stems;
  if (config.matching == Matching::kFuzzy) {
    for (const auto& s : corpus.sentences)
      for (const auto& t : s.tokens) {
        if (!text::is_wordlike(t.surface)) continue;
        if (pos::is_noun(t.pos)) noun_stems.push_back(porter_stem(text::to_lower(t.surface)));
        if (pos::is_adjective(t.pos)) adj_stems.push_back(porter_stem(text::to_lower(t.surface)));
      }
    out.nouns = cluster_terms(noun_stems, config.fuzzy);
    out.adjectives = cluster_terms(adj_stems, config.fuzzy);
  }
  out.keys.resize(corpus.size());
  for (std::size_t si = 0; si < corpus.size(); ++si) {
    const auto& s = corpus.sentences[si];
    out.keys[si].assign(s.tokens.size(), std::string());
    for (const auto& t : s.tokens) {
      const auto cls = pos::classify(t.pos);
      if (cls == pos::WordClass::kOther || !text::is_wordlike(t.surface)) continue;
      std::string w = text::to_lower(t.surface);
      if (config.matching != Matching::kSurface) w = porter_stem(w);
      if (config.matching == Matching::kFuzzy) w = (cls == pos::WordClass::kNoun ? out.nouns : out.adjectives).canonical(w);
      out.keys[si][t.index] = w;
    }
  }
  return out;
}

// "nmod:poss" -> "nmod", "prep_with" -> "prep", "prepc_by" -> "prep".
inline std::string normalize_relation(std::string_view label) {
  std::string l = text::to_lower(label);
  if (auto colon = l.find(':'); colon != std::string::npos) l.resize(colon);
  if (l.rfind("prep_", 0) == 0 || l.rfind("prepc_", 0) == 0) return "prep";
  return l;
}

namespace detail {

struct Edge {
  std::size_t child;
  std::size_t head;
  std::string label;
};

struct SentenceGraph {
  std::vector<Edge> edges;
  std::vector<std::vector<std::size_t>> children_edges;  // per head: indices into edges
};

inline SentenceGraph sentence_graph(const AnnotatedSentence& s) {
  SentenceGraph g;
  g.children_edges.resize(s.tokens.size());
  for (const auto& t : s.tokens) {
    if (!t.head || *t.head >= s.tokens.size()) continue;
    g.children_edges[*t.head].push_back(g.edges.size());
    g.edges.push_back({t.index, *t.head, normalize_relation(t.deprel)});
  }
  return g;
}

// Enumerates every firing in sentence `si` whose source item is in the
// given state. `only` restricts to one rule name when non-empty.
template <class Fn>
void enumerate_firings(const AnnotatedSentence& s, std::size_t si, const SentenceGraph& g,
                       const std::vector<std::string>& keys, const std::set<std::string>& targets,
                       const std::set<std::string>& opinions, const DbaConfig& config, const std::string& only,
                       Fn&& emit) {
  auto noun = [&](std::size_t i) { return !keys[i].empty() && pos::is_noun(s.tokens[i].pos); };
  auto adj = [&](std::size_t i) { return !keys[i].empty() && pos::is_adjective(s.tokens[i].pos); };
  auto is_t = [&](std::size_t i) { return noun(i) && targets.count(keys[i]) > 0; };
  auto is_o = [&](std::size_t i) { return adj(i) && opinions.count(keys[i]) > 0; };
  auto want = [&](const char* rule) { return only.empty() || only == rule; };
  auto fire = [&](const char* rule, ItemKind fk, std::size_t from, ItemKind tk, std::size_t to) {
    emit(Firing{rule, si, {fk, keys[from]}, from, {tk, keys[to]}, to});
  };
  const auto T = ItemKind::kTarget;
  const auto O = ItemKind::kOpinion;
  const std::string conj = normalize_relation(config.conj_relation);

  // Direct links, both orientations.
  for (const auto& e : g.edges) {
    const bool mr = config.mr_relations.count(e.label) > 0;
    for (int dir = 0; dir < 2; ++dir) {
      const std::size_t a = dir == 0 ? e.child : e.head;
      const std::size_t b = dir == 0 ? e.head : e.child;
      if (mr && want("R1a") && is_o(a) && noun(b)) fire("R1a", O, a, T, b);
      if (mr && want("R2a") && is_t(a) && adj(b)) fire("R2a", T, a, O, b);
      if (e.label == conj && want("R3a") && is_t(a) && noun(b)) fire("R3a", T, a, T, b);
      if (e.label == conj && want("R4a") && is_o(a) && adj(b)) fire("R4a", O, a, O, b);
    }
  }
  // Siblings under a shared head.
  for (const auto& kids : g.children_edges) {
    for (std::size_t x : kids) {
      for (std::size_t y : kids) {
        if (x == y) continue;
        const Edge& ea = g.edges[x];
        const Edge& eb = g.edges[y];
        const std::size_t a = ea.child, b = eb.child;
        const bool both_mr = config.mr_relations.count(ea.label) && config.mr_relations.count(eb.label);
        const bool same = ea.label == eb.label;
        if (both_mr && want("R1b") && is_o(a) && noun(b)) fire("R1b", O, a, T, b);
        if (both_mr && want("R2b") && is_t(a) && adj(b)) fire("R2b", T, a, O, b);
        if (same && want("R3b") && is_t(a) && noun(b)) fire("R3b", T, a, T, b);
        if (same && want("R4b") && is_o(a) && adj(b)) fire("R4b", O, a, O, b);
      }
    }
  }
}

inline const std::vector<std::string>& rule_names() {
  static const std::vector<std::string> kRules{"R1a", "R1b", "R2a", "R2b", "R3a", "R3b", "R4a", "R4b"};
  return kRules;
}

}  // namespace detail

inline PropagationState propagate(const Corpus& corpus, const DbaConfig& config, const DbaKeys& keys) {
  config.validate();
  PropagationState st;
  for (const auto& w : config.seeds) st.seeds.insert(keys.seed_key(w));
  st.opinions = st.seeds;
  std::vector<detail::SentenceGraph> graphs;
  graphs.reserve(corpus.size());
  for (const auto& s : corpus.sentences) graphs.push_back(detail::sentence_graph(s));

  auto add = [&](const Firing& f, std::set<std::string>& targets, std::set<std::string>& opinions) {
    auto& dst = f.to.kind == ItemKind::kTarget ? targets : opinions;
    return dst.insert(f.to.key).second;
  };

  for (bool changed = true; changed;) {
    changed = false;
    ++st.rounds;
    if (config.schedule == PropagationSchedule::kRoundRobin) {
      const auto targets = st.targets;
      const auto opinions = st.opinions;
      for (std::size_t si = 0; si < corpus.size(); ++si)
        detail::enumerate_firings(corpus.sentences[si], si, graphs[si], keys.keys[si], targets, opinions, config, "",
                                  [&](const Firing& f) { changed |= add(f, st.targets, st.opinions); });
    } else {
      const auto& rules = detail::rule_names();
      for (auto r = rules.rbegin(); r != rules.rend(); ++r)
        for (std::size_t si = corpus.size(); si-- > 0;)
          detail::enumerate_firings(corpus.sentences[si], si, graphs[si], keys.keys[si], st.targets, st.opinions,
                                    config, *r,
                                    [&](const Firing& f) { changed |= add(f, st.targets, st.opinions); });
    }
  }

  std::set<Firing> firings;
  for (std::size_t si = 0; si < corpus.size(); ++si)
    detail::enumerate_firings(corpus.sentences[si], si, graphs[si], keys.keys[si], st.targets, st.opinions, config,
                              "", [&](const Firing& f) {
                                if (!(f.from == f.to)) firings.insert(f);
                              });
  st.firings.assign(firings.begin(), firings.end());
  return st;
}

inline PropagationState propagate(const Corpus& corpus, const DbaConfig& config) {
  return propagate(corpus, config, dba_keys(corpus, config));
}

// A target occurrence: a noun token whose key is an extracted target.
struct TargetOccurrence {
  std::size_t sentence = 0;
  std::size_t position = 0;
  std::string key;

  auto operator<=>(const TargetOccurrence&) const = default;
};

inline std::vector<TargetOccurrence> target_occurrences(const Corpus& corpus, const PropagationState& st,
                                                        const DbaKeys& keys) {
  std::vector<TargetOccurrence> out;
  for (std::size_t si = 0; si < corpus.size(); ++si)
    for (const auto& t : corpus.sentences[si].tokens) {
      const auto& k = keys.keys[si][t.index];
      if (!k.empty() && pos::is_noun(t.pos) && st.targets.count(k)) out.push_back({si, t.index, k});
    }
  return out;
}

namespace detail {

inline bool conj_connected(const AnnotatedSentence& s, std::size_t a, std::size_t b, const std::string& conj) {
  // Union of conj edges, searched from a.
  std::vector<std::vector<std::size_t>> adj(s.tokens.size());
  for (const auto& t : s.tokens)
    if (t.head && normalize_relation(t.deprel) == conj) {
      adj[t.index].push_back(*t.head);
      adj[*t.head].push_back(t.index);
    }
  std::vector<bool> seen(s.tokens.size(), false);
  std::vector<std::size_t> stack{a};
  seen[a] = true;
  while (!stack.empty()) {
    auto x = stack.back();
    stack.pop_back();
    if (x == b) return true;
    for (auto y : adj[x])
      if (!seen[y]) seen[y] = true, stack.push_back(y);
  }
  return false;
}

}  // namespace detail

// Within each clause holding two or more distinct targets that are not all
// joined by conjunctions, keeps only the occurrence of the globally most
// frequent target (leftmost on ties).
inline std::vector<TargetOccurrence> clause_prune(const std::vector<TargetOccurrence>& occurrences,
                                                  const Corpus& corpus, const DbaConfig& config) {
  std::map<std::string, std::size_t> freq;
  for (const auto& o : occurrences) ++freq[o.key];
  const std::string conj = normalize_relation(config.conj_relation);
  std::vector<TargetOccurrence> out;
  std::size_t i = 0;
  while (i < occurrences.size()) {
    const std::size_t si = occurrences[i].sentence;
    std::size_t j = i;
    while (j < occurrences.size() && occurrences[j].sentence == si) ++j;
    const auto& s = corpus.sentences[si];
    const auto clauses = clauses_or_whole(s);
    for (std::size_t k = i; k < j; ++k) {
      bool covered = false;
      for (const auto& clause : clauses)
        covered |= occurrences[k].position >= clause.start && occurrences[k].position < clause.end;
      if (!covered) out.push_back(occurrences[k]);
    }
    for (const auto& clause : clauses) {
      std::vector<TargetOccurrence> in;
      for (std::size_t k = i; k < j; ++k)
        if (occurrences[k].position >= clause.start && occurrences[k].position < clause.end)
          in.push_back(occurrences[k]);
      std::set<std::string> distinct;
      for (const auto& o : in) distinct.insert(o.key);
      bool connected = true;
      for (std::size_t k = 1; k < in.size() && connected; ++k) {
        if (in[k].key == in[k - 1].key) continue;
        if (config.tree_conjunction) {
          connected = detail::conj_connected(s, in[k - 1].position, in[k].position, conj);
        } else {
          bool cc = false;
          for (std::size_t p = in[k - 1].position + 1; p < in[k].position; ++p) cc |= s.tokens[p].pos == "CC";
          connected = cc;
        }
      }
      if (distinct.size() < 2 || connected) {
        out.insert(out.end(), in.begin(), in.end());
        continue;
      }
      const TargetOccurrence* best = &in[0];
      for (const auto& o : in)
        if (freq[o.key] > freq[best->key]) best = &o;
      out.push_back(*best);
    }
    i = j;
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

// Drops occurrences within dealer_window tokens of a dealer pattern match.
inline std::vector<TargetOccurrence> dealer_prune(const std::vector<TargetOccurrence>& occurrences,
                                                  const Corpus& corpus, const DbaConfig& config) {
  std::vector<std::vector<std::string>> patterns;
  for (const auto& p : config.dealer_patterns) {
    auto words = text::split_ws(text::to_lower(p));
    if (!words.empty()) patterns.push_back(std::move(words));
  }
  std::vector<TargetOccurrence> out;
  for (const auto& o : occurrences) {
    const auto& toks = corpus.sentences[o.sentence].tokens;
    bool near = false;
    for (const auto& pat : patterns) {
      for (std::size_t start = 0; start + pat.size() <= toks.size() && !near; ++start) {
        bool match = true;
        for (std::size_t w = 0; w < pat.size() && match; ++w) match = text::to_lower(toks[start + w].surface) == pat[w];
        if (!match) continue;
        const std::size_t end = start + pat.size() - 1;
        if (o.position > end && o.position - end <= config.dealer_window) near = true;
        if (config.dealer_both_sides && o.position < start && start - o.position <= config.dealer_window) near = true;
      }
      if (near) break;
    }
    if (!near) out.push_back(o);
  }
  return out;
}

struct PhraseOccurrence {
  TargetOccurrence head;
  std::size_t begin = 0;  // inclusive token span
  std::size_t end = 0;    // exclusive
  std::string key;        // token keys joined by spaces
  std::string surface;    // lowercased surfaces joined by spaces
};

// Extends each occurrence by up to q nouns on each side and then up to k
// adjectives to the left.
inline std::vector<PhraseOccurrence> form_phrases(const std::vector<TargetOccurrence>& occurrences,
                                                  const Corpus& corpus, const DbaKeys& keys,
                                                  const DbaConfig& config) {
  std::vector<PhraseOccurrence> out;
  for (const auto& o : occurrences) {
    const auto& toks = corpus.sentences[o.sentence].tokens;
    const auto& kk = keys.keys[o.sentence];
    auto noun = [&](std::size_t i) { return pos::is_noun(toks[i].pos) && !kk[i].empty(); };
    auto adj = [&](std::size_t i) { return pos::is_adjective(toks[i].pos) && !kk[i].empty(); };
    std::size_t b = o.position, e = o.position + 1;
    for (std::size_t n = 0; n < config.q && b > 0 && noun(b - 1); ++n) --b;
    for (std::size_t n = 0; n < config.k && b > 0 && adj(b - 1); ++n) --b;
    for (std::size_t n = 0; n < config.q && e < toks.size() && noun(e); ++n) ++e;
    PhraseOccurrence p{o, b, e, "", ""};
    std::vector<std::string> ks, ss;
    for (std::size_t i = b; i < e; ++i) {
      ks.push_back(kk[i]);
      ss.push_back(text::to_lower(toks[i].surface));
    }
    p.key = text::join(ks, " ");
    p.surface = text::join(ss, " ");
    out.push_back(std::move(p));
  }
  return out;
}

struct DbaStages {
  PropagationState state;
  std::vector<TargetOccurrence> occurrences;
  std::vector<TargetOccurrence> after_clause;
  std::vector<TargetOccurrence> after_dealer;
  std::vector<PhraseOccurrence> phrases;
  std::set<ItemId> removed;  // items dropped by frequency pruning or the cascade
  ExtractionResult result;
};

// Items reachable from the seeds through firings that avoid `removed`.
inline std::set<ItemId> reachable_items(const PropagationState& st, const std::set<ItemId>& removed) {
  std::map<ItemId, std::vector<ItemId>> out_edges;
  for (const auto& f : st.firings) out_edges[f.from].push_back(f.to);
  std::set<ItemId> seen;
  std::vector<ItemId> stack;
  for (const auto& s : st.seeds) {
    ItemId id{ItemKind::kOpinion, s};
    if (removed.count(id) || !seen.insert(id).second) continue;
    stack.push_back(id);
  }
  while (!stack.empty()) {
    ItemId x = stack.back();
    stack.pop_back();
    auto it = out_edges.find(x);
    if (it == out_edges.end()) continue;
    for (const auto& y : it->second)
      if (!removed.count(y) && seen.insert(y).second) stack.push_back(y);
  }
  return seen;
}

// Frequency pruning of phrases, then cascade removal to a fixpoint, then
// assembly of the result.
inline void frequency_prune_and_cascade(const Corpus& corpus, const DbaConfig& config, DbaStages& st) {
  std::map<std::string, std::vector<const PhraseOccurrence*>> by_phrase;
  for (const auto& p : st.phrases) by_phrase[p.key].push_back(&p);
  std::set<std::string> live_phrases;
  for (const auto& [key, occ] : by_phrase)
    if (occ.size() >= config.min_freq) live_phrases.insert(key);

  st.removed.clear();
  for (;;) {
    // A target survives while some live phrase occurrence is headed by it.
    std::set<std::string> headed;
    for (const auto& p : st.phrases)
      if (live_phrases.count(p.key) && !st.removed.count({ItemKind::kTarget, p.head.key})) headed.insert(p.head.key);
    std::set<ItemId> removed = st.removed;
    for (const auto& t : st.state.targets)
      if (!headed.count(t)) removed.insert({ItemKind::kTarget, t});
    if (config.cascade) {
      auto alive = reachable_items(st.state, removed);
      for (const auto& t : st.state.targets)
        if (!alive.count({ItemKind::kTarget, t})) removed.insert({ItemKind::kTarget, t});
      for (const auto& o : st.state.opinions)
        if (!alive.count({ItemKind::kOpinion, o})) removed.insert({ItemKind::kOpinion, o});
    }
    if (removed == st.removed) break;
    st.removed = std::move(removed);
  }

  ExtractionResult& r = st.result;
  r.algorithm = "dba";
  r.corpus = corpus.name;
  for (const auto& key : live_phrases) {
    std::map<std::string, std::size_t> surfaces;
    std::set<std::size_t> sentences;
    for (const auto* p : by_phrase[key]) {
      if (st.removed.count({ItemKind::kTarget, p->head.key})) continue;
      ++surfaces[p->surface];
      sentences.insert(p->head.sentence);
    }
    if (surfaces.empty()) continue;
    AspectCandidate a;
    std::size_t best = 0, total = 0;
    for (const auto& [s, c] : surfaces) {
      total += c;
      if (c > best) a.term = s, best = c;
    }
    a.kind = AspectKind::kDependency;
    a.support = total;
    for (auto si : sentences) a.provenance.push_back(corpus.sentences[si].id);
    r.aspects.push_back(std::move(a));
  }
  std::sort(r.aspects.begin(), r.aspects.end(),
            [](const AspectCandidate& a, const AspectCandidate& b) { return a.term < b.term; });
  r.aspects.erase(std::unique(r.aspects.begin(), r.aspects.end(),
                              [](const AspectCandidate& a, const AspectCandidate& b) { return a.term == b.term; }),
                  r.aspects.end());

  std::map<std::string, std::set<std::size_t>> opinion_sources;
  std::map<std::string, std::map<std::string, std::size_t>> opinion_surfaces;
  for (const auto& f : st.state.firings) {
    if (f.to.kind != ItemKind::kOpinion || st.state.seeds.count(f.to.key)) continue;
    if (st.removed.count(f.to) || st.removed.count(f.from)) continue;
    opinion_sources[f.to.key].insert(f.sentence);
    ++opinion_surfaces[f.to.key][text::to_lower(corpus.sentences[f.sentence].tokens[f.to_pos].surface)];
  }
  for (const auto& [key, sentences] : opinion_sources) {
    OpinionWord o;
    std::size_t best = 0;
    for (const auto& [s, c] : opinion_surfaces[key])
      if (c > best) o.word = s, best = c;
    for (auto si : sentences) o.sources.push_back(corpus.sentences[si].id);
    r.opinion_words.push_back(std::move(o));
  }
}

inline DbaStages run_dba_stages(const Corpus& corpus, const DbaConfig& config) {
  config.validate();
  if (corpus.empty()) throw DataError("dba: empty corpus");
  const DbaKeys keys = dba_keys(corpus, config);
  DbaStages st;
  st.state = propagate(corpus, config, keys);
  st.occurrences = target_occurrences(corpus, st.state, keys);
  st.after_clause = config.clause_pruning ? clause_prune(st.occurrences, corpus, config) : st.occurrences;
  st.after_dealer = config.dealer_pruning ? dealer_prune(st.after_clause, corpus, config) : st.after_clause;
  st.phrases = form_phrases(st.after_dealer, corpus, keys, config);
  frequency_prune_and_cascade(corpus, config, st);
  return st;
}

inline ExtractionResult run_dba(const Corpus& corpus, const DbaConfig& config) {
  return run_dba_stages(corpus, config).result;
}

}  // namespace opmin
