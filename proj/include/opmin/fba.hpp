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

// Frequency-based aspect extraction: sentence transactions of nouns and
// noun-phrase words, frequent itemsets, compactness and redundancy pruning,
// opinion-word harvesting around frequent features and nearest-noun
// extraction of infrequent features.

#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "opmin/common.hpp"
#include "opmin/corpus.hpp"
#include "opmin/extraction.hpp"
#include "opmin/itemsets.hpp"
#include "opmin/textnorm.hpp"

namespace opmin {

struct FbaConfig {
  MiningParams mining{0.01, 3, false};
  FuzzyParams fuzzy{};
  StemAlgorithm stem_algorithm = StemAlgorithm::kPorter;
  std::size_t adj_window = 3;
  std::size_t compact_max_gap = 3;
  std::size_t compact_min_sentences = 2;
  std::size_t min_psupport = 3;
  bool compactness_pruning = true;
  bool redundancy_pruning = true;
  bool infrequent_features = true;
  std::set<std::string> stopwords;

  void validate() const {
    mining.validate();
    fuzzy.validate();
    if (adj_window < 1 || compact_max_gap < 1 || compact_min_sentences < 1 || min_psupport < 1)
      throw ConfigError("fba windows and thresholds must be >= 1");
  }
};

struct TermOccurrence {
  std::size_t position = 0;
  std::string item;  // canonical stem
};

// Stemmed, fuzzily normalized view of a corpus. Depends only on the stemmer,
// the fuzzy parameters and the stopword list, so sweeps can share it.
struct FbaPrepared {
  StemIndex nouns;
  StemIndex adjectives;
  StemIndex others;
  // Transaction-candidate tokens per sentence.
  std::vector<std::vector<TermOccurrence>> occurrences;
  // Canonical key per token; empty for tokens that are never normalized.
  std::vector<std::vector<std::string>> keys;
  std::vector<Transaction> transactions;

  const StemIndex& index_for(pos::WordClass c) const {
    return c == pos::WordClass::kNoun ? nouns : c == pos::WordClass::kAdjective ? adjectives : others;
  }
};

struct FrequentFeature {
  std::vector<std::string> stems;  // itemset, sorted
  std::string surface;
  std::size_t support = 0;
  std::size_t psupport = 0;
  std::vector<std::size_t> sentences;  // sentence indices containing every stem

  bool multiword() const { return stems.size() > 1; }
};

namespace detail {

inline bool is_fba_candidate(const Token& t) {
  return pos::is_noun(t.pos) || t.chunk == "B-NP" || t.chunk == "I-NP";
}

inline bool fba_skip(const Token& t, const std::set<std::string>& stopwords) {
  return !text::is_wordlike(t.surface) || stopwords.count(text::to_lower(t.surface)) > 0;
}

}  // namespace detail

inline FbaPrepared prepare_fba(const Corpus& corpus, const FbaConfig& config) {
  config.validate();
  FbaPrepared out;
  std::vector<std::string> noun_stems, adj_stems, other_stems;
  std::vector<std::vector<std::string>> raw(corpus.size());
  for (std::size_t si = 0; si < corpus.size(); ++si) {
    const auto& s = corpus.sentences[si];
    raw[si].resize(s.tokens.size());
    for (const auto& t : s.tokens) {
      if (detail::fba_skip(t, config.stopwords)) continue;
      const auto cls = pos::classify(t.pos);
      const bool candidate = detail::is_fba_candidate(t);
      if (!candidate && cls != pos::WordClass::kAdjective) continue;
      std::string st = stem(t.surface, config.stem_algorithm, t.lemma);
      if (st.empty()) continue;
      raw[si][t.index] = st;
      if (cls == pos::WordClass::kNoun) noun_stems.push_back(st);
      else if (cls == pos::WordClass::kAdjective) adj_stems.push_back(st);
      else other_stems.push_back(st);
    }
  }
  out.nouns = cluster_terms(noun_stems, config.fuzzy);
  out.adjectives = cluster_terms(adj_stems, config.fuzzy);
  out.others = cluster_terms(other_stems, config.fuzzy);

  out.occurrences.resize(corpus.size());
  out.keys.resize(corpus.size());
  for (std::size_t si = 0; si < corpus.size(); ++si) {
    const auto& s = corpus.sentences[si];
    out.keys[si].assign(s.tokens.size(), std::string());
    std::vector<std::string> items;
    for (const auto& t : s.tokens) {
      const std::string& st = raw[si][t.index];
      if (st.empty()) continue;
      const auto cls = pos::classify(t.pos);
      StemIndex& index = cls == pos::WordClass::kNoun        ? out.nouns
                         : cls == pos::WordClass::kAdjective ? out.adjectives
                                                             : out.others;
      std::string key = index.canonical(st);
      index.add_original(st, {text::to_lower(t.surface), si, t.index});
      out.keys[si][t.index] = key;
      if (detail::is_fba_candidate(t)) {
        out.occurrences[si].push_back({t.index, key});
        items.push_back(key);
      }
    }
    out.transactions.push_back(Transaction::make(si, std::move(items)));
  }
  return out;
}

inline std::vector<Transaction> build_transactions(const Corpus& corpus, const FbaConfig& config) {
  return prepare_fba(corpus, config).transactions;
}

namespace detail {

struct FeatureOccurrence {
  std::vector<std::size_t> positions;  // sorted
  bool compact = false;
  std::size_t span() const { return positions.back() - positions.front(); }
};

inline bool is_compact(const std::vector<std::size_t>& sorted_positions, std::size_t max_gap) {
  for (std::size_t i = 1; i < sorted_positions.size(); ++i)
    if (sorted_positions[i] - sorted_positions[i - 1] > max_gap) return false;
  return true;
}

// Best placement of the feature's words in sentence `si`: a compact one if
// any exists, minimal span first, leftmost on ties.
inline std::optional<FeatureOccurrence> best_occurrence(const FbaPrepared& prep, std::size_t si,
                                                        const std::vector<std::string>& stems,
                                                        std::size_t max_gap) {
  std::vector<std::vector<std::size_t>> choices(stems.size());
  for (const auto& occ : prep.occurrences[si])
    for (std::size_t k = 0; k < stems.size(); ++k)
      if (occ.item == stems[k]) choices[k].push_back(occ.position);
  for (const auto& c : choices)
    if (c.empty()) return std::nullopt;
  std::optional<FeatureOccurrence> best;
  std::vector<std::size_t> pick(stems.size(), 0);
  for (;;) {
    std::vector<std::size_t> positions(stems.size());
    for (std::size_t k = 0; k < stems.size(); ++k) positions[k] = choices[k][pick[k]];
    std::sort(positions.begin(), positions.end());
    FeatureOccurrence cand{positions, is_compact(positions, max_gap)};
    auto better = [&](const FeatureOccurrence& a, const FeatureOccurrence& b) {
      if (a.compact != b.compact) return a.compact;
      if (a.span() != b.span()) return a.span() < b.span();
      return a.positions < b.positions;
    };
    if (!best || better(cand, *best)) best = std::move(cand);
    std::size_t k = 0;
    while (k < stems.size() && ++pick[k] == choices[k].size()) pick[k++] = 0;
    if (k == stems.size()) break;
  }
  return best;
}

inline std::string pick_most_frequent(const std::map<std::string, std::size_t>& counts) {
  std::string best;
  std::size_t best_count = 0;
  for (const auto& [s, c] : counts)
    if (c > best_count) best = s, best_count = c;
  return best;
}

}  // namespace detail

// Frequent itemsets materialized as features. Multiword surfaces use the
// most frequent observed ordering, preferring compact occurrences.
inline std::vector<FrequentFeature> mine_frequent_features(const Corpus& corpus, const FbaPrepared& prep,
                                                           const FbaConfig& config) {
  if (prep.transactions.empty()) throw DataError("fba: empty corpus");
  const auto itemsets = apriori(prep.transactions, config.mining);
  std::vector<FrequentFeature> out;
  out.reserve(itemsets.size());
  for (const auto& [stems, support] : itemsets) {
    FrequentFeature f;
    f.stems = stems;
    f.support = support;
    f.psupport = support;
    std::map<std::string, std::size_t> compact_forms, any_forms;
    for (const auto& t : prep.transactions) {
      if (!std::includes(t.items.begin(), t.items.end(), stems.begin(), stems.end())) continue;
      f.sentences.push_back(t.sentence);
      if (stems.size() == 1) {
        for (const auto& occ : prep.occurrences[t.sentence])
          if (occ.item == stems[0])
            ++compact_forms[text::to_lower(corpus.sentences[t.sentence].tokens[occ.position].surface)];
        continue;
      }
      auto occ = detail::best_occurrence(prep, t.sentence, stems, config.compact_max_gap);
      std::vector<std::string> words;
      for (auto p : occ->positions) words.push_back(text::to_lower(corpus.sentences[t.sentence].tokens[p].surface));
      std::string form = text::join(words, " ");
      ++(occ->compact ? compact_forms : any_forms)[form];
    }
    f.surface = detail::pick_most_frequent(compact_forms.empty() ? any_forms : compact_forms);
    out.push_back(std::move(f));
  }
  return out;
}

inline std::size_t compact_sentence_count(const FrequentFeature& f, const FbaPrepared& prep,
                                          const FbaConfig& config) {
  std::size_t n = 0;
  for (auto si : f.sentences) {
    auto occ = detail::best_occurrence(prep, si, f.stems, config.compact_max_gap);
    if (occ && occ->compact) ++n;
  }
  return n;
}

// Keeps single-word features and multiword features that are compact in at
// least compact_min_sentences sentences.
inline std::vector<FrequentFeature> compactness_prune(std::vector<FrequentFeature> features,
                                                      const FbaPrepared& prep, const FbaConfig& config) {
  std::vector<FrequentFeature> out;
  for (auto& f : features)
    if (!f.multiword() || compact_sentence_count(f, prep, config) >= config.compact_min_sentences)
      out.push_back(std::move(f));
  return out;
}

// p-support: sentences where the feature appears and no surviving superset
// feature phrase occurs compactly. Prunes single-word features only.
inline std::vector<FrequentFeature> redundancy_prune(std::vector<FrequentFeature> features,
                                                     const FbaPrepared& prep, const FbaConfig& config) {
  for (auto& f : features) {
    std::size_t pure = 0;
    for (auto si : f.sentences) {
      bool covered = false;
      for (const auto& g : features) {
        if (g.stems.size() <= f.stems.size()) continue;
        if (!std::includes(g.stems.begin(), g.stems.end(), f.stems.begin(), f.stems.end())) continue;
        if (!std::binary_search(g.sentences.begin(), g.sentences.end(), si)) continue;
        auto occ = detail::best_occurrence(prep, si, g.stems, config.compact_max_gap);
        if (occ && occ->compact) {
          covered = true;
          break;
        }
      }
      if (!covered) ++pure;
    }
    f.psupport = pure;
  }
  std::vector<FrequentFeature> out;
  for (auto& f : features)
    if (f.multiword() || f.psupport >= config.min_psupport) out.push_back(std::move(f));
  return out;
}

// Positions at which feature `f` is realized in sentence `si`.
inline std::vector<std::vector<std::size_t>> feature_spans(const FrequentFeature& f, const FbaPrepared& prep,
                                                           std::size_t si, const FbaConfig& config) {
  std::vector<std::vector<std::size_t>> spans;
  if (!f.multiword()) {
    for (const auto& occ : prep.occurrences[si])
      if (occ.item == f.stems[0]) spans.push_back({occ.position});
    return spans;
  }
  if (auto occ = detail::best_occurrence(prep, si, f.stems, config.compact_max_gap)) spans.push_back(occ->positions);
  return spans;
}

// Adjective canonical key -> sentence indices where it was harvested.
using OpinionKeys = std::map<std::string, std::set<std::size_t>>;

inline OpinionKeys extract_opinion_words(const std::vector<FrequentFeature>& features, const Corpus& corpus,
                                         const FbaPrepared& prep, const FbaConfig& config) {
  OpinionKeys out;
  for (const auto& f : features) {
    for (auto si : f.sentences) {
      const auto& s = corpus.sentences[si];
      for (const auto& span : feature_spans(f, prep, si, config)) {
        const std::size_t lo = span.front(), hi = span.back();
        const std::size_t from = lo >= config.adj_window ? lo - config.adj_window : 0;
        const std::size_t to = std::min(s.tokens.size() - 1, hi + config.adj_window);
        for (std::size_t p = from; p <= to; ++p) {
          if (!pos::is_adjective(s.tokens[p].pos)) continue;
          const std::string& key = prep.keys[si][p];
          if (!key.empty()) out[key].insert(si);
        }
      }
    }
  }
  return out;
}

// Sentences with no frequent feature but with opinion words contribute the
// noun group nearest to each opinion word (ties toward the left).
inline std::vector<AspectCandidate> extract_infrequent_features(const Corpus& corpus,
                                                                const std::vector<FrequentFeature>& frequent,
                                                                const OpinionKeys& opinion_words,
                                                                const FbaPrepared& prep, const FbaConfig& config) {
  std::vector<bool> has_feature(corpus.size(), false);
  for (const auto& f : frequent)
    for (auto si : f.sentences) has_feature[si] = true;
  std::map<std::string, std::vector<std::size_t>> found;
  for (std::size_t si = 0; si < corpus.size(); ++si) {
    if (has_feature[si]) continue;
    const auto& s = corpus.sentences[si];
    // Maximal runs of consecutive nouns.
    std::vector<std::pair<std::size_t, std::size_t>> groups;
    for (std::size_t i = 0; i < s.tokens.size();) {
      auto is_noun = [&](std::size_t k) {
        return pos::is_noun(s.tokens[k].pos) && !detail::fba_skip(s.tokens[k], config.stopwords);
      };
      if (!is_noun(i)) {
        ++i;
        continue;
      }
      std::size_t j = i + 1;
      while (j < s.tokens.size() && is_noun(j)) ++j;
      groups.emplace_back(i, j);
      i = j;
    }
    if (groups.empty()) continue;
    for (std::size_t p = 0; p < s.tokens.size(); ++p) {
      if (!pos::is_adjective(s.tokens[p].pos)) continue;
      const std::string& key = prep.keys[si][p];
      if (key.empty() || !opinion_words.count(key)) continue;
      std::size_t best = 0, best_dist = SIZE_MAX;
      for (std::size_t g = 0; g < groups.size(); ++g) {
        auto [b, e] = groups[g];
        std::size_t d = p < b ? b - p : (p >= e ? p - (e - 1) : 0);
        if (d < best_dist) best = g, best_dist = d;
      }
      std::vector<std::string> words;
      for (std::size_t k = groups[best].first; k < groups[best].second; ++k)
        words.push_back(text::to_lower(s.tokens[k].surface));
      auto& sentences = found[text::join(words, " ")];
      if (sentences.empty() || sentences.back() != si) sentences.push_back(si);
    }
  }
  std::vector<AspectCandidate> out;
  for (const auto& [term, sentences] : found) {
    AspectCandidate a;
    a.term = term;
    a.kind = AspectKind::kInfrequent;
    a.support = sentences.size();
    for (auto si : sentences) a.provenance.push_back(corpus.sentences[si].id);
    out.push_back(std::move(a));
  }
  return out;
}

struct FbaStages {
  std::vector<FrequentFeature> itemset_stage;
  std::vector<FrequentFeature> after_compactness;
  std::vector<FrequentFeature> after_redundancy;
  OpinionKeys opinion_words;
  ExtractionResult result;
};

inline ExtractionResult assemble_fba_result(const Corpus& corpus, const std::vector<FrequentFeature>& features,
                                            const OpinionKeys& opinions, std::vector<AspectCandidate> infrequent,
                                            const FbaPrepared& prep) {
  ExtractionResult r;
  r.algorithm = "fba";
  r.corpus = corpus.name;
  std::set<std::string> seen;
  for (const auto& f : features) {
    if (f.surface.empty() || !seen.insert(f.surface).second) continue;
    AspectCandidate a;
    a.term = f.surface;
    a.kind = AspectKind::kFrequent;
    a.support = f.support;
    for (auto si : f.sentences) a.provenance.push_back(corpus.sentences[si].id);
    r.aspects.push_back(std::move(a));
  }
  for (auto& a : infrequent)
    if (seen.insert(a.term).second) r.aspects.push_back(std::move(a));
  for (const auto& [key, sentences] : opinions) {
    OpinionWord o;
    o.word = prep.adjectives.contains(key) ? prep.adjectives.most_frequent_original(prep.adjectives.cluster_of(key))
                                           : key;
    for (auto si : sentences) o.sources.push_back(corpus.sentences[si].id);
    r.opinion_words.push_back(std::move(o));
  }
  return r;
}

// Full pipeline with every intermediate stage kept for stagewise evaluation.
inline FbaStages run_fba_stages(const Corpus& corpus, const FbaConfig& config, const FbaPrepared& prep) {
  if (corpus.empty()) throw DataError("fba: empty corpus");
  FbaStages st;
  st.itemset_stage = mine_frequent_features(corpus, prep, config);
  st.after_compactness =
      config.compactness_pruning ? compactness_prune(st.itemset_stage, prep, config) : st.itemset_stage;
  st.after_redundancy =
      config.redundancy_pruning ? redundancy_prune(st.after_compactness, prep, config) : st.after_compactness;
  std::vector<AspectCandidate> infrequent;
  if (config.infrequent_features) {
    st.opinion_words = extract_opinion_words(st.after_redundancy, corpus, prep, config);
    infrequent = extract_infrequent_features(corpus, st.after_redundancy, st.opinion_words, prep, config);
  }
  st.result = assemble_fba_result(corpus, st.after_redundancy, st.opinion_words, std::move(infrequent), prep);
  return st;
}

inline ExtractionResult run_fba(const Corpus& corpus, const FbaConfig& config, const FbaPrepared& prep) {
  return run_fba_stages(corpus, config, prep).result;
}

inline ExtractionResult run_fba(const Corpus& corpus, const FbaConfig& config) {
  if (corpus.empty()) throw DataError("fba: empty corpus");
  return run_fba(corpus, config, prepare_fba(corpus, config));
}

// Extraction result of the raw itemset-mining stage only.
inline ExtractionResult fba_itemset_stage(const Corpus& corpus, const FbaConfig& config, const FbaPrepared& prep) {
  return assemble_fba_result(corpus, mine_frequent_features(corpus, prep, config), {}, {}, prep);
}

}  // namespace opmin
