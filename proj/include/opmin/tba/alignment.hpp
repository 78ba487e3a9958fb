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

// Constrained monolingual word alignment with IBM Models 1 and 2. Each
// sentence is aligned to a copy of itself with a NULL word prepended on the
// generating side. A word never aligns to its own position; noun types only
// align to adjective types (or NULL) and adjective types only to noun types
// (or NULL); all other types align freely.

#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "opmin/common.hpp"
#include "opmin/corpus.hpp"
#include "opmin/textnorm.hpp"

namespace opmin::tba {

inline constexpr std::uint32_t kNullWord = 0;

// Word types, their classes and the sentences as type-id sequences.
struct AlignmentCorpus {
  std::vector<std::string> vocab{"<null>"};
  std::vector<pos::WordClass> word_class{pos::WordClass::kOther};
  std::vector<std::vector<std::uint32_t>> sentences;
  std::vector<std::vector<std::size_t>> positions;  // token index of every aligned word

  std::uint32_t id(const std::string& type) const {
    for (std::uint32_t i = 0; i < vocab.size(); ++i)
      if (vocab[i] == type) return i;
    throw std::out_of_range("unknown word type '" + type + "'");
  }
};

enum class TypeKey { kLemma, kStem };

inline std::string type_key(const Token& t, TypeKey key) {
  std::string lemma = text::to_lower(t.lemma.empty() ? t.surface : t.lemma);
  if (key == TypeKey::kLemma) return lemma;
  // Fused multiword lemmas are stemmed word by word.
  std::string out;
  std::size_t start = 0;
  for (;;) {
    auto us = lemma.find('_', start);
    out += porter_stem(lemma.substr(start, us == std::string::npos ? std::string::npos : us - start));
    if (us == std::string::npos) break;
    out += '_';
    start = us + 1;
  }
  return out;
}

// Punctuation-like tokens are dropped. A type's class is the majority class
// of its tokens; ties prefer noun, then adjective.
inline AlignmentCorpus build_alignment_corpus(const Corpus& corpus, TypeKey key = TypeKey::kLemma) {
  AlignmentCorpus ac;
  std::unordered_map<std::string, std::uint32_t> ids;
  std::vector<std::array<std::size_t, 3>> votes{{0, 0, 0}};
  for (const auto& s : corpus.sentences) {
    std::vector<std::uint32_t> ws;
    std::vector<std::size_t> ps;
    for (const auto& t : s.tokens) {
      if (!text::is_wordlike(t.surface)) continue;
      std::string k = type_key(t, key);
      auto [it, fresh] = ids.emplace(k, static_cast<std::uint32_t>(ac.vocab.size()));
      if (fresh) {
        ac.vocab.push_back(k);
        votes.push_back({0, 0, 0});
      }
      ++votes[it->second][static_cast<std::size_t>(pos::classify(t.pos))];
      ws.push_back(it->second);
      ps.push_back(t.index);
    }
    ac.sentences.push_back(std::move(ws));
    ac.positions.push_back(std::move(ps));
  }
  ac.word_class.resize(ac.vocab.size(), pos::WordClass::kOther);
  for (std::size_t i = 1; i < ac.vocab.size(); ++i) {
    const auto& v = votes[i];
    if (v[0] >= v[1] && v[0] >= v[2]) ac.word_class[i] = pos::WordClass::kNoun;
    else if (v[1] >= v[2]) ac.word_class[i] = pos::WordClass::kAdjective;
    else ac.word_class[i] = pos::WordClass::kOther;
  }
  return ac;
}

// May type f be generated by type e?
inline bool pair_allowed(const AlignmentCorpus& ac, std::uint32_t e, std::uint32_t f) {
  if (e == kNullWord) return true;
  const auto fc = ac.word_class[f], ec = ac.word_class[e];
  if (fc == pos::WordClass::kNoun) return ec == pos::WordClass::kAdjective;
  if (fc == pos::WordClass::kAdjective) return ec == pos::WordClass::kNoun;
  return true;
}

// Allowed (e, f) pairs and, per sentence and target position j, the
// generating positions i (0 = NULL, word k at i = k + 1) with their pair.
struct AlignmentSpace {
  AlignmentCorpus corpus;
  std::vector<std::uint32_t> pair_e, pair_f;
  std::unordered_map<std::uint64_t, std::uint32_t> pair_index;
  struct Link {
    std::uint32_t i;
    std::uint32_t pair;
  };
  std::vector<std::vector<std::vector<Link>>> links;

  static std::uint64_t key(std::uint32_t e, std::uint32_t f) { return (std::uint64_t{e} << 32) | f; }

  std::optional<std::uint32_t> find(std::uint32_t e, std::uint32_t f) const {
    auto it = pair_index.find(key(e, f));
    if (it == pair_index.end()) return std::nullopt;
    return it->second;
  }
};

inline std::shared_ptr<const AlignmentSpace> make_alignment_space(AlignmentCorpus ac) {
  auto sp = std::make_shared<AlignmentSpace>();
  sp->corpus = std::move(ac);
  const auto& c = sp->corpus;
  sp->links.resize(c.sentences.size());
  for (std::size_t s = 0; s < c.sentences.size(); ++s) {
    const auto& w = c.sentences[s];
    sp->links[s].resize(w.size());
    for (std::size_t j = 0; j < w.size(); ++j) {
      for (std::size_t i = 0; i <= w.size(); ++i) {
        if (i == j + 1) continue;
        const std::uint32_t e = i == 0 ? kNullWord : w[i - 1];
        if (!pair_allowed(c, e, w[j])) continue;
        auto [it, fresh] = sp->pair_index.emplace(AlignmentSpace::key(e, w[j]), static_cast<std::uint32_t>(sp->pair_e.size()));
        if (fresh) {
          sp->pair_e.push_back(e);
          sp->pair_f.push_back(w[j]);
        }
        sp->links[s][j].push_back({static_cast<std::uint32_t>(i), it->second});
      }
    }
  }
  return sp;
}

// t(f | e) over the allowed pairs; forbidden pairs are absent and read as 0.
class TranslationTable {
 public:
  TranslationTable() = default;
  TranslationTable(std::shared_ptr<const AlignmentSpace> space, std::vector<double> t)
      : space_(std::move(space)), t_(std::move(t)) {}

  const AlignmentSpace& space() const { return *space_; }
  const std::shared_ptr<const AlignmentSpace>& space_ptr() const { return space_; }
  const std::vector<double>& values() const { return t_; }

  double prob(std::uint32_t e, std::uint32_t f) const {
    auto p = space_->find(e, f);
    return p ? t_[*p] : 0.0;
  }
  double prob(const std::string& e, const std::string& f) const {
    const auto& c = space_->corpus;
    return prob(e == "<null>" ? kNullWord : c.id(e), c.id(f));
  }

  // Sum of t(. | e) over every f.
  double row_sum(std::uint32_t e) const {
    double s = 0;
    for (std::size_t p = 0; p < t_.size(); ++p)
      if (space_->pair_e[p] == e) s += t_[p];
    return s;
  }

 private:
  std::shared_ptr<const AlignmentSpace> space_;
  std::vector<double> t_;
};

// a(i | j, l, m) with m == l for a sentence aligned to itself; i == j + 1
// is the banned self position and stays 0.
class DistortionTable {
 public:
  double prob(std::size_t i, std::size_t j, std::size_t l, std::size_t m) const {
    if (l != m) return 0.0;
    auto it = a_.find({l, j});
    if (it == a_.end() || i > l) return 0.0;
    return it->second[i];
  }
  double prob(std::size_t i, std::size_t j, std::size_t l) const { return prob(i, j, l, l); }

  std::vector<double>& row(std::size_t j, std::size_t l) {
    auto it = a_.find({l, j});
    if (it == a_.end()) {
      std::vector<double> r(l + 1, l == 0 ? 0.0 : 1.0 / static_cast<double>(l));
      r[j + 1] = 0.0;
      it = a_.emplace(std::make_pair(l, j), std::move(r)).first;
    }
    return it->second;
  }
  const std::map<std::pair<std::size_t, std::size_t>, std::vector<double>>& rows() const { return a_; }

 private:
  std::map<std::pair<std::size_t, std::size_t>, std::vector<double>> a_;  // (l, j) -> a(. | j, l)
};

struct EmTrace {
  // Corpus log-likelihood before each iteration and after the last one.
  std::vector<double> log_likelihood;
};

inline TranslationTable uniform_table(std::shared_ptr<const AlignmentSpace> space) {
  std::vector<std::size_t> row_size(space->corpus.vocab.size(), 0);
  for (auto e : space->pair_e) ++row_size[e];
  std::vector<double> t(space->pair_e.size());
  for (std::size_t p = 0; p < t.size(); ++p) t[p] = 1.0 / static_cast<double>(row_size[space->pair_e[p]]);
  return TranslationTable(std::move(space), std::move(t));
}

namespace detail {

inline void normalize_rows(const AlignmentSpace& sp, const std::vector<double>& counts, std::vector<double>& t) {
  std::vector<double> total(sp.corpus.vocab.size(), 0.0);
  for (std::size_t p = 0; p < counts.size(); ++p) total[sp.pair_e[p]] += counts[p];
  for (std::size_t p = 0; p < counts.size(); ++p) {
    const double z = total[sp.pair_e[p]];
    // A row that received no mass keeps its previous distribution.
    if (z > 0) t[p] = counts[p] / z;
  }
}

}  // namespace detail

// Constrained IBM Model 1. The alignment prior is uniform over the allowed
// generating positions of each word, which leaves the EM updates unchanged.
inline TranslationTable train_ibm1(std::shared_ptr<const AlignmentSpace> space, std::size_t iterations,
                                   EmTrace* trace = nullptr) {
  if (iterations < 1) throw ConfigError("ibm1 iterations must be >= 1");
  TranslationTable table = uniform_table(space);
  std::vector<double> t = table.values();
  const auto& sp = *space;
  auto e_step = [&](std::vector<double>* counts) {
    double ll = 0;
    for (std::size_t s = 0; s < sp.links.size(); ++s) {
      for (const auto& links : sp.links[s]) {
        double z = 0;
        for (const auto& l : links) z += t[l.pair];
        ll += std::log(z / static_cast<double>(links.size()));
        if (counts)
          for (const auto& l : links) (*counts)[l.pair] += t[l.pair] / z;
      }
    }
    return ll;
  };
  for (std::size_t it = 0; it < iterations; ++it) {
    std::vector<double> counts(t.size(), 0.0);
    const double ll = e_step(&counts);
    if (trace) trace->log_likelihood.push_back(ll);
    detail::normalize_rows(sp, counts, t);
  }
  if (trace) trace->log_likelihood.push_back(e_step(nullptr));
  return TranslationTable(std::move(space), std::move(t));
}

struct Ibm2Model {
  TranslationTable t;
  DistortionTable a;
};

// Constrained IBM Model 2 initialized from a Model 1 table, with a uniform
// distortion table over the non-self positions.
inline Ibm2Model train_ibm2(const TranslationTable& init, std::size_t iterations, EmTrace* trace = nullptr) {
  const auto& sp = init.space();
  std::vector<double> t = init.values();
  DistortionTable a;
  for (std::size_t s = 0; s < sp.links.size(); ++s) {
    const std::size_t l = sp.corpus.sentences[s].size();
    for (std::size_t j = 0; j < l; ++j) a.row(j, l);
  }
  auto e_step = [&](std::vector<double>* counts, std::map<std::pair<std::size_t, std::size_t>, std::vector<double>>* acounts) {
    double ll = 0;
    for (std::size_t s = 0; s < sp.links.size(); ++s) {
      const std::size_t l = sp.corpus.sentences[s].size();
      for (std::size_t j = 0; j < l; ++j) {
        const auto& links = sp.links[s][j];
        const auto& arow = a.row(j, l);
        double z = 0;
        for (const auto& lk : links) z += arow[lk.i] * t[lk.pair];
        ll += std::log(z);
        if (!counts) continue;
        auto& ac = (*acounts)[{l, j}];
        if (ac.empty()) ac.assign(l + 1, 0.0);
        for (const auto& lk : links) {
          const double p = arow[lk.i] * t[lk.pair] / z;
          (*counts)[lk.pair] += p;
          ac[lk.i] += p;
        }
      }
    }
    return ll;
  };
  for (std::size_t it = 0; it < iterations; ++it) {
    std::vector<double> counts(t.size(), 0.0);
    std::map<std::pair<std::size_t, std::size_t>, std::vector<double>> acounts;
    const double ll = e_step(&counts, &acounts);
    if (trace) trace->log_likelihood.push_back(ll);
    detail::normalize_rows(sp, counts, t);
    for (auto& [lj, c] : acounts) {
      double z = 0;
      for (double v : c) z += v;
      auto& row = a.row(lj.second, lj.first);
      if (z > 0)
        for (std::size_t i = 0; i < c.size(); ++i) row[i] = c[i] / z;
    }
  }
  if (trace) trace->log_likelihood.push_back(e_step(nullptr, nullptr));
  return {TranslationTable(init.space_ptr(), std::move(t)), std::move(a)};
}

// Most probable generating position for every word (0 = NULL); ties take
// the smallest position. Pass no distortion table for Model 1.
inline std::vector<std::vector<std::uint32_t>> viterbi_alignments(const TranslationTable& table,
                                                                  const DistortionTable* a = nullptr) {
  const auto& sp = table.space();
  const auto& t = table.values();
  std::vector<std::vector<std::uint32_t>> out(sp.links.size());
  for (std::size_t s = 0; s < sp.links.size(); ++s) {
    const std::size_t l = sp.corpus.sentences[s].size();
    for (std::size_t j = 0; j < l; ++j) {
      double best = -1;
      std::uint32_t arg = 0;
      for (const auto& lk : sp.links[s][j]) {
        const double p = t[lk.pair] * (a ? a->prob(lk.i, j, l) : 1.0);
        if (p > best) best = p, arg = lk.i;
      }
      out[s].push_back(arg);
    }
  }
  return out;
}

}  // namespace opmin::tba
