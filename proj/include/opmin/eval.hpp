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

// Type-level precision, recall and F1 of extracted aspect terms against the
// gold aspects of a corpus.

#pragma once

#include <algorithm>
#include <cstdio>
#include <map>
#include <set>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include <json.hpp>

#include "opmin/common.hpp"
#include "opmin/corpus.hpp"
#include "opmin/extraction.hpp"
#include "opmin/textnorm.hpp"

namespace opmin {

struct EvalConfig {
  Matching matching = Matching::kSurface;
  double min_sim = 0.8;  // fuzzy only
  // Gold aspects carrying any of these flags are ignored.
  std::set<std::string> exclude_flags;

  void validate() const {
    if (matching == Matching::kFuzzy && !(min_sim > 0.0 && min_sim <= 1.0))
      throw ConfigError("eval min_sim must lie in (0, 1]");
    for (const auto& f : exclude_flags)
      if (!gold_flag_names().count(f)) throw ConfigError("unknown gold flag '" + f + "'");
  }
};

struct EvalReport {
  std::string algorithm;
  std::string corpus;
  EvalConfig config;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t extracted = 0;  // |E|
  std::size_t gold = 0;       // |G|
  std::vector<std::pair<std::string, std::string>> matched;  // (extracted, gold)
  std::vector<std::string> missed;
  std::vector<std::string> spurious;
};

inline double f1_score(double p, double r) { return p + r > 0 ? 2 * p * r / (p + r) : 0.0; }

// Key under which two terms count as the same type.
inline std::string match_key(const std::string& term, Matching m) {
  std::string t = term;
  std::replace(t.begin(), t.end(), '_', ' ');
  t = text::normalize_term(t);
  if (m != Matching::kStem) return t;
  std::vector<std::string> words;
  for (const auto& w : text::split_ws(t)) words.push_back(porter_stem(w));
  return text::join(words, " ");
}

inline std::set<std::string> gold_terms(const Corpus& corpus, const EvalConfig& config = {}) {
  std::set<std::string> out;
  for (const auto& s : corpus.sentences)
    for (const auto& a : s.gold.aspects) {
      bool skip = false;
      for (const auto& f : a.flags) skip = skip || config.exclude_flags.count(f) > 0;
      if (!skip) out.insert(a.term);
    }
  return out;
}

// Core comparison of two term lists; duplicates and spelling variants that
// share a key collapse to one type.
inline EvalReport evaluate_terms(const std::vector<std::string>& extracted, const std::set<std::string>& gold,
                                 const EvalConfig& config) {
  config.validate();
  // key -> lexicographically first original term
  auto keyed = [&](const auto& terms) {
    std::map<std::string, std::string> out;
    for (const auto& t : terms) {
      auto k = match_key(t, config.matching);
      if (k.empty()) continue;
      auto [it, fresh] = out.emplace(k, text::normalize_term(t));
      if (!fresh) it->second = std::min(it->second, text::normalize_term(t));
    }
    return out;
  };
  const auto e = keyed(extracted);
  const auto g = keyed(gold);

  EvalReport rep;
  rep.config = config;
  rep.extracted = e.size();
  rep.gold = g.size();
  std::set<std::string> e_used, g_used;
  if (config.matching == Matching::kFuzzy) {
    std::vector<std::tuple<double, std::string, std::string>> pairs;
    for (const auto& [ek, ev] : e)
      for (const auto& [gk, gv] : g) {
        const double r = levenshtein_ratio(ek, gk);
        if (r >= config.min_sim) pairs.emplace_back(r, ek, gk);
      }
    std::sort(pairs.begin(), pairs.end(), [](const auto& a, const auto& b) {
      if (std::get<0>(a) != std::get<0>(b)) return std::get<0>(a) > std::get<0>(b);
      return std::tie(std::get<1>(a), std::get<2>(a)) < std::tie(std::get<1>(b), std::get<2>(b));
    });
    for (const auto& [r, ek, gk] : pairs) {
      if (e_used.count(ek) || g_used.count(gk)) continue;
      e_used.insert(ek);
      g_used.insert(gk);
      rep.matched.emplace_back(e.at(ek), g.at(gk));
    }
  } else {
    for (const auto& [ek, ev] : e)
      if (auto it = g.find(ek); it != g.end()) {
        e_used.insert(ek);
        g_used.insert(ek);
        rep.matched.emplace_back(ev, it->second);
      }
  }
  std::sort(rep.matched.begin(), rep.matched.end());
  for (const auto& [k, v] : e)
    if (!e_used.count(k)) rep.spurious.push_back(v);
  for (const auto& [k, v] : g)
    if (!g_used.count(k)) rep.missed.push_back(v);
  std::sort(rep.spurious.begin(), rep.spurious.end());
  std::sort(rep.missed.begin(), rep.missed.end());

  const double tp = static_cast<double>(rep.matched.size());
  rep.precision = e.empty() ? 0.0 : tp / static_cast<double>(e.size());
  rep.recall = g.empty() ? 0.0 : tp / static_cast<double>(g.size());
  rep.f1 = f1_score(rep.precision, rep.recall);
  return rep;
}

inline EvalReport evaluate(const ExtractionResult& result, const Corpus& corpus, const EvalConfig& config = {}) {
  if (!corpus.has_gold()) throw DataError("corpus '" + corpus.name + "' has no gold aspects");
  auto rep = evaluate_terms(result.terms(), gold_terms(corpus, config), config);
  rep.algorithm = result.algorithm;
  rep.corpus = corpus.name;
  return rep;
}

struct AggregateReport {
  std::size_t corpora = 0;
  double precision = 0.0;  // mean of per-corpus P
  double recall = 0.0;     // mean of per-corpus R
  double f1_of_means = 0.0;
  double mean_f1 = 0.0;
};

inline AggregateReport aggregate(const std::vector<EvalReport>& reports) {
  AggregateReport a;
  a.corpora = reports.size();
  if (reports.empty()) return a;
  for (const auto& r : reports) {
    a.precision += r.precision;
    a.recall += r.recall;
    a.mean_f1 += r.f1;
  }
  const double n = static_cast<double>(reports.size());
  a.precision /= n;
  a.recall /= n;
  a.mean_f1 /= n;
  a.f1_of_means = f1_score(a.precision, a.recall);
  return a;
}

inline nlohmann::ordered_json to_json(const EvalConfig& c) {
  nlohmann::ordered_json j;
  j["matching"] = to_string(c.matching);
  if (c.matching == Matching::kFuzzy) j["min_sim"] = c.min_sim;
  j["exclude_flags"] = c.exclude_flags;
  return j;
}

inline nlohmann::ordered_json to_json(const EvalReport& r) {
  nlohmann::ordered_json j;
  j["algorithm"] = r.algorithm;
  j["corpus"] = r.corpus;
  j["config"] = to_json(r.config);
  j["precision"] = r.precision;
  j["recall"] = r.recall;
  j["f1"] = r.f1;
  j["extracted"] = r.extracted;
  j["gold"] = r.gold;
  auto m = nlohmann::ordered_json::array();
  for (const auto& [e, g] : r.matched) m.push_back({e, g});
  j["matched"] = std::move(m);
  j["missed"] = r.missed;
  j["spurious"] = r.spurious;
  return j;
}

inline nlohmann::ordered_json to_json(const AggregateReport& a) {
  nlohmann::ordered_json j;
  j["corpora"] = a.corpora;
  j["precision"] = a.precision;
  j["recall"] = a.recall;
  j["f1_of_means"] = a.f1_of_means;
  j["mean_f1"] = a.mean_f1;
  return j;
}

// Fixed-width table, one row per report plus an average row.
inline std::string format_table(const std::vector<EvalReport>& reports) {
  std::size_t width = 7;
  for (const auto& r : reports) width = std::max(width, r.corpus.size());
  std::string out;
  char buf[256];
  std::snprintf(buf, sizeof buf, "%-*s %6s %6s %6s %5s %5s %5s\n", static_cast<int>(width), "corpus", "P", "R", "F1",
                "|E|", "|G|", "TP");
  out += buf;
  for (const auto& r : reports) {
    std::snprintf(buf, sizeof buf, "%-*s %6.3f %6.3f %6.3f %5zu %5zu %5zu\n", static_cast<int>(width),
                  r.corpus.c_str(), r.precision, r.recall, r.f1, r.extracted, r.gold, r.matched.size());
    out += buf;
  }
  const auto a = aggregate(reports);
  std::snprintf(buf, sizeof buf, "%-*s %6.3f %6.3f %6.3f  (mean F1 %.3f)\n", static_cast<int>(width), "Average",
                a.precision, a.recall, a.f1_of_means, a.mean_f1);
  out += buf;
  return out;
}

}  // namespace opmin
