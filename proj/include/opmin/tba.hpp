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

// Translation-based extraction: multiword grouping, constrained alignment,
// associations, relevance and a random walk yield a confidence per noun
// candidate; a threshold on that confidence selects the aspects.

#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "opmin/common.hpp"
#include "opmin/corpus.hpp"
#include "opmin/extraction.hpp"
#include "opmin/tba/alignment.hpp"
#include "opmin/tba/graph.hpp"
#include "opmin/tba/grouping.hpp"

namespace opmin {

enum class AlignmentModel { kIbm1, kIbm2 };
enum class AssociationSource { kTable, kViterbi };
enum class ConfidenceScale {
  kWalkRaw,        // walk output as is
  kWalkTimesFreq,  // walk output times candidate corpus frequency
  kWalkMeanOneTimesFreq,  // walk output rescaled to mean 1, times frequency
};

inline ConfidenceScale confidence_scale_from_string(const std::string& s) {
  if (s == "walk_raw") return ConfidenceScale::kWalkRaw;
  if (s == "walk_times_freq") return ConfidenceScale::kWalkTimesFreq;
  if (s == "walk_mean1_times_freq") return ConfidenceScale::kWalkMeanOneTimesFreq;
  throw ConfigError("unknown confidence_scale '" + s + "'");
}

inline const char* to_string(ConfidenceScale s) {
  switch (s) {
    case ConfidenceScale::kWalkRaw: return "walk_raw";
    case ConfidenceScale::kWalkTimesFreq: return "walk_times_freq";
    case ConfidenceScale::kWalkMeanOneTimesFreq: return "walk_mean1_times_freq";
  }
  return "unknown";
}

struct TbaConfig {
  tba::GroupingConfig grouping{};
  AlignmentModel model = AlignmentModel::kIbm2;
  std::size_t ibm1_iterations = 5;
  std::size_t ibm2_iterations = 5;
  tba::TypeKey type_key = tba::TypeKey::kLemma;
  AssociationSource association_source = AssociationSource::kTable;
  tba::WalkParams walk{};
  ConfidenceScale confidence_scale = ConfidenceScale::kWalkTimesFreq;
  std::shared_ptr<const tba::DfTable> df;  // null: relevance from tf alone

  void validate() const {
    grouping.validate();
    walk.validate();
    if (ibm1_iterations < 1) throw ConfigError("ibm1 iterations must be >= 1");
  }
};

struct TbaCandidate {
  std::string term;
  std::string type;
  std::size_t frequency = 0;
  double relevance = 0.0;
  double walk = 0.0;
  double confidence = 0.0;
  std::vector<std::string> sentences;
};

// Everything up to, but excluding, the threshold.
struct TbaModel {
  std::string corpus;
  std::vector<tba::RankedTerm> groups;
  std::vector<TbaCandidate> candidates;  // confidence descending, then term
  std::vector<std::string> opinions;
  tba::EmTrace ibm1_trace;
  tba::EmTrace ibm2_trace;
  tba::WalkResult walk;
};

namespace detail {

inline tba::Matrix viterbi_associations(const tba::AlignmentSpace& sp,
                                        const std::vector<std::vector<std::uint32_t>>& alignment,
                                        const std::vector<std::uint32_t>& candidates,
                                        const std::vector<std::uint32_t>& opinions,
                                        const std::vector<std::size_t>& type_freq) {
  std::map<std::uint32_t, std::size_t> cand_index, op_index;
  for (std::size_t i = 0; i < candidates.size(); ++i) cand_index[candidates[i]] = i;
  for (std::size_t i = 0; i < opinions.size(); ++i) op_index[opinions[i]] = i;
  tba::Matrix co(candidates.size(), std::vector<double>(opinions.size(), 0.0));
  for (std::size_t s = 0; s < alignment.size(); ++s) {
    const auto& w = sp.corpus.sentences[s];
    for (std::size_t j = 0; j < w.size(); ++j) {
      const std::uint32_t i = alignment[s][j];
      if (i == 0) continue;
      const std::uint32_t f = w[j], e = w[i - 1];
      if (cand_index.count(f) && op_index.count(e)) co[cand_index[f]][op_index[e]] += 1;
      if (cand_index.count(e) && op_index.count(f)) co[cand_index[e]][op_index[f]] += 1;
    }
  }
  tba::Matrix out = co;
  for (std::size_t c = 0; c < candidates.size(); ++c)
    for (std::size_t o = 0; o < opinions.size(); ++o)
      out[c][o] = tba::harmonic_mean(co[c][o] / static_cast<double>(type_freq[candidates[c]]),
                                     co[c][o] / static_cast<double>(type_freq[opinions[o]]));
  return out;
}

}  // namespace detail

inline TbaModel build_tba_model(const Corpus& corpus, const TbaConfig& config) {
  config.validate();
  if (corpus.empty()) throw DataError("tba: empty corpus");
  TbaModel model;
  model.corpus = corpus.name;
  model.groups = tba::select_groups(tba::cvalue_rank(corpus, config.grouping), config.grouping);
  const Corpus grouped = tba::group_terms(corpus, model.groups);

  auto space = tba::make_alignment_space(tba::build_alignment_corpus(grouped, config.type_key));
  const auto& ac = space->corpus;
  tba::TranslationTable table = tba::train_ibm1(space, config.ibm1_iterations, &model.ibm1_trace);
  std::optional<tba::DistortionTable> distortion;
  if (config.model == AlignmentModel::kIbm2) {
    auto m2 = tba::train_ibm2(table, config.ibm2_iterations, &model.ibm2_trace);
    table = std::move(m2.t);
    distortion = std::move(m2.a);
  }

  // Type statistics over the grouped corpus.
  std::vector<std::size_t> freq(ac.vocab.size(), 0);
  std::vector<std::map<std::string, std::size_t>> surfaces(ac.vocab.size());
  std::vector<std::set<std::size_t>> sentences(ac.vocab.size());
  for (std::size_t s = 0; s < ac.sentences.size(); ++s)
    for (std::size_t j = 0; j < ac.sentences[s].size(); ++j) {
      const auto w = ac.sentences[s][j];
      ++freq[w];
      ++surfaces[w][text::to_lower(grouped.sentences[s].tokens[ac.positions[s][j]].surface)];
      sentences[w].insert(s);
    }

  std::vector<std::uint32_t> cand_ids, op_ids;
  for (std::uint32_t w = 1; w < ac.vocab.size(); ++w) {
    if (ac.word_class[w] == pos::WordClass::kNoun) cand_ids.push_back(w);
    if (ac.word_class[w] == pos::WordClass::kAdjective) op_ids.push_back(w);
  }
  for (auto o : op_ids) model.opinions.push_back(ac.vocab[o]);

  tba::Matrix assoc;
  if (config.association_source == AssociationSource::kTable) {
    assoc = tba::associations(table, cand_ids, op_ids);
  } else {
    auto alignment = tba::viterbi_alignments(table, distortion ? &*distortion : nullptr);
    assoc = detail::viterbi_associations(*space, alignment, cand_ids, op_ids, freq);
  }

  std::vector<std::size_t> tf;
  std::vector<std::string> types;
  for (auto c : cand_ids) {
    tf.push_back(freq[c]);
    types.push_back(ac.vocab[c]);
  }
  const auto r = config.df ? tba::relevance(tf, types, *config.df) : tba::relevance(tf);
  model.walk = tba::random_walk(tba::transition_matrix(assoc), r, config.walk);

  double mean = 0;
  for (double c : model.walk.confidence) mean += c;
  mean = cand_ids.empty() ? 0.0 : mean / static_cast<double>(cand_ids.size());
  for (std::size_t i = 0; i < cand_ids.size(); ++i) {
    const auto w = cand_ids[i];
    TbaCandidate c;
    c.type = ac.vocab[w];
    std::size_t best = 0;
    for (const auto& [surface, n] : surfaces[w])
      if (n > best) c.term = surface, best = n;
    c.frequency = freq[w];
    c.relevance = r[i];
    c.walk = model.walk.confidence[i];
    switch (config.confidence_scale) {
      case ConfidenceScale::kWalkRaw: c.confidence = c.walk; break;
      case ConfidenceScale::kWalkTimesFreq: c.confidence = c.walk * static_cast<double>(c.frequency); break;
      case ConfidenceScale::kWalkMeanOneTimesFreq:
        c.confidence = (mean > 0 ? c.walk / mean : 0.0) * static_cast<double>(c.frequency);
        break;
    }
    for (auto s : sentences[w]) c.sentences.push_back(corpus.sentences[s].id);
    model.candidates.push_back(std::move(c));
  }
  std::sort(model.candidates.begin(), model.candidates.end(), [](const TbaCandidate& a, const TbaCandidate& b) {
    if (a.confidence != b.confidence) return a.confidence > b.confidence;
    return a.term < b.term;
  });
  return model;
}

// Candidates with confidence strictly above `threshold`; all of them when
// no threshold is given.
inline ExtractionResult extract_tba(const TbaModel& model, std::optional<double> threshold) {
  ExtractionResult r;
  r.algorithm = "tba";
  r.corpus = model.corpus;
  std::set<std::string> seen;
  for (const auto& c : model.candidates) {
    if (threshold && !(c.confidence > *threshold)) continue;
    if (!seen.insert(c.term).second) continue;
    AspectCandidate a;
    a.term = c.term;
    a.kind = AspectKind::kTranslation;
    a.support = c.frequency;
    a.provenance = c.sentences;
    a.confidence = c.confidence;
    r.aspects.push_back(std::move(a));
  }
  return r;
}

inline ExtractionResult extract_tba(const Corpus& corpus, const TbaConfig& config,
                                    std::optional<double> threshold = std::nullopt) {
  return extract_tba(build_tba_model(corpus, config), threshold);
}

}  // namespace opmin
