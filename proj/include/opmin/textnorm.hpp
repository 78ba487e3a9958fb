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

// Term normalization shared by the extractors: stemming, Levenshtein ratio
// similarity and complete-linkage fuzzy clustering of stems.

#pragma once

#include <algorithm>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <numeric>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "opmin/common.hpp"
#include "opmin/porter.hpp"

namespace opmin {

// How two terms are judged equal.
enum class Matching { kSurface, kStem, kFuzzy };

inline const char* to_string(Matching m) {
  switch (m) {
    case Matching::kSurface: return "surface";
    case Matching::kStem: return "stem";
    case Matching::kFuzzy: return "fuzzy";
  }
  return "unknown";
}

inline Matching matching_from_string(const std::string& s) {
  if (s == "surface") return Matching::kSurface;
  if (s == "stem") return Matching::kStem;
  if (s == "fuzzy") return Matching::kFuzzy;
  throw ConfigError("unknown matching mode '" + s + "'");
}

enum class StemAlgorithm { kPorter, kLemma };

inline std::string stem(std::string_view word, StemAlgorithm algorithm, std::string_view lemma = {}) {
  if (algorithm == StemAlgorithm::kLemma) return text::to_lower(lemma.empty() ? word : lemma);
  return porter_stem(text::to_lower(word));
}

template <class Seq>
std::size_t levenshtein_distance(const Seq& a, const Seq& b) {
  const std::size_t n = a.size(), m = b.size();
  std::vector<std::size_t> prev(m + 1), cur(m + 1);
  std::iota(prev.begin(), prev.end(), std::size_t{0});
  for (std::size_t i = 1; i <= n; ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= m; ++j) {
      std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
    }
    std::swap(prev, cur);
  }
  return prev[m];
}

// 1 - distance / max(|a|, |b|); ratio("", "") == 1.
inline double levenshtein_ratio(std::string_view a, std::string_view b) {
  const std::size_t longest = std::max(a.size(), b.size());
  if (longest == 0) return 1.0;
  return 1.0 - static_cast<double>(levenshtein_distance(a, b)) / static_cast<double>(longest);
}

struct FuzzyParams {
  double min_sim = 0.8;
  // Stems shorter than this are never merged.
  std::size_t min_length = 3;

  void validate() const {
    if (!(min_sim > 0.0 && min_sim <= 1.0)) throw ConfigError("min_sim must lie in (0, 1]");
  }
};

struct OriginalRef {
  std::string surface;
  std::size_t sentence = 0;
  std::size_t position = 0;

  auto operator<=>(const OriginalRef&) const = default;
};

// Maps stems to flat clusters and clusters back to the surface forms they
// were built from.
class StemIndex {
 public:
  using ClusterId = std::size_t;

  std::size_t cluster_count() const { return representative_.size(); }

  bool contains(std::string_view stem) const { return cluster_of_.count(std::string(stem)) > 0; }

  ClusterId cluster_of(std::string_view stem) const {
    auto it = cluster_of_.find(std::string(stem));
    if (it == cluster_of_.end()) throw std::out_of_range("stem not clustered: " + std::string(stem));
    return it->second;
  }

  const std::string& representative(ClusterId id) const { return representative_.at(id); }

  // Canonical stem for `stem`; unknown stems map to themselves.
  std::string canonical(std::string_view stem) const {
    auto it = cluster_of_.find(std::string(stem));
    return it == cluster_of_.end() ? std::string(stem) : representative_[it->second];
  }

  const std::vector<std::string>& members(ClusterId id) const { return members_.at(id); }

  void add_original(std::string_view stem, OriginalRef ref) {
    originals_[cluster_of(stem)].insert(std::move(ref));
  }

  const std::multiset<OriginalRef>& originals(ClusterId id) const {
    static const std::multiset<OriginalRef> kEmpty;
    auto it = originals_.find(id);
    return it == originals_.end() ? kEmpty : it->second;
  }

  // Most frequent original surface form of the cluster; lexicographic tie-break.
  std::string most_frequent_original(ClusterId id) const {
    std::map<std::string, std::size_t> counts;
    for (const auto& ref : originals(id)) ++counts[ref.surface];
    std::string best;
    std::size_t best_count = 0;
    for (const auto& [surface, count] : counts)
      if (count > best_count) best = surface, best_count = count;
    return best.empty() ? representative(id) : best;
  }

 private:
  template <class Range>
  friend StemIndex cluster_terms(const Range& stems, const FuzzyParams& params);

  std::unordered_map<std::string, ClusterId> cluster_of_;
  std::vector<std::string> representative_;
  std::vector<std::vector<std::string>> members_;
  std::map<ClusterId, std::multiset<OriginalRef>> originals_;
};

namespace detail {

// Complete-linkage agglomeration of the items in `component` (indices into
// `words`), cut at `max_dist`. Ties merge the lowest index pair first.
inline std::vector<std::vector<std::size_t>> complete_linkage(const std::vector<std::size_t>& component,
                                                              const std::vector<std::vector<double>>& dist,
                                                              double max_dist) {
  std::vector<std::vector<std::size_t>> clusters;
  for (std::size_t c : component) clusters.push_back({c});
  const std::size_t n = clusters.size();
  // linkage[a][b] holds the complete-linkage distance between live clusters.
  std::vector<std::vector<double>> linkage(n, std::vector<double>(n, 0.0));
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) linkage[a][b] = dist[component[a]][component[b]];
  std::vector<bool> alive(n, true);
  for (;;) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t ba = n, bb = n;
    for (std::size_t a = 0; a < n; ++a) {
      if (!alive[a]) continue;
      for (std::size_t b = a + 1; b < n; ++b) {
        if (!alive[b]) continue;
        if (linkage[a][b] < best) best = linkage[a][b], ba = a, bb = b;
      }
    }
    if (ba == n || best > max_dist) break;
    clusters[ba].insert(clusters[ba].end(), clusters[bb].begin(), clusters[bb].end());
    clusters[bb].clear();
    alive[bb] = false;
    for (std::size_t c = 0; c < n; ++c) {
      if (!alive[c] || c == ba) continue;
      double d = std::max(linkage[ba][c], linkage[bb][c]);
      linkage[ba][c] = linkage[c][ba] = d;
    }
  }
  std::vector<std::vector<std::size_t>> out;
  for (std::size_t a = 0; a < n; ++a)
    if (alive[a]) {
      std::sort(clusters[a].begin(), clusters[a].end());
      out.push_back(std::move(clusters[a]));
    }
  return out;
}

}  // namespace detail

// Flat complete-linkage clusters of the distinct stems under
// d = 1 - levenshtein_ratio, cut so that every intra-cluster pairwise
// distance is <= 1 - min_sim. `stems` is a multiset: multiplicities decide
// the representative (most frequent member, lexicographic tie-break).
//
// Complete linkage never merges across components of the graph whose edges
// are pairs with d <= cut, so each component is agglomerated on its own.
template <class Range>
StemIndex cluster_terms(const Range& stems, const FuzzyParams& params) {
  params.validate();
  std::map<std::string, std::size_t> counts;
  for (const auto& s : stems) ++counts[std::string(s)];
  std::vector<std::string> words;
  words.reserve(counts.size());
  for (const auto& [w, c] : counts) words.push_back(w);
  const std::size_t n = words.size();
  const double max_dist = 1.0 - params.min_sim + 1e-12;

  // Sparse threshold graph; only stems of mergeable length take part.
  std::vector<std::vector<std::size_t>> adjacency(n);
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  for (std::size_t a = 0; a < n; ++a) {
    if (words[a].size() < params.min_length) continue;
    for (std::size_t b = a + 1; b < n; ++b) {
      if (words[b].size() < params.min_length) continue;
      // The length difference bounds the edit distance from below.
      std::size_t la = words[a].size(), lb = words[b].size();
      double lower = static_cast<double>(la > lb ? la - lb : lb - la) / static_cast<double>(std::max(la, lb));
      if (lower > max_dist) continue;
      if (1.0 - levenshtein_ratio(words[a], words[b]) <= max_dist) {
        adjacency[a].push_back(b);
        adjacency[b].push_back(a);
      }
    }
  }

  StemIndex index;
  std::vector<bool> seen(n, false);
  std::vector<std::vector<std::size_t>> flat;
  for (std::size_t start = 0; start < n; ++start) {
    if (seen[start]) continue;
    std::vector<std::size_t> component{start};
    seen[start] = true;
    for (std::size_t k = 0; k < component.size(); ++k)
      for (std::size_t nb : adjacency[component[k]])
        if (!seen[nb]) seen[nb] = true, component.push_back(nb);
    std::sort(component.begin(), component.end());
    if (component.size() == 1) {
      flat.push_back(component);
      continue;
    }
    // Dense distances only for the (small) component.
    std::vector<std::vector<double>> local_dist(component.size(), std::vector<double>(component.size(), 0.0));
    for (std::size_t x = 0; x < component.size(); ++x)
      for (std::size_t y = x + 1; y < component.size(); ++y)
        local_dist[x][y] = local_dist[y][x] = 1.0 - levenshtein_ratio(words[component[x]], words[component[y]]);
    std::vector<std::size_t> ids(component.size());
    std::iota(ids.begin(), ids.end(), std::size_t{0});
    for (auto& cluster : detail::complete_linkage(ids, local_dist, max_dist)) {
      for (auto& m : cluster) m = component[m];
      flat.push_back(std::move(cluster));
    }
  }
  std::sort(flat.begin(), flat.end());
  for (const auto& cluster : flat) {
    const std::size_t id = index.representative_.size();
    std::vector<std::string> members;
    std::string rep;
    std::size_t rep_count = 0;
    for (std::size_t m : cluster) {
      members.push_back(words[m]);
      index.cluster_of_[words[m]] = id;
      if (counts[words[m]] > rep_count) rep = words[m], rep_count = counts[words[m]];
    }
    index.representative_.push_back(rep);
    index.members_.push_back(std::move(members));
  }
  return index;
}

// One word per line; blank lines and '#' comments are skipped.
inline std::set<std::string> load_word_list(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open word list '" + path.string() + "'");
  std::set<std::string> words;
  std::string line;
  while (std::getline(in, line)) {
    auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    std::string w = text::to_lower(text::trim(line));
    if (!w.empty()) words.insert(w);
  }
  return words;
}

}  // namespace opmin
