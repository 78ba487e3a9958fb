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

// Candidate/opinion association graph: harmonic-mean associations from a
// translation table, tf-idf relevance and the random walk that mixes them
// into candidate confidences.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "opmin/common.hpp"
#include "opmin/tba/alignment.hpp"

namespace opmin::tba {

using Matrix = std::vector<std::vector<double>>;

inline double harmonic_mean(double x, double y) {
  if (x <= 0.0 || y <= 0.0) return 0.0;
  return 2.0 * x * y / (x + y);
}

// assoc[c][o] = harmonic mean of t(o | c) and t(c | o).
inline Matrix associations(const TranslationTable& table, const std::vector<std::uint32_t>& candidates,
                           const std::vector<std::uint32_t>& opinions) {
  Matrix m(candidates.size(), std::vector<double>(opinions.size(), 0.0));
  for (std::size_t c = 0; c < candidates.size(); ++c)
    for (std::size_t o = 0; o < opinions.size(); ++o)
      m[c][o] = harmonic_mean(table.prob(candidates[c], opinions[o]), table.prob(opinions[o], candidates[c]));
  return m;
}

// Document frequencies. File format: a "#total_docs=N" header line, then
// "term<TAB>df" lines; multiword terms use single spaces.
class DfTable {
 public:
  DfTable() = default;
  explicit DfTable(std::size_t total_docs) : total_docs_(total_docs) {
    if (total_docs_ < 1) throw DataError("df table: total_docs must be >= 1");
  }

  static DfTable load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open df table '" + path.string() + "'");
    std::string line;
    std::size_t lineno = 0;
    std::optional<DfTable> table;
    while (std::getline(in, line)) {
      ++lineno;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty()) continue;
      const std::string where = path.string() + ":" + std::to_string(lineno) + ": ";
      if (line[0] == '#') {
        const std::string prefix = "#total_docs=";
        if (line.rfind(prefix, 0) == 0) {
          try {
            table = DfTable(std::stoull(line.substr(prefix.size())));
          } catch (const std::logic_error&) {
            throw DataError(where + "bad total_docs header");
          }
        }
        continue;
      }
      if (!table) throw DataError(where + "missing #total_docs header");
      auto tab = line.rfind('\t');
      if (tab == std::string::npos) throw DataError(where + "expected term<TAB>df");
      try {
        table->set(line.substr(0, tab), std::stoull(line.substr(tab + 1)));
      } catch (const std::logic_error&) {
        throw DataError(where + "bad df value");
      }
    }
    if (!table) throw DataError(path.string() + ": missing #total_docs header");
    return *table;
  }

  void set(const std::string& term, std::size_t df) { df_[text::normalize_term(term)] = df; }

  std::size_t total_docs() const { return total_docs_; }

  // Floored at 1 and clamped to total_docs. '_' in fused terms reads as a space.
  std::size_t df(std::string term) const {
    std::replace(term.begin(), term.end(), '_', ' ');
    auto it = df_.find(text::normalize_term(term));
    std::size_t d = it == df_.end() ? 1 : it->second;
    return std::clamp<std::size_t>(d, 1, total_docs_);
  }

  double idf(const std::string& term) const {
    return std::log(static_cast<double>(total_docs_) / static_cast<double>(df(term)));
  }

  std::size_t size() const { return df_.size(); }

 private:
  std::size_t total_docs_ = 1;
  std::unordered_map<std::string, std::size_t> df_;
};

// r_i proportional to tf_i * idf_i, summing to 1; uniform when every score
// is zero.
inline std::vector<double> relevance(const std::vector<std::size_t>& tf, const std::vector<std::string>& terms,
                                     const DfTable& df) {
  std::vector<double> r(tf.size(), 0.0);
  double total = 0;
  for (std::size_t i = 0; i < tf.size(); ++i) {
    r[i] = static_cast<double>(tf[i]) * df.idf(terms[i]);
    total += r[i];
  }
  if (r.empty()) return r;
  if (total <= 0) {
    std::fill(r.begin(), r.end(), 1.0 / static_cast<double>(r.size()));
    return r;
  }
  for (auto& v : r) v /= total;
  return r;
}

// Relevance when no document frequencies are available: tf alone.
inline std::vector<double> relevance(const std::vector<std::size_t>& tf) {
  std::vector<double> r(tf.size(), 0.0);
  double total = 0;
  for (auto v : tf) total += static_cast<double>(v);
  for (std::size_t i = 0; i < tf.size(); ++i)
    r[i] = total > 0 ? static_cast<double>(tf[i]) / total : 1.0 / static_cast<double>(tf.size());
  return r;
}

struct WalkParams {
  double lambda = 0.3;
  std::size_t max_iterations = 100;
  double tolerance = 1e-6;

  void validate() const {
    if (!(lambda >= 0.0 && lambda <= 1.0)) throw ConfigError("lambda must lie in [0, 1]");
  }
};

struct WalkResult {
  std::vector<double> confidence;
  std::size_t iterations = 0;
  bool converged = false;
};

// Candidate-to-candidate transition matrix through the opinion words:
// row-normalized A_row * A_col^T. Rows without associations are all zero.
inline Matrix transition_matrix(const Matrix& assoc) {
  const std::size_t n = assoc.size();
  const std::size_t m = n ? assoc[0].size() : 0;
  Matrix row_norm = assoc, col_norm = assoc;
  for (auto& row : row_norm) {
    double z = 0;
    for (double v : row) z += v;
    if (z > 0)
      for (auto& v : row) v /= z;
  }
  for (std::size_t o = 0; o < m; ++o) {
    double z = 0;
    for (std::size_t c = 0; c < n; ++c) z += col_norm[c][o];
    if (z > 0)
      for (std::size_t c = 0; c < n; ++c) col_norm[c][o] /= z;
  }
  // Only opinions with mass matter; collect them per row to stay sparse.
  std::vector<std::vector<std::pair<std::size_t, double>>> col_nz(m);
  for (std::size_t c = 0; c < n; ++c)
    for (std::size_t o = 0; o < m; ++o)
      if (col_norm[c][o] > 0) col_nz[o].emplace_back(c, col_norm[c][o]);
  Matrix out(n, std::vector<double>(n, 0.0));
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t o = 0; o < m; ++o) {
      const double w = row_norm[a][o];
      if (w == 0) continue;
      for (auto [b, v] : col_nz[o]) out[a][b] += w * v;
    }
    double z = 0;
    for (double v : out[a]) z += v;
    if (z > 0)
      for (auto& v : out[a]) v /= z;
  }
  return out;
}

// c0 = r; c <- (1 - lambda) * N c + lambda * r until the largest change is
// below tolerance or max_iterations updates were made.
inline WalkResult random_walk(const Matrix& transition, const std::vector<double>& r, const WalkParams& params) {
  params.validate();
  const std::size_t n = r.size();
  if (transition.size() != n) throw DataError("random_walk: matrix and relevance sizes differ");
  WalkResult res;
  res.confidence = r;
  std::vector<double> next(n);
  for (std::size_t it = 0; it < params.max_iterations; ++it) {
    double delta = 0;
    for (std::size_t a = 0; a < n; ++a) {
      double s = 0;
      const auto& row = transition[a];
      for (std::size_t b = 0; b < n; ++b)
        if (row[b] != 0.0) s += row[b] * res.confidence[b];
      next[a] = (1.0 - params.lambda) * s + params.lambda * r[a];
      delta = std::max(delta, std::abs(next[a] - res.confidence[a]));
    }
    res.confidence.swap(next);
    ++res.iterations;
    if (delta < params.tolerance) {
      res.converged = true;
      break;
    }
  }
  return res;
}

}  // namespace opmin::tba
