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

// Frequent itemset mining over sentence transactions: level-wise Apriori
// and an exhaustive enumerator used as its test oracle.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "opmin/common.hpp"

namespace opmin {

template <class Item>
struct BasicTransaction {
  std::size_t sentence = 0;
  std::vector<Item> items;  // sorted, unique

  static BasicTransaction make(std::size_t sentence, std::vector<Item> items) {
    std::sort(items.begin(), items.end());
    items.erase(std::unique(items.begin(), items.end()), items.end());
    return {sentence, std::move(items)};
  }
};

using Transaction = BasicTransaction<std::string>;

template <class Item>
using Itemset = std::vector<Item>;  // sorted, unique

template <class Item>
using ItemsetCounts = std::map<Itemset<Item>, std::size_t>;

struct MiningParams {
  double min_sup = 0.01;
  std::size_t max_size = 3;
  // false: support >= ceil(min_sup * N); true: support > floor(min_sup * N).
  bool strict_gt = false;

  void validate() const {
    if (!(min_sup > 0.0 && min_sup <= 1.0)) throw ConfigError("min_sup must lie in (0, 1]");
    if (max_size < 1) throw ConfigError("max_size must be >= 1");
  }

  // Smallest support count that qualifies as frequent among n transactions.
  std::size_t min_count(std::size_t n) const {
    // The epsilon keeps e.g. 0.01 * 300 from rounding up to 4.
    const double scaled = min_sup * static_cast<double>(n);
    std::size_t threshold = strict_gt ? static_cast<std::size_t>(std::floor(scaled + 1e-9)) + 1
                                      : static_cast<std::size_t>(std::ceil(scaled - 1e-9));
    return std::max<std::size_t>(threshold, 1);
  }
};

namespace detail {

// Items are interned to dense ids in sorted order so ids compare like items.
template <class Item>
struct Interned {
  std::vector<Item> items;
  std::vector<std::vector<std::uint32_t>> rows;
};

template <class Item>
Interned<Item> intern(const std::vector<BasicTransaction<Item>>& transactions) {
  Interned<Item> out;
  std::set<Item> universe;
  for (const auto& t : transactions) universe.insert(t.items.begin(), t.items.end());
  out.items.assign(universe.begin(), universe.end());
  for (const auto& t : transactions) {
    std::vector<std::uint32_t> row;
    row.reserve(t.items.size());
    for (const auto& item : t.items) {
      auto it = std::lower_bound(out.items.begin(), out.items.end(), item);
      row.push_back(static_cast<std::uint32_t>(it - out.items.begin()));
    }
    std::sort(row.begin(), row.end());
    row.erase(std::unique(row.begin(), row.end()), row.end());
    out.rows.push_back(std::move(row));
  }
  return out;
}

inline std::size_t binomial(std::size_t n, std::size_t k) {
  if (k > n) return 0;
  std::size_t r = 1;
  for (std::size_t i = 1; i <= k; ++i) {
    r = r * (n - k + i) / i;
    if (r > (std::size_t{1} << 40)) return r;
  }
  return r;
}

// Calls fn on every k-combination of `row`, in lexicographic order.
template <class Fn>
void for_each_combination(const std::vector<std::uint32_t>& row, std::size_t k, Fn&& fn) {
  std::vector<std::size_t> idx(k);
  for (std::size_t i = 0; i < k; ++i) idx[i] = i;
  std::vector<std::uint32_t> combo(k);
  for (;;) {
    for (std::size_t i = 0; i < k; ++i) combo[i] = row[idx[i]];
    fn(combo);
    std::size_t i = k;
    while (i > 0 && idx[i - 1] == row.size() - k + i - 1) --i;
    if (i == 0) return;
    ++idx[i - 1];
    for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
}

template <class Item>
Itemset<Item> materialize(const std::vector<std::uint32_t>& ids, const std::vector<Item>& items) {
  Itemset<Item> out;
  out.reserve(ids.size());
  for (auto id : ids) out.push_back(items[id]);
  return out;
}

}  // namespace detail

// All itemsets of size <= max_size whose support count (transactions that
// contain the itemset) reaches params.min_count(N).
template <class Item>
ItemsetCounts<Item> apriori(const std::vector<BasicTransaction<Item>>& transactions, const MiningParams& params) {
  params.validate();
  if (transactions.empty()) throw DataError("apriori: no transactions");
  const auto data = detail::intern(transactions);
  const std::size_t threshold = params.min_count(transactions.size());
  using Ids = std::vector<std::uint32_t>;

  ItemsetCounts<Item> result;
  std::vector<std::size_t> single(data.items.size(), 0);
  for (const auto& row : data.rows)
    for (auto id : row) ++single[id];
  std::vector<Ids> level;
  for (std::uint32_t id = 0; id < single.size(); ++id) {
    if (single[id] >= threshold) {
      level.push_back({id});
      result.emplace(Itemset<Item>{data.items[id]}, single[id]);
    }
  }

  for (std::size_t k = 2; k <= params.max_size && level.size() >= 2; ++k) {
    // Join step: (k-1)-itemsets sharing their first k-2 items.
    std::set<Ids> frequent_prev(level.begin(), level.end());
    std::vector<Ids> candidates;
    for (std::size_t a = 0; a < level.size(); ++a) {
      for (std::size_t b = a + 1; b < level.size(); ++b) {
        if (!std::equal(level[a].begin(), level[a].end() - 1, level[b].begin())) break;
        Ids cand = level[a];
        cand.push_back(level[b].back());
        // Prune step: every (k-1)-subset must be frequent.
        bool ok = true;
        for (std::size_t drop = 0; drop + 2 < cand.size() && ok; ++drop) {
          Ids sub;
          sub.reserve(k - 1);
          for (std::size_t i = 0; i < cand.size(); ++i)
            if (i != drop) sub.push_back(cand[i]);
          ok = frequent_prev.count(sub) > 0;
        }
        if (ok) candidates.push_back(std::move(cand));
      }
    }
    if (candidates.empty()) break;
    std::vector<std::size_t> counts(candidates.size(), 0);
    std::map<Ids, std::size_t> candidate_index;
    for (std::size_t c = 0; c < candidates.size(); ++c) candidate_index.emplace(candidates[c], c);
    for (const auto& row : data.rows) {
      if (row.size() < k) continue;
      if (detail::binomial(row.size(), k) <= candidates.size()) {
        detail::for_each_combination(row, k, [&](const Ids& combo) {
          auto it = candidate_index.find(combo);
          if (it != candidate_index.end()) ++counts[it->second];
        });
      } else {
        for (std::size_t c = 0; c < candidates.size(); ++c)
          if (std::includes(row.begin(), row.end(), candidates[c].begin(), candidates[c].end())) ++counts[c];
      }
    }
    std::vector<Ids> next;
    for (std::size_t c = 0; c < candidates.size(); ++c) {
      if (counts[c] >= threshold) {
        result.emplace(detail::materialize(candidates[c], data.items), counts[c]);
        next.push_back(std::move(candidates[c]));
      }
    }
    level = std::move(next);  // already in lexicographic order
  }
  return result;
}

inline constexpr std::size_t kBruteForceMaxItems = 20;

// Exhaustive oracle with the same contract as apriori(). Refuses item
// universes larger than `max_items`.
template <class Item>
ItemsetCounts<Item> bruteforce_itemsets(const std::vector<BasicTransaction<Item>>& transactions,
                                        const MiningParams& params,
                                        std::size_t max_items = kBruteForceMaxItems) {
  params.validate();
  if (transactions.empty()) throw DataError("bruteforce_itemsets: no transactions");
  const auto data = detail::intern(transactions);
  const std::size_t n = data.items.size();
  if (n > max_items || n >= 63)
    throw DataError("bruteforce_itemsets: item universe of " + std::to_string(n) + " exceeds the limit of " +
                    std::to_string(max_items));
  const std::size_t threshold = params.min_count(transactions.size());
  std::vector<std::uint64_t> masks;
  for (const auto& row : data.rows) {
    std::uint64_t m = 0;
    for (auto id : row) m |= std::uint64_t{1} << id;
    masks.push_back(m);
  }
  ItemsetCounts<Item> result;
  for (std::uint64_t subset = 1; subset < (std::uint64_t{1} << n); ++subset) {
    const auto size = static_cast<std::size_t>(__builtin_popcountll(subset));
    if (size > params.max_size) continue;
    std::size_t support = 0;
    for (auto m : masks)
      if ((m & subset) == subset) ++support;
    if (support < threshold) continue;
    Itemset<Item> items;
    for (std::size_t i = 0; i < n; ++i)
      if (subset & (std::uint64_t{1} << i)) items.push_back(data.items[i]);
    result.emplace(std::move(items), support);
  }
  return result;
}

}  // namespace opmin
