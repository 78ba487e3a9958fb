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

// Experiment configuration: one JSON document with sections fba, dba, tba
// and eval. Missing keys take their defaults, unknown keys are rejected,
// relative paths resolve against the directory of the config file.

#pragma once

#include <filesystem>
#include <fstream>
#include <limits>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "opmin/common.hpp"
#include "opmin/dba.hpp"
#include "opmin/eval.hpp"
#include "opmin/fba.hpp"
#include "opmin/tba.hpp"

namespace opmin {

using Json = nlohmann::ordered_json;

inline const Json& default_config_json() {
  static const Json j = Json::parse(R"({
    "fba": {
      "min_sup": 0.01, "max_size": 3, "strict_gt": false,
      "stemmer": "porter", "min_sim": 0.8, "min_length": 3,
      "adj_window": 3, "compact_max_gap": 3, "compact_min_sentences": 2, "min_psupport": 3,
      "compactness_pruning": true, "redundancy_pruning": true, "infrequent_features": true,
      "stopwords": null
    },
    "dba": {
      "seeds": ["good", "bad"],
      "mr_relations": ["amod", "csubj", "dobj", "iobj", "nmod", "nsubj", "prep", "xsubj"],
      "conj_relation": "conj",
      "dealer_patterns": ["compared with", "compared to", "vs", "versus", "than"],
      "dealer_window": 3, "dealer_both_sides": false,
      "q": 2, "k": 1, "min_freq": 2,
      "matching": "surface", "min_sim": 0.8,
      "tree_conjunction": false, "clause_pruning": true, "dealer_pruning": true, "cascade": true,
      "schedule": "round_robin"
    },
    "tba": {
      "grouping": "cvalue_ngram", "max_n": 4, "limit": null, "min_score": 0.0, "min_group_frequency": 2,
      "model": "ibm2", "ibm1_iterations": 5, "ibm2_iterations": 5, "type_key": "lemma",
      "association": "table", "lambda": 0.3, "k": 100, "tolerance": 1e-6,
      "confidence_scale": "walk_times_freq", "df": null, "t": null
    },
    "eval": {"matching": "surface", "min_sim": 0.8, "exclude_flags": []}
  })");
  return j;
}

struct ExperimentConfig {
  Json raw;  // effective values, every key present
  FbaConfig fba;
  DbaConfig dba;
  TbaConfig tba;
  std::optional<double> t;  // tba threshold; none keeps every candidate
  EvalConfig eval;
};

namespace detail {

class Section {
 public:
  Section(const Json& j, std::string name, std::filesystem::path base)
      : j_(j), name_(std::move(name)), base_(std::move(base)) {}

  const Json& at(const std::string& key) const { return j_.at(key); }

  [[noreturn]] void fail(const std::string& key, const std::string& what) const {
    throw ConfigError(name_ + "." + key + ": " + what);
  }

  double number(const std::string& key) const {
    if (!at(key).is_number()) fail(key, "expected a number");
    return at(key).get<double>();
  }
  std::size_t count(const std::string& key) const {
    const auto& v = at(key);
    if (v.is_number_unsigned()) return v.get<std::size_t>();
    if (v.is_number_integer() && v.get<long long>() >= 0) return static_cast<std::size_t>(v.get<long long>());
    fail(key, "expected a non-negative integer");
  }
  bool flag(const std::string& key) const {
    if (!at(key).is_boolean()) fail(key, "expected true or false");
    return at(key).get<bool>();
  }
  std::string str(const std::string& key) const {
    if (!at(key).is_string()) fail(key, "expected a string");
    return at(key).get<std::string>();
  }
  std::vector<std::string> strings(const std::string& key) const {
    const auto& v = at(key);
    if (!v.is_array()) fail(key, "expected an array of strings");
    std::vector<std::string> out;
    for (const auto& x : v) {
      if (!x.is_string()) fail(key, "expected an array of strings");
      out.push_back(x.get<std::string>());
    }
    return out;
  }
  std::filesystem::path resolve(const std::filesystem::path& p) const { return p.is_absolute() ? p : base_ / p; }
  std::filesystem::path path(const std::string& key) const { return resolve(str(key)); }

  // Wraps enum parsers so their errors name the key.
  template <class Fn>
  auto choice(const std::string& key, Fn parse) const {
    try {
      return parse(str(key));
    } catch (const ConfigError& e) {
      fail(key, e.what());
    }
  }

 private:
  const Json& j_;
  std::string name_;
  std::filesystem::path base_;
};

inline std::set<std::string> word_list_value(const Section& s, const std::string& key) {
  const auto& v = s.at(key);
  if (v.is_null()) return {};
  if (v.is_array()) {
    std::set<std::string> out;
    for (const auto& w : s.strings(key)) out.insert(text::to_lower(w));
    return out;
  }
  return load_word_list(s.path(key));
}

// seeds: ["w", ...] | "path" | {"lexicon": "path", "subset": i, "parts": n}
inline std::set<std::string> seeds_value(const Section& s) {
  const auto& v = s.at("seeds");
  if (v.is_array()) {
    std::set<std::string> out;
    for (const auto& w : s.strings("seeds")) out.insert(text::to_lower(w));
    return out;
  }
  if (v.is_string()) return lexicon_words(load_seed_lexicon(s.path("seeds")));
  if (!v.is_object() || !v.contains("lexicon")) s.fail("seeds", "expected a list, a path or {lexicon, subset, parts}");
  for (const auto& [k, x] : v.items())
    if (k != "lexicon" && k != "subset" && k != "parts") s.fail("seeds." + k, "unknown key");
  Section sub(v, "dba.seeds", std::filesystem::path{});
  auto words = lexicon_words(load_seed_lexicon(s.resolve(sub.str("lexicon"))));
  if (!v.contains("subset") || v.at("subset").is_null()) return words;
  const std::size_t parts = v.contains("parts") ? sub.count("parts") : 9;
  return lexicon_subset(words, sub.count("subset"), parts);
}

inline FbaConfig fba_from(const Section& s) {
  FbaConfig c;
  c.mining.min_sup = s.number("min_sup");
  c.mining.max_size = s.count("max_size");
  c.mining.strict_gt = s.flag("strict_gt");
  c.stem_algorithm = s.choice("stemmer", [](const std::string& v) {
    if (v == "porter") return StemAlgorithm::kPorter;
    if (v == "lemma") return StemAlgorithm::kLemma;
    throw ConfigError("unknown stemmer '" + v + "'");
  });
  c.fuzzy.min_sim = s.number("min_sim");
  c.fuzzy.min_length = s.count("min_length");
  c.adj_window = s.count("adj_window");
  c.compact_max_gap = s.count("compact_max_gap");
  c.compact_min_sentences = s.count("compact_min_sentences");
  c.min_psupport = s.count("min_psupport");
  c.compactness_pruning = s.flag("compactness_pruning");
  c.redundancy_pruning = s.flag("redundancy_pruning");
  c.infrequent_features = s.flag("infrequent_features");
  c.stopwords = word_list_value(s, "stopwords");
  c.validate();
  return c;
}

inline DbaConfig dba_from(const Section& s) {
  DbaConfig c;
  c.seeds = seeds_value(s);
  auto mr = s.strings("mr_relations");
  c.mr_relations = std::set<std::string>(mr.begin(), mr.end());
  c.conj_relation = s.str("conj_relation");
  c.dealer_patterns = s.strings("dealer_patterns");
  c.dealer_window = s.count("dealer_window");
  c.dealer_both_sides = s.flag("dealer_both_sides");
  c.q = s.count("q");
  c.k = s.count("k");
  c.min_freq = s.count("min_freq");
  c.matching = s.choice("matching", matching_from_string);
  c.fuzzy.min_sim = s.number("min_sim");
  c.tree_conjunction = s.flag("tree_conjunction");
  c.clause_pruning = s.flag("clause_pruning");
  c.dealer_pruning = s.flag("dealer_pruning");
  c.cascade = s.flag("cascade");
  c.schedule = s.choice("schedule", [](const std::string& v) {
    if (v == "round_robin") return PropagationSchedule::kRoundRobin;
    if (v == "sequential") return PropagationSchedule::kSequential;
    throw ConfigError("unknown schedule '" + v + "'");
  });
  c.validate();
  return c;
}

inline TbaConfig tba_from(const Section& s) {
  TbaConfig c;
  c.grouping.method = s.choice("grouping", tba::grouping_from_string);
  c.grouping.max_n = s.count("max_n");
  if (!s.at("limit").is_null()) c.grouping.limit = s.count("limit");
  c.grouping.min_score = s.number("min_score");
  c.grouping.min_frequency = s.count("min_group_frequency");
  c.model = s.choice("model", [](const std::string& v) {
    if (v == "ibm1") return AlignmentModel::kIbm1;
    if (v == "ibm2") return AlignmentModel::kIbm2;
    throw ConfigError("unknown model '" + v + "'");
  });
  c.ibm1_iterations = s.count("ibm1_iterations");
  c.ibm2_iterations = s.count("ibm2_iterations");
  c.type_key = s.choice("type_key", [](const std::string& v) {
    if (v == "lemma") return tba::TypeKey::kLemma;
    if (v == "stem") return tba::TypeKey::kStem;
    throw ConfigError("unknown type_key '" + v + "'");
  });
  c.association_source = s.choice("association", [](const std::string& v) {
    if (v == "table") return AssociationSource::kTable;
    if (v == "viterbi") return AssociationSource::kViterbi;
    throw ConfigError("unknown association '" + v + "'");
  });
  c.walk.lambda = s.number("lambda");
  c.walk.max_iterations = s.count("k");
  c.walk.tolerance = s.number("tolerance");
  c.confidence_scale = s.choice("confidence_scale", confidence_scale_from_string);
  if (!s.at("df").is_null()) c.df = std::make_shared<const tba::DfTable>(tba::DfTable::load(s.path("df")));
  c.validate();
  return c;
}

inline EvalConfig eval_from(const Section& s) {
  EvalConfig c;
  c.matching = s.choice("matching", matching_from_string);
  c.min_sim = s.number("min_sim");
  auto flags = s.strings("exclude_flags");
  c.exclude_flags = std::set<std::string>(flags.begin(), flags.end());
  c.validate();
  return c;
}

}  // namespace detail

// Overlays `user` on the defaults, rejecting unknown sections and keys.
inline Json merge_config(const Json& user, const Json& base = default_config_json()) {
  if (!user.is_object()) throw ConfigError("config must be a JSON object");
  Json out = base;
  for (const auto& [section, body] : user.items()) {
    if (!out.contains(section)) throw ConfigError("unknown config section '" + section + "'");
    if (!body.is_object()) throw ConfigError("config section '" + section + "' must be an object");
    for (const auto& [key, value] : body.items()) {
      if (!out[section].contains(key)) throw ConfigError("unknown config key '" + section + "." + key + "'");
      out[section][key] = value;
    }
  }
  return out;
}

// Builds typed configs from a fully merged document. Sections not in
// `sections` are checked for key names only, so e.g. a missing lexicon file
// does not matter to an fba run.
inline ExperimentConfig build_config(const Json& merged, const std::filesystem::path& base_dir,
                                     const std::set<std::string>& sections = {"fba", "dba", "tba", "eval"}) {
  ExperimentConfig c;
  c.raw = merged;
  if (sections.count("fba")) c.fba = detail::fba_from({merged.at("fba"), "fba", base_dir});
  if (sections.count("dba")) c.dba = detail::dba_from({merged.at("dba"), "dba", base_dir});
  if (sections.count("tba")) {
    detail::Section s{merged.at("tba"), "tba", base_dir};
    c.tba = detail::tba_from(s);
    if (!s.at("t").is_null()) c.t = s.number("t");
  }
  if (sections.count("eval")) c.eval = detail::eval_from({merged.at("eval"), "eval", base_dir});
  return c;
}

inline Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path.string() + "'");
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

inline ExperimentConfig load_config(const std::filesystem::path& path,
                                    const std::set<std::string>& sections = {"fba", "dba", "tba", "eval"}) {
  return build_config(merge_config(read_json_file(path)), path.parent_path(), sections);
}

// "tba.lambda" -> raw["tba"]["lambda"]; the key must already exist.
inline void set_dotted(Json& raw, const std::string& dotted, const Json& value) {
  const auto dot = dotted.find('.');
  if (dot == std::string::npos) throw ConfigError("parameter '" + dotted + "' must be section.key");
  const std::string section = dotted.substr(0, dot), key = dotted.substr(dot + 1);
  if (!raw.contains(section) || !raw[section].contains(key)) throw ConfigError("unknown parameter '" + dotted + "'");
  raw[section][key] = value;
}

}  // namespace opmin
