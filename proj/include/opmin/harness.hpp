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

// Single runs, parameter-grid sweeps and their reports.

#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "opmin/common.hpp"
#include "opmin/config.hpp"
#include "opmin/corpus.hpp"
#include "opmin/dba.hpp"
#include "opmin/eval.hpp"
#include "opmin/fba.hpp"
#include "opmin/tba.hpp"

namespace opmin {

inline const std::vector<std::string>& algorithm_names() {
  static const std::vector<std::string> names{"fba", "dba", "tba"};
  return names;
}

inline void check_algorithm(const std::string& a) {
  const auto& n = algorithm_names();
  if (std::find(n.begin(), n.end(), a) == n.end()) throw ConfigError("unknown algorithm '" + a + "'");
}

// ---------------------------------------------------------------------------
// Threshold grid "start:step:max", max may be "auto".

struct TGrid {
  double start = 10;
  double step = 10;
  std::optional<double> max;  // none: auto

  static TGrid parse(const std::string& s) {
    std::vector<std::string> parts;
    std::stringstream in(s);
    for (std::string p; std::getline(in, p, ':');) parts.push_back(text::trim(p));
    if (parts.size() != 3) throw ConfigError("t-grid '" + s + "' must be start:step:max");
    TGrid g;
    try {
      std::size_t used = 0;
      g.start = std::stod(parts[0], &used);
      if (used != parts[0].size()) throw std::invalid_argument(parts[0]);
      g.step = std::stod(parts[1], &used);
      if (used != parts[1].size()) throw std::invalid_argument(parts[1]);
      if (parts[2] != "auto") {
        g.max = std::stod(parts[2], &used);
        if (used != parts[2].size()) throw std::invalid_argument(parts[2]);
      }
    } catch (const std::logic_error&) {
      throw ConfigError("t-grid '" + s + "': bad number");
    }
    if (!(g.step > 0)) throw ConfigError("t-grid step must be > 0");
    if (g.max && *g.max < g.start) throw ConfigError("t-grid max below start");
    return g;
  }

  std::string str() const {
    auto num = [](double v) { return Json(v).dump(); };
    return num(start) + ":" + num(step) + ":" + (max ? num(*max) : std::string("auto"));
  }

  // With auto, the grid runs up to the first value at or above the highest
  // confidence, whose extraction is therefore empty.
  std::vector<double> values(double max_confidence) const {
    std::vector<double> out;
    for (std::size_t i = 0;; ++i) {
      const double t = start + static_cast<double>(i) * step;
      if (max && t > *max + 1e-9 * step) break;
      out.push_back(t);
      if (!max && t >= max_confidence) break;
      if (out.size() > 100000) throw ConfigError("t-grid expands to more than 100000 values");
    }
    return out;
  }
};

// ---------------------------------------------------------------------------
// Single runs

struct RunOutput {
  ExtractionResult result;
  Json diagnostics = Json::object();
};

// Shared per-corpus state reused across configurations.
class RunCache {
 public:
  std::shared_ptr<const FbaPrepared> fba(const Corpus& corpus, const FbaConfig& config, const Json& raw) {
    const Json& f = raw.at("fba");
    const std::string key = Json::array({f.at("stemmer"), f.at("min_sim"), f.at("min_length"), f.at("stopwords")}).dump();
    std::lock_guard<std::mutex> lock(mu_);
    auto& slot = fba_[key];
    if (!slot) slot = std::make_shared<const FbaPrepared>(prepare_fba(corpus, config));
    return slot;
  }

 private:
  std::mutex mu_;
  std::map<std::string, std::shared_ptr<const FbaPrepared>> fba_;
};

inline Json pr_json(const EvalReport& r) {
  return Json{{"precision", r.precision}, {"recall", r.recall}, {"f1", r.f1}};
}

inline RunOutput run_fba_diagnosed(const Corpus& corpus, const ExperimentConfig& cfg, const FbaPrepared& prep) {
  RunOutput out;
  auto stages = run_fba_stages(corpus, cfg.fba, prep);
  out.result = stages.result;
  if (corpus.has_gold()) {
    const auto itemsets = assemble_fba_result(corpus, stages.itemset_stage, {}, {}, prep);
    out.diagnostics["itemset_stage"] = pr_json(evaluate(itemsets, corpus, cfg.eval));
    out.diagnostics["frequent_features"] = stages.after_redundancy.size();
  }
  return out;
}

inline RunOutput run_dba_diagnosed(const Corpus& corpus, const ExperimentConfig& cfg) {
  RunOutput out;
  auto st = run_dba_stages(corpus, cfg.dba);
  out.result = st.result;
  out.diagnostics["rounds"] = st.state.rounds;
  out.diagnostics["targets"] = st.state.targets.size();
  out.diagnostics["opinions"] = st.state.opinions.size();
  return out;
}

inline Json tba_diagnostics(const TbaModel& m) {
  Json d;
  d["candidates"] = m.candidates.size();
  d["groups"] = m.groups.size();
  d["max_confidence"] = m.candidates.empty() ? 0.0 : m.candidates.front().confidence;
  d["walk_iterations"] = m.walk.iterations;
  d["walk_converged"] = m.walk.converged;
  return d;
}

// One algorithm, one corpus, one configuration.
inline RunOutput run_once(const std::string& algorithm, const Corpus& corpus, const ExperimentConfig& cfg,
                          RunCache* cache = nullptr) {
  check_algorithm(algorithm);
  if (algorithm == "fba") {
    if (cache) return run_fba_diagnosed(corpus, cfg, *cache->fba(corpus, cfg.fba, cfg.raw));
    const auto prep = prepare_fba(corpus, cfg.fba);
    return run_fba_diagnosed(corpus, cfg, prep);
  }
  if (algorithm == "dba") return run_dba_diagnosed(corpus, cfg);
  auto model = build_tba_model(corpus, cfg.tba);
  RunOutput out;
  out.result = extract_tba(model, cfg.t);
  out.diagnostics = tba_diagnostics(model);
  return out;
}

// ---------------------------------------------------------------------------
// Sweeps

struct SweepSpec {
  std::string algorithm;
  std::vector<std::filesystem::path> corpora;
  std::map<std::string, std::vector<Json>> grid;  // dotted key -> values
  Json base = default_config_json();              // merged config
  std::filesystem::path base_dir = ".";
  std::optional<TGrid> t_grid;                    // tba only
  std::string output;

  std::size_t grid_size() const {
    std::size_t n = 1;
    for (const auto& [k, v] : grid) n *= v.size();
    return n;
  }
};

inline SweepSpec parse_sweep_spec(const Json& j, const std::filesystem::path& base_dir) {
  if (!j.is_object()) throw ConfigError("sweep spec must be a JSON object");
  static const std::set<std::string> keys{"algorithm", "config", "corpora", "grid", "t_grid", "output"};
  for (const auto& [k, v] : j.items())
    if (!keys.count(k)) throw ConfigError("unknown sweep key '" + k + "'");
  SweepSpec s;
  s.base_dir = base_dir;
  if (!j.contains("algorithm") || !j["algorithm"].is_string()) throw ConfigError("sweep: 'algorithm' missing");
  s.algorithm = j["algorithm"].get<std::string>();
  check_algorithm(s.algorithm);
  if (j.contains("config")) {
    const auto& c = j["config"];
    if (c.is_string()) {
      std::filesystem::path p = c.get<std::string>();
      if (!p.is_absolute()) p = base_dir / p;
      s.base = merge_config(read_json_file(p));
      s.base_dir = p.parent_path();
    } else {
      s.base = merge_config(c);
    }
  }
  if (j.contains("corpora")) {
    if (!j["corpora"].is_array()) throw ConfigError("sweep: 'corpora' must be an array of paths");
    for (const auto& c : j["corpora"]) {
      if (!c.is_string()) throw ConfigError("sweep: 'corpora' must be an array of paths");
      std::filesystem::path p = c.get<std::string>();
      s.corpora.push_back(p.is_absolute() ? p : base_dir / p);
    }
  }
  if (!j.contains("grid") || !j["grid"].is_object() || j["grid"].empty())
    throw ConfigError("sweep: 'grid' must be a nonempty object");
  for (const auto& [k, v] : j["grid"].items()) {
    if (!v.is_array() || v.empty()) throw ConfigError("sweep: grid '" + k + "' must be a nonempty array");
    Json probe = s.base;
    set_dotted(probe, k, v.front());
    const std::string section = k.substr(0, k.find('.'));
    if (section != s.algorithm && section != "eval")
      throw ConfigError("sweep: grid '" + k + "' does not belong to " + s.algorithm);
    s.grid[k] = std::vector<Json>(v.begin(), v.end());
  }
  if (j.contains("t_grid")) {
    if (s.algorithm != "tba") throw ConfigError("sweep: t_grid applies to tba only");
    if (!j["t_grid"].is_null()) s.t_grid = TGrid::parse(j["t_grid"].get<std::string>());
  } else if (s.algorithm == "tba") {
    s.t_grid = TGrid{};
  }
  if (j.contains("output")) s.output = j["output"].get<std::string>();
  return s;
}

inline SweepSpec load_sweep_spec(const std::filesystem::path& path) {
  return parse_sweep_spec(read_json_file(path), path.parent_path());
}

// Cartesian product in key order; the last key varies fastest.
inline std::vector<Json> grid_points(const SweepSpec& spec) {
  std::vector<Json> out{Json::object()};
  for (const auto& [key, values] : spec.grid) {
    std::vector<Json> next;
    for (const auto& point : out)
      for (const auto& v : values) {
        Json p = point;
        p[key] = v;
        next.push_back(std::move(p));
      }
    out = std::move(next);
  }
  return out;
}

struct SweepRow {
  std::string config;  // canonical overrides, including "t" for tba
  std::string corpus;
  bool ok = true;
  std::string error;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t extracted = 0;
  std::size_t gold = 0;
  Json diagnostics = Json::object();
  double runtime_ms = 0.0;  // not part of the result file
};

struct BestSet {
  double f1 = 0.0;
  double precision = 0.0;  // of the first tying row
  double recall = 0.0;
  std::vector<std::string> configs;
};

struct SweepResult {
  std::string algorithm;
  std::vector<std::string> corpora;
  std::size_t grid_size = 0;
  std::optional<TGrid> t_grid;
  std::vector<SweepRow> rows;
  std::map<std::string, BestSet> best;
  double total_ms = 0.0;
};

// Per corpus, every configuration reaching the highest F1.
inline std::map<std::string, BestSet> best_sets(const std::vector<SweepRow>& rows) {
  std::map<std::string, BestSet> best;
  for (const auto& r : rows) {
    if (!r.ok) continue;
    auto it = best.find(r.corpus);
    if (it == best.end() || r.f1 > it->second.f1) {
      best[r.corpus] = BestSet{r.f1, r.precision, r.recall, {r.config}};
    } else if (r.f1 == it->second.f1) {
      it->second.configs.push_back(r.config);
    }
  }
  return best;
}

// Mean P and R of the per-corpus best rows, F1 from those means.
inline AggregateReport best_average(const SweepResult& res) {
  std::vector<EvalReport> reps;
  for (const auto& [corpus, b] : res.best) {
    EvalReport e;
    e.corpus = corpus;
    e.precision = b.precision;
    e.recall = b.recall;
    e.f1 = b.f1;
    reps.push_back(e);
  }
  return aggregate(reps);
}

// The single configuration with the highest mean F1 over all corpora.
inline std::optional<std::pair<std::string, AggregateReport>> best_single_config(const SweepResult& res) {
  std::map<std::string, std::vector<EvalReport>> by_config;
  for (const auto& r : res.rows) {
    EvalReport e;
    e.corpus = r.corpus;
    e.precision = r.ok ? r.precision : 0.0;
    e.recall = r.ok ? r.recall : 0.0;
    e.f1 = r.ok ? r.f1 : 0.0;
    by_config[r.config].push_back(e);
  }
  std::optional<std::pair<std::string, AggregateReport>> best;
  for (const auto& [config, reps] : by_config) {
    if (reps.size() != res.corpora.size()) continue;
    auto a = aggregate(reps);
    if (!best || a.mean_f1 > best->second.mean_f1) best = std::make_pair(config, a);
  }
  return best;
}

namespace detail {

inline SweepRow scored_row(const std::string& config, const Corpus& corpus, const ExtractionResult& result,
                           const EvalConfig& eval, Json diagnostics) {
  SweepRow row;
  row.config = config;
  row.corpus = corpus.name;
  const auto rep = evaluate(result, corpus, eval);
  row.precision = rep.precision;
  row.recall = rep.recall;
  row.f1 = rep.f1;
  row.extracted = rep.extracted;
  row.gold = rep.gold;
  row.diagnostics = std::move(diagnostics);
  return row;
}

// Every row of one (corpus, grid point) task.
inline std::vector<SweepRow> sweep_task(const SweepSpec& spec, const Json& point, const ExperimentConfig& cfg,
                                        const Corpus& corpus, RunCache& cache) {
  std::vector<SweepRow> rows;
  const auto t0 = std::chrono::steady_clock::now();
  auto elapsed = [&] {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  };
  try {
    if (spec.algorithm != "tba") {
      auto out = run_once(spec.algorithm, corpus, cfg, &cache);
      rows.push_back(scored_row(point.dump(), corpus, out.result, cfg.eval, out.diagnostics));
    } else {
      const auto model = build_tba_model(corpus, cfg.tba);
      const Json diag = tba_diagnostics(model);
      std::vector<std::optional<double>> ts{cfg.t};
      if (spec.t_grid) {
        ts = {std::nullopt};
        for (double t : spec.t_grid->values(diag["max_confidence"].get<double>())) ts.push_back(t);
      }
      for (const auto& t : ts) {
        Json p = point;
        p["t"] = t ? Json(*t) : Json(nullptr);
        rows.push_back(scored_row(p.dump(), corpus, extract_tba(model, t), cfg.eval, diag));
      }
    }
  } catch (const std::exception& e) {
    SweepRow row;
    Json p = point;
    if (spec.algorithm == "tba" && spec.t_grid) p["t"] = nullptr;
    row.config = p.dump();
    row.corpus = corpus.name;
    row.ok = false;
    row.error = e.what();
    rows = {row};
  }
  const double ms = elapsed();
  for (auto& r : rows) r.runtime_ms = ms / static_cast<double>(rows.size());
  return rows;
}

}  // namespace detail

using ProgressFn = std::function<void(std::size_t done, std::size_t total)>;

inline SweepResult run_sweep(const SweepSpec& spec, const std::vector<Corpus>& corpora, std::size_t jobs = 1,
                             const ProgressFn& progress = {}) {
  if (corpora.empty()) throw ConfigError("sweep: no corpora");
  const auto t0 = std::chrono::steady_clock::now();
  const auto points = grid_points(spec);
  // Type-check every point before running anything.
  std::vector<ExperimentConfig> configs;
  for (const auto& p : points) {
    Json raw = spec.base;
    for (const auto& [k, v] : p.items()) set_dotted(raw, k, v);
    configs.push_back(build_config(raw, spec.base_dir, {spec.algorithm, "eval"}));
  }
  std::vector<std::unique_ptr<RunCache>> caches;
  for (std::size_t i = 0; i < corpora.size(); ++i) caches.push_back(std::make_unique<RunCache>());

  const std::size_t total = points.size() * corpora.size();
  std::vector<std::vector<SweepRow>> results(total);
  std::atomic<std::size_t> next{0}, done{0};
  std::mutex progress_mu;
  auto worker = [&] {
    for (std::size_t task; (task = next++) < total;) {
      const std::size_t c = task / points.size(), p = task % points.size();
      results[task] = detail::sweep_task(spec, points[p], configs[p], corpora[c], *caches[c]);
      const std::size_t d = ++done;
      if (progress) {
        std::lock_guard<std::mutex> lock(progress_mu);
        progress(d, total);
      }
    }
  };
  jobs = std::max<std::size_t>(1, std::min(jobs, total));
  std::vector<std::thread> pool;
  for (std::size_t i = 1; i < jobs; ++i) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  SweepResult res;
  res.algorithm = spec.algorithm;
  for (const auto& c : corpora) res.corpora.push_back(c.name);
  res.grid_size = points.size();
  res.t_grid = spec.t_grid;
  for (auto& r : results)
    for (auto& row : r) res.rows.push_back(std::move(row));
  std::stable_sort(res.rows.begin(), res.rows.end(), [](const SweepRow& a, const SweepRow& b) {
    if (a.config != b.config) return a.config < b.config;
    return a.corpus < b.corpus;
  });
  res.best = best_sets(res.rows);
  res.total_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  return res;
}

// ---------------------------------------------------------------------------
// Serialization

inline Json to_json(const SweepRow& r) {
  Json j;
  j["config"] = r.config;
  j["corpus"] = r.corpus;
  j["ok"] = r.ok;
  if (!r.ok) {
    j["error"] = r.error;
    return j;
  }
  j["precision"] = r.precision;
  j["recall"] = r.recall;
  j["f1"] = r.f1;
  j["extracted"] = r.extracted;
  j["gold"] = r.gold;
  j["diagnostics"] = r.diagnostics;
  return j;
}

// Everything except timings, so identical runs give identical bytes.
inline Json to_json(const SweepResult& res) {
  Json j;
  j["algorithm"] = res.algorithm;
  j["corpora"] = res.corpora;
  j["grid_size"] = res.grid_size;
  j["t_grid"] = res.t_grid ? Json(res.t_grid->str()) : Json(nullptr);
  j["row_count"] = res.rows.size();
  Json best = Json::object();
  for (const auto& [corpus, b] : res.best)
    best[corpus] = Json{{"f1", b.f1}, {"precision", b.precision}, {"recall", b.recall},
                        {"count", b.configs.size()}, {"configs", b.configs}};
  j["best"] = std::move(best);
  j["best_average"] = to_json(best_average(res));
  if (auto single = best_single_config(res)) j["best_single_config"] = Json{{"config", single->first}, {"average", to_json(single->second)}};
  auto rows = Json::array();
  for (const auto& r : res.rows) rows.push_back(to_json(r));
  j["rows"] = std::move(rows);
  return j;
}

inline Json timing_json(const SweepResult& res) {
  Json j;
  j["total_ms"] = res.total_ms;
  auto rows = Json::array();
  for (const auto& r : res.rows) rows.push_back(Json{{"config", r.config}, {"corpus", r.corpus}, {"runtime_ms", r.runtime_ms}});
  j["rows"] = std::move(rows);
  return j;
}

inline SweepResult sweep_from_json(const Json& j) {
  try {
    SweepResult res;
    res.algorithm = j.at("algorithm").get<std::string>();
    res.corpora = j.at("corpora").get<std::vector<std::string>>();
    res.grid_size = j.at("grid_size").get<std::size_t>();
    if (!j.at("t_grid").is_null()) res.t_grid = TGrid::parse(j.at("t_grid").get<std::string>());
    for (const auto& rj : j.at("rows")) {
      SweepRow r;
      r.config = rj.at("config").get<std::string>();
      r.corpus = rj.at("corpus").get<std::string>();
      r.ok = rj.at("ok").get<bool>();
      if (!r.ok) {
        r.error = rj.value("error", "");
      } else {
        r.precision = rj.at("precision").get<double>();
        r.recall = rj.at("recall").get<double>();
        r.f1 = rj.at("f1").get<double>();
        r.extracted = rj.at("extracted").get<std::size_t>();
        r.gold = rj.at("gold").get<std::size_t>();
        r.diagnostics = rj.at("diagnostics");
      }
      res.rows.push_back(std::move(r));
    }
    res.best = best_sets(res.rows);
    return res;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed sweep result: ") + e.what());
  }
}

inline std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

inline std::string to_csv(const SweepResult& res) {
  std::string out = "config,corpus,ok,precision,recall,f1,extracted,gold\n";
  char buf[128];
  for (const auto& r : res.rows) {
    out += csv_escape(r.config) + "," + csv_escape(r.corpus) + "," + (r.ok ? "true" : "false") + ",";
    std::snprintf(buf, sizeof buf, "%.6f,%.6f,%.6f,%zu,%zu\n", r.precision, r.recall, r.f1, r.extracted, r.gold);
    out += buf;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Published reference values

struct PublishedPR {
  double precision = 0.0;
  double recall = 0.0;
  double f1() const { return f1_score(precision, recall); }
};

struct PublishedTable {
  std::map<std::string, PublishedPR> original;     // corpus id -> P/R
  std::map<std::string, PublishedPR> replication;  // corpus id -> P/R
  PublishedPR original_average;
  PublishedPR replication_average;
};

struct PublishedResults {
  std::vector<std::pair<std::string, std::string>> corpora;  // id, display name
  std::map<std::string, PublishedTable> tables;              // algorithm -> table
  std::map<std::string, double> best_t;                      // tba, per corpus id
  PublishedPR fba_itemset_stage;

  std::string display_name(const std::string& id) const {
    for (const auto& [i, n] : corpora)
      if (i == id) return n;
    return id;
  }
};

inline PublishedResults parse_published(const Json& j) {
  auto pr = [](const Json& v) { return PublishedPR{v.at(0).get<double>(), v.at(1).get<double>()}; };
  try {
    PublishedResults out;
    for (const auto& c : j.at("corpora")) out.corpora.emplace_back(c.at("id").get<std::string>(), c.at("name").get<std::string>());
    for (const auto& a : algorithm_names()) {
      const auto& t = j.at(a);
      PublishedTable table;
      for (const auto& [id, v] : t.at("original").items()) {
        if (id == "average") table.original_average = pr(v);
        else table.original[id] = pr(v);
      }
      for (const auto& [id, v] : t.at("replication").items()) {
        if (id == "average") table.replication_average = pr(v);
        else table.replication[id] = pr(v);
      }
      out.tables[a] = std::move(table);
    }
    for (const auto& [id, v] : j.at("tba_best_t").items()) out.best_t[id] = v.get<double>();
    out.fba_itemset_stage = pr(j.at("fba_itemset_stage"));
    return out;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed published results: ") + e.what());
  }
}

inline PublishedResults load_published(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  try {
    return parse_published(Json::parse(in));
  } catch (const nlohmann::json::parse_error& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

// Comparison table: published original, published replication, this run's
// per-corpus best.
inline std::string comparison_table(const SweepResult& res, const PublishedResults* published) {
  const PublishedTable* table = nullptr;
  if (published) {
    auto it = published->tables.find(res.algorithm);
    if (it != published->tables.end()) table = &it->second;
  }
  std::size_t width = 8;
  for (const auto& c : res.corpora)
    width = std::max(width, (published ? published->display_name(c) : c).size());
  std::string out;
  char buf[256];
  const int w = static_cast<int>(width);
  std::string upper = res.algorithm;
  std::transform(upper.begin(), upper.end(), upper.begin(), ::toupper);
  std::snprintf(buf, sizeof buf, "%-*s | %-13s | %-13s | %-20s\n", w, upper.c_str(), "Original", "Replication",
                "This run (best)");
  out += buf;
  std::snprintf(buf, sizeof buf, "%-*s | %5s  %5s  | %5s  %5s  | %5s  %5s  %5s  %3s\n", w, "Corpus", "P", "R", "P", "R",
                "P", "R", "F1", "#");
  out += buf;
  out += std::string(width, '-') + "-+---------------+---------------+---------------------------\n";
  auto cell = [](const std::map<std::string, PublishedPR>* m, const std::string& id) {
    char b[32];
    if (!m || !m->count(id)) return std::string("  -      -   ");
    std::snprintf(b, sizeof b, "%5.3f  %5.3f", m->at(id).precision, m->at(id).recall);
    return std::string(b);
  };
  for (const auto& c : res.corpora) {
    const std::string name = published ? published->display_name(c) : c;
    std::string ours = "  -      -      -      -";
    if (auto it = res.best.find(c); it != res.best.end()) {
      char b[64];
      std::snprintf(b, sizeof b, "%5.3f  %5.3f  %5.3f  %3zu", it->second.precision, it->second.recall, it->second.f1,
                    it->second.configs.size());
      ours = b;
    }
    std::snprintf(buf, sizeof buf, "%-*s | %s  | %s  | %s\n", w, name.c_str(),
                  cell(table ? &table->original : nullptr, c).c_str(),
                  cell(table ? &table->replication : nullptr, c).c_str(), ours.c_str());
    out += buf;
  }
  const auto avg = best_average(res);
  char orig[32] = "  -      -  ", repl[32] = "  -      -  ";
  if (table) {
    std::snprintf(orig, sizeof orig, "%5.3f  %5.3f", table->original_average.precision, table->original_average.recall);
    std::snprintf(repl, sizeof repl, "%5.3f  %5.3f", table->replication_average.precision,
                  table->replication_average.recall);
  }
  std::snprintf(buf, sizeof buf, "%-*s | %s  | %s  | %5.3f  %5.3f  %5.3f\n", w, "Average", orig, repl, avg.precision,
                avg.recall, avg.f1_of_means);
  out += buf;
  return out;
}

}  // namespace opmin
