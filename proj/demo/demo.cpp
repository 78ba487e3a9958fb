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

// Runs fba, dba and tba with the shipped default config on one corpus and
// prints scores plus the top aspects of each.
//
//   opmin_demo [corpus.jsonl]

#include <cstdio>
#include <filesystem>
#include <iostream>

#include "opmin/opmin.hpp"

int main(int argc, char** argv) {
  namespace fs = std::filesystem;
  const fs::path root = OPMIN_SOURCE_DIR;
  const fs::path corpus_path = argc > 1 ? fs::path(argv[1]) : root / "data" / "fixtures" / "camera_a.jsonl";
  try {
    const auto corpus = opmin::load_annotated(corpus_path);
    const auto cfg = opmin::load_config(root / "data" / "configs" / "default.json");
    std::printf("%s: %zu sentences, %zu gold aspects\n\n", corpus.name.c_str(), corpus.sentences.size(),
                opmin::gold_terms(corpus, cfg.eval).size());
    for (const auto& algo : opmin::algorithm_names()) {
      const auto out = opmin::run_once(algo, corpus, cfg);
      const auto rep = opmin::evaluate(out.result, corpus, cfg.eval);
      std::printf("%s  P=%.3f R=%.3f F1=%.3f  (%zu extracted)\n   ", algo.c_str(), rep.precision, rep.recall, rep.f1,
                  rep.extracted);
      std::size_t shown = 0;
      for (const auto& a : out.result.aspects) {
        if (shown++ == 12) break;
        std::printf(" %s", a.term.c_str());
      }
      std::printf("\n\n");
    }
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return 1;
  }
  return 0;
}
