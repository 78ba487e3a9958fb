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

#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "opmin/common.hpp"

namespace opmin {

enum class AspectKind { kFrequent, kInfrequent, kDependency, kTranslation };

inline const char* to_string(AspectKind k) {
  switch (k) {
    case AspectKind::kFrequent: return "frequent";
    case AspectKind::kInfrequent: return "infrequent";
    case AspectKind::kDependency: return "dependency";
    case AspectKind::kTranslation: return "translation";
  }
  return "unknown";
}

inline AspectKind aspect_kind_from_string(const std::string& s) {
  if (s == "frequent") return AspectKind::kFrequent;
  if (s == "infrequent") return AspectKind::kInfrequent;
  if (s == "dependency") return AspectKind::kDependency;
  if (s == "translation") return AspectKind::kTranslation;
  throw DataError("unknown aspect kind '" + s + "'");
}

struct AspectCandidate {
  std::string term;
  AspectKind kind = AspectKind::kFrequent;
  std::size_t support = 0;
  std::vector<std::string> provenance;  // sentence ids, corpus order
  std::optional<double> confidence;

  bool operator==(const AspectCandidate&) const = default;
};

struct OpinionWord {
  std::string word;
  std::vector<std::string> sources;  // sentence ids

  bool operator==(const OpinionWord&) const = default;
};

// Output of every extractor.
struct ExtractionResult {
  std::string algorithm;
  std::string corpus;
  std::vector<AspectCandidate> aspects;
  std::vector<OpinionWord> opinion_words;

  std::vector<std::string> terms() const {
    std::vector<std::string> out;
    out.reserve(aspects.size());
    for (const auto& a : aspects) out.push_back(a.term);
    return out;
  }

  bool operator==(const ExtractionResult&) const = default;
};

inline nlohmann::ordered_json to_json(const ExtractionResult& r) {
  nlohmann::ordered_json j;
  j["algorithm"] = r.algorithm;
  j["corpus"] = r.corpus;
  auto aspects = nlohmann::ordered_json::array();
  for (const auto& a : r.aspects) {
    nlohmann::ordered_json aj;
    aj["term"] = a.term;
    aj["kind"] = to_string(a.kind);
    aj["support"] = a.support;
    if (a.confidence) aj["confidence"] = *a.confidence;
    aj["provenance"] = a.provenance;
    aspects.push_back(std::move(aj));
  }
  j["aspects"] = std::move(aspects);
  auto opinions = nlohmann::ordered_json::array();
  for (const auto& o : r.opinion_words) {
    nlohmann::ordered_json oj;
    oj["word"] = o.word;
    oj["sources"] = o.sources;
    opinions.push_back(std::move(oj));
  }
  j["opinion_words"] = std::move(opinions);
  return j;
}

inline ExtractionResult extraction_from_json(const nlohmann::json& j) {
  try {
    ExtractionResult r;
    r.algorithm = j.at("algorithm").get<std::string>();
    r.corpus = j.at("corpus").get<std::string>();
    for (const auto& aj : j.at("aspects")) {
      AspectCandidate a;
      a.term = aj.at("term").get<std::string>();
      a.kind = aspect_kind_from_string(aj.at("kind").get<std::string>());
      a.support = aj.at("support").get<std::size_t>();
      if (aj.contains("confidence")) a.confidence = aj.at("confidence").get<double>();
      a.provenance = aj.at("provenance").get<std::vector<std::string>>();
      r.aspects.push_back(std::move(a));
    }
    if (j.contains("opinion_words"))
      for (const auto& oj : j.at("opinion_words"))
        r.opinion_words.push_back({oj.at("word").get<std::string>(), oj.at("sources").get<std::vector<std::string>>()});
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed extraction result: ") + e.what());
  }
}

}  // namespace opmin
