// Copyright 2026 The Seqconf Authors.
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

#include "seqconf/presets.h"

#include <cmath>
#include <map>
#include <random>

#include "seqconf/errors.h"

namespace seqconf {

namespace {

// Builds a row over `names` from sparse weights, normalized to sum to one.
std::vector<double> Row(const std::vector<std::string> &names,
                        const std::map<std::string, double> &weights) {
  std::vector<double> row(names.size(), 0.0);
  double total = 0.0;
  for (const auto &[name, weight] : weights) total += weight;
  for (std::size_t i = 0; i < names.size(); ++i) {
    auto it = weights.find(names[i]);
    if (it != weights.end()) row[i] = it->second / total;
  }
  return row;
}

std::vector<std::string> TagNames(const std::vector<Tag> &tags) {
  std::vector<std::string> names;
  for (const auto &tag : tags) names.push_back(tag.ToString());
  return names;
}

}  // namespace

HmmParams AmbiguousLocPreset() {
  HmmParams p;
  p.tag_set = {Tag::Outside(), Tag::Begin("Cuisine"), Tag::Inside("Cuisine"),
               Tag::Begin("Location"), Tag::Inside("Location")};
  p.vocab = {"do",   "you",   "have", "listings", "of",       "diners",
             "in",   "the",   "area", "near",     "me",       "find",
             "a",    "cheap", "thai", "pizza",    "downtown", "food",
             "place"};
  const auto tags = TagNames(p.tag_set);
  p.initial = Row(tags, {{"O", 0.97}, {"B-Cuisine", 0.015}, {"B-Location", 0.015}});
  p.transition = {
      Row(tags, {{"O", 0.9}, {"B-Cuisine", 0.038}, {"B-Location", 0.063}}),
      Row(tags, {{"O", 0.66}, {"I-Cuisine", 0.24}, {"B-Location", 0.1}}),
      Row(tags, {{"O", 0.78}, {"I-Cuisine", 0.022}, {"B-Location", 0.2}}),
      Row(tags, {{"O", 0.31}, {"I-Location", 0.69}}),
      Row(tags, {{"O", 0.6}, {"I-Location", 0.4}}),
  };
  // "in", "the", "area" and "near" are emitted both outside and inside
  // locations.
  p.emission = {
      Row(p.vocab, {{"do", 0.079}, {"you", 0.079}, {"have", 0.079}, {"listings", 0.061},
                    {"of", 0.124}, {"diners", 0.02}, {"in", 0.179}, {"the", 0.179},
                    {"area", 0.011}, {"near", 0.02}, {"me", 0.02}, {"find", 0.045},
                    {"a", 0.079}, {"cheap", 0.02}, {"place", 0.005}}),
      Row(p.vocab, {{"diners", 0.38}, {"thai", 0.27}, {"pizza", 0.27}, {"cheap", 0.043},
                    {"food", 0.043}}),
      Row(p.vocab, {{"food", 0.66}, {"place", 0.24}, {"diners", 0.1}}),
      Row(p.vocab, {{"in", 0.3}, {"the", 0.11}, {"area", 0.11}, {"near", 0.19},
                    {"downtown", 0.3}}),
      Row(p.vocab, {{"the", 0.3}, {"area", 0.53}, {"me", 0.13}, {"downtown", 0.033}}),
  };
  return p;
}

HmmParams TinyPreset() {
  HmmParams p;
  p.tag_set = {Tag::Outside(), Tag::Begin("X"), Tag::Inside("X")};
  p.vocab = {"a", "b", "c"};
  p.initial = {0.6, 0.4, 0.0};
  p.transition = {{0.6, 0.4, 0.0}, {0.5, 0.2, 0.3}, {0.5, 0.3, 0.2}};
  p.emission = {{0.6, 0.3, 0.1}, {0.2, 0.5, 0.3}, {0.1, 0.3, 0.6}};
  return p;
}

HmmParams RandomHmmParams(int num_labels, int vocab_size, std::uint64_t seed) {
  if (num_labels < 0 || vocab_size < 1) {
    throw ConfigError("random HMM needs num_labels >= 0 and vocab_size >= 1");
  }
  std::mt19937_64 rng(seed);
  auto weight = [&rng]() {
    double u = (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
    double e = -std::log(u);
    return e * e;
  };
  HmmParams p;
  p.tag_set.push_back(Tag::Outside());
  for (int l = 0; l < num_labels; ++l) {
    std::string label = "L" + std::to_string(l);
    p.tag_set.push_back(Tag::Begin(label));
    p.tag_set.push_back(Tag::Inside(label));
  }
  for (int v = 0; v < vocab_size; ++v) p.vocab.push_back("w" + std::to_string(v));

  auto normalized = [](std::vector<double> row) {
    double total = 0.0;
    for (double v : row) total += v;
    for (double &v : row) v /= total;
    return row;
  };
  const std::size_t num_tags = p.tag_set.size();
  std::vector<double> initial(num_tags, 0.0);
  for (std::size_t t = 0; t < num_tags; ++t) {
    if (p.tag_set[t].kind != TagKind::kInside) initial[t] = weight();
  }
  p.initial = normalized(std::move(initial));
  for (std::size_t from = 0; from < num_tags; ++from) {
    std::vector<double> row(num_tags, 0.0);
    for (std::size_t to = 0; to < num_tags; ++to) {
      const Tag &a = p.tag_set[from], &b = p.tag_set[to];
      bool ok = b.kind != TagKind::kInside ||
                (a.kind != TagKind::kOutside && a.label == b.label);
      if (ok) row[to] = weight();
    }
    p.transition.push_back(normalized(std::move(row)));
  }
  for (std::size_t t = 0; t < num_tags; ++t) {
    std::vector<double> row(vocab_size);
    for (double &v : row) v = weight();
    p.emission.push_back(normalized(std::move(row)));
  }
  return p;
}

std::vector<std::string> PresetNames() { return {"ambiguous-loc", "tiny"}; }

HmmParams PresetByName(std::string_view name) {
  if (name == "ambiguous-loc") return AmbiguousLocPreset();
  if (name == "tiny") return TinyPreset();
  throw ConfigError("unknown preset '" + std::string(name) + "'");
}

}  // namespace seqconf
