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

#include "oracles.h"

#include <algorithm>
#include <cmath>
#include <set>

namespace seqconf::oracle {

namespace {

std::vector<int> WordIndices(const HmmParams &params, const InputText &input) {
  std::vector<int> ids;
  for (const auto &w : input.words) {
    ids.push_back(static_cast<int>(
        std::find(params.vocab.begin(), params.vocab.end(), w) - params.vocab.begin()));
  }
  return ids;
}

std::vector<int> PatternIds(const HmmParams &params, const LabeledSpan &span) {
  auto id = [&](const Tag &t) {
    return static_cast<int>(std::find(params.tag_set.begin(), params.tag_set.end(), t) -
                            params.tag_set.begin());
  };
  if (span.label == "O") return {id(Tag::Outside())};
  std::vector<int> ids{id(Tag::Begin(span.label))};
  for (int i = span.start + 1; i < span.end; ++i) ids.push_back(id(Tag::Inside(span.label)));
  return ids;
}

}  // namespace

std::vector<Sequence> EnumeratePosterior(const HmmParams &params, const InputText &input) {
  const auto x = WordIndices(params, input);
  const int n = static_cast<int>(x.size());
  const int num_tags = static_cast<int>(params.tag_set.size());
  std::vector<Sequence> out;
  std::vector<int> tags(n, 0);
  double total = 0.0;
  while (true) {
    double p = params.initial[tags[0]] * params.emission[tags[0]][x[0]];
    for (int w = 1; w < n; ++w) {
      p *= params.transition[tags[w - 1]][tags[w]] * params.emission[tags[w]][x[w]];
    }
    out.push_back({tags, p});
    total += p;
    int w = n - 1;
    while (w >= 0 && ++tags[w] == num_tags) tags[w--] = 0;
    if (w < 0) break;
  }
  for (auto &s : out) s.probability /= total;
  return out;
}

std::vector<double> NextTagByEnumeration(const HmmParams &params, const InputText &input,
                                         const std::vector<int> &prefix) {
  std::vector<double> mass(params.tag_set.size(), 0.0);
  double total = 0.0;
  for (const auto &s : EnumeratePosterior(params, input)) {
    if (!std::equal(prefix.begin(), prefix.end(), s.tags.begin())) continue;
    mass[s.tags[prefix.size()]] += s.probability;
    total += s.probability;
  }
  for (double &m : mass) m /= total;
  return mass;
}

double PatternMarginalByEnumeration(const HmmParams &params, const InputText &input,
                                    const LabeledSpan &span) {
  const auto pattern = PatternIds(params, span);
  double mass = 0.0;
  for (const auto &s : EnumeratePosterior(params, input)) {
    if (std::equal(pattern.begin(), pattern.end(), s.tags.begin() + span.start)) {
      mass += s.probability;
    }
  }
  return mass;
}

double SpanMarginalByEnumeration(const HmmParams &params, const InputText &input,
                                 const LabeledSpan &span) {
  double mass = 0.0;
  for (const auto &s : EnumeratePosterior(params, input)) {
    if (s.probability <= 0.0) continue;
    TagSequence tags;
    for (int t : s.tags) tags.push_back(params.tag_set[t]);
    if (ContainsSpan(segment_spans(input.words, tags), span)) mass += s.probability;
  }
  return mass;
}

double EceByScan(const std::vector<double> &confidences, const std::vector<bool> &correct,
                 int num_bins) {
  double total = 0.0;
  for (int m = 1; m <= num_bins; ++m) {
    double lo = static_cast<double>(m - 1) / num_bins;
    double hi = static_cast<double>(m) / num_bins;
    double count = 0.0, hits = 0.0, conf = 0.0;
    for (std::size_t i = 0; i < confidences.size(); ++i) {
      double c = confidences[i];
      bool in_bin = (c > lo && c <= hi) || (m == 1 && c == 0.0);
      if (!in_bin) continue;
      count += 1.0;
      hits += correct[i] ? 1.0 : 0.0;
      conf += c;
    }
    if (count > 0) total += count * std::abs(hits / count - conf / count);
  }
  return total / static_cast<double>(confidences.size());
}

InputText RandomSentence(const HmmParams &params, int length, std::mt19937_64 &rng,
                         const std::string &id) {
  std::uniform_int_distribution<std::size_t> pick(0, params.vocab.size() - 1);
  InputText input{id, {}};
  for (int i = 0; i < length; ++i) input.words.push_back(params.vocab[pick(rng)]);
  return input;
}

RandomBeam MakeRandomBeam(std::mt19937_64 &rng, int n, int num_candidates) {
  RandomBeam out;
  out.input.id = "beam";
  for (int i = 0; i < n; ++i) out.input.words.push_back("w" + std::to_string(i));
  std::uniform_int_distribution<int> kind(0, 2), label(0, 1);
  std::uniform_real_distribution<double> prob(0.05, 1.0);

  std::set<std::vector<std::string>> seen;
  std::vector<std::pair<TagSequence, std::vector<double>>> drawn;
  for (int attempt = 0; attempt < 50 * num_candidates &&
                        static_cast<int>(drawn.size()) < num_candidates;
       ++attempt) {
    TagSequence tags;
    for (int i = 0; i < n; ++i) {
      int k = kind(rng);
      if (k == 2 && (i == 0 || tags.back().kind == TagKind::kOutside)) k = 1;
      std::string l = label(rng) ? "A" : "B";
      if (k == 0) tags.push_back(Tag::Outside());
      if (k == 1) tags.push_back(Tag::Begin(l));
      if (k == 2) tags.push_back(Tag::Inside(tags.back().label));
    }
    if (!seen.insert(encode_si_tags(tags)).second) continue;
    std::vector<double> lp;
    for (int i = 0; i < n; ++i) lp.push_back(std::log(prob(rng)));
    drawn.emplace_back(std::move(tags), std::move(lp));
  }
  auto total = [](const std::vector<double> &lp) {
    double s = 0.0;
    for (double v : lp) s += v;
    return s;
  };
  std::stable_sort(drawn.begin(), drawn.end(), [&](const auto &a, const auto &b) {
    return total(a.second) > total(b.second);
  });
  out.beam.id = out.input.id;
  out.beam.n_words = n;
  out.beam.k = static_cast<int>(drawn.size());
  for (std::size_t i = 0; i < drawn.size(); ++i) {
    out.beam.candidates.push_back(MakeCandidate(static_cast<int>(i) + 1,
                                                std::move(drawn[i].first),
                                                std::move(drawn[i].second)));
  }
  return out;
}

}  // namespace seqconf::oracle
