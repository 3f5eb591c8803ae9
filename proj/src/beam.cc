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

#include "seqconf/beam.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "seqconf/errors.h"
#include "seqconf/logmath.h"

namespace seqconf {

BeamCandidate MakeCandidate(int rank, TagSequence tags, std::vector<double> unit_logprobs) {
  BeamCandidate c;
  c.rank = rank;
  c.units = encode_si_tags(tags);
  c.tags = std::move(tags);
  c.total_logprob = std::accumulate(unit_logprobs.begin(), unit_logprobs.end(), 0.0);
  c.unit_logprobs = std::move(unit_logprobs);
  return c;
}

void ResolveCandidate(BeamCandidate &candidate, int n_words, const LabelSet *labels) {
  auto fail = [&candidate](std::string reason) {
    candidate.tags.reset();
    candidate.malformed_reason = std::move(reason);
  };
  if (!candidate.malformed_reason.empty()) {
    candidate.tags.reset();
    return;
  }
  try {
    candidate.tags = decode_si(candidate.units, n_words, labels);
  } catch (const Error &e) {
    fail(e.what());
    return;
  }
  if (!std::isfinite(candidate.total_logprob)) {
    fail("total_logprob is not finite");
    return;
  }
  if (candidate.unit_logprobs) {
    const auto &lp = *candidate.unit_logprobs;
    if (lp.size() != static_cast<std::size_t>(n_words)) {
      fail("unit_logprobs has " + std::to_string(lp.size()) + " entries for " +
           std::to_string(n_words) + " words");
      return;
    }
    double sum = std::accumulate(lp.begin(), lp.end(), 0.0);
    if (!std::isfinite(sum) ||
        std::abs(sum - candidate.total_logprob) > kTotalLogprobTolerance) {
      fail("total_logprob disagrees with the sum of unit_logprobs");
      return;
    }
  }
}

void CheckBeamInvariants(const BeamResult &beam) {
  const auto &cands = beam.candidates;
  if (cands.empty() || static_cast<int>(cands.size()) > beam.k) {
    throw FormatError("beam '" + beam.id + "' has " + std::to_string(cands.size()) +
                      " candidates for k=" + std::to_string(beam.k));
  }
  std::set<std::vector<std::string>> seen;
  for (std::size_t i = 0; i < cands.size(); ++i) {
    if (cands[i].rank != static_cast<int>(i) + 1) {
      throw FormatError("beam '" + beam.id + "' ranks are not 1..k");
    }
    if (i > 0 && cands[i].total_logprob > cands[i - 1].total_logprob) {
      throw FormatError("beam '" + beam.id + "' is not sorted by total_logprob");
    }
    if (cands[i].well_formed() && !seen.insert(cands[i].units).second) {
      throw FormatError("beam '" + beam.id + "' repeats a tag sequence");
    }
  }
}

namespace {

struct Hypothesis {
  std::vector<TagId> ids;
  std::vector<double> unit_logprobs;
  double total = 0.0;
};

bool Better(const Hypothesis &a, const Hypothesis &b) {
  if (a.total != b.total) return a.total > b.total;
  return a.ids < b.ids;
}

}  // namespace

BeamResult beam_search(const Scorer &scorer, const InputText &input, int k) {
  if (k < 1) throw ConfigError("beam size must be at least 1");
  ValidateInput(input);
  const std::size_t n = input.words.size();
  const int num_tags = static_cast<int>(scorer.tag_set().size());

  std::vector<Hypothesis> beam(1);
  std::vector<Hypothesis> expanded;
  for (std::size_t w = 0; w < n; ++w) {
    expanded.clear();
    for (const auto &hyp : beam) {
      std::vector<double> logp = scorer.NextLogProbs(input, hyp.ids);
      for (TagId t = 0; t < num_tags; ++t) {
        if (logp[t] == kLogZero) continue;
        Hypothesis next = hyp;
        next.ids.push_back(t);
        next.unit_logprobs.push_back(logp[t]);
        next.total += logp[t];
        expanded.push_back(std::move(next));
      }
    }
    if (expanded.empty()) {
      throw DecodeError("no tag sequence has positive probability for '" + input.id + "'");
    }
    std::size_t keep = std::min<std::size_t>(k, expanded.size());
    std::partial_sort(expanded.begin(), expanded.begin() + keep, expanded.end(), Better);
    expanded.resize(keep);
    std::swap(beam, expanded);
  }

  BeamResult result;
  result.id = input.id;
  result.n_words = static_cast<int>(n);
  result.k = k;
  for (std::size_t i = 0; i < beam.size(); ++i) {
    result.candidates.push_back(MakeCandidate(static_cast<int>(i) + 1,
                                              scorer.ToTags(beam[i].ids),
                                              std::move(beam[i].unit_logprobs)));
  }
  return result;
}

std::vector<double> force_score(const Scorer &scorer, const InputText &input,
                                std::span<const Tag> prefix,
                                std::span<const Tag> continuation) {
  ValidateInput(input);
  if (prefix.size() + continuation.size() > input.words.size()) {
    throw AlignmentError("prefix and continuation cover " +
                         std::to_string(prefix.size() + continuation.size()) +
                         " units but the input has " +
                         std::to_string(input.words.size()) + " words");
  }
  std::vector<TagId> ids = scorer.ToIds(prefix);
  std::vector<TagId> cont = scorer.ToIds(continuation);
  std::vector<double> out;
  out.reserve(cont.size());
  for (TagId t : cont) {
    if (!out.empty() && out.back() == kLogZero) {
      out.push_back(kLogZero);
      continue;
    }
    out.push_back(scorer.NextLogProbs(input, ids)[t]);
    ids.push_back(t);
  }
  return out;
}

}  // namespace seqconf
