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

#ifndef SEQCONF_BEAM_H_
#define SEQCONF_BEAM_H_

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "seqconf/scorer.h"
#include "seqconf/seqlabel.h"

namespace seqconf {

// Allowed gap between total_logprob and the sum of unit_logprobs.
inline constexpr double kTotalLogprobTolerance = 1e-6;

// One decoded output. Candidates read from files may be malformed; they keep
// their raw units and carry no tags.
struct BeamCandidate {
  int rank = 0;  // 1-based
  std::vector<std::string> units;
  std::optional<TagSequence> tags;
  // One natural-log probability per word unit. Absent when the producer only
  // exposes sequence-level scores.
  std::optional<std::vector<double>> unit_logprobs;
  double total_logprob = 0.0;
  std::string malformed_reason;  // set iff !tags

  bool well_formed() const { return tags.has_value(); }
};

struct BeamResult {
  std::string id;
  int n_words = 0;
  int k = 0;
  std::vector<BeamCandidate> candidates;  // rank order, descending total_logprob
};

// A well-formed candidate; total_logprob is the sum of unit_logprobs.
BeamCandidate MakeCandidate(int rank, TagSequence tags, std::vector<double> unit_logprobs);

// Decodes a candidate's raw units and checks its scores against the sentence
// length. On failure the candidate stays in place with tags cleared and the
// reason recorded; nothing is thrown.
void ResolveCandidate(BeamCandidate &candidate, int n_words, const LabelSet *labels);

// Throws FormatError unless ranks run 1..|candidates|, there are between 1 and
// k candidates, totals are non-increasing and well-formed candidates have
// distinct tag sequences.
void CheckBeamInvariants(const BeamResult &beam);

// Width-k beam search over word units without length normalization.
// Expansions with zero probability are never kept. Ties are broken by
// lexicographic tag-id order, so decoding is deterministic.
// Throws ConfigError for k < 1 and DecodeError if no sequence has positive
// probability.
BeamResult beam_search(const Scorer &scorer, const InputText &input, int k);

// Teacher-forced log-probabilities of `continuation` after `prefix`, one per
// unit. Units after an impossible one are reported as -inf without querying
// the scorer. Throws AlignmentError if the two together exceed the sentence.
std::vector<double> force_score(const Scorer &scorer, const InputText &input,
                                std::span<const Tag> prefix,
                                std::span<const Tag> continuation);

}  // namespace seqconf

#endif  // SEQCONF_BEAM_H_
