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

// Reference generative model: a first-order HMM over BIO tags that emits
// words. Every quantity the confidence estimators approximate has an exact
// value under this model, which makes it the ground truth for tests.
//
// Conditionals see the whole sentence through backward messages:
//
//   p(t_w | t_{w-1}, x) ∝ trans(t_{w-1}, t_w) · emit(t_w, x_w) · beta_w(t_w)
//
// where beta_w(t) = p(x_{w+1..n-1} | t_w = t). All chains are computed in log
// space.

#ifndef SEQCONF_HMM_H_
#define SEQCONF_HMM_H_

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "seqconf/scorer.h"
#include "seqconf/seqlabel.h"

namespace seqconf {

// Linear-space model tables, row-major.
struct HmmParams {
  std::vector<Tag> tag_set;
  std::vector<std::string> vocab;
  std::vector<double> initial;                  // [tag]
  std::vector<std::vector<double>> transition;  // [from][to]
  std::vector<std::vector<double>> emission;    // [tag][word]
};

// Tolerance on probability row sums.
inline constexpr double kRowSumTolerance = 1e-9;

// Checks shapes, non-negativity, row sums and that no BIO-violating move
// (an I tag at the start, after O, or after another label) has mass.
// Throws ConfigError.
void ValidateParams(const HmmParams &params);

// Labels referenced by the tag set.
LabelSet LabelsOf(std::span<const Tag> tag_set);

class HmmModel : public Scorer {
 public:
  // Throws ConfigError when the params are invalid.
  explicit HmmModel(HmmParams params);

  const HmmParams &params() const { return params_; }
  const std::vector<Tag> &tag_set() const override { return params_.tag_set; }
  int num_tags() const { return static_cast<int>(params_.tag_set.size()); }
  const LabelSet &labels() const { return labels_; }

  // Word ids for a sentence. Throws VocabError on unknown words.
  std::vector<int> WordIds(const InputText &input) const;

  std::vector<double> NextLogProbs(const InputText &input,
                                   std::span<const TagId> prefix) const override;

  // log p(x) summed over all tag sequences.
  double LogEvidence(const InputText &input) const;

  // log p(tags, x).
  double LogJoint(const InputText &input, std::span<const TagId> tags) const;

  // log p(tags | x).
  double LogPosterior(const InputText &input, std::span<const TagId> tags) const;

  // log of the total mass of tag sequences allowed by `allowed[w][t]`.
  double ConstrainedLogMass(std::span<const int> word_ids,
                            const std::vector<std::vector<char>> &allowed) const;

  double log_initial(int t) const { return log_initial_[t]; }
  double log_transition(int from, int to) const { return log_transition_[from][to]; }
  double log_emission(int t, int word) const { return log_emission_[t][word]; }

 private:
  std::vector<std::vector<double>> LogBackward(std::span<const int> word_ids) const;

  HmmParams params_;
  LabelSet labels_;
  std::map<std::string, int, std::less<>> word_index_;
  std::vector<double> log_initial_;
  std::vector<std::vector<double>> log_transition_;
  std::vector<std::vector<double>> log_emission_;
};

// Exact posterior of the tag of word prefix.size() given the full sentence
// and the prefix, in linear space. Throws VocabError for unknown words and
// UsageError when the prefix is impossible or too long.
std::vector<double> posterior_next_tag(const HmmModel &model, const InputText &input,
                                       std::span<const TagId> prefix);

// Posterior that words [start, end) carry exactly the span's tag pattern
// (B-l I-l ... or a single O), with no constraint on the following tag.
// Throws RangeError for spans outside the sentence or whose phrase disagrees
// with the words, and FormatError for labels the model does not know.
double exact_pattern_marginal(const HmmModel &model, const InputText &input,
                              const LabeledSpan &span);

// Posterior that the segmentation contains the span: the pattern plus a right
// boundary (the tag at `end` is not I-l).
double exact_span_marginal(const HmmModel &model, const InputText &input,
                           const LabeledSpan &span);

inline constexpr std::uint64_t kDefaultEnumerationCap = 200000;

struct ScoredSequence {
  std::vector<TagId> tags;
  double probability = 0.0;  // p(tags | x); zero for impossible sequences
};

// Every one of the |T|^n tag sequences with its posterior, in lexicographic
// tag-id order. Throws CapacityError when |T|^n exceeds `cap`.
std::vector<ScoredSequence> enumerate_all(const HmmModel &model, const InputText &input,
                                          std::uint64_t cap = kDefaultEnumerationCap);

// |T|^n, saturating at UINT64_MAX.
std::uint64_t SequenceSpaceSize(int num_tags, std::size_t length);

struct LabeledExample {
  InputText input;
  GoldAnnotation gold;
};

// i.i.d. sentences from the HMM joint with lengths uniform in
// [min_length, max_length]. Ids are "<id_prefix>-<index>". Deterministic for
// a given seed. Throws ConfigError on bad counts, lengths or params.
std::vector<LabeledExample> sample_corpus(const HmmParams &params, int count,
                                          std::pair<int, int> length_range,
                                          std::uint64_t seed,
                                          const std::string &id_prefix = "ex");

}  // namespace seqconf

#endif  // SEQCONF_HMM_H_
