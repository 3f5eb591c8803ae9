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

// Span-level confidence estimators over a beam of decoded candidates.
//
//   Span       product of the span's unit probabilities under the top-1
//              prefix.
//   AggSpan    span probability averaged over the unique prefixes (contexts)
//              found in the top-k candidates, weighted by prefix probability:
//                sum_z p(y|x,z) p(z|x) / sum_z p(z|x)
//   AggSeq     probability mass of the top-k candidates whose segmentation
//              contains the span, over the mass of all top-k candidates.
//   AdaAggSeq  AggSeq over the top-k' candidates, k' = max(2, min(a+b, k)),
//              a = number of non-O spans in the top-1 candidate.
//
// Two spans are the same when start, end, label and phrase agree. AggSpan
// compares only the tag pattern over [start, end); AggSeq requires the
// candidate's segmentation to contain the span, right boundary included.
//
// Malformed candidates are dropped from both numerator and denominator.

#ifndef SEQCONF_CONFIDENCE_H_
#define SEQCONF_CONFIDENCE_H_

#include <string_view>
#include <vector>

#include "seqconf/beam.h"
#include "seqconf/scorer.h"
#include "seqconf/seqlabel.h"

namespace seqconf {

enum class Method { kSpan, kAggSpan, kAggSeq, kAdaAggSeq };

// Where AggSpan gets p(y|x,z): teacher-forced from a scorer for every unique
// context (rescoring), or from the recorded log-probabilities of candidates
// that themselves carry the span's pattern (trace).
enum class AggSpanMode { kRescoring, kTrace };

std::string_view MethodName(Method method);
// Throws ConfigError for unknown names.
Method ParseMethod(std::string_view name);
std::vector<Method> AllMethods();

std::string_view AggSpanModeName(AggSpanMode mode);
AggSpanMode ParseAggSpanMode(std::string_view name);

inline constexpr int kDefaultBeamSize = 5;
inline constexpr int kDefaultAdaptiveBeamSize = 10;
inline constexpr int kDefaultAdaptiveOffset = 1;

struct MethodConfig {
  Method method = Method::kSpan;
  int k = kDefaultBeamSize;
  int b = kDefaultAdaptiveOffset;
  AggSpanMode aggspan_mode = AggSpanMode::kRescoring;
};

// Throws ConfigError unless k >= 1, b >= 0 and, for AdaAggSeq, k >= 2.
void ValidateConfig(const MethodConfig &config);

struct ConfidenceScore {
  double value = 0.0;  // in [0, 1]
  Method method = Method::kSpan;
  LabeledSpan span;
  int effective_k = 1;  // candidates actually consulted
};

ConfidenceScore span_prob(const InputText &input, const BeamCandidate &top1,
                          const LabeledSpan &span);

// `scorer` is required in rescoring mode and ignored in trace mode. Uses the
// first min(config.k, |candidates|) candidates.
ConfidenceScore agg_span(const InputText &input, const BeamResult &beam,
                         const LabeledSpan &span, const Scorer *scorer,
                         const MethodConfig &config);

// Uses the first min(k, |candidates|) candidates.
ConfidenceScore agg_seq(const InputText &input, const BeamResult &beam,
                        const LabeledSpan &span, int k);

// k' = max(2, min(a + b, k)). Throws ConfigError for k < 2 or negative a, b.
int adaptive_k(int a, int b, int k);

ConfidenceScore ada_agg_seq(const InputText &input, const BeamResult &beam,
                            const LabeledSpan &span, const MethodConfig &config);

struct EstimateStats {
  int dropped_candidates = 0;  // malformed candidates inside the consulted top-k
  int degenerate_spans = 0;    // trace-mode AggSpan spans with no usable context
};

struct ScoredBeam {
  std::vector<ConfidenceScore> scores;  // top-1 spans, left to right
  EstimateStats stats;
};

// Scores every span of the top-1 candidate under config.method. Throws
// DecodeError when the top-1 candidate is malformed. Trace-mode AggSpan spans
// without a usable context are skipped and counted.
ScoredBeam score_all(const InputText &input, const BeamResult &beam,
                     const MethodConfig &config, const Scorer *scorer = nullptr);

}  // namespace seqconf

#endif  // SEQCONF_CONFIDENCE_H_
