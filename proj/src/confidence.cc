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

#include "seqconf/confidence.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "seqconf/errors.h"
#include "seqconf/logmath.h"

namespace seqconf {

std::string_view MethodName(Method method) {
  switch (method) {
    case Method::kSpan:
      return "Span";
    case Method::kAggSpan:
      return "AggSpan";
    case Method::kAggSeq:
      return "AggSeq";
    case Method::kAdaAggSeq:
      return "AdaAggSeq";
  }
  return "";
}

Method ParseMethod(std::string_view name) {
  for (Method m : AllMethods()) {
    if (MethodName(m) == name) return m;
  }
  throw ConfigError("unknown method '" + std::string(name) +
                    "' (expected Span, AggSpan, AggSeq or AdaAggSeq)");
}

std::vector<Method> AllMethods() {
  return {Method::kSpan, Method::kAggSpan, Method::kAggSeq, Method::kAdaAggSeq};
}

std::string_view AggSpanModeName(AggSpanMode mode) {
  return mode == AggSpanMode::kRescoring ? "rescoring" : "trace";
}

AggSpanMode ParseAggSpanMode(std::string_view name) {
  if (name == "rescoring") return AggSpanMode::kRescoring;
  if (name == "trace") return AggSpanMode::kTrace;
  throw ConfigError("unknown AggSpan mode '" + std::string(name) + "'");
}

void ValidateConfig(const MethodConfig &config) {
  if (config.k < 1) throw ConfigError("k must be at least 1");
  if (config.b < 0) throw ConfigError("b must be non-negative");
  if (config.method == Method::kAdaAggSeq && config.k < 2) {
    throw ConfigError("AdaAggSeq needs k >= 2");
  }
}

namespace {

void CheckPairing(const InputText &input, const BeamResult &beam) {
  if (input.id != beam.id) {
    throw UsageError("beam id '" + beam.id + "' does not match input id '" + input.id + "'");
  }
  if (beam.n_words != static_cast<int>(input.words.size())) {
    throw UsageError("beam '" + beam.id + "' was decoded for " +
                     std::to_string(beam.n_words) + " words, input has " +
                     std::to_string(input.words.size()));
  }
  if (beam.candidates.empty()) throw UsageError("beam '" + beam.id + "' is empty");
}

const TagSequence &TopTags(const BeamResult &beam) {
  const BeamCandidate &top1 = beam.candidates.front();
  if (!top1.well_formed()) {
    throw DecodeError("top-1 candidate of '" + beam.id +
                      "' is malformed: " + top1.malformed_reason);
  }
  return *top1.tags;
}

void RequireTopSpan(const InputText &input, const TagSequence &top_tags,
                    const LabeledSpan &span) {
  if (!ContainsSpan(segment_spans(input.words, top_tags), span)) {
    throw UsageError("span '" + span.phrase + "' (" + span.label +
                     ") is not part of the top-1 segmentation");
  }
}

const std::vector<double> &UnitLogprobs(const BeamCandidate &c) {
  if (!c.unit_logprobs) {
    throw UsageError("candidate " + std::to_string(c.rank) +
                     " has only sequence-level scores; Span and AggSpan need "
                     "unit log-probabilities");
  }
  return *c.unit_logprobs;
}

double SumRange(const std::vector<double> &values, int start, int end) {
  return std::accumulate(values.begin() + start, values.begin() + end, 0.0);
}

std::size_t Considered(const BeamResult &beam, int k) {
  return std::min<std::size_t>(static_cast<std::size_t>(std::max(k, 1)),
                               beam.candidates.size());
}

double RatioOfMasses(const std::vector<double> &numerator,
                     const std::vector<double> &denominator) {
  double den = LogSumExp(denominator);
  if (den == kLogZero) throw DegenerateInputError("candidates carry no probability mass");
  double num = LogSumExp(numerator);
  if (num == kLogZero) return 0.0;
  return std::clamp(std::exp(num - den), 0.0, 1.0);
}

}  // namespace

ConfidenceScore span_prob(const InputText &input, const BeamCandidate &top1,
                          const LabeledSpan &span) {
  if (!top1.well_formed()) {
    throw DecodeError("top-1 candidate is malformed: " + top1.malformed_reason);
  }
  RequireTopSpan(input, *top1.tags, span);
  const auto &lp = UnitLogprobs(top1);
  double value = std::clamp(std::exp(SumRange(lp, span.start, span.end)), 0.0, 1.0);
  return {value, Method::kSpan, span, 1};
}

ConfidenceScore agg_span(const InputText &input, const BeamResult &beam,
                         const LabeledSpan &span, const Scorer *scorer,
                         const MethodConfig &config) {
  CheckPairing(input, beam);
  const TagSequence &top_tags = TopTags(beam);
  RequireTopSpan(input, top_tags, span);
  const bool rescoring = config.aggspan_mode == AggSpanMode::kRescoring;
  if (rescoring && scorer == nullptr) {
    throw UsageError("AggSpan rescoring mode needs a scorer");
  }
  const std::span<const Tag> pattern(top_tags.begin() + span.start,
                                     top_tags.begin() + span.end);
  const std::size_t considered = Considered(beam, config.k);

  // Unique contexts in rank order: log p(z|x) and log p(y|x,z).
  std::set<std::vector<Tag>> seen;
  std::vector<double> context_logp, span_logp;
  std::vector<std::span<const Tag>> contexts;
  for (std::size_t i = 0; i < considered; ++i) {
    const BeamCandidate &c = beam.candidates[i];
    if (!c.well_formed()) continue;
    const TagSequence &tags = *c.tags;
    if (!rescoring && !std::equal(pattern.begin(), pattern.end(),
                                  tags.begin() + span.start)) {
      continue;
    }
    std::vector<Tag> prefix(tags.begin(), tags.begin() + span.start);
    if (!seen.insert(prefix).second) continue;
    const auto &lp = UnitLogprobs(c);
    context_logp.push_back(SumRange(lp, 0, span.start));
    contexts.emplace_back(tags.begin(), tags.begin() + span.start);
    if (!rescoring) span_logp.push_back(SumRange(lp, span.start, span.end));
  }
  if (contexts.empty()) {
    throw DegenerateInputError("no usable AggSpan context for span '" + span.phrase + "'");
  }
  if (rescoring) {
    for (const auto &z : contexts) {
      auto units = force_score(*scorer, input, z, pattern);
      span_logp.push_back(std::accumulate(units.begin(), units.end(), 0.0));
    }
  }

  ConfidenceScore score{0.0, Method::kAggSpan, span, static_cast<int>(considered)};
  if (contexts.size() == 1) {
    // With one context the weights cancel exactly.
    score.value = std::clamp(std::exp(span_logp.front()), 0.0, 1.0);
    return score;
  }
  std::vector<double> joint(context_logp.size());
  for (std::size_t i = 0; i < joint.size(); ++i) joint[i] = context_logp[i] + span_logp[i];
  score.value = RatioOfMasses(joint, context_logp);
  return score;
}

ConfidenceScore agg_seq(const InputText &input, const BeamResult &beam,
                        const LabeledSpan &span, int k) {
  if (k < 1) throw ConfigError("k must be at least 1");
  CheckPairing(input, beam);
  RequireTopSpan(input, TopTags(beam), span);
  const std::size_t considered = Considered(beam, k);
  std::vector<double> all, containing;
  for (std::size_t i = 0; i < considered; ++i) {
    const BeamCandidate &c = beam.candidates[i];
    if (!c.well_formed()) continue;
    all.push_back(c.total_logprob);
    if (ContainsSpan(segment_spans(input.words, *c.tags), span)) {
      containing.push_back(c.total_logprob);
    }
  }
  return {RatioOfMasses(containing, all), Method::kAggSeq, span,
          static_cast<int>(considered)};
}

int adaptive_k(int a, int b, int k) {
  if (k < 2) throw ConfigError("adaptive k needs k >= 2");
  if (a < 0 || b < 0) throw ConfigError("adaptive k needs a >= 0 and b >= 0");
  return std::max(2, std::min(a + b, k));
}

ConfidenceScore ada_agg_seq(const InputText &input, const BeamResult &beam,
                            const LabeledSpan &span, const MethodConfig &config) {
  CheckPairing(input, beam);
  int a = CountNonOutside(segment_spans(input.words, TopTags(beam)));
  ConfidenceScore score = agg_seq(input, beam, span, adaptive_k(a, config.b, config.k));
  score.method = Method::kAdaAggSeq;
  return score;
}

ScoredBeam score_all(const InputText &input, const BeamResult &beam,
                     const MethodConfig &config, const Scorer *scorer) {
  ValidateConfig(config);
  CheckPairing(input, beam);
  const TagSequence &top_tags = TopTags(beam);
  const auto spans = segment_spans(input.words, top_tags);

  ScoredBeam out;
  int consulted = 1;
  switch (config.method) {
    case Method::kSpan:
      break;
    case Method::kAggSpan:
    case Method::kAggSeq:
      consulted = config.k;
      break;
    case Method::kAdaAggSeq:
      consulted = adaptive_k(CountNonOutside(spans), config.b, config.k);
      break;
  }
  for (std::size_t i = 0; i < Considered(beam, consulted); ++i) {
    if (!beam.candidates[i].well_formed()) ++out.stats.dropped_candidates;
  }

  for (const auto &span : spans) {
    switch (config.method) {
      case Method::kSpan:
        out.scores.push_back(span_prob(input, beam.candidates.front(), span));
        break;
      case Method::kAggSpan:
        try {
          out.scores.push_back(agg_span(input, beam, span, scorer, config));
        } catch (const DegenerateInputError &) {
          ++out.stats.degenerate_spans;
        }
        break;
      case Method::kAggSeq:
        out.scores.push_back(agg_seq(input, beam, span, config.k));
        break;
      case Method::kAdaAggSeq:
        out.scores.push_back(ada_agg_seq(input, beam, span, config));
        break;
    }
  }
  return out;
}

}  // namespace seqconf
