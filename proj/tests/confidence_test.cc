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

#include <cmath>
#include <functional>
#include <map>
#include <random>

#include "gtest/gtest.h"
#include "oracles.h"
#include "seqconf/errors.h"
#include "seqconf/hmm.h"
#include "seqconf/presets.h"

namespace seqconf {
namespace {

const Tag kO = Tag::Outside();
const Tag kBX = Tag::Begin("X");
const Tag kIX = Tag::Inside("X");

InputText Words(int n, const std::string &id = "s") {
  InputText x{id, {}};
  for (int i = 0; i < n; ++i) x.words.push_back("w" + std::to_string(i));
  return x;
}

std::vector<double> Logs(std::initializer_list<double> probs) {
  std::vector<double> out;
  for (double p : probs) out.push_back(std::log(p));
  return out;
}

BeamResult MakeBeam(const InputText &x, std::vector<std::pair<TagSequence, std::vector<double>>> rows,
                    int k = 0) {
  BeamResult beam;
  beam.id = x.id;
  beam.n_words = static_cast<int>(x.words.size());
  beam.k = k > 0 ? k : static_cast<int>(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    beam.candidates.push_back(MakeCandidate(static_cast<int>(i) + 1, std::move(rows[i].first),
                                            std::move(rows[i].second)));
  }
  return beam;
}

// Conditionals looked up by prefix length and previous tag.
class TableScorer : public Scorer {
 public:
  using Fn = std::function<std::vector<double>(std::span<const TagId>)>;
  explicit TableScorer(Fn fn) : fn_(std::move(fn)) {}
  const std::vector<Tag> &tag_set() const override { return tags_; }
  std::vector<double> NextLogProbs(const InputText &, std::span<const TagId> prefix) const override {
    auto probs = fn_(prefix);
    for (double &p : probs) p = std::log(p);
    return probs;
  }

 private:
  Fn fn_;
  std::vector<Tag> tags_{kO, kBX, kIX};
};

TEST(Names, RoundTrip) {
  for (Method m : AllMethods()) EXPECT_EQ(ParseMethod(MethodName(m)), m);
  EXPECT_THROW(ParseMethod("span"), ConfigError);
  EXPECT_EQ(ParseAggSpanMode("trace"), AggSpanMode::kTrace);
  EXPECT_EQ(ParseAggSpanMode(AggSpanModeName(AggSpanMode::kRescoring)), AggSpanMode::kRescoring);
  EXPECT_THROW(ParseAggSpanMode("exact"), ConfigError);
}

TEST(ValidateConfig, Bounds) {
  EXPECT_NO_THROW(ValidateConfig({Method::kAggSeq, 1, 0}));
  EXPECT_THROW(ValidateConfig({Method::kAggSeq, 0, 0}), ConfigError);
  EXPECT_THROW(ValidateConfig({Method::kAggSeq, 5, -1}), ConfigError);
  EXPECT_THROW(ValidateConfig({Method::kAdaAggSeq, 1, 1}), ConfigError);
}

TEST(SpanProb, ProductOfUnitProbabilities) {
  InputText x = Words(3);
  BeamCandidate top = MakeCandidate(1, {kO, kBX, kIX}, Logs({0.5, 0.9, 0.8}));
  EXPECT_NEAR(span_prob(x, top, {1, 3, "X", "w1 w2"}).value, 0.72, 1e-15);
  EXPECT_NEAR(span_prob(x, top, {0, 1, "O", "w0"}).value, 0.5, 1e-15);
  EXPECT_EQ(span_prob(x, top, {0, 1, "O", "w0"}).effective_k, 1);

  BeamCandidate sure = MakeCandidate(1, {kO, kBX, kIX}, {0.0, 0.0, 0.0});
  EXPECT_EQ(span_prob(x, sure, {1, 3, "X", "w1 w2"}).value, 1.0);
  EXPECT_EQ(span_prob(x, sure, {0, 1, "O", "w0"}).value, 1.0);
}

TEST(SpanProb, Errors) {
  InputText x = Words(3);
  BeamCandidate top = MakeCandidate(1, {kO, kBX, kIX}, Logs({0.5, 0.9, 0.8}));
  EXPECT_THROW(span_prob(x, top, {1, 2, "X", "w1"}), UsageError);
  EXPECT_THROW(span_prob(x, top, {1, 3, "Y", "w1 w2"}), UsageError);
  BeamCandidate no_units = top;
  no_units.unit_logprobs.reset();
  EXPECT_THROW(span_prob(x, no_units, {1, 3, "X", "w1 w2"}), UsageError);
}

// Contexts z1 = [O] (p 0.06) and z2 = [B-X] (p 0.02) followed by B-X with
// probabilities 0.9 and 0.5.
TEST(AggSpan, TwoContextsWeightedAverage) {
  InputText x = Words(2);
  BeamResult beam = MakeBeam(x, {{{kO, kBX}, Logs({0.06, 0.9})},
                                 {{kBX, kBX}, Logs({0.02, 0.5})}});
  LabeledSpan span{1, 2, "X", "w1"};

  MethodConfig trace{Method::kAggSpan, 5, 1, AggSpanMode::kTrace};
  EXPECT_NEAR(agg_span(x, beam, span, nullptr, trace).value, 0.8, 1e-12);

  TableScorer scorer([](std::span<const TagId> prefix) -> std::vector<double> {
    if (prefix.empty()) return {0.06, 0.02, 0.92};
    if (prefix[0] == 0) return {0.1, 0.9, 1e-300};
    return {0.25, 0.5, 0.25};
  });
  MethodConfig rescoring{Method::kAggSpan, 5, 1, AggSpanMode::kRescoring};
  EXPECT_NEAR(agg_span(x, beam, span, &scorer, rescoring).value, 0.8, 1e-12);
  EXPECT_THROW(agg_span(x, beam, span, nullptr, rescoring), UsageError);
}

TEST(AggSpan, RescoringCountsContextsWithoutThePattern) {
  // The second candidate has a different tag at word 1, so trace mode skips
  // its context while rescoring forces the pattern after it.
  InputText x = Words(2);
  BeamResult beam = MakeBeam(x, {{{kO, kBX}, Logs({0.06, 0.9})},
                                 {{kBX, kO}, Logs({0.02, 0.25})}});
  LabeledSpan span{1, 2, "X", "w1"};
  TableScorer scorer([](std::span<const TagId> prefix) -> std::vector<double> {
    if (prefix.empty()) return {0.06, 0.02, 0.92};
    if (prefix[0] == 0) return {0.1, 0.9, 1e-300};
    return {0.25, 0.5, 0.25};
  });
  EXPECT_NEAR(agg_span(x, beam, span, nullptr, {Method::kAggSpan, 5, 1, AggSpanMode::kTrace}).value,
              0.9, 1e-12);
  EXPECT_NEAR(agg_span(x, beam, span, &scorer, {Method::kAggSpan, 5, 1}).value, 0.8, 1e-12);
}

TEST(AggSpan, DuplicateContextsCountOnce) {
  InputText x = Words(3);
  BeamResult beam = MakeBeam(x, {{{kO, kBX, kO}, Logs({0.06, 0.9, 0.5})},
                                 {{kO, kBX, kBX}, Logs({0.06, 0.9, 0.4})},
                                 {{kBX, kBX, kO}, Logs({0.02, 0.5, 0.5})}});
  LabeledSpan span{1, 2, "X", "w1"};
  MethodConfig trace{Method::kAggSpan, 5, 1, AggSpanMode::kTrace};
  EXPECT_NEAR(agg_span(x, beam, span, nullptr, trace).value, 0.8, 1e-12);
}

TEST(AggSpan, SingleContextEqualsSpanExactly) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 500; ++trial) {
    auto rb = oracle::MakeRandomBeam(rng, 1 + trial % 6, 1 + trial % 5);
    const auto &top = rb.beam.candidates.front();
    for (const auto &span : segment_spans(rb.input.words, *top.tags)) {
      std::set<TagSequence> prefixes;
      for (const auto &c : rb.beam.candidates) {
        if (std::equal(top.tags->begin() + span.start, top.tags->begin() + span.end,
                       c.tags->begin() + span.start)) {
          prefixes.insert(TagSequence(c.tags->begin(), c.tags->begin() + span.start));
        }
      }
      if (prefixes.size() != 1) continue;
      MethodConfig trace{Method::kAggSpan, 5, 1, AggSpanMode::kTrace};
      ASSERT_EQ(agg_span(rb.input, rb.beam, span, nullptr, trace).value,
                span_prob(rb.input, top, span).value);
    }
  }
}

TEST(AggSeq, RatioOfContainingCandidates) {
  InputText x = Words(2);
  BeamResult beam = MakeBeam(x, {{{kBX, kO}, Logs({0.1, 0.5})},
                                 {{kBX, kIX}, Logs({0.1, 0.3})},
                                 {{kBX, kBX}, Logs({0.1, 0.2})}});
  LabeledSpan span{0, 1, "X", "w0"};
  EXPECT_NEAR(agg_seq(x, beam, span, 3).value, 0.7, 1e-12);
  EXPECT_EQ(agg_seq(x, beam, span, 3).effective_k, 3);
  EXPECT_EQ(agg_seq(x, beam, span, 1).value, 1.0);
  EXPECT_EQ(agg_seq(x, beam, span, 8).effective_k, 3);
  EXPECT_NEAR(agg_seq(x, beam, span, 2).value, 0.625, 1e-12);
}

TEST(AggSeq, SequenceLevelScoresSuffice) {
  InputText x = Words(2);
  BeamResult beam = MakeBeam(x, {{{kBX, kO}, Logs({0.1, 0.5})},
                                 {{kBX, kIX}, Logs({0.1, 0.3})},
                                 {{kBX, kBX}, Logs({0.1, 0.2})}});
  for (auto &c : beam.candidates) c.unit_logprobs.reset();
  EXPECT_NEAR(agg_seq(x, beam, {0, 1, "X", "w0"}, 3).value, 0.7, 1e-12);
  EXPECT_THROW(span_prob(x, beam.candidates[0], {0, 1, "X", "w0"}), UsageError);
}

TEST(AggSeq, MalformedCandidatesLeaveBothSums) {
  InputText x = Words(2);
  BeamResult beam = MakeBeam(x, {{{kBX, kO}, Logs({0.1, 0.5})},
                                 {{kBX, kIX}, Logs({0.1, 0.3})},
                                 {{kBX, kBX}, Logs({0.1, 0.2})}});
  beam.candidates[1].tags.reset();
  beam.candidates[1].malformed_reason = "flagged";
  // (0.05 + 0.02) / (0.05 + 0.02)
  EXPECT_EQ(agg_seq(x, beam, {0, 1, "X", "w0"}, 3).value, 1.0);
  EXPECT_NEAR(agg_seq(x, beam, {1, 2, "O", "w1"}, 3).value, 5.0 / 7.0, 1e-12);
}

TEST(AggSeq, KOfOneIsAlwaysOne) {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 1000; ++trial) {
    auto rb = oracle::MakeRandomBeam(rng, 1 + trial % 7, 1 + trial % 6);
    for (const auto &span : segment_spans(rb.input.words, *rb.beam.candidates[0].tags)) {
      ASSERT_EQ(agg_seq(rb.input, rb.beam, span, 1).value, 1.0);
    }
  }
}

TEST(AggSeq, RemovingNonContainingCandidateNeverLowersValue) {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 300; ++trial) {
    auto rb = oracle::MakeRandomBeam(rng, 2 + trial % 5, 3 + trial % 4);
    const int size = static_cast<int>(rb.beam.candidates.size());
    for (const auto &span : segment_spans(rb.input.words, *rb.beam.candidates[0].tags)) {
      double before = agg_seq(rb.input, rb.beam, span, size).value;
      for (int drop = 1; drop < size; ++drop) {
        const auto &c = rb.beam.candidates[drop];
        if (ContainsSpan(segment_spans(rb.input.words, *c.tags), span)) continue;
        BeamResult smaller = rb.beam;
        smaller.candidates.erase(smaller.candidates.begin() + drop);
        for (int i = 0; i < size - 1; ++i) smaller.candidates[i].rank = i + 1;
        ASSERT_GE(agg_seq(rb.input, smaller, span, size).value, before - 1e-15);
      }
    }
  }
}

TEST(Estimators, ScaleInvariance) {
  std::mt19937_64 rng(51);
  for (int trial = 0; trial < 200; ++trial) {
    auto rb = oracle::MakeRandomBeam(rng, 2 + trial % 5, 2 + trial % 4);
    BeamResult scaled = rb.beam;
    for (auto &c : scaled.candidates) {
      (*c.unit_logprobs)[0] += std::log(0.37);
      c.total_logprob += std::log(0.37);
    }
    MethodConfig trace{Method::kAggSpan, 10, 1, AggSpanMode::kTrace};
    for (const auto &span : segment_spans(rb.input.words, *rb.beam.candidates[0].tags)) {
      ASSERT_NEAR(agg_seq(rb.input, rb.beam, span, 10).value,
                  agg_seq(rb.input, scaled, span, 10).value, 1e-12);
      if (span.start == 0) continue;
      ASSERT_NEAR(agg_span(rb.input, rb.beam, span, nullptr, trace).value,
                  agg_span(rb.input, scaled, span, nullptr, trace).value, 1e-12);
    }
  }
}

TEST(Estimators, ValuesStayInUnitInterval) {
  std::mt19937_64 rng(61);
  for (int trial = 0; trial < 1000; ++trial) {
    auto rb = oracle::MakeRandomBeam(rng, 1 + trial % 7, 1 + trial % 8);
    for (Method m : AllMethods()) {
      MethodConfig config{m, 8, 1, AggSpanMode::kTrace};
      for (const auto &s : score_all(rb.input, rb.beam, config).scores) {
        ASSERT_GE(s.value, 0.0);
        ASSERT_LE(s.value, 1.0);
      }
    }
  }
}

TEST(AdaptiveK, Clamps) {
  EXPECT_EQ(adaptive_k(2, 1, 10), 3);
  EXPECT_EQ(adaptive_k(0, 1, 10), 2);
  EXPECT_EQ(adaptive_k(15, 3, 10), 10);
  EXPECT_EQ(adaptive_k(0, 0, 2), 2);
  EXPECT_THROW(adaptive_k(1, 1, 1), ConfigError);
  EXPECT_THROW(adaptive_k(-1, 1, 5), ConfigError);
}

TEST(AdaAggSeq, SmallerBeamForFewSpans) {
  InputText x = Words(2);
  BeamResult beam = MakeBeam(x, {{{kO, kO}, Logs({0.8, 0.5})},
                                 {{kO, kBX}, Logs({0.8, 0.3})},
                                 {{kBX, kO}, Logs({0.2, 0.6})},
                                 {{kBX, kIX}, Logs({0.2, 0.4})}});
  LabeledSpan span{0, 1, "O", "w0"};
  MethodConfig config{Method::kAdaAggSeq, 4, 1};
  ConfidenceScore ada = ada_agg_seq(x, beam, span, config);
  EXPECT_EQ(ada.value, 1.0);
  EXPECT_EQ(ada.effective_k, 2);
  EXPECT_EQ(ada.method, Method::kAdaAggSeq);
  EXPECT_LT(agg_seq(x, beam, span, 4).value, 1.0);
}

TEST(AdaAggSeq, FullBeamWhenSpansExceedK) {
  std::mt19937_64 rng(71);
  for (int trial = 0; trial < 300; ++trial) {
    auto rb = oracle::MakeRandomBeam(rng, 2 + trial % 6, 2 + trial % 6);
    const auto spans = segment_spans(rb.input.words, *rb.beam.candidates[0].tags);
    const int a = CountNonOutside(spans);
    for (int b : {0, 1, 3}) {
      for (int k : {2, 3, 5}) {
        int kp = adaptive_k(a, b, k);
        ASSERT_GE(kp, 2);
        ASSERT_LE(kp, k);
        for (const auto &span : spans) {
          double ada = ada_agg_seq(rb.input, rb.beam, span, {Method::kAdaAggSeq, k, b}).value;
          ASSERT_EQ(ada, agg_seq(rb.input, rb.beam, span, kp).value);
          if (a + b >= k) ASSERT_EQ(ada, agg_seq(rb.input, rb.beam, span, k).value);
        }
      }
    }
  }
}

// Frozen from an independent enumeration of the tiny preset on "a b c".
TEST(Estimators, TinyPresetFrozenValues) {
  HmmModel model(TinyPreset());
  InputText x{"t", {"a", "b", "c"}};
  BeamResult beam = beam_search(model, x, 3);
  LabeledSpan entity{1, 3, "X", "b c"}, outside{0, 1, "O", "a"};
  EXPECT_NEAR(agg_seq(x, beam, entity, 3).value, 0.5172413793103449, 1e-12);
  EXPECT_EQ(agg_seq(x, beam, outside, 3).value, 1.0);
  EXPECT_NEAR(span_prob(x, beam.candidates[0], entity).value, 0.39823008849557523, 1e-12);
  EXPECT_NEAR(span_prob(x, beam.candidates[0], outside).value, 0.8366927190456606, 1e-12);
  MethodConfig rescoring{Method::kAggSpan, 3, 1};
  EXPECT_EQ(agg_span(x, beam, entity, &model, rescoring).value,
            span_prob(x, beam.candidates[0], entity).value);
}

TEST(Estimators, ExhaustiveBeamMatchesExactMarginals) {
  std::mt19937_64 rng(81);
  for (int trial = 0; trial < 25; ++trial) {
    HmmParams p = RandomHmmParams(1 + trial % 2, 4, 700 + trial);
    HmmModel model(p);
    InputText x = oracle::RandomSentence(p, 1 + trial % 5, rng);
    const int full = static_cast<int>(SequenceSpaceSize(model.num_tags(), x.words.size()));
    BeamResult beam = beam_search(model, x, full);
    MethodConfig rescoring{Method::kAggSpan, full, 1};
    for (const auto &span : segment_spans(x.words, *beam.candidates[0].tags)) {
      ASSERT_NEAR(agg_span(x, beam, span, &model, rescoring).value,
                  exact_pattern_marginal(model, x, span), 1e-9);
      ASSERT_NEAR(agg_seq(x, beam, span, full).value, exact_span_marginal(model, x, span), 1e-9);
    }
  }
}

TEST(ScoreAll, OneScorePerTopSpanInOrder) {
  InputText x = Words(4);
  BeamResult beam = MakeBeam(x, {{{kBX, kIX, kO, kBX}, Logs({0.9, 0.8, 0.7, 0.6})},
                                 {{kBX, kO, kO, kBX}, Logs({0.9, 0.2, 0.7, 0.6})}});
  ScoredBeam scored = score_all(x, beam, {Method::kSpan, 5, 1});
  ASSERT_EQ(scored.scores.size(), 3u);
  EXPECT_EQ(scored.scores[0].span, (LabeledSpan{0, 2, "X", "w0 w1"}));
  EXPECT_EQ(scored.scores[1].span, (LabeledSpan{2, 3, "O", "w2"}));
  EXPECT_EQ(scored.scores[2].span, (LabeledSpan{3, 4, "X", "w3"}));
  for (const auto &s : scored.scores) {
    EXPECT_EQ(s.value, span_prob(x, beam.candidates[0], s.span).value);
  }
  for (Method m : AllMethods()) {
    EXPECT_EQ(score_all(x, beam, {m, 5, 1, AggSpanMode::kTrace}).scores.size(), 3u);
  }
  EXPECT_THROW(score_all(x, beam, {Method::kAggSpan, 5, 1}), UsageError);
}

TEST(ScoreAll, CountsDroppedCandidatesAndRejectsBadTop) {
  InputText x = Words(2);
  BeamResult beam = MakeBeam(x, {{{kBX, kO}, Logs({0.1, 0.5})},
                                 {{kBX, kIX}, Logs({0.1, 0.3})},
                                 {{kBX, kBX}, Logs({0.1, 0.2})}});
  beam.candidates[2].tags.reset();
  beam.candidates[2].malformed_reason = "bad";
  EXPECT_EQ(score_all(x, beam, {Method::kAggSeq, 5, 1}).stats.dropped_candidates, 1);
  EXPECT_EQ(score_all(x, beam, {Method::kAggSeq, 2, 1}).stats.dropped_candidates, 0);
  EXPECT_EQ(score_all(x, beam, {Method::kSpan, 5, 1}).stats.dropped_candidates, 0);

  BeamResult bad_top = beam;
  bad_top.candidates[0].tags.reset();
  bad_top.candidates[0].malformed_reason = "bad";
  EXPECT_THROW(score_all(x, bad_top, {Method::kAggSeq, 5, 1}), DecodeError);

  EXPECT_THROW(score_all(Words(2, "other"), beam, {Method::kAggSeq, 5, 1}), UsageError);
  EXPECT_THROW(score_all(Words(3), beam, {Method::kAggSeq, 5, 1}), UsageError);
}

}  // namespace
}  // namespace seqconf
