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

// Expected calibration error over scored spans.
//
//   ECE = (1/N) sum_m N_m |ACC_m - MC_m|
//
// Bin m (1-based) holds confidences in ((m-1)/M, m/M]; a confidence of
// exactly 0 goes to bin 1. Bins keep additive sufficient statistics (count,
// correct count, confidence sum), so partial results over disjoint span sets
// merge exactly.

#ifndef SEQCONF_CALIBRATION_H_
#define SEQCONF_CALIBRATION_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "seqconf/confidence.h"

namespace seqconf {

inline constexpr int kDefaultBins = 10;

enum class SpanFilter { kAll, kNonOutside };

std::string_view SpanFilterName(SpanFilter filter);

// Throws RangeError unless 0 <= confidence <= 1 and ConfigError for M < 1.
int assign_bin(double confidence, int num_bins);

struct BinStats {
  int m = 1;
  double lower = 0.0;
  double upper = 0.0;
  std::int64_t count = 0;
  double sum_correct = 0.0;
  double sum_confidence = 0.0;

  std::optional<double> accuracy() const;
  std::optional<double> mean_confidence() const;
};

class BinAccumulator {
 public:
  explicit BinAccumulator(int num_bins);

  void Add(double confidence, bool correct);
  // Throws ConfigError when bin counts differ.
  void Merge(const BinAccumulator &other);

  int num_bins() const { return static_cast<int>(bins_.size()); }
  const std::vector<BinStats> &bins() const { return bins_; }
  std::int64_t total() const { return total_; }
  // Zero when empty.
  double Ece() const;

 private:
  std::vector<BinStats> bins_;
  std::int64_t total_ = 0;
};

struct JudgedScore {
  ConfidenceScore score;
  bool correct = false;
};

struct CalibrationSummary {
  SpanFilter filter = SpanFilter::kAll;
  int num_bins = kDefaultBins;
  std::int64_t n = 0;
  double ece = 0.0;
  std::vector<BinStats> bins;
};

// Throws EmptyEvaluationError when nothing survives the filter.
CalibrationSummary compute_ece(std::span<const JudgedScore> scored, int num_bins,
                               SpanFilter filter);

// Counts of what was left out of an evaluation.
struct ExclusionCounts {
  std::int64_t dropped_candidates = 0;
  std::int64_t degenerate_spans = 0;
  std::int64_t decode_errors = 0;
};

// Span-level micro precision/recall/F1 over non-O spans with exact matching.
struct SpanF1 {
  std::int64_t predicted = 0;
  std::int64_t gold = 0;
  std::int64_t matched = 0;

  double precision() const;
  double recall() const;
  double f1() const;
};

struct CalibrationReport {
  std::string method;
  std::string aggspan_mode;  // empty unless method is AggSpan
  int num_bins = kDefaultBins;
  std::int64_t n = 0;
  std::optional<CalibrationSummary> all;
  std::optional<CalibrationSummary> no;  // absent when there are no non-O spans
  ExclusionCounts excluded;
  std::optional<SpanF1> f1;
};

struct ReliabilityRow {
  int m = 1;
  double lower = 0.0;
  double upper = 0.0;
  std::int64_t count = 0;
  std::optional<double> accuracy;
  std::optional<double> mean_confidence;
  std::optional<double> gap;  // accuracy - mean_confidence
};

// One row per bin; empty bins carry count 0 and no accuracy, mean or gap.
std::vector<ReliabilityRow> reliability_table(const CalibrationSummary &summary);

// CSV with header m,lower,upper,count,accuracy,mean_confidence,gap. Missing
// values are written as empty fields.
std::string ReliabilityCsv(std::span<const ReliabilityRow> rows);

struct MeanSd {
  double mean = 0.0;
  double sd = 0.0;  // sample standard deviation; 0 for a single value
};

MeanSd Summarize(std::span<const double> values);

}  // namespace seqconf

#endif  // SEQCONF_CALIBRATION_H_
