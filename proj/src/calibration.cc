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

#include "seqconf/calibration.h"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "seqconf/errors.h"

namespace seqconf {

std::string_view SpanFilterName(SpanFilter filter) {
  return filter == SpanFilter::kAll ? "ALL" : "NO";
}

namespace {

double BinEdge(int m, int num_bins) {
  return static_cast<double>(m) / static_cast<double>(num_bins);
}

}  // namespace

int assign_bin(double confidence, int num_bins) {
  if (num_bins < 1) throw ConfigError("bin count must be at least 1");
  if (!(confidence >= 0.0 && confidence <= 1.0)) {
    throw RangeError("confidence " + std::to_string(confidence) + " is outside [0, 1]");
  }
  int m = static_cast<int>(std::ceil(confidence * num_bins));
  m = std::clamp(m, 1, num_bins);
  // Settle rounding in confidence * M against the edges the bins report.
  while (m > 1 && confidence <= BinEdge(m - 1, num_bins)) --m;
  while (m < num_bins && confidence > BinEdge(m, num_bins)) ++m;
  return m;
}

std::optional<double> BinStats::accuracy() const {
  if (count == 0) return std::nullopt;
  return sum_correct / static_cast<double>(count);
}

std::optional<double> BinStats::mean_confidence() const {
  if (count == 0) return std::nullopt;
  return sum_confidence / static_cast<double>(count);
}

BinAccumulator::BinAccumulator(int num_bins) {
  if (num_bins < 1) throw ConfigError("bin count must be at least 1");
  bins_.resize(num_bins);
  for (int m = 1; m <= num_bins; ++m) {
    bins_[m - 1].m = m;
    bins_[m - 1].lower = BinEdge(m - 1, num_bins);
    bins_[m - 1].upper = BinEdge(m, num_bins);
  }
}

void BinAccumulator::Add(double confidence, bool correct) {
  BinStats &bin = bins_[assign_bin(confidence, num_bins()) - 1];
  ++bin.count;
  bin.sum_correct += correct ? 1.0 : 0.0;
  bin.sum_confidence += confidence;
  ++total_;
}

void BinAccumulator::Merge(const BinAccumulator &other) {
  if (other.num_bins() != num_bins()) {
    throw ConfigError("cannot merge calibration bins of different sizes");
  }
  for (std::size_t i = 0; i < bins_.size(); ++i) {
    bins_[i].count += other.bins_[i].count;
    bins_[i].sum_correct += other.bins_[i].sum_correct;
    bins_[i].sum_confidence += other.bins_[i].sum_confidence;
  }
  total_ += other.total_;
}

double BinAccumulator::Ece() const {
  if (total_ == 0) return 0.0;
  double weighted = 0.0;
  for (const auto &bin : bins_) {
    if (bin.count == 0) continue;
    weighted += static_cast<double>(bin.count) *
                std::abs(*bin.accuracy() - *bin.mean_confidence());
  }
  return weighted / static_cast<double>(total_);
}

CalibrationSummary compute_ece(std::span<const JudgedScore> scored, int num_bins,
                               SpanFilter filter) {
  BinAccumulator acc(num_bins);
  for (const auto &item : scored) {
    if (filter == SpanFilter::kNonOutside && item.score.span.is_outside()) continue;
    acc.Add(item.score.value, item.correct);
  }
  if (acc.total() == 0) {
    throw EmptyEvaluationError("no spans to evaluate under filter " +
                               std::string(SpanFilterName(filter)));
  }
  return {filter, num_bins, acc.total(), acc.Ece(), acc.bins()};
}

double SpanF1::precision() const {
  return predicted == 0 ? 0.0 : static_cast<double>(matched) / predicted;
}

double SpanF1::recall() const {
  return gold == 0 ? 0.0 : static_cast<double>(matched) / gold;
}

double SpanF1::f1() const {
  double p = precision(), r = recall();
  return p + r == 0.0 ? 0.0 : 2.0 * p * r / (p + r);
}

std::vector<ReliabilityRow> reliability_table(const CalibrationSummary &summary) {
  std::vector<ReliabilityRow> rows;
  rows.reserve(summary.bins.size());
  for (const auto &bin : summary.bins) {
    ReliabilityRow row{bin.m, bin.lower, bin.upper, bin.count,
                       bin.accuracy(), bin.mean_confidence(), std::nullopt};
    if (row.accuracy) row.gap = *row.accuracy - *row.mean_confidence;
    rows.push_back(row);
  }
  return rows;
}

namespace {

std::string FormatNumber(double v) {
  std::ostringstream out;
  out.precision(17);
  out << v;
  return out.str();
}

std::string FormatOptional(const std::optional<double> &v) {
  return v ? FormatNumber(*v) : std::string();
}

}  // namespace

std::string ReliabilityCsv(std::span<const ReliabilityRow> rows) {
  std::string csv = "m,lower,upper,count,accuracy,mean_confidence,gap\n";
  for (const auto &row : rows) {
    csv += std::to_string(row.m) + "," + FormatNumber(row.lower) + "," +
           FormatNumber(row.upper) + "," + std::to_string(row.count) + "," +
           FormatOptional(row.accuracy) + "," + FormatOptional(row.mean_confidence) +
           "," + FormatOptional(row.gap) + "\n";
  }
  return csv;
}

MeanSd Summarize(std::span<const double> values) {
  MeanSd out;
  if (values.empty()) return out;
  for (double v : values) out.mean += v;
  out.mean /= static_cast<double>(values.size());
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - out.mean) * (v - out.mean);
    out.sd = std::sqrt(ss / static_cast<double>(values.size() - 1));
  }
  return out;
}

}  // namespace seqconf
