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

// Readers and writers for the toolkit's file formats.
//
//   gold         JSONL {"id", "words": [str], "tags": [str]}
//   labels       JSON  [str]
//   model        JSON  {"tag_set", "vocab", "initial", "transition", "emission"}
//   predictions  JSONL {"id", "n_words", "k", "candidates": [{"rank", "tags",
//                       "unit_logprobs", "total_logprob", "malformed"?}]}
//   scored spans JSONL {"id", "start", "end", "label", "phrase", "method",
//                       "confidence", "effective_k", "correct", "aggspan_mode"?}
//
// Parse failures throw FormatError naming the file and line; unreadable
// files throw IoError.

#ifndef SEQCONF_IO_H_
#define SEQCONF_IO_H_

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "seqconf/beam.h"
#include "seqconf/calibration.h"
#include "seqconf/confidence.h"
#include "seqconf/hmm.h"
#include "seqconf/seqlabel.h"

namespace seqconf {

using Json = nlohmann::json;

std::string ReadFile(const std::string &path);
// Writes atomically enough for our purposes: truncate then write.
void WriteFile(const std::string &path, const std::string &contents);

// Non-blank lines of a JSONL file, each parsed as JSON. `line` numbers are
// 1-based.
struct JsonlRecord {
  int line = 0;
  Json value;
};
std::vector<JsonlRecord> ReadJsonl(const std::string &path);
std::string ToJsonl(const std::vector<Json> &records);

// Gold corpus. When `labels` is non-null unknown labels are rejected.
Json GoldToJson(const LabeledExample &example);
LabeledExample GoldFromJson(const Json &j, const LabelSet *labels = nullptr);
std::vector<LabeledExample> ReadGold(const std::string &path,
                                     const LabelSet *labels = nullptr);
void WriteGold(const std::string &path, const std::vector<LabeledExample> &corpus);

LabelSet ReadLabels(const std::string &path);
void WriteLabels(const std::string &path, const LabelSet &labels);

Json ModelToJson(const HmmParams &params);
// Throws FormatError on schema errors and ConfigError on invalid tables.
HmmParams ModelFromJson(const Json &j);
HmmParams ReadModel(const std::string &path);
void WriteModel(const std::string &path, const HmmParams &params);

Json BeamToJson(const BeamResult &beam);
// Candidates are resolved against `labels` (grammar only when null);
// malformed candidates are kept and flagged, not rejected.
BeamResult BeamFromJson(const Json &j, const LabelSet *labels = nullptr);
std::vector<BeamResult> ReadPredictions(const std::string &path,
                                        const LabelSet *labels = nullptr);
void WritePredictions(const std::string &path, const std::vector<BeamResult> &beams);

struct ScoredSpanRecord {
  std::string id;
  ConfidenceScore score;
  std::optional<bool> correct;
  std::string aggspan_mode;  // set for AggSpan records
};

Json ScoredSpanToJson(const ScoredSpanRecord &record);
ScoredSpanRecord ScoredSpanFromJson(const Json &j);
std::vector<ScoredSpanRecord> ReadScoredSpans(const std::string &path);
void WriteScoredSpans(const std::string &path,
                      const std::vector<ScoredSpanRecord> &records);

Json SummaryToJson(const CalibrationSummary &summary);
Json ReportToJson(const CalibrationReport &report);

}  // namespace seqconf

#endif  // SEQCONF_IO_H_
