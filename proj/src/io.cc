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

#include "seqconf/io.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "seqconf/errors.h"

namespace seqconf {

std::string ReadFile(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void WriteFile(const std::string &path, const std::string &contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << contents;
  if (!out) throw IoError("failed writing '" + path + "'");
}

std::vector<JsonlRecord> ReadJsonl(const std::string &path) {
  std::istringstream in(ReadFile(path));
  std::vector<JsonlRecord> records;
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      records.push_back({number, Json::parse(line)});
    } catch (const Json::exception &e) {
      throw FormatError(path + ":" + std::to_string(number) + ": " + e.what());
    }
  }
  return records;
}

std::string ToJsonl(const std::vector<Json> &records) {
  std::string out;
  for (const auto &r : records) {
    out += r.dump();
    out += '\n';
  }
  return out;
}

namespace {

// Runs `parse` and rewraps schema errors with the file position.
template <typename Fn>
auto AtLine(const std::string &path, int line, Fn &&parse) {
  try {
    return parse();
  } catch (const Json::exception &e) {
    throw FormatError(path + ":" + std::to_string(line) + ": " + e.what());
  } catch (const FormatError &e) {
    throw FormatError(path + ":" + std::to_string(line) + ": " + e.what());
  } catch (const AlignmentError &e) {
    throw AlignmentError(path + ":" + std::to_string(line) + ": " + e.what());
  } catch (const ConfigError &e) {
    throw FormatError(path + ":" + std::to_string(line) + ": " + e.what());
  } catch (const UsageError &e) {
    throw FormatError(path + ":" + std::to_string(line) + ": " + e.what());
  }
}

const Json &Field(const Json &j, const char *name) {
  if (!j.is_object()) throw FormatError("record is not a JSON object");
  auto it = j.find(name);
  if (it == j.end()) throw FormatError(std::string("missing field '") + name + "'");
  return *it;
}

double FiniteNumber(const Json &j, const char *what) {
  if (!j.is_number()) throw FormatError(std::string(what) + " is not a number");
  double v = j.get<double>();
  if (!std::isfinite(v)) throw FormatError(std::string(what) + " is not finite");
  return v;
}

std::vector<double> NumberRow(const Json &j, const char *what) {
  if (!j.is_array()) throw FormatError(std::string(what) + " is not an array");
  std::vector<double> row;
  for (const auto &v : j) row.push_back(FiniteNumber(v, what));
  return row;
}

}  // namespace

Json GoldToJson(const LabeledExample &example) {
  return Json{{"id", example.input.id},
              {"words", example.input.words},
              {"tags", encode_si_tags(example.gold.tags)}};
}

LabeledExample GoldFromJson(const Json &j, const LabelSet *labels) {
  LabeledExample ex;
  ex.input.id = Field(j, "id").get<std::string>();
  ex.input.words = Field(j, "words").get<std::vector<std::string>>();
  ValidateInput(ex.input);
  auto units = Field(j, "tags").get<std::vector<std::string>>();
  ex.gold.id = ex.input.id;
  ex.gold.tags = decode_si(units, ex.input.words.size(), labels);
  return ex;
}

std::vector<LabeledExample> ReadGold(const std::string &path, const LabelSet *labels) {
  std::vector<LabeledExample> corpus;
  for (const auto &rec : ReadJsonl(path)) {
    corpus.push_back(AtLine(path, rec.line, [&] { return GoldFromJson(rec.value, labels); }));
  }
  return corpus;
}

void WriteGold(const std::string &path, const std::vector<LabeledExample> &corpus) {
  std::vector<Json> records;
  for (const auto &ex : corpus) records.push_back(GoldToJson(ex));
  WriteFile(path, ToJsonl(records));
}

LabelSet ReadLabels(const std::string &path) {
  try {
    return LabelSet(Json::parse(ReadFile(path)).get<std::vector<std::string>>());
  } catch (const Json::exception &e) {
    throw FormatError(path + ": " + e.what());
  }
}

void WriteLabels(const std::string &path, const LabelSet &labels) {
  WriteFile(path, Json(labels.labels()).dump() + "\n");
}

Json ModelToJson(const HmmParams &params) {
  return Json{{"tag_set", encode_si_tags(params.tag_set)},
              {"vocab", params.vocab},
              {"initial", params.initial},
              {"transition", params.transition},
              {"emission", params.emission}};
}

HmmParams ModelFromJson(const Json &j) {
  HmmParams p;
  for (const auto &tag : Field(j, "tag_set").get<std::vector<std::string>>()) {
    p.tag_set.push_back(ParseTag(tag));
  }
  p.vocab = Field(j, "vocab").get<std::vector<std::string>>();
  p.initial = NumberRow(Field(j, "initial"), "initial");
  for (const auto &row : Field(j, "transition")) {
    p.transition.push_back(NumberRow(row, "transition"));
  }
  for (const auto &row : Field(j, "emission")) {
    p.emission.push_back(NumberRow(row, "emission"));
  }
  ValidateParams(p);
  return p;
}

HmmParams ReadModel(const std::string &path) {
  Json j;
  try {
    j = Json::parse(ReadFile(path));
  } catch (const Json::exception &e) {
    throw FormatError(path + ": " + e.what());
  }
  return AtLine(path, 1, [&] { return ModelFromJson(j); });
}

void WriteModel(const std::string &path, const HmmParams &params) {
  WriteFile(path, ModelToJson(params).dump(1) + "\n");
}

Json BeamToJson(const BeamResult &beam) {
  Json candidates = Json::array();
  for (const auto &c : beam.candidates) {
    Json cj{{"rank", c.rank}, {"tags", c.units}};
    cj["unit_logprobs"] = c.unit_logprobs ? Json(*c.unit_logprobs) : Json(nullptr);
    cj["total_logprob"] = c.total_logprob;
    if (!c.well_formed()) cj["malformed"] = true;
    candidates.push_back(std::move(cj));
  }
  return Json{{"id", beam.id},
              {"n_words", beam.n_words},
              {"k", beam.k},
              {"candidates", std::move(candidates)}};
}

BeamResult BeamFromJson(const Json &j, const LabelSet *labels) {
  BeamResult beam;
  beam.id = Field(j, "id").get<std::string>();
  beam.n_words = Field(j, "n_words").get<int>();
  beam.k = Field(j, "k").get<int>();
  if (beam.n_words < 1) throw FormatError("n_words must be positive");
  if (beam.k < 1) throw FormatError("k must be positive");
  const Json &cands = Field(j, "candidates");
  if (!cands.is_array()) throw FormatError("candidates is not an array");
  for (const auto &cj : cands) {
    BeamCandidate c;
    c.rank = Field(cj, "rank").get<int>();
    c.units = Field(cj, "tags").get<std::vector<std::string>>();
    c.total_logprob = FiniteNumber(Field(cj, "total_logprob"), "total_logprob");
    auto lp = cj.find("unit_logprobs");
    if (lp != cj.end() && !lp->is_null()) {
      if (!lp->is_array()) throw FormatError("unit_logprobs is not an array");
      bool has_null = std::any_of(lp->begin(), lp->end(),
                                  [](const Json &v) { return v.is_null(); });
      if (!has_null) c.unit_logprobs = NumberRow(*lp, "unit_logprobs");
    }
    auto flag = cj.find("malformed");
    if (flag != cj.end() && flag->is_boolean() && flag->get<bool>()) {
      c.malformed_reason = "flagged malformed by the producer";
    }
    ResolveCandidate(c, beam.n_words, labels);
    beam.candidates.push_back(std::move(c));
  }
  std::stable_sort(beam.candidates.begin(), beam.candidates.end(),
                   [](const BeamCandidate &a, const BeamCandidate &b) {
                     return a.rank < b.rank;
                   });
  return beam;
}

std::vector<BeamResult> ReadPredictions(const std::string &path, const LabelSet *labels) {
  std::vector<BeamResult> beams;
  for (const auto &rec : ReadJsonl(path)) {
    beams.push_back(AtLine(path, rec.line, [&] { return BeamFromJson(rec.value, labels); }));
  }
  return beams;
}

void WritePredictions(const std::string &path, const std::vector<BeamResult> &beams) {
  std::vector<Json> records;
  for (const auto &beam : beams) records.push_back(BeamToJson(beam));
  WriteFile(path, ToJsonl(records));
}

Json ScoredSpanToJson(const ScoredSpanRecord &r) {
  Json j{{"id", r.id},
         {"start", r.score.span.start},
         {"end", r.score.span.end},
         {"label", r.score.span.label},
         {"phrase", r.score.span.phrase},
         {"method", std::string(MethodName(r.score.method))},
         {"confidence", r.score.value},
         {"effective_k", r.score.effective_k}};
  j["correct"] = r.correct ? Json(*r.correct) : Json(nullptr);
  if (!r.aggspan_mode.empty()) j["aggspan_mode"] = r.aggspan_mode;
  return j;
}

ScoredSpanRecord ScoredSpanFromJson(const Json &j) {
  ScoredSpanRecord r;
  r.id = Field(j, "id").get<std::string>();
  r.score.span.start = Field(j, "start").get<int>();
  r.score.span.end = Field(j, "end").get<int>();
  r.score.span.label = Field(j, "label").get<std::string>();
  r.score.span.phrase = Field(j, "phrase").get<std::string>();
  r.score.method = ParseMethod(Field(j, "method").get<std::string>());
  r.score.value = FiniteNumber(Field(j, "confidence"), "confidence");
  r.score.effective_k = Field(j, "effective_k").get<int>();
  const Json &correct = Field(j, "correct");
  if (!correct.is_null()) r.correct = correct.get<bool>();
  auto mode = j.find("aggspan_mode");
  if (mode != j.end()) r.aggspan_mode = mode->get<std::string>();
  if (r.score.span.start < 0 || r.score.span.start >= r.score.span.end) {
    throw FormatError("span bounds are invalid");
  }
  if (r.score.span.label != kOutsideLabel && !IsValidLabelName(r.score.span.label)) {
    throw FormatError("invalid span label '" + r.score.span.label + "'");
  }
  return r;
}

std::vector<ScoredSpanRecord> ReadScoredSpans(const std::string &path) {
  std::vector<ScoredSpanRecord> records;
  for (const auto &rec : ReadJsonl(path)) {
    records.push_back(AtLine(path, rec.line, [&] { return ScoredSpanFromJson(rec.value); }));
  }
  return records;
}

void WriteScoredSpans(const std::string &path,
                      const std::vector<ScoredSpanRecord> &records) {
  std::vector<Json> out;
  for (const auto &r : records) out.push_back(ScoredSpanToJson(r));
  WriteFile(path, ToJsonl(out));
}

namespace {

Json OptionalNumber(const std::optional<double> &v) {
  return v ? Json(*v) : Json(nullptr);
}

}  // namespace

Json SummaryToJson(const CalibrationSummary &summary) {
  Json bins = Json::array();
  for (const auto &bin : summary.bins) {
    bins.push_back(Json{{"m", bin.m},
                        {"lower", bin.lower},
                        {"upper", bin.upper},
                        {"count", bin.count},
                        {"accuracy", OptionalNumber(bin.accuracy())},
                        {"mean_confidence", OptionalNumber(bin.mean_confidence())}});
  }
  return Json{{"filter", std::string(SpanFilterName(summary.filter))},
              {"n", summary.n},
              {"ece", summary.ece},
              {"bins", std::move(bins)}};
}

Json ReportToJson(const CalibrationReport &report) {
  Json j{{"method", report.method}, {"bins", report.num_bins}, {"n", report.n}};
  if (!report.aggspan_mode.empty()) j["aggspan_mode"] = report.aggspan_mode;
  j["ece_all"] = report.all ? Json(report.all->ece) : Json(nullptr);
  j["ece_no"] = report.no ? Json(report.no->ece) : Json(nullptr);
  j["bins_all"] = report.all ? SummaryToJson(*report.all)["bins"] : Json(nullptr);
  j["bins_no"] = report.no ? SummaryToJson(*report.no)["bins"] : Json(nullptr);
  j["n_no"] = report.no ? Json(report.no->n) : Json(0);
  j["excluded_counts"] = Json{{"dropped_candidates", report.excluded.dropped_candidates},
                              {"degenerate_spans", report.excluded.degenerate_spans},
                              {"decode_errors", report.excluded.decode_errors}};
  if (report.f1) {
    j["span_f1_non_o"] = Json{{"precision", report.f1->precision()},
                              {"recall", report.f1->recall()},
                              {"f1", report.f1->f1()},
                              {"predicted", report.f1->predicted},
                              {"gold", report.f1->gold},
                              {"matched", report.f1->matched}};
  }
  return j;
}

}  // namespace seqconf
