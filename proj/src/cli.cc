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


#include "seqconf/cli.h"

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <iomanip>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "seqconf/beam.h"
#include "seqconf/calibration.h"
#include "seqconf/confidence.h"
#include "seqconf/errors.h"
#include "seqconf/hmm.h"
#include "seqconf/io.h"
#include "seqconf/presets.h"
#include "seqconf/seqlabel.h"

namespace seqconf {
namespace {

namespace fs = std::filesystem;

// Applies fn to 0..n-1 on up to `workers` threads. Results keep index order;
// the lowest-index failure is rethrown.
template <typename T, typename Fn>
std::vector<T> ParallelMap(std::size_t n, int workers, Fn fn) {
  std::vector<std::optional<T>> results(n);
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < n;) {
      try {
        results[i].emplace(fn(i));
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t extra =
      std::min<std::size_t>(n, static_cast<std::size_t>(std::max(workers, 1))) - (n > 0);
  std::vector<std::thread> threads;
  for (std::size_t t = 0; t < extra; ++t) threads.emplace_back(work);
  work();
  for (auto &t : threads) t.join();
  std::vector<T> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (errors[i]) std::rethrow_exception(errors[i]);
    out.push_back(std::move(*results[i]));
  }
  return out;
}

int ResolveWorkers(int workers) {
  if (workers < 0) throw ConfigError("--workers must be non-negative");
  if (workers == 0) return std::max(1u, std::thread::hardware_concurrency());
  return workers;
}

std::map<std::string, LabeledExample> IndexGold(const std::vector<LabeledExample> &corpus,
                                                const std::string &path) {
  std::map<std::string, LabeledExample> index;
  for (const auto &ex : corpus) {
    if (!index.emplace(ex.input.id, ex).second) {
      throw FormatError(path + ": duplicate id '" + ex.input.id + "'");
    }
  }
  return index;
}

const LabeledExample &Lookup(const std::map<std::string, LabeledExample> &index,
                             const std::string &id, const std::string &what) {
  auto it = index.find(id);
  if (it == index.end()) throw UsageError(what + " id '" + id + "' is not in the gold file");
  return it->second;
}

std::string FormatFixed(double v, int digits = 4) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(digits) << v;
  return s.str();
}

// synth

struct SynthOptions {
  std::string preset = "ambiguous-loc";
  std::string model_spec;
  std::string out_dir;
  int count = 1000;
  std::optional<int> train_count;
  std::optional<int> validation_count;
  int min_len = 3;
  int max_len = 12;
  std::uint64_t seed = 0;
};

void RunSynth(const SynthOptions &opt, std::ostream &out, std::ostream &err) {
  HmmParams params = opt.model_spec.empty() ? PresetByName(opt.preset) : ReadModel(opt.model_spec);
  ValidateParams(params);
  const int train = opt.train_count.value_or(opt.count);
  const int validation = opt.validation_count.value_or(std::max(1, opt.count / 5));
  if (opt.count < 1 || train < 1 || validation < 1) {
    throw ConfigError("split sizes must be at least 1");
  }
  fs::create_directories(opt.out_dir);
  const fs::path dir(opt.out_dir);
  WriteModel((dir / "model.json").string(), params);
  WriteLabels((dir / "labels.json").string(), LabelsOf(params.tag_set));

  const std::pair<const char *, int> splits[] = {
      {"train", train}, {"validation", validation}, {"test", opt.count}};
  for (std::size_t i = 0; i < 3; ++i) {
    const auto &[name, count] = splits[i];
    std::uint64_t split_seed = opt.seed + 0x9E3779B97F4A7C15ULL * (i + 1);
    auto corpus = sample_corpus(params, count, {opt.min_len, opt.max_len}, split_seed, name);
    WriteGold((dir / (std::string(name) + ".jsonl")).string(), corpus);
    err << "synth: wrote " << count << " " << name << " examples\n";
  }
  out << "synth: " << params.tag_set.size() << " tags, " << params.vocab.size()
      << " words, splits " << train << "/" << validation << "/" << opt.count << " in "
      << opt.out_dir << "\n";
}

// decode

struct DecodeOptions {
  std::string model;
  std::string gold;
  std::string out;
  int k = kDefaultBeamSize;
  double tau = 1.0;
  bool exhaustive = false;
  int workers = 1;
};

void RunDecode(const DecodeOptions &opt, std::ostream &out, std::ostream &err) {
  auto model = std::make_shared<HmmModel>(ReadModel(opt.model));
  auto scorer = perturb_temperature(model, opt.tau);
  if (opt.k < 1) throw ConfigError("--k must be at least 1");
  auto corpus = ReadGold(opt.gold, &model->labels());
  if (opt.exhaustive) {
    for (const auto &ex : corpus) {
      if (SequenceSpaceSize(model->num_tags(), ex.input.words.size()) >
          kDefaultEnumerationCap) {
        throw CapacityError("exhaustive decoding of '" + ex.input.id + "' exceeds " +
                            std::to_string(kDefaultEnumerationCap) + " sequences");
      }
    }
  }
  err << "decode: " << corpus.size() << " examples\n";
  auto beams = ParallelMap<BeamResult>(corpus.size(), ResolveWorkers(opt.workers), [&](std::size_t i) {
    const InputText &x = corpus[i].input;
    int k = opt.exhaustive
                ? static_cast<int>(SequenceSpaceSize(model->num_tags(), x.words.size()))
                : opt.k;
    return beam_search(*scorer, x, k);
  });
  WritePredictions(opt.out, beams);
  std::size_t candidates = 0;
  for (const auto &b : beams) candidates += b.candidates.size();
  out << "decode: " << beams.size() << " records, " << candidates << " candidates -> "
      << opt.out << "\n";
}

// estimate

struct EstimateOptions {
  std::string predictions;
  std::string gold;
  std::string model;
  std::string labels;
  std::string out;
  std::vector<std::string> methods;
  std::optional<int> k;
  int b = kDefaultAdaptiveOffset;
  std::string aggspan_mode = "rescoring";
  double tau = 1.0;
  int workers = 1;
};

std::string MetaPath(const std::string &scores_path) { return scores_path + ".meta.json"; }

struct MethodOutcome {
  std::vector<ScoredSpanRecord> records;
  EstimateStats stats;
  bool decode_error = false;
};

void RunEstimate(const EstimateOptions &opt, std::ostream &out, std::ostream &err) {
  std::vector<Method> methods;
  for (const auto &name : opt.methods) {
    Method m = ParseMethod(name);
    if (std::find(methods.begin(), methods.end(), m) == methods.end()) methods.push_back(m);
  }
  if (methods.empty()) methods = {Method::kSpan, Method::kAggSpan, Method::kAggSeq};

  const AggSpanMode mode = ParseAggSpanMode(opt.aggspan_mode);
  std::vector<MethodConfig> configs;
  for (Method m : methods) {
    int k = opt.k.value_or(m == Method::kAdaAggSeq ? kDefaultAdaptiveBeamSize : kDefaultBeamSize);
    MethodConfig config{m, k, opt.b, mode};
    ValidateConfig(config);
    configs.push_back(config);
  }

  std::shared_ptr<const HmmModel> model;
  std::shared_ptr<const Scorer> scorer;
  if (!opt.model.empty()) {
    model = std::make_shared<HmmModel>(ReadModel(opt.model));
    scorer = perturb_temperature(model, opt.tau);
  }
  bool rescoring = mode == AggSpanMode::kRescoring &&
                   std::find(methods.begin(), methods.end(), Method::kAggSpan) != methods.end();
  if (rescoring && !scorer) {
    throw UsageError("AggSpan in rescoring mode needs --model (or use --aggspan-mode trace)");
  }

  std::optional<LabelSet> labels;
  if (model) {
    labels = model->labels();
  } else if (!opt.labels.empty()) {
    labels = ReadLabels(opt.labels);
  }
  const LabelSet *label_ptr = labels ? &*labels : nullptr;
  auto gold = IndexGold(ReadGold(opt.gold, label_ptr), opt.gold);
  auto beams = ReadPredictions(opt.predictions, label_ptr);
  if (beams.empty()) throw EmptyEvaluationError(opt.predictions + " has no predictions");
  for (const auto &beam : beams) CheckBeamInvariants(beam);

  err << "estimate: " << beams.size() << " records, " << configs.size() << " methods\n";
  auto outcomes = ParallelMap<std::vector<MethodOutcome>>(
      beams.size(), ResolveWorkers(opt.workers), [&](std::size_t i) {
        const BeamResult &beam = beams[i];
        const InputText &input = Lookup(gold, beam.id, "prediction").input;
        std::vector<MethodOutcome> per_method;
        for (const auto &config : configs) {
          MethodOutcome outcome;
          try {
            ScoredBeam scored = score_all(input, beam, config, scorer.get());
            outcome.stats = scored.stats;
            for (auto &s : scored.scores) {
              std::string mode_name =
                  config.method == Method::kAggSpan ? std::string(AggSpanModeName(mode)) : "";
              outcome.records.push_back({beam.id, std::move(s), std::nullopt, mode_name});
            }
          } catch (const DecodeError &) {
            outcome.decode_error = true;
          }
          per_method.push_back(std::move(outcome));
        }
        return per_method;
      });

  std::vector<ScoredSpanRecord> records;
  std::vector<std::size_t> counts(configs.size(), 0);
  Json meta_methods = Json::object();
  std::vector<ExclusionCounts> excluded(configs.size());
  for (const auto &per_method : outcomes) {
    for (std::size_t m = 0; m < configs.size(); ++m) {
      const MethodOutcome &o = per_method[m];
      counts[m] += o.records.size();
      records.insert(records.end(), o.records.begin(), o.records.end());
      excluded[m].dropped_candidates += o.stats.dropped_candidates;
      excluded[m].degenerate_spans += o.stats.degenerate_spans;
      excluded[m].decode_errors += o.decode_error ? 1 : 0;
    }
  }
  WriteScoredSpans(opt.out, records);

  for (std::size_t m = 0; m < configs.size(); ++m) {
    meta_methods[std::string(MethodName(configs[m].method))] =
        Json{{"k", configs[m].k},
             {"b", configs[m].b},
             {"records", counts[m]},
             {"dropped_candidates", excluded[m].dropped_candidates},
             {"degenerate_spans", excluded[m].degenerate_spans},
             {"decode_errors", excluded[m].decode_errors}};
  }
  Json meta{{"predictions", opt.predictions},
            {"examples", beams.size()},
            {"aggspan_mode", std::string(AggSpanModeName(mode))},
            {"tau", opt.tau},
            {"methods", meta_methods}};
  WriteFile(MetaPath(opt.out), meta.dump(1) + "\n");

  for (std::size_t m = 0; m < configs.size(); ++m) {
    out << "estimate: " << MethodName(configs[m].method) << " k=" << configs[m].k << " "
        << counts[m] << " spans";
    if (excluded[m].decode_errors > 0) out << ", " << excluded[m].decode_errors << " decode errors";
    if (excluded[m].dropped_candidates > 0) {
      out << ", " << excluded[m].dropped_candidates << " dropped candidates";
    }
    if (excluded[m].degenerate_spans > 0) {
      out << ", " << excluded[m].degenerate_spans << " degenerate spans";
    }
    out << "\n";
  }
}

// evaluate

struct EvaluateOptions {
  std::vector<std::string> scores;
  std::vector<std::string> gold;
  std::string out;
  std::string csv_dir;
  std::string annotated;
  std::string filter = "both";
  int bins = kDefaultBins;
};

struct RunReports {
  std::vector<std::string> keys;  // method or method/mode, in first-seen order
  std::map<std::string, CalibrationReport> reports;
};

RunReports EvaluateRun(const std::string &scores_path, const std::string &gold_path,
                       const EvaluateOptions &opt, std::vector<ScoredSpanRecord> *annotated) {
  auto records = ReadScoredSpans(scores_path);
  if (records.empty()) throw EmptyEvaluationError(scores_path + " has no scored spans");
  auto corpus = ReadGold(gold_path);
  std::map<std::string, GoldSpans> gold;
  std::int64_t gold_non_o = 0;
  for (const auto &ex : corpus) {
    GoldSpans spans = MakeGoldSpans(ex.input, ex.gold);
    gold_non_o += CountNonOutside(spans.spans);
    if (!gold.emplace(ex.input.id, std::move(spans)).second) {
      throw FormatError(gold_path + ": duplicate id '" + ex.input.id + "'");
    }
  }

  std::optional<Json> meta;
  if (fs::exists(MetaPath(scores_path))) {
    try {
      meta = Json::parse(ReadFile(MetaPath(scores_path)));
    } catch (const Json::exception &e) {
      throw FormatError(MetaPath(scores_path) + ": " + e.what());
    }
  }

  RunReports run;
  std::map<std::string, std::vector<JudgedScore>> judged;
  for (auto &r : records) {
    auto it = gold.find(r.id);
    if (it == gold.end()) {
      throw UsageError("scored span id '" + r.id + "' is not in " + gold_path);
    }
    r.correct = match_span(r.id, r.score.span, it->second);
    std::string key(MethodName(r.score.method));
    if (!r.aggspan_mode.empty()) key += "/" + r.aggspan_mode;
    if (!judged.count(key)) run.keys.push_back(key);
    judged[key].push_back({r.score, *r.correct});
  }
  if (annotated) *annotated = records;

  const bool want_all = opt.filter != "NO";
  const bool want_no = opt.filter != "ALL";
  for (const auto &key : run.keys) {
    const auto &items = judged[key];
    CalibrationReport report;
    report.method = key.substr(0, key.find('/'));
    if (key.find('/') != std::string::npos) report.aggspan_mode = key.substr(key.find('/') + 1);
    report.num_bins = opt.bins;
    report.n = static_cast<std::int64_t>(items.size());
    if (want_all) report.all = compute_ece(items, opt.bins, SpanFilter::kAll);
    if (want_no) {
      try {
        report.no = compute_ece(items, opt.bins, SpanFilter::kNonOutside);
      } catch (const EmptyEvaluationError &) {
        if (opt.filter == "NO") throw;
      }
    }
    SpanF1 f1;
    f1.gold = gold_non_o;
    for (const auto &item : items) {
      if (item.score.span.is_outside()) continue;
      ++f1.predicted;
      if (item.correct) ++f1.matched;
    }
    report.f1 = f1;
    if (meta && meta->contains("methods") && (*meta)["methods"].contains(report.method)) {
      const Json &m = (*meta)["methods"][report.method];
      report.excluded.dropped_candidates = m.value("dropped_candidates", std::int64_t{0});
      report.excluded.degenerate_spans = m.value("degenerate_spans", std::int64_t{0});
      report.excluded.decode_errors = m.value("decode_errors", std::int64_t{0});
    }
    run.reports[key] = std::move(report);
  }
  return run;
}

std::string CsvName(const std::string &key, SpanFilter filter, std::optional<std::size_t> run) {
  std::string name = "reliability_" + key;
  std::replace(name.begin(), name.end(), '/', '_');
  name += "_" + std::string(SpanFilterName(filter));
  if (run) name += "_run" + std::to_string(*run + 1);
  return name + ".csv";
}

void RunEvaluate(const EvaluateOptions &opt, std::ostream &out, std::ostream &err) {
  if (opt.filter != "ALL" && opt.filter != "NO" && opt.filter != "both") {
    throw ConfigError("--filter must be ALL, NO or both");
  }
  if (opt.bins < 1) throw ConfigError("--bins must be at least 1");
  if (opt.gold.size() != 1 && opt.gold.size() != opt.scores.size()) {
    throw UsageError("give one --gold for all runs or one per --scores");
  }
  if (!opt.annotated.empty() && opt.scores.size() != 1) {
    throw UsageError("--annotated needs exactly one --scores file");
  }

  std::vector<RunReports> runs;
  std::vector<ScoredSpanRecord> annotated;
  for (std::size_t i = 0; i < opt.scores.size(); ++i) {
    const std::string &gold = opt.gold.size() == 1 ? opt.gold[0] : opt.gold[i];
    err << "evaluate: " << opt.scores[i] << " against " << gold << "\n";
    runs.push_back(EvaluateRun(opt.scores[i], gold, opt,
                               opt.annotated.empty() ? nullptr : &annotated));
  }
  if (!opt.annotated.empty()) WriteScoredSpans(opt.annotated, annotated);

  std::vector<std::string> keys;
  for (const auto &run : runs) {
    for (const auto &key : run.keys) {
      if (std::find(keys.begin(), keys.end(), key) == keys.end()) keys.push_back(key);
    }
  }

  Json runs_json = Json::array();
  for (std::size_t i = 0; i < runs.size(); ++i) {
    Json reports = Json::array();
    for (const auto &key : runs[i].keys) reports.push_back(ReportToJson(runs[i].reports.at(key)));
    runs_json.push_back(Json{{"scores", opt.scores[i]},
                             {"gold", opt.gold.size() == 1 ? opt.gold[0] : opt.gold[i]},
                             {"reports", std::move(reports)}});
  }

  Json aggregate = Json::object();
  std::ostringstream table;
  table << std::left << std::setw(20) << "method" << std::setw(22) << "ECE_ALL" << std::setw(22)
        << "ECE_NO" << "runs\n";
  for (const auto &key : keys) {
    std::vector<double> all, no;
    for (const auto &run : runs) {
      auto it = run.reports.find(key);
      if (it == run.reports.end()) continue;
      if (it->second.all) all.push_back(it->second.all->ece);
      if (it->second.no) no.push_back(it->second.no->ece);
    }
    auto stat = [](const std::vector<double> &v) -> Json {
      if (v.empty()) return nullptr;
      MeanSd s = Summarize(v);
      return Json{{"mean", s.mean}, {"sd", s.sd}, {"runs", v.size()}};
    };
    auto cell = [](const std::vector<double> &v) {
      if (v.empty()) return std::string("-");
      MeanSd s = Summarize(v);
      return FormatFixed(s.mean) + (v.size() > 1 ? " +/- " + FormatFixed(s.sd) : "");
    };
    aggregate[key] = Json{{"ece_all", stat(all)}, {"ece_no", stat(no)}};
    table << std::setw(20) << key << std::setw(22) << cell(all) << std::setw(22) << cell(no)
          << std::max(all.size(), no.size()) << "\n";
  }

  if (!opt.out.empty()) {
    Json report{{"bins", opt.bins},
                {"filter", opt.filter},
                {"runs", std::move(runs_json)},
                {"aggregate", std::move(aggregate)}};
    WriteFile(opt.out, report.dump(1) + "\n");
  }
  if (!opt.csv_dir.empty()) {
    fs::create_directories(opt.csv_dir);
    for (std::size_t i = 0; i < runs.size(); ++i) {
      std::optional<std::size_t> suffix;
      if (runs.size() > 1) suffix = i;
      for (const auto &key : runs[i].keys) {
        const CalibrationReport &r = runs[i].reports.at(key);
        for (const auto *summary : {r.all ? &*r.all : nullptr, r.no ? &*r.no : nullptr}) {
          if (!summary) continue;
          WriteFile((fs::path(opt.csv_dir) / CsvName(key, summary->filter, suffix)).string(),
                    ReliabilityCsv(reliability_table(*summary)));
        }
      }
    }
  }
  out << table.str();
}

// oracle

struct OracleOptions {
  std::string model;
  std::string gold;
  std::string predictions;
  std::string out;
  std::vector<std::string> spans;
  int k = kDefaultBeamSize;
  double tau = 1.0;
  bool exhaustive = false;
  int workers = 1;
};

struct SpanRequest {
  std::string id;
  LabeledSpan span;
};

SpanRequest ParseSpanRequest(const std::string &text,
                             const std::map<std::string, LabeledExample> &gold) {
  // id:start:end:label, where the id itself may contain ':'.
  std::vector<std::string> parts;
  std::size_t pos = text.size();
  for (int i = 0; i < 3; ++i) {
    std::size_t colon = text.rfind(':', pos - 1);
    if (colon == std::string::npos || pos == 0) {
      throw UsageError("--span expects id:start:end:label, got '" + text + "'");
    }
    parts.insert(parts.begin(), text.substr(colon + 1, pos - colon - 1));
    pos = colon;
  }
  SpanRequest req;
  req.id = text.substr(0, pos);
  int start = 0, end = 0;
  try {
    std::size_t used = 0;
    start = std::stoi(parts[0], &used);
    if (used != parts[0].size()) throw std::invalid_argument(parts[0]);
    end = std::stoi(parts[1], &used);
    if (used != parts[1].size()) throw std::invalid_argument(parts[1]);
  } catch (const std::logic_error &) {
    throw UsageError("--span bounds must be integers in '" + text + "'");
  }
  const InputText &x = Lookup(gold, req.id, "--span").input;
  const int n = static_cast<int>(x.words.size());
  if (start < 0 || end > n || start >= end) {
    throw RangeError("--span [" + std::to_string(start) + ", " + std::to_string(end) +
                     ") does not fit the " + std::to_string(n) + "-word input '" + req.id + "'");
  }
  req.span = {start, end, parts[2], JoinPhrase(x.words, start, end)};
  return req;
}

std::pair<double, double> EnumeratedMarginals(const std::vector<ScoredSequence> &all,
                                              const HmmModel &model, const InputText &x,
                                              const LabeledSpan &span) {
  TagSequence pattern;
  for (int w = span.start; w < span.end; ++w) {
    if (span.is_outside()) {
      pattern.push_back(Tag::Outside());
    } else {
      pattern.push_back(w == span.start ? Tag::Begin(span.label) : Tag::Inside(span.label));
    }
  }
  double pattern_mass = 0.0, span_mass = 0.0;
  for (const auto &e : all) {
    if (e.probability == 0.0) continue;
    TagSequence tags = model.ToTags(e.tags);
    if (!std::equal(pattern.begin(), pattern.end(), tags.begin() + span.start)) continue;
    pattern_mass += e.probability;
    if (ContainsSpan(segment_spans(x.words, tags), span)) span_mass += e.probability;
  }
  return {pattern_mass, span_mass};
}

void RunOracle(const OracleOptions &opt, std::ostream &out, std::ostream &err) {
  auto model = std::make_shared<HmmModel>(ReadModel(opt.model));
  auto corpus = ReadGold(opt.gold, &model->labels());
  auto gold = IndexGold(corpus, opt.gold);

  std::vector<SpanRequest> requests;
  if (!opt.spans.empty()) {
    for (const auto &text : opt.spans) requests.push_back(ParseSpanRequest(text, gold));
  } else if (!opt.predictions.empty()) {
    for (const auto &beam : ReadPredictions(opt.predictions, &model->labels())) {
      const InputText &x = Lookup(gold, beam.id, "prediction").input;
      if (beam.candidates.empty() || !beam.candidates[0].well_formed()) continue;
      for (auto &span : segment_spans(x.words, *beam.candidates[0].tags)) {
        requests.push_back({beam.id, std::move(span)});
      }
    }
  } else {
    if (opt.k < 1) throw ConfigError("--k must be at least 1");
    auto scorer = perturb_temperature(model, opt.tau);
    for (const auto &ex : corpus) {
      BeamResult beam = beam_search(*scorer, ex.input, opt.k);
      for (auto &span : segment_spans(ex.input.words, *beam.candidates[0].tags)) {
        requests.push_back({ex.input.id, std::move(span)});
      }
    }
  }
  err << "oracle: " << requests.size() << " spans\n";

  auto rows = ParallelMap<Json>(requests.size(), ResolveWorkers(opt.workers), [&](std::size_t i) {
    const SpanRequest &req = requests[i];
    const LabeledExample &ex = Lookup(gold, req.id, "span");
    const LabeledSpan &span = req.span;
    Json row{{"id", req.id},
             {"start", span.start},
             {"end", span.end},
             {"label", span.label},
             {"phrase", span.phrase},
             {"pattern_marginal", exact_pattern_marginal(*model, ex.input, span)},
             {"span_marginal", exact_span_marginal(*model, ex.input, span)},
             {"correct", match_span(req.id, span, MakeGoldSpans(ex.input, ex.gold))}};
    if (opt.exhaustive) {
      auto [p, s] = EnumeratedMarginals(enumerate_all(*model, ex.input), *model, ex.input, span);
      row["pattern_marginal_enum"] = p;
      row["span_marginal_enum"] = s;
    }
    return row;
  });
  if (!opt.out.empty()) WriteFile(opt.out, ToJsonl(rows));

  out << "oracle: " << rows.size() << " spans";
  if (opt.exhaustive) {
    double worst = 0.0;
    for (const auto &row : rows) {
      worst = std::max(worst, std::abs(row["pattern_marginal"].get<double>() -
                                       row["pattern_marginal_enum"].get<double>()));
      worst = std::max(worst, std::abs(row["span_marginal"].get<double>() -
                                       row["span_marginal_enum"].get<double>()));
    }
    out << ", max |DP - enumeration| = " << std::scientific << std::setprecision(3) << worst;
  }
  out << "\n";
}

}  // namespace

int RunCli(int argc, const char *const *argv, std::ostream &out, std::ostream &err) {
  CLI::App app{"Span-level confidence estimation and calibration for sequence labeling",
               "seqconf"};
  app.require_subcommand(1);

  SynthOptions synth;
  auto *synth_cmd = app.add_subcommand("synth", "Sample a model and gold corpus splits");
  synth_cmd->add_option("--preset", synth.preset, "Built-in model preset")
      ->check(CLI::IsMember(PresetNames()))
      ->capture_default_str();
  synth_cmd->add_option("--model-spec", synth.model_spec, "HMM JSON to sample from instead");
  synth_cmd->add_option("--out-dir", synth.out_dir, "Output directory")->required();
  synth_cmd->add_option("--count", synth.count, "Test split size")->capture_default_str();
  synth_cmd->add_option("--train-count", synth.train_count, "Train split size (default --count)");
  synth_cmd->add_option("--validation-count", synth.validation_count,
                        "Validation split size (default --count / 5)");
  synth_cmd->add_option("--min-len", synth.min_len)->capture_default_str();
  synth_cmd->add_option("--max-len", synth.max_len)->capture_default_str();
  synth_cmd->add_option("--seed", synth.seed)->capture_default_str();

  DecodeOptions decode;
  auto *decode_cmd = app.add_subcommand("decode", "Beam-search the gold inputs");
  decode_cmd->add_option("--model", decode.model)->required();
  decode_cmd->add_option("--gold", decode.gold, "Gold JSONL supplying the inputs")->required();
  decode_cmd->add_option("--out", decode.out, "Predictions JSONL")->required();
  decode_cmd->add_option("--k", decode.k, "Beam size")->capture_default_str();
  decode_cmd->add_option("--tau", decode.tau, "Temperature applied to the model")
      ->capture_default_str();
  decode_cmd->add_flag("--exhaustive", decode.exhaustive, "Keep every sequence (k = |T|^n)");
  decode_cmd->add_option("--workers", decode.workers, "Worker threads, 0 for all cores")
      ->capture_default_str();

  EstimateOptions estimate;
  auto *estimate_cmd = app.add_subcommand("estimate", "Score top-1 spans from predictions");
  estimate_cmd->add_option("--predictions", estimate.predictions)->required();
  estimate_cmd->add_option("--gold", estimate.gold, "Gold JSONL supplying the words")->required();
  estimate_cmd->add_option("--out", estimate.out, "Scored-spans JSONL")->required();
  estimate_cmd->add_option("--model", estimate.model, "Model for AggSpan rescoring");
  estimate_cmd->add_option("--labels", estimate.labels, "Label set JSON");
  estimate_cmd->add_option("--method", estimate.methods,
                           "Span, AggSpan, AggSeq or AdaAggSeq (repeatable)");
  estimate_cmd->add_option("--k", estimate.k, "Beam size used by the estimators");
  estimate_cmd->add_option("--b", estimate.b, "AdaAggSeq offset")->capture_default_str();
  estimate_cmd->add_option("--aggspan-mode", estimate.aggspan_mode)
      ->check(CLI::IsMember({"rescoring", "trace"}))
      ->capture_default_str();
  estimate_cmd->add_option("--tau", estimate.tau, "Temperature for rescoring")
      ->capture_default_str();
  estimate_cmd->add_option("--workers", estimate.workers)->capture_default_str();

  EvaluateOptions evaluate;
  auto *evaluate_cmd = app.add_subcommand("evaluate", "Compute ECE against gold spans");
  evaluate_cmd->add_option("--scores", evaluate.scores, "Scored-spans JSONL (repeatable)")
      ->required();
  evaluate_cmd->add_option("--gold", evaluate.gold, "Gold JSONL (one, or one per --scores)")
      ->required();
  evaluate_cmd->add_option("--out", evaluate.out, "Report JSON");
  evaluate_cmd->add_option("--csv-dir", evaluate.csv_dir, "Directory for reliability CSVs");
  evaluate_cmd->add_option("--annotated", evaluate.annotated,
                           "Scored spans with correctness filled in");
  evaluate_cmd->add_option("--filter", evaluate.filter, "ALL, NO or both")
      ->capture_default_str();
  evaluate_cmd->add_option("--bins", evaluate.bins)->capture_default_str();

  OracleOptions oracle;
  auto *oracle_cmd = app.add_subcommand("oracle", "Exact span marginals under the model");
  oracle_cmd->add_option("--model", oracle.model)->required();
  oracle_cmd->add_option("--gold", oracle.gold)->required();
  oracle_cmd->add_option("--predictions", oracle.predictions, "Take top-1 spans from here");
  oracle_cmd->add_option("--span", oracle.spans, "id:start:end:label (repeatable)");
  oracle_cmd->add_option("--out", oracle.out, "Marginals JSONL");
  oracle_cmd->add_option("--k", oracle.k, "Beam size when decoding top-1 spans")
      ->capture_default_str();
  oracle_cmd->add_option("--tau", oracle.tau)->capture_default_str();
  oracle_cmd->add_flag("--exhaustive", oracle.exhaustive, "Cross-check by enumeration");
  oracle_cmd->add_option("--workers", oracle.workers)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp &) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError &e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return 0;
    }
    err << "seqconf: " << e.what() << "\n";
    return static_cast<int>(ExitCode::kUsage);
  }

  try {
    if (*synth_cmd) RunSynth(synth, out, err);
    if (*decode_cmd) RunDecode(decode, out, err);
    if (*estimate_cmd) RunEstimate(estimate, out, err);
    if (*evaluate_cmd) RunEvaluate(evaluate, out, err);
    if (*oracle_cmd) RunOracle(oracle, out, err);
  } catch (const Error &e) {
    err << "seqconf: " << e.what() << "\n";
    return static_cast<int>(e.code());
  } catch (const fs::filesystem_error &e) {
    err << "seqconf: " << e.what() << "\n";
    return static_cast<int>(ExitCode::kData);
  }
  return 0;
}

}  // namespace seqconf
