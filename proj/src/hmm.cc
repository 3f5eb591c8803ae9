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

#include "seqconf/hmm.h"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "seqconf/errors.h"
#include "seqconf/logmath.h"

namespace seqconf {

namespace {

void CheckRow(std::span<const double> row, std::size_t width, const std::string &what) {
  if (row.size() != width) {
    throw ConfigError(what + " has " + std::to_string(row.size()) +
                      " entries, expected " + std::to_string(width));
  }
  double sum = 0.0;
  for (double p : row) {
    if (!std::isfinite(p) || p < 0.0) {
      throw ConfigError(what + " has a negative or non-finite entry");
    }
    sum += p;
  }
  if (std::abs(sum - 1.0) > kRowSumTolerance) {
    throw ConfigError(what + " sums to " + std::to_string(sum) + ", not 1");
  }
}

// True if `to` may follow `from` (nullptr = sentence start) under BIO.
bool BioAllows(const Tag *from, const Tag &to) {
  if (to.kind != TagKind::kInside) return true;
  return from != nullptr && from->kind != TagKind::kOutside && from->label == to.label;
}

std::vector<double> LogRow(std::span<const double> row) {
  std::vector<double> out(row.size());
  std::transform(row.begin(), row.end(), out.begin(), SafeLog);
  return out;
}

}  // namespace

void ValidateParams(const HmmParams &params) {
  const std::size_t num_tags = params.tag_set.size();
  if (num_tags == 0) throw ConfigError("model has an empty tag set");
  if (params.vocab.empty()) throw ConfigError("model has an empty vocabulary");
  std::set<Tag> seen_tags;
  for (const auto &tag : params.tag_set) {
    if (tag.kind == TagKind::kOutside ? !tag.label.empty()
                                      : !IsValidLabelName(tag.label) ||
                                            tag.label == kOutsideLabel) {
      throw ConfigError("invalid tag in tag set");
    }
    if (!seen_tags.insert(tag).second) {
      throw ConfigError("duplicate tag '" + tag.ToString() + "' in tag set");
    }
  }
  std::set<std::string> seen_words;
  for (const auto &word : params.vocab) {
    if (word.empty() || std::any_of(word.begin(), word.end(), [](unsigned char c) {
          return std::isspace(c);
        })) {
      throw ConfigError("vocabulary word '" + word + "' is empty or has whitespace");
    }
    if (!seen_words.insert(word).second) {
      throw ConfigError("duplicate vocabulary word '" + word + "'");
    }
  }
  CheckRow(params.initial, num_tags, "initial distribution");
  if (params.transition.size() != num_tags || params.emission.size() != num_tags) {
    throw ConfigError("transition and emission tables need one row per tag");
  }
  for (std::size_t t = 0; t < num_tags; ++t) {
    const std::string name = params.tag_set[t].ToString();
    CheckRow(params.transition[t], num_tags, "transition row '" + name + "'");
    CheckRow(params.emission[t], params.vocab.size(), "emission row '" + name + "'");
    if (params.initial[t] > 0.0 && !BioAllows(nullptr, params.tag_set[t])) {
      throw ConfigError("initial distribution gives mass to '" + name + "'");
    }
    for (std::size_t s = 0; s < num_tags; ++s) {
      if (params.transition[t][s] > 0.0 &&
          !BioAllows(&params.tag_set[t], params.tag_set[s])) {
        throw ConfigError("transition " + name + " -> " +
                          params.tag_set[s].ToString() + " violates BIO");
      }
    }
  }
}

LabelSet LabelsOf(std::span<const Tag> tag_set) {
  std::set<std::string> labels;
  for (const auto &tag : tag_set) {
    if (tag.kind != TagKind::kOutside) labels.insert(tag.label);
  }
  return LabelSet({labels.begin(), labels.end()});
}

HmmModel::HmmModel(HmmParams params) : params_(std::move(params)) {
  ValidateParams(params_);
  labels_ = LabelsOf(params_.tag_set);
  for (std::size_t i = 0; i < params_.vocab.size(); ++i) {
    word_index_.emplace(params_.vocab[i], static_cast<int>(i));
  }
  log_initial_ = LogRow(params_.initial);
  for (const auto &row : params_.transition) log_transition_.push_back(LogRow(row));
  for (const auto &row : params_.emission) log_emission_.push_back(LogRow(row));
}

std::vector<int> HmmModel::WordIds(const InputText &input) const {
  ValidateInput(input);
  std::vector<int> ids;
  ids.reserve(input.words.size());
  for (const auto &word : input.words) {
    auto it = word_index_.find(word);
    if (it == word_index_.end()) {
      throw VocabError("word '" + word + "' in input '" + input.id +
                       "' is not in the model vocabulary");
    }
    ids.push_back(it->second);
  }
  return ids;
}

std::vector<std::vector<double>> HmmModel::LogBackward(std::span<const int> word_ids) const {
  const int n = static_cast<int>(word_ids.size());
  const int num_tags = this->num_tags();
  std::vector<std::vector<double>> beta(n, std::vector<double>(num_tags, 0.0));
  std::vector<double> terms(num_tags);
  for (int w = n - 2; w >= 0; --w) {
    for (int t = 0; t < num_tags; ++t) {
      for (int s = 0; s < num_tags; ++s) {
        terms[s] = log_transition_[t][s] + log_emission_[s][word_ids[w + 1]] + beta[w + 1][s];
      }
      beta[w][t] = LogSumExp(terms);
    }
  }
  return beta;
}

std::vector<double> HmmModel::NextLogProbs(const InputText &input,
                                           std::span<const TagId> prefix) const {
  std::vector<int> word_ids = WordIds(input);
  const std::size_t w = prefix.size();
  if (w >= word_ids.size()) {
    throw UsageError("prefix of length " + std::to_string(w) +
                     " leaves no word to tag in '" + input.id + "'");
  }
  for (TagId t : prefix) {
    if (t < 0 || t >= num_tags()) throw UsageError("tag id out of range");
  }
  auto beta = LogBackward(word_ids);
  std::vector<double> scores(num_tags());
  for (int t = 0; t < num_tags(); ++t) {
    double enter = w == 0 ? log_initial_[t] : log_transition_[prefix[w - 1]][t];
    scores[t] = enter + log_emission_[t][word_ids[w]] + beta[w][t];
  }
  double norm = LogSumExp(scores);
  if (norm == kLogZero) {
    throw UsageError("prefix has zero probability for input '" + input.id + "'");
  }
  for (double &v : scores) {
    if (v != kLogZero) v -= norm;
  }
  return scores;
}

double HmmModel::ConstrainedLogMass(std::span<const int> word_ids,
                                    const std::vector<std::vector<char>> &allowed) const {
  const int n = static_cast<int>(word_ids.size());
  const int num_tags = this->num_tags();
  std::vector<double> alpha(num_tags), next(num_tags), terms(num_tags);
  for (int t = 0; t < num_tags; ++t) {
    alpha[t] = allowed[0][t] ? log_initial_[t] + log_emission_[t][word_ids[0]] : kLogZero;
  }
  for (int w = 1; w < n; ++w) {
    for (int s = 0; s < num_tags; ++s) {
      if (!allowed[w][s]) {
        next[s] = kLogZero;
        continue;
      }
      for (int t = 0; t < num_tags; ++t) terms[t] = alpha[t] + log_transition_[t][s];
      next[s] = LogSumExp(terms) + log_emission_[s][word_ids[w]];
    }
    std::swap(alpha, next);
  }
  return LogSumExp(alpha);
}

double HmmModel::LogEvidence(const InputText &input) const {
  std::vector<int> word_ids = WordIds(input);
  std::vector<std::vector<char>> allowed(word_ids.size(),
                                         std::vector<char>(num_tags(), 1));
  return ConstrainedLogMass(word_ids, allowed);
}

double HmmModel::LogJoint(const InputText &input, std::span<const TagId> tags) const {
  std::vector<int> word_ids = WordIds(input);
  if (tags.size() != word_ids.size()) {
    throw AlignmentError("tag count does not match word count");
  }
  double logp = 0.0;
  for (std::size_t w = 0; w < tags.size(); ++w) {
    logp += w == 0 ? log_initial_[tags[0]] : log_transition_[tags[w - 1]][tags[w]];
    logp += log_emission_[tags[w]][word_ids[w]];
  }
  return logp;
}

double HmmModel::LogPosterior(const InputText &input, std::span<const TagId> tags) const {
  double joint = LogJoint(input, tags);
  return joint == kLogZero ? kLogZero : joint - LogEvidence(input);
}

std::vector<double> posterior_next_tag(const HmmModel &model, const InputText &input,
                                       std::span<const TagId> prefix) {
  std::vector<double> probs = model.NextLogProbs(input, prefix);
  for (double &v : probs) v = std::exp(v);
  return probs;
}

namespace {

enum class Boundary { kOpen, kClosed };

double PatternPosterior(const HmmModel &model, const InputText &input,
                        const LabeledSpan &span, Boundary boundary) {
  std::vector<int> word_ids = model.WordIds(input);
  const int n = static_cast<int>(word_ids.size());
  if (span.start < 0 || span.end > n || span.start >= span.end) {
    throw RangeError("span [" + std::to_string(span.start) + ", " +
                     std::to_string(span.end) + ") is outside input '" + input.id +
                     "' of " + std::to_string(n) + " words");
  }
  if (!span.phrase.empty() &&
      span.phrase != JoinPhrase(input.words, span.start, span.end)) {
    throw RangeError("span phrase '" + span.phrase + "' does not match the input words");
  }
  std::vector<std::vector<char>> allowed(n, std::vector<char>(model.num_tags(), 1));
  auto force = [&](int pos, const Tag &tag) {
    auto id = model.FindTag(tag);
    if (!id) {
      throw FormatError("tag '" + tag.ToString() + "' is not in the model tag set");
    }
    std::fill(allowed[pos].begin(), allowed[pos].end(), 0);
    allowed[pos][*id] = 1;
  };
  if (span.is_outside()) {
    if (span.end != span.start + 1) throw RangeError("O spans cover exactly one word");
    force(span.start, Tag::Outside());
  } else {
    force(span.start, Tag::Begin(span.label));
    for (int w = span.start + 1; w < span.end; ++w) force(w, Tag::Inside(span.label));
    if (boundary == Boundary::kClosed && span.end < n) {
      if (auto inside = model.FindTag(Tag::Inside(span.label))) {
        allowed[span.end][*inside] = 0;
      }
    }
  }
  double evidence = model.LogEvidence(input);
  double mass = model.ConstrainedLogMass(word_ids, allowed);
  if (evidence == kLogZero) {
    throw UsageError("input '" + input.id + "' has zero probability under the model");
  }
  return std::min(1.0, std::exp(mass - evidence));
}

}  // namespace

double exact_pattern_marginal(const HmmModel &model, const InputText &input,
                              const LabeledSpan &span) {
  return PatternPosterior(model, input, span, Boundary::kOpen);
}

double exact_span_marginal(const HmmModel &model, const InputText &input,
                           const LabeledSpan &span) {
  return PatternPosterior(model, input, span, Boundary::kClosed);
}

std::uint64_t SequenceSpaceSize(int num_tags, std::size_t length) {
  std::uint64_t size = 1;
  for (std::size_t i = 0; i < length; ++i) {
    if (size > UINT64_MAX / static_cast<std::uint64_t>(num_tags)) return UINT64_MAX;
    size *= static_cast<std::uint64_t>(num_tags);
  }
  return size;
}

std::vector<ScoredSequence> enumerate_all(const HmmModel &model, const InputText &input,
                                          std::uint64_t cap) {
  const std::size_t n = model.WordIds(input).size();
  const int num_tags = model.num_tags();
  std::uint64_t total = SequenceSpaceSize(num_tags, n);
  if (total > cap) {
    throw CapacityError("enumerating " + std::to_string(n) + " words over " +
                        std::to_string(num_tags) + " tags exceeds the cap of " +
                        std::to_string(cap) + " sequences");
  }
  double evidence = model.LogEvidence(input);
  std::vector<ScoredSequence> out;
  out.reserve(total);
  std::vector<TagId> tags(n, 0);
  for (std::uint64_t i = 0; i < total; ++i) {
    double joint = model.LogJoint(input, tags);
    out.push_back({tags, joint == kLogZero ? 0.0 : std::exp(joint - evidence)});
    for (std::size_t w = n; w-- > 0;) {
      if (++tags[w] < num_tags) break;
      tags[w] = 0;
    }
  }
  return out;
}

namespace {

// Uniform double in [0, 1) from the top 53 bits of one engine draw.
double UniformUnit(std::mt19937_64 &rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

int SampleIndex(std::span<const double> probs, std::mt19937_64 &rng) {
  double u = UniformUnit(rng);
  double cumulative = 0.0;
  int last_positive = -1;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (probs[i] <= 0.0) continue;
    last_positive = static_cast<int>(i);
    cumulative += probs[i];
    if (u < cumulative) return last_positive;
  }
  return last_positive;
}

}  // namespace

std::vector<LabeledExample> sample_corpus(const HmmParams &params, int count,
                                          std::pair<int, int> length_range,
                                          std::uint64_t seed,
                                          const std::string &id_prefix) {
  if (count < 1) throw ConfigError("sample count must be at least 1");
  auto [min_length, max_length] = length_range;
  if (min_length < 1 || min_length > max_length) {
    throw ConfigError("length range must satisfy 1 <= min <= max");
  }
  ValidateParams(params);
  std::mt19937_64 rng(seed);
  const auto span_width = static_cast<std::uint64_t>(max_length - min_length + 1);
  std::vector<LabeledExample> corpus;
  corpus.reserve(count);
  for (int i = 0; i < count; ++i) {
    const int n = min_length + static_cast<int>(rng() % span_width);
    LabeledExample example;
    example.input.id = id_prefix + "-" + std::to_string(i);
    example.gold.id = example.input.id;
    int tag = SampleIndex(params.initial, rng);
    for (int w = 0; w < n; ++w) {
      if (w > 0) tag = SampleIndex(params.transition[tag], rng);
      example.gold.tags.push_back(params.tag_set[tag]);
      example.input.words.push_back(params.vocab[SampleIndex(params.emission[tag], rng)]);
    }
    corpus.push_back(std::move(example));
  }
  return corpus;
}

}  // namespace seqconf
