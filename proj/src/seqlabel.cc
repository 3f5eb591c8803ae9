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

#include "seqconf/seqlabel.h"

#include <algorithm>
#include <cctype>

#include "seqconf/errors.h"

namespace seqconf {

std::string Tag::ToString() const {
  switch (kind) {
    case TagKind::kOutside:
      return std::string(kOutsideLabel);
    case TagKind::kBegin:
      return "B-" + label;
    case TagKind::kInside:
      return "I-" + label;
  }
  return {};
}

bool IsValidLabelName(std::string_view label) {
  if (label.empty()) return false;
  return std::all_of(label.begin(), label.end(), [](unsigned char c) {
    return std::isalnum(c) || c == '_';
  });
}

LabelSet::LabelSet(std::vector<std::string> labels) : labels_(std::move(labels)) {
  for (const auto &label : labels_) {
    if (!IsValidLabelName(label)) {
      throw ConfigError("invalid label name '" + label + "'");
    }
    if (label == kOutsideLabel) {
      throw ConfigError("'O' is reserved and cannot be a task label");
    }
  }
  std::sort(labels_.begin(), labels_.end());
  if (std::adjacent_find(labels_.begin(), labels_.end()) != labels_.end()) {
    throw ConfigError("duplicate label in label set");
  }
}

bool LabelSet::contains(std::string_view label) const {
  return std::binary_search(labels_.begin(), labels_.end(), label);
}

Tag ParseTag(std::string_view text) {
  if (text == kOutsideLabel) return Tag::Outside();
  if (text.size() > 2 && text[1] == '-' && (text[0] == 'B' || text[0] == 'I')) {
    std::string_view label = text.substr(2);
    if (IsValidLabelName(label)) {
      return {text[0] == 'B' ? TagKind::kBegin : TagKind::kInside,
              std::string(label)};
    }
  }
  throw FormatError("malformed tag '" + std::string(text) + "'");
}

Tag ParseTag(std::string_view text, const LabelSet &labels) {
  Tag tag = ParseTag(text);
  if (tag.kind != TagKind::kOutside && !labels.contains(tag.label)) {
    throw FormatError("unknown label in tag '" + std::string(text) + "'");
  }
  return tag;
}

namespace {

// Index of the first tag that violates BIO, or -1.
int FirstBioViolation(std::span<const Tag> tags) {
  for (std::size_t i = 0; i < tags.size(); ++i) {
    if (tags[i].kind != TagKind::kInside) continue;
    if (i == 0 || tags[i - 1].kind == TagKind::kOutside ||
        tags[i - 1].label != tags[i].label) {
      return static_cast<int>(i);
    }
  }
  return -1;
}

}  // namespace

void CheckBio(std::span<const Tag> tags) {
  int bad = FirstBioViolation(tags);
  if (bad >= 0) {
    throw FormatError("BIO violation at position " + std::to_string(bad) +
                      ": '" + tags[bad].ToString() + "'");
  }
}

bool IsBioWellFormed(std::span<const Tag> tags) {
  return FirstBioViolation(tags) < 0;
}

void ValidateInput(const InputText &input) {
  if (input.words.empty()) {
    throw UsageError("input '" + input.id + "' has no words");
  }
  for (const auto &word : input.words) {
    if (word.empty()) throw FormatError("empty word in input '" + input.id + "'");
    for (unsigned char c : word) {
      if (std::isspace(c)) {
        throw FormatError("word '" + word + "' contains whitespace");
      }
    }
  }
}

std::string JoinPhrase(std::span<const std::string> words, int start, int end) {
  std::string phrase;
  for (int i = start; i < end; ++i) {
    if (i > start) phrase += ' ';
    phrase += words[i];
  }
  return phrase;
}

std::vector<LabeledSpan> segment_spans(std::span<const std::string> words,
                                       std::span<const Tag> tags) {
  if (words.size() != tags.size()) {
    throw AlignmentError("tag count " + std::to_string(tags.size()) +
                         " does not match word count " +
                         std::to_string(words.size()));
  }
  CheckBio(tags);
  std::vector<LabeledSpan> spans;
  const int n = static_cast<int>(tags.size());
  int i = 0;
  while (i < n) {
    int end = i + 1;
    std::string label(kOutsideLabel);
    if (tags[i].kind != TagKind::kOutside) {
      label = tags[i].label;
      while (end < n && tags[end].kind == TagKind::kInside) ++end;
    }
    spans.push_back({i, end, std::move(label), JoinPhrase(words, i, end)});
    i = end;
  }
  return spans;
}

TagSequence tags_from_spans(std::span<const LabeledSpan> spans, int n) {
  TagSequence tags(n);
  for (const auto &span : spans) {
    if (span.start < 0 || span.end > n || span.start >= span.end) {
      throw RangeError("span [" + std::to_string(span.start) + ", " +
                       std::to_string(span.end) + ") outside sentence");
    }
    if (span.is_outside()) continue;
    tags[span.start] = Tag::Begin(span.label);
    for (int i = span.start + 1; i < span.end; ++i) tags[i] = Tag::Inside(span.label);
  }
  return tags;
}

int CountNonOutside(std::span<const LabeledSpan> spans) {
  return static_cast<int>(std::count_if(
      spans.begin(), spans.end(), [](const LabeledSpan &s) { return !s.is_outside(); }));
}

bool ContainsSpan(std::span<const LabeledSpan> spans, const LabeledSpan &span) {
  return std::find(spans.begin(), spans.end(), span) != spans.end();
}

std::string SentinelToken(std::size_t i) { return "<s" + std::to_string(i) + ">"; }

std::vector<std::string> encode_si(std::span<const std::string> words) {
  if (words.empty()) throw UsageError("cannot encode an empty input");
  std::vector<std::string> tokens;
  tokens.reserve(2 * words.size());
  for (std::size_t i = 0; i < words.size(); ++i) {
    tokens.push_back(SentinelToken(i));
    tokens.push_back(words[i]);
  }
  return tokens;
}

std::vector<std::string> decode_si_input(std::span<const std::string> tokens) {
  if (tokens.empty() || tokens.size() % 2 != 0) {
    throw FormatError("sentinel+tag input must alternate sentinels and words");
  }
  std::vector<std::string> words;
  for (std::size_t i = 0; i < tokens.size(); i += 2) {
    if (tokens[i] != SentinelToken(i / 2)) {
      throw FormatError("expected sentinel " + SentinelToken(i / 2) + ", got '" +
                        tokens[i] + "'");
    }
    words.push_back(tokens[i + 1]);
  }
  return words;
}

std::vector<std::string> encode_si_tags(std::span<const Tag> tags) {
  std::vector<std::string> units;
  units.reserve(tags.size());
  for (const auto &tag : tags) units.push_back(tag.ToString());
  return units;
}

TagSequence decode_si(std::span<const std::string> units, std::size_t n,
                      const LabelSet *labels) {
  if (units.size() != n) {
    throw AlignmentError("expected " + std::to_string(n) + " output units, got " +
                         std::to_string(units.size()));
  }
  TagSequence tags;
  tags.reserve(n);
  for (const auto &unit : units) {
    tags.push_back(labels ? ParseTag(unit, *labels) : ParseTag(unit));
  }
  CheckBio(tags);
  return tags;
}

GoldSpans MakeGoldSpans(const InputText &input, const GoldAnnotation &gold) {
  if (input.id != gold.id) {
    throw UsageError("gold id '" + gold.id + "' does not match input id '" +
                     input.id + "'");
  }
  return {gold.id, segment_spans(input.words, gold.tags)};
}

bool match_span(std::string_view pred_id, const LabeledSpan &pred,
                const GoldSpans &gold) {
  if (pred_id != gold.id) {
    throw UsageError("prediction id '" + std::string(pred_id) +
                     "' does not match gold id '" + gold.id + "'");
  }
  return ContainsSpan(gold.spans, pred);
}

}  // namespace seqconf
