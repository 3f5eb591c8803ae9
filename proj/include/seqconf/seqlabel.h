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

// Sequence labeling primitives: BIO tags, labeled spans, the sentinel+tag
// output format and exact span matching.
//
// Output units follow the sentinel+tag layout: one tag token per input word,
// with the sentinel implied by position. A tag token is `O`, `B-<LABEL>` or
// `I-<LABEL>` where `<LABEL>` matches [A-Za-z0-9_]+ (case-sensitive).
//
// Every O word forms its own single-word span. Consecutive O words are never
// merged, so (in, O) and (the, O) are two spans.

#ifndef SEQCONF_SEQLABEL_H_
#define SEQCONF_SEQLABEL_H_

#include <compare>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace seqconf {

// Label carried by spans built from O tags.
inline constexpr std::string_view kOutsideLabel = "O";

enum class TagKind : std::uint8_t { kOutside, kBegin, kInside };

struct Tag {
  TagKind kind = TagKind::kOutside;
  std::string label;  // empty iff kind == kOutside

  static Tag Outside() { return Tag{}; }
  static Tag Begin(std::string label) { return {TagKind::kBegin, std::move(label)}; }
  static Tag Inside(std::string label) { return {TagKind::kInside, std::move(label)}; }

  std::string ToString() const;

  friend bool operator==(const Tag &, const Tag &) = default;
  friend auto operator<=>(const Tag &, const Tag &) = default;
};

using TagSequence = std::vector<Tag>;

// True if `label` matches [A-Za-z0-9_]+.
bool IsValidLabelName(std::string_view label);

// The fixed, finite label set a task declares. "O" is reserved and may not be
// declared as a task label.
class LabelSet {
 public:
  LabelSet() = default;
  explicit LabelSet(std::vector<std::string> labels);

  bool contains(std::string_view label) const;
  const std::vector<std::string> &labels() const { return labels_; }
  bool empty() const { return labels_.empty(); }

 private:
  std::vector<std::string> labels_;  // sorted, unique
};

// Parses one tag token by grammar alone. Throws FormatError.
Tag ParseTag(std::string_view text);

// Parses one tag token and rejects labels outside `labels`. Throws FormatError.
Tag ParseTag(std::string_view text, const LabelSet &labels);

// Throws FormatError when an I tag follows the sequence start, an O tag, or a
// tag with a different label.
void CheckBio(std::span<const Tag> tags);
bool IsBioWellFormed(std::span<const Tag> tags);

struct InputText {
  std::string id;
  std::vector<std::string> words;
};

// Throws UsageError for an empty sentence and FormatError for empty words or
// words containing whitespace.
void ValidateInput(const InputText &input);

struct GoldAnnotation {
  std::string id;
  TagSequence tags;
};

struct LabeledSpan {
  int start = 0;  // inclusive word index
  int end = 0;    // exclusive word index
  std::string label;
  std::string phrase;

  bool is_outside() const { return label == kOutsideLabel; }

  friend bool operator==(const LabeledSpan &, const LabeledSpan &) = default;
};

// Joins words[start, end) with single spaces.
std::string JoinPhrase(std::span<const std::string> words, int start, int end);

// Splits a BIO tag sequence into labeled spans partitioning [0, n). Each
// maximal B/I run becomes one span; each O word becomes its own span.
// Throws AlignmentError on a length mismatch and FormatError on BIO violations.
std::vector<LabeledSpan> segment_spans(std::span<const std::string> words,
                                       std::span<const Tag> tags);

// Inverse of segment_spans for spans that partition [0, n).
TagSequence tags_from_spans(std::span<const LabeledSpan> spans, int n);

int CountNonOutside(std::span<const LabeledSpan> spans);

// True if `spans` holds a span identical to `span` in position, label and phrase.
bool ContainsSpan(std::span<const LabeledSpan> spans, const LabeledSpan &span);

// Sentinel token for word position `i`, e.g. "<s0>".
std::string SentinelToken(std::size_t i);

// Input side of the sentinel+tag format: [<s0>, w0, <s1>, w1, ...].
// Throws UsageError on empty input.
std::vector<std::string> encode_si(std::span<const std::string> words);

// Inverse of encode_si. Throws FormatError when sentinels are missing or out
// of order.
std::vector<std::string> decode_si_input(std::span<const std::string> tokens);

// Output units for a tag sequence: one tag token per word.
std::vector<std::string> encode_si_tags(std::span<const Tag> tags);

// Decodes output units into a tag sequence of length n. When `labels` is
// non-null, unknown labels are rejected. Throws AlignmentError when the unit
// count differs from n and FormatError on unknown tags or BIO violations.
TagSequence decode_si(std::span<const std::string> units, std::size_t n,
                      const LabelSet *labels = nullptr);

// The gold segmentation for one input.
struct GoldSpans {
  std::string id;
  std::vector<LabeledSpan> spans;
};

GoldSpans MakeGoldSpans(const InputText &input, const GoldAnnotation &gold);

// Exact span matching: position, phrase and label must all agree.
// Throws UsageError when `pred_id` differs from `gold.id`.
bool match_span(std::string_view pred_id, const LabeledSpan &pred,
                const GoldSpans &gold);

}  // namespace seqconf

#endif  // SEQCONF_SEQLABEL_H_
