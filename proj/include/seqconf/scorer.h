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

#ifndef SEQCONF_SCORER_H_
#define SEQCONF_SCORER_H_

#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "seqconf/seqlabel.h"

namespace seqconf {

// Index into a scorer's tag set.
using TagId = int;

// Autoregressive conditional distribution over the tag of the next word,
// given the whole input and the tags already emitted. Implementations must
// be safe for concurrent const calls.
class Scorer {
 public:
  virtual ~Scorer() = default;

  virtual const std::vector<Tag> &tag_set() const = 0;

  // Natural-log probabilities over tag_set() for word prefix.size(). The
  // linear values sum to one.
  virtual std::vector<double> NextLogProbs(const InputText &input,
                                           std::span<const TagId> prefix) const = 0;

  std::optional<TagId> FindTag(const Tag &tag) const;

  // Maps tags to ids. Throws FormatError for tags outside tag_set().
  std::vector<TagId> ToIds(std::span<const Tag> tags) const;
  TagSequence ToTags(std::span<const TagId> ids) const;
};

// Sharpens (tau < 1) or flattens (tau > 1) every conditional of `base` by
// raising it to 1/tau and renormalizing. tau == 1 leaves it unchanged and the
// argmax is preserved for all tau. Throws ConfigError for tau <= 0.
std::shared_ptr<const Scorer> perturb_temperature(std::shared_ptr<const Scorer> base,
                                                  double tau);

}  // namespace seqconf

#endif  // SEQCONF_SCORER_H_
