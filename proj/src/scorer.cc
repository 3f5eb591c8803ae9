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

#include "seqconf/scorer.h"

#include <algorithm>
#include <cmath>

#include "seqconf/errors.h"
#include "seqconf/logmath.h"

namespace seqconf {

std::optional<TagId> Scorer::FindTag(const Tag &tag) const {
  const auto &tags = tag_set();
  auto it = std::find(tags.begin(), tags.end(), tag);
  if (it == tags.end()) return std::nullopt;
  return static_cast<TagId>(it - tags.begin());
}

std::vector<TagId> Scorer::ToIds(std::span<const Tag> tags) const {
  std::vector<TagId> ids;
  ids.reserve(tags.size());
  for (const auto &tag : tags) {
    auto id = FindTag(tag);
    if (!id) throw FormatError("tag '" + tag.ToString() + "' not in the scorer's tag set");
    ids.push_back(*id);
  }
  return ids;
}

TagSequence Scorer::ToTags(std::span<const TagId> ids) const {
  const auto &tags = tag_set();
  TagSequence out;
  out.reserve(ids.size());
  for (TagId id : ids) out.push_back(tags.at(id));
  return out;
}

namespace {

class TemperedScorer : public Scorer {
 public:
  TemperedScorer(std::shared_ptr<const Scorer> base, double tau)
      : base_(std::move(base)), inv_tau_(1.0 / tau) {}

  const std::vector<Tag> &tag_set() const override { return base_->tag_set(); }

  std::vector<double> NextLogProbs(const InputText &input,
                                   std::span<const TagId> prefix) const override {
    std::vector<double> logp = base_->NextLogProbs(input, prefix);
    for (double &v : logp) {
      if (v != kLogZero) v *= inv_tau_;
    }
    double norm = LogSumExp(logp);
    for (double &v : logp) {
      if (v != kLogZero) v -= norm;
    }
    return logp;
  }

 private:
  std::shared_ptr<const Scorer> base_;
  double inv_tau_;
};

}  // namespace

std::shared_ptr<const Scorer> perturb_temperature(std::shared_ptr<const Scorer> base,
                                                  double tau) {
  if (!(tau > 0.0) || !std::isfinite(tau)) {
    throw ConfigError("temperature must be a positive finite number");
  }
  if (!base) throw UsageError("perturb_temperature needs a scorer");
  if (tau == 1.0) return base;
  return std::make_shared<TemperedScorer>(std::move(base), tau);
}

}  // namespace seqconf
