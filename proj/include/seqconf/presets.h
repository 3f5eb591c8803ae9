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

#ifndef SEQCONF_PRESETS_H_
#define SEQCONF_PRESETS_H_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "seqconf/hmm.h"

namespace seqconf {

// Restaurant-query model where Cuisine and Location compete for boundary
// words ("diners", "in", "the", "area"), so a location can be read as
// "area", "the area" or "in the area".
HmmParams AmbiguousLocPreset();

// Tags {O, B-X, I-X} over a three-word vocabulary; small enough to enumerate.
HmmParams TinyPreset();

// Random BIO-consistent HMM with labels L0..L{num_labels-1}, so |T| is
// 2·num_labels + 1. Rows are drawn with a skew that makes some entries
// dominant. Deterministic for a given seed.
HmmParams RandomHmmParams(int num_labels, int vocab_size, std::uint64_t seed);

// Names accepted by PresetByName.
std::vector<std::string> PresetNames();

// Throws ConfigError for unknown names.
HmmParams PresetByName(std::string_view name);

}  // namespace seqconf

#endif  // SEQCONF_PRESETS_H_
