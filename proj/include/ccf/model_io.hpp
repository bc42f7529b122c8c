// Copyright 2026 The ccforest authors
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

#ifndef CCF_MODEL_IO_HPP
#define CCF_MODEL_IO_HPP

#include <string>

#include "ccf/forest.hpp"

namespace ccf {

inline constexpr const char* kModelFormatVersion = "ccf-model/1";

/// Tab-separated text format, one record per line, floats in C99 hexadecimal
/// so the round trip is bit-exact. Deterministic: the bytes are a pure
/// function of the forest.
std::string serialize_forest(const Forest& forest);
Forest parse_forest(const std::string& text);

/// File variants; saving writes to a temp file and renames into place.
void save_forest(const Forest& forest, const std::string& path);
Forest load_forest(const std::string& path);

}  // namespace ccf

#endif  // CCF_MODEL_IO_HPP
