// Copyright 2026 The compoundcap Authors
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


// JSON encodings. Complex entries are [re, im] pairs; doubles are written in
// shortest round-trip form so files reload bit for bit.

#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>

#include "compoundcap/compound.hpp"
#include "json.hpp"

namespace compoundcap {

using Json = nlohmann::ordered_json;

/// Malformed input. The message names the offending field.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

Json to_json(const CMatrix& m);
Json to_json(const CVector& v);
Json to_json(const Channel& n);
Json to_json(const DensityOperator& rho);
Json to_json(const PureState& psi);

CMatrix matrix_from_json(const Json& j, const std::string& field);
CVector vector_from_json(const Json& j, const std::string& field);

/// Kraus object {"d_in", "d_out", "kraus"} or a named channel such as
/// {"named": "depolarizing", "d": 2, "p": 0.25}.
Channel channel_from_json(const Json& j);
/// {"matrix": ...} or {"vector": ...}, optional "dims". A vector becomes its projector.
DensityOperator state_from_json(const Json& j);
PureState pure_state_from_json(const Json& j);
/// Array (or {"members": array}) of inline channels, {"file": path} references
/// resolved against base_dir, or bare path strings. Each entry may carry "label".
CompoundChannel compound_from_json(const Json& j, const std::filesystem::path& base_dir = {});

Json read_json_file(const std::filesystem::path& path);
Channel read_channel(const std::filesystem::path& path);
CompoundChannel read_compound(const std::filesystem::path& path);
DensityOperator read_state(const std::filesystem::path& path);

}  // namespace compoundcap
