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


#pragma once

#include <cmath>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "compoundcap/io.hpp"
#include "compoundcap/linalg.hpp"
#include "compoundcap/qcore.hpp"

namespace compoundcap::testing {

inline std::string data_path(const std::string& name) { return std::string(COMPOUNDCAP_TEST_DATA) + "/" + name; }

inline const Json& oracles() {
  static const Json j = read_json_file(data_path("oracles.json"));
  return j;
}

inline Channel kraus_channel(const Json& list) {
  std::vector<CMatrix> k;
  for (const auto& m : list) k.push_back(matrix_from_json(m, "kraus"));
  return Channel(std::move(k));
}

inline CVector phi_vector(int d) {
  CVector v = CVector::Zero(static_cast<Eigen::Index>(d) * d);
  for (int a = 0; a < d; ++a) v(a * d + a) = 1 / std::sqrt(double(d));
  return v;
}

inline CMatrix projector(const CVector& v) { return v * v.adjoint(); }

inline CMatrix pauli_x() {
  CMatrix x(2, 2);
  x << 0, 1, 1, 0;
  return x;
}

}  // namespace compoundcap::testing
