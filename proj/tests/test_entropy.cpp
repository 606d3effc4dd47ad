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


#include <gtest/gtest.h>

#include "compoundcap/entropy.hpp"
#include "support.hpp"

namespace compoundcap {
namespace {

using testing::oracles;

struct OracleState {
  CMatrix rho;
  int da, db;
  const Json* j;
};

std::vector<OracleState> oracle_states() {
  std::vector<OracleState> out;
  for (const auto& s : oracles()["states"])
    out.push_back({matrix_from_json(s["matrix"], "matrix"), s["dims"][0].get<int>(), s["dims"][1].get<int>(), &s});
  return out;
}

TEST(Entropy, BinaryEntropy) {
  EXPECT_DOUBLE_EQ(binary_entropy(0.5), 1.0);
  EXPECT_DOUBLE_EQ(binary_entropy(0.0), 0.0);
  EXPECT_DOUBLE_EQ(binary_entropy(1.0), 0.0);
}

TEST(Entropy, ConditionalMatchesOracle) {
  for (const auto& s : oracle_states())
    EXPECT_NEAR(cond_entropy(s.rho, s.da, s.db), (*s.j)["cond_entropy"].get<double>(), 1e-10);
}

TEST(Entropy, MinEntropyMatchesOracle) {
  for (const auto& s : oracle_states()) {
    const auto h = h_min(s.rho, s.da, s.db);
    EXPECT_NEAR(h.bits, (*s.j)["h_min"].get<double>(), 1e-6);
    EXPECT_LE(h.lower, h.upper);
  }
}

TEST(Entropy, MaxEntropyMatchesOracle) {
  for (const auto& s : oracle_states()) {
    EXPECT_NEAR(h_max(s.rho, s.da, s.db).bits, (*s.j)["h_max"].get<double>(), 1e-6);
    EXPECT_NEAR(h_max_fidelity_form(s.rho, s.da, s.db).bits, (*s.j)["h_max"].get<double>(), 1e-6);
  }
}

TEST(Entropy, SmoothMinEntropyMatchesOracle) {
  for (const auto& s : oracle_states()) {
    EXPECT_NEAR(smooth_h_min(s.rho, s.da, s.db, 0.1).bits, (*s.j)["smooth_h_min_0.1"].get<double>(), 1e-5);
    EXPECT_NEAR(smooth_h_min(s.rho, s.da, s.db, 0.3).bits, (*s.j)["smooth_h_min_0.3"].get<double>(), 1e-5);
  }
}

TEST(Entropy, MaximallyEntangled) {
  const CMatrix phi = testing::projector(testing::phi_vector(2));
  EXPECT_NEAR(h_min(phi, 2, 2).bits, -1.0, 1e-6);
  EXPECT_NEAR(h_max(phi, 2, 2).bits, -1.0, 1e-6);
  EXPECT_NEAR(cond_entropy(phi, 2, 2), -1.0, 1e-12);
}

TEST(Entropy, OrderingOnRandomStates) {
  std::mt19937_64 rng(11);
  for (int k = 0; k < 10; ++k) {
    const CMatrix rho = random_density(6, rng).matrix();
    const double lo = h_min(rho, 2, 3).bits, mid = cond_entropy(rho, 2, 3), hi = h_max(rho, 2, 3).bits;
    const double h2 = collision_entropy(rho, 2, 3).bits;
    EXPECT_LE(lo, h2 + 1e-6);
    EXPECT_LE(h2, mid + 1e-6);
    EXPECT_LE(mid, hi + 1e-6);
  }
}

TEST(Entropy, SmoothingMonotoneAndCapped) {
  std::mt19937_64 rng(12);
  const CMatrix rho = random_density(4, rng).matrix();
  const double a = smooth_h_min(rho, 2, 2, 0.05).bits, b = smooth_h_min(rho, 2, 2, 0.2).bits;
  EXPECT_LE(h_min(rho, 2, 2).bits, a + 1e-6);
  EXPECT_LE(a, b + 1e-6);
  EXPECT_LE(b, smooth_h_min_ceiling(2, 0.2) + 1e-6);
  EXPECT_LE(smooth_h_max(rho, 2, 2, 0.2).bits, h_max(rho, 2, 2).bits + 1e-6);
}

TEST(Entropy, SmoothingBallRejectsBadEps) {
  EXPECT_THROW(SmoothingBall(-0.1), std::invalid_argument);
  EXPECT_THROW(SmoothingBall(1.0), std::invalid_argument);
  EXPECT_NO_THROW(SmoothingBall(0.0));
}

TEST(Entropy, PurifyReproducesState) {
  std::mt19937_64 rng(13);
  const CMatrix rho = random_density(3, rng, 2).matrix();
  int rank = 0;
  const CVector psi = purify(rho, &rank);
  EXPECT_EQ(rank, 2);
  const CMatrix m = unvec<double>(psi, 3, psi.size() / 3);
  EXPECT_LT((m * m.adjoint() - rho).norm(), 1e-12);
}

TEST(Entropy, ClosedForms) {
  EXPECT_NEAR(fannes_cond(1.0, 2), 4.0, 1e-12);
  EXPECT_NEAR(fannes_cond(0.0, 3), 0.0, 1e-12);
  const auto d = aep_delta(0.5, 2, 100);
  EXPECT_NEAR(d.value, 4 * std::log2(2 * std::sqrt(2.0) + 1) * std::sqrt(3.0), 1e-12);
  EXPECT_TRUE(d.valid);
  EXPECT_FALSE(aep_delta(0.5, 2, 4).valid);
}

}  // namespace
}  // namespace compoundcap
