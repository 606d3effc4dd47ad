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

#include "compoundcap/qcore.hpp"
#include "support.hpp"

namespace compoundcap {
namespace {

using testing::kraus_channel;
using testing::oracles;

TEST(DimLayout, RejectsNonPositive) {
  EXPECT_THROW(DimLayout({2, 0}), std::invalid_argument);
  EXPECT_EQ(DimLayout({2, 3}).total(), 6);
}

TEST(PartialTrace, ProductStateFactors) {
  std::mt19937_64 rng(1);
  const auto a = random_density(2, rng), b = random_density(3, rng);
  const auto ab = tensor(a, b);
  EXPECT_LT((partial_trace(ab, {0}).matrix() - a.matrix()).norm(), 1e-12);
  EXPECT_LT((partial_trace(ab, {1}).matrix() - b.matrix()).norm(), 1e-12);
}

TEST(PermuteSystems, SwapTwiceIsIdentity) {
  std::mt19937_64 rng(2);
  const CMatrix m = random_density(6, rng).matrix();
  const CMatrix once = permute_systems(m, {2, 3}, {1, 0});
  const CMatrix back = permute_systems(once, {3, 2}, {1, 0});
  EXPECT_LT((back - m).norm(), 1e-14);
}

TEST(Channel, CompletenessValidated) {
  std::vector<CMatrix> k{CMatrix::Identity(2, 2) * 0.5};
  try {
    Channel c(k);
    FAIL() << "expected a throw";
  } catch (const std::invalid_argument& e) {
    EXPECT_NE(std::string(e.what()).find("kraus completeness violated"), std::string::npos);
  }
  EXPECT_NO_THROW(Channel(k, Channel::Kind::TraceNonIncreasing));
}

TEST(Channel, ChoiRoundTrip) {
  std::mt19937_64 rng(3);
  const Channel n = random_channel(2, 3, 3, rng);
  const Channel back = channel_from_choi(choi(n).matrix(), 2);
  const CMatrix rho = random_density(2, rng).matrix();
  EXPECT_LT((back.apply(rho) - n.apply(rho)).norm(), 1e-10);
}

TEST(Channel, ComplementMatchesDilation) {
  std::mt19937_64 rng(4);
  const Channel n = random_channel(3, 2, 4, rng);
  const CMatrix w = dilation_matrix(n);
  const CMatrix rho = random_density(3, rng).matrix();
  const CMatrix out = w * rho * w.adjoint();
  const int e = n.kraus_rank();
  EXPECT_LT((partial_trace(out, {2, e}, {0}) - n.apply(rho)).norm(), 1e-12);
  EXPECT_LT((partial_trace(out, {2, e}, {1}) - complementary(n).apply(rho)).norm(), 1e-12);
}

TEST(Channel, DepolarizingFixesMaximallyMixed) {
  const Channel n = depolarizing(3, 0.4);
  EXPECT_LT((n.apply(max_mixed(3).matrix()) - max_mixed(3).matrix()).norm(), 1e-14);
}

TEST(Fidelity, FuchsVanDeGraaf) {
  std::mt19937_64 rng(5);
  for (int k = 0; k < 50; ++k) {
    const CMatrix a = random_density(3, rng).matrix(), b = random_density(3, rng).matrix();
    const double f = fidelity(a, b), t = trace_norm(CMatrix(a - b));
    EXPECT_LE((1 - t / 2) * (1 - t / 2), f + 1e-10);
    EXPECT_LE(f, 1 - t * t / 4 + 1e-10);
  }
  const CMatrix a = random_density(2, rng).matrix();
  EXPECT_NEAR(fidelity(a, a), 1.0, 1e-10);
}

TEST(Uhlmann, AttainsMarginalFidelity) {
  std::mt19937_64 rng(6);
  const CVector r = random_pure(6, rng).vector(), s = random_pure(8, rng).vector();
  const PartialIsometry v = uhlmann_isometry(r, 2, s);
  const CMatrix rv = unvec<double>(r, 2, 3), sv = unvec<double>(s, 2, 4);
  const CMatrix mapped = rv * v.matrix().transpose();  // (1 (x) V)|r> as a 2 x 4 matrix
  const double overlap = std::norm(vec<double>(mapped).dot(vec<double>(sv)));
  EXPECT_NEAR(overlap, fidelity(CMatrix(rv * rv.adjoint()), CMatrix(sv * sv.adjoint())), 1e-10);
}

TEST(Haar, UnitaryAndSeeded) {
  std::mt19937_64 a(9), b(9);
  const CMatrix u = haar_unitary(4, a);
  EXPECT_LT((u.adjoint() * u - CMatrix::Identity(4, 4)).norm(), 1e-12);
  EXPECT_EQ(u, haar_unitary(4, b));
}

TEST(Diamond, MatchesOracles) {
  for (const auto& c : oracles()["diamond"]) {
    const auto r = diamond_distance(kraus_channel(c["a"]), kraus_channel(c["b"]));
    EXPECT_TRUE(r.certified);
    EXPECT_NEAR(r.value, c["value"].get<double>(), 1e-6);
  }
}

TEST(Diamond, IdenticalChannelsAtZero) {
  const auto r = diamond_distance(dephasing(0.3), dephasing(0.3));
  EXPECT_NEAR(r.value, 0.0, 1e-7);
}

}  // namespace
}  // namespace compoundcap
