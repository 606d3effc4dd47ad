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

#include "compoundcap/capacity.hpp"
#include "compoundcap/entropy.hpp"
#include "support.hpp"

namespace compoundcap {
namespace {

using testing::kraus_channel;
using testing::oracles;

TEST(Capacity, SingleMatchesOracle) {
  for (const auto& c : oracles()["capacity"]) {
    const auto r = qe_single(kraus_channel(c["kraus"]), 1e-8);
    EXPECT_NEAR(r.bits_per_use, c["q_e"].get<double>(), 1e-6);
    EXPECT_GE(r.gap, 0.0);
  }
}

TEST(Capacity, CompoundMatchesOracle) {
  for (const auto& c : oracles()["compound"]) {
    std::vector<Channel> members;
    for (const auto& m : c["members"]) members.push_back(kraus_channel(m));
    const CompoundChannel pi(members);
    EXPECT_NEAR(qe_compound(pi, 1e-8).bits_per_use, c["q_e"].get<double>(), 1e-6);
    double lo = 1e9;
    for (const auto& v : c["member_q_e"]) lo = std::min(lo, v.get<double>());
    EXPECT_NEAR(qe_informed_sender(pi, 1e-8).bits_per_use, lo, 1e-6);
  }
}

TEST(Capacity, IdentityAndDepolarizing) {
  EXPECT_NEAR(qe_single(identity_channel(2)).bits_per_use, 1.0, 1e-6);
  EXPECT_NEAR(qe_single(identity_channel(3)).bits_per_use, std::log2(3.0), 1e-6);
  // depolarizing is covariant, so the maximally mixed input is optimal
  const Channel dep = depolarizing(2, 0.3);
  EXPECT_NEAR(qe_single(dep).bits_per_use, 0.5 * channel_mutual_info(max_mixed(2).matrix(), dep), 1e-6);
  EXPECT_NEAR(qe_single(depolarizing(2, 1.0)).bits_per_use, 0.0, 1e-6);
}

TEST(Capacity, MutualInfoRoutesAgree) {
  std::mt19937_64 rng(3);
  for (int k = 0; k < 5; ++k) {
    const Channel n = random_channel(2, 3, 2, rng);
    const CMatrix rho = random_density(2, rng).matrix();
    EXPECT_NEAR(channel_mutual_info(rho, n), channel_mutual_info_exchange(rho, n), 1e-10);
  }
}

TEST(Capacity, GradientMatchesFiniteDifferences) {
  std::mt19937_64 rng(4);
  const Channel n = random_channel(3, 2, 3, rng);
  const CMatrix rho = random_density(3, rng).matrix();
  const CMatrix g = channel_mutual_info_gradient(rho, n);
  for (int k = 0; k < 4; ++k) {
    CMatrix dir = random_density(3, rng).matrix() - rho;  // stays in the trace-one plane
    const double h = 1e-6;
    const double fd = (channel_mutual_info(CMatrix(rho + h * dir), n) - channel_mutual_info(CMatrix(rho - h * dir), n)) / (2 * h);
    EXPECT_NEAR((g * dir).trace().real(), fd, 1e-5);
  }
}

TEST(Capacity, CompoundBelowMembers) {
  std::mt19937_64 rng(5);
  for (int k = 0; k < 3; ++k) {
    const CompoundChannel pi({random_channel(2, 2, 2, rng), random_channel(2, 2, 2, rng)});
    const double c = qe_compound(pi).bits_per_use;
    EXPECT_LE(c, qe_informed_sender(pi).bits_per_use + 1e-6);
    EXPECT_NEAR(qe_feedback(pi).bits_per_use, qe_informed_sender(pi).bits_per_use, 1e-9);
    EXPECT_NEAR(qe_informed_receiver(pi).bits_per_use, c, 1e-9);
    EXPECT_NEAR(classical_capacity(Variant::Uninformed, pi), 2 * c, 1e-6);
  }
}

TEST(Capacity, VariantNames) {
  for (auto v : {Variant::Uninformed, Variant::InformedReceiver, Variant::InformedSender, Variant::Feedback})
    EXPECT_EQ(variant_from_string(variant_name(v)), v);
  EXPECT_THROW(variant_from_string("psychic"), std::invalid_argument);
}

TEST(Capacity, ConverseAndContinuity) {
  EXPECT_THROW(converse_bound_from(2.0, 10, 0.0), std::invalid_argument);
  EXPECT_NEAR(converse_bound_from(2.0, 10, 0.5), 2 * (2.0 + 0.1), 1e-12);
  EXPECT_GE(converse_bound(identity_channel(2), 5, 0.1), 2.0);
  EXPECT_NEAR(continuity_rate_from(1.0, 2, 0.0), 1.0, 1e-12);
  const double eps = 0.1;
  EXPECT_NEAR(continuity_rate_from(1.0, 2, eps), 1.0 - eps + (1 + eps / 2) * binary_entropy(eps / (2 + eps)), 1e-12);
}

}  // namespace
}  // namespace compoundcap
