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

#include <random>

#include "compoundcap/sdp.hpp"

namespace compoundcap::sdp {
namespace {

CMatrix random_hermitian(int d, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  CMatrix m(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) m(i, j) = Complex(g(rng), g(rng));
  return (m + m.adjoint()) / 2.0;
}

// min <C, X> s.t. tr X = 1, X >= 0  equals  lambda_min(C)
Problem eigen_problem(const CMatrix& c) {
  Problem p;
  const int d = static_cast<int>(c.rows());
  const int b = p.add_block(d, "X");
  p.set_objective(b, c);
  std::vector<Congruence> parts;
  for (int i = 0; i < d; ++i) parts.push_back({1.0, CMatrix::Identity(d, d).row(i)});
  p.add_constraint(b, parts, CMatrix::Identity(1, 1), Sense::Equal, "trace");
  return p;
}

TEST(Sdp, SmallestEigenvalue) {
  std::mt19937_64 rng(1);
  for (int d : {2, 3, 5}) {
    const CMatrix c = random_hermitian(d, rng);
    const Solution s = solve(eigen_problem(c), 1e-8);
    ASSERT_EQ(s.status, Status::Optimal);
    EXPECT_NEAR(s.primal_objective, hermitian_eigenvalues(c).minCoeff(), 1e-6);
    const Verification v = verify(eigen_problem(c), s, 1e-7);
    EXPECT_TRUE(v.ok);
    EXPECT_LE(v.gap, 1e-7);
  }
}

TEST(Sdp, InequalityConstraint) {
  // min -tr X s.t. X <= I/2 (as an operator inequality), X >= 0 -> -d/2
  Problem p;
  const int d = 3;
  const int b = p.add_block(d);
  p.set_objective(b, -CMatrix::Identity(d, d));
  p.add_constraint(b, {{1.0, CMatrix::Identity(d, d)}}, CMatrix::Identity(d, d) / 2.0, Sense::LessEqual);
  const Solution s = solve(p);
  ASSERT_EQ(s.status, Status::Optimal);
  EXPECT_NEAR(s.primal_objective, -1.5, 1e-6);
}

TEST(Sdp, FirstOrderFallbackAgrees) {
  std::mt19937_64 rng(2);
  const CMatrix c = random_hermitian(3, rng);
  Options o;
  o.tol = 1e-6;
  o.force_fallback = true;
  const Solution s = solve(eigen_problem(c), o);
  EXPECT_TRUE(s.used_fallback);
  EXPECT_NEAR(s.primal_objective, hermitian_eigenvalues(c).minCoeff(), 1e-4);
}

TEST(Sdp, InfeasibleDetected) {
  Problem p;
  const int b = p.add_block(2);
  p.set_objective(b, CMatrix::Identity(2, 2));
  p.add_constraint(b, {{1.0, CMatrix::Identity(2, 2).row(0)}, {1.0, CMatrix::Identity(2, 2).row(1)}},
                   -CMatrix::Identity(1, 1));
  const Solution s = solve(p);
  EXPECT_NE(s.status, Status::Optimal);
}

TEST(Sdp, StatusNames) {
  EXPECT_STREQ(status_name(Status::Optimal), "optimal");
}

}  // namespace
}  // namespace compoundcap::sdp
