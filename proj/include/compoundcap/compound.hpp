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


// Finite compound channels, the average-channel reduction and the bookkeeping
// formulas that go with it.

#pragma once

#include <string>
#include <vector>

#include "compoundcap/qcore.hpp"

namespace compoundcap {

class CompoundChannel {
 public:
  explicit CompoundChannel(std::vector<Channel> members, std::vector<std::string> labels = {});

  int size() const { return static_cast<int>(members_.size()); }
  const Channel& member(int i) const { return members_.at(i); }
  const std::vector<Channel>& members() const { return members_; }
  const std::vector<std::string>& labels() const { return labels_; }
  int d_in() const { return members_.front().d_in(); }
  int d_out() const { return members_.front().d_out(); }

 private:
  std::vector<Channel> members_;
  std::vector<std::string> labels_;
};

/// Entanglement-transmission code sizes. m1 holds either one shared value or
/// one entry per compound member.
struct CodeParams {
  int m0 = 1;
  std::vector<int> m1{1};
  int n = 1;
  double epsilon = 0;
  double delta = 0;

  void validate(int members = 0) const;
  int m1_for(int i) const { return m1.size() == 1 ? m1[0] : m1.at(i); }
  int m1_lcm() const;
};

Channel average_channel(const CompoundChannel& pi);

/// 1 - N (1 - F), floored at zero.
double union_bound_transfer(double avg_fidelity, int n);

/// log2 of the net size bound (6/nu)^(2 d_AB^2).
double net_cardinality_bound(double nu, int d_ab);

struct NetBoundAtN {
  double log2_six_n2 = 0;   // 2 d^2 log2(6 n^2), nu = 1/n^2
  double log2_three_n = 0;  // 4 d^2 log2(3 n)
};
NetBoundAtN net_cardinality_bound_at(int n, int d_ab);

struct DistanceMatrix {
  RMatrix value;
  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> certified;
};
/// Pairwise diamond distances, entries solved in parallel.
DistanceMatrix diamond_distance_matrix(const CompoundChannel& pi, double tol = 1e-7);

struct ClassicalParams {
  long long m0 = 1;
  long long m1 = 1;
  double error = 0;
};
struct QuantumParams {
  long long m0 = 1;
  long long m1 = 1;
  double error = 0;
  /// Set when M0 was not a perfect square and was floored.
  bool flagged = false;
};

/// (M0, M1) -> (M0^2, M1 M0), same error.
ClassicalParams superdense_convert(long long m0, long long m1, double error);
/// (M0, M1) -> (floor sqrt M0, M1 M0), same error.
QuantumParams teleport_convert(const ClassicalParams& c);

long long lcm_of(const std::vector<int>& values);

}  // namespace compoundcap
