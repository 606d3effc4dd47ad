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


#include "compoundcap/compound.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

#include "compoundcap/parallel.hpp"

namespace compoundcap {

CompoundChannel::CompoundChannel(std::vector<Channel> members, std::vector<std::string> labels)
    : members_(std::move(members)), labels_(std::move(labels)) {
  if (members_.empty()) throw std::invalid_argument("compound channel needs at least one member");
  for (const auto& m : members_)
    if (m.d_in() != members_[0].d_in() || m.d_out() != members_[0].d_out())
      throw std::invalid_argument("compound members must share input and output dimensions");
  if (labels_.empty())
    for (size_t i = 0; i < members_.size(); ++i) labels_.push_back(std::to_string(i));
  if (labels_.size() != members_.size()) throw std::invalid_argument("one label per compound member");
}

void CodeParams::validate(int members) const {
  if (m0 < 1) throw std::invalid_argument("M0 must be positive");
  if (m1.empty()) throw std::invalid_argument("M1 must be given");
  for (int v : m1)
    if (v < 1) throw std::invalid_argument("M1 entries must be positive");
  if (members > 0 && m1.size() != 1 && static_cast<int>(m1.size()) != members)
    throw std::invalid_argument("per-index M1 list must have one entry per member");
  if (n < 1) throw std::invalid_argument("n must be positive");
  if (!(epsilon >= 0 && epsilon < 1)) throw std::invalid_argument("epsilon must lie in [0, 1)");
}

long long lcm_of(const std::vector<int>& values) {
  long long out = 1;
  for (int v : values) out = std::lcm(out, static_cast<long long>(v));
  return out;
}

int CodeParams::m1_lcm() const { return static_cast<int>(lcm_of(m1)); }

Channel average_channel(const CompoundChannel& pi) {
  const double w = 1.0 / std::sqrt(double(pi.size()));
  std::vector<CMatrix> kraus;
  for (const auto& m : pi.members())
    for (const auto& k : m.kraus()) kraus.push_back(w * k);
  bool tp = true;
  for (const auto& m : pi.members()) tp = tp && m.trace_preserving();
  return Channel(std::move(kraus), tp ? Channel::Kind::TracePreserving : Channel::Kind::TraceNonIncreasing);
}

double union_bound_transfer(double avg_fidelity, int n) {
  if (!(avg_fidelity >= 0 && avg_fidelity <= 1)) throw std::invalid_argument("fidelity must lie in [0, 1]");
  if (n < 1) throw std::invalid_argument("N must be positive");
  return std::max(0.0, 1 - n * (1 - avg_fidelity));
}

double net_cardinality_bound(double nu, int d_ab) {
  if (!(nu > 0 && nu <= 6)) throw std::invalid_argument("nu must lie in (0, 6]");
  if (d_ab < 1) throw std::invalid_argument("d_AB must be positive");
  return 2.0 * d_ab * d_ab * std::log2(6 / nu);
}

NetBoundAtN net_cardinality_bound_at(int n, int d_ab) {
  if (n < 1) throw std::invalid_argument("n must be positive");
  if (d_ab < 1) throw std::invalid_argument("d_AB must be positive");
  const double d2 = double(d_ab) * d_ab;
  return {2 * d2 * std::log2(6.0 * n * n), 4 * d2 * std::log2(3.0 * n)};
}

DistanceMatrix diamond_distance_matrix(const CompoundChannel& pi, double tol) {
  const int n = pi.size();
  DistanceMatrix out;
  out.value = RMatrix::Zero(n, n);
  out.certified.setConstant(n, n, true);
  std::vector<std::pair<int, int>> pairs;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) pairs.push_back({i, j});
  std::vector<DiamondNormResult> res(pairs.size());
  parallel_for(static_cast<int>(pairs.size()), [&](int k) {
    res[k] = diamond_distance(pi.member(pairs[k].first), pi.member(pairs[k].second), tol);
  });
  for (size_t k = 0; k < pairs.size(); ++k) {
    const auto [i, j] = pairs[k];
    out.value(i, j) = out.value(j, i) = res[k].value;
    out.certified(i, j) = out.certified(j, i) = res[k].certified;
  }
  return out;
}

ClassicalParams superdense_convert(long long m0, long long m1, double error) {
  if (m0 < 1 || m1 < 1) throw std::invalid_argument("code sizes must be positive");
  return {m0 * m0, m1 * m0, error};
}

QuantumParams teleport_convert(const ClassicalParams& c) {
  if (c.m0 < 1 || c.m1 < 1) throw std::invalid_argument("code sizes must be positive");
  long long r = static_cast<long long>(std::sqrt(double(c.m0)));
  while (r * r > c.m0) --r;
  while ((r + 1) * (r + 1) <= c.m0) ++r;
  return {r, c.m1 * c.m0, c.error, r * r != c.m0};
}

}  // namespace compoundcap
