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


// Entanglement-assisted capacities of single and compound channels, plus the
// converse and continuity evaluators. Values are in bits per channel use.

#pragma once

#include <string>
#include <vector>

#include "compoundcap/compound.hpp"

namespace compoundcap {

struct CapacityResult {
  double bits_per_use = 0;
  /// Input state rho_A attaining the value.
  CMatrix optimizer;
  /// Members attaining the inner minimum.
  std::vector<int> active_indices;
  /// Certified: the true value lies in [bits_per_use, bits_per_use + gap].
  double gap = 0;
  int iterations = 0;
  std::string status = "optimal";
  std::string note;
};

/// I(A':B) for N applied to a purification of rho_A.
double channel_mutual_info(const CMatrix& rho_a, const Channel& n);
/// Same value through H(rho) + H(N(rho)) - H(N^c(rho)).
double channel_mutual_info_exchange(const CMatrix& rho_a, const Channel& n);
/// Hermitian gradient of rho -> I(rho, N); eigenvalues of rho are floored at 1e-16.
CMatrix channel_mutual_info_gradient(const CMatrix& rho_a, const Channel& n);

struct FrankWolfeOptions {
  double tol = 1e-6;
  int max_iter = 3000;
};

CapacityResult qe_single(const Channel& n, double tol = 1e-6);
/// max_rho min_i I(rho, N^i) / 2.
CapacityResult qe_compound(const CompoundChannel& pi, double tol = 1e-6);
/// Equal to qe_compound by definition.
CapacityResult qe_informed_receiver(const CompoundChannel& pi, double tol = 1e-6);
/// min_i qe_single(N^i).
CapacityResult qe_informed_sender(const CompoundChannel& pi, double tol = 1e-6);
/// Equal to the informed-sender value; holds for finite index sets.
CapacityResult qe_feedback(const CompoundChannel& pi, double tol = 1e-6);

enum class Variant { Uninformed, InformedReceiver, InformedSender, Feedback };
Variant variant_from_string(const std::string& s);
std::string variant_name(Variant v);
CapacityResult qe(Variant v, const CompoundChannel& pi, double tol = 1e-6);
/// Twice the corresponding quantum value.
double classical_capacity(Variant v, const CompoundChannel& pi, double tol = 1e-6);

/// (1/(1-delta)) (max_rho I(rho, N) + h(delta)/n), an upper bound on (1/n) log M0.
double converse_bound(const Channel& n, int uses, double delta, double tol = 1e-6);
double converse_bound_from(double max_mutual_info, int uses, double delta);

/// Q_E(N) - eps log d_A + (1 + eps/2) h(eps/(2 + eps)).
double continuity_rate(const Channel& n, double eps, double tol = 1e-6);
double continuity_rate_from(double qe_bits, int d_a, double eps);

}  // namespace compoundcap
