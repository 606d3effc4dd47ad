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

// Entropic quantities in bits. Bipartite operators are laid out [A, B] with
// A the first factor.

#pragma once

#include <optional>
#include <string>

#include "compoundcap/qcore.hpp"

namespace compoundcap {

struct EntropyValue {
  double bits = 0;
  /// Certified range; equal to bits when the value is exact up to solver tol.
  double lower = 0, upper = 0;
  /// sigma_B for min-entropies, smoothed state for smooth ones.
  std::optional<CMatrix> certificate;
  std::string certificate_kind;
  std::string solver_status = "optimal";
  bool certified = true;
};

/// Thrown when an SDP behind an entropy does not reach certified optimality.
class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SmoothingBall {
  explicit SmoothingBall(double eps);
  double epsilon;
};

double binary_entropy(double p);
/// -sum l log2 l over the spectrum.
double von_neumann(const CMatrix& rho);
double von_neumann(const DensityOperator& rho, std::span<const int> subsystems);
/// H(A|B) for rho on [A, B].
double cond_entropy(const CMatrix& rho_ab, int d_a, int d_b);
double cond_entropy(const DensityOperator& rho_ab);
/// I(A:B) for rho on [A, B].
double mutual_info(const CMatrix& rho_ab, int d_a, int d_b);
double mutual_info(const DensityOperator& rho_ab);

/// Canonical purification sum sqrt(l_i) |v_i> (x) |i>; rank returned via out-param.
CVector purify(const CMatrix& rho, int* rank = nullptr, double cutoff = 1e-13);

EntropyValue h_min(const CMatrix& rho_ab, int d_a, int d_b, double tol = 1e-7);
EntropyValue h_min(const DensityOperator& rho_ab, double tol = 1e-7);
/// Via duality on the canonical purification.
EntropyValue h_max(const CMatrix& rho_ab, int d_a, int d_b, double tol = 1e-7);
EntropyValue h_max(const DensityOperator& rho_ab, double tol = 1e-7);
/// Independent route: log max_sigma F(rho, 1 (x) sigma).
EntropyValue h_max_fidelity_form(const CMatrix& rho_ab, int d_a, int d_b, double tol = 1e-7);

EntropyValue smooth_h_min(const CMatrix& rho_ab, int d_a, int d_b, double eps, double tol = 1e-7);
EntropyValue smooth_h_max(const CMatrix& rho_ab, int d_a, int d_b, double eps, double tol = 1e-7);
/// Upper limit of smooth_h_min over all states: log d_A - log(1 - eps^2).
double smooth_h_min_ceiling(int d_a, double eps);

/// -log tr[(sigma^{-1/4} rho sigma^{-1/4})^2] for a full-rank sigma on B.
double collision_entropy_at(const CMatrix& rho_ab, int d_a, int d_b, const CMatrix& sigma_b);
/// Optimized over sigma_B by projected gradient. bits is the value at the
/// returned certificate (a lower bound on H2); upper comes from the
/// Frank-Wolfe gap and H(A|B).
EntropyValue collision_entropy(const CMatrix& rho_ab, int d_a, int d_b,
                               const std::optional<CMatrix>& sigma_b = std::nullopt);

struct AepDelta {
  double value = 0;
  bool valid = false;  // n >= (8/5) log(2/eps^2)
};
/// 4 log(2 sqrt(d_A) + 1) sqrt(log(2/eps^2)).
AepDelta aep_delta(double eps, int d_a, int n);

double fannes_cond(double t, int d_a);
double fannes_mi(double t, int d_a, int d_b);

}  // namespace compoundcap
