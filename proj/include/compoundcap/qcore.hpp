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

#include <random>
#include <string>
#include <vector>

#include "compoundcap/linalg.hpp"

namespace compoundcap {

/// Eigenvalues down to -kPsdTol * dim count as nonnegative.
inline constexpr double kPsdTol = 1e-9;
/// Tolerance for unit trace, unit norm and Kraus completeness checks.
inline constexpr double kNormTol = 1e-9;

class DimLayout {
 public:
  DimLayout() : dims_{1} {}
  explicit DimLayout(std::vector<int> dims, std::vector<std::string> labels = {});
  static DimLayout single(int d) { return DimLayout({d}); }

  const std::vector<int>& dims() const { return dims_; }
  const std::vector<std::string>& labels() const { return labels_; }
  int dim(int subsystem) const { return dims_.at(subsystem); }
  int num_systems() const { return static_cast<int>(dims_.size()); }
  int total() const { return product(dims_); }

  DimLayout concat(const DimLayout& other) const;
  DimLayout select(std::span<const int> keep) const;
  DimLayout permuted(std::span<const int> perm) const;
  bool operator==(const DimLayout& o) const { return dims_ == o.dims_; }

 private:
  std::vector<int> dims_;
  std::vector<std::string> labels_;
};

/// Hermitian PSD matrix with trace in (0, 1 + tol]. Whether the trace is one
/// is recorded at construction and never inferred later.
class DensityOperator {
 public:
  DensityOperator(CMatrix m, DimLayout layout);
  explicit DensityOperator(CMatrix m);

  const CMatrix& matrix() const { return m_; }
  const DimLayout& layout() const { return layout_; }
  int dim() const { return static_cast<int>(m_.rows()); }
  double trace() const { return m_.trace().real(); }
  bool normalized() const { return normalized_; }

  /// Clips negative eigenvalues and rescales to unit trace.
  static DensityOperator clip_and_renormalize(const CMatrix& m, DimLayout layout);

 private:
  CMatrix m_;
  DimLayout layout_;
  bool normalized_ = false;
};

class PureState {
 public:
  PureState(CVector v, DimLayout layout);
  explicit PureState(CVector v);

  const CVector& vector() const { return v_; }
  const DimLayout& layout() const { return layout_; }
  int dim() const { return static_cast<int>(v_.size()); }
  DensityOperator density() const;

 private:
  CVector v_;
  DimLayout layout_;
};

/// Completely positive map in Kraus form, d_in -> d_out.
class Channel {
 public:
  enum class Kind { TracePreserving, TraceNonIncreasing, CompletelyPositive };

  explicit Channel(std::vector<CMatrix> kraus, Kind kind = Kind::TracePreserving);

  const std::vector<CMatrix>& kraus() const { return kraus_; }
  int d_in() const { return d_in_; }
  int d_out() const { return d_out_; }
  int kraus_rank() const { return static_cast<int>(kraus_.size()); }
  Kind kind() const { return kind_; }
  bool trace_preserving() const { return kind_ == Kind::TracePreserving; }

  CMatrix apply(const CMatrix& rho) const;
  /// Heisenberg-picture adjoint.
  CMatrix apply_adjoint(const CMatrix& y) const;
  /// Sum of K^dag K.
  CMatrix kraus_gram() const;

 private:
  std::vector<CMatrix> kraus_;
  int d_in_ = 0, d_out_ = 0;
  Kind kind_;
};

class PartialIsometry {
 public:
  explicit PartialIsometry(CMatrix m, double tol = 1e-8);
  const CMatrix& matrix() const { return m_; }
  int d_in() const { return static_cast<int>(m_.cols()); }
  int d_out() const { return static_cast<int>(m_.rows()); }

 private:
  CMatrix m_;
};

DensityOperator tensor(const DensityOperator& a, const DensityOperator& b);
PureState tensor(const PureState& a, const PureState& b);

DensityOperator partial_trace(const DensityOperator& rho, std::span<const int> keep);
DensityOperator partial_trace(const DensityOperator& rho, std::initializer_list<int> keep);

PureState max_entangled(int d);
DensityOperator max_mixed(int d);
PureState basis_state(int d, int k);

/// Applies N to subsystem `on` of a matrix laid out as `dims`.
CMatrix apply_channel(const Channel& n, const CMatrix& rho, std::span<const int> dims, int on);
DensityOperator apply_channel(const Channel& n, const DensityOperator& rho, int on = 0);

/// Unnormalized Choi matrix sum_ij |i><j| (x) N(|i><j|) on [A', B].
CMatrix choi_matrix(const Channel& n);
/// Normalized Choi state (id (x) N)(Phi+).
DensityOperator choi(const Channel& n);
/// Kraus form from a normalized Choi state on [A'(d_in), B].
Channel channel_from_choi(const CMatrix& j, int d_in, Channel::Kind kind = Channel::Kind::TracePreserving);
/// W = sum_k K_k (x) |k>_E, output ordered [B, E].
CMatrix dilation_matrix(const Channel& n);
PartialIsometry stinespring(const Channel& n);
Channel complementary(const Channel& n);
/// Kraus list with minimal rank via the Choi spectrum.
Channel canonical_kraus(const Channel& n);
Channel compose(const Channel& second, const Channel& first);

double fidelity(const CMatrix& rho, const CMatrix& sigma);
double generalized_fidelity(const CMatrix& rho, const CMatrix& sigma);
double purified_distance(const CMatrix& rho, const CMatrix& sigma);
inline double fidelity(const DensityOperator& a, const DensityOperator& b) {
  return fidelity(a.matrix(), b.matrix());
}
inline double purified_distance(const DensityOperator& a, const DensityOperator& b) {
  return purified_distance(a.matrix(), b.matrix());
}

/// Partial isometry V_{B->C} maximizing F((1(x)V) rho (1(x)V)^dag, sigma) for
/// vectors rho on [A, B] and sigma on [A, C]. Vectors may be sub-normalized.
PartialIsometry uhlmann_isometry(const CVector& rho_ab, int d_a, const CVector& sigma_ac);
PartialIsometry uhlmann_isometry(const PureState& rho_ab, const PureState& sigma_ac);

/// Haar-distributed unitary from Ginibre + QR with phase fix.
CMatrix haar_unitary(int d, std::mt19937_64& rng);
CMatrix ginibre(int rows, int cols, std::mt19937_64& rng);
DensityOperator random_density(int d, std::mt19937_64& rng, int rank = -1);
PureState random_pure(int d, std::mt19937_64& rng);
Channel random_channel(int d_in, int d_out, int kraus_rank, std::mt19937_64& rng);

struct DiamondNormResult {
  double value = 0;
  bool certified = false;
  double gap = 0;
  std::string status;
};

/// Diamond norm of a Hermiticity-preserving map given by its unnormalized
/// Choi-like matrix sum_ij |i><j| (x) D(|i><j|) on [A'(d_in), B(d_out)].
DiamondNormResult diamond_norm(const CMatrix& j, int d_in, int d_out, double tol = 1e-7);
DiamondNormResult diamond_distance(const Channel& a, const Channel& b, double tol = 1e-7);

bool is_psd(const CMatrix& m, double tol_per_dim = kPsdTol);

// Named channels used across tests and the CLI.
Channel identity_channel(int d);
Channel depolarizing(int d, double p);  // (1-p) rho + p tau
Channel dephasing(double p);            // (1-p) rho + p Z rho Z
Channel unitary_channel(const CMatrix& u);
Channel amplitude_damping(double gamma);

}  // namespace compoundcap
