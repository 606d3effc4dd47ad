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

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <numeric>
#include <span>
#include <stdexcept>
#include <vector>

namespace compoundcap {

template <typename Real>
using CMatrixT = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Real>
using CVectorT = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, 1>;

using Complex = std::complex<double>;
using CMatrix = CMatrixT<double>;
using CVector = CVectorT<double>;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;

template <typename Derived>
using PlainOf = typename Derived::PlainObject;

/// Kronecker product a (x) b. Works for any scalar type.
template <typename DA, typename DB>
PlainOf<DA> kron(const Eigen::MatrixBase<DA>& a, const Eigen::MatrixBase<DB>& b) {
  PlainOf<DA> out(a.rows() * b.rows(), a.cols() * b.cols());
  const auto br = b.rows(), bc = b.cols();
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * br, j * bc, br, bc) = a(i, j) * b;
  return out;
}

inline int product(std::span<const int> dims) {
  return std::accumulate(dims.begin(), dims.end(), 1, std::multiplies<int>());
}

namespace detail {

// Splits a flat index over `dims` into (kept index, traced index) following
// row-major order with subsystem 0 most significant.
struct SplitIndex {
  std::vector<int> kept, traced;
  int kept_dim = 1, traced_dim = 1;
};

inline SplitIndex split_indices(std::span<const int> dims, std::span<const int> keep) {
  const int n = static_cast<int>(dims.size());
  std::vector<bool> is_kept(n, false);
  int prev = -1;
  for (int k : keep) {
    if (k < 0 || k >= n) throw std::out_of_range("subsystem index out of range");
    if (k <= prev) throw std::invalid_argument("subsystem indices must be strictly increasing");
    is_kept[k] = true;
    prev = k;
  }
  SplitIndex s;
  for (int q = 0; q < n; ++q) (is_kept[q] ? s.kept_dim : s.traced_dim) *= dims[q];
  const int total = product(dims);
  s.kept.resize(total);
  s.traced.resize(total);
  std::vector<int> digit(n, 0);
  for (int i = 0; i < total; ++i) {
    int kf = 0, tf = 0;
    for (int q = 0; q < n; ++q) {
      if (is_kept[q]) kf = kf * dims[q] + digit[q];
      else tf = tf * dims[q] + digit[q];
    }
    s.kept[i] = kf;
    s.traced[i] = tf;
    for (int q = n - 1; q >= 0; --q) {
      if (++digit[q] < dims[q]) break;
      digit[q] = 0;
    }
  }
  return s;
}

// new_index[i] for the reordering where output subsystem s is input perm[s].
inline std::vector<int> permutation_map(std::span<const int> dims, std::span<const int> perm) {
  const int n = static_cast<int>(dims.size());
  if (static_cast<int>(perm.size()) != n) throw std::invalid_argument("permutation size mismatch");
  std::vector<int> seen(n, 0);
  for (int p : perm) {
    if (p < 0 || p >= n || seen[p]++) throw std::invalid_argument("not a permutation");
  }
  std::vector<int> out_stride(n, 1), pos_of(n);
  for (int s = 0; s < n; ++s) pos_of[perm[s]] = s;
  for (int s = n - 2; s >= 0; --s) out_stride[s] = out_stride[s + 1] * dims[perm[s + 1]];
  const int total = product(dims);
  std::vector<int> map(total), digit(n, 0);
  for (int i = 0; i < total; ++i) {
    int j = 0;
    for (int q = 0; q < n; ++q) j += digit[q] * out_stride[pos_of[q]];
    map[i] = j;
    for (int q = n - 1; q >= 0; --q) {
      if (++digit[q] < dims[q]) break;
      digit[q] = 0;
    }
  }
  return map;
}

}  // namespace detail

/// Partial trace keeping the subsystems listed in `keep` (strictly increasing).
template <typename Derived>
PlainOf<Derived> partial_trace(const Eigen::MatrixBase<Derived>& m, std::span<const int> dims,
                               std::span<const int> keep) {
  if (m.rows() != m.cols() || m.rows() != product(dims))
    throw std::invalid_argument("partial_trace: layout does not match matrix");
  const auto& mm = m.derived().eval();
  const auto s = detail::split_indices(dims, keep);
  std::vector<std::vector<int>> groups(s.traced_dim);
  for (int i = 0; i < static_cast<int>(s.kept.size()); ++i) groups[s.traced[i]].push_back(i);
  PlainOf<Derived> out = PlainOf<Derived>::Zero(s.kept_dim, s.kept_dim);
  for (const auto& g : groups)
    for (int a : g)
      for (int b : g) out(s.kept[a], s.kept[b]) += mm(a, b);
  return out;
}

template <typename Derived>
PlainOf<Derived> partial_trace(const Eigen::MatrixBase<Derived>& m, std::initializer_list<int> dims,
                               std::initializer_list<int> keep) {
  return partial_trace(m, std::span<const int>(dims.begin(), dims.size()),
                       std::span<const int>(keep.begin(), keep.size()));
}

/// Reorders tensor factors: output subsystem s is input subsystem perm[s].
/// Square matrices are permuted on both sides, column vectors on rows only.
template <typename Derived>
PlainOf<Derived> permute_systems(const Eigen::MatrixBase<Derived>& m, std::span<const int> dims,
                                 std::span<const int> perm) {
  const auto map = detail::permutation_map(dims, perm);
  const int total = static_cast<int>(map.size());
  if (m.rows() != total) throw std::invalid_argument("permute_systems: layout mismatch");
  const auto& mm = m.derived().eval();
  PlainOf<Derived> out(m.rows(), m.cols());
  if (m.cols() == total) {
    for (int i = 0; i < total; ++i)
      for (int j = 0; j < total; ++j) out(map[i], map[j]) = mm(i, j);
  } else {
    for (int i = 0; i < total; ++i) out.row(map[i]) = mm.row(i);
  }
  return out;
}

template <typename Derived>
PlainOf<Derived> permute_systems(const Eigen::MatrixBase<Derived>& m, std::initializer_list<int> dims,
                                 std::initializer_list<int> perm) {
  return permute_systems(m, std::span<const int>(dims.begin(), dims.size()),
                         std::span<const int>(perm.begin(), perm.size()));
}

template <typename Derived>
PlainOf<Derived> hermitian_part(const Eigen::MatrixBase<Derived>& m) {
  return (m + m.adjoint()) / typename Derived::RealScalar(2);
}

/// f applied to the spectrum of a Hermitian matrix.
template <typename Derived, typename F>
PlainOf<Derived> spectral_apply(const Eigen::MatrixBase<Derived>& h, F&& f) {
  using Real = typename Derived::RealScalar;
  Eigen::SelfAdjointEigenSolver<PlainOf<Derived>> es(hermitian_part(h));
  Eigen::Matrix<Real, Eigen::Dynamic, 1> w = es.eigenvalues();
  for (Eigen::Index i = 0; i < w.size(); ++i) w(i) = f(w(i));
  return es.eigenvectors() * w.asDiagonal() * es.eigenvectors().adjoint();
}

/// Square root of a PSD matrix; negative eigenvalues are clamped.
template <typename Derived>
PlainOf<Derived> sqrtm_psd(const Eigen::MatrixBase<Derived>& h) {
  using Real = typename Derived::RealScalar;
  return spectral_apply(h, [](Real x) { return x > 0 ? std::sqrt(x) : Real(0); });
}

/// x^p on the support (eigenvalues above `cutoff`), zero elsewhere.
template <typename Derived>
PlainOf<Derived> support_power(const Eigen::MatrixBase<Derived>& h, typename Derived::RealScalar p,
                               typename Derived::RealScalar cutoff = 1e-13) {
  using Real = typename Derived::RealScalar;
  return spectral_apply(h, [&](Real x) { return x > cutoff ? std::pow(x, p) : Real(0); });
}

/// Base-2 logarithm on the support, zero on the kernel.
template <typename Derived>
PlainOf<Derived> log2_support(const Eigen::MatrixBase<Derived>& h,
                              typename Derived::RealScalar cutoff = 1e-15) {
  using Real = typename Derived::RealScalar;
  return spectral_apply(h, [&](Real x) { return x > cutoff ? std::log2(x) : Real(0); });
}

template <typename Derived>
Eigen::Matrix<typename Derived::RealScalar, Eigen::Dynamic, 1> hermitian_eigenvalues(
    const Eigen::MatrixBase<Derived>& h) {
  Eigen::SelfAdjointEigenSolver<PlainOf<Derived>> es(hermitian_part(h), Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

/// Schatten-1 norm. Hermitian inputs use the spectrum, others the SVD.
template <typename Derived>
typename Derived::RealScalar trace_norm(const Eigen::MatrixBase<Derived>& x) {
  using Real = typename Derived::RealScalar;
  if (x.rows() == x.cols() && (x - x.adjoint()).cwiseAbs().maxCoeff() <=
                                  Real(1e-12) * (Real(1) + x.cwiseAbs().maxCoeff()))
    return hermitian_eigenvalues(x).cwiseAbs().sum();
  Eigen::BDCSVD<PlainOf<Derived>> svd(x);
  return svd.singularValues().sum();
}

template <typename Derived>
typename Derived::RealScalar operator_norm(const Eigen::MatrixBase<Derived>& x) {
  Eigen::BDCSVD<PlainOf<Derived>> svd(x);
  return svd.singularValues().size() ? svd.singularValues()(0) : 0;
}

/// Embedding of a complex Hermitian matrix into a real symmetric one,
/// [[Re, -Im], [Im, Re]].
template <typename Real>
Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic> real_embed(const CMatrixT<Real>& h) {
  const auto n = h.rows();
  Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic> out(2 * n, 2 * n);
  out.topLeftCorner(n, n) = h.real();
  out.bottomRightCorner(n, n) = h.real();
  out.topRightCorner(n, n) = -h.imag();
  out.bottomLeftCorner(n, n) = h.imag();
  return out;
}

/// Inverse of real_embed after symmetrizing the block structure.
template <typename Real>
CMatrixT<Real> real_unembed(const Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic>& y) {
  const auto n = y.rows() / 2;
  CMatrixT<Real> out(n, n);
  out.real() = (y.topLeftCorner(n, n) + y.bottomRightCorner(n, n)) / Real(2);
  out.imag() = (y.bottomLeftCorner(n, n) - y.topRightCorner(n, n)) / Real(2);
  return hermitian_part(out);
}

/// Row-major reshape of a vector on (rows x cols) into a matrix.
template <typename Real>
CMatrixT<Real> unvec(const CVectorT<Real>& v, Eigen::Index rows, Eigen::Index cols) {
  if (v.size() != rows * cols) throw std::invalid_argument("unvec: size mismatch");
  CMatrixT<Real> m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = v(i * cols + j);
  return m;
}

template <typename Real>
CVectorT<Real> vec(const CMatrixT<Real>& m) {
  CVectorT<Real> v(m.size());
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) v(i * m.cols() + j) = m(i, j);
  return v;
}

/// Euclidean projection onto {x >= floor, sum x = 1}.
inline RVector project_simplex(const RVector& v, double floor) {
  const Eigen::Index n = v.size();
  RVector w = v.array() - floor;
  const double target = 1 - floor * n;
  std::vector<double> s(w.data(), w.data() + n);
  std::sort(s.begin(), s.end(), std::greater<double>());
  double cum = 0, theta = 0;
  for (Eigen::Index k = 0; k < n; ++k) {
    cum += s[k];
    const double t = (cum - target) / double(k + 1);
    if (k + 1 == n || s[k + 1] <= t) {
      theta = t;
      break;
    }
  }
  return (w.array() - theta).cwiseMax(0.0) + floor;
}

/// Frobenius projection onto density matrices with eigenvalues >= floor.
inline CMatrix project_to_density(const CMatrix& m, double floor = 0) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitian_part(m));
  const RVector w = project_simplex(es.eigenvalues(), floor);
  return es.eigenvectors() * w.cast<Complex>().asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace compoundcap
