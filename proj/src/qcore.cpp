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

#include "compoundcap/qcore.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "compoundcap/sdp.hpp"

namespace compoundcap {

// ---- layouts and states ----------------------------------------------------

DimLayout::DimLayout(std::vector<int> dims, std::vector<std::string> labels)
    : dims_(std::move(dims)), labels_(std::move(labels)) {
  if (dims_.empty()) throw std::invalid_argument("layout needs at least one subsystem");
  for (int d : dims_)
    if (d < 1) throw std::invalid_argument("subsystem dimension must be >= 1");
  if (!labels_.empty() && labels_.size() != dims_.size())
    throw std::invalid_argument("layout labels do not match dims");
}

DimLayout DimLayout::concat(const DimLayout& other) const {
  std::vector<int> d = dims_;
  d.insert(d.end(), other.dims_.begin(), other.dims_.end());
  std::vector<std::string> l;
  if (!labels_.empty() && !other.labels_.empty()) {
    l = labels_;
    l.insert(l.end(), other.labels_.begin(), other.labels_.end());
  }
  return DimLayout(std::move(d), std::move(l));
}

DimLayout DimLayout::select(std::span<const int> keep) const {
  std::vector<int> d;
  std::vector<std::string> l;
  for (int k : keep) {
    d.push_back(dims_.at(k));
    if (!labels_.empty()) l.push_back(labels_.at(k));
  }
  if (d.empty()) d.push_back(1);
  return DimLayout(std::move(d), std::move(l));
}

DimLayout DimLayout::permuted(std::span<const int> perm) const {
  std::vector<int> d;
  std::vector<std::string> l;
  for (int k : perm) {
    d.push_back(dims_.at(k));
    if (!labels_.empty()) l.push_back(labels_.at(k));
  }
  return DimLayout(std::move(d), std::move(l));
}

bool is_psd(const CMatrix& m, double tol_per_dim) {
  if (m.rows() == 0) return true;
  return hermitian_eigenvalues(m).minCoeff() >= -tol_per_dim * static_cast<double>(m.rows());
}

namespace {

void check_hermitian_psd(const CMatrix& m, const char* what) {
  if (m.rows() != m.cols()) throw std::invalid_argument(std::string(what) + ": matrix not square");
  const double scale = 1.0 + m.cwiseAbs().maxCoeff();
  if ((m - m.adjoint()).cwiseAbs().maxCoeff() > kNormTol * scale)
    throw std::invalid_argument(std::string(what) + ": matrix not Hermitian");
  if (!is_psd(m)) throw std::invalid_argument(std::string(what) + ": negative eigenvalue beyond tolerance");
}

}  // namespace

DensityOperator::DensityOperator(CMatrix m, DimLayout layout) : m_(std::move(m)), layout_(std::move(layout)) {
  if (layout_.total() != m_.rows()) throw std::invalid_argument("density operator: layout does not match matrix");
  check_hermitian_psd(m_, "density operator");
  m_ = hermitian_part(m_);
  const double t = trace();
  if (!(t > 0) || t > 1 + kNormTol * std::max(1, dim()))
    throw std::invalid_argument("density operator: trace outside (0, 1]");
  normalized_ = std::abs(t - 1) <= kNormTol * std::max(1, dim());
}

DensityOperator::DensityOperator(CMatrix m) : DensityOperator(m, DimLayout::single(static_cast<int>(m.rows()))) {}

DensityOperator DensityOperator::clip_and_renormalize(const CMatrix& m, DimLayout layout) {
  CMatrix c = spectral_apply(m, [](double x) { return std::max(x, 0.0); });
  const double t = c.trace().real();
  if (!(t > 0)) throw std::invalid_argument("clip_and_renormalize: zero trace after clipping");
  return DensityOperator(c / t, std::move(layout));
}

PureState::PureState(CVector v, DimLayout layout) : v_(std::move(v)), layout_(std::move(layout)) {
  if (layout_.total() != v_.size()) throw std::invalid_argument("pure state: layout does not match vector");
  if (std::abs(v_.norm() - 1.0) > kNormTol * std::max(1, dim()))
    throw std::invalid_argument("pure state: vector not unit norm");
}

PureState::PureState(CVector v) : PureState(v, DimLayout::single(static_cast<int>(v.size()))) {}

DensityOperator PureState::density() const { return DensityOperator(v_ * v_.adjoint(), layout_); }

DensityOperator tensor(const DensityOperator& a, const DensityOperator& b) {
  return DensityOperator(kron(a.matrix(), b.matrix()), a.layout().concat(b.layout()));
}

PureState tensor(const PureState& a, const PureState& b) {
  return PureState(kron(a.vector(), b.vector()), a.layout().concat(b.layout()));
}

DensityOperator partial_trace(const DensityOperator& rho, std::span<const int> keep) {
  CMatrix m = partial_trace(rho.matrix(), std::span<const int>(rho.layout().dims()), keep);
  return DensityOperator(std::move(m), rho.layout().select(keep));
}

DensityOperator partial_trace(const DensityOperator& rho, std::initializer_list<int> keep) {
  return partial_trace(rho, std::span<const int>(keep.begin(), keep.size()));
}

PureState max_entangled(int d) {
  if (d < 1) throw std::invalid_argument("max_entangled: d must be >= 1");
  CVector v = CVector::Zero(static_cast<Eigen::Index>(d) * d);
  for (int i = 0; i < d; ++i) v(i * d + i) = 1.0 / std::sqrt(double(d));
  return PureState(v, DimLayout({d, d}));
}

DensityOperator max_mixed(int d) {
  if (d < 1) throw std::invalid_argument("max_mixed: d must be >= 1");
  return DensityOperator(CMatrix::Identity(d, d) / double(d));
}

PureState basis_state(int d, int k) {
  if (k < 0 || k >= d) throw std::out_of_range("basis_state index");
  CVector v = CVector::Zero(d);
  v(k) = 1.0;
  return PureState(v);
}

// ---- channels --------------------------------------------------------------

Channel::Channel(std::vector<CMatrix> kraus, Kind kind) : kraus_(std::move(kraus)), kind_(kind) {
  if (kraus_.empty()) throw std::invalid_argument("channel needs at least one Kraus operator");
  d_out_ = static_cast<int>(kraus_[0].rows());
  d_in_ = static_cast<int>(kraus_[0].cols());
  if (d_in_ < 1 || d_out_ < 1) throw std::invalid_argument("channel dimensions must be >= 1");
  for (const auto& k : kraus_)
    if (k.rows() != d_out_ || k.cols() != d_in_) throw std::invalid_argument("Kraus operators differ in shape");
  const CMatrix g = kraus_gram();
  const double tol = kNormTol * std::max(1, d_in_) * std::max<size_t>(1, kraus_.size());
  if (kind_ == Kind::TracePreserving) {
    if ((g - CMatrix::Identity(d_in_, d_in_)).cwiseAbs().maxCoeff() > std::max(tol, 1e-9))
      throw std::invalid_argument("kraus completeness violated");
  } else if (kind_ == Kind::TraceNonIncreasing) {
    if (hermitian_eigenvalues(g).maxCoeff() > 1 + std::max(tol, 1e-9))
      throw std::invalid_argument("kraus completeness violated: map increases trace");
  }
}

CMatrix Channel::apply(const CMatrix& rho) const {
  if (rho.rows() != d_in_ || rho.cols() != d_in_) throw std::invalid_argument("channel input dimension mismatch");
  CMatrix out = CMatrix::Zero(d_out_, d_out_);
  for (const auto& k : kraus_) out.noalias() += k * rho * k.adjoint();
  return out;
}

CMatrix Channel::apply_adjoint(const CMatrix& y) const {
  if (y.rows() != d_out_ || y.cols() != d_out_) throw std::invalid_argument("channel output dimension mismatch");
  CMatrix out = CMatrix::Zero(d_in_, d_in_);
  for (const auto& k : kraus_) out.noalias() += k.adjoint() * y * k;
  return out;
}

CMatrix Channel::kraus_gram() const {
  CMatrix g = CMatrix::Zero(d_in_, d_in_);
  for (const auto& k : kraus_) g.noalias() += k.adjoint() * k;
  return g;
}

PartialIsometry::PartialIsometry(CMatrix m, double tol) : m_(std::move(m)) {
  const CMatrix p = m_.adjoint() * m_;
  if ((p * p - p).cwiseAbs().maxCoeff() > tol * (1 + p.cwiseAbs().maxCoeff()))
    throw std::invalid_argument("partial isometry: V^dag V is not a projection");
}

CMatrix apply_channel(const Channel& n, const CMatrix& rho, std::span<const int> dims, int on) {
  if (on < 0 || on >= static_cast<int>(dims.size())) throw std::out_of_range("apply_channel: subsystem index");
  if (dims[on] != n.d_in()) throw std::invalid_argument("apply_channel: subsystem dimension mismatch");
  if (rho.rows() != product(dims)) throw std::invalid_argument("apply_channel: layout mismatch");
  int left = 1, right = 1;
  for (int q = 0; q < on; ++q) left *= dims[q];
  for (int q = on + 1; q < static_cast<int>(dims.size()); ++q) right *= dims[q];
  if (left == 1 && right == 1) return n.apply(rho);
  const int dout = n.d_out();
  CMatrix out = CMatrix::Zero(static_cast<Eigen::Index>(left) * dout * right,
                              static_cast<Eigen::Index>(left) * dout * right);
  for (const auto& k : n.kraus()) {
    const CMatrix big = kron(kron(CMatrix::Identity(left, left), k), CMatrix::Identity(right, right));
    out.noalias() += big * rho * big.adjoint();
  }
  return out;
}

DensityOperator apply_channel(const Channel& n, const DensityOperator& rho, int on) {
  CMatrix m = apply_channel(n, rho.matrix(), std::span<const int>(rho.layout().dims()), on);
  std::vector<int> dims = rho.layout().dims();
  dims[on] = n.d_out();
  return DensityOperator(std::move(m), DimLayout(dims, rho.layout().labels()));
}

CMatrix choi_matrix(const Channel& n) {
  const int di = n.d_in(), dout = n.d_out();
  CMatrix j = CMatrix::Zero(static_cast<Eigen::Index>(di) * dout, static_cast<Eigen::Index>(di) * dout);
  CVector v(static_cast<Eigen::Index>(di) * dout);
  for (const auto& k : n.kraus()) {
    for (int i = 0; i < di; ++i)
      for (int b = 0; b < dout; ++b) v(i * dout + b) = k(b, i);
    j.noalias() += v * v.adjoint();
  }
  return j;
}

DensityOperator choi(const Channel& n) {
  return DensityOperator(choi_matrix(n) / double(n.d_in()), DimLayout({n.d_in(), n.d_out()}));
}

Channel channel_from_choi(const CMatrix& j, int d_in, Channel::Kind kind) {
  if (d_in < 1 || j.rows() % d_in != 0 || j.rows() != j.cols())
    throw std::invalid_argument("channel_from_choi: dimensions do not factor");
  check_hermitian_psd(j, "channel_from_choi: non-PSD Choi");
  const int dout = static_cast<int>(j.rows()) / d_in;
  Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitian_part(j) * double(d_in));
  const double top = std::max(es.eigenvalues().maxCoeff(), 0.0);
  std::vector<CMatrix> kraus;
  for (Eigen::Index e = es.eigenvalues().size() - 1; e >= 0; --e) {
    const double lam = es.eigenvalues()(e);
    if (lam <= 1e-13 * std::max(1.0, top)) continue;
    CMatrix k(dout, d_in);
    for (int i = 0; i < d_in; ++i)
      for (int b = 0; b < dout; ++b) k(b, i) = std::sqrt(lam) * es.eigenvectors()(i * dout + b, e);
    kraus.push_back(std::move(k));
  }
  if (kraus.empty()) kraus.push_back(CMatrix::Zero(dout, d_in));
  return Channel(std::move(kraus), kind);
}

CMatrix dilation_matrix(const Channel& n) {
  const int r = n.kraus_rank(), dout = n.d_out();
  CMatrix w = CMatrix::Zero(static_cast<Eigen::Index>(dout) * r, n.d_in());
  for (int k = 0; k < r; ++k)
    for (int b = 0; b < dout; ++b) w.row(b * r + k) = n.kraus()[k].row(b);
  return w;
}

PartialIsometry stinespring(const Channel& n) {
  if (!n.trace_preserving()) throw std::invalid_argument("stinespring: channel is not trace preserving");
  return PartialIsometry(dilation_matrix(n));
}

Channel complementary(const Channel& n) {
  const int r = n.kraus_rank();
  std::vector<CMatrix> f;
  for (int b = 0; b < n.d_out(); ++b) {
    CMatrix m(r, n.d_in());
    for (int k = 0; k < r; ++k) m.row(k) = n.kraus()[k].row(b);
    f.push_back(std::move(m));
  }
  return Channel(std::move(f), n.kind());
}

Channel canonical_kraus(const Channel& n) {
  return channel_from_choi(choi_matrix(n) / double(n.d_in()), n.d_in(), n.kind());
}

Channel compose(const Channel& second, const Channel& first) {
  if (second.d_in() != first.d_out()) throw std::invalid_argument("compose: dimension mismatch");
  std::vector<CMatrix> k;
  for (const auto& a : second.kraus())
    for (const auto& b : first.kraus()) k.push_back(a * b);
  Channel::Kind kind = Channel::Kind::CompletelyPositive;
  if (first.trace_preserving() && second.trace_preserving()) kind = Channel::Kind::TracePreserving;
  else if (first.kind() != Channel::Kind::CompletelyPositive && second.kind() != Channel::Kind::CompletelyPositive)
    kind = Channel::Kind::TraceNonIncreasing;
  return Channel(std::move(k), kind);
}

// ---- distances ---------------------------------------------------------------

double fidelity(const CMatrix& rho, const CMatrix& sigma) {
  if (rho.rows() != sigma.rows()) throw std::invalid_argument("fidelity: dimension mismatch");
  check_hermitian_psd(rho, "fidelity");
  check_hermitian_psd(sigma, "fidelity");
  const CMatrix a = sqrtm_psd(rho), b = sqrtm_psd(sigma);
  const double s = trace_norm(CMatrix(a * b));
  return s * s;
}

double generalized_fidelity(const CMatrix& rho, const CMatrix& sigma) {
  const double f = fidelity(rho, sigma);
  const double ta = std::max(0.0, 1 - rho.trace().real());
  const double tb = std::max(0.0, 1 - sigma.trace().real());
  const double s = std::sqrt(f) + std::sqrt(ta * tb);
  return s * s;
}

double purified_distance(const CMatrix& rho, const CMatrix& sigma) {
  return std::sqrt(std::max(0.0, 1 - generalized_fidelity(rho, sigma)));
}

PartialIsometry uhlmann_isometry(const CVector& rho_ab, int d_a, const CVector& sigma_ac) {
  if (d_a < 1 || rho_ab.size() % d_a != 0 || sigma_ac.size() % d_a != 0)
    throw std::invalid_argument("uhlmann_isometry: A dimension does not divide the vectors");
  const int db = static_cast<int>(rho_ab.size()) / d_a, dc = static_cast<int>(sigma_ac.size()) / d_a;
  const CMatrix r = unvec<double>(rho_ab, d_a, db), s = unvec<double>(sigma_ac, d_a, dc);
  const CMatrix x = s.adjoint() * r;  // C x B
  Eigen::JacobiSVD<CMatrix> svd(x, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double top = sv.size() ? sv(0) : 0.0;
  CMatrix v = CMatrix::Zero(dc, db);
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv(i) <= 1e-13 * std::max(top, 1e-300) || sv(i) == 0) break;
    v += svd.matrixU().col(i).conjugate() * svd.matrixV().col(i).transpose();
  }
  return PartialIsometry(v);
}

PartialIsometry uhlmann_isometry(const PureState& rho_ab, const PureState& sigma_ac) {
  if (rho_ab.layout().num_systems() < 2 || sigma_ac.layout().num_systems() < 2)
    throw std::invalid_argument("uhlmann_isometry: bipartite layouts required");
  const int da = rho_ab.layout().dim(0);
  if (sigma_ac.layout().dim(0) != da) throw std::invalid_argument("uhlmann_isometry: mismatched A dimensions");
  return uhlmann_isometry(rho_ab.vector(), da, sigma_ac.vector());
}

// ---- sampling ----------------------------------------------------------------

CMatrix ginibre(int rows, int cols, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, std::sqrt(0.5));
  CMatrix m(rows, cols);
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < rows; ++i) {
      const double re = g(rng);
      const double im = g(rng);
      m(i, j) = Complex(re, im);
    }
  return m;
}

CMatrix haar_unitary(int d, std::mt19937_64& rng) {
  if (d < 1) throw std::invalid_argument("haar_unitary: d must be >= 1");
  const CMatrix z = ginibre(d, d, rng);
  Eigen::HouseholderQR<CMatrix> qr(z);
  CMatrix q = qr.householderQ();
  const CMatrix& r = qr.matrixQR();
  for (int i = 0; i < d; ++i) {
    const Complex rii = r(i, i);
    const double a = std::abs(rii);
    q.col(i) *= a > 0 ? rii / a : Complex(1, 0);
  }
  return q;
}

DensityOperator random_density(int d, std::mt19937_64& rng, int rank) {
  const CMatrix g = ginibre(d, rank > 0 ? rank : d, rng);
  CMatrix rho = g * g.adjoint();
  rho /= rho.trace().real();
  return DensityOperator(hermitian_part(rho));
}

PureState random_pure(int d, std::mt19937_64& rng) {
  CVector v = ginibre(d, 1, rng).col(0);
  return PureState(v / v.norm());
}

Channel random_channel(int d_in, int d_out, int kraus_rank, std::mt19937_64& rng) {
  const CMatrix g = ginibre(d_out * kraus_rank, d_in, rng);
  Eigen::HouseholderQR<CMatrix> qr(g);
  CMatrix q = qr.householderQ() * CMatrix::Identity(d_out * kraus_rank, d_in);
  std::vector<CMatrix> k;
  for (int i = 0; i < kraus_rank; ++i) k.push_back(q.middleRows(i * d_out, d_out));
  return Channel(std::move(k));
}

// ---- diamond norm --------------------------------------------------------------

DiamondNormResult diamond_norm(const CMatrix& j, int d_in, int d_out, double tol) {
  const int d = d_in * d_out;
  if (j.rows() != d || j.cols() != d) throw std::invalid_argument("diamond_norm: Choi matrix has wrong size");
  if ((j - j.adjoint()).cwiseAbs().maxCoeff() > 1e-9 * (1 + j.cwiseAbs().maxCoeff()))
    throw std::invalid_argument("diamond_norm: map is not Hermiticity preserving");
  DiamondNormResult res;
  if (j.cwiseAbs().maxCoeff() == 0) {
    res.certified = true;
    res.status = "optimal";
    return res;
  }
  // max <J, W> with -rho (x) 1 <= W <= rho (x) 1, tr rho = 1, using W = (Q - P)/2
  sdp::Problem p;
  const int bp = p.add_block(d, "P"), bq = p.add_block(d, "Q"), br = p.add_block(d_in, "rho");
  const CMatrix jh = hermitian_part(j);
  p.set_objective(bp, 0.5 * jh);
  p.set_objective(bq, -0.5 * jh);
  sdp::Constraint link;
  link.label = "P + Q = 2 rho (x) 1";
  link.rhs = CMatrix::Zero(d, d);
  link.terms.push_back({bp, {{1.0, CMatrix::Identity(d, d)}}});
  link.terms.push_back({bq, {{1.0, CMatrix::Identity(d, d)}}});
  sdp::Term rt{br, {}};
  for (int b = 0; b < d_out; ++b) {
    CMatrix e = CMatrix::Zero(d_out, 1);
    e(b, 0) = 1.0;
    rt.parts.push_back({-2.0, kron(CMatrix::Identity(d_in, d_in), e)});
  }
  link.terms.push_back(rt);
  p.add_constraint(std::move(link));
  std::vector<sdp::Congruence> tr;
  for (int i = 0; i < d_in; ++i) tr.push_back({1.0, sdp::selector(d_in, i, 1)});
  p.add_constraint(br, tr, CMatrix::Identity(1, 1), sdp::Sense::Equal, "tr rho = 1");
  const auto s = sdp::solve(p, tol);
  res.value = std::max(0.0, -0.5 * (s.primal_objective + s.dual_objective));
  res.gap = s.gap;
  res.certified = s.status == sdp::Status::Optimal;
  res.status = sdp::status_name(s.status);
  return res;
}

DiamondNormResult diamond_distance(const Channel& a, const Channel& b, double tol) {
  if (a.d_in() != b.d_in() || a.d_out() != b.d_out()) throw std::invalid_argument("diamond_distance: dimension mismatch");
  return diamond_norm(choi_matrix(a) - choi_matrix(b), a.d_in(), a.d_out(), tol);
}

// ---- named channels --------------------------------------------------------------

Channel identity_channel(int d) { return Channel({CMatrix::Identity(d, d)}); }

Channel depolarizing(int d, double p) {
  if (p < 0 || p > 1 + 1e-12) throw std::invalid_argument("depolarizing: p outside [0,1]");
  const Complex w = std::polar(1.0, 2 * std::numbers::pi / d);
  CMatrix x = CMatrix::Zero(d, d), z = CMatrix::Zero(d, d);
  for (int j = 0; j < d; ++j) {
    x((j + 1) % d, j) = 1.0;
    z(j, j) = std::pow(w, j);
  }
  std::vector<CMatrix> k;
  CMatrix xa = CMatrix::Identity(d, d);
  for (int a = 0; a < d; ++a) {
    CMatrix zb = CMatrix::Identity(d, d);
    for (int b = 0; b < d; ++b) {
      const double c = (a == 0 && b == 0) ? std::sqrt(std::max(0.0, 1 - p + p / (d * d))) : std::sqrt(p) / d;
      if (c > 0) k.push_back(c * xa * zb);
      zb = zb * z;
    }
    xa = xa * x;
  }
  return Channel(std::move(k));
}

Channel dephasing(double p) {
  if (p < 0 || p > 1) throw std::invalid_argument("dephasing: p outside [0,1]");
  CMatrix z = CMatrix::Zero(2, 2);
  z(0, 0) = 1;
  z(1, 1) = -1;
  std::vector<CMatrix> k{std::sqrt(1 - p) * CMatrix::Identity(2, 2)};
  if (p > 0) k.push_back(std::sqrt(p) * z);
  return Channel(std::move(k));
}

Channel unitary_channel(const CMatrix& u) { return Channel({u}); }

Channel amplitude_damping(double gamma) {
  CMatrix k0 = CMatrix::Zero(2, 2), k1 = CMatrix::Zero(2, 2);
  k0(0, 0) = 1;
  k0(1, 1) = std::sqrt(1 - gamma);
  k1(0, 1) = std::sqrt(gamma);
  return Channel({k0, k1});
}

}  // namespace compoundcap
