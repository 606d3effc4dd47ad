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


#include "compoundcap/codes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "compoundcap/entropy.hpp"
#include "compoundcap/linalg.hpp"
#include "compoundcap/parallel.hpp"
#include "compoundcap/random.hpp"

namespace compoundcap {
namespace {

constexpr long long kMaxVector = 1LL << 16;

// vec(y) (row-major) read as a vector over dims, reordered by perm and
// reshaped with the first `split` output systems as rows.
CMatrix regroup(const CMatrix& y, const std::vector<int>& dims, const std::vector<int>& perm, int split) {
  const CVector v = permute_systems(vec<double>(y), std::span<const int>(dims), std::span<const int>(perm));
  int rows = 1;
  for (int s = 0; s < split; ++s) rows *= dims[perm[s]];
  return unvec<double>(v, rows, v.size() / rows);
}

CMatrix embedding(int rows, int cols) { return CMatrix::Identity(rows, cols); }

// I / sqrt(m) with rows (A0, A1) and columns (R, B1).
CMatrix phi_matrix(int m) { return CMatrix::Identity(m, m) / std::sqrt(double(m)); }

CMatrix max_entangled_density(int m) {
  const CVector v = vec<double>(phi_matrix(m));
  return v * v.adjoint();
}

void check_budget(long long size, const char* what) {
  if (size > kMaxVector) throw BudgetError(std::string(what) + ": dimension exceeds desk-scale budget");
}

std::vector<CMatrix> padded_kraus(const Channel& c, int count) {
  std::vector<CMatrix> k = c.kraus();
  while (static_cast<int>(k.size()) < count) k.push_back(CMatrix::Zero(c.d_out(), c.d_in()));
  return k;
}

int max_kraus(const std::vector<Channel>& t) {
  int e = 1;
  for (const auto& c : t) e = std::max(e, c.kraus_rank());
  return e;
}

// N^c(rho)_{kk'} = tr(K_k rho K_k'^+), padded to e.
CMatrix complement_output(const Channel& c, const CMatrix& rho, int e) {
  const auto k = padded_kraus(c, e);
  CMatrix out(e, e);
  for (int a = 0; a < e; ++a)
    for (int b = 0; b < e; ++b) out(a, b) = (k[a] * rho * k[b].adjoint()).trace();
  return out;
}

std::vector<CVector> phi_inputs(int d, int n) {
  return std::vector<CVector>(n, vec<double>(phi_matrix(d)));
}

// Average map V Psi for a joint dilation with row systems [B, env]: the
// realized [env, R] state and its purification vector [env, R | B, B1].
CMatrix purification_env_r(const CMatrix& v, int d_b, int m0, int m1) {
  const int d_env = static_cast<int>(v.rows()) / d_b;
  const CMatrix y = v * phi_matrix(m0 * m1);
  return regroup(y, {d_b, d_env, m0, m1}, {1, 2, 0, 3}, 2);
}

double trace_distance_to_phi(const CMatrix& out, int m0) {
  return trace_norm(CMatrix(hermitian_part(out) - max_entangled_density(m0)));
}

struct Subset {
  CompoundChannel pi;
  std::vector<CVector> rho;
  std::vector<int> m1i;
  std::vector<int> branch_of;
};

Subset reduce(const CompoundChannel& pi, const std::vector<CVector>& rho, const std::vector<int>& m1i) {
  int count = 0;
  Subset s{pi, {}, {}, distinct_branches(pi, rho, m1i, &count)};
  std::vector<Channel> members;
  for (int c = 0; c < count; ++c) {
    const int i = static_cast<int>(std::find(s.branch_of.begin(), s.branch_of.end(), c) - s.branch_of.begin());
    members.push_back(pi.member(i));
    s.rho.push_back(rho[i]);
    s.m1i.push_back(m1i[i]);
  }
  s.pi = CompoundChannel(std::move(members));
  return s;
}

double log2i(int x) { return std::log2(double(x)); }

}  // namespace

// ---- encoder ingredients ------------------------------------------------------

CMatrix build_oa(const CVector& psi, int d_a) {
  if (d_a < 1 || psi.size() != static_cast<Eigen::Index>(d_a) * d_a)
    throw std::invalid_argument("build_oa: state must live on [A, A'] with equal dimensions");
  return unvec<double>(psi, d_a, d_a);
}

CMatrix build_oa(const PureState& rho) {
  const auto& dims = rho.layout().dims();
  if (dims.size() != 2 || dims[0] != dims[1])
    throw std::invalid_argument("build_oa: bipartite layout [A, A'] with d_A = d_A' required");
  return build_oa(rho.vector(), dims[0]);
}

int IsEncoderSpec::m1() const { return static_cast<int>(lcm_of(m1i)); }

CMatrix IsEncoderSpec::j(int i) const { return embedding(d_a, m0 * m1i.at(i)); }

CMatrix IsEncoderSpec::k(int i) const { return embedding(m1(), m1() / m1i.at(i)); }

void IsEncoderSpec::validate() const {
  if (d_a < 1 || m0 < 1) throw std::invalid_argument("IsEncoderSpec: dimensions must be >= 1");
  if (m1i.empty()) throw std::invalid_argument("IsEncoderSpec: no branches");
  if (rho.size() != m1i.size() || u.size() != m1i.size())
    throw std::invalid_argument("IsEncoderSpec: per-branch lists differ in length");
  for (int i = 0; i < branches(); ++i) {
    if (m1i[i] < 1) throw std::invalid_argument("IsEncoderSpec: M1^i must be >= 1");
    if (static_cast<long long>(m0) * m1i[i] > d_a)
      throw std::invalid_argument("IsEncoderSpec: M0 M1^i exceeds d_A");
    if (rho[i].size() != static_cast<Eigen::Index>(d_a) * d_a)
      throw std::invalid_argument("IsEncoderSpec: rho^i must live on [A, A']");
    if (std::abs(rho[i].norm() - 1) > 1e-9) throw std::invalid_argument("IsEncoderSpec: rho^i not normalized");
    if (u[i].rows() != d_a || u[i].cols() != d_a) throw std::invalid_argument("IsEncoderSpec: U^i must act on A");
  }
}

IsEncoderSpec make_is_spec(int d_a, int m0, std::vector<int> m1i, std::vector<CVector> rho) {
  IsEncoderSpec s;
  s.d_a = d_a;
  s.m0 = m0;
  s.m1i = std::move(m1i);
  s.rho = std::move(rho);
  s.u.assign(s.m1i.size(), CMatrix::Identity(d_a, d_a));
  s.validate();
  return s;
}

void draw_unitaries(IsEncoderSpec& spec, std::uint64_t seed) {
  const SeedStream root(seed);
  for (int i = 0; i < spec.branches(); ++i) {
    auto rng = root.child(i).engine();
    spec.u[i] = haar_unitary(spec.d_a, rng);
  }
}

Channel build_is_encoder(const IsEncoderSpec& spec, int i) {
  spec.validate();
  const int m1 = spec.m1(), rest = m1 / spec.m1i.at(i);
  const CMatrix head = std::sqrt(double(spec.d_a)) * spec.oa(i) * spec.u[i] * spec.j(i);
  std::vector<CMatrix> kraus;
  for (int c = 0; c < rest; ++c) {
    const CMatrix bra = CMatrix::Identity(rest, rest).row(c);
    kraus.push_back(kron(head, bra));
  }
  return Channel(std::move(kraus), Channel::Kind::CompletelyPositive);
}

Channel twisted_channel(const Channel& n, const CVector& rho, int d_a) {
  if (n.d_in() != d_a) throw std::invalid_argument("twisted_channel: channel input must be A");
  const CMatrix o = std::sqrt(double(d_a)) * build_oa(rho, d_a);
  std::vector<CMatrix> kraus;
  for (const auto& k : n.kraus()) kraus.push_back(k * o);
  return Channel(std::move(kraus), Channel::Kind::CompletelyPositive);
}

CMatrix joint_dilation(const std::vector<Channel>& t, const IsEncoderSpec& spec) {
  spec.validate();
  const int n = spec.branches();
  if (static_cast<int>(t.size()) != n) throw std::invalid_argument("joint_dilation: one map per branch required");
  const int d_b = t.front().d_out(), dc = spec.m1(), de = max_kraus(t);
  for (const auto& c : t)
    if (c.d_in() != spec.d_a || c.d_out() != d_b) throw std::invalid_argument("joint_dilation: dimension mismatch");
  const long long rows = 1LL * d_b * dc * de * n;
  check_budget(rows * spec.m0 * dc, "joint_dilation");
  CMatrix v = CMatrix::Zero(rows, spec.m0 * dc);
  const double w = 1 / std::sqrt(double(n));
  for (int i = 0; i < n; ++i) {
    const CMatrix uj = spec.u[i] * spec.j(i);
    const CMatrix ki = spec.k(i);
    const auto kraus = t[i].kraus();
    for (int k = 0; k < static_cast<int>(kraus.size()); ++k) {
      const CMatrix blk = kron(CMatrix(kraus[k] * uj), ki);  // [B, A^c] x (A0 A1)
      for (int b = 0; b < d_b; ++b)
        for (int c = 0; c < dc; ++c) v.row(((1LL * b * dc + c) * de + k) * n + i) = w * blk.row(b * dc + c);
    }
  }
  return v;
}

Channel average_encoded_channel(const std::vector<Channel>& t, const IsEncoderSpec& spec) {
  const CMatrix v = joint_dilation(t, spec);
  const int d_b = t.front().d_out(), env = static_cast<int>(v.rows()) / d_b;
  std::vector<CMatrix> kraus;
  for (int e = 0; e < env; ++e) {
    CMatrix k(d_b, v.cols());
    for (int b = 0; b < d_b; ++b) k.row(b) = v.row(1LL * b * env + e);
    if (k.norm() > 0) kraus.push_back(std::move(k));
  }
  return Channel(std::move(kraus), Channel::Kind::CompletelyPositive);
}

Channel average_encoded_channel(const CompoundChannel& pi, const IsEncoderSpec& spec) {
  std::vector<Channel> t;
  for (int i = 0; i < pi.size(); ++i) t.push_back(twisted_channel(pi.member(i), spec.rho.at(i), spec.d_a));
  return average_encoded_channel(t, spec);
}

Channel complementary_average(const std::vector<Channel>& t, const IsEncoderSpec& spec) {
  const CMatrix v = joint_dilation(t, spec);
  const int d_b = t.front().d_out(), env = static_cast<int>(v.rows()) / d_b;
  std::vector<CMatrix> kraus;
  for (int b = 0; b < d_b; ++b) kraus.push_back(v.middleRows(1LL * b * env, env));
  return Channel(std::move(kraus), Channel::Kind::CompletelyPositive);
}

Channel complementary_average(const CompoundChannel& pi, const IsEncoderSpec& spec) {
  std::vector<Channel> t;
  for (int i = 0; i < pi.size(); ++i) t.push_back(twisted_channel(pi.member(i), spec.rho.at(i), spec.d_a));
  return complementary_average(t, spec);
}

// ---- decoupling ------------------------------------------------------------------

CMatrix decoupling_target(const std::vector<Channel>& t, const IsEncoderSpec& spec) {
  const int n = spec.branches(), dc = spec.m1(), de = max_kraus(t);
  const CMatrix tau_a = CMatrix::Identity(spec.d_a, spec.d_a) / double(spec.d_a);
  CMatrix omega = CMatrix::Zero(1LL * dc * de * n, 1LL * dc * de * n);
  for (int i = 0; i < n; ++i) {
    const CMatrix ki = spec.k(i);
    const CMatrix aux = ki * ki.adjoint() / double(ki.cols());
    const CMatrix env = complement_output(t[i], tau_a, de);
    CMatrix flag = CMatrix::Zero(n, n);
    flag(i, i) = 1.0 / n;
    omega += kron(kron(aux, env), flag);
  }
  return omega;
}

double decoupling_deviation(const std::vector<Channel>& t, const IsEncoderSpec& spec, const CMatrix& omega) {
  const CMatrix v = joint_dilation(t, spec);
  const int d_b = t.front().d_out(), m0 = spec.m0, m1 = spec.m1();
  const CMatrix p = purification_env_r(v, d_b, m0, m1);
  const CMatrix state = p * p.adjoint();
  const CMatrix target = kron(omega, CMatrix(CMatrix::Identity(m0, m0) / double(m0)));
  return trace_norm(CMatrix(hermitian_part(state) - target));
}

double decoupling_bound_L5(const std::vector<double>& h2, int m0, const std::vector<int>& m1i, int n) {
  if (h2.empty() || h2.size() != m1i.size()) throw std::invalid_argument("decoupling_bound_L5: one H2 per branch");
  double best = std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < h2.size(); ++i) best = std::min(best, h2[i] - log2i(m0) + log2i(m1i[i]));
  return std::exp2(-0.5 * (best - 2 * log2i(n) - 2));
}

DecouplingReport mc_decoupling_L5(const CompoundChannel& pi, const std::vector<CVector>& rho, int m0,
                                  const std::vector<int>& m1i, int samples, std::uint64_t seed) {
  if (samples < 1) throw std::invalid_argument("mc_decoupling_L5: sample budget must be >= 1");
  const int n = pi.size(), d_a = pi.d_in();
  if (d_a > 8 || n > 4) throw BudgetError("mc_decoupling_L5: beyond desk scale (d_A <= 8, N <= 4)");
  const IsEncoderSpec base = make_is_spec(d_a, m0, m1i, rho);
  std::vector<Channel> t;
  for (int i = 0; i < n; ++i) t.push_back(twisted_channel(pi.member(i), rho[i], d_a));
  const CMatrix omega = decoupling_target(t, base);

  DecouplingReport r;
  r.seed = seed;
  r.sample_count = samples;
  const int de = max_kraus(t);
  for (int i = 0; i < n; ++i) {
    // T^{i,c}(Phi+_{A A'}) on [A', E]
    const CMatrix phi = phi_matrix(d_a);
    const auto kraus = padded_kraus(t[i], de);
    CMatrix state = CMatrix::Zero(1LL * d_a * de, 1LL * d_a * de);
    for (int b = 0; b < t[i].d_out(); ++b) {
      CMatrix col(d_a * de, 1);
      for (int k = 0; k < de; ++k) {
        const CMatrix row = kraus[k].row(b) * phi;  // 1 x A'
        for (int a = 0; a < d_a; ++a) col(1LL * a * de + k, 0) = row(0, a);
      }
      state += col * col.adjoint();
    }
    r.h2.push_back(collision_entropy(state, d_a, de).bits);
  }
  r.bound_value = decoupling_bound_L5(r.h2, m0, m1i, n);

  r.deviations.assign(samples, 0.0);
  const SeedStream root(seed);
  parallel_for(samples, [&](int s) {
    IsEncoderSpec spec = base;
    draw_unitaries(spec, root.child(s).seed());
    r.deviations[s] = decoupling_deviation(t, spec, omega);
  });
  double sum = 0, sq = 0;
  for (double d : r.deviations) sum += d;
  r.empirical_mean_deviation = sum / samples;
  for (double d : r.deviations) sq += (d - r.empirical_mean_deviation) * (d - r.empirical_mean_deviation);
  r.std_error = samples > 1 ? std::sqrt(sq / (samples - 1) / samples) : 0.0;
  r.pass = r.empirical_mean_deviation <= r.bound_value + 3 * r.std_error;
  return r;
}

// ---- decoder and normalization ----------------------------------------------------

Channel build_universal_decoder(const CMatrix& v, int d_b, int m0, int m1, const CMatrix& omega) {
  if (d_b < 1 || v.rows() % d_b != 0 || v.cols() != 1LL * m0 * m1)
    throw std::invalid_argument("build_universal_decoder: dilation shape mismatch");
  const int d_env = static_cast<int>(v.rows()) / d_b;
  if (omega.rows() != d_env) throw std::invalid_argument("build_universal_decoder: omega must live on the environment");
  const CMatrix p = purification_env_r(v, d_b, m0, m1);  // [env, R] x [B, B1]
  if (p.norm() < 1e-12) throw std::invalid_argument("build_universal_decoder: zero-trace branch");
  check_budget(1LL * d_env * m0 * d_env * m0, "build_universal_decoder");
  int rank = 1;
  const CVector w = purify(hermitian_part(omega), &rank);  // [env, X]
  const CVector phi = vec<double>(phi_matrix(m0));          // [R, A0]
  const CVector target = permute_systems(CVector(kron(w, phi)), {d_env, rank, m0, m0}, {0, 2, 1, 3});
  const PartialIsometry iso = uhlmann_isometry(vec<double>(p), d_env * m0, target);
  const CMatrix& m = iso.matrix();  // (X, A0) x (B, B1)
  std::vector<CMatrix> kraus;
  for (int x = 0; x < rank; ++x) kraus.push_back(m.middleRows(1LL * x * m0, m0));
  return Channel(std::move(kraus), Channel::Kind::TraceNonIncreasing);
}

NormalizedEncoder normalize_encoder(const Channel& e, int m0, int m1) {
  const int d_a = e.d_out(), dim = m0 * m1;
  if (e.d_in() != dim) throw std::invalid_argument("normalize_encoder: encoder input must be A0 A1");
  const auto& kraus = e.kraus();
  const int l = e.kraus_rank();
  const CMatrix psi = phi_matrix(dim);
  CMatrix p(dim, 1LL * d_a * l);  // [(R, B1)] x [(A, L)]
  CMatrix out = CMatrix::Zero(1LL * d_a * dim, 1LL * d_a * dim);
  for (int k = 0; k < l; ++k) {
    const CMatrix y = kraus[k] * psi;  // A x (R, B1)
    for (int a = 0; a < d_a; ++a) p.col(1LL * a * l + k) = y.row(a).transpose();
    const CVector yv = vec<double>(y);
    out += yv * yv.adjoint();
  }
  NormalizedEncoder r{e};
  r.deviation = trace_norm(CMatrix(hermitian_part(CMatrix(p * p.adjoint())) -
                                   CMatrix::Identity(dim, dim) / double(dim)));
  r.guarantee = r.deviation + 2 * std::sqrt(2 * r.deviation);
  r.flagged = r.deviation > 1;
  if (r.deviation < 1e-12) return r;
  const PartialIsometry iso = uhlmann_isometry(vec<double>(psi), dim, vec<double>(p));
  const CMatrix& v = iso.matrix();  // (A, L) x (A0 A1)
  std::vector<CMatrix> fixed;
  for (int k = 0; k < l; ++k) {
    CMatrix g(d_a, dim);
    for (int a = 0; a < d_a; ++a) g.row(a) = v.row(1LL * a * l + k);
    fixed.push_back(std::move(g));
  }
  r.encoder = Channel(fixed, Channel::Kind::TraceNonIncreasing);
  CMatrix out2 = CMatrix::Zero(out.rows(), out.cols());
  for (const auto& g : fixed) {
    const CVector yv = vec<double>(CMatrix(g * psi));
    out2 += yv * yv.adjoint();
  }
  r.distance = trace_norm(CMatrix(hermitian_part(CMatrix(out2 - out))));
  return r;
}

CMatrix code_output(const Channel& decoder, const Channel& channel, const Channel& encoder, int m0, int m1) {
  const int d_b = channel.d_out();
  if (encoder.d_in() != m0 * m1 || encoder.d_out() != channel.d_in() || decoder.d_in() != d_b * m1 ||
      decoder.d_out() != m0)
    throw std::invalid_argument("code_output: dimension mismatch");
  const CMatrix psi = phi_matrix(m0 * m1);
  CMatrix out = CMatrix::Zero(1LL * m0 * m0, 1LL * m0 * m0);
  for (const auto& f : encoder.kraus()) {
    const CMatrix fpsi = f * psi;
    for (const auto& k : channel.kraus()) {
      const CMatrix q = regroup(k * fpsi, {d_b, m0, m1}, {0, 2, 1}, 2);  // (B, B1) x R
      for (const auto& d : decoder.kraus()) {
        const CVector z = vec<double>(CMatrix(d * q));
        out += z * z.adjoint();
      }
    }
  }
  return out;
}

double entanglement_fidelity(const Channel& decoder, const Channel& channel, const Channel& encoder, int m0,
                             int m1) {
  const CVector phi = vec<double>(phi_matrix(m0));
  const CMatrix out = code_output(decoder, channel, encoder, m0, m1);
  return std::clamp((phi.adjoint() * out * phi)(0, 0).real(), 0.0, 1.0);
}

// ---- analytic bounds -----------------------------------------------------------------

OneShotEntropies one_shot_entropies(const CompoundChannel& pi, const std::vector<CVector>& rho, double eps) {
  if (static_cast<int>(rho.size()) != pi.size()) throw std::invalid_argument("one_shot_entropies: one state per member");
  OneShotEntropies h;
  h.eps = eps;
  const int d_a = pi.d_in(), d_b = pi.d_out();
  for (int i = 0; i < pi.size(); ++i) {
    const CVector& psi = rho[i];
    const CMatrix full = psi * psi.adjoint();
    const CMatrix rho_a = partial_trace(full, {d_a, d_a}, {0});
    h.hmin_a.push_back(smooth_h_min(rho_a, d_a, 1, eps).lower);
    const std::vector<int> dims{d_a, d_a};
    const CMatrix out = apply_channel(pi.member(i), full, dims, 0);  // [B, A']
    const CMatrix ab = permute_systems(out, {d_b, d_a}, {1, 0});
    h.hmax_ab.push_back(smooth_h_max(ab, d_a, d_b, eps).upper);
  }
  return h;
}

double lemma7_expectation(double hmin_a, int m0, int m1i, double eps) {
  return std::exp2(-0.5 * (hmin_a - log2i(m0) - log2i(m1i))) + 12 * eps;
}

EncoderSelection select_encoders(IsEncoderSpec spec, const std::vector<double>& expectation, double factor,
                                 int max_retries, std::uint64_t seed) {
  spec.validate();
  if (static_cast<int>(expectation.size()) != spec.branches())
    throw std::invalid_argument("select_encoders: one expectation per branch");
  EncoderSelection r;
  for (double e : expectation) r.threshold.push_back(factor * e);
  const SeedStream root(seed);
  for (int attempt = 0; attempt <= max_retries && !r.ok; ++attempt) {
    draw_unitaries(spec, root.child(attempt).seed());
    r.deviation.clear();
    r.ok = true;
    for (int i = 0; i < spec.branches(); ++i) {
      r.deviation.push_back(normalize_encoder(build_is_encoder(spec, i), spec.m0, spec.m1()).deviation);
      r.ok = r.ok && r.deviation[i] <= r.threshold[i];
    }
    r.attempts = attempt + 1;
  }
  r.spec = std::move(spec);
  return r;
}

namespace {
double lemma6_delta(const OneShotEntropies& h, int n, int m0, const std::vector<int>& m1i) {
  double d = 0;
  for (size_t i = 0; i < h.hmax_ab.size(); ++i)
    d = std::max(d, std::exp2(-0.5 * (-h.hmax_ab[i] - log2i(m0) + log2i(m1i.at(i)) - 2 * log2i(n) - 2)));
  return d;
}
double lemma6_expectation(double delta, double eps) { return delta + 2 * std::sqrt(2 * delta) + 2 * eps; }
}  // namespace

AnalyticBound theorem5_bound(const OneShotEntropies& h, int n, int m0, int m1) {
  AnalyticBound b;
  const double hmin = *std::min_element(h.hmin_a.begin(), h.hmin_a.end());
  const double hmax = *std::max_element(h.hmax_ab.begin(), h.hmax_ab.end());
  b.delta1 = 3 * std::exp2(-0.5 * (hmin - log2i(m0) - log2i(m1))) + 24 * h.eps;
  b.delta2 = 3 * std::exp2(-0.5 * (-hmax - 2 * log2i(n) - log2i(m0) + log2i(m1))) + 24 * h.eps;
  b.value = 1 - 4.0 * n * std::sqrt(2 * std::sqrt(b.delta1) + b.delta2);
  return b;
}

AnalyticBound theorem6_bound(const OneShotEntropies& h, int n, int m0, const std::vector<int>& m1i) {
  AnalyticBound b;
  for (size_t i = 0; i < h.hmin_a.size(); ++i)
    b.delta1 = std::max(b.delta1, std::exp2(-0.5 * (h.hmin_a[i] - log2i(m0) - log2i(m1i.at(i)))));
  b.delta2 = lemma6_delta(h, n, m0, m1i);
  b.value = 1 - 8.0 * n * (n + 2) * (std::sqrt(b.delta1) + std::sqrt(b.delta2) + 6 * std::sqrt(h.eps));
  return b;
}

AnalyticBound lemma8_bound(const OneShotEntropies& h, int n, int m0) {
  AnalyticBound b;
  for (double hm : h.hmax_ab) b.delta1 = std::max(b.delta1, std::exp2(-0.5 * (-hm - log2i(m0) - 2 * log2i(n))));
  b.value = 1 - 16.0 * n * (n + 2) * (std::sqrt(b.delta1) + 6 * std::sqrt(h.eps));
  return b;
}

// ---- one-shot runs -----------------------------------------------------------------------

std::vector<int> distinct_branches(const CompoundChannel& pi, const std::vector<CVector>& rho,
                                   const std::vector<int>& m1i, int* count) {
  const int n = pi.size();
  if (static_cast<int>(rho.size()) != n || static_cast<int>(m1i.size()) != n)
    throw std::invalid_argument("distinct_branches: per-member lists differ in length");
  std::vector<CMatrix> choi;
  for (int i = 0; i < n; ++i) choi.push_back(choi_matrix(pi.member(i)));
  std::vector<int> of(n, -1), rep;
  for (int i = 0; i < n; ++i) {
    for (size_t c = 0; c < rep.size() && of[i] < 0; ++c) {
      const int j = rep[c];
      if (m1i[i] == m1i[j] && (choi[i] - choi[j]).cwiseAbs().maxCoeff() <= 1e-12 &&
          (rho[i] - rho[j]).cwiseAbs().maxCoeff() <= 1e-12)
        of[i] = static_cast<int>(c);
    }
    if (of[i] < 0) {
      of[i] = static_cast<int>(rep.size());
      rep.push_back(i);
    }
  }
  if (count) *count = static_cast<int>(rep.size());
  return of;
}

namespace {

struct Draw {
  std::vector<Channel> encoders;  // normalized
  std::vector<double> deviation;
  Channel decoder;
  double decoding_error = 0;
  double score = 0;  // max ratio to the Markov thresholds
};

void finish_report(OneShotReport& r, const CompoundChannel& full, const std::vector<int>& branch_of,
                   const std::vector<Channel>& encoders, const Channel& decoder, int m0, int m1) {
  r.branch_of = branch_of;
  r.fidelities.clear();
  for (int i = 0; i < full.size(); ++i)
    r.fidelities.push_back(entanglement_fidelity(decoder, full.member(i), encoders[branch_of[i]], m0, m1));
  r.min_fidelity = *std::min_element(r.fidelities.begin(), r.fidelities.end());
  r.bound_respected = !r.bound.nontrivial() || r.min_fidelity >= r.bound.value - 1e-9;
}

}  // namespace

OneShotReport run_one_shot_is(const CompoundChannel& pi, const std::vector<CVector>& rho, int m0,
                              const std::vector<int>& m1i_in, std::uint64_t seed, const OneShotOptions& opt,
                              IsCode* code) {
  const std::vector<int> m1i = m1i_in.size() == 1 ? std::vector<int>(pi.size(), m1i_in[0]) : m1i_in;
  const Subset s = reduce(pi, rho, m1i);
  const int n = s.pi.size(), d_a = pi.d_in(), d_b = pi.d_out();
  IsEncoderSpec spec = make_is_spec(d_a, m0, s.m1i, s.rho);
  const int m1 = spec.m1();
  check_budget(1LL * d_b * m1 * d_a * d_a * n * m0 * m1, "run_one_shot_is");

  const OneShotEntropies h = opt.entropies ? *opt.entropies : one_shot_entropies(s.pi, s.rho, opt.eps);
  OneShotReport r;
  r.seed = seed;
  r.distinct_members = n;
  r.bound = theorem6_bound(h, n, m0, s.m1i);
  for (int i = 0; i < n; ++i) r.encoder_expectation.push_back(lemma7_expectation(h.hmin_a[i], m0, s.m1i[i], h.eps));
  r.decoding_expectation = lemma6_expectation(lemma6_delta(h, n, m0, s.m1i), h.eps);

  std::vector<Channel> t;
  for (int i = 0; i < n; ++i) t.push_back(twisted_channel(s.pi.member(i), s.rho[i], d_a));

  const SeedStream root(seed);
  std::optional<Draw> best;
  IsEncoderSpec best_spec = spec;
  for (int attempt = 0; attempt <= opt.max_retries; ++attempt) {
    draw_unitaries(spec, root.child(attempt).seed());
    const CMatrix v = joint_dilation(t, spec);
    const CMatrix omega = decoupling_target(t, spec);
    Draw d{{}, {}, build_universal_decoder(v, d_b, m0, m1, omega)};
    CMatrix avg = CMatrix::Zero(1LL * m0 * m0, 1LL * m0 * m0);
    for (int i = 0; i < n; ++i) {
      const Channel e = build_is_encoder(spec, i);
      avg += code_output(d.decoder, s.pi.member(i), e, m0, m1) / double(n);
      const NormalizedEncoder ne = normalize_encoder(e, m0, m1);
      d.encoders.push_back(ne.encoder);
      d.deviation.push_back(ne.deviation);
      d.score = std::max(d.score, ne.deviation / ((n + 2) * r.encoder_expectation[i]));
    }
    d.decoding_error = trace_distance_to_phi(avg, m0);
    d.score = std::max(d.score, d.decoding_error / ((n + 2) * r.decoding_expectation));
    r.attempts = attempt + 1;
    const bool good = d.score <= 1;
    if (!best || d.score < best->score) {
      best = std::move(d);
      best_spec = spec;
    }
    if (good) break;
  }
  r.retry_cap_hit = best->score > 1;
  r.encoder_deviation = best->deviation;
  r.decoding_error = best->decoding_error;
  finish_report(r, pi, s.branch_of, best->encoders, best->decoder, m0, m1);
  IsCode chosen{best_spec, best->encoders, best->decoder, s.branch_of, m0, m1};

  // Same ansatz with U^i = U^1 for every branch, decoded against the
  // realized environment marginal. Kept when its worst branch is better.
  if (n > 1) {
    IsEncoderSpec shared = best_spec;
    std::fill(shared.u.begin(), shared.u.end(), best_spec.u[0]);
    const CMatrix v = joint_dilation(t, shared);
    const CMatrix p = purification_env_r(v, d_b, m0, m1);
    const int d_env = static_cast<int>(v.rows()) / d_b;
    const CMatrix omega = partial_trace(CMatrix(p * p.adjoint()), {d_env, m0}, {0});
    std::vector<Channel> enc;
    for (int i = 0; i < n; ++i) enc.push_back(normalize_encoder(build_is_encoder(shared, i), m0, m1).encoder);
    OneShotReport alt = r;
    finish_report(alt, pi, s.branch_of, enc, build_universal_decoder(v, d_b, m0, m1, omega), m0, m1);
    if (alt.min_fidelity > r.min_fidelity) {
      r.fidelities = alt.fidelities;
      r.min_fidelity = alt.min_fidelity;
      r.bound_respected = alt.bound_respected;
      r.construction = "shared";
      chosen = IsCode{shared, enc, build_universal_decoder(v, d_b, m0, m1, omega), s.branch_of, m0, m1};
    }
  }
  if (code) *code = chosen;
  return r;
}

OneShotReport run_one_shot_uninformed(const CompoundChannel& pi, const CVector& rho, int m0, int m1,
                                      std::uint64_t seed, const OneShotOptions& opt) {
  const std::vector<CVector> rhos(pi.size(), rho);
  const Subset s = reduce(pi, rhos, std::vector<int>(pi.size(), m1));
  const int n = s.pi.size(), d_a = pi.d_in(), d_b = pi.d_out();
  IsEncoderSpec spec = make_is_spec(d_a, m0, s.m1i, s.rho);
  check_budget(1LL * d_b * d_a * d_a * n * m0 * m1, "run_one_shot_uninformed");

  const OneShotEntropies h = opt.entropies ? *opt.entropies : one_shot_entropies(s.pi, s.rho, opt.eps);
  OneShotReport r;
  r.seed = seed;
  r.distinct_members = n;
  r.bound = theorem5_bound(h, n, m0, m1);
  r.construction = "shared";
  r.encoder_expectation.assign(1, lemma7_expectation(h.hmin_a.front(), m0, m1, h.eps));

  std::vector<Channel> t;
  for (int i = 0; i < n; ++i) t.push_back(twisted_channel(s.pi.member(i), rho, d_a));

  // One shared unitary; only the encoder deviation is subject to retry.
  const SeedStream root(seed);
  double best_dev = std::numeric_limits<double>::infinity();
  IsEncoderSpec best_spec = spec;
  for (int attempt = 0; attempt <= opt.max_retries; ++attempt) {
    auto rng = root.child(attempt).engine();
    const CMatrix u = haar_unitary(d_a, rng);
    std::fill(spec.u.begin(), spec.u.end(), u);
    const double dev = normalize_encoder(build_is_encoder(spec, 0), m0, m1).deviation;
    r.attempts = attempt + 1;
    if (dev < best_dev) {
      best_dev = dev;
      best_spec = spec;
    }
    if (dev <= (n + 2) * r.encoder_expectation[0]) break;
  }
  r.retry_cap_hit = best_dev > (n + 2) * r.encoder_expectation[0];
  const Channel e = build_is_encoder(best_spec, 0);
  const NormalizedEncoder ne = normalize_encoder(e, m0, m1);
  r.encoder_deviation.assign(1, ne.deviation);

  const CMatrix v = joint_dilation(t, best_spec);
  const CMatrix p = purification_env_r(v, d_b, m0, m1);
  const int d_env = static_cast<int>(v.rows()) / d_b;
  const CMatrix omega = partial_trace(CMatrix(p * p.adjoint()), {d_env, m0}, {0});
  const Channel dec = build_universal_decoder(v, d_b, m0, m1, omega);
  CMatrix avg = CMatrix::Zero(1LL * m0 * m0, 1LL * m0 * m0);
  for (int i = 0; i < n; ++i) avg += code_output(dec, s.pi.member(i), e, m0, m1) / double(n);
  r.decoding_error = trace_distance_to_phi(avg, m0);
  finish_report(r, pi, s.branch_of, std::vector<Channel>(n, ne.encoder), dec, m0, m1);
  return r;
}

OneShotReport plain_is_experiment(const CompoundChannel& pi, const std::vector<CVector>& rho, int m0,
                                  std::uint64_t seed, const OneShotOptions& opt) {
  const Subset s = reduce(pi, rho, std::vector<int>(pi.size(), 1));
  const int n = s.pi.size(), d_a = pi.d_in(), d_b = pi.d_out();
  if (m0 < 1 || m0 > d_a) throw std::invalid_argument("plain_is_experiment: need 1 <= M0 <= d_A");
  int de = 1;
  for (int i = 0; i < n; ++i) de = std::max(de, s.pi.member(i).kraus_rank());
  check_budget(1LL * d_b * de * n * m0 * de * n * m0, "plain_is_experiment");

  const OneShotEntropies h = opt.entropies ? *opt.entropies : one_shot_entropies(s.pi, s.rho, opt.eps);
  OneShotReport r;
  r.seed = seed;
  r.distinct_members = n;
  r.bound = lemma8_bound(h, n, m0);
  r.construction = "flagged";
  const double base = r.bound.delta1 + 12 * h.eps;
  r.encoder_expectation.assign(n, base);
  r.decoding_expectation = base + 2 * std::sqrt(2 * base);

  // omega_{EI} = (1/N) sum_i N^{i,c}(rho^i_A) (x) |i><i|
  CMatrix omega = CMatrix::Zero(1LL * de * n, 1LL * de * n);
  std::vector<CMatrix> oa;
  for (int i = 0; i < n; ++i) {
    oa.push_back(build_oa(s.rho[i], d_a));
    CMatrix flag = CMatrix::Zero(n, n);
    flag(i, i) = 1.0 / n;
    omega += kron(complement_output(s.pi.member(i), oa[i] * oa[i].adjoint(), de), flag);
  }
  const CMatrix j = embedding(d_a, m0);
  const double scale = std::sqrt(double(d_a) * n);

  const SeedStream root(seed);
  struct Best {
    std::vector<Channel> enc;
    std::vector<double> dev;
    Channel dec;
    double err = 0, score = std::numeric_limits<double>::infinity();
  };
  std::optional<Best> best;
  for (int attempt = 0; attempt <= opt.max_retries; ++attempt) {
    auto rng = root.child(attempt).engine();
    const CMatrix u = haar_unitary(d_a * n, rng);
    std::vector<Channel> raw;
    CMatrix v = CMatrix::Zero(1LL * d_b * de * n, m0);  // [B, E, I] x A0
    for (int i = 0; i < n; ++i) {
      CMatrix blk(d_a, d_a);  // <i| U |0>
      for (int a = 0; a < d_a; ++a)
        for (int b = 0; b < d_a; ++b) blk(a, b) = u(1LL * a * n + i, 1LL * b * n);
      const CMatrix f = scale * oa[i] * blk * j;
      raw.emplace_back(std::vector<CMatrix>{f}, Channel::Kind::CompletelyPositive);
      const auto kraus = s.pi.member(i).kraus();
      for (int k = 0; k < static_cast<int>(kraus.size()); ++k) {
        const CMatrix kf = kraus[k] * f / std::sqrt(double(n));
        for (int b = 0; b < d_b; ++b) v.row((1LL * b * de + k) * n + i) = kf.row(b);
      }
    }
    Best d{{}, {}, build_universal_decoder(v, d_b, m0, 1, omega)};
    CMatrix avg = CMatrix::Zero(1LL * m0 * m0, 1LL * m0 * m0);
    double score = 0;
    for (int i = 0; i < n; ++i) {
      avg += code_output(d.dec, s.pi.member(i), raw[i], m0, 1) / double(n);
      const NormalizedEncoder ne = normalize_encoder(raw[i], m0, 1);
      d.enc.push_back(ne.encoder);
      d.dev.push_back(ne.deviation);
      score = std::max(score, ne.deviation / ((n + 2) * base));
    }
    d.err = trace_distance_to_phi(avg, m0);
    d.score = std::max(score, d.err / ((n + 2) * r.decoding_expectation));
    r.attempts = attempt + 1;
    const bool good = d.score <= 1;
    if (!best || d.score < best->score) best = std::move(d);
    if (good) break;
  }
  r.retry_cap_hit = best->score > 1;
  r.encoder_deviation = best->dev;
  r.decoding_error = best->err;
  finish_report(r, pi, s.branch_of, best->enc, best->dec, m0, 1);
  return r;
}

// ---- estimation and feedback --------------------------------------------------------------

EstimationReport estimate_channel_pgm(const CompoundChannel& pi, int m, const CMatrix& omega, int d_ref,
                                      int trials, std::uint64_t seed) {
  const int n = pi.size(), d_a = pi.d_in(), d_b = pi.d_out();
  if (m < 0 || trials < 0) throw std::invalid_argument("estimate_channel_pgm: m and trials must be >= 0");
  if (omega.rows() != 1LL * d_a * d_ref) throw std::invalid_argument("estimate_channel_pgm: omega must live on [A, A']");
  EstimationReport r;
  r.seed = seed;
  r.trials = trials;
  const int l = n * (n - 1) / 2;
  r.copies = m * l;

  const std::vector<int> dims{d_a, d_ref};
  std::vector<CMatrix> single;
  for (int i = 0; i < n; ++i) single.push_back(hermitian_part(apply_channel(pi.member(i), omega, dims, 0)));
  for (int i = 0; i < n && !r.indistinguishable; ++i)
    for (int j = i + 1; j < n; ++j)
      if (trace_norm(CMatrix(single[i] - single[j])) < 1e-12) r.indistinguishable = true;

  r.confusion = RMatrix::Zero(n, n);
  if (n == 1) {
    r.confusion(0, 0) = 1;
  } else {
    const long long per = 1LL * d_b * d_ref;
    long long total = 1;
    for (int c = 0; c < r.copies; ++c) {
      total *= per;
      if (total > 4096) throw BudgetError("estimate_channel_pgm: m L copies exceed the dense budget");
    }
    std::vector<CMatrix> power(n, CMatrix::Identity(1, 1));
    for (int i = 0; i < n; ++i)
      for (int c = 0; c < r.copies; ++c) power[i] = kron(power[i], single[i]);
    CMatrix avg = CMatrix::Zero(power[0].rows(), power[0].cols());
    for (const auto& p : power) avg += p / double(n);
    const CMatrix root = support_power(avg, -0.5, 1e-13);
    for (int j = 0; j < n; ++j) {
      const CMatrix mj = root * power[j] / double(n) * root;
      for (int i = 0; i < n; ++i) r.confusion(i, j) = std::max(0.0, (mj * power[i]).trace().real());
    }
  }
  const SeedStream seeds(seed);
  for (int i = 0; i < n; ++i) {
    r.exact_success.push_back(r.confusion(i, i));
    if (trials == 0) continue;
    auto rng = seeds.child(i).engine();
    int hits = 0;
    const double rowsum = r.confusion.row(i).sum();
    for (int k = 0; k < trials; ++k) {
      const double u = double(rng() >> 11) * 0x1.0p-53 * rowsum;
      double acc = 0;
      int pick = n - 1;
      for (int j = 0; j < n; ++j) {
        acc += r.confusion(i, j);
        if (u < acc) {
          pick = j;
          break;
        }
      }
      hits += pick == i;
    }
    const double p = double(hits) / trials;
    r.empirical_success.push_back(p);
    r.std_error.push_back(std::sqrt(p * (1 - p) / trials));
  }
  return r;
}

ProtocolTranscript feedback_protocol_sim(const CompoundChannel& pi, int n, int m0, const std::vector<int>& m1i_in,
                                         std::uint64_t seed, int trials, double eps) {
  if (n < 1) throw std::invalid_argument("feedback_protocol_sim: n must be >= 1");
  const int d_a = pi.d_in();
  const std::vector<int> m1i = m1i_in.size() == 1 ? std::vector<int>(pi.size(), m1i_in[0]) : m1i_in;
  const Subset s = reduce(pi, phi_inputs(d_a, pi.size()), m1i);
  const int k = s.pi.size();

  ProtocolTranscript tr;
  tr.seed = seed;
  tr.n = n;
  tr.m0 = m0;
  tr.m1i = m1i;
  tr.m = static_cast<int>(std::floor(std::sqrt(double(n))));
  while (1LL * (tr.m + 1) * (tr.m + 1) <= n) ++tr.m;
  while (1LL * tr.m * tr.m > n) --tr.m;
  tr.l = k * (k - 1) / 2;
  tr.t = n - tr.m * tr.l;
  if (tr.t < 1) throw std::invalid_argument("feedback_protocol_sim: infeasible, no uses left after estimation");

  const SeedStream root(seed);
  tr.estimation = estimate_channel_pgm(s.pi, tr.m, max_entangled_density(d_a), d_a, trials, root.child(0).seed());

  // Both ends know the estimate after feedback, so each index gets its own
  // single-branch code, decoder included.
  OneShotOptions opt;
  opt.eps = eps;
  std::vector<IsCode> codes(k);
  for (int j = 0; j < k; ++j) {
    const OneShotReport rep = run_one_shot_is(CompoundChannel({s.pi.member(j)}), {s.rho[j]}, m0, {s.m1i[j]},
                                              root.child(1 + j).seed(), opt, &codes[j]);
    tr.code_attempts += rep.attempts;
  }
  tr.block_fidelity = RMatrix::Zero(k, k);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j)
      tr.block_fidelity(i, j) =
          entanglement_fidelity(codes[j].decoder, s.pi.member(i), codes[j].encoders.front(), m0, codes[j].m1);

  double min_est = 1, min_code = 1;
  for (int c = 0; c < k; ++c) {
    min_est = std::min(min_est, tr.estimation.exact_success[c]);
    min_code = std::min(min_code, std::pow(tr.block_fidelity(c, c), tr.t));
  }
  tr.total_fidelity = 1;
  for (int i = 0; i < pi.size(); ++i) {
    const int c = s.branch_of[i];
    double f = 0;
    for (int j = 0; j < k; ++j) f += tr.estimation.confusion(c, j) * std::pow(tr.block_fidelity(c, j), tr.t);
    f = std::clamp(f, 0.0, 1.0);
    tr.code_fidelity.push_back(std::pow(tr.block_fidelity(c, c), tr.t));
    tr.member_fidelity.push_back(f);
    tr.total_fidelity = std::min(tr.total_fidelity, f);
  }
  tr.product_lower = min_est * min_code;
  tr.rate = tr.t * log2i(m0) / n;
  return tr;
}

}  // namespace compoundcap
