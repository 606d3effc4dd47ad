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

#include "compoundcap/entropy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "compoundcap/sdp.hpp"

namespace compoundcap {

SmoothingBall::SmoothingBall(double eps) : epsilon(eps) {
  if (!(eps >= 0 && eps < 1)) throw std::invalid_argument("smoothing radius must lie in [0, 1)");
}

double binary_entropy(double p) {
  if (p < 0 || p > 1) throw std::invalid_argument("binary_entropy: p outside [0,1]");
  if (p == 0 || p == 1) return 0;
  return -p * std::log2(p) - (1 - p) * std::log2(1 - p);
}

double von_neumann(const CMatrix& rho) {
  double s = 0;
  for (double l : hermitian_eigenvalues(rho))
    if (l > 0) s -= l * std::log2(l);
  return s;
}

double von_neumann(const DensityOperator& rho, std::span<const int> subsystems) {
  return von_neumann(partial_trace(rho, subsystems).matrix());
}

namespace {

void require_bipartite(const CMatrix& rho, int d_a, int d_b) {
  if (d_a < 1 || d_b < 1 || rho.rows() != static_cast<Eigen::Index>(d_a) * d_b || rho.cols() != rho.rows())
    throw std::invalid_argument("bipartite operator does not match d_A x d_B");
}

void require_normalized(const CMatrix& rho) {
  if (std::abs(rho.trace().real() - 1) > 1e-8) throw std::invalid_argument("entropy requires a normalized state");
}

std::pair<int, int> bipartite_dims(const DensityOperator& rho) {
  if (rho.layout().num_systems() != 2) throw std::invalid_argument("entropy requires a bipartite layout [A, B]");
  return {rho.layout().dim(0), rho.layout().dim(1)};
}

CMatrix marginal_b(const CMatrix& rho, int d_a, int d_b) { return partial_trace(rho, {d_a, d_b}, {1}); }
CMatrix marginal_a(const CMatrix& rho, int d_a, int d_b) { return partial_trace(rho, {d_a, d_b}, {0}); }

// |a> (x) 1_B as a (d_a d_b) x d_b matrix.
CMatrix lift(int d_a, int d_b, int a) {
  CMatrix e = CMatrix::Zero(d_a, 1);
  e(a, 0) = 1.0;
  return kron(e, CMatrix::Identity(d_b, d_b));
}

std::vector<sdp::Congruence> identity_tensor(int d_a, int d_b, double coeff) {
  std::vector<sdp::Congruence> parts;
  for (int a = 0; a < d_a; ++a) parts.push_back({coeff, lift(d_a, d_b, a)});
  return parts;
}

std::vector<sdp::Congruence> trace_parts(int block_dim, int offset, int size) {
  std::vector<sdp::Congruence> parts;
  for (int i = 0; i < size; ++i) parts.push_back({1.0, sdp::selector(block_dim, offset + i, 1)});
  return parts;
}

// Congruence decomposition of the functional X -> <H, X>.
std::vector<sdp::Congruence> functional_parts(const CMatrix& h) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitian_part(h));
  const double top = es.eigenvalues().cwiseAbs().maxCoeff();
  std::vector<sdp::Congruence> parts;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    const double mu = es.eigenvalues()(i);
    if (std::abs(mu) <= 1e-14 * top) continue;
    parts.push_back({mu, es.eigenvectors().col(i).adjoint()});
  }
  return parts;
}

void finish(EntropyValue& v, const sdp::Solution& s) {
  v.solver_status = sdp::status_name(s.status);
  v.certified = s.status == sdp::Status::Optimal;
  if (s.status == sdp::Status::Infeasible || s.status == sdp::Status::Unbounded)
    throw SolverError(std::string("entropy program reported ") + v.solver_status);
}

struct SupportBasis {
  CMatrix v;
  RVector lambda;
};

SupportBasis support(const CMatrix& m, double rel_cutoff = 1e-12) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitian_part(m));
  const double top = std::max(es.eigenvalues().maxCoeff(), 0.0);
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = es.eigenvalues().size() - 1; i >= 0; --i)
    if (es.eigenvalues()(i) > rel_cutoff * top && es.eigenvalues()(i) > 0) keep.push_back(i);
  SupportBasis s;
  s.v.resize(m.rows(), static_cast<Eigen::Index>(keep.size()));
  s.lambda.resize(static_cast<Eigen::Index>(keep.size()));
  for (size_t k = 0; k < keep.size(); ++k) {
    s.v.col(static_cast<Eigen::Index>(k)) = es.eigenvectors().col(keep[k]);
    s.lambda(static_cast<Eigen::Index>(k)) = es.eigenvalues()(keep[k]);
  }
  return s;
}

}  // namespace

double cond_entropy(const CMatrix& rho_ab, int d_a, int d_b) {
  require_bipartite(rho_ab, d_a, d_b);
  require_normalized(rho_ab);
  return von_neumann(rho_ab) - von_neumann(marginal_b(rho_ab, d_a, d_b));
}

double cond_entropy(const DensityOperator& rho) {
  auto [a, b] = bipartite_dims(rho);
  return cond_entropy(rho.matrix(), a, b);
}

double mutual_info(const CMatrix& rho_ab, int d_a, int d_b) {
  require_bipartite(rho_ab, d_a, d_b);
  require_normalized(rho_ab);
  return von_neumann(marginal_a(rho_ab, d_a, d_b)) + von_neumann(marginal_b(rho_ab, d_a, d_b)) -
         von_neumann(rho_ab);
}

double mutual_info(const DensityOperator& rho) {
  auto [a, b] = bipartite_dims(rho);
  return mutual_info(rho.matrix(), a, b);
}

CVector purify(const CMatrix& rho, int* rank, double cutoff) {
  const auto s = support(rho, cutoff);
  const int d = static_cast<int>(rho.rows()), r = static_cast<int>(s.lambda.size());
  CVector psi = CVector::Zero(static_cast<Eigen::Index>(d) * std::max(r, 1));
  for (int i = 0; i < r; ++i)
    for (int x = 0; x < d; ++x) psi(x * r + i) = std::sqrt(s.lambda(i)) * s.v(x, i);
  if (rank) *rank = std::max(r, 1);
  return psi;
}

// ---- min / max entropy -----------------------------------------------------

EntropyValue h_min(const CMatrix& rho_ab, int d_a, int d_b, double tol) {
  require_bipartite(rho_ab, d_a, d_b);
  if (!(rho_ab.trace().real() > 0)) throw std::invalid_argument("h_min: zero operator");
  // max <rho, X> s.t. tr_A X = 1_B; the multiplier gives sigma_B.
  sdp::Problem p;
  const int x = p.add_block(d_a * d_b, "X_AB");
  p.set_objective(x, -rho_ab);
  std::vector<sdp::Congruence> tr_a;
  for (int a = 0; a < d_a; ++a) tr_a.push_back({1.0, lift(d_a, d_b, a).adjoint()});
  p.add_constraint(x, tr_a, CMatrix::Identity(d_b, d_b), sdp::Sense::Equal, "tr_A X = 1");
  const auto s = sdp::solve(p, tol);
  EntropyValue v;
  finish(v, s);
  const double lo = std::max(-s.primal_objective, 1e-300), hi = std::max(-s.dual_objective, 1e-300);
  v.bits = -std::log2(0.5 * (lo + hi));
  v.lower = -std::log2(std::max(lo, hi));
  v.upper = -std::log2(std::min(lo, hi));
  v.certificate = CMatrix(-s.y[0]);
  v.certificate_kind = "sigma_B";
  return v;
}

EntropyValue h_min(const DensityOperator& rho, double tol) {
  auto [a, b] = bipartite_dims(rho);
  return h_min(rho.matrix(), a, b, tol);
}

namespace {

// rho_AC of the canonical purification of rho_AB.
CMatrix purifying_marginal(const CMatrix& rho_ab, int d_a, int d_b, int* d_c) {
  int r = 1;
  const CVector psi = purify(rho_ab, &r);
  const CMatrix full = psi * psi.adjoint();
  *d_c = r;
  return partial_trace(full, {d_a, d_b, r}, {0, 2});
}

EntropyValue negate(EntropyValue v) {
  v.bits = -v.bits;
  std::swap(v.lower, v.upper);
  v.lower = -v.lower;
  v.upper = -v.upper;
  return v;
}

}  // namespace

EntropyValue h_max(const CMatrix& rho_ab, int d_a, int d_b, double tol) {
  require_bipartite(rho_ab, d_a, d_b);
  int d_c = 1;
  const CMatrix rho_ac = purifying_marginal(rho_ab, d_a, d_b, &d_c);
  EntropyValue v = negate(h_min(rho_ac, d_a, d_c, tol));
  v.certificate_kind = "sigma_C (purifying system)";
  return v;
}

EntropyValue h_max(const DensityOperator& rho, double tol) {
  auto [a, b] = bipartite_dims(rho);
  return h_max(rho.matrix(), a, b, tol);
}

EntropyValue h_max_fidelity_form(const CMatrix& rho_ab, int d_a, int d_b, double tol) {
  require_bipartite(rho_ab, d_a, d_b);
  const int d = d_a * d_b;
  const auto sb = support(rho_ab);
  const int r = static_cast<int>(sb.lambda.size());
  if (r == 0) throw std::invalid_argument("h_max: zero operator");
  // [[Lambda, X], [X^dag, 1 (x) sigma]] >= 0, maximize Re tr(V X)
  sdp::Problem p;
  const int n = r + d;
  const int g = p.add_block(n, "G");
  const int sg = p.add_block(d_b, "sigma_B");
  CMatrix h = CMatrix::Zero(n, n);
  h.block(0, r, r, d) = 0.5 * sb.v.adjoint();
  h.block(r, 0, d, r) = 0.5 * sb.v;
  p.set_objective(g, -h);
  p.add_constraint(g, {{1.0, sdp::selector(n, 0, r)}}, CMatrix(sb.lambda.cast<Complex>().asDiagonal()),
                   sdp::Sense::Equal, "top-left = Lambda");
  sdp::Constraint link;
  link.label = "bottom-right = 1 (x) sigma";
  link.rhs = CMatrix::Zero(d, d);
  link.terms.push_back({g, {{1.0, sdp::selector(n, r, d)}}});
  link.terms.push_back({sg, identity_tensor(d_a, d_b, -1.0)});
  p.add_constraint(std::move(link));
  p.add_constraint(sg, trace_parts(d_b, 0, d_b), CMatrix::Identity(1, 1), sdp::Sense::Equal, "tr sigma = 1");
  const auto s = sdp::solve(p, tol);
  EntropyValue v;
  finish(v, s);
  const double a = std::max(-s.primal_objective, 1e-300), b = std::max(-s.dual_objective, 1e-300);
  v.bits = 2 * std::log2(0.5 * (a + b));
  v.lower = 2 * std::log2(std::min(a, b));
  v.upper = 2 * std::log2(std::max(a, b));
  v.certificate = s.x[sg];
  v.certificate_kind = "sigma_B";
  return v;
}

// ---- smoothing -----------------------------------------------------------------

double smooth_h_min_ceiling(int d_a, double eps) {
  SmoothingBall ball(eps);
  return std::log2(double(d_a)) - std::log2(1 - ball.epsilon * ball.epsilon);
}

EntropyValue smooth_h_min(const CMatrix& rho_ab, int d_a, int d_b, double eps, double tol) {
  require_bipartite(rho_ab, d_a, d_b);
  SmoothingBall ball(eps);
  if (ball.epsilon == 0) {
    EntropyValue v = h_min(rho_ab, d_a, d_b, tol);
    v.certificate = rho_ab;
    v.certificate_kind = "rho_tilde_AB";
    return v;
  }
  const int d = d_a * d_b;
  // generalized fidelity through the direct sum rho (+) (1 - tr rho)
  CMatrix hat = CMatrix::Zero(d + 1, d + 1);
  hat.topLeftCorner(d, d) = hermitian_part(rho_ab);
  hat(d, d) = std::max(0.0, 1 - rho_ab.trace().real());
  const auto sb = support(hat);
  const int r = static_cast<int>(sb.lambda.size());
  if (r == 0) throw std::invalid_argument("smooth_h_min: zero operator");
  const int n = d + 1 + r;

  sdp::Problem p;
  const int g = p.add_block(n, "G");
  const int sg = p.add_block(d_b, "sigma_B");
  p.set_objective(sg, CMatrix::Identity(d_b, d_b));
  p.add_constraint(g, {{1.0, sdp::selector(n, d + 1, r)}}, CMatrix(sb.lambda.cast<Complex>().asDiagonal()),
                   sdp::Sense::Equal, "fixed block = rho (+) s on its support");
  p.add_constraint(g, trace_parts(n, 0, d + 1), CMatrix::Identity(1, 1), sdp::Sense::Equal,
                   "tr rho_tilde + t = 1");
  CMatrix h = CMatrix::Zero(n, n);
  h.block(0, d + 1, d + 1, r) = 0.5 * sb.v;
  h.block(d + 1, 0, r, d + 1) = 0.5 * sb.v.adjoint();
  p.add_constraint(g, functional_parts(-h), -std::sqrt(1 - eps * eps) * CMatrix::Identity(1, 1),
                   sdp::Sense::LessEqual, "root generalized fidelity >= sqrt(1 - eps^2)");
  sdp::Constraint dom;
  dom.label = "rho_tilde <= 1 (x) sigma";
  dom.sense = sdp::Sense::LessEqual;
  dom.rhs = CMatrix::Zero(d, d);
  dom.terms.push_back({g, {{1.0, sdp::selector(n, 0, d)}}});
  dom.terms.push_back({sg, identity_tensor(d_a, d_b, -1.0)});
  p.add_constraint(std::move(dom));

  const auto s = sdp::solve(p, tol);
  EntropyValue v;
  finish(v, s);
  const double lo = std::max(s.primal_objective, 1e-300), hi = std::max(s.dual_objective, 1e-300);
  v.bits = -std::log2(0.5 * (lo + hi));
  v.lower = -std::log2(std::max(lo, hi));
  v.upper = -std::log2(std::min(lo, hi));
  v.certificate = CMatrix(s.x[g].topLeftCorner(d, d));
  v.certificate_kind = "rho_tilde_AB";
  return v;
}

EntropyValue smooth_h_max(const CMatrix& rho_ab, int d_a, int d_b, double eps, double tol) {
  require_bipartite(rho_ab, d_a, d_b);
  int d_c = 1;
  const CMatrix rho_ac = purifying_marginal(rho_ab, d_a, d_b, &d_c);
  EntropyValue v = negate(smooth_h_min(rho_ac, d_a, d_c, eps, tol));
  v.certificate_kind = "rho_tilde_AC (purifying marginal)";
  return v;
}

// ---- collision entropy -------------------------------------------------------------

namespace {

// rho compressed to A (x) supp(rho_B) and the basis W of that support.
struct Compressed {
  CMatrix rho;
  CMatrix w;
  int db = 0;
};

Compressed compress_b(const CMatrix& rho_ab, int d_a, int d_b) {
  const auto sb = support(marginal_b(rho_ab, d_a, d_b));
  Compressed c;
  c.w = sb.v;
  c.db = static_cast<int>(sb.v.cols());
  const CMatrix lift_w = kron(CMatrix::Identity(d_a, d_a), c.w);
  c.rho = hermitian_part(CMatrix(lift_w.adjoint() * rho_ab * lift_w));
  return c;
}

struct CollisionEval {
  double f = std::numeric_limits<double>::infinity();
  CMatrix grad;
};

// f(sigma) = tr[rho S rho S], S = 1 (x) sigma^{-1/2}; gradient by Daleckii-Krein.
CollisionEval collision_eval(const CMatrix& rho, int d_a, int d_b, const CMatrix& sigma, bool with_grad) {
  CollisionEval out;
  Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitian_part(sigma));
  const RVector& lam = es.eigenvalues();
  if (lam.minCoeff() <= 0) return out;
  RVector g = lam.array().rsqrt();
  const CMatrix& u = es.eigenvectors();
  const CMatrix s_b = u * g.cast<Complex>().asDiagonal() * u.adjoint();
  const CMatrix s = kron(CMatrix::Identity(d_a, d_a), s_b);
  const CMatrix rs = rho * s;
  out.f = (rs * rs).trace().real();
  if (!with_grad) return out;
  const CMatrix y = 2.0 * partial_trace(CMatrix(rs * rho), {d_a, d_b}, {1});
  CMatrix yt = u.adjoint() * y * u;
  for (int i = 0; i < d_b; ++i)
    for (int j = 0; j < d_b; ++j) {
      const double li = lam(i), lj = lam(j);
      const double dd = std::abs(li - lj) > 1e-12 * std::max(li, lj) ? (g(i) - g(j)) / (li - lj)
                                                                     : -0.5 * std::pow(li, -1.5);
      yt(i, j) *= dd;
    }
  out.grad = hermitian_part(CMatrix(u * yt * u.adjoint()));
  return out;
}

}  // namespace

double collision_entropy_at(const CMatrix& rho_ab, int d_a, int d_b, const CMatrix& sigma_b) {
  require_bipartite(rho_ab, d_a, d_b);
  if (sigma_b.rows() != d_b || sigma_b.cols() != d_b) throw std::invalid_argument("collision_entropy: sigma_B has wrong size");
  const RVector w = hermitian_eigenvalues(sigma_b);
  if (w.minCoeff() <= 1e-14 * std::max(1.0, w.maxCoeff())) throw std::invalid_argument("collision_entropy: singular sigma_B");
  const auto e = collision_eval(rho_ab, d_a, d_b, sigma_b, false);
  return -std::log2(e.f);
}

EntropyValue collision_entropy(const CMatrix& rho_ab, int d_a, int d_b, const std::optional<CMatrix>& sigma_b) {
  require_bipartite(rho_ab, d_a, d_b);
  EntropyValue v;
  v.certificate_kind = "sigma_B";
  if (sigma_b) {
    v.bits = collision_entropy_at(rho_ab, d_a, d_b, *sigma_b);
    v.lower = v.bits;
    v.upper = std::numeric_limits<double>::infinity();
    v.certificate = *sigma_b;
    v.solver_status = "evaluated";
    return v;
  }
  const Compressed c = compress_b(rho_ab, d_a, d_b);
  if (c.db == 0) throw std::invalid_argument("collision_entropy: zero operator");
  const int db = c.db;
  CMatrix sigma = partial_trace(c.rho, {d_a, db}, {1});
  sigma /= sigma.trace().real();
  CollisionEval cur = collision_eval(c.rho, d_a, db, sigma, true);
  double step = 1.0 / std::max(1.0, cur.grad.norm());
  double lower_f = 0;
  const double floor = 1e-14;
  int it = 0;
  for (; it < 3000; ++it) {
    // Frank-Wolfe lower bound on the minimum of the convex objective
    const double lmin = hermitian_eigenvalues(cur.grad).minCoeff();
    const double gap = (cur.grad * sigma).trace().real() - lmin;
    lower_f = std::max(lower_f, cur.f - gap);
    if (gap <= 1e-11 * cur.f) break;
    bool moved = false;
    for (int bt = 0; bt < 60; ++bt) {
      const CMatrix cand = project_to_density(sigma - step * cur.grad, floor);
      const auto e = collision_eval(c.rho, d_a, db, cand, false);
      const CMatrix diff = cand - sigma;
      const double decrease = (cur.grad * diff).trace().real() + diff.squaredNorm() / (2 * step);
      if (e.f <= cur.f + decrease + 1e-15 * cur.f) {
        sigma = cand;
        cur = collision_eval(c.rho, d_a, db, sigma, true);
        step *= 1.5;
        moved = true;
        break;
      }
      step *= 0.5;
    }
    if (!moved) break;
  }
  v.bits = -std::log2(cur.f);
  v.lower = v.bits;
  const double h_cond = std::abs(rho_ab.trace().real() - 1) < 1e-8 ? cond_entropy(rho_ab, d_a, d_b)
                                                                  : std::numeric_limits<double>::infinity();
  v.upper = std::min(lower_f > 0 ? -std::log2(lower_f) : std::numeric_limits<double>::infinity(), h_cond);
  v.certificate = CMatrix(c.w * sigma * c.w.adjoint());
  v.solver_status = it < 3000 ? "converged" : "iteration-cap";
  v.certified = true;
  return v;
}

// ---- closed-form bounds -------------------------------------------------------------

AepDelta aep_delta(double eps, int d_a, int n) {
  if (!(eps > 0) || d_a < 1 || n < 1) throw std::invalid_argument("aep_delta: invalid arguments");
  const double l = std::log2(2 / (eps * eps));
  AepDelta r;
  r.value = 4 * std::log2(2 * std::sqrt(double(d_a)) + 1) * std::sqrt(std::max(0.0, l));
  r.valid = n >= 1.6 * l;
  return r;
}

double fannes_cond(double t, int d_a) {
  if (t < 0 || t > 1) throw std::invalid_argument("fannes_cond: T outside [0,1]");
  return 2 * t * std::log2(double(d_a)) + (1 + t) * binary_entropy(t / (1 + t));
}

double fannes_mi(double t, int d_a, int d_b) {
  if (t < 0 || t > 1) throw std::invalid_argument("fannes_mi: T outside [0,1]");
  return 2 * t * std::log2(double(std::min(d_a, d_b))) + 2 * (1 + t) * binary_entropy(t / (1 + t));
}

}  // namespace compoundcap
