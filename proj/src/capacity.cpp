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


#include "compoundcap/capacity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "compoundcap/entropy.hpp"
#include "compoundcap/parallel.hpp"

namespace compoundcap {

namespace {

constexpr double kEigFloor = 1e-16;
constexpr double kDensityFloor = 1e-13;

void require_input(const CMatrix& rho, const Channel& n) {
  if (rho.rows() != n.d_in() || rho.cols() != n.d_in())
    throw std::invalid_argument("input state dimension does not match the channel");
}

double entropy_and_log(const CMatrix& m, CMatrix* log2m) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitian_part(m));
  const RVector w = es.eigenvalues().cwiseMax(0.0);
  double h = 0;
  for (Eigen::Index i = 0; i < w.size(); ++i)
    if (w(i) > 0) h -= w(i) * std::log2(w(i));
  if (log2m) {
    const RVector lw = w.cwiseMax(kEigFloor).array().log() / std::numbers::ln2;
    *log2m = es.eigenvectors() * lw.cast<Complex>().asDiagonal() * es.eigenvectors().adjoint();
  }
  return h;
}

// One member's I(rho, N) and its gradient by the entropy-exchange formula.
struct Member {
  Channel n, nc;
  explicit Member(const Channel& ch) : n(ch), nc(complementary(ch)) {}

  double value(const CMatrix& rho, CMatrix* grad) const {
    CMatrix l0, l1, l2;
    const CMatrix out = n.apply(rho), env = nc.apply(rho);
    const double h = entropy_and_log(rho, grad ? &l0 : nullptr) + entropy_and_log(out, grad ? &l1 : nullptr) -
                     entropy_and_log(env, grad ? &l2 : nullptr);
    if (grad) {
      const int d = static_cast<int>(rho.rows());
      const CMatrix id = CMatrix::Identity(d, d);
      const CMatrix konst = id + n.apply_adjoint(CMatrix::Identity(n.d_out(), n.d_out())) -
                            nc.apply_adjoint(CMatrix::Identity(nc.d_out(), nc.d_out()));
      *grad = hermitian_part(CMatrix(-l0 - n.apply_adjoint(l1) + nc.apply_adjoint(l2) - konst / std::numbers::ln2));
    }
    return h;
  }
};

struct Eval {
  std::vector<double> f;
  std::vector<CMatrix> g;
};

Eval evaluate(const std::vector<Member>& ms, const CMatrix& rho, bool grads) {
  Eval e;
  e.f.resize(ms.size());
  if (grads) e.g.resize(ms.size());
  parallel_for(static_cast<int>(ms.size()), [&](int i) { e.f[i] = ms[i].value(rho, grads ? &e.g[i] : nullptr); });
  return e;
}

// -T log sum exp(-f/T) and its weights
double soft_min(const std::vector<double>& f, double t, RVector* w) {
  const double m = *std::min_element(f.begin(), f.end());
  RVector e(static_cast<Eigen::Index>(f.size()));
  for (size_t i = 0; i < f.size(); ++i) e(static_cast<Eigen::Index>(i)) = std::exp(-(f[i] - m) / t);
  const double s = e.sum();
  if (w) *w = e / s;
  return m - t * std::log(s);
}

CMatrix combine(const std::vector<CMatrix>& g, const RVector& w) {
  CMatrix out = CMatrix::Zero(g[0].rows(), g[0].cols());
  for (size_t i = 0; i < g.size(); ++i) out += w(static_cast<Eigen::Index>(i)) * g[i];
  return out;
}

struct TopEig {
  double value;
  CVector vec;
};

TopEig top_eig(const CMatrix& g) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitian_part(g));
  const Eigen::Index k = es.eigenvalues().size() - 1;
  return {es.eigenvalues()(k), es.eigenvectors().col(k)};
}

double inner(const CMatrix& a, const CMatrix& b) { return (a.adjoint() * b).trace().real(); }

// Golden-section maximization of a concave phi on [0, hi].
template <typename F>
double line_search(F&& phi, double hi) {
  const double r = 0.5 * (std::sqrt(5.0) - 1);
  double a = 0, b = hi;
  double x1 = b - r * (b - a), x2 = a + r * (b - a);
  double f1 = phi(x1), f2 = phi(x2);
  for (int k = 0; k < 60 && b - a > 1e-12; ++k) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + r * (b - a);
      f2 = phi(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - r * (b - a);
      f1 = phi(x1);
    }
  }
  const double mid = 0.5 * (a + b);
  return phi(mid) >= phi(0) ? mid : 0.0;
}

// Upper bound on max_rho sum_i p_i f_i(rho) from concavity at rho.
double weighted_upper(const Eval& e, const CMatrix& rho, const RVector& p, CVector* v) {
  double lin = 0;
  for (size_t i = 0; i < e.f.size(); ++i)
    lin += p(static_cast<Eigen::Index>(i)) * (e.f[i] - inner(e.g[i], rho));
  const auto top = top_eig(combine(e.g, p));
  if (v) *v = top.vec;
  return lin + top.value;
}

// min over p in the simplex of weighted_upper, by projected subgradient from
// a few starting points
double certify(const Eval& e, const CMatrix& rho, std::vector<RVector> starts) {
  const int n = static_cast<int>(e.f.size());
  for (int i = 0; i < n; ++i) starts.push_back(RVector::Unit(n, i));
  double best = std::numeric_limits<double>::infinity();
  RVector best_p = starts[0];
  for (const auto& p0 : starts) {
    const double u = weighted_upper(e, rho, p0, nullptr);
    if (u < best) {
      best = u;
      best_p = p0;
    }
  }
  if (n == 1) return best;
  RVector p = best_p;
  for (int k = 0; k < 200; ++k) {
    CVector v;
    const double u = weighted_upper(e, rho, p, &v);
    if (u < best) {
      best = u;
      best_p = p;
    }
    RVector sub(n);
    for (int i = 0; i < n; ++i) sub(i) = e.f[i] - inner(e.g[i], rho) + (v.adjoint() * e.g[i] * v)(0, 0).real();
    const double nrm = sub.norm();
    if (nrm == 0) break;
    p = project_simplex(p - (0.05 / std::sqrt(k + 1.0)) * sub / nrm, 0.0);
  }
  return best;
}

CapacityResult finish(const std::vector<Member>& ms, const CMatrix& rho, std::vector<RVector> starts,
                      int iterations, double tol) {
  const Eval e = evaluate(ms, rho, true);
  const double low = *std::min_element(e.f.begin(), e.f.end());
  const double up = std::max(low, certify(e, rho, std::move(starts)));
  CapacityResult r;
  r.bits_per_use = 0.5 * low;
  r.gap = 0.5 * (up - low);
  r.optimizer = rho;
  r.iterations = iterations;
  r.status = r.gap <= tol ? "optimal" : "max-iter";
  const double band = std::max(1e-6, 2 * (up - low));
  for (size_t i = 0; i < e.f.size(); ++i)
    if (e.f[i] - low <= band) r.active_indices.push_back(static_cast<int>(i));
  return r;
}

// Frank-Wolfe on the soft-min at temperature t (t = 0 means the single member).
int frank_wolfe(const std::vector<Member>& ms, CMatrix& rho, double t, double tol, int budget) {
  double best_gap = std::numeric_limits<double>::infinity();
  int stall = 0, it = 0;
  for (; it < budget; ++it) {
    const Eval e = evaluate(ms, rho, true);
    RVector w = RVector::Ones(1);
    if (ms.size() > 1) soft_min(e.f, t, &w);
    const CMatrix g = combine(e.g, w);
    const auto top = top_eig(g);
    const double gap = top.value - inner(g, rho);
    if (gap < tol) break;
    if (gap < 0.99 * best_gap) {
      best_gap = gap;
      stall = 0;
    } else if (t > 0 && ++stall >= 5) {
      break;
    }
    const CMatrix s = top.vec * top.vec.adjoint();
    auto phi = [&](double gam) {
      const Eval eg = evaluate(ms, CMatrix((1 - gam) * rho + gam * s), false);
      return ms.size() > 1 ? soft_min(eg.f, t, nullptr) : eg.f[0];
    };
    const double gam = line_search(phi, 1 - 1e-9);
    if (gam == 0) break;
    rho = hermitian_part(CMatrix((1 - gam) * rho + gam * s));
  }
  return it;
}

std::vector<Member> members_of(const CompoundChannel& pi) {
  std::vector<Member> ms;
  for (const auto& c : pi.members()) ms.emplace_back(c);
  return ms;
}

void require_tol(double tol) {
  if (!(tol > 0)) throw std::invalid_argument("tolerance must be positive");
}

}  // namespace

double channel_mutual_info(const CMatrix& rho_a, const Channel& n) {
  require_input(rho_a, n);
  int rank = 0;
  const CVector psi = purify(rho_a, &rank);
  // |psi> on [A, A'], A' of dimension rank; apply N to A
  const CMatrix m = unvec(psi, n.d_in(), rank);
  CMatrix joint = CMatrix::Zero(n.d_out() * rank, n.d_out() * rank);
  for (const auto& k : n.kraus()) {
    const CVector v = vec(CMatrix(k * m));
    joint += v * v.adjoint();
  }
  return mutual_info(joint, n.d_out(), rank);
}

double channel_mutual_info_exchange(const CMatrix& rho_a, const Channel& n) {
  require_input(rho_a, n);
  return Member(n).value(rho_a, nullptr);
}

CMatrix channel_mutual_info_gradient(const CMatrix& rho_a, const Channel& n) {
  require_input(rho_a, n);
  CMatrix g;
  Member(n).value(rho_a, &g);
  return g;
}

CapacityResult qe_single(const Channel& n, double tol) {
  require_tol(tol);
  const std::vector<Member> ms{Member(n)};
  const int d = n.d_in();
  CMatrix rho = CMatrix::Identity(d, d) / double(d);
  const int it = frank_wolfe(ms, rho, 0, 2 * tol, 3000);
  return finish(ms, rho, {}, it, tol);
}

CapacityResult qe_compound(const CompoundChannel& pi, double tol) {
  require_tol(tol);
  const auto ms = members_of(pi);
  const int d = pi.d_in();
  CMatrix rho = CMatrix::Identity(d, d) / double(d);
  if (ms.size() == 1) {
    const int it = frank_wolfe(ms, rho, 0, 2 * tol, 3000);
    return finish(ms, rho, {}, it, tol);
  }
  int total = 0;
  for (double t = 1.0; t >= 1e-4 && total < 3000; t *= 0.5) total += frank_wolfe(ms, rho, t, tol, 3000 - total);

  // subgradient polish on min_i f_i
  CMatrix best = rho;
  Eval e = evaluate(ms, rho, true);
  double best_val = *std::min_element(e.f.begin(), e.f.end());
  for (int k = 0; k < 200; ++k) {
    const auto arg = std::min_element(e.f.begin(), e.f.end()) - e.f.begin();
    const CMatrix& g = e.g[arg];
    const double gn = g.norm();
    if (gn == 0) break;
    rho = project_to_density(CMatrix(rho + (0.02 / std::sqrt(k + 1.0)) * g / gn), kDensityFloor);
    e = evaluate(ms, rho, true);
    const double v = *std::min_element(e.f.begin(), e.f.end());
    if (v > best_val) {
      best_val = v;
      best = rho;
    }
  }
  total += 200;
  const Eval fe = evaluate(ms, best, false);
  std::vector<RVector> starts;
  for (double t : {1e-2, 1e-3, 1e-4, 1e-5, 1e-6}) {
    RVector w;
    soft_min(fe.f, t, &w);
    starts.push_back(w);
  }
  return finish(ms, best, std::move(starts), total, tol);
}

CapacityResult qe_informed_receiver(const CompoundChannel& pi, double tol) {
  CapacityResult r = qe_compound(pi, tol);
  r.note = "informed receiver: equal to the uninformed value";
  return r;
}

CapacityResult qe_informed_sender(const CompoundChannel& pi, double tol) {
  std::vector<CapacityResult> rs(pi.size());
  parallel_for(pi.size(), [&](int i) { rs[i] = qe_single(pi.member(i), tol); });
  int arg = 0;
  for (int i = 1; i < pi.size(); ++i)
    if (rs[i].bits_per_use < rs[arg].bits_per_use) arg = i;
  CapacityResult r = rs[arg];
  r.active_indices.clear();
  double worst_gap = 0;
  int iters = 0;
  for (int i = 0; i < pi.size(); ++i) {
    worst_gap = std::max(worst_gap, rs[i].gap);
    iters += rs[i].iterations;
    if (rs[i].status != "optimal") r.status = rs[i].status;
  }
  // the minimum of the certified intervals
  double up = std::numeric_limits<double>::infinity();
  for (const auto& x : rs) up = std::min(up, x.bits_per_use + x.gap);
  r.gap = up - r.bits_per_use;
  for (int i = 0; i < pi.size(); ++i)
    if (rs[i].bits_per_use <= r.bits_per_use + std::max(1e-6, 2 * worst_gap)) r.active_indices.push_back(i);
  r.iterations = iters;
  r.note = "optimizer is the input state of the weakest member";
  return r;
}

CapacityResult qe_feedback(const CompoundChannel& pi, double tol) {
  CapacityResult r = qe_informed_sender(pi, tol);
  r.note = "feedback: equal to the informed-sender value for finite index sets";
  return r;
}

Variant variant_from_string(const std::string& s) {
  if (s == "uninformed") return Variant::Uninformed;
  if (s == "informed-receiver") return Variant::InformedReceiver;
  if (s == "informed-sender") return Variant::InformedSender;
  if (s == "feedback") return Variant::Feedback;
  throw std::invalid_argument("unknown capacity variant '" + s + "'");
}

std::string variant_name(Variant v) {
  switch (v) {
    case Variant::Uninformed: return "uninformed";
    case Variant::InformedReceiver: return "informed-receiver";
    case Variant::InformedSender: return "informed-sender";
    case Variant::Feedback: return "feedback";
  }
  return "";
}

CapacityResult qe(Variant v, const CompoundChannel& pi, double tol) {
  switch (v) {
    case Variant::Uninformed: return qe_compound(pi, tol);
    case Variant::InformedReceiver: return qe_informed_receiver(pi, tol);
    case Variant::InformedSender: return qe_informed_sender(pi, tol);
    case Variant::Feedback: return qe_feedback(pi, tol);
  }
  throw std::invalid_argument("unknown capacity variant");
}

double classical_capacity(Variant v, const CompoundChannel& pi, double tol) {
  return 2 * qe(v, pi, tol).bits_per_use;
}

double converse_bound_from(double max_mutual_info, int uses, double delta) {
  if (!(delta > 0 && delta < 1)) throw std::invalid_argument("delta must lie in (0, 1)");
  if (uses < 1) throw std::invalid_argument("n must be positive");
  return (max_mutual_info + binary_entropy(delta) / uses) / (1 - delta);
}

double converse_bound(const Channel& n, int uses, double delta, double tol) {
  const auto r = qe_single(n, tol);
  // upper end of the certified interval keeps the bound valid
  return converse_bound_from(2 * (r.bits_per_use + r.gap), uses, delta);
}

double continuity_rate_from(double qe_bits, int d_a, double eps) {
  if (!(eps >= 0)) throw std::invalid_argument("eps must be nonnegative");
  if (d_a < 1) throw std::invalid_argument("d_A must be positive");
  return qe_bits - eps * std::log2(double(d_a)) + (1 + eps / 2) * binary_entropy(eps / (2 + eps));
}

double continuity_rate(const Channel& n, double eps, double tol) {
  return continuity_rate_from(qe_single(n, tol).bits_per_use, n.d_in(), eps);
}

}  // namespace compoundcap
