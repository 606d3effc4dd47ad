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


// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on failure.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <sstream>
#include <string>

#include "../tools/cli.hpp"
#include "compoundcap/capacity.hpp"
#include "compoundcap/codes.hpp"
#include "compoundcap/entropy.hpp"
#include "compoundcap/parallel.hpp"
#include "compoundcap/random.hpp"
#include "compoundcap/sdp.hpp"
#include "support.hpp"

namespace compoundcap {
namespace {

using testing::data_path;
using testing::kraus_channel;
using testing::oracles;
using testing::phi_vector;

struct Outcome {
  bool pass = true;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

template <typename... Args>
std::string fmt(const char* f, Args... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// ---- 1. entropy core ----------------------------------------------------------

struct Complement {
  CMatrix rho_ac;
  int dc;
};

// rho_AC from a purification of rho_AB whose C factor is rotated by a random isometry.
Complement rotated_complement(const CMatrix& rho, int da, int db, std::mt19937_64& rng) {
  int rank = 0;
  const CVector psi = purify(rho, &rank);
  const int dc = rank + 1;
  const CMatrix v = haar_unitary(dc, rng).leftCols(rank);
  const CVector rot = kron(CMatrix::Identity(da * db, da * db), v) * psi;
  return {partial_trace(CMatrix(rot * rot.adjoint()), {da, db, dc}, {0, 2}), dc};
}

Outcome criterion1() {
  const auto t0 = Clock::now();
  const std::vector<std::pair<int, int>> dims{{2, 2}, {2, 3}, {3, 2}, {2, 4}, {4, 2}, {3, 3}, {3, 4}, {4, 3}, {4, 4}};
  std::mt19937_64 rng(20260101);
  const double tol = 1e-5, eps = 0.1;
  int fail_fvdg = 0, fail_order = 0, fail_dual = 0, fail_mix = 0, states = 0, smooth_checks = 0;
  double worst_dual = 0;
  for (int p = 0; p < 100; ++p) {
    const auto [da, db] = dims[p % dims.size()];
    const int d = da * db;
    std::uniform_int_distribution<int> rk(1, d >= 12 ? 4 : d);
    const CMatrix r1 = random_density(d, rng, rk(rng)).matrix();
    const CMatrix r2 = random_density(d, rng, rk(rng)).matrix();
    const double w = std::uniform_real_distribution<double>(0, 1)(rng);
    const CMatrix mix = w * r1 + (1 - w) * r2;
    states += 2;

    const double f = fidelity(r1, r2), t = trace_norm(CMatrix(r1 - r2));
    if ((1 - t / 2) * (1 - t / 2) > f + tol || f > 1 - t * t / 4 + tol) ++fail_fvdg;

    double hmin[2], hmax[2];
    const CMatrix* pair[2] = {&r1, &r2};
    for (int k = 0; k < 2; ++k) {
      const CMatrix& r = *pair[k];
      hmin[k] = h_min(r, da, db).bits;
      hmax[k] = h_max(r, da, db).bits;
      const double h = cond_entropy(r, da, db);
      if (hmin[k] > h + tol || h > hmax[k] + tol) ++fail_order;
      const Complement c = rotated_complement(r, da, db, rng);
      const double dual = -h_min(c.rho_ac, da, c.dc).bits;
      const double fid = h_max_fidelity_form(r, da, db).bits;
      const double gap = std::max(std::abs(dual - hmax[k]), std::abs(fid - hmax[k]));
      worst_dual = std::max(worst_dual, gap);
      if (gap > tol) ++fail_dual;
    }
    const double mix_min = h_min(mix, da, db).bits, mix_max = h_max(mix, da, db).bits;
    if (mix_min < std::min(hmin[0], hmin[1]) - tol) ++fail_mix;
    if (mix_max > std::max(hmax[0], hmax[1]) + 2 * std::log2(2.0) + tol) ++fail_mix;

    if (p % 10 == 0) {
      // smoothed duality and mixture bounds on a subset
      ++smooth_checks;
      const Complement c = rotated_complement(r1, da, db, rng);
      const double gap = std::abs(smooth_h_max(r1, da, db, eps).bits + smooth_h_min(c.rho_ac, da, c.dc, eps).bits);
      worst_dual = std::max(worst_dual, gap);
      if (gap > tol) ++fail_dual;
      const double s1 = smooth_h_min(r1, da, db, eps).bits, s2 = smooth_h_min(r2, da, db, eps).bits;
      if (smooth_h_min(mix, da, db, eps).bits < std::min(s1, s2) - tol) ++fail_mix;
      const double m1 = smooth_h_max(r1, da, db, eps).bits, m2 = smooth_h_max(r2, da, db, eps).bits;
      if (smooth_h_max(mix, da, db, eps).bits > std::max(m1, m2) + 2 + tol) ++fail_mix;
    }
  }
  const double secs = seconds_since(t0);
  Outcome o;
  o.pass = fail_fvdg == 0 && fail_order == 0 && fail_dual == 0 && fail_mix == 0 && secs < 120;
  o.detail = fmt("%d states (%d smoothed); failures fvdg=%d order=%d duality=%d mixture=%d; worst duality gap %.1e; %.1fs",
                 states, smooth_checks, fail_fvdg, fail_order, fail_dual, fail_mix, worst_dual, secs);
  return o;
}

// ---- 2. SDP certification ------------------------------------------------------

// max <rho, X> s.t. tr_A X = 1_B, written as a minimization.
sdp::Problem hmin_problem(const CMatrix& rho, int da, int db) {
  sdp::Problem p;
  const int b = p.add_block(da * db, "X");
  p.set_objective(b, -rho);
  std::vector<sdp::Congruence> parts;
  for (int a = 0; a < da; ++a)
    parts.push_back({1.0, kron(CMatrix(CMatrix::Identity(da, da).row(a)), CMatrix(CMatrix::Identity(db, db)))});
  p.add_constraint(b, parts, CMatrix::Identity(db, db), sdp::Sense::Equal, "trA");
  return p;
}

// max tr(J W) s.t. R (x) 1 +- W >= 0, tr R = 1 with P = R(x)1 - W, Q = R(x)1 + W.
sdp::Problem diamond_problem(const CMatrix& j, int din, int dout) {
  sdp::Problem p;
  const int d = din * dout;
  const int bp = p.add_block(d, "P"), bq = p.add_block(d, "Q"), br = p.add_block(din, "R");
  p.set_objective(bp, j / 2.0);
  p.set_objective(bq, -j / 2.0);
  p.set_objective(br, CMatrix::Zero(din, din));
  sdp::Constraint link;
  link.terms.push_back({bp, {{1.0, CMatrix::Identity(d, d)}}});
  link.terms.push_back({bq, {{1.0, CMatrix::Identity(d, d)}}});
  sdp::Term r{br, {}};
  for (int k = 0; k < dout; ++k)
    r.parts.push_back({-2.0, kron(CMatrix(CMatrix::Identity(din, din)), CMatrix(CMatrix::Identity(dout, dout).col(k)))});
  link.terms.push_back(r);
  link.rhs = CMatrix::Zero(d, d);
  link.label = "link";
  p.add_constraint(link);
  std::vector<sdp::Congruence> tr;
  for (int i = 0; i < din; ++i) tr.push_back({1.0, CMatrix::Identity(din, din).row(i)});
  p.add_constraint(br, tr, CMatrix::Identity(1, 1), sdp::Sense::Equal, "trR");
  return p;
}

sdp::Problem random_problem(std::mt19937_64& rng, int kind) {
  std::uniform_int_distribution<int> dd(2, 5);
  sdp::Problem p;
  const int d = dd(rng);
  const CMatrix g = ginibre(d, d, rng);
  const CMatrix c = g * g.adjoint() + 0.1 * CMatrix::Identity(d, d);
  const int b = p.add_block(d);
  p.set_objective(b, c);
  const CMatrix x0 = random_density(d, rng).matrix();
  std::vector<sdp::Congruence> tr;
  for (int i = 0; i < d; ++i) tr.push_back({1.0, CMatrix::Identity(d, d).row(i)});
  p.add_constraint(b, tr, CMatrix::Identity(1, 1));
  for (int k = 0; k < 2; ++k) {
    const CMatrix v1 = ginibre(1, d, rng), v2 = ginibre(1, d, rng);
    const CMatrix rhs = v1 * x0 * v1.adjoint() - 0.5 * v2 * x0 * v2.adjoint();
    p.add_constraint(b, {{1.0, v1}, {-0.5, v2}}, rhs);
  }
  if (kind == 1) {
    // operator upper bound that x0 satisfies with slack
    const CMatrix h = ginibre(2, d, rng);
    const CMatrix y = h * x0 * h.adjoint();
    p.add_constraint(b, {{1.0, h}}, CMatrix(y + 0.5 * CMatrix::Identity(2, 2)), sdp::Sense::LessEqual);
  } else if (kind == 2) {
    // second block coupled through its trace
    const int b2 = p.add_block(2);
    p.set_objective(b2, CMatrix::Identity(2, 2));
    sdp::Constraint link;
    link.terms.push_back({b, {{1.0, CMatrix::Identity(d, d).row(0)}}});
    link.terms.push_back({b2, {{1.0, CMatrix::Identity(2, 2).row(0)}, {1.0, CMatrix::Identity(2, 2).row(1)}}});
    link.rhs = CMatrix::Constant(1, 1, x0(0, 0) + 0.3);
    p.add_constraint(link);
  }
  return p;
}

Outcome criterion2() {
  const double tol = 1e-7;
  int solved = 0, optimal = 0, bad = 0, mismatched = 0;
  double worst = 0;
  auto check = [&](const sdp::Problem& p, std::optional<double> expect, double scale) {
    ++solved;
    const sdp::Solution s = sdp::solve(p, 1e-8);
    if (s.status != sdp::Status::Optimal) return;
    ++optimal;
    const sdp::Verification v = sdp::verify(p, s, tol);
    worst = std::max({worst, v.gap, v.primal_residual, v.dual_residual});
    if (!v.ok || v.gap > tol || v.primal_residual > tol || v.dual_residual > tol) ++bad;
    if (expect && std::abs(scale * s.primal_objective - *expect) > 1e-6) ++mismatched;
  };
  for (const auto& s : oracles()["states"]) {
    const CMatrix rho = matrix_from_json(s["matrix"], "matrix");
    const int da = s["dims"][0], db = s["dims"][1];
    check(hmin_problem(rho, da, db), std::pow(2.0, -s["h_min"].get<double>()), -1.0);
  }
  for (const auto& c : oracles()["diamond"]) {
    const Channel a = kraus_channel(c["a"]), b = kraus_channel(c["b"]);
    check(diamond_problem(CMatrix(choi_matrix(a) - choi_matrix(b)), a.d_in(), a.d_out()), c["value"].get<double>(), -1.0);
  }
  std::mt19937_64 rng(77);
  for (int k = 0; k < 10; ++k) {
    const CMatrix rho = random_density(6, rng).matrix();
    check(hmin_problem(rho, 2, 3), std::nullopt, 1.0);
  }
  for (int k = 0; k < 30; ++k) check(random_problem(rng, k % 3), std::nullopt, 1.0);
  Outcome o;
  o.pass = optimal > 0 && bad == 0 && mismatched == 0;
  o.detail = fmt("%d solves, %d optimal, %d over tolerance, %d off-oracle; worst residual/gap %.1e", solved, optimal,
                 bad, mismatched, worst);
  return o;
}

// ---- 3. capacity ---------------------------------------------------------------

double grid_qe(const Channel& n) {
  double best = 0;
  for (int it = 0; it <= 12; ++it)
    for (int ip = 0; ip < 12; ++ip)
      for (int ir = 0; ir <= 10; ++ir) {
        const double th = M_PI * it / 12, ph = 2 * M_PI * ip / 12, r = 0.999 * ir / 10;
        const double x = r * std::sin(th) * std::cos(ph), y = r * std::sin(th) * std::sin(ph), z = r * std::cos(th);
        CMatrix rho(2, 2);
        rho << Complex(1 + z, 0) / 2.0, Complex(x, -y) / 2.0, Complex(x, y) / 2.0, Complex(1 - z, 0) / 2.0;
        best = std::max(best, 0.5 * channel_mutual_info(rho, n));
      }
  return best;
}

Outcome criterion3() {
  const auto t0 = Clock::now();
  std::vector<std::string> fails;
  const double id = qe_single(identity_channel(2)).bits_per_use;
  if (std::abs(id - 1) > 1e-4) fails.push_back(fmt("identity %.6f", id));
  const double full = qe_single(depolarizing(2, 1.0)).bits_per_use;
  if (full > 1e-4) fails.push_back(fmt("fully depolarizing %.2e", full));
  const Channel dep = depolarizing(2, 0.25);
  const double dq = qe_single(dep).bits_per_use, dg = grid_qe(dep);
  if (std::abs(dq - dg) > 1e-3) fails.push_back(fmt("depolarizing %.6f vs grid %.6f", dq, dg));

  std::mt19937_64 rng(31);
  int compound_fail = 0;
  for (int k = 0; k < 10; ++k) {
    std::vector<Channel> members;
    const int size = 2 + k % 2;
    for (int i = 0; i < size; ++i) members.push_back(random_channel(2, 2, 2, rng));
    const CompoundChannel pi(members);
    const double c = qe_compound(pi).bits_per_use;
    double lo = 1e9;
    for (const auto& m : members) lo = std::min(lo, qe_single(m).bits_per_use);
    if (c > lo + 1e-5) ++compound_fail;
  }
  if (compound_fail) fails.push_back(std::to_string(compound_fail) + " compounds above min member");

  double worst_rel = 0;
  for (int k = 0; k < 5; ++k) {
    const int d = 2 + k % 2;
    const Channel n = random_channel(d, d, 2, rng);
    const CMatrix rho = random_density(d, rng).matrix();
    const CMatrix g = channel_mutual_info_gradient(rho, n);
    RVector fd(4), an(4);
    for (int q = 0; q < 4; ++q) {
      const CMatrix dir = random_density(d, rng).matrix() - rho;
      const double h = 1e-5;
      fd(q) = (channel_mutual_info(CMatrix(rho + h * dir), n) - channel_mutual_info(CMatrix(rho - h * dir), n)) / (2 * h);
      an(q) = (g * dir).trace().real();
    }
    worst_rel = std::max(worst_rel, (fd - an).norm() / std::max(fd.norm(), 1e-12));
  }
  if (worst_rel > 1e-4) fails.push_back(fmt("gradient relative error %.2e", worst_rel));

  const double secs = seconds_since(t0);
  if (secs > 300) fails.push_back(fmt("runtime %.0fs", secs));
  Outcome o;
  o.pass = fails.empty();
  o.detail = fmt("identity %.6f, depolarizing(1) %.1e, depolarizing(0.25) %.6f vs grid %.6f, gradient rel err %.1e, %.1fs",
                 id, full, dq, dg, worst_rel, secs);
  for (const auto& f : fails) o.detail += "; " + f;
  return o;
}

// ---- 4. decoupling -------------------------------------------------------------

Outcome criterion4() {
  std::mt19937_64 rng(5);
  Outcome o;
  for (int da : {2, 4})
    for (int n : {1, 2}) {
      std::vector<Channel> ch;
      std::vector<CVector> rho;
      std::vector<int> m1;
      for (int i = 0; i < n; ++i) {
        ch.push_back(i == 0 ? depolarizing(da, 0.3) : random_channel(da, da, 2, rng));
        rho.push_back(i == 0 ? phi_vector(da) : random_pure(da * da, rng).vector());
        m1.push_back(i == 0 ? 1 : da / 2);
      }
      const auto r = mc_decoupling_L5(CompoundChannel(ch), rho, da == 2 ? 1 : 2, m1, 200, 1000 + 10 * da + n);
      o.pass = o.pass && r.pass;
      o.detail += fmt("%sd_A=%d N=%d mean %.3f+-%.3f bound %.3f", o.detail.empty() ? "" : "; ", da, n,
                      r.empirical_mean_deviation, r.std_error, r.bound_value);
    }
  return o;
}

// ---- 5. one-shot codes ---------------------------------------------------------

Outcome criterion5() {
  const auto t0 = Clock::now();
  struct Case {
    std::string name;
    CompoundChannel pi;
    bool identity_dominated;
  };
  const std::vector<Case> cases{
      {"{id,id}", CompoundChannel({identity_channel(2), identity_channel(2)}), true},
      {"{id,dephasing(0)}", CompoundChannel({identity_channel(2), dephasing(0.0)}), true},
      {"{id,depolarizing(0.002)}", CompoundChannel({identity_channel(2), depolarizing(2, 0.002)}), true},
      {"{dephasing(1/2),depolarizing(1/2)}", CompoundChannel({dephasing(0.5), depolarizing(2, 0.5)}), false},
  };
  int runs = 0, low = 0, violations = 0, nontrivial = 0;
  double worst = 1;
  for (const auto& c : cases)
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
      const std::vector<CVector> rho(2, phi_vector(2));
      const OneShotReport reps[2] = {run_one_shot_uninformed(c.pi, phi_vector(2), 2, 1, seed),
                                     run_one_shot_is(c.pi, rho, 2, {1, 1}, seed)};
      for (const auto& r : reps) {
        ++runs;
        if (r.bound.nontrivial()) ++nontrivial;
        if (!r.bound_respected) ++violations;
        if (c.identity_dominated) {
          worst = std::min(worst, r.min_fidelity);
          if (r.min_fidelity < 0.99) ++low;
        }
      }
    }
  Outcome o;
  o.pass = low == 0 && violations == 0;
  o.detail = fmt("%d runs over 20 seeds; worst identity-dominated fidelity %.6f; %d below 0.99; %d bound violations; "
                 "%d nontrivial bounds; %.1fs",
                 runs, worst, low, violations, nontrivial, seconds_since(t0));
  return o;
}

// ---- 6. encoder normalization --------------------------------------------------

Outcome criterion6() {
  int ok = 0, trials = 0;
  double ratio_sum = 0, attempts = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    auto rng = SeedStream(seed).child(99).engine();
    // half the trials use d_A = 8 with three branches
    const bool big = seed % 2 == 1;
    const int da = big ? 8 : 4, m0 = 2;
    const std::vector<int> m1i = big ? std::vector<int>{1, 2, 4} : std::vector<int>{1, 2};
    std::vector<CVector> rho;
    for (size_t i = 0; i < m1i.size(); ++i) rho.push_back(random_pure(da * da, rng).vector());
    std::vector<double> ex;
    for (size_t i = 0; i < m1i.size(); ++i) {
      // H_min(A) of a state with trivial conditioning system is -log lambda_max
      const CMatrix rho_a = partial_trace(testing::projector(rho[i]), {da, da}, {0});
      ex.push_back(lemma7_expectation(-std::log2(hermitian_eigenvalues(rho_a).maxCoeff()), m0, m1i[i], 0.0));
    }
    const int n = static_cast<int>(m1i.size());
    const auto sel = select_encoders(make_is_spec(da, m0, m1i, rho), ex, n + 2, 50, 5000 + seed);
    ++trials;
    if (sel.ok) ++ok;
    attempts += sel.attempts;
    for (size_t i = 0; i < m1i.size(); ++i) ratio_sum += sel.deviation[i] / ex[i] / n;
  }
  Outcome o;
  o.pass = ok >= 95 * trials / 100;
  o.detail = fmt("%d/%d trials within (N+2) x expectation; mean draws %.2f; mean deviation/expectation %.3f", ok, trials,
                 attempts / trials, ratio_sum / trials);
  return o;
}

// ---- 7. estimation and feedback ------------------------------------------------

Outcome criterion7() {
  Outcome o;
  const CompoundChannel pi({dephasing(0.5), depolarizing(2, 0.5)});
  const CMatrix om = testing::projector(phi_vector(2));
  double prev_exact = -1, prev_emp = -1, prev_se = 0;
  for (int m = 1; m <= 3; ++m) {
    const auto r = estimate_channel_pgm(pi, m, om, 2, 10000, 40 + m);
    const double exact = 0.5 * (r.exact_success[0] + r.exact_success[1]);
    const double emp = 0.5 * (r.empirical_success[0] + r.empirical_success[1]);
    const double se = 0.5 * std::hypot(r.std_error[0], r.std_error[1]);
    if (!(exact > prev_exact)) o.pass = false;
    if (emp < prev_emp - 3 * std::hypot(se, prev_se)) o.pass = false;
    if (std::abs(emp - exact) > 3 * se) o.pass = false;
    o.detail += fmt("%sm=%d exact %.4f empirical %.4f+-%.4f", m == 1 ? "" : "; ", m, exact, emp, se);
    prev_exact = exact;
    prev_emp = emp;
    prev_se = se;
  }
  struct Fb {
    std::string name;
    CompoundChannel pi;
    int n;
  };
  const std::vector<Fb> runs{
      {"N=1", CompoundChannel({dephasing(0.1)}), 4},
      {"distinguishable", CompoundChannel({identity_channel(2), unitary_channel(testing::pauli_x())}), 4},
      {"qubit pair n=12", CompoundChannel({dephasing(0.1), depolarizing(2, 0.1)}), 12},
      {"noisy pair n=9", CompoundChannel({dephasing(0.5), depolarizing(2, 0.5)}), 9},
  };
  for (const auto& f : runs) {
    const auto tr = feedback_protocol_sim(f.pi, f.n, 2, {1}, 17, 10000);
    const bool ok = tr.total_fidelity >= tr.product_lower - 1e-9 && tr.total_fidelity <= 1 + 1e-9;
    o.pass = o.pass && ok;
    o.detail += fmt("; %s total %.4f >= %.4f", f.name.c_str(), tr.total_fidelity, tr.product_lower);
  }
  return o;
}

// ---- 8. plain-capacity experiment ----------------------------------------------

Outcome criterion8() {
  Outcome o;
  const double id = plain_is_experiment(CompoundChannel({identity_channel(2)}), {phi_vector(2)}, 2, 3).min_fidelity;
  double worst = 0;
  for (const Channel& n : {dephasing(0.1), depolarizing(2, 0.2), amplitude_damping(0.3)}) {
    for (std::uint64_t seed : {3, 4}) {
      const auto dup = plain_is_experiment(CompoundChannel({n, n}), {phi_vector(2), phi_vector(2)}, 2, seed);
      const auto one = plain_is_experiment(CompoundChannel({n}), {phi_vector(2)}, 2, seed);
      worst = std::max({worst, std::abs(dup.fidelities[0] - dup.fidelities[1]),
                        std::abs(dup.fidelities[0] - one.fidelities[0])});
    }
  }
  o.pass = id >= 0.99 && worst <= 1e-9;
  o.detail = fmt("identity fidelity %.9f; duplicate-branch spread %.1e", id, worst);
  return o;
}

// ---- 9. closed forms -----------------------------------------------------------

Outcome criterion9() {
  Outcome o;
  int cases = 0, bad = 0;
  auto eq = [&](const char* what, double got, double want) {
    ++cases;
    if (std::abs(got - want) > 1e-12 * std::max(1.0, std::abs(want))) {
      ++bad;
      o.detail += fmt("%s: %.15g vs %.15g; ", what, got, want);
    }
  };
  eq("net(1,4)", net_cardinality_bound(1.0, 4), 82.718800023077);
  eq("net(0.5,2)", net_cardinality_bound(0.5, 2), 28.67970000576925);
  eq("net(2,3)", net_cardinality_bound(2.0, 3), 28.52932501298081);
  eq("net_at(10,4) 6n^2", net_cardinality_bound_at(10, 4).log2_six_n2, 295.3221980958682);
  eq("net_at(10,4) 3n", net_cardinality_bound_at(10, 4).log2_three_n, 314.0409981189452);
  eq("continuity(1,2,0.1)", continuity_rate_from(1.0, 2, 0.1), 1.190005199030336);
  eq("continuity(0.5,4,0.05)", continuity_rate_from(0.5, 4, 0.05), 0.5695627098461735);
  eq("continuity(0.8,2,2)", continuity_rate_from(0.8, 2, 2.0), 0.8);
  eq("converse(2,10,0.1)", converse_bound_from(2.0, 10, 0.1), 2.2743328437321426);
  eq("converse(1.5,100,0.01)", converse_bound_from(1.5, 100, 0.01), 1.515967607433292);
  eq("converse(0.7,1,0.5)", converse_bound_from(0.7, 1, 0.5), 3.4);
  eq("union(0.99,5)", union_bound_transfer(0.99, 5), 0.95);
  eq("union(1,7)", union_bound_transfer(1.0, 7), 1.0);
  eq("union(0.9,20)", union_bound_transfer(0.9, 20), 0.0);
  eq("aep(0.5,2,100)", aep_delta(0.5, 2, 100).value, 13.418210045408081);
  eq("aep(0.1,4,1000)", aep_delta(0.1, 4, 1000).value, 25.678225690617275);
  eq("aep(0.01,3,10)", aep_delta(0.01, 3, 10).value, 32.63376712401899);
  ++cases;
  if (!aep_delta(0.5, 2, 100).valid || aep_delta(0.01, 3, 10).valid) ++bad;
  const auto s1 = superdense_convert(4, 2, 0.1), s2 = superdense_convert(1, 5, 0.0), s3 = superdense_convert(3, 7, 0.2);
  eq("superdense(4,2).m0", double(s1.m0), 16);
  eq("superdense(4,2).m1", double(s1.m1), 8);
  eq("superdense(1,5).m0", double(s2.m0), 1);
  eq("superdense(1,5).m1", double(s2.m1), 5);
  eq("superdense(3,7).m0", double(s3.m0), 9);
  eq("superdense(3,7).m1", double(s3.m1), 21);
  const auto t1 = teleport_convert({16, 8, 0.1}), t2 = teleport_convert({1, 3, 0}), t3 = teleport_convert({10, 2, 0});
  eq("teleport(16,8).m0", double(t1.m0), 4);
  eq("teleport(16,8).m1", double(t1.m1), 128);
  eq("teleport(1,3).m0", double(t2.m0), 1);
  eq("teleport(1,3).m1", double(t2.m1), 3);
  eq("teleport(10,2).m0", double(t3.m0), 3);
  eq("teleport(10,2).m1", double(t3.m1), 20);
  ++cases;
  if (t1.flagged || !t3.flagged) ++bad;
  o.pass = bad == 0;
  o.detail = fmt("%d/%d pinned values exact", cases - bad, cases) + (o.detail.empty() ? "" : "; " + o.detail);
  return o;
}

// ---- 10. determinism -----------------------------------------------------------

std::string run_cli(std::vector<std::string> args, int* code) {
  args.insert(args.begin(), "compoundcap");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  *code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return out.str() + err.str();
}

Outcome criterion10() {
  const std::string ch = data_path("identity_qubit.json"), pair = data_path("compound_pair.json"),
                    near = data_path("compound_near_identity.json");
  const std::vector<std::vector<std::string>> commands{
      {"decouple", "--compound", pair, "--m0", "1", "--m1", "2,1", "--samples", "40", "--seed", "7"},
      {"decouple", "--channel", ch, "--m0", "1", "--m1", "2", "--samples", "40", "--seed", "7", "--format", "csv"},
      {"oneshot", "--compound", near, "--m0", "2", "--m1", "1", "--mode", "is", "--seed", "3"},
      {"oneshot", "--compound", near, "--m0", "2", "--m1", "1", "--mode", "uninformed", "--seed", "3"},
      {"oneshot", "--compound", pair, "--m0", "2", "--mode", "plain", "--seed", "3"},
      {"feedback", "--compound", pair, "--n", "12", "--m0", "2", "--m1", "1", "--samples", "2000", "--seed", "5"},
  };
  Outcome o;
  int identical = 0;
  for (const auto& args : commands) {
    int c1 = 0, c2 = 0, c3 = 0;
    setenv("COMPOUNDCAP_THREADS", "1", 1);
    const std::string a = run_cli(args, &c1), b = run_cli(args, &c2);
    setenv("COMPOUNDCAP_THREADS", "3", 1);
    const std::string c = run_cli(args, &c3);
    const bool same = c1 == 0 && c2 == 0 && c3 == 0 && a == b && a == c;
    if (same) ++identical;
    else o.detail += args[0] + " differs or failed (exit " + std::to_string(c1) + "); ";
    o.pass = o.pass && same;
  }
  unsetenv("COMPOUNDCAP_THREADS");
  o.detail = fmt("%d/%d seeded commands byte-identical across repeats and thread counts", identical,
                 int(commands.size())) + (o.detail.empty() ? "" : "; " + o.detail);
  return o;
}

}  // namespace
}  // namespace compoundcap

int main(int argc, char** argv) {
  using namespace compoundcap;
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"entropy core", criterion1},
      {"SDP certification", criterion2},
      {"capacity solver", criterion3},
      {"decoupling compliance", criterion4},
      {"one-shot codes", criterion5},
      {"encoder normalization", criterion6},
      {"estimation and feedback", criterion7},
      {"plain-capacity experiment", criterion8},
      {"formula evaluators", criterion9},
      {"determinism", criterion10},
  };
  // optional argument: run a single criterion by number
  const int only = argc > 1 ? std::atoi(argv[1]) : 0;
  int failed = 0;
  for (size_t k = 0; k < criteria.size(); ++k) {
    if (only && only != int(k + 1)) continue;
    Outcome o;
    try {
      o = criteria[k].second();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    if (!o.pass) ++failed;
    std::printf("%s criterion %zu (%s): %s\n", o.pass ? "PASS" : "FAIL", k + 1, criteria[k].first, o.detail.c_str());
    std::fflush(stdout);
  }
  return failed ? 1 : 0;
}
