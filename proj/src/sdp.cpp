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

#include "compoundcap/sdp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "json.hpp"

namespace compoundcap::sdp {

int Problem::add_block(int dim, std::string label) {
  if (dim < 1) throw std::invalid_argument("sdp block dimension must be positive");
  dims_.push_back(dim);
  labels_.push_back(std::move(label));
  c_.push_back(CMatrix::Zero(dim, dim));
  return static_cast<int>(dims_.size()) - 1;
}

void Problem::set_objective(int block, const CMatrix& c) {
  if (c.rows() != dims_.at(block) || c.cols() != dims_.at(block))
    throw std::invalid_argument("sdp objective has wrong size");
  c_[block] = hermitian_part(c);
}

void Problem::add_constraint(Constraint c) {
  if (c.rhs.rows() != c.rhs.cols() || c.rhs.rows() == 0)
    throw std::invalid_argument("sdp constraint rhs must be square");
  for (const auto& t : c.terms) {
    if (t.block < 0 || t.block >= num_blocks()) throw std::out_of_range("sdp term block");
    for (const auto& part : t.parts)
      if (part.op.rows() != c.rhs.rows() || part.op.cols() != dims_[t.block])
        throw std::invalid_argument("sdp congruence has wrong shape");
  }
  c.rhs = hermitian_part(c.rhs);
  cons_.push_back(std::move(c));
}

void Problem::add_constraint(int block, std::vector<Congruence> parts, const CMatrix& rhs,
                             Sense sense, std::string label) {
  Constraint c;
  c.terms.push_back(Term{block, std::move(parts)});
  c.rhs = rhs;
  c.sense = sense;
  c.label = std::move(label);
  add_constraint(std::move(c));
}

CMatrix Problem::apply(int k, const std::vector<CMatrix>& x) const {
  const auto& c = cons_.at(k);
  CMatrix out = CMatrix::Zero(c.rhs.rows(), c.rhs.cols());
  for (const auto& t : c.terms)
    for (const auto& part : t.parts) out += part.coeff * part.op * x.at(t.block) * part.op.adjoint();
  return out;
}

CMatrix Problem::apply_adjoint(int k, int b, const CMatrix& y) const {
  CMatrix out = CMatrix::Zero(dims_.at(b), dims_.at(b));
  for (const auto& t : cons_.at(k).terms) {
    if (t.block != b) continue;
    for (const auto& part : t.parts) out += part.coeff * part.op.adjoint() * y * part.op;
  }
  return out;
}

CMatrix selector(int block_dim, int offset, int size) {
  if (offset < 0 || size < 0 || offset + size > block_dim)
    throw std::out_of_range("selector exceeds block");
  CMatrix s = CMatrix::Zero(size, block_dim);
  for (int i = 0; i < size; ++i) s(i, offset + i) = 1.0;
  return s;
}

const char* status_name(Status s) {
  switch (s) {
    case Status::Optimal: return "optimal";
    case Status::Infeasible: return "infeasible";
    case Status::Unbounded: return "unbounded";
    case Status::MaxIter: return "max-iter";
  }
  return "unknown";
}

namespace {

struct Entry {
  int i, j;
  double v;
};

struct RowBlock {
  int block;
  std::vector<Entry> entries;
};

// Hermitian basis element: diag (p==q), symmetric or antisymmetric pair.
struct BasisIndex {
  int p, q, kind;  // kind 0: E_pp, 1: (E_pq+E_qp)/sqrt2, 2: i(E_pq-E_qp)/sqrt2
};

std::vector<BasisIndex> hermitian_basis(int r) {
  std::vector<BasisIndex> out;
  out.reserve(static_cast<size_t>(r) * r);
  for (int p = 0; p < r; ++p) {
    out.push_back({p, p, 0});
    for (int q = p + 1; q < r; ++q) {
      out.push_back({p, q, 1});
      out.push_back({p, q, 2});
    }
  }
  return out;
}

// Nonzero entries h_pq of a basis element.
std::vector<std::tuple<int, int, Complex>> basis_entries(const BasisIndex& e) {
  const double s = 1.0 / std::sqrt(2.0);
  if (e.kind == 0) return {{e.p, e.p, Complex(1, 0)}};
  if (e.kind == 1) return {{e.p, e.q, Complex(s, 0)}, {e.q, e.p, Complex(s, 0)}};
  return {{e.p, e.q, Complex(0, s)}, {e.q, e.p, Complex(0, -s)}};
}

CMatrix basis_matrix(const BasisIndex& e, int r) {
  CMatrix h = CMatrix::Zero(r, r);
  for (auto [p, q, v] : basis_entries(e)) h(p, q) = v;
  return h;
}

struct RealSdp {
  std::vector<int> n;  // real block sizes
  std::vector<RMatrix> c;
  std::vector<std::vector<RowBlock>> rows;
  RVector b;
  // bookkeeping back to the complex problem
  int user_blocks = 0;
  std::vector<int> con_offset;
  std::vector<std::vector<BasisIndex>> con_basis;
};

void push_embedded(const CMatrix& g, double scale, std::vector<Entry>& out, double cutoff) {
  const int m = static_cast<int>(g.rows());
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      const double a = g(i, j).real() * scale, bb = g(i, j).imag() * scale;
      if (std::abs(a) > cutoff) {
        out.push_back({i, j, a});
        out.push_back({i + m, j + m, a});
      }
      if (std::abs(bb) > cutoff) {
        out.push_back({i, j + m, -bb});
        out.push_back({i + m, j, bb});
      }
    }
}

RealSdp lower(const Problem& p) {
  RealSdp r;
  r.user_blocks = p.num_blocks();
  for (int b = 0; b < p.num_blocks(); ++b) {
    r.n.push_back(2 * p.block_dim(b));
    r.c.push_back(0.5 * real_embed<double>(p.objective(b)));
  }
  // slack blocks for <= constraints
  std::vector<int> slack_of(p.constraints().size(), -1);
  for (size_t k = 0; k < p.constraints().size(); ++k) {
    const auto& con = p.constraints()[k];
    if (con.sense == Sense::LessEqual) {
      slack_of[k] = static_cast<int>(r.n.size());
      const int d = static_cast<int>(con.rhs.rows());
      r.n.push_back(2 * d);
      r.c.push_back(RMatrix::Zero(2 * d, 2 * d));
    }
  }
  std::vector<double> rhs;
  for (size_t k = 0; k < p.constraints().size(); ++k) {
    const auto& con = p.constraints()[k];
    const int rdim = static_cast<int>(con.rhs.rows());
    r.con_offset.push_back(static_cast<int>(rhs.size()));
    r.con_basis.push_back(hermitian_basis(rdim));
    for (const auto& e : r.con_basis.back()) {
      std::vector<RowBlock> row;
      // group terms by block
      std::vector<int> blocks;
      for (const auto& t : con.terms)
        if (std::find(blocks.begin(), blocks.end(), t.block) == blocks.end()) blocks.push_back(t.block);
      const auto ent = basis_entries(e);
      for (int blk : blocks) {
        const int nb = p.block_dim(blk);
        CMatrix g = CMatrix::Zero(nb, nb);
        for (const auto& t : con.terms) {
          if (t.block != blk) continue;
          for (const auto& part : t.parts)
            for (auto [pp, qq, h] : ent)
              g.noalias() += (part.coeff * h) * part.op.row(pp).adjoint() * part.op.row(qq);
        }
        RowBlock rb{blk, {}};
        const double scale = std::max(1.0, g.cwiseAbs().maxCoeff());
        push_embedded(g, 0.5, rb.entries, 1e-15 * scale);
        if (!rb.entries.empty()) row.push_back(std::move(rb));
      }
      if (slack_of[k] >= 0) {
        RowBlock rb{slack_of[k], {}};
        push_embedded(basis_matrix(e, rdim), 0.5, rb.entries, 0.0);
        row.push_back(std::move(rb));
      }
      Complex bv(0, 0);
      for (auto [pp, qq, h] : ent) bv += h * con.rhs(qq, pp);
      rhs.push_back(bv.real());
      r.rows.push_back(std::move(row));
    }
  }
  r.b = Eigen::Map<RVector>(rhs.data(), static_cast<Eigen::Index>(rhs.size()));
  return r;
}

// ---- real standard form helpers -------------------------------------------

using Blocks = std::vector<RMatrix>;

double inner(const Blocks& a, const Blocks& b) {
  double s = 0;
  for (size_t i = 0; i < a.size(); ++i) s += (a[i].array() * b[i].array()).sum();
  return s;
}

double fro(const Blocks& a) { return std::sqrt(inner(a, a)); }

RVector op_a(const RealSdp& r, const Blocks& x) {
  RVector out = RVector::Zero(static_cast<Eigen::Index>(r.rows.size()));
  for (size_t a = 0; a < r.rows.size(); ++a) {
    double s = 0;
    for (const auto& rb : r.rows[a])
      for (const auto& e : rb.entries) s += e.v * x[rb.block](e.i, e.j);
    out(static_cast<Eigen::Index>(a)) = s;
  }
  return out;
}

Blocks op_at(const RealSdp& r, const RVector& y) {
  Blocks out;
  for (int nb : r.n) out.push_back(RMatrix::Zero(nb, nb));
  for (size_t a = 0; a < r.rows.size(); ++a) {
    const double ya = y(static_cast<Eigen::Index>(a));
    if (ya == 0) continue;
    for (const auto& rb : r.rows[a])
      for (const auto& e : rb.entries) out[rb.block](e.i, e.j) += ya * e.v;
  }
  return out;
}

Blocks sym(Blocks a) {
  for (auto& m : a) m = 0.5 * (m + m.transpose()).eval();
  return a;
}

// Largest alpha with x + alpha dx >= 0 (inf if unbounded).
double max_step(const RMatrix& x, const RMatrix& dx) {
  Eigen::LLT<RMatrix> llt(x);
  if (llt.info() != Eigen::Success) return 0.0;
  RMatrix l_inv_dx = llt.matrixL().solve(dx);
  RMatrix s = llt.matrixL().solve(l_inv_dx.transpose());
  s = 0.5 * (s + s.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<RMatrix> es(s, Eigen::EigenvaluesOnly);
  const double lmin = es.eigenvalues()(0);
  if (lmin >= 0) return std::numeric_limits<double>::infinity();
  return -1.0 / lmin;
}

double min_eig(const RMatrix& m) {
  Eigen::SelfAdjointEigenSolver<RMatrix> es(0.5 * (m + m.transpose()), Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

RMatrix psd_part(const RMatrix& m) {
  Eigen::SelfAdjointEigenSolver<RMatrix> es(0.5 * (m + m.transpose()));
  RVector w = es.eigenvalues().cwiseMax(0.0);
  return es.eigenvectors() * w.asDiagonal() * es.eigenvectors().transpose();
}

struct Iterate {
  Blocks x, z;
  RVector y;
};

struct Measures {
  double pinf, dinf, gap, pobj, dobj, mu;
};

Measures measure(const RealSdp& r, const Iterate& it, double bnorm, double cnorm) {
  Measures m{};
  const RVector rp = r.b - op_a(r, it.x);
  Blocks rd = op_at(r, it.y);
  for (size_t b = 0; b < rd.size(); ++b) rd[b] = r.c[b] - rd[b] - it.z[b];
  m.pobj = inner(r.c, it.x);
  m.dobj = r.b.dot(it.y);
  m.pinf = rp.norm() / (1 + bnorm);
  m.dinf = fro(rd) / (1 + cnorm);
  m.gap = std::abs(m.pobj - m.dobj) / (1 + std::abs(m.pobj) + std::abs(m.dobj));
  int ntot = 0;
  for (int nb : r.n) ntot += nb;
  m.mu = inner(it.x, it.z) / ntot;
  return m;
}

class Ipm {
 public:
  Ipm(const RealSdp& r) : r_(r) {
    rows_of_block_.resize(r.n.size());
    for (size_t a = 0; a < r.rows.size(); ++a)
      for (size_t q = 0; q < r.rows[a].size(); ++q)
        rows_of_block_[r.rows[a][q].block].push_back({static_cast<int>(a), static_cast<int>(q)});
  }

  // Schur complement M_ab = sum_blocks <A_a, X A_b Zinv>.
  RMatrix schur(const Blocks& x, const Blocks& zinv) const {
    const int m = static_cast<int>(r_.rows.size());
    RMatrix mm = RMatrix::Zero(m, m);
    for (size_t b = 0; b < r_.n.size(); ++b) {
      const auto& list = rows_of_block_[b];
      const int nb = r_.n[b];
      RMatrix g(nb, nb), dense(nb, nb);
      for (size_t jb = 0; jb < list.size(); ++jb) {
        const auto& ents = r_.rows[list[jb].first][list[jb].second].entries;
        if (static_cast<int>(ents.size()) < 2 * nb) {
          g.setZero();
          for (const auto& e : ents) g.noalias() += e.v * x[b].col(e.i) * zinv[b].row(e.j);
        } else {
          dense.setZero();
          for (const auto& e : ents) dense(e.i, e.j) += e.v;
          g.noalias() = x[b] * dense * zinv[b];
        }
        const int col = list[jb].first;
        for (size_t ib = jb; ib < list.size(); ++ib) {
          const auto& ei = r_.rows[list[ib].first][list[ib].second].entries;
          double s = 0;
          for (const auto& e : ei) s += e.v * g(e.i, e.j);
          mm(list[ib].first, col) += s;
          if (ib != jb) mm(col, list[ib].first) += s;
        }
      }
    }
    return 0.5 * (mm + mm.transpose());
  }

 private:
  const RealSdp& r_;
  std::vector<std::vector<std::pair<int, int>>> rows_of_block_;
};

struct RealResult {
  Iterate it;
  Status status = Status::MaxIter;
  int iterations = 0;
  bool fallback = false;
  bool ray_found = false;
  RVector ray;
};

void admm(const RealSdp& r, Iterate& it, int max_iter, double tol, double bnorm, double cnorm,
          RealResult& res) {
  const int m = static_cast<int>(r.rows.size());
  RMatrix aat = RMatrix::Zero(m, m);
  {
    Blocks eye;
    for (int nb : r.n) eye.push_back(RMatrix::Identity(nb, nb));
    Ipm helper(r);
    aat = helper.schur(eye, eye);
  }
  aat.diagonal().array() += 1e-14 * (1 + aat.diagonal().maxCoeff());
  Eigen::LDLT<RMatrix> fact(aat);
  double mu = 1.0;
  for (int k = 0; k < max_iter; ++k) {
    Blocks zc = it.z;
    for (size_t b = 0; b < zc.size(); ++b) zc[b] -= r.c[b];
    RVector rhs = -(mu * (op_a(r, it.x) - r.b) + op_a(r, zc));
    it.y = fact.solve(rhs);
    Blocks aty = op_at(r, it.y);
    for (size_t b = 0; b < r.n.size(); ++b) {
      RMatrix v = r.c[b] - aty[b] - mu * it.x[b];
      v = 0.5 * (v + v.transpose()).eval();
      it.z[b] = psd_part(v);
      it.x[b] = (it.z[b] - v) / mu;
    }
    if (k % 25 == 24 || k == max_iter - 1) {
      const auto ms = measure(r, it, bnorm, cnorm);
      res.iterations++;
      if (ms.pinf < tol && ms.dinf < tol && ms.gap < tol) {
        res.status = Status::Optimal;
        return;
      }
      if (ms.pinf > 5 * ms.dinf) mu = std::max(1e-6, mu / 1.5);
      else if (ms.dinf > 5 * ms.pinf) mu = std::min(1e6, mu * 1.5);
    }
  }
  res.status = Status::MaxIter;
}

RealResult solve_real(const RealSdp& r, const Options& opt) {
  RealResult res;
  const int m = static_cast<int>(r.rows.size());
  const double bnorm = r.b.norm();
  double cnorm = 0;
  for (const auto& c : r.c) cnorm += c.squaredNorm();
  cnorm = std::sqrt(cnorm);

  // starting point in the style of SDPT3
  Iterate it;
  it.y = RVector::Zero(m);
  for (size_t b = 0; b < r.n.size(); ++b) {
    const int nb = r.n[b];
    std::vector<double> anorm(m, 0.0);
    double amax = 0, ratio = 0;
    for (int a = 0; a < m; ++a)
      for (const auto& rb : r.rows[a])
        if (rb.block == static_cast<int>(b)) {
          double s = 0;
          for (const auto& e : rb.entries) s += e.v * e.v;
          anorm[a] = std::sqrt(s);
          amax = std::max(amax, anorm[a]);
          ratio = std::max(ratio, (1 + std::abs(r.b(a))) / (1 + anorm[a]));
        }
    const double xi = std::max({10.0, std::sqrt(double(nb)), nb * ratio});
    const double eta = std::max({10.0, std::sqrt(double(nb)), amax, r.c[b].norm()});
    it.x.push_back(xi * RMatrix::Identity(nb, nb));
    it.z.push_back(eta * RMatrix::Identity(nb, nb));
  }

  if (opt.force_fallback) {
    res.fallback = true;
    admm(r, it, opt.fallback_iter, 0.1 * opt.tol, bnorm, cnorm, res);
    res.it = it;
    return res;
  }

  Ipm ipm(r);
  double gamma = 0.9;
  const double target = 0.05 * opt.tol;
  Iterate best = it;
  double best_score = std::numeric_limits<double>::infinity();
  bool need_fallback = false;
  int stalls = 0;

  for (int k = 0; k < opt.max_iter; ++k) {
    res.iterations = k + 1;
    const auto ms = measure(r, it, bnorm, cnorm);
    const double score = std::max({ms.pinf, ms.dinf, ms.gap});
    if (score < best_score) {
      best_score = score;
      best = it;
    }
    if (ms.pinf < target && ms.dinf < target && ms.gap < target) {
      res.status = Status::Optimal;
      break;
    }
    // infeasibility certificates
    const double by = r.b.dot(it.y);
    if (by > 1e8 * (1 + cnorm)) {
      Blocks aty = op_at(r, it.y);
      double worst = 0;
      for (auto& a : aty) worst = std::min(worst, min_eig(-a / by));
      if (worst > -1e-8) {
        res.status = Status::Infeasible;
        res.ray_found = true;
        res.ray = it.y / by;
        break;
      }
    }
    const double cx = inner(r.c, it.x);
    if (cx < -1e8 * (1 + bnorm)) {
      if (op_a(r, it.x).norm() / -cx < 1e-8) {
        res.status = Status::Unbounded;
        break;
      }
    }

    Blocks zinv;
    bool ok = true;
    for (size_t b = 0; b < r.n.size(); ++b) {
      Eigen::LLT<RMatrix> llt(it.z[b]);
      if (llt.info() != Eigen::Success) {
        ok = false;
        break;
      }
      zinv.push_back(llt.solve(RMatrix::Identity(r.n[b], r.n[b])));
      Eigen::SelfAdjointEigenSolver<RMatrix> ex(it.x[b], Eigen::EigenvaluesOnly);
      Eigen::SelfAdjointEigenSolver<RMatrix> ez(it.z[b], Eigen::EigenvaluesOnly);
      const auto& wx = ex.eigenvalues();
      const auto& wz = ez.eigenvalues();
      if (wx(0) <= 0 || wz(0) <= 0 || wx(wx.size() - 1) / wx(0) > 1e12 ||
          wz(wz.size() - 1) / wz(0) > 1e12)
        ok = false;
    }
    if (!ok) {
      need_fallback = true;
      break;
    }
    RMatrix mm = ipm.schur(it.x, zinv);
    Eigen::LLT<RMatrix> mfact(mm);
    if (mfact.info() != Eigen::Success) {
      need_fallback = true;
      break;
    }

    const RVector rp = r.b - op_a(r, it.x);
    Blocks rd = op_at(r, it.y);
    for (size_t b = 0; b < rd.size(); ++b) rd[b] = r.c[b] - rd[b] - it.z[b];
    Blocks xrdz;
    for (size_t b = 0; b < r.n.size(); ++b) xrdz.push_back(it.x[b] * rd[b] * zinv[b]);
    const RVector a_xrdz = op_a(r, xrdz);

    auto direction = [&](const Blocks& kk, RVector& dy, Blocks& dx, Blocks& dz) {
      RVector rhs = rp - op_a(r, kk) + a_xrdz;
      dy = mfact.solve(rhs);
      Blocks aty = op_at(r, dy);
      dz.resize(r.n.size());
      dx.resize(r.n.size());
      for (size_t b = 0; b < r.n.size(); ++b) {
        dz[b] = rd[b] - aty[b];
        dx[b] = kk[b] - it.x[b] * dz[b] * zinv[b];
      }
      dx = sym(dx);
      dz = sym(dz);
    };
    auto steps = [&](const Blocks& dx, const Blocks& dz, double& ap, double& ad) {
      ap = ad = std::numeric_limits<double>::infinity();
      for (size_t b = 0; b < r.n.size(); ++b) {
        ap = std::min(ap, max_step(it.x[b], dx[b]));
        ad = std::min(ad, max_step(it.z[b], dz[b]));
      }
      ap = std::min(1.0, gamma * ap);
      ad = std::min(1.0, gamma * ad);
    };

    // predictor
    Blocks kk(r.n.size());
    for (size_t b = 0; b < r.n.size(); ++b) kk[b] = -it.x[b];
    RVector dy;
    Blocks dx, dz;
    direction(kk, dy, dx, dz);
    double ap, ad;
    steps(dx, dz, ap, ad);
    Blocks xa = it.x, za = it.z;
    for (size_t b = 0; b < r.n.size(); ++b) {
      xa[b] += ap * dx[b];
      za[b] += ad * dz[b];
    }
    int ntot = 0;
    for (int nb : r.n) ntot += nb;
    const double mu = ms.mu;
    const double mu_aff = inner(xa, za) / ntot;
    const double expon = std::max(1.0, 3.0 * std::min(ap, ad) * std::min(ap, ad));
    const double sigma = std::min(1.0, std::pow(std::max(mu_aff, 0.0) / mu, expon));

    // corrector
    for (size_t b = 0; b < r.n.size(); ++b)
      kk[b] = sigma * mu * zinv[b] - it.x[b] - dx[b] * dz[b] * zinv[b];
    direction(kk, dy, dx, dz);
    steps(dx, dz, ap, ad);
    for (size_t b = 0; b < r.n.size(); ++b) {
      it.x[b] += ap * dx[b];
      it.z[b] += ad * dz[b];
    }
    it.y += ad * dy;
    gamma = 0.9 + 0.09 * std::min(ap, ad);
    if (std::max(ap, ad) < 1e-9) {
      if (++stalls > 3) {
        need_fallback = true;
        break;
      }
    } else {
      stalls = 0;
    }
  }

  if (res.status == Status::MaxIter || need_fallback) {
    const auto ms = measure(r, it, bnorm, cnorm);
    if (std::max({ms.pinf, ms.dinf, ms.gap}) > best_score) it = best;
    // ill-conditioning close to the optimum is expected; accept the best
    // iterate when it already meets the caller's tolerance
    if (best_score < 0.5 * opt.tol) {
      res.status = Status::Optimal;
    } else {
      // make sure the warm start is PSD
      for (auto& x : it.x) x = psd_part(x);
      for (auto& z : it.z) z = psd_part(z);
      res.fallback = true;
      admm(r, it, opt.fallback_iter, target, bnorm, cnorm, res);
      // same acceptance rule as above for a first-order iterate that stalls
      // short of the inner target
      const auto fin = measure(r, it, bnorm, cnorm);
      if (res.status == Status::MaxIter && std::max({fin.pinf, fin.dinf, fin.gap}) < 0.5 * opt.tol)
        res.status = Status::Optimal;
    }
  }
  res.it = it;
  return res;
}

}  // namespace

Solution solve(const Problem& p, const Options& opt) {
  if (p.num_blocks() == 0) throw std::invalid_argument("sdp problem has no variables");
  if (!(opt.tol > 0)) throw std::invalid_argument("sdp tolerance must be positive");
  const RealSdp r = lower(p);
  RealResult rr = solve_real(r, opt);

  Solution s;
  s.status = rr.status;
  s.iterations = rr.iterations;
  s.used_fallback = rr.fallback;
  for (int b = 0; b < p.num_blocks(); ++b) s.x.push_back(real_unembed<double>(rr.it.x[b]));
  auto multipliers = [&](const RVector& y) {
    std::vector<CMatrix> out;
    for (size_t k = 0; k < p.constraints().size(); ++k) {
      const int rdim = static_cast<int>(p.constraints()[k].rhs.rows());
      CMatrix yk = CMatrix::Zero(rdim, rdim);
      const auto& basis = r.con_basis[k];
      for (size_t a = 0; a < basis.size(); ++a)
        yk += y(r.con_offset[k] + static_cast<Eigen::Index>(a)) * basis_matrix(basis[a], rdim);
      out.push_back(hermitian_part(yk));
    }
    return out;
  };
  s.y = multipliers(rr.it.y);
  if (rr.ray_found) s.ray = multipliers(rr.ray);
  for (int b = 0; b < p.num_blocks(); ++b) {
    CMatrix z = p.objective(b);
    for (size_t k = 0; k < p.constraints().size(); ++k) z -= p.apply_adjoint(static_cast<int>(k), b, s.y[k]);
    s.z.push_back(hermitian_part(z));
  }
  const auto v = verify(p, s, opt.tol);
  s.primal_objective = v.primal_objective;
  s.dual_objective = v.dual_objective;
  s.gap = std::abs(v.primal_objective - v.dual_objective);
  s.primal_residual = v.primal_residual;
  s.dual_residual = v.dual_residual;
  if (s.status == Status::Optimal && !v.ok) s.status = Status::MaxIter;
  return s;
}

Verification verify(const Problem& p, const Solution& s, double tol) {
  Verification v;
  if (static_cast<int>(s.x.size()) != p.num_blocks() || s.y.size() != p.constraints().size()) {
    v.ok = false;
    v.primal_residual = v.dual_residual = v.gap = std::numeric_limits<double>::infinity();
    return v;
  }
  double bmax = 0, cmax = 0;
  for (const auto& c : p.constraints()) bmax = std::max(bmax, c.rhs.norm());
  for (int b = 0; b < p.num_blocks(); ++b) cmax = std::max(cmax, p.objective(b).norm());

  double pr = 0;
  for (size_t k = 0; k < p.constraints().size(); ++k) {
    const auto& c = p.constraints()[k];
    const CMatrix res = p.apply(static_cast<int>(k), s.x) - c.rhs;
    if (c.sense == Sense::Equal) pr = std::max(pr, res.norm());
    else pr = std::max(pr, std::max(0.0, hermitian_eigenvalues(res).maxCoeff()));
  }
  for (const auto& x : s.x) pr = std::max(pr, std::max(0.0, -hermitian_eigenvalues(x).minCoeff()));
  v.primal_residual = pr / (1 + bmax);

  double dr = 0;
  for (int b = 0; b < p.num_blocks(); ++b) {
    CMatrix z = p.objective(b);
    for (size_t k = 0; k < p.constraints().size(); ++k) z -= p.apply_adjoint(static_cast<int>(k), b, s.y[k]);
    dr = std::max(dr, std::max(0.0, -hermitian_eigenvalues(z).minCoeff()));
  }
  for (size_t k = 0; k < p.constraints().size(); ++k)
    if (p.constraints()[k].sense == Sense::LessEqual)
      dr = std::max(dr, std::max(0.0, hermitian_eigenvalues(s.y[k]).maxCoeff()));
  v.dual_residual = dr / (1 + cmax);

  double po = 0, dobj = 0;
  for (int b = 0; b < p.num_blocks(); ++b) po += (p.objective(b) * s.x[b]).trace().real();
  for (size_t k = 0; k < p.constraints().size(); ++k)
    dobj += (s.y[k] * p.constraints()[k].rhs).trace().real();
  v.primal_objective = po;
  v.dual_objective = dobj;
  v.gap = std::abs(po - dobj) / (1 + std::abs(po) + std::abs(dobj));
  v.ok = v.primal_residual <= tol && v.dual_residual <= tol && v.gap <= tol;
  return v;
}

std::string dump_json(const Problem& p) {
  using nlohmann::json;
  auto mat = [](const CMatrix& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      json row = json::array();
      for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back({m(i, j).real(), m(i, j).imag()});
      rows.push_back(row);
    }
    return rows;
  };
  json j;
  j["sense"] = "minimize";
  j["blocks"] = json::array();
  for (int b = 0; b < p.num_blocks(); ++b)
    j["blocks"].push_back({{"dim", p.block_dim(b)}, {"label", p.block_labels()[b]},
                           {"objective", mat(p.objective(b))}});
  j["constraints"] = json::array();
  for (const auto& c : p.constraints()) {
    json jc;
    jc["label"] = c.label;
    jc["sense"] = c.sense == Sense::Equal ? "eq" : "le";
    jc["rhs"] = mat(c.rhs);
    jc["terms"] = json::array();
    for (const auto& t : c.terms) {
      json jt;
      jt["block"] = t.block;
      jt["parts"] = json::array();
      for (const auto& part : t.parts) jt["parts"].push_back({{"coeff", part.coeff}, {"op", mat(part.op)}});
      jc["terms"].push_back(jt);
    }
    j["constraints"].push_back(jc);
  }
  return j.dump(1);
}

}  // namespace compoundcap::sdp
