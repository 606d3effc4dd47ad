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

// Dense semidefinite programs over Hermitian matrix blocks.
//
//   minimize    sum_b <C_b, X_b>
//   subject to  sum_b A_kb(X_b)  =  B_k   or   sum_b A_kb(X_b) <= B_k
//               X_b >= 0
//
// where each A_kb is a sum of congruences c * L X L^dag. The dual is
//
//   maximize    sum_k <Y_k, B_k>
//   subject to  Z_b = C_b - sum_k A_kb^dag(Y_k) >= 0,  Y_k <= 0 for <=.
//
// Complex data is lowered to a real block-diagonal standard form through
// [[Re, -Im], [Im, Re]] and solved by a primal-dual interior point method.

#pragma once

#include <string>
#include <vector>

#include "compoundcap/linalg.hpp"

namespace compoundcap::sdp {

struct Congruence {
  double coeff = 1.0;
  CMatrix op;  // rows: constraint space, cols: block dimension
};

struct Term {
  int block = 0;
  std::vector<Congruence> parts;
};

enum class Sense { Equal, LessEqual };

struct Constraint {
  std::vector<Term> terms;
  CMatrix rhs;
  Sense sense = Sense::Equal;
  std::string label;
};

class Problem {
 public:
  int add_block(int dim, std::string label = {});
  void set_objective(int block, const CMatrix& c);
  void add_constraint(Constraint c);

  /// Convenience: sum of congruences on one block equal (or <=) to rhs.
  void add_constraint(int block, std::vector<Congruence> parts, const CMatrix& rhs,
                      Sense sense = Sense::Equal, std::string label = {});

  int num_blocks() const { return static_cast<int>(dims_.size()); }
  int block_dim(int b) const { return dims_.at(b); }
  const std::vector<int>& block_dims() const { return dims_; }
  const std::vector<std::string>& block_labels() const { return labels_; }
  const CMatrix& objective(int b) const { return c_.at(b); }
  const std::vector<Constraint>& constraints() const { return cons_; }

  /// A_k(X) for a given set of blocks.
  CMatrix apply(int k, const std::vector<CMatrix>& x) const;
  /// A_k^dag(Y) restricted to block b.
  CMatrix apply_adjoint(int k, int b, const CMatrix& y) const;

 private:
  std::vector<int> dims_;
  std::vector<std::string> labels_;
  std::vector<CMatrix> c_;
  std::vector<Constraint> cons_;
};

/// Selector congruence picking rows/cols [offset, offset+size) of a block.
CMatrix selector(int block_dim, int offset, int size);

enum class Status { Optimal, Infeasible, Unbounded, MaxIter };
const char* status_name(Status s);

struct Options {
  double tol = 1e-7;
  int max_iter = 120;
  bool force_fallback = false;  // exercise the first-order path directly
  int fallback_iter = 50000;
};

struct Solution {
  Status status = Status::MaxIter;
  std::vector<CMatrix> x;  // primal blocks
  std::vector<CMatrix> y;  // constraint multipliers
  std::vector<CMatrix> z;  // dual slacks
  double primal_objective = 0, dual_objective = 0, gap = 0;
  double primal_residual = 0, dual_residual = 0;
  int iterations = 0;
  bool used_fallback = false;
  /// Improving ray (multipliers) when infeasibility was detected.
  std::vector<CMatrix> ray;
};

Solution solve(const Problem& p, const Options& opt);
inline Solution solve(const Problem& p, double tol = 1e-7) {
  Options o;
  o.tol = tol;
  return solve(p, o);
}

struct Verification {
  bool ok = false;
  double primal_residual = 0;  // relative, includes PSD violation of X
  double dual_residual = 0;    // relative, includes PSD violation of Z
  double gap = 0;              // |p - d| / (1 + |p| + |d|)
  double primal_objective = 0, dual_objective = 0;
};

/// Recomputes residuals and objectives from the complex data only.
Verification verify(const Problem& p, const Solution& s, double tol = 1e-7);

/// JSON dump of problem data for offline cross-checking.
std::string dump_json(const Problem& p);

}  // namespace compoundcap::sdp
