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


// Random entanglement-transmission codes for compound channels and their
// Monte-Carlo evaluation.
//
// Conventions: the message system A0 (dim M0) is paired with a reference R,
// the shared-entanglement half A1 (dim M1) with the receiver's B1. A code
// input Phi+_{A0 R} (x) Phi+_{A1 B1} is handled as the matrix I / sqrt(M0 M1)
// with rows (A0, A1) and columns (R, B1). For branch i, A1 splits as
// A1^i (x) (A1^i)^c with dims M1^i and M1 / M1^i.

#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "compoundcap/compound.hpp"
#include "compoundcap/qcore.hpp"

namespace compoundcap {

/// Problem too large for dense simulation.
class BudgetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// O with |rho> = sqrt(d_A) (O (x) 1)|Phi+>, i.e. O(a, a') = psi(a, a').
/// psi is laid out [A, A'] with d_A = d_A'.
CMatrix build_oa(const CVector& psi, int d_a);
CMatrix build_oa(const PureState& rho);

struct IsEncoderSpec {
  int d_a = 1;
  int m0 = 1;
  std::vector<int> m1i;
  std::vector<CVector> rho;  // |rho^i> on [A, A']
  std::vector<CMatrix> u;    // U^i on A

  int branches() const { return static_cast<int>(m1i.size()); }
  int m1() const;
  /// First M0 M1^i columns of the identity on A.
  CMatrix j(int i) const;
  /// First M1 / M1^i columns of the identity on A^c (dim M1).
  CMatrix k(int i) const;
  CMatrix oa(int i) const { return build_oa(rho.at(i), d_a); }
  void validate() const;
};

/// Unitaries start at the identity.
IsEncoderSpec make_is_spec(int d_a, int m0, std::vector<int> m1i, std::vector<CVector> rho);
/// U^i drawn from seed.child(i).
void draw_unitaries(IsEncoderSpec& spec, std::uint64_t seed);

/// sigma -> d_A O U J sigma J^+ U^+ O^+ on the A0 A1^i part; A0 A1 -> A.
/// Completely positive, not trace preserving in general.
Channel build_is_encoder(const IsEncoderSpec& spec, int i);

/// T^i = N^i o (d_A O(rho^i) . O(rho^i)^+), A -> B.
Channel twisted_channel(const Channel& n, const CVector& rho, int d_a);

/// Isometry-like map A0 A1 -> [B, A^c, E, I]:
/// (1/sqrt N) sum_i sum_k (T^i_k U^i J^i (x) K^i) (x) |k>_E (x) |i>_I.
/// E has the largest Kraus rank among the T^i.
CMatrix joint_dilation(const std::vector<Channel>& t, const IsEncoderSpec& spec);

/// (1/N) sum_i T^i o (U^i J^i . J^i+ U^i+ (x) tr_(A1^i)^c); A0 A1 -> B.
Channel average_encoded_channel(const std::vector<Channel>& t, const IsEncoderSpec& spec);
/// (1/N) sum_i N^i o E^i.
Channel average_encoded_channel(const CompoundChannel& pi, const IsEncoderSpec& spec);
/// Complement of the above with output [A^c, E, I], including the |i><j| blocks.
Channel complementary_average(const std::vector<Channel>& t, const IsEncoderSpec& spec);
Channel complementary_average(const CompoundChannel& pi, const IsEncoderSpec& spec);

/// (1/N) sum_i K^i tau K^i+ (x) T^{i,c}(tau_A) (x) |i><i| on [A^c, E, I].
CMatrix decoupling_target(const std::vector<Channel>& t, const IsEncoderSpec& spec);
/// ||T^c(Phi+ (x) tau_A1) - omega (x) tau_R||_1 at the unitaries held in spec.
double decoupling_deviation(const std::vector<Channel>& t, const IsEncoderSpec& spec,
                            const CMatrix& omega);

/// 2^(-1/2 (min_i [h2_i - log M0 + log M1^i] - 2 log N - 2)).
double decoupling_bound_L5(const std::vector<double>& h2, int m0, const std::vector<int>& m1i, int n);

struct DecouplingReport {
  double empirical_mean_deviation = 0;
  double std_error = 0;
  int sample_count = 0;
  double bound_value = 0;
  std::vector<double> h2;  // per branch, certified lower values
  std::vector<double> deviations;
  std::uint64_t seed = 0;
  bool pass = false;
};

DecouplingReport mc_decoupling_L5(const CompoundChannel& pi, const std::vector<CVector>& rho, int m0,
                                  const std::vector<int>& m1i, int samples, std::uint64_t seed);

/// Decoder B B1 -> A0 (trace non-increasing) from the Uhlmann partial
/// isometry taking the realized purification on [env, R | B, B1] to
/// |omega>_{env X} (x) |Phi+>_{R A0}. v is a joint dilation with rows
/// [B, env] and columns A0 A1.
Channel build_universal_decoder(const CMatrix& v, int d_b, int m0, int m1, const CMatrix& omega);

struct NormalizedEncoder {
  Channel encoder;
  double deviation = 0;  // ||tr_A E(Phi+ (x) Phi+) - tau_{R B1}||_1
  double distance = 0;   // ||(E~ - E)(Phi+ (x) Phi+)||_1
  double guarantee = 0;  // dev + 2 sqrt(2 dev)
  bool flagged = false;  // dev > 1
};
NormalizedEncoder normalize_encoder(const Channel& e, int m0, int m1);

/// F(Phi+_{A0 R}, D o N o E (Phi+ (x) Phi+)).
double entanglement_fidelity(const Channel& decoder, const Channel& channel, const Channel& encoder,
                             int m0, int m1);
/// D o N o E (Phi+ (x) Phi+) on [A0, R].
CMatrix code_output(const Channel& decoder, const Channel& channel, const Channel& encoder, int m0, int m1);

/// Entropic inputs of the analytic bounds, one entry per distinct branch.
struct OneShotEntropies {
  double eps = 0;
  std::vector<double> hmin_a;   // H_min^eps(A)_rho^i
  std::vector<double> hmax_ab;  // H_max^eps(A'|B)_{N^i(rho^i)}
};
OneShotEntropies one_shot_entropies(const CompoundChannel& pi, const std::vector<CVector>& rho, double eps);

/// 2^(-1/2 (H - log M0 - log M1^i)) + 12 eps.
double lemma7_expectation(double hmin_a, int m0, int m1i, double eps);

struct EncoderSelection {
  IsEncoderSpec spec;
  std::vector<double> deviation, threshold;
  int attempts = 0;
  bool ok = false;
};
/// Redraws the U^i (draw k from seed.child(k)) until every branch satisfies
/// deviation <= factor * expectation[i]; at most 1 + max_retries draws.
EncoderSelection select_encoders(IsEncoderSpec spec, const std::vector<double>& expectation, double factor,
                                 int max_retries, std::uint64_t seed);

struct AnalyticBound {
  double value = 0;
  double delta1 = 0, delta2 = 0;
  bool nontrivial() const { return value > 0; }
};
/// 1 - 4N sqrt(2 sqrt(d1) + d2); a single rho shared by all members.
AnalyticBound theorem5_bound(const OneShotEntropies& h, int n, int m0, int m1);
/// 1 - 8N(N+2)(sqrt d1 + sqrt d2 + 6 sqrt eps).
AnalyticBound theorem6_bound(const OneShotEntropies& h, int n, int m0, const std::vector<int>& m1i);
/// 1 - 16N(N+2)(sqrt d + 6 sqrt eps); delta in delta1.
AnalyticBound lemma8_bound(const OneShotEntropies& h, int n, int m0);

struct OneShotReport {
  std::vector<double> fidelities;  // per member
  double min_fidelity = 0;
  AnalyticBound bound;
  bool bound_respected = true;
  int distinct_members = 0;
  std::vector<int> branch_of;
  int attempts = 0;
  bool retry_cap_hit = false;
  std::vector<double> encoder_deviation, encoder_expectation;
  double decoding_error = 0, decoding_expectation = 0;
  /// "independent" (Haar U^i per branch) or "shared" (one U for all).
  std::string construction = "independent";
  std::uint64_t seed = 0;
};

/// Encoders per distinct branch and the common decoder.
struct IsCode {
  IsEncoderSpec spec;
  std::vector<Channel> encoders;
  Channel decoder{std::vector<CMatrix>{CMatrix::Identity(1, 1)}};
  std::vector<int> branch_of;
  int m0 = 1, m1 = 1;
};

struct OneShotOptions {
  double eps = 0;
  int max_retries = 50;
  /// Skips the entropy solves when the caller already has them.
  std::optional<OneShotEntropies> entropies;
};

OneShotReport run_one_shot_uninformed(const CompoundChannel& pi, const CVector& rho, int m0, int m1,
                                      std::uint64_t seed, const OneShotOptions& opt = {});
OneShotReport run_one_shot_is(const CompoundChannel& pi, const std::vector<CVector>& rho, int m0,
                              const std::vector<int>& m1i, std::uint64_t seed,
                              const OneShotOptions& opt = {}, IsCode* code = nullptr);
OneShotReport plain_is_experiment(const CompoundChannel& pi, const std::vector<CVector>& rho, int m0,
                                  std::uint64_t seed, const OneShotOptions& opt = {});

struct EstimationReport {
  int copies = 0;
  std::vector<double> exact_success;      // P(i|i)
  RMatrix confusion;                      // P(j|i), row i
  std::vector<double> empirical_success;  // Monte-Carlo
  std::vector<double> std_error;
  int trials = 0;
  bool indistinguishable = false;
  std::uint64_t seed = 0;
};

/// Pretty-good measurement on (N^i (x) id)(omega)^{(x) m L}, L = N(N-1)/2,
/// uniform prior. omega lives on [A, A'] with d_A' = d_ref.
EstimationReport estimate_channel_pgm(const CompoundChannel& pi, int m, const CMatrix& omega, int d_ref,
                                      int trials, std::uint64_t seed);

struct ProtocolTranscript {
  int n = 0, m = 0, l = 0, t = 0;
  int m0 = 1;
  std::vector<int> m1i;
  EstimationReport estimation;
  RMatrix block_fidelity;  // F_ij: member i through the code built for member j, one use
  std::vector<double> code_fidelity;     // F_ii^t
  std::vector<double> member_fidelity;   // sum_j P(j|i) F_ij^t
  double total_fidelity = 0;
  double product_lower = 0;  // min P(i|i) * min F_ii^t
  double rate = 0;           // t log2 M0 / n
  int code_attempts = 0;  // summed over the per-member codes
  std::uint64_t seed = 0;
};

/// m = floor(sqrt n), t = n - m L. Phase 2 is t independent uses of a
/// one-use code for the estimated member, Phi+ inputs. Code seeds are
/// seed.child(1 + j).
ProtocolTranscript feedback_protocol_sim(const CompoundChannel& pi, int n, int m0, const std::vector<int>& m1i,
                                         std::uint64_t seed, int trials = 10000, double eps = 0);

/// Members collapsed by equal Choi matrix (1e-12), input state and M1^i.
std::vector<int> distinct_branches(const CompoundChannel& pi, const std::vector<CVector>& rho,
                                   const std::vector<int>& m1i, int* count);

}  // namespace compoundcap
