# Copyright 2026 The compoundcap Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Generates tests/data/oracles.json.

Reference values come from cvxpy (CLARABEL) and scipy, independent of the
C++ solver. The file is committed; rerun only when adding cases.

    python3 tools/oracles/gen_oracles.py > tests/data/oracles.json
"""

import json
import sys

import cvxpy as cp
import numpy as np
from scipy.optimize import minimize

rng = np.random.default_rng(20260416)


def cpair(m):
    m = np.atleast_2d(m)
    return [[[float(z.real), float(z.imag)] for z in row] for row in m]


def ginibre(r, c):
    return (rng.normal(size=(r, c)) + 1j * rng.normal(size=(r, c))) / np.sqrt(2)


def random_state(d, rank=None):
    g = ginibre(d, rank or d)
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def random_channel(din, dout, nk):
    g = ginibre(dout * nk, din)
    q, r = np.linalg.qr(g)
    q = q * (np.diag(r) / np.abs(np.diag(r)))
    return [q[k * dout:(k + 1) * dout, :] for k in range(nk)]


def apply(kraus, rho):
    return sum(k @ rho @ k.conj().T for k in kraus)


def choi_unnormalized(kraus, din):
    dout = kraus[0].shape[0]
    j = np.zeros((din * dout, din * dout), dtype=complex)
    for a in range(din):
        for b in range(din):
            e = np.zeros((din, din))
            e[a, b] = 1
            j += np.kron(e, apply(kraus, e))
    return j


def ptrace_first(m, da, db):
    return np.einsum("abac->bc", m.reshape(da, db, da, db))


def entropy_bits(m):
    w = np.linalg.eigvalsh((m + m.conj().T) / 2)
    w = w[w > 1e-15]
    return float(-(w * np.log2(w)).sum())


SOLVER = dict(solver=cp.CLARABEL, tol_gap_abs=1e-10, tol_gap_rel=1e-10,
              tol_feas=1e-10)
FALLBACK = dict(solver=cp.SCS, eps=1e-10, max_iters=500000)


def solve(prob):
    # CLARABEL occasionally stops at "optimal_inaccurate" on the fidelity
    # blocks; SCS at tight eps is slower but reliable there.
    prob.solve(**SOLVER)
    if prob.status != cp.OPTIMAL:
        prob.solve(**FALLBACK)
    if prob.status != cp.OPTIMAL:
        raise RuntimeError("oracle solve failed: " + prob.status)
    return prob.value


def hmin(rho, da, db):
    s = cp.Variable((db, db), hermitian=True)
    prob = cp.Problem(cp.Minimize(cp.real(cp.trace(s))),
                      [cp.kron(np.eye(da), s) - rho >> 0])
    return -np.log2(solve(prob))


def support(rho):
    w, v = np.linalg.eigh(rho)
    keep = w > 1e-12 * w.max()
    return w[keep], v[:, keep]


def hmax(rho, da, db):
    d = da * db
    lam, v = support(rho)
    r = len(lam)
    s = cp.Variable((db, db), hermitian=True)
    x = cp.Variable((r, d), complex=True)
    blk = cp.bmat([[np.diag(lam), x], [x.H, cp.kron(np.eye(da), s)]])
    prob = cp.Problem(cp.Maximize(cp.real(cp.trace(v @ x))),
                      [blk >> 0, cp.real(cp.trace(s)) == 1])
    return 2 * np.log2(solve(prob))


def smooth_hmin(rho, da, db, eps):
    d = da * db
    lam, v = support(rho)
    r = len(lam)
    rt = cp.Variable((d, d), hermitian=True)
    s = cp.Variable((db, db), hermitian=True)
    x = cp.Variable((d, r), complex=True)
    blk = cp.bmat([[rt, x], [x.H, np.diag(lam)]])
    cons = [blk >> 0, rt >> 0, cp.real(cp.trace(rt)) <= 1,
            cp.real(cp.trace(x @ v.conj().T)) >= np.sqrt(1 - eps ** 2),
            cp.kron(np.eye(da), s) - rt >> 0]
    prob = cp.Problem(cp.Minimize(cp.real(cp.trace(s))), cons)
    return -np.log2(solve(prob))


def diamond(kraus1, kraus2, din):
    j = choi_unnormalized(kraus1, din) - choi_unnormalized(kraus2, din)
    dout = kraus1[0].shape[0]
    w = cp.Variable((din * dout, din * dout), hermitian=True)
    r = cp.Variable((din, din), hermitian=True)
    big = cp.kron(r, np.eye(dout))
    prob = cp.Problem(cp.Maximize(cp.real(cp.trace(j @ w))),
                      [big - w >> 0, big + w >> 0, cp.real(cp.trace(r)) == 1])
    return solve(prob)


def mutual_info(rho_a, kraus):
    # purification |rho> = sum_i sqrt(l_i) |v_i>|i>
    w, v = np.linalg.eigh(rho_a)
    w = np.clip(w, 0, None)
    d = rho_a.shape[0]
    psi = np.zeros((d, d), dtype=complex)
    for i in range(d):
        psi[:, i] = np.sqrt(w[i]) * v[:, i]
    # joint output on B x R
    dout = kraus[0].shape[0]
    out = np.zeros((dout * d, dout * d), dtype=complex)
    for k in kraus:
        vec = (k @ psi).reshape(-1)
        out += np.outer(vec, vec.conj())
    rb = apply(kraus, rho_a)
    return entropy_bits(rho_a) + entropy_bits(rb) - entropy_bits(out)


PAULI = [np.eye(2), np.array([[0, 1], [1, 0]]), np.array([[0, -1j], [1j, 0]]),
         np.diag([1.0, -1.0])]


def bloch_state(r):
    return 0.5 * (PAULI[0] + sum(r[k] * PAULI[k + 1] for k in range(3)))


def bloch_max(fn):
    best = None
    for th in np.linspace(0, np.pi, 13):
        for ph in np.linspace(0, 2 * np.pi, 13, endpoint=False):
            for rad in np.linspace(0, 0.999, 7):
                x0 = rad * np.array([np.sin(th) * np.cos(ph),
                                     np.sin(th) * np.sin(ph), np.cos(th)])
                val = fn(x0)
                if best is None or val > best[0]:
                    best = (val, x0)

    def neg(x):
        n = np.linalg.norm(x)
        if n > 0.999999:
            x = x * 0.999999 / n
        return -fn(x)

    res = minimize(neg, best[1], method="Nelder-Mead",
                   options=dict(xatol=1e-10, fatol=1e-13, maxiter=20000))
    return max(-res.fun, best[0])


def main():
    out = {"states": [], "diamond": [], "capacity": [], "compound": []}

    for da, db, rank in [(2, 2, None), (2, 2, 2), (2, 3, None), (3, 2, 3),
                         (2, 2, 1), (2, 2, 3)]:
        rho = random_state(da * db, rank)
        out["states"].append({
            "dims": [da, db], "matrix": cpair(rho),
            "h_min": hmin(rho, da, db), "h_max": hmax(rho, da, db),
            "cond_entropy": entropy_bits(rho) - entropy_bits(ptrace_first(rho, da, db)),
            "smooth_h_min_0.1": smooth_hmin(rho, da, db, 0.1),
            "smooth_h_min_0.3": smooth_hmin(rho, da, db, 0.3),
        })

    ident = [np.eye(2)]
    depol = [np.sqrt(1 - 3 / 4) * np.eye(2)] + [0.5 * p for p in PAULI[1:]]
    out["diamond"].append({"a": [cpair(k) for k in ident],
                           "b": [cpair(k) for k in depol], "d_in": 2,
                           "value": diamond(ident, depol, 2)})
    for din, dout, nk in [(2, 2, 2), (2, 2, 3), (2, 3, 2), (3, 2, 2)]:
        k1 = random_channel(din, dout, nk)
        k2 = random_channel(din, dout, nk)
        out["diamond"].append({"a": [cpair(k) for k in k1],
                               "b": [cpair(k) for k in k2], "d_in": din,
                               "value": diamond(k1, k2, din)})

    for nk in [2, 3, 4]:
        k = random_channel(2, 2, nk)
        val = bloch_max(lambda r: mutual_info(bloch_state(r), k))
        out["capacity"].append({"kraus": [cpair(m) for m in k],
                                "q_e": 0.5 * val})

    for members in [2, 3, 2]:
        ks = [random_channel(2, 2, 2) for _ in range(members)]
        val = bloch_max(lambda r: min(mutual_info(bloch_state(r), k) for k in ks))
        out["compound"].append({"members": [[cpair(m) for m in k] for k in ks],
                                "q_e": 0.5 * val,
                                "member_q_e": [0.5 * bloch_max(
                                    lambda r, k=k: mutual_info(bloch_state(r), k))
                                    for k in ks]})

    json.dump(out, sys.stdout, indent=1)
    sys.stdout.write("\n")


if __name__ == "__main__":
    main()
