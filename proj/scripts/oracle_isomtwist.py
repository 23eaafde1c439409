#!/usr/bin/env python3
"""Reference values for the finite-isometry tests, computed independently.

Everything here works from first definitions with plain numpy: eigenvalue
multiplicities via np.linalg.eig, Ad-eigenspace ranks via resolvent
projectors on the 4n^2-dimensional endomorphism space, tangent dimensions
via brute-force kernels of the power-map differential, orientation signs
via an explicitly assembled eigenbasis intertwiner. The printed numbers
are frozen into tests/test_isomtwist.cpp.
"""
import json
import math
import os
import sys

import numpy as np


def rot(t):
    c, s = math.cos(t), math.sin(t)
    return np.array([[c, -s], [s, c]])


def blockdiag(*blocks):
    n = sum(b.shape[0] for b in blocks)
    out = np.zeros((n, n))
    at = 0
    for b in blocks:
        m = b.shape[0]
        out[at:at + m, at:at + m] = b
        at += m
    return out


def matpow(a, p):
    out = np.eye(a.shape[0])
    for _ in range(p):
        out = out @ a
    return out


def eigen_multiplicities(a, k):
    """p_j = dim_C ker(A - omega_{2k}^j), j = 1..k-1, by angle matching."""
    vals = np.linalg.eigvals(a)
    p = [0] * (k - 1)
    for v in vals:
        ang = math.atan2(v.imag, v.real)
        for j in range(1, k):
            if abs(ang - math.pi * j / k) < 1e-8:
                p[j - 1] += 1
    return p


def eps_sign(a, k):
    """Orientation sign of the intertwiner to the canonical block form.

    Columns are (sqrt2*Im v, sqrt2*Re v) per unit eigenvector v, eigenvalue
    angles ascending. Any complex-orthonormal eigenbasis gives the same
    sign, so the QR orthonormalization below is immaterial to the result.
    """
    n2 = a.shape[0]
    vals, vecs = np.linalg.eig(a)
    cols = []
    theta = []
    for j in range(1, k):
        idx = [i for i in range(n2)
               if abs(math.atan2(vals[i].imag, vals[i].real) - math.pi * j / k) < 1e-8]
        if not idx:
            continue
        basis = vecs[:, idx]
        q, _ = np.linalg.qr(basis)
        for c in range(q.shape[1]):
            v = q[:, c]
            cols.append(math.sqrt(2.0) * v.imag)
            cols.append(math.sqrt(2.0) * v.real)
            theta.append(math.pi * j / k)
    m = np.column_stack(cols)
    assert np.abs(m.T @ m - np.eye(n2)).max() < 1e-9, "intertwiner not orthogonal"
    j0 = blockdiag(*[rot(t) for t in theta])
    assert np.abs(m.T @ a @ m - j0).max() < 1e-9, "intertwiner does not canonicalize"
    d = np.linalg.det(m)
    assert abs(abs(d) - 1.0) < 1e-9
    return 1 if d > 0 else -1


def ad_order(a, k):
    return k if np.abs(matpow(a, k) + np.eye(a.shape[0])).max() < 1e-9 else 2 * k


def adj_matrix(a):
    """Conjugation X -> A X A^T as a matrix on column-major vec(X)."""
    return np.kron(a, a)


def resolvent(u, order, j):
    n = u.shape[0]
    out = np.zeros((n, n), dtype=complex)
    pw = np.eye(n)
    for l in range(order):
        out += np.exp(-2j * math.pi * j * l / order) * pw
        pw = pw @ u
    return out / order


def transpose_op(n2):
    t = np.zeros((n2 * n2, n2 * n2))
    for i in range(n2):
        for j in range(n2):
            t[i + n2 * j, j + n2 * i] = 1.0
    return t


def proj_rank(p):
    tr = np.trace(p)
    assert abs(tr.imag) < 1e-8
    r = round(tr.real)
    assert abs(tr.real - r) < 1e-8
    return r


def ad_ranks(a, r):
    n2 = a.shape[0]
    adj = adj_matrix(a)
    t = transpose_op(n2)
    p_so = (np.eye(n2 * n2) - t) / 2.0
    p_jso = (np.eye(n2 * n2) - np.kron(a.T, a) @ t) / 2.0
    full, so, jso = [], [], []
    for j in range(r):
        pi = resolvent(adj, r, j)
        full.append(proj_rank(pi))
        so.append(proj_rank(pi @ p_so))
        jso.append(proj_rank(pi @ p_jso))
    return full, so, jso


def jso_basis(a):
    """Orthonormal basis of A.so(2n), vectorized columns."""
    n2 = a.shape[0]
    cols = []
    for i in range(n2):
        for j in range(i + 1, n2):
            s = np.zeros((n2, n2))
            s[i, j] = 1.0 / math.sqrt(2.0)
            s[j, i] = -1.0 / math.sqrt(2.0)
            cols.append((a @ s).reshape(-1, order="F"))
    return np.column_stack(cols)


def power_diff_op(a, c):
    """B -> sum_{p+l=c-1} A^p B A^l, as a matrix on vec."""
    n2 = a.shape[0]
    out = np.zeros((n2 * n2, n2 * n2))
    for p in range(c):
        l = c - 1 - p
        out += np.kron(matpow(a, l).T, matpow(a, p))
    return out


def tangent_dims(a, r, jpow=None):
    b = jso_basis(a)
    rows = [power_diff_op(a, r) @ b]
    if jpow is not None:
        rows.append(power_diff_op(a, jpow) @ b)
    stacked = np.vstack(rows)
    sv = np.linalg.svd(stacked, compute_uv=False)
    return int(np.sum(sv < 1e-6))


def alj_residual(a, r, j):
    n2 = a.shape[0]
    adj = adj_matrix(a)
    g = math.gcd(r, j)
    p = r // g
    jp = (j // g) % p
    jp_inv = pow(jp, -1, p)
    adj_j = matpow(adj, j)
    worst = 0.0
    for l in range(p):
        lhs = resolvent(adj_j, p, l)
        lp = (jp_inv * l) % p
        rhs = np.zeros_like(lhs)
        for q in range(g):
            rhs += resolvent(adj, r, q * p + lp)
        worst = max(worst, np.abs(lhs - rhs).max())
    return worst


def load_fixture(path):
    with open(path) as f:
        data = json.load(f)
    return np.array(data["matrix"], dtype=float), int(data["k"])


def report(name, a, k, jpow=None):
    r = ad_order(a, k)
    full, so, jso = ad_ranks(a, r)
    out = {
        "name": name,
        "n": a.shape[0] // 2,
        "k": k,
        "r": r,
        "p": eigen_multiplicities(a, k),
        "eps": eps_sign(a, k),
        "rank_full": full,
        "rank_so": so,
        "rank_jso": jso,
        "tangent_full": tangent_dims(a, r),
        "alj_j2": alj_residual(a, r, 2),
    }
    if jpow is not None:
        out["tangent_pow%d" % jpow] = tangent_dims(a, r, jpow)
    return out


def main():
    here = os.path.dirname(os.path.abspath(__file__))
    fdir = os.path.join(os.path.dirname(here), "fixtures")
    cases = []

    a, k = load_fixture(os.path.join(fdir, "isometry_r2_rot90.json"))
    cases.append(report("r2_rot90", a, k))
    cases.append(report("r2_rot270", a.T, k))

    a, k = load_fixture(os.path.join(fdir, "isometry_r6_order6.json"))
    cases.append(report("r6_order6", a, k, jpow=2))
    cases.append(report("r6_inverse", a.T, k))

    cases.append(report("r4_k3", blockdiag(rot(math.pi / 3), rot(2 * math.pi / 3)), 3))
    cases.append(report("cx4", blockdiag(rot(math.pi / 2), rot(math.pi / 2)), 2, jpow=2))
    cases.append(report("cx4_inverse", blockdiag(rot(-math.pi / 2), rot(-math.pi / 2)), 2))
    cases.append(report("odd_r", blockdiag(rot(math.pi / 3), rot(math.pi / 3)), 3, jpow=2))

    json.dump(cases, sys.stdout, indent=1, default=float)
    print()


if __name__ == "__main__":
    main()
