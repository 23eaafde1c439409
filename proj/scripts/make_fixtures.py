#!/usr/bin/env python3
"""Regenerates the JSON fixtures under fixtures/.

Structure constants are written from exact tables; automorphism matrices are
computed in a matrix realization and written at full float precision.  Run from
the repository root:  python3 scripts/make_fixtures.py
"""

import json
import math
import os

import numpy as np

OUT = os.path.join(os.path.dirname(__file__), "..", "fixtures")


def su2_constants():
    # [e1,e2]=e3, [e2,e3]=e1, [e3,e1]=e2
    c = np.zeros((3, 3, 3))
    for (i, j, k) in [(0, 1, 2), (1, 2, 0), (2, 0, 1)]:
        c[i, j, k] = 1.0
        c[j, i, k] = -1.0
    return c


def su3_constants():
    # Basis T_a = -(i/2) lambda_a, a=1..8: [T_a,T_b] = f_abc T_c with the
    # standard totally antisymmetric f table.
    s3 = math.sqrt(3.0) / 2.0
    f = {
        (1, 2, 3): 1.0,
        (1, 4, 7): 0.5,
        (1, 5, 6): -0.5,
        (2, 4, 6): 0.5,
        (2, 5, 7): 0.5,
        (3, 4, 5): 0.5,
        (3, 6, 7): -0.5,
        (4, 5, 8): s3,
        (6, 7, 8): s3,
    }
    c = np.zeros((8, 8, 8))
    for (a, b, k), v in f.items():
        for (i, j, kk), w in (
            ((a, b, k), v), ((b, k, a), v), ((k, a, b), v),
            ((b, a, k), -v), ((a, k, b), -v), ((k, b, a), -v),
        ):
            c[i - 1, j - 1, kk - 1] = w
    return c


def gell_mann():
    l = np.zeros((8, 3, 3), dtype=complex)
    l[0][0, 1] = l[0][1, 0] = 1
    l[1][0, 1] = -1j
    l[1][1, 0] = 1j
    l[2][0, 0] = 1
    l[2][1, 1] = -1
    l[3][0, 2] = l[3][2, 0] = 1
    l[4][0, 2] = -1j
    l[4][2, 0] = 1j
    l[5][1, 2] = l[5][2, 1] = 1
    l[6][1, 2] = -1j
    l[6][2, 1] = 1j
    l[7][0, 0] = l[7][1, 1] = 1 / math.sqrt(3.0)
    l[7][2, 2] = -2 / math.sqrt(3.0)
    return l


def su3_basis():
    return np.array([-0.5j * m for m in gell_mann()])


def gell_mann_n(n):
    # Generalized Gell-Mann matrices, normalized tr(l_a l_b) = 2 delta_ab.
    out = []
    for j in range(n):
        for k in range(j + 1, n):
            s = np.zeros((n, n), complex)
            s[j, k] = s[k, j] = 1
            out.append(s)
            a = np.zeros((n, n), complex)
            a[j, k] = -1j
            a[k, j] = 1j
            out.append(a)
    for d in range(1, n):
        m = np.zeros((n, n), complex)
        for i in range(d):
            m[i, i] = 1
        m[d, d] = -d
        out.append(m * math.sqrt(2.0 / (d * (d + 1))))
    return np.array(out)


def sun_basis(n):
    return np.array([-0.5j * m for m in gell_mann_n(n)])


def coords_su3(X, T):
    # tr(T_a T_b) = -delta_ab / 2
    return np.array([(-2.0 * np.trace(X @ T[a])).real for a in range(len(T))])


def ad_action_matrix(T, phi):
    # Matrix of X -> phi(X) in the T-basis.
    n = len(T)
    M = np.zeros((n, n))
    for b in range(n):
        M[:, b] = coords_su3(phi(T[b]), T)
    return M


def check_automorphism(c, M, order):
    n = c.shape[0]
    for i in range(n):
        for j in range(n):
            lhs = M @ c[i, j]
            rhs = np.einsum("i,j,ijk->k", M[:, i], M[:, j], c)
            assert np.abs(lhs - rhs).max() < 1e-12, (i, j)
    P = np.eye(n)
    for p in range(1, order):
        P = M @ P
        assert np.abs(P - np.eye(n)).max() > 1e-6, f"order not minimal at {p}"
    P = M @ P
    assert np.abs(P - np.eye(n)).max() < 1e-12, "order wrong"


def algebra_json(dim, labels, c):
    return {"dim": dim, "labels": labels, "c": c.tolist()}


def dump(name, obj):
    path = os.path.join(OUT, name)
    os.makedirs(os.path.dirname(path), exist_ok=True)
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=1)
        fh.write("\n")
    print("wrote", path)


def main():
    c2 = su2_constants()
    su2 = algebra_json(3, ["e1", "e2", "e3"], c2)
    dump("su2.json", su2)

    tau_inv = np.diag([-1.0, -1.0, 1.0])
    check_automorphism(c2, tau_inv, 2)
    dump("su2_involution.json", {
        "name": "su2_involution",
        "algebra": su2,
        "order": 2,
        "matrix": tau_inv.tolist(),
    })
    dump("su2_identity.json", {
        "name": "su2_identity",
        "algebra": su2,
        "order": 1,
        "matrix": np.eye(3).tolist(),
    })

    c3 = su3_constants()
    labels3 = [f"T{a}" for a in range(1, 9)]
    su3 = algebra_json(8, labels3, c3)
    dump("su3.json", su3)

    T = su3_basis()
    # structure-constant consistency against the matrix realization
    for i in range(8):
        for j in range(8):
            comm = T[i] @ T[j] - T[j] @ T[i]
            assert np.abs(coords_su3(comm, T) - c3[i, j]).max() < 1e-12

    for name, diag, order in [
        ("su3_order3", [1.0, np.exp(2j * np.pi / 3), np.exp(4j * np.pi / 3)], 3),
        ("su3_order4", [1.0, 1j, -1.0], 4),
        ("su3_order5", [1.0, np.exp(2j * np.pi / 5), np.exp(6j * np.pi / 5)], 5),
        ("su3_order5b", [1.0, np.exp(2j * np.pi / 5), np.exp(4j * np.pi / 5)], 5),
        ("su3_order6", [1.0, np.exp(1j * np.pi / 3), -1.0], 6),
    ]:
        D = np.diag(diag)
        Dinv = np.conj(D).T
        M = ad_action_matrix(T, lambda X: D @ X @ Dinv)
        check_automorphism(c3, M, order)
        dump(name + ".json", {
            "name": name,
            "algebra": su3,
            "order": order,
            "matrix": M.tolist(),
        })

    # su(4): structure constants from the matrix realization.
    T4 = sun_basis(4)
    n4 = len(T4)
    for i in range(n4):
        for j in range(n4):
            assert abs(np.trace(T4[i] @ T4[j]).real + 0.5 * (i == j)) < 1e-12
    c4 = np.zeros((n4, n4, n4))
    for i in range(n4):
        for j in range(n4):
            c4[i, j] = coords_su3(T4[i] @ T4[j] - T4[j] @ T4[i], T4)
    su4 = algebra_json(n4, [f"U{a}" for a in range(1, n4 + 1)], c4)

    # Order-6 grading with a 2-dimensional top block and nonzero cross
    # brackets between the intermediate horizontal blocks.
    w6 = np.exp(1j * np.pi / 3)
    D = np.diag([1.0, w6, w6 ** 2, w6 ** 4])
    Dinv = np.conj(D).T
    M = ad_action_matrix(T4, lambda X: D @ X @ Dinv)
    check_automorphism(c4, M, 6)
    dump("su4_order6.json", {
        "name": "su4_order6",
        "algebra": su4,
        "order": 6,
        "matrix": M.tolist(),
    })

    # Isometry classification examples for the CLI.
    def rot(t):
        return np.array([[math.cos(t), -math.sin(t)], [math.sin(t), math.cos(t)]])

    dump("isometry_r2_rot90.json", {"matrix": rot(math.pi / 2).tolist(), "k": 2})
    J6 = np.zeros((6, 6))
    J6[0:2, 0:2] = rot(math.pi / 3)
    J6[2:4, 2:4] = rot(2 * math.pi / 3)
    J6[4:6, 4:6] = rot(math.pi / 3)
    dump("isometry_r6_order6.json", {"matrix": J6.tolist(), "k": 3})

    # A flat geodesic band field on the symmetric su(2) fixture: u1 = pi*e1 dz,
    # u0 = 0.  Satisfies every system equation exactly at the continuum level.
    nx = ny = 16
    zeros = [[([0.0, 0.0, 0.0]) for _ in range(nx)] for _ in range(ny)]
    u1re = [[([math.pi, 0.0, 0.0]) for _ in range(nx)] for _ in range(ny)]
    dump("fields/su2_geodesic_16.json", {
        "automorphism_file": "su2_involution.json",
        "kprime": 2,
        "m": 1,
        "nx": nx,
        "ny": ny,
        "h": 1.0 / nx,
        "u": [
            {"re": zeros, "im": zeros},
            {"re": u1re, "im": zeros},
        ],
    })


if __name__ == "__main__":
    main()
