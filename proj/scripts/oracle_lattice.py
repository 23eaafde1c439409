#!/usr/bin/env python3
"""Single-cell oracle for the lattice residual identities.

Every residual display is algebraic in the point values and first
derivatives of the 1-form components, so independent random samples of
(a, b, dx a, dx b, dy a, dy b) on one cell decide each identity and each
coefficient exactly.  Confirmed values are frozen into tests/test_lattice.cpp
and tests/test_loopsys.cpp.

Cell conventions (shared with src/lattice.cpp):
  d(alpha)        = dx b - dy a
  d*(alpha)       = dx a + dy b            (* on 1-forms: (a,b) -> (-b,a))
  [beta^gamma]    = [beta_a, gamma_b] - [beta_b, gamma_a]
  dzbar(u dz)     = i dx u - dy u
  dz(v dzbar)     = -i dx v - dy v
  [v dzbar^u dz]  = 2i [v, u]
"""

import json
import os
import sys

import numpy as np

FIX = os.path.join(os.path.dirname(__file__), "..", "fixtures")
rng = np.random.default_rng(20240817)


class Alg:
    def __init__(self, path):
        d = json.load(open(path))
        self.c = np.array(d["algebra"]["c"])
        self.tau = np.array(d["matrix"])
        self.K = int(d["order"])
        self.dim = self.c.shape[0]

    def br(self, x, y):
        return np.einsum("ijk,i,j->k", self.c, x, y)

    def proj(self, j):
        w = np.exp(2j * np.pi / self.K)
        p = np.zeros((self.dim, self.dim), complex)
        m = np.eye(self.dim)
        for l in range(self.K):
            p = p + w ** (-j * l) * m
            m = self.tau @ m
        return p / self.K

    def canonical_j(self, m):
        j0 = np.zeros((self.dim, self.dim), complex)
        for j in range(1, m + 1):
            j0 += 1j * (self.proj(-j) - self.proj(j))
        assert np.abs(j0.imag).max() < 1e-12
        return j0.real


class Cell:
    """One cell of an algebra-valued 1-form: values and first derivatives."""

    def __init__(self, a, b, dxa, dxb, dya, dyb):
        self.a, self.b = a, b
        self.dxa, self.dxb, self.dya, self.dyb = dxa, dxb, dya, dyb

    @staticmethod
    def random_real(dim):
        return Cell(*(rng.standard_normal(dim) for _ in range(6)))

    def apply(self, m):
        return Cell(m @ self.a, m @ self.b, m @ self.dxa, m @ self.dxb,
                    m @ self.dya, m @ self.dyb)

    def conj(self):
        return Cell(*(np.conj(v) for v in
                      (self.a, self.b, self.dxa, self.dxb, self.dya, self.dyb)))


def dstar(c):
    return c.dxa + c.dyb


def dcell(c):
    return c.dxb - c.dya


def wb(alg, beta, gamma):
    return alg.br(beta.a, gamma.b) - alg.br(beta.b, gamma.a)


def val(x, y):
    z = np.zeros(len(x), dtype=np.result_type(x, y))
    return Cell(np.asarray(x), np.asarray(y), z, z, z, z)


def u_split(c):
    """(1,0) coefficient cell: u = (a - i b)/2 with matching derivatives."""
    z = np.zeros(len(c.a), complex)
    return Cell(0.5 * (c.a - 1j * c.b), z,
                0.5 * (c.dxa - 1j * c.dxb), z,
                0.5 * (c.dya - 1j * c.dyb), z)


def u_cell(u, dxu, dyu):
    z = np.zeros_like(u)
    return Cell(u, z, dxu, z, dyu, z)


def dbar_cell(u):
    return 1j * u.dxa - u.dya


def del_cell(v):
    return -1j * v.dxa - v.dya


def s_cells_from_band(alg, us, m):
    """Residual cells S_0..S_m from u-band cells us[j] (values in g_{-j})."""
    out = []
    for j in range(m + 1):
        if j == 0:
            s = dbar_cell(us[0]) + del_cell(us[0].conj())
            for i in range(m + 1):
                s = s - 2j * alg.br(us[i].a, np.conj(us[i].a))
        else:
            s = dbar_cell(us[j])
            for i in range(m - j + 1):
                s = s + 2j * alg.br(np.conj(us[i].a), us[i + j].a)
        out.append(s)
    return out


def s_cells(alg, cell, m):
    us = [u_split(cell.apply(alg.proj(-j).astype(complex))) for j in range(m + 1)]
    return s_cells_from_band(alg, us, m)


def band_to_real_cell(us):
    """Real 1-form cell assembled from a u-band: alpha = sum (u_j dz + conj)."""
    a = sum(2 * u.a.real for u in us)
    b = sum(2 * (1j * u.a).real for u in us)
    dxa = sum(2 * u.dxa.real for u in us)
    dxb = sum(2 * (1j * u.dxa).real for u in us)
    dya = sum(2 * u.dya.real for u in us)
    dyb = sum(2 * (1j * u.dya).real for u in us)
    return Cell(a, b, dxa, dxb, dya, dyb)


def random_band(alg, m):
    us = []
    for j in range(m + 1):
        pj = alg.proj(-j)
        rc = lambda: pj @ (rng.standard_normal(alg.dim)
                           + 1j * rng.standard_normal(alg.dim))
        us.append(u_cell(rc(), rc(), rc()))
    return us


def tension(alg, cell, p0, pn):
    """d*alpha_n + [alpha_0 ^ *alpha_n] cell (the torsion-family term vanishes)."""
    cn = cell.apply(pn)
    a0, b0 = p0 @ cell.a, p0 @ cell.b
    return dstar(cn) + alg.br(a0, cn.a) + alg.br(b0, cn.b)


def torsion0(alg, pn, x, y):
    return -(pn @ alg.br(x, y))


def act_dot(alg, pn, j0, x, y):
    return -(j0 @ torsion0(alg, pn, j0 @ x, j0 @ y))


def act_circ(alg, pn, j0, x, y):
    t = lambda u, v: torsion0(alg, pn, u, v)
    return t(j0 @ x, y) + t(x, j0 @ y) - j0 @ t(x, y)


def act_star(alg, pn, j0, x, y):
    return 0.5 * (act_dot(alg, pn, j0, x, y) + act_circ(alg, pn, j0, x, y))


def act_bullet(alg, pn, f, p_h, x, y):
    t = lambda u, v: torsion0(alg, pn, u, v)
    d = lambda u, v: t(u, v) - p_h @ t(p_h @ u, p_h @ v)
    return -(f @ t(f @ x, f @ y)) + d(f @ x, y) + d(x, f @ y) - f @ d(x, y)


def mx(v):
    return float(np.abs(np.asarray(v)).max())


def report(name, v):
    print(f"{name:<64s} {v:.3e}")


def fit(name, basis_rows, target_rows):
    """Least-squares coefficients of target on basis, stacked over trials."""
    A = np.concatenate([np.stack(cols, axis=1) for cols in basis_rows], axis=0)
    b = np.concatenate(target_rows, axis=0)
    coef, *_ = np.linalg.lstsq(A, b, rcond=None)
    resid = mx(A @ coef - b)
    print(f"{name:<52s} coef={np.array2string(coef, precision=6)} resid={resid:.3e}")
    return coef, resid


def model_checks():
    alg = Alg(os.path.join(FIX, "su3_order3.json"))
    p0 = alg.proj(0).real
    pn = np.eye(alg.dim) - p0
    j0 = alg.canonical_j(1)
    pm1, pp1 = alg.proj(-1), alg.proj(1)
    print("== su3_order3 model case ==")
    for trial in range(4):
        cell = Cell.random_real(alg.dim)
        s0, s1, s2 = s_cells(alg, cell, 2)
        mc = dcell(cell) + alg.br(cell.a, cell.b)
        cn = cell.apply(pn)
        tau_c = tension(alg, cell, p0, pn)
        t1 = pn @ alg.br(cn.a, cn.b)
        r1 = t1 + j0 @ tau_c
        mcc = mc.astype(complex)
        report(f"  P(0)MC == S0                              (trial {trial})",
               mx(alg.proj(0) @ mcc - s0))
        report(f"  P(-1)MC == S1 + conj S2                   (trial {trial})",
               mx(pm1 @ mcc - (s1 + np.conj(s2))))
        report(f"  P(-1)(T1 + J tau) == 2 S1 - P(-1)MC       (trial {trial})",
               mx(pm1 @ r1.astype(complex) - (2 * s1 - pm1 @ mcc)))
        report(f"  P(+1)(-T1 - J tau) == 2 S2 - P(+1)MC      (trial {trial})",
               mx(pp1 @ (-r1).astype(complex) - (2 * s2 - pp1 @ mcc)))
        rinv = -(j0 @ r1)
        report(f"  printed label -i(S1 + conj S2) vs P(-1) inv (trial {trial})",
               mx((-1j) * (s1 + np.conj(s2)) - pm1 @ rinv.astype(complex)))
        report(f"  derived -i(S1 - conj S2) vs P(-1) inv     (trial {trial})",
               mx((-1j) * (s1 - np.conj(s2)) - pm1 @ rinv.astype(complex)))
        jc = val(j0 @ cn.a, j0 @ cn.b)
        rstar = tau_c + 0.5 * (pn @ wb(alg, jc, cn))
        report(f"  star residual == -J (T1 + J tau)          (trial {trial})",
               mx(rstar - rinv))
        report(f"  quartic term == 0 on 3-symmetric          (trial {trial})",
               mx(j0 @ (pn @ (wb(alg, jc, jc) + wb(alg, cn, cn)))))


def odd_checks(name, m_levels):
    alg = Alg(os.path.join(FIX, name + ".json"))
    K = alg.K
    k = (K - 1) // 2
    p0 = alg.proj(0).real
    pn = np.eye(alg.dim) - p0
    j0 = alg.canonical_j(m_levels)
    print(f"== {name} (odd, k'={K}) ==")
    dot_resid = 0.0
    quart_basis, quart_target = [], []
    cross_basis, cross_target = [], []
    for trial in range(8):
        cell = Cell.random_real(alg.dim)
        cn = cell.apply(pn)
        jc = val(j0 @ cn.a, j0 @ cn.b)
        tau_c = tension(alg, cell, p0, pn)
        disp_dot = tau_c - 0.5 * (j0 @ (pn @ wb(alg, jc, jc)))
        dot_resid = max(dot_resid,
                        mx(disp_dot - (tau_c - act_dot(alg, pn, j0, cn.a, cn.b))))
        base = tau_c + 0.5 * (pn @ wb(alg, jc, cn))
        target = (tau_c - act_star(alg, pn, j0, cn.a, cn.b)) - base
        quart = 0.25 * (j0 @ (pn @ (wb(alg, jc, jc) + wb(alg, cn, cn))))
        quart_basis.append([quart])
        quart_target.append(target)
        if k >= 2:
            cross = np.zeros(alg.dim)
            for i in range(1, k + 1):
                for j in range(i + 1, k + 1):
                    mi = (alg.proj(i) + alg.proj(-i)).real
                    mj = (alg.proj(j) + alg.proj(-j)).real
                    mji = (alg.proj(j - i) + alg.proj(i - j)).real
                    ci = cell.apply(mi)
                    cj = cell.apply(mj)
                    cross = cross + mji @ wb(alg, val(j0 @ ci.a, j0 @ ci.b), cj)
            cross_basis.append([cross])
            cross_target.append(target)
    report("  dot display vs tensor, max over trials", dot_resid)
    fit("  star: quarter-term coeff vs tensor", quart_basis, quart_target)
    if k >= 2:
        fit("  star: grouped cross-sum coeff vs tensor", cross_basis, cross_target)


def even_checks(name):
    alg = Alg(os.path.join(FIX, name + ".json"))
    K = alg.K
    k = K // 2
    p0 = alg.proj(0).real
    pv = alg.proj(k).real
    pn = np.eye(alg.dim) - p0
    pm = pn - pv
    f0 = alg.canonical_j(k - 1)
    print(f"== {name} (even, k'={K}) ==")
    basis, target = [], []
    cross_mag = 0.0
    for trial in range(8):
        cell = Cell.random_real(alg.dim)
        cn = cell.apply(pn)
        cm = cell.apply(pm)
        cv = cell.apply(pv)
        jm = val(f0 @ cm.a, f0 @ cm.b)
        tau_c = tension(alg, cell, p0, pn)
        tens = tau_c - act_bullet(alg, pn, f0, pm, cn.a, cn.b)
        cross = np.zeros(alg.dim)
        for i in range(1, k):
            for j in range(i + 1, k):
                mi = (alg.proj(i) + alg.proj(-i)).real
                mj = (alg.proj(j) + alg.proj(-j)).real
                mji = (alg.proj(j - i) + alg.proj(i - j)).real
                ci = cell.apply(mi)
                cj = cell.apply(mj)
                cross = cross + mji @ wb(alg, val(f0 @ ci.a, f0 @ ci.b), cj)
        cross_mag = max(cross_mag, mx(cross))
        cols = [pv @ wb(alg, jm, cm), pm @ wb(alg, jm, cm), wb(alg, cv, jm), cross]
        basis.append(cols)
        target.append(tens - tau_c)
        # derived closed form: tau + P_v WB(F a, a) - F[Fa, Fb] + 2 WB(F a_m, a_k)
        disp = (tau_c + pv @ wb(alg, jm, cm)
                - f0 @ alg.br(jm.a, jm.b)
                + 2.0 * wb(alg, jm, cv))
        report(f"  closed-form display vs bullet tensor      (trial {trial})",
               mx(disp - tens))
        ddot = tau_c - 0.5 * (f0 @ (pn @ wb(alg, jm, jm)))
        report(f"  dot display vs dot tensor (f-structure)   (trial {trial})",
               mx(ddot - (tau_c - act_dot(alg, pn, f0, cn.a, cn.b))))
    print(f"  cross-sum magnitude over trials: {cross_mag:.3e}")
    fit("  bullet [g_k wb, m wb, a_k term, cross] fit", basis, target)


def even_deter_checks():
    alg = Alg(os.path.join(FIX, "su3_order4.json"))
    m = 2
    print("== su3_order4 regrouping (k'=4, m=2) ==")
    for trial in range(3):
        us = random_band(alg, m)
        cell = band_to_real_cell(us)
        s = s_cells_from_band(alg, us, m)
        mc = (dcell(cell) + alg.br(cell.a, cell.b)).astype(complex)
        report(f"  [MC]_g0 == S0                             (trial {trial})",
               mx(alg.proj(0) @ mc - s[0]))
        report(f"  [MC]_g-1 == S1                            (trial {trial})",
               mx(alg.proj(-1) @ mc - s[1]))
        report(f"  [MC]_gk == 2 Re S2                        (trial {trial})",
               mx(alg.proj(2) @ mc - (s[2] + np.conj(s[2]))))
        pv = alg.proj(2).real
        p0r = alg.proj(0).real
        cv = cell.apply(pv)
        ek = dstar(cv) + alg.br(p0r @ cell.a, cv.a) + alg.br(p0r @ cell.b, cv.b)
        report(f"  d*a_k + [a_0 ^ *a_k] == 2 Im S2           (trial {trial})",
               mx(ek - 2 * np.imag(s[2])))
        for p in range(0, 2 * m + 1):
            coef = np.zeros(alg.dim, complex)
            if p == 0:
                coef = dbar_cell(us[0]) + del_cell(us[0].conj())
            elif p <= m:
                coef = dbar_cell(us[p]).copy()
            for i in range(0, m - p + 1):
                coef = coef + 2j * alg.br(np.conj(us[i].a), us[i + p].a)
            want = s[p] if p <= m else np.zeros(alg.dim)
            label = f"c(-{p}) == S{p}" if p <= m else f"c(-{p}) == 0"
            report(f"  {label:<41s} (trial {trial})", mx(coef - want))


def odd_deter_checks():
    alg = Alg(os.path.join(FIX, "su3_order5.json"))
    k, m = 2, 3
    print("== su3_order5 regrouping (k'=5, m=3) ==")
    for trial in range(3):
        us = random_band(alg, m)
        cell = band_to_real_cell(us)
        s = s_cells_from_band(alg, us, m)
        mc = (dcell(cell) + alg.br(cell.a, cell.b)).astype(complex)
        report(f"  [MC]_g0 == S0                             (trial {trial})",
               mx(alg.proj(0) @ mc - s[0]))
        report(f"  [MC]_g-1 == S1                            (trial {trial})",
               mx(alg.proj(-1) @ mc - s[1]))
        report(f"  [MC]_g-2 == S2 + conj S3                  (trial {trial})",
               mx(alg.proj(-2) @ mc - (s[2] + np.conj(s[3]))))
        pmk = (alg.proj(k) + alg.proj(-k)).real
        pm1r = (alg.proj(1) + alg.proj(-1)).real
        cmk = cell.apply(pmk)
        c1 = cell.apply(pm1r)
        p0r = alg.proj(0).real
        disp = (dstar(cmk) + alg.br(p0r @ cell.a, cmk.a) + alg.br(p0r @ cell.b, cmk.b)
                + pmk @ (alg.br(c1.a, cmk.a) + alg.br(c1.b, cmk.b)))
        report(f"  top-block vertical display == 2 Im(S2+S3) (trial {trial})",
               mx(disp - 2 * np.imag(s[2] + s[3])))


def main():
    model_checks()
    odd_checks("su3_order3", 1)
    odd_checks("su3_order5", 2)
    odd_checks("su3_order5b", 2)
    even_checks("su3_order4")
    even_checks("su3_order6")
    even_checks("su4_order6")
    even_deter_checks()
    odd_deter_checks()
    return 0


if __name__ == "__main__":
    sys.exit(main())
