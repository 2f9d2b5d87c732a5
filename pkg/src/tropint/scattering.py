"""Numerical CHY layer: scattering equations, Parke-Taylor vectors, Gram matrix.

Three punctures are fixed at finite positions (default 0, 1, 2) and the
equations for the remaining n-3 punctures are cleared to a polynomial
system.  Start points come from total-degree homotopy paths and are
finished by deflated Newton iteration.
Roots are then polished in mpmath so that the Gram matrix

    m(a, b) = sum_I PT_I(a) PT_I(b) / det'Phi_I

is accurate far beyond the 1e-9 agreement required against the exact
rational tree sums.
"""
from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Sequence

import mpmath
import numpy as np
from scipy.stats import qmc

from .amplitudes import MandelstamMatrix, amplitude_unsigned
from .exact import rational_rank
from .orderings import OrderingCatalog

__all__ = [
    "ScatteringError",
    "ScatteringSolutionSet",
    "GramAmplitudeMatrix",
    "SignInference",
    "solve_scattering",
    "gram_matrix",
    "sign_inference",
    "numerical_rank",
    "singular_value_ratio",
    "zero_pattern",
    "solutions_to_json",
    "save_solutions",
    "exact_unsigned_matrix",
]

DEFAULT_GAUGE = (0, 1, 2)
RESIDUAL_BOUND = 1e-10
SEPARATION_TOL = 1e-6
RESTART_BUDGET = 10_000
DEFAULT_DPS = 40


class ScatteringError(RuntimeError):
    pass


# --------------------------------------------------------------- equations


def _equations(s, x, free):
    """Values f_a for a in ``free`` and the Jacobian (= reduced Hessian Phi)."""
    n = len(x)
    f = []
    jac = []
    for a in free:
        fa = 0
        row = []
        diag = 0
        for b in range(n):
            if b == a:
                continue
            d = x[a] - x[b]
            fa += s[a][b] / d
            diag -= s[a][b] / (d * d)
        for c in free:
            if c == a:
                row.append(diag)
            else:
                d = x[a] - x[c]
                row.append(s[a][c] / (d * d))
        f.append(fa)
        jac.append(row)
    return f, jac


def _all_residuals(s, x) -> list:
    n = len(x)
    return [sum(s[a][b] / (x[a] - x[b]) for b in range(n) if b != a) for a in range(n)]


def _cleared_correction(x, free, f):
    """diag(f) K, where the cleared equation is g_a = f_a prod_{b != a} (x_a - x_b).

    Newton on g solves (J_f + diag(f) K) dx = -f with
    K_aa = sum_b 1/(x_a - x_b) and K_ac = -1/(x_a - x_c).
    """
    n = len(x)
    out = np.zeros((len(free), len(free)), dtype=complex)
    for i, a in enumerate(free):
        for k, c in enumerate(free):
            if c == a:
                out[i, k] = f[i] * sum(1 / (x[a] - x[b]) for b in range(n) if b != a)
            else:
                out[i, k] = -f[i] / (x[a] - x[c])
    return out


def _newton(s, x, free, known, direction, max_iter=80):
    """Newton on the cleared polynomial system, deflated by prod_j 1/(v_j . (x - r_j))."""
    x = np.array(x, dtype=complex)
    for _ in range(max_iter):
        f, jac = _equations(s, x, free)
        f = np.array(f)
        jac = np.array(jac) + _cleared_correction(x, free, f)
        if known:
            w = np.zeros(len(free), dtype=complex)
            xf = x[free]
            for r, v in zip(known, direction):
                w += v / np.dot(v, xf - r)
            jac = jac - np.outer(f, w)
        try:
            step = np.linalg.solve(jac, -f)
        except np.linalg.LinAlgError:
            return None
        norm = np.linalg.norm(step)
        scale = 1.0 + np.linalg.norm(x[free])
        if norm > scale:
            step *= scale / norm
        x[free] += step
        if not np.all(np.isfinite(x)):
            return None
        if norm < 1e-13 * scale:
            break
    return x


def _poly_system(s, x, free):
    """Cleared equations g_a = f_a prod_{c != a} (x_a - x_c) and their Jacobian.

    ``s`` is a float array.  Written through f and 1/(x_a - x_c), which is
    fine away from collisions; paths never pass through one.
    """
    idx = np.arange(len(free))
    d = x[free, None] - x[None, :]
    d[idx, free] = 1.0
    inv = 1.0 / d
    inv[idx, free] = 0.0
    sf = s[free]
    f = (sf * inv).sum(axis=1)
    p = d.prod(axis=1)
    inv_ff = inv[:, free]
    jac = sf[:, free] * inv_ff**2 - f[:, None] * inv_ff
    jac[idx, idx] = -(sf * inv**2).sum(axis=1) + f * inv.sum(axis=1)
    return p * f, p[:, None] * jac


def _start_radii(dim: int) -> np.ndarray:
    # distinct generic circles, so no start point meets a gauge point or another puncture
    k = np.arange(dim)
    return (1.3 + 0.37 * k) * np.exp(1j * (0.41 + 0.23 * k))


def _track(s, x0, free, gamma, degree, max_steps=4000):
    """Follow H = (1 - t) g + t gamma (x^D - c^D) from t = 1 to t = 0; None if the path escapes."""
    x = np.array(x0, dtype=complex)
    xf = x[free].copy()
    shift = _start_radii(len(free)) ** degree

    def h(y, t):
        x[free] = y
        g, jg = _poly_system(s, x, free)
        q = y**degree - shift
        jq = np.diag(degree * y ** (degree - 1))
        return (1 - t) * g + t * gamma * q, (1 - t) * jg + t * gamma * jq, gamma * q - g

    def velocity(y, t):
        _, jh, ht = h(y, t)
        return np.linalg.solve(jh, -ht)

    t, dt = 1.0, 0.02
    for _ in range(max_steps):
        if t <= 0:
            break
        dt = min(dt, t)
        try:
            k1 = velocity(xf, t)
            k2 = velocity(xf - 0.5 * dt * k1, t - 0.5 * dt)
            k3 = velocity(xf - 0.5 * dt * k2, t - 0.5 * dt)
            k4 = velocity(xf - dt * k3, t - dt)
            y = xf - dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
            t1 = t - dt
            ok = False
            for _ in range(3):
                hv, jh, _ = h(y, t1)
                step = np.linalg.solve(jh, -hv)
                y = y + step
                if np.linalg.norm(step) < 1e-9 * (1 + np.linalg.norm(y)):
                    ok = True
                    break
        except np.linalg.LinAlgError:
            ok = False
        if ok and np.all(np.isfinite(y)):
            xf, t = y, t1
            dt *= 1.5
            if np.linalg.norm(xf) > 1e8:
                return None
        else:
            dt *= 0.5
            if dt < 1e-13:
                return None
    if t > 0:
        return None
    x[free] = xf
    return x


def _polish(s, x, free, steps=6):
    x = np.array(x, dtype=complex)
    for _ in range(steps):
        f, jac = _equations(s, x, free)
        try:
            x[free] += np.linalg.solve(np.array(jac), -np.array(f))
        except np.linalg.LinAlgError:
            return None
    return x


def _mp_polish(s_mp, x, free, dps, steps=8):
    with mpmath.workdps(dps):
        xs = [mpmath.mpc(complex(v)) for v in x]
        for _ in range(steps):
            f, jac = _equations(s_mp, xs, free)
            step = mpmath.lu_solve(mpmath.matrix(jac), -mpmath.matrix(f))
            for k, a in enumerate(free):
                xs[a] += step[k]
        return xs


@dataclass
class ScatteringSolutionSet:
    n: int
    kinematics: MandelstamMatrix
    gauge: tuple
    solutions: list  # each a complex array of the n-3 free positions
    residual_bound: float
    max_residual: float
    starts_used: int
    precise: list = field(repr=False, default_factory=list)  # mpmath positions, all n
    dps: int = DEFAULT_DPS

    def positions(self, i: int) -> np.ndarray:
        return np.array([complex(v) for v in self.precise[i]])

    def det_phi(self) -> list[complex]:
        return [complex(v) for v in _det_phi_all(self)]


def _normalized(kin: MandelstamMatrix):
    scale = max(abs(v) for row in kin.s for v in row)
    return [[v / scale for v in row] for row in kin.s]


def solve_scattering(
    kin: MandelstamMatrix,
    gauge: Sequence[float] = DEFAULT_GAUGE,
    seed: int = 0,
    budget: int = RESTART_BUDGET,
    dps: int = DEFAULT_DPS,
) -> ScatteringSolutionSet:
    """All (n-3)! solutions of the scattering equations with x_1, x_2, x_3 fixed."""
    n = kin.n
    if n not in (4, 5, 6):
        raise ValueError(f"scattering solver supports n in (4, 5, 6), got {n}")
    if len(set(gauge)) != 3:
        raise ValueError("gauge positions must be distinct")
    target = math.factorial(n - 3)
    s_frac = _normalized(kin)
    s = [[float(v) for v in row] for row in s_frac]
    free = list(range(3, n))
    dim = n - 3
    s_arr = np.array(s)

    # Starts come from total-degree homotopy paths (gamma trick): each path
    # endpoint seeds the deflated Newton solve.  A new random gamma is drawn
    # whenever a full sweep of (n-2)^(n-3) paths leaves roots missing.
    degree = n - 2
    sampler = qmc.Halton(d=2, scramble=True, seed=seed)
    rng = np.random.default_rng(seed)
    start_roots = [_start_radii(dim) * np.exp(2j * np.pi * np.array(k) / degree)
                   for k in itertools.product(range(degree), repeat=dim)]
    found: list[np.ndarray] = []
    directions: list[np.ndarray] = []
    starts = 0
    while len(found) < target and starts < budget:
        u = sampler.random(1)[0]
        gamma = (0.5 + u[0]) * np.exp(2j * np.pi * u[1])
        for y0 in start_roots:
            starts += 1
            x0 = np.zeros(n, dtype=complex)
            x0[:3] = gauge
            x0[free] = y0
            # diverging paths overflow harmlessly and are rejected below
            with np.errstate(all="ignore"):
                x = _track(s_arr, x0, free, gamma, degree)
                if x is not None:
                    x = _newton(s, x, free, list(found), directions)
                if x is not None:
                    x = _polish(s, x, free)
                ok = x is not None and _accept(s, x, free, found)
            if ok:
                found.append(x[free].copy())
                v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
                directions.append(v / np.linalg.norm(v))
            if len(found) == target or starts >= budget:
                break
    if len(found) != target:
        raise ScatteringError(f"found {len(found)} of {target} solutions within {starts} starts")

    found.sort(key=lambda r: tuple(np.round(np.concatenate([r.real, r.imag]), 8)))
    precise = []
    worst = 0.0
    with mpmath.workdps(dps):
        s_mp = [[mpmath.mpf(v.numerator) / v.denominator for v in row] for row in s_frac]
        for r in found:
            x = np.zeros(n, dtype=complex)
            x[:3] = gauge
            x[free] = r
            xs = _mp_polish(s_mp, x, free, dps)
            res = max(abs(v) for v in _all_residuals(s_mp, xs))
            worst = max(worst, float(res))
            precise.append(xs)
    if worst > RESIDUAL_BOUND:
        raise ScatteringError(f"residual {worst:.3e} exceeds bound {RESIDUAL_BOUND}")
    sols = [np.array([complex(v) for v in xs[3:]]) for xs in precise]
    return ScatteringSolutionSet(n, kin, tuple(gauge), sols, RESIDUAL_BOUND, worst, starts, precise, dps)


def _accept(s, x, free, found) -> bool:
    res = max(abs(v) for v in _all_residuals(s, x))
    if not np.isfinite(res) or res > 1e-8:
        return False
    n = len(x)
    gaps = min(abs(x[a] - x[b]) for a in range(n) for b in range(a + 1, n))
    if gaps < SEPARATION_TOL:
        return False
    xf = x[free]
    return all(np.linalg.norm(xf - r) > SEPARATION_TOL * (1 + np.linalg.norm(r)) for r in found)


# ------------------------------------------------------------ Gram matrix


def _det_phi_all(sol: ScatteringSolutionSet) -> list:
    """Reduced determinant det'Phi for each solution, in mpmath precision.

    Rows/columns of the three gauge-fixed punctures are deleted and the
    minor is divided by (x12 x23 x31)^2.  Uses unnormalized kinematics.
    """
    n = sol.n
    free = list(range(3, n))
    with mpmath.workdps(sol.dps):
        s_mp = [[mpmath.mpf(v.numerator) / v.denominator for v in row] for row in sol.kinematics.s]
        out = []
        for xs in sol.precise:
            _, jac = _equations(s_mp, xs, free)
            minor = mpmath.det(mpmath.matrix(jac))
            vdm = (xs[0] - xs[1]) * (xs[1] - xs[2]) * (xs[2] - xs[0])
            out.append(minor / vdm**2)
        return out


def _parke_taylor(xs, labels) -> mpmath.mpc:
    prod = mpmath.mpf(1)
    n = len(labels)
    for i in range(n):
        prod *= xs[labels[i] - 1] - xs[labels[(i + 1) % n] - 1]
    return 1 / prod


@dataclass
class GramAmplitudeMatrix:
    n: int
    labels: list[tuple[int, ...]]
    entries: np.ndarray  # real part, float64
    imag_max: float
    weights: list[complex]  # 1/det'Phi per solution
    pt: np.ndarray  # (orderings x solutions) Parke-Taylor factors


def gram_matrix(sol: ScatteringSolutionSet, catalog: OrderingCatalog | Sequence) -> GramAmplitudeMatrix:
    """m(a, b) = sum_I PT_I(a) PT_I(b) / det'Phi_I over the given orderings."""
    labels = [tuple(o) for o in catalog]
    if any(len(lab) != sol.n for lab in labels):
        raise ValueError("catalog orderings do not match the solution set's n")
    with mpmath.workdps(sol.dps):
        dets = _det_phi_all(sol)
        tiny = max(abs(d) for d in dets) * mpmath.mpf(10) ** (-(sol.dps // 2))
        if any(abs(d) < tiny for d in dets):
            raise ScatteringError("near-singular reduced Hessian")
        weights = [1 / d for d in dets]
        pts = [[_parke_taylor(xs, lab) for xs in sol.precise] for lab in labels]
        size = len(labels)
        re = np.zeros((size, size))
        im_max = 0.0
        scaled = [[p * mpmath.sqrt(w) for p, w in zip(row, weights)] for row in pts]
        for i in range(size):
            for j in range(i, size):
                v = mpmath.fsum(scaled[i][k] * scaled[j][k] for k in range(len(weights)))
                re[i, j] = re[j, i] = float(v.real)
                im_max = max(im_max, abs(float(v.imag)))
        pt = np.array([[complex(p) for p in row] for row in pts])
    return GramAmplitudeMatrix(sol.n, labels, re, im_max, [complex(w) for w in weights], pt)


def singular_value_ratio(mat: np.ndarray, k: int) -> float:
    """sigma_{k+1} / sigma_1 (1-based), i.e. the first value past rank k."""
    sv = np.linalg.svd(mat, compute_uv=False)
    return float(sv[k] / sv[0]) if k < len(sv) else 0.0


def numerical_rank(mat: np.ndarray, rtol: float = 1e-8) -> int:
    sv = np.linalg.svd(mat, compute_uv=False)
    return int(np.sum(sv > rtol * sv[0]))


def zero_pattern(mat: np.ndarray, rtol: float = 1e-12) -> np.ndarray:
    """Boolean mask of entries that are non-zero relative to the largest entry."""
    return np.abs(mat) > rtol * np.abs(mat).max()


@dataclass
class SignInference:
    signs: np.ndarray  # int8 in {-1, 0, 1}
    signed_exact: list[list[Fraction]]
    max_rel_mismatch: float
    exact_rank: int


def sign_inference(
    gram: GramAmplitudeMatrix,
    unsigned: Sequence[Sequence[Fraction]],
    rtol: float = 1e-9,
    exact_rank: bool = True,
) -> SignInference:
    """Relative signs between the numerical Gram matrix and the exact tree sums.

    ``signs[i][j] * unsigned[i][j]`` reproduces the Gram entry exactly, so
    ``signed_exact`` is the exact amplitude matrix.  Raises when a magnitude
    disagrees beyond ``rtol`` or an exact zero is numerically non-zero.
    """
    g = gram.entries
    size = g.shape[0]
    scale = np.abs(g).max()
    signs = np.zeros((size, size), dtype=np.int8)
    signed = []
    worst = 0.0
    for i in range(size):
        row = []
        for j in range(size):
            raw = Fraction(unsigned[i][j])
            exact = abs(raw)
            if exact == 0:
                if abs(g[i, j]) > rtol * scale:
                    raise ScatteringError(f"entry ({i},{j}) is exactly zero but numerically {g[i, j]:.3e}")
                row.append(Fraction(0))
                continue
            rel = abs(abs(g[i, j]) - float(exact)) / float(exact)
            worst = max(worst, rel)
            if rel > rtol:
                raise ScatteringError(f"entry ({i},{j}): |numeric| {abs(g[i, j]):.12e} vs exact {float(exact):.12e}")
            numeric_sign = 1 if g[i, j] > 0 else -1
            signs[i, j] = numeric_sign * (1 if raw > 0 else -1)
            row.append(numeric_sign * exact)
        signed.append(row)
    rank = rational_rank(signed) if exact_rank else -1
    return SignInference(signs, signed, worst, rank)


def exact_unsigned_matrix(kin: MandelstamMatrix, labels: Sequence[Sequence[int]]) -> list[list[Fraction]]:
    size = len(labels)
    out = [[Fraction(0)] * size for _ in range(size)]
    for i in range(size):
        for j in range(i, size):
            v = amplitude_unsigned(kin, labels[i], labels[j]).value
            out[i][j] = out[j][i] = v
    return out


def solutions_to_json(sol: ScatteringSolutionSet) -> dict:
    dets = sol.det_phi()
    residuals = []
    with mpmath.workdps(sol.dps):
        s_mp = [[mpmath.mpf(v.numerator) / v.denominator for v in row] for row in _normalized(sol.kinematics)]
        for xs in sol.precise:
            residuals.append(float(max(abs(v) for v in _all_residuals(s_mp, xs))))
    return {
        "schema": 1,
        "n": sol.n,
        "seed": sol.kinematics.seed,
        "gauge": list(sol.gauge),
        "solutions": [
            {
                "positions": [[float(complex(v).real), float(complex(v).imag)] for v in xs],
                "residual": res,
                "det_phi": [d.real, d.imag],
            }
            for xs, res, d in zip(sol.precise, residuals, dets)
        ],
    }


def save_solutions(path, sol: ScatteringSolutionSet) -> None:
    Path(path).write_text(json.dumps(solutions_to_json(sol), indent=1) + "\n")
