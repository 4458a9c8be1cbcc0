"""Ground-truth engine: exact return-probability series, spectra with
root weights, determinant-based generating functions, first-return and
survival series, and the closed-form reconstruction identities.

Everything statistical elsewhere in the library is validated against the
exact rationals produced here.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import (
    ConvergenceFailure,
    MomentMismatch,
    NonIntegerResult,
    RootFindingFailure,
)
from .graphs import RootedGraph
from .ratfun import IntPoly, RatFun, poly_det_bareiss

# Exact-arithmetic guard rails; override explicitly for bigger jobs.
MAX_EXACT_N = 64
MAX_EXACT_K = 1000


def _frac_json(x: Fraction) -> dict:
    return {"num": str(x.numerator), "den": str(x.denominator)}


@dataclass
class SeriesTable:
    """Exact rational sequences indexed by step count.

    p[k]  return probability at step k (lazy chain if `lazy`)
    s[k]  probability the first return happens at step k
    z[k]  probability of no return in the first k steps
    q[k]  p[k] - 1/n, lazy chains only
    """

    n: int
    k_max: int
    p: list[Fraction] | None = None
    s: list[Fraction] | None = None
    z: list[Fraction] | None = None
    q: list[Fraction] | None = None
    lazy: bool = False

    def to_json(self) -> dict:
        doc = {"n": self.n, "k_max": self.k_max, "lazy": self.lazy}
        for name in ("p", "s", "z", "q"):
            seq = getattr(self, name)
            if seq is not None:
                doc[name] = [_frac_json(x) for x in seq]
        return doc


@dataclass
class Spectrum:
    """Eigenvalues of the walk's transition matrix, sorted descending,
    with squared root entries of the orthonormal eigenbasis."""

    eigenvalues: np.ndarray
    root_weights: np.ndarray
    clusters: list[tuple[float, float, bool]] = field(default_factory=list)
    # clusters: (eigenvalue, summed root weight, nondegenerate flag)

    def to_json(self) -> dict:
        return {
            "eigenvalues": [float(x) for x in self.eigenvalues],
            "root_weights": [float(x) for x in self.root_weights],
            "nondegenerate": [
                {"value": v, "weight": w, "flag": f} for v, w, f in self.clusters
            ],
        }


class GenFun(RatFun):
    """Return-probability generating function sum_k P_k(r,r) t^k as an
    exact rational function; equals 1 at t=0."""

    def __init__(self, num, den):
        super().__init__(num, den)
        if self.eval(Fraction(0)) != 1:
            raise ValueError("generating function must equal 1 at t=0")


def _check_scale(g: RootedGraph, k_max: int):
    if g.n > MAX_EXACT_N:
        raise ValueError(f"exact mode capped at n <= {MAX_EXACT_N}, got {g.n}")
    if k_max > MAX_EXACT_K:
        raise ValueError(f"exact mode capped at k_max <= {MAX_EXACT_K}, got {k_max}")


def transition_series(g: RootedGraph, k_max: int) -> SeriesTable:
    """Exact P_k(r,r) for k = 0..k_max by iterating the transition
    operator on the root indicator."""
    _check_scale(g, k_max)
    v = [Fraction(0)] * g.n
    v[g.root] = Fraction(1)
    degs = [g.degree(i) for i in range(g.n)]
    p = [v[g.root]]
    for _ in range(k_max):
        w = [Fraction(0)] * g.n
        for i in range(g.n):
            if v[i]:
                share = v[i] / degs[i]
                for j in g.adjacency[i]:
                    w[j] += share
        v = w
        p.append(v[g.root])
    return SeriesTable(n=g.n, k_max=k_max, p=p)


def lazy_series(source, k_max: int) -> SeriesTable:
    """Lazy-chain return probabilities via the exact binomial mixture
    P'_k = 2^-k sum_j C(k,j) P_j, plus q_k = P'_k - 1/n.  `source` is a
    graph or a non-lazy SeriesTable carrying p up to k_max."""
    table = source if isinstance(source, SeriesTable) else transition_series(source, k_max)
    if table.p is None or table.k_max < k_max:
        raise ValueError("input table must carry p up to k_max")
    one_over_n = Fraction(1, table.n)
    p_lazy, q = [], []
    for k in range(k_max + 1):
        acc = sum(math.comb(k, j) * table.p[j] for j in range(k + 1))
        pk = acc / 2**k
        p_lazy.append(pk)
        q.append(pk - one_over_n)
    return SeriesTable(n=table.n, k_max=k_max, p=p_lazy, q=q, lazy=True)


def lazy_series_direct(g: RootedGraph, k_max: int) -> SeriesTable:
    """Lazy series by iterating (I+M)/2 directly; independent route used
    to cross-check the binomial mixture."""
    _check_scale(g, k_max)
    v = [Fraction(0)] * g.n
    v[g.root] = Fraction(1)
    degs = [g.degree(i) for i in range(g.n)]
    one_over_n = Fraction(1, g.n)
    p = [Fraction(1)]
    q = [1 - one_over_n]
    for _ in range(k_max):
        w = [x / 2 for x in v]
        for i in range(g.n):
            if v[i]:
                share = v[i] / (2 * degs[i])
                for j in g.adjacency[i]:
                    w[j] += share
        v = w
        p.append(v[g.root])
        q.append(v[g.root] - one_over_n)
    return SeriesTable(n=g.n, k_max=k_max, p=p, q=q, lazy=True)


# ---------------------------------------------------------------------------
# spectrum


def _jacobi_eigh(a: np.ndarray, tol: float = 1e-12, cap_factor: int = 100):
    """Cyclic Jacobi rotations on a symmetric matrix.  Returns
    (eigenvalues, eigenvector columns)."""
    n = a.shape[0]
    a = a.copy()
    v = np.eye(n)
    max_rot = cap_factor * n * n
    rotations = 0
    while True:
        off = math.sqrt(np.sum(np.tril(a, -1) ** 2) * 2)
        if off <= tol:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if abs(apq) < tol / (n * n):
                    continue
                theta = (a[q, q] - a[p, p]) / (2 * apq)
                t = math.copysign(1.0, theta) / (abs(theta) + math.hypot(1.0, theta))
                c = 1.0 / math.sqrt(1 + t * t)
                s = t * c
                rot = np.array([[c, -s], [s, c]])
                a[[p, q], :] = rot @ a[[p, q], :]
                a[:, [p, q]] = a[:, [p, q]] @ rot.T
                v[:, [p, q]] = v[:, [p, q]] @ rot.T
                rotations += 1
                if rotations > max_rot:
                    raise ConvergenceFailure(
                        f"Jacobi iteration cap {max_rot} exceeded"
                    )
    return np.diag(a).copy(), v


def spectrum(g: RootedGraph, cluster_tol: float = 1e-8,
             weight_tol: float = 1e-7) -> Spectrum:
    """Eigen-decomposition of the symmetrized transition matrix
    N = D M D^{-1}, with root weights from the orthonormal eigenbasis."""
    n = g.n
    degs = np.array([g.degree(i) for i in range(n)], dtype=float)
    mat = np.zeros((n, n))
    for u in range(n):
        for v in g.adjacency[u]:
            mat[u, v] = 1.0 / math.sqrt(degs[u] * degs[v])
    vals, vecs = _jacobi_eigh(mat)
    order = np.argsort(-vals)
    vals = vals[order]
    weights = vecs[g.root, order] ** 2
    spec = Spectrum(eigenvalues=vals, root_weights=weights)
    spec.clusters = nondegenerate_set(spec, cluster_tol, weight_tol)
    return spec


def nondegenerate_set(spec: Spectrum, tol: float = 1e-8,
                      weight_tol: float = 1e-7) -> list[tuple[float, float, bool]]:
    """Cluster eigenvalues within `tol` and flag a cluster nondegenerate
    when its summed root weight exceeds `weight_tol`."""
    out = []
    vals, weights = spec.eigenvalues, spec.root_weights
    i = 0
    while i < len(vals):
        j = i
        while j + 1 < len(vals) and vals[i] - vals[j + 1] <= tol:
            j += 1
        w = float(np.sum(weights[i:j + 1]))
        rep = float(np.mean(vals[i:j + 1]))
        out.append((rep, w, w > weight_tol))
        i = j + 1
    return out


# ---------------------------------------------------------------------------
# determinant generating function


def return_gen_fun(g: RootedGraph) -> GenFun:
    """f(t) = sum_k P_k(r,r) t^k as the exact ratio of two integer
    polynomial determinants: d(r) det(Delta' - tA') / det(Delta - tA),
    where Delta is the degree diagonal and the primes delete the root's
    row and column."""
    _check_scale(g, 0)
    n, r = g.n, g.root

    def char_mat(skip_root: bool):
        idx = [v for v in range(n) if not (skip_root and v == r)]
        pos = {v: i for i, v in enumerate(idx)}
        m = [[IntPoly.zero] * len(idx) for _ in idx]
        for v in idx:
            m[pos[v]][pos[v]] = IntPoly([g.degree(v)])
            for u in g.adjacency[v]:
                if u in pos:
                    m[pos[v]][pos[u]] = IntPoly([0, -1])
        return m

    det_full = poly_det_bareiss(char_mat(False))
    det_minor = poly_det_bareiss(char_mat(True))
    return GenFun(g.degree(r) * det_minor, det_full)


def first_return_series(fgen: RatFun, k_max: int) -> SeriesTable:
    """First-return probabilities s_k from the power-series inversion
    1/f = 1 - sum s_k t^k, and survival z_k = 1 - sum_{j<=k} s_j."""
    inv = (RatFun(fgen.den, fgen.num)).series(k_max)
    if inv[0] != 1:
        raise ValueError("1/f must have constant term 1")
    s = [Fraction(0)] + [-c for c in inv[1:]]
    z, acc = [], Fraction(0)
    for k in range(k_max + 1):
        acc += s[k]
        z.append(1 - acc)
    # n is not recoverable from f alone; callers merge with other tables
    return SeriesTable(n=0, k_max=k_max, s=s, z=z)


def poles_to_eigenvalues(fgen: RatFun, imag_tol: float = 1e-9):
    """Reciprocals of the real denominator roots (the nonzero
    nondegenerate eigenvalues), plus a flag telling whether zero is a
    nondegenerate eigenvalue (degree comparison)."""
    den = fgen.den
    if den.degree < 1:
        return [], fgen.num.degree == den.degree
    coeffs = list(reversed(den.c))
    try:
        roots = np.roots(coeffs)
    except Exception as exc:  # pragma: no cover
        raise RootFindingFailure(str(exc)) from exc
    if np.any(~np.isfinite(roots)):
        raise RootFindingFailure("non-finite root from the polynomial solver")
    eigs = []
    for root in roots:
        if abs(root.imag) <= imag_tol * (1 + abs(root)):
            if root.real == 0:
                raise RootFindingFailure("denominator root at 0")
            eigs.append(1.0 / root.real)
    eigs.sort(reverse=True)
    zero_flag = fgen.num.degree == den.degree
    return eigs, zero_flag


# ---------------------------------------------------------------------------
# moments and reconstruction


@dataclass
class HittingResult:
    value: Fraction
    via_linear_system: Fraction
    mean_t1: Fraction
    mean_t1_sq: Fraction


def _solve_fraction_system(a: list[list[Fraction]], b: list[Fraction]):
    n = len(b)
    m = [row[:] + [b[i]] for i, row in enumerate(a)]
    for col in range(n):
        piv = next(i for i in range(col, n) if m[i][col] != 0)
        m[col], m[piv] = m[piv], m[col]
        inv = m[col][col]
        m[col] = [x / inv for x in m[col]]
        for i in range(n):
            if i != col and m[i][col] != 0:
                f = m[i][col]
                m[i] = [x - f * y for x, y in zip(m[i], m[col])]
    return [m[i][n] for i in range(n)]


def hitting_from_stationary(g: RootedGraph) -> HittingResult:
    """Expected steps to hit the root from the stationary distribution,
    computed two independent ways and asserted equal:

    (i) the exact linear system for expected hitting times, averaged
        under the stationary distribution;
    (ii) the moment identity E(T1^2) / (2 E(T1)) - 1/2, with the first
        two moments of the first-return time taken from exact derivatives
        of the generating function at t=1.
    """
    n, r = g.n, g.root
    # (i) hitting-time system: m[r]=0, m[i] = 1 + sum_j M[i][j] m[j]
    a = [[Fraction(0)] * n for _ in range(n)]
    b = [Fraction(0)] * n
    for i in range(n):
        if i == r:
            a[i][i] = Fraction(1)
        else:
            a[i][i] = Fraction(1)
            d = g.degree(i)
            for j in g.adjacency[i]:
                a[i][j] -= Fraction(1, d)
            b[i] = Fraction(1)
    m = _solve_fraction_system(a, b)
    total_deg = sum(g.degree(i) for i in range(n))
    via_system = sum(Fraction(g.degree(i), total_deg) * m[i] for i in range(n))

    # (ii) moments of T1 from g(t) = 1 - 1/f(t) = sum s_k t^k
    f = return_gen_fun(g)
    ratio = RatFun(f.den, f.num)           # 1/f
    d1 = ratio.derivative()
    d2 = d1.derivative()
    one = Fraction(1)
    mean_t1 = -d1.eval(one)
    mean_t1_sq = -d2.eval(one) + mean_t1
    via_moments = mean_t1_sq / (2 * mean_t1) - Fraction(1, 2)

    if via_moments != via_system:
        raise MomentMismatch(
            f"linear system gives {via_system}, moment identity gives {via_moments}"
        )
    return HittingResult(value=via_moments, via_linear_system=via_system,
                         mean_t1=mean_t1, mean_t1_sq=mean_t1_sq)


def mean_return_time(g: RootedGraph) -> Fraction:
    """Exact E(T1) = 2|E| / d(r)."""
    return Fraction(2 * g.edge_count, g.root_degree)


def reconstruct_counts(mean_t1: Fraction, d_root: int, regular: bool):
    """Edge count from |E| = d(r) E(T1) / 2; node count n = E(T1) when the
    graph is known to be regular."""
    if mean_t1 <= 0:
        raise ValueError("mean return time must be positive")
    e = Fraction(d_root) * mean_t1 / 2
    if e.denominator != 1:
        raise NonIntegerResult(f"|E| = {e} is not an integer")
    n = None
    if regular:
        if mean_t1.denominator != 1:
            raise NonIntegerResult(f"n = {mean_t1} is not an integer")
        n = int(mean_t1)
    return int(e), n
