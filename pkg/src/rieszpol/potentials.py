"""Riesz kernels, potential fields of configurations, discrete energies.

The inner problem solved here is the minimization over y in A of

    f(y) = sum_i |y - x_i|^(-s),

whose minimum over A is the quantity a maximin solver pushes up.  The
minimizer is located by a dense deterministic mesh followed by local
derivative-free refinement in chart coordinates, so no smoothness of the
pointwise minimum is assumed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import geometry
from .geometry import SetDescriptor

__all__ = [
    "Configuration",
    "PotentialValue",
    "potential",
    "potential_grid",
    "potential_gradient_y",
    "energy",
    "energy_gradient",
    "min_potential",
]

_CHUNK_ELEMS = 1 << 22  # cap on floats per temporary pairwise block


@dataclass(frozen=True)
class PotentialValue:
    """Value of a potential together with the point where it was attained.

    value is +inf exactly when the evaluation point coincides with a
    configuration point.  converged is False when a local refinement hit its
    iteration cap before reaching tolerance (value is then best-so-far).
    """

    value: float
    witness: tuple
    converged: bool = True


class Configuration:
    """Ordered multiset of N points constrained to a home set.

    Duplicate points are permitted.  The home constraint is checked at
    construction to within 1e-12; pass validate=False for raw containers.
    """

    __slots__ = ("points", "home")

    def __init__(self, points, home: SetDescriptor, validate: bool = True):
        pts = np.array(points, dtype=float)
        if pts.ndim == 1:
            pts = pts.reshape(1, -1)
        if pts.ndim != 2 or pts.shape[1] != home.m:
            raise ValueError(f"points must have shape (N, {home.m})")
        if pts.shape[0] < 1:
            raise ValueError("a configuration needs at least one point")
        if validate:
            off = np.linalg.norm(pts - geometry.project(home, pts), axis=-1)
            worst = float(off.max())
            if worst > 1e-12:
                raise ValueError(
                    f"configuration point off the set by {worst:.3e}"
                )
        pts.setflags(write=False)
        self.points = pts
        self.home = home

    @property
    def n(self) -> int:
        return self.points.shape[0]

    def __len__(self) -> int:
        return self.n

    def __repr__(self) -> str:
        return f"Configuration(n={self.n}, home={self.home.kind})"


def _points_of(omega) -> np.ndarray:
    if isinstance(omega, Configuration):
        return omega.points
    return np.asarray(omega, dtype=float)


def potential_grid(Y: np.ndarray, X: np.ndarray, s: float) -> np.ndarray:
    """f(y) = sum_i |y - x_i|^(-s) for every row y of Y; +inf on coincidence."""
    Y = np.atleast_2d(np.asarray(Y, dtype=float))
    X = np.atleast_2d(np.asarray(X, dtype=float))
    n = len(X)
    out = np.empty(len(Y))
    step = max(64, _CHUNK_ELEMS // max(n, 1))
    with np.errstate(divide="ignore"):
        for i in range(0, len(Y), step):
            blk = Y[i : i + step]
            d2 = ((blk[:, None, :] - X[None, :, :]) ** 2).sum(-1)
            out[i : i + step] = (d2 ** (-s / 2.0)).sum(axis=1)
    return out


def potential(y, omega, s: float) -> PotentialValue:
    """Riesz s-potential of the configuration at the point y."""
    if s <= 0:
        raise ValueError("s must be positive")
    y = np.asarray(y, dtype=float)
    val = float(potential_grid(y[None], _points_of(omega), s)[0])
    return PotentialValue(val, tuple(float(v) for v in y))


def potential_gradient_y(y, omega, s: float) -> np.ndarray:
    """Gradient in y of the potential (undefined on configuration points)."""
    y = np.asarray(y, dtype=float)
    X = _points_of(omega)
    diff = y[None, :] - X
    d2 = (diff**2).sum(-1)
    if np.any(d2 == 0.0):
        raise ValueError("gradient undefined at a configuration point")
    w = d2 ** (-(s + 2) / 2.0)
    return -s * (w[:, None] * diff).sum(axis=0)


def energy(omega, s: float) -> float:
    """Riesz s-energy over ordered pairs: sum_{j != k} |x_j - x_k|^(-s)."""
    if s <= 0:
        raise ValueError("s must be positive")
    X = _points_of(omega)
    n = len(X)
    if n < 2:
        raise ValueError("energy needs at least two points")
    total = 0.0
    step = max(16, _CHUNK_ELEMS // n)
    with np.errstate(divide="ignore"):
        for i in range(0, n, step):
            blk = X[i : i + step]
            d2 = ((blk[:, None, :] - X[None, :, :]) ** 2).sum(-1)
            for r in range(len(blk)):
                d2[r, i + r] = np.inf  # drop the self pair
            total += float((d2 ** (-s / 2.0)).sum())
    return total


def energy_gradient(omega, s: float) -> np.ndarray:
    """Gradient of the ordered-pair energy; rows match configuration order."""
    X = _points_of(omega)
    n = len(X)
    if n < 2:
        raise ValueError("energy needs at least two points")
    diff = X[:, None, :] - X[None, :, :]
    d2 = (diff**2).sum(-1)
    off = ~np.eye(n, dtype=bool)
    if np.any(d2[off] == 0.0):
        raise ValueError("gradient undefined for coincident points")
    np.fill_diagonal(d2, np.inf)
    w = d2 ** (-(s + 2) / 2.0)
    return -2.0 * s * (w[:, :, None] * diff).sum(axis=1)


# ---------------------------------------------------------------------------
# inner minimization


def _golden_min(g, lo: float, hi: float, tol: float, max_iter: int = 200):
    """Golden-section minimum of g on [lo, hi]; returns (t, g(t), converged)."""
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = g(c), g(d)
    it = 0
    while (b - a) > tol and it < max_iter:
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = g(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = g(d)
        it += 1
    t = c if fc <= fd else d
    return t, min(fc, fd), (b - a) <= tol


def _refine_one_dim(desc, part, X, s, t0, h, tol):
    """Refine along a 1-dimensional part around arclength t0, bracket +-h."""

    def g(t):
        tt = t
        if part.wrap:
            tt = math.fmod(t, part.hi - part.lo)
            if tt < 0:
                tt += part.hi - part.lo
        p = geometry.part_point(desc, part.index, np.array([tt]))[0]
        return float(potential_grid(p[None], X, s)[0])

    if part.wrap:
        lo, hi = t0 - h, t0 + h
    else:
        lo, hi = max(part.lo, t0 - h), min(part.hi, t0 + h)
        if hi <= lo:
            lo, hi = part.lo, part.hi
    t, val, ok = _golden_min(g, lo, hi, tol)
    if part.wrap:
        period = part.hi - part.lo
        t = math.fmod(t, period)
        if t < 0:
            t += period
    p = geometry.part_point(desc, part.index, np.array([t]))[0]
    return p, val, ok


def _refine_compass(desc, X, s, y0, h0, tol, max_probe: int = 4000):
    """Derivative-free descent over the set: tangent probes plus projection."""
    y = np.array(y0, dtype=float)
    fy = float(potential_grid(y[None], X, s)[0])
    h = h0
    probes = 0
    while h > tol and probes < max_probe:
        basis = geometry.tangent_basis(desc, y)
        improved = False
        for t in basis:
            for sgn in (1.0, -1.0):
                cand = geometry.project(desc, y + (sgn * h) * t)
                fc = float(potential_grid(cand[None], X, s)[0])
                probes += 1
                if fc < fy:
                    y, fy = cand, fc
                    improved = True
                    break
            if improved:
                break
        if not improved:
            h *= 0.5
    return y, fy, h <= tol


def min_potential(
    desc: SetDescriptor,
    omega,
    s: float,
    grid_n: int | None = None,
    refine_tol: float = 1e-10,
    k_refine: int = 8,
) -> PotentialValue:
    """min over y in A of the Riesz s-potential of the configuration.

    Evaluates on the deterministic mesh sample(A, n) with n = max(1024, 64 N)
    by default, then refines from the k best mesh points: golden-section in
    arclength for 1-dimensional parts, compass search with projection
    otherwise.  Witness ties are broken toward the lowest part index and
    smallest chart parameter.
    """
    X = _points_of(omega)
    n_pts = len(X)
    if grid_n is None:
        grid_n = max(1024, 64 * n_pts)
    Y = geometry.sample(desc, grid_n)
    f = potential_grid(Y, X, s)
    order = np.argsort(f, kind="stable")[: max(1, k_refine)]

    one_dim = {p.index: p for p in geometry.one_dim_parts(desc)}
    scale = geometry.natural_scale(desc, grid_n)
    candidates = []  # (value, point, converged)
    for idx in order:
        y0 = Y[idx]
        candidates.append((float(f[idx]), np.array(y0), True))
        key = geometry.param_of(desc, y0)
        part_ix = key[0]
        if part_ix in one_dim and desc.d == 1:
            part = one_dim[part_ix]
            mu = part.hi - part.lo
            w = mu  # bracket half-width: a few local mesh cells of this part
            n_here = max(1, round(grid_n * mu / max(geometry.measure(desc), mu)))
            w = min(mu / 2.0, 2.0 * mu / n_here)
            t0 = geometry.arclength_param(desc, part_ix, y0)
            p, val, ok = _refine_one_dim(desc, part, X, s, t0, w, refine_tol)
        else:
            p, val, ok = _refine_compass(
                desc, X, s, y0, 2.0 * scale, refine_tol
            )
        candidates.append((val, p, ok))

    best = min(c[0] for c in candidates)
    tol_tie = 1e-12 * max(1.0, abs(best)) if math.isfinite(best) else 0.0
    eligible = [c for c in candidates if c[0] <= best + tol_tie]
    eligible.sort(key=lambda c: geometry.param_of(desc, c[1]))
    val, point, ok = eligible[0]
    # report the smallest value seen, attained at the tie-broken witness
    return PotentialValue(best, tuple(float(v) for v in point), ok)
