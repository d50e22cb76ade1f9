"""Maximin solvers for N-point Riesz polarization on catalog sets.

The outer problem is

    M_N^s(A) = max over N-point multisets in A of  min over y in A of
               sum_i |y - x_i|^(-s).

The pointwise minimum is nonsmooth in the configuration, so the ascent
strategy climbs a log-sum-exp softmin surrogate over a fixed witness mesh at
an increasing temperature ladder, then polishes with per-point compass moves
scored by the exact mesh minimum, and finally re-scores every restart with
the refined inner minimization.  All randomness flows through per-restart
generators derived from one master seed, and the reduction over restarts is
a pure function of the restart results, so the outcome is independent of
thread count and scheduling.
"""

from __future__ import annotations

import itertools
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import geometry
from .geometry import SetDescriptor
from .potentials import min_potential, potential_grid
from .seeds import restart_rng

__all__ = [
    "SolveReport",
    "solve",
    "oracle_solve",
    "equally_spaced_value",
    "softmin_surrogate",
    "thread_count",
]

DEFAULT_TEMPS = (10.0, 30.0, 100.0, 300.0)
STRATEGIES = ("smoothed_ascent", "exchange", "anneal")
_POLISH_N_MAX = 96


def thread_count() -> int:
    """Worker threads for restart batches; affects speed only, never results."""
    try:
        return max(1, int(os.environ.get("RIESZPOL_THREADS", "1")))
    except ValueError:
        return 1


@dataclass
class SolveReport:
    """Outcome of a polarization solve."""

    home: SetDescriptor
    n: int
    s: float
    value: float
    witness: tuple
    config: np.ndarray
    strategy: str
    seed: int
    restarts: int
    iterations: int
    converged: bool
    restart_values: tuple
    grid_restricted: bool = False
    opts: dict = field(default_factory=dict)


# ---------------------------------------------------------------------------
# softmin surrogate


def softmin_surrogate(X, Y, s: float, t: float, want_grad: bool = True):
    """Smoothed minimum of the potential over the witness set Y.

    F(X) = -(1/t) log sum_y exp(-t f_y(X)) with f_y the Riesz potential at y.
    F <= min_y f_y <= F + log(len(Y))/t, and F is smooth wherever no witness
    coincides with a configuration point.  Returns (F, grad) with grad of
    shape X.shape when want_grad, else F alone.
    """
    X = np.asarray(X, dtype=float)
    Y = np.asarray(Y, dtype=float)
    x2 = (X * X).sum(-1)
    step = max(64, (1 << 22) // max(len(X), 1))
    f = np.empty(len(Y))
    with np.errstate(divide="ignore", over="ignore"):
        for i in range(0, len(Y), step):
            blk = Y[i : i + step]
            d2 = _gemm_d2(blk, X, x2)
            f[i : i + step] = (d2 ** (-s / 2.0)).sum(axis=1)
    a = -t * f
    amax = float(a.max())
    if not math.isfinite(amax):
        raise ValueError("surrogate undefined: witness set meets the config")
    w = np.exp(a - amax)
    z = float(w.sum())
    F = -(amax + math.log(z)) / t
    if not want_grad:
        return F
    w /= z
    grad = np.zeros_like(X)
    for i in range(0, len(Y), step):
        blk = Y[i : i + step]
        wb = w[i : i + step]
        live = wb > 0.0
        if not np.any(live):
            continue
        blk, wb = blk[live], wb[live]
        d2 = _gemm_d2(blk, X, x2)
        with np.errstate(divide="ignore"):
            k2 = d2 ** (-(s + 2) / 2.0)
        k2[d2 == 0.0] = 0.0
        A = wb[:, None] * k2
        grad += s * (A.T @ blk - A.sum(axis=0)[:, None] * X)
    return F, grad


def _gemm_d2(Y: np.ndarray, X: np.ndarray, x2: np.ndarray) -> np.ndarray:
    """Squared distances |y - x|^2 via the inner-product expansion.

    One matrix product instead of a (|Y|, |X|, m) difference tensor; tiny
    negative roundoff clips to zero, which the kernel maps to +inf.
    """
    d2 = (Y * Y).sum(-1)[:, None] + x2[None, :] - 2.0 * (Y @ X.T)
    np.maximum(d2, 0.0, out=d2)
    return d2


# ---------------------------------------------------------------------------
# cheap mesh scoring with incremental updates


class _MeshScore:
    """Exact minimum over a fixed witness mesh, with O(|Y|) point updates.

    Kernel entries can be +inf (witness node on a configuration point), so
    incremental updates repair any inf - inf rows by direct resummation.
    """

    def __init__(self, Y: np.ndarray, X: np.ndarray, s: float):
        self.Y = Y
        self.s = s
        self.K = np.empty((len(Y), len(X)))
        with np.errstate(divide="ignore"):
            for j in range(len(X)):
                self.K[:, j] = self._col(X[j])
        self.f = self.K.sum(axis=1)

    def _col(self, x) -> np.ndarray:
        d2 = ((self.Y - x[None, :]) ** 2).sum(-1)
        with np.errstate(divide="ignore"):
            return d2 ** (-self.s / 2.0)

    def _shifted(self, j: int, col: np.ndarray) -> np.ndarray:
        with np.errstate(invalid="ignore"):
            f2 = self.f - self.K[:, j] + col
        bad = np.isnan(f2)
        if bad.any():
            rows = np.where(bad)[0]
            sub = self.K[rows].copy()
            sub[:, j] = col[rows]
            f2[rows] = sub.sum(axis=1)
        return f2

    def value(self) -> float:
        return float(self.f.min())

    def try_move(self, j: int, x_new) -> tuple[float, np.ndarray]:
        col = self._col(np.asarray(x_new, dtype=float))
        return float(self._shifted(j, col).min()), col

    def drop_min(self, j: int) -> float:
        """Mesh minimum after deleting point j."""
        with np.errstate(invalid="ignore"):
            f2 = self.f - self.K[:, j]
        bad = np.isnan(f2)
        if bad.any():
            rows = np.where(bad)[0]
            sub = self.K[rows].copy()
            sub[:, j] = 0.0
            f2[rows] = sub.sum(axis=1)
        return float(f2.min())

    def commit(self, j: int, x_new, col: np.ndarray):
        self.f = self._shifted(j, col)
        self.K[:, j] = col


def _mesh_min(desc, X, s, mesh) -> float:
    return float(potential_grid(mesh, X, s).min())


# ---------------------------------------------------------------------------
# continuous strategies (one restart each)


def _ascent_restart(desc, X0, s, mesh, temps, iters_per_temp):
    X = np.array(X0, dtype=float)
    scale0 = geometry.natural_scale(desc, len(X))
    # temperatures are relative to the objective scale so the whole ascent is
    # equivariant under set scaling (f scales by lambda^-s and so does v0)
    v0 = _mesh_min(desc, X, s, mesh)
    if not (math.isfinite(v0) and v0 > 0):
        v0 = 1.0
    accepted = 0
    step_hi = 0.1 * scale0
    stalled = False
    for ti, t_rel in enumerate(temps):
        t = t_rel / v0
        step = step_hi
        last = ti == len(temps) - 1
        f_first = f_last = None
        broke = False
        for _ in range(iters_per_temp):
            try:
                F, G = softmin_surrogate(X, mesh, s, t)
            except ValueError:
                # every witness coincides with a config point: nudge along
                # tangents and retry
                shift = np.zeros_like(X)
                for j in range(len(X)):
                    basis = geometry.tangent_basis(desc, X[j])
                    if len(basis):
                        shift[j] = basis[0]
                X = geometry.project(desc, X + 1e-7 * scale0 * shift)
                continue
            if f_first is None:
                f_first = F
            f_last = F
            gmax = float(np.linalg.norm(G, axis=-1).max())
            if gmax == 0.0 or not math.isfinite(gmax):
                broke = True
                break
            D = G / gmax
            slope = float((G * D).sum())
            # warm-started backtracking: resume near the last accepted step
            step, ok = min(step_hi, 2.0 * step), False
            while step > 1e-13 * scale0:
                Xc = geometry.project(desc, X + step * D)
                try:
                    Fc = softmin_surrogate(Xc, mesh, s, t, want_grad=False)
                except ValueError:
                    step *= 0.5
                    continue
                if Fc >= F + 1e-4 * step * slope:
                    X, ok = Xc, True
                    accepted += 1
                    break
                step *= 0.5
            if not ok:
                broke = True
                break
        if last:
            # stationary at the sharpest surrogate: either the line search
            # found no acceptable step, or a whole temperature block moved
            # the objective by a negligible relative amount
            if broke:
                stalled = True
            elif f_first is not None and f_last is not None:
                stalled = f_last - f_first <= 1e-8 * max(1.0, abs(f_last))
    return X, accepted, stalled


def _exchange_restart(desc, X0, s, mesh, rng, max_iter):
    X = np.array(X0, dtype=float)
    sc = _MeshScore(mesh, X, s)
    sigma = 0.5 * geometry.natural_scale(desc, len(X))
    accepted = 0
    for _ in range(max_iter):
        v = sc.value()
        ystar = mesh[int(np.argmin(sc.f))]
        # removing which point hurts the minimum least
        drops = np.array([sc.drop_min(j) for j in range(len(X))])
        j = int(np.argmax(drops))
        cands = [ystar]
        if sigma > 0:
            cands += [
                geometry.project(desc, ystar + sigma * rng.standard_normal(X.shape[1]))
                for _ in range(8)
            ]
        best = (v, None, None)
        for c in cands:
            v2, col = sc.try_move(j, c)
            if v2 > best[0]:
                best = (v2, c, col)
        if best[1] is None:
            sigma *= 0.5
            if sigma < 1e-6 * geometry.natural_scale(desc, len(X)):
                break
        else:
            sc.commit(j, best[1], best[2])
            X[j] = best[1]
            accepted += 1
    return X, accepted


def _anneal_restart(desc, X0, s, mesh, rng, iters):
    X = np.array(X0, dtype=float)
    sc = _MeshScore(mesh, X, s)
    scale = geometry.natural_scale(desc, len(X))
    v = sc.value()
    temp = 0.1 * abs(v) if math.isfinite(v) and v != 0 else 1.0
    sigma = 0.5 * scale
    accepted = 0
    for _ in range(iters):
        j = int(rng.integers(len(X)))
        cand = geometry.project(desc, X[j] + sigma * rng.standard_normal(X.shape[1]))
        v2, col = sc.try_move(j, cand)
        if v2 >= v or rng.uniform() < math.exp(min(0.0, (v2 - v) / max(temp, 1e-300))):
            sc.commit(j, cand, col)
            X[j] = cand
            v = v2
            accepted += 1
        temp *= 0.995
        sigma = max(sigma * 0.999, 1e-4 * scale)
    return X, accepted


def _polish(desc, X, s, mesh, max_sweeps=80):
    """Per-point compass moves scored by the exact mesh minimum.

    Each sweep lets a point crawl repeatedly at the current step before
    moving on, so a long descent of one point costs one sweep, not many;
    the step halves only when a whole sweep finds nothing.
    """
    X = np.array(X, dtype=float)
    sc = _MeshScore(mesh, X, s)
    scale = geometry.natural_scale(desc, len(X))
    h = 0.25 * scale
    sweeps = 0
    moves = 0
    while h > 1e-6 * scale and sweeps < max_sweeps:
        improved = False
        v = sc.value()
        for j in range(len(X)):
            for _crawl in range(64):
                stepped = False
                for tvec in geometry.tangent_basis(desc, X[j]):
                    for sgn in (1.0, -1.0):
                        cand = geometry.project(desc, X[j] + (sgn * h) * tvec)
                        v2, col = sc.try_move(j, cand)
                        if v2 > v:
                            sc.commit(j, cand, col)
                            X[j] = cand
                            v = v2
                            improved = True
                            moves += 1
                            stepped = True
                            break
                    if stepped:
                        break
                if not stepped:
                    break
        sweeps += 1
        if not improved:
            h *= 0.5
    return X, moves, h <= 1e-6 * scale


def _initial_config(desc, n, restart, rng, init=None):
    if restart == 0:
        if init is not None:
            return geometry.project(desc, np.array(init, dtype=float))
        return np.array(geometry.sample(desc, n))
    if restart == 1:
        return np.tile(geometry.anchor_point(desc), (n, 1))
    return geometry.random_points(desc, n, rng)


def _run_restart(desc, n, s, mesh, strategy, seed, restart, iters_per_temp,
                 temps, refine_tol, exact_grid_n, init=None):
    rng = restart_rng(seed, restart)
    X0 = _initial_config(desc, n, restart, rng, init)
    stalled = True
    if strategy == "smoothed_ascent":
        X, accepted, stalled = _ascent_restart(desc, X0, s, mesh, temps,
                                               iters_per_temp)
    elif strategy == "exchange":
        X, accepted = _exchange_restart(desc, X0, s, mesh, rng, max_iter=40 * n)
    elif strategy == "anneal":
        X, accepted = _anneal_restart(desc, X0, s, mesh, rng, iters=400 * n)
    else:
        raise ValueError(f"unknown strategy {strategy!r}")
    if n <= _POLISH_N_MAX:
        Xp, moves, polished = _polish(desc, X, s, mesh)
    else:
        # the per-point crawl costs O(n * |mesh|) per sweep and buys nothing
        # measurable once the smoothed ascent has this many points to move;
        # stationarity of the final surrogate stands in for ladder exhaustion
        Xp, moves, polished = X, 0, stalled
    # exact re-score of the start, strategy output, and polished config;
    # keep the best so mesh-scored search can never lose ground on the
    # true objective (the start matters: collapsed and warm starts can be
    # exactly optimal already, and the smoothed surrogate drifts off them)
    stages = [X0]
    if not np.array_equal(X, X0):
        stages.append(X)
    if not np.array_equal(Xp, X):
        stages.append(Xp)
    cand = []
    for cfg in stages:
        pv = min_potential(desc, cfg, s, grid_n=exact_grid_n, refine_tol=refine_tol)
        cand.append((pv.value, cfg, pv))
    v, cfg, pv = min(cand, key=lambda c: (-c[0], _sorted_key(c[1])))
    return v, cfg, pv, accepted + moves, polished and pv.converged


def _sorted_key(cfg: np.ndarray) -> tuple:
    rows = sorted(tuple(float(v) for v in row) for row in cfg)
    return tuple(rows)


def solve(
    desc: SetDescriptor,
    n: int,
    s: float | None = None,
    strategy: str = "smoothed_ascent",
    seed: int = 0,
    restarts: int = 16,
    grid=None,
    grid_n: int | None = None,
    refine_tol: float = 1e-10,
    temps=DEFAULT_TEMPS,
    iters_per_temp: int | None = None,
    init=None,
) -> SolveReport:
    """Maximize the minimum Riesz s-potential over N-point multisets in A.

    Restart 0 starts from the quasi-uniform mesh (or from init, a warm-start
    array of N points, when given), restart 1 from a fully collapsed
    configuration (optimal on balls when s <= d - 2), later restarts from
    seeded random draws.  With grid= an explicit point array, the search is
    restricted to multisets of grid nodes and scored by the exact discrete
    minimum over the same grid (the regime the exhaustive oracle can
    verify).  The best restart wins; exact ties break toward the
    lexicographically smallest sorted configuration.
    """
    if s is None:
        s = float(desc.d)
    if n < 1:
        raise ValueError("n must be >= 1")
    if restarts < 1:
        raise ValueError("restarts must be >= 1")
    if strategy not in STRATEGIES:
        raise ValueError(f"strategy must be one of {STRATEGIES}")
    if grid is not None:
        return _solve_on_grid(desc, n, s, np.asarray(grid, dtype=float),
                              seed, restarts, strategy)
    if grid_n is None:
        grid_n = max(1024, 64 * n)
    if iters_per_temp is None:
        iters_per_temp = max(10, min(40, 8000 // max(n, 1)))
    mesh = geometry.sample(desc, grid_n)

    def job(r):
        return _run_restart(desc, n, s, mesh, strategy, seed, r,
                            iters_per_temp, temps, refine_tol, grid_n, init)

    workers = thread_count()
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            results = list(ex.map(job, range(restarts)))
    else:
        results = [job(r) for r in range(restarts)]

    best = None
    for v, cfg, pv, iters, conv in results:
        if best is None or v > best[0] or (
            v == best[0] and _sorted_key(cfg) < _sorted_key(best[1])
        ):
            best = (v, cfg, pv, conv)
    total_iters = sum(r[3] for r in results)
    v, cfg, pv, conv = best
    return SolveReport(
        home=desc,
        n=n,
        s=s,
        value=v,
        witness=pv.witness,
        config=cfg,
        strategy=strategy,
        seed=seed,
        restarts=restarts,
        iterations=total_iters,
        converged=conv,
        restart_values=tuple(float(r[0]) for r in results),
        opts={"grid_n": grid_n, "refine_tol": refine_tol},
    )


# ---------------------------------------------------------------------------
# grid-restricted search and the exhaustive oracle
#
# Both routes score a multiset of grid indices with identical arithmetic:
# columns of the precomputed kernel matrix are summed in ascending index
# order, then the minimum over rows is taken.  Identical inputs therefore
# produce bitwise identical values, which is what makes exact agreement a
# meaningful test.


def _grid_kernel(G: np.ndarray, s: float) -> np.ndarray:
    d2 = ((G[:, None, :] - G[None, :, :]) ** 2).sum(-1)
    with np.errstate(divide="ignore"):
        K = d2 ** (-s / 2.0)
    return K


def _grid_score(K: np.ndarray, idx) -> float:
    cols = np.sort(np.asarray(idx, dtype=int))
    return float(K[:, cols].sum(axis=1).min())


def _enumerate_grid(K: np.ndarray, size: int, n: int):
    """First maximal multiset in combinations_with_replacement order."""
    best_val, best_idx = -math.inf, None
    for idx in itertools.combinations_with_replacement(range(size), n):
        v = _grid_score(K, idx)
        if v > best_val:
            best_val, best_idx = v, idx
    return best_val, best_idx


# full enumeration whenever the multiset count stays this small; the local
# exchange search can stall one ulp below the float argmax on symmetric
# grids, and exactness is the whole point of the grid-restricted regime
_GRID_ENUM_BUDGET = 50_000


def _solve_on_grid(desc, n, s, G, seed, restarts, strategy):
    size = len(G)
    if size < 1:
        raise ValueError("grid must be nonempty")
    K = _grid_kernel(G, s)
    if math.comb(size + n - 1, n) <= _GRID_ENUM_BUDGET:
        best_val, best_idx = _enumerate_grid(K, size, n)
        f = K[:, np.sort(np.asarray(best_idx))].sum(axis=1)
        wit = G[int(np.argmin(f))]
        return SolveReport(
            home=desc,
            n=n,
            s=s,
            value=best_val,
            witness=tuple(float(v) for v in wit),
            config=G[list(best_idx)].copy(),
            strategy=strategy,
            seed=seed,
            restarts=restarts,
            iterations=0,
            converged=True,
            restart_values=(best_val,),
            grid_restricted=True,
            opts={"grid_size": size, "enumerated": True},
        )
    best_val, best_idx = -math.inf, None
    restart_values = []
    iters = 0
    for r in range(restarts):
        rng = restart_rng(seed, r)
        if r == 0:
            idx = np.linspace(0, size - 1, n).round().astype(int)
        elif r == 1:
            idx = np.zeros(n, dtype=int)
        else:
            idx = np.sort(rng.integers(0, size, size=n))
        idx = np.sort(idx)
        v = _grid_score(K, idx)
        improved = True
        while improved:
            improved = False
            cand_best = (v, None, None)
            for j in range(n):
                for g in range(size):
                    if g == idx[j]:
                        continue
                    trial = idx.copy()
                    trial[j] = g
                    v2 = _grid_score(K, trial)
                    if v2 > cand_best[0]:
                        cand_best = (v2, j, g)
            if cand_best[1] is not None:
                v = cand_best[0]
                idx[cand_best[1]] = cand_best[2]
                idx = np.sort(idx)
                improved = True
                iters += 1
        restart_values.append(v)
        key = tuple(idx)
        if v > best_val or (v == best_val and key < best_idx):
            best_val, best_idx = v, key
    f = K[:, np.sort(np.asarray(best_idx))].sum(axis=1)
    wit = G[int(np.argmin(f))]
    return SolveReport(
        home=desc,
        n=n,
        s=s,
        value=best_val,
        witness=tuple(float(v) for v in wit),
        config=G[list(best_idx)].copy(),
        strategy=strategy,
        seed=seed,
        restarts=restarts,
        iterations=iters,
        converged=True,
        restart_values=tuple(restart_values),
        grid_restricted=True,
        opts={"grid_size": size},
    )


def oracle_solve(desc: SetDescriptor, n: int, s: float, grid) -> SolveReport:
    """Exhaustive maximin over all N-multisets of a small grid.

    Guarded to len(grid) <= 64 and n <= 4; the intended use is validating
    the grid-restricted solver on instances where enumeration is exact.
    Ties break toward the lexicographically smallest index multiset, and the
    witness is the lowest-index minimizing grid node.
    """
    G = np.asarray(grid, dtype=float)
    if len(G) > 64:
        raise ValueError("oracle grid capped at 64 nodes")
    if n > 4 or n < 1:
        raise ValueError("oracle handles 1 <= n <= 4")
    K = _grid_kernel(G, s)
    best_val, best_idx = _enumerate_grid(K, len(G), n)
    f = K[:, np.sort(np.asarray(best_idx))].sum(axis=1)
    wit = G[int(np.argmin(f))]
    return SolveReport(
        home=desc,
        n=n,
        s=s,
        value=best_val,
        witness=tuple(float(v) for v in wit),
        config=G[list(best_idx)].copy(),
        strategy="oracle",
        seed=0,
        restarts=1,
        iterations=0,
        converged=True,
        restart_values=(best_val,),
        grid_restricted=True,
        opts={"grid_size": len(G)},
    )


def equally_spaced_value(n: int, s: float, radius: float = 1.0) -> float:
    """Min potential of N equally spaced points on a circle (gap midpoint).

    For s = 2 this collapses to the closed form N^2/4 on the unit circle.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if n == 1:
        return (2.0 * radius) ** (-s)
    j = np.arange(n)
    dth = np.abs(math.pi / n - 2.0 * math.pi * j / n)
    dth = np.minimum(dth, 2.0 * math.pi - dth)
    chords = 2.0 * radius * np.sin(dth / 2.0)
    return float((chords ** (-s)).sum())
