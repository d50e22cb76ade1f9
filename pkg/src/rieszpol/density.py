"""Covering density, the Riesz integral bound, and equidistribution counts.

The covering density of a d-dimensional set A at scale eps is

    alpha(A; eps) = sup over x in A, 0 < r <= eps of
                    H_d(B(x, r) intersect A) / (beta_d r^d),

a supremum over uncountably many pairs.  Two estimators live here: a grid
estimator (64 x 64 by default, r log-spaced up to eps) that is a certified
lower bound on the sup, and closed forms for every catalog region where the
maximizing pair is known analytically.  The integral bound

    int_{D minus B(y,R)} |x-y|^(-d) dH_d(x)
        <=  r^(-d) H_d(D)  +  beta_d alpha(D; r) d log(r / R)

needs the closed-form alpha on the right: plugging a grid underestimate in
would shrink the right side and flag spurious violations.

Counting diagnostics use closed cells throughout: a point on a cell
boundary counts as inside, and duplicates count per copy.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np

from . import geometry
from .geometry import SetDescriptor, TestCell, _Intervals
from .potentials import Configuration

__all__ = [
    "AlphaEstimate",
    "CountReport",
    "alpha",
    "alpha_exact",
    "alpha_limit_check",
    "riesz_integral",
    "lemma_bound_check",
    "lemma_bound_suite",
    "empirical_counts",
    "equidistribution_report",
]


# ---------------------------------------------------------------------------
# regions: a full catalog set or one test cell


def _split_region(region):
    if isinstance(region, TestCell):
        return region.parent, region
    return region, None


def _region_measure(region) -> float:
    home, cell = _split_region(region)
    return cell.measure if cell is not None else geometry.measure(home)


def _region_dim(region) -> int:
    home, _ = _split_region(region)
    return home.d


def _region_contains(region, p, tol=1e-9) -> bool:
    home, cell = _split_region(region)
    if not geometry.contains(home, p, tol):
        return False
    return cell is None or geometry.cell_contains(cell, p, tol)


# ---------------------------------------------------------------------------
# covering density


@dataclass(frozen=True)
class AlphaEstimate:
    """Grid estimate of the covering density at scale epsilon.

    value is the max of measured ratios over the (x, r) grid, hence a
    certified lower bound on the supremum; argmax records the maximizing
    pair.
    """

    epsilon: float
    value: float
    x_grid: int
    r_grid: int
    argmax_x: tuple
    argmax_r: float


def alpha(
    desc: SetDescriptor,
    eps: float,
    x_samples: int = 64,
    r_samples: int = 64,
    x_points=None,
    r_grid=None,
    exclude=None,
) -> AlphaEstimate:
    """Grid estimator of the covering density of a catalog set.

    r runs log-spaced over [eps/100, eps] (or an explicit r_grid); x runs
    over the deterministic mesh (or explicit x_points).  exclude = (points,
    delta) measures A minus delta-neighborhoods of the points, with x
    samples inside the neighborhoods dropped; this is how unions with part
    contacts are tamed.
    """
    if isinstance(desc, TestCell):
        raise TypeError("grid alpha works on set descriptors; use alpha_exact "
                        "for cells or pass explicit x_points on the parent")
    if eps <= 0:
        raise ValueError("eps must be positive")
    d = desc.d
    beta = geometry.unit_ball_volume(d)
    X = (np.asarray(x_points, dtype=float) if x_points is not None
         else np.array(geometry.sample(desc, x_samples)))
    if exclude is not None:
        pts, delta = exclude
        if len(pts):
            P = np.asarray(pts, dtype=float)
            dist = np.min(
                np.linalg.norm(X[:, None, :] - P[None, :, :], axis=-1), axis=1
            )
            X = X[dist > delta]
    R = (np.asarray(r_grid, dtype=float) if r_grid is not None
         else np.geomspace(eps / 100.0, eps, r_samples))
    best, arg = -math.inf, (None, math.nan)
    for x in X:
        for r in R:
            mu = geometry.ball_intersection_measure(desc, x, float(r),
                                                    exclude=exclude)
            ratio = mu / (beta * float(r) ** d)
            if ratio > best:
                best, arg = ratio, (tuple(float(v) for v in x), float(r))
    return AlphaEstimate(
        epsilon=float(eps),
        value=float(best),
        x_grid=len(X),
        r_grid=len(R),
        argmax_x=arg[0],
        argmax_r=arg[1],
    )


def _alpha_circle(rho: float, eps: float) -> float:
    # ratio 2 rho asin(r/(2 rho)) / r increases in r up to r = 2 rho, then
    # the whole circle is captured and the ratio decays; sup at min(eps, 2rho)
    r = min(eps, 2.0 * rho)
    return 2.0 * rho * math.asin(min(1.0, r / (2.0 * rho))) / r


def _union_gap(desc: SetDescriptor) -> float:
    gap = math.inf
    for i, pi in enumerate(desc.parts):
        mesh = np.array(geometry.sample(pi, 512))
        for j, pj in enumerate(desc.parts):
            if i == j:
                continue
            dist = np.linalg.norm(mesh - geometry.project(pj, mesh), axis=-1)
            gap = min(gap, float(dist.min()))
    return gap


def alpha_exact(region, eps: float) -> float:
    """Closed-form covering density where the maximizing (x, r) is known.

    Circles and arcs have an explicit increasing arc/chord ratio; segments,
    spheres, balls, cubes and their caps sit exactly at 1.  Separated unions
    reduce to the max over parts; unions whose parts touch have no closed
    form here (the grid estimator still applies).
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    home, cell = _split_region(region)
    if cell is not None:
        part = geometry._part(home, cell.part_index)
        if cell.shape == "part":
            return alpha_exact(part, eps)
        if part.kind == "sphere" and part.d == 2:
            return 1.0  # caps and bands: cap-area identity caps the ratio at 1
        if part.kind == "segment":
            return 1.0
        if part.kind in ("circle", "arc") or (
            part.kind == "sphere" and part.d == 1
        ):
            extent = cell.measure / part.radius
            return alpha_exact(geometry.arc(part.radius, extent), eps)
        raise NotImplementedError(f"alpha_exact for cells on {part.kind}")
    k = home.kind
    if k == "circle" or (k == "sphere" and home.d == 1):
        return _alpha_circle(home.radius, eps)
    if k == "arc":
        r_fit = 2.0 * home.radius * math.sin(home.extent / 4.0)
        return _alpha_circle(home.radius, min(eps, r_fit))
    if k in ("segment", "ball", "cube"):
        return 1.0
    if k == "sphere":
        return 1.0
    if k == "augmented_arc":
        return 0.0  # 2-measure of every ball intersection vanishes
    if k == "union":
        gap = _union_gap(home)
        if eps < 0.99 * gap:
            return max(alpha_exact(p, eps) for p in home.parts)
        raise NotImplementedError(
            "no closed form once balls can span several parts"
        )
    raise NotImplementedError(k)


def alpha_limit_check(
    desc: SetDescriptor,
    schedule=None,
    x_samples: int = 64,
    r_samples: int = 64,
    mode: str = "auto",
    exclude: object = "auto",
    delta: float = 0.1,
) -> dict:
    """Track the covering density along a decreasing eps schedule.

    Passes when the final value is <= 1.02.  mode 'exact' uses closed
    forms, 'grid' the estimator, 'auto' closed forms where implemented with
    grid fallback.  For unions, exclude='auto' removes delta-neighborhoods
    of pairwise part intersections first (with no exclusion, a touching
    union legitimately exceeds 1 at scales above the contact gap).
    """
    if schedule is None:
        schedule = (0.5, 0.1, 0.01)
    schedule = tuple(float(e) for e in schedule)
    if len(schedule) < 3:
        raise ValueError("schedule needs at least 3 epsilons")
    if any(b >= a for a, b in zip(schedule, schedule[1:])):
        raise ValueError("schedule must strictly decrease")
    excl = None
    excluded_points = []
    if desc.kind == "union" and exclude == "auto":
        pts = geometry.pairwise_intersection_points(desc)
        if pts:
            excl = (pts, delta)
            excluded_points = [tuple(float(v) for v in p) for p in pts]
    elif exclude not in (None, "auto"):
        excl = exclude
        excluded_points = [tuple(float(v) for v in p) for p in exclude[0]]
    values = []
    used = []
    for eps in schedule:
        if mode in ("auto", "exact") and excl is None:
            try:
                values.append(float(alpha_exact(desc, eps)))
                used.append("exact")
                continue
            except NotImplementedError:
                if mode == "exact":
                    raise
        est = alpha(desc, eps, x_samples, r_samples, exclude=excl)
        values.append(est.value)
        used.append("grid")
    return {
        "epsilons": schedule,
        "values": tuple(values),
        "limsup_estimate": values[-1],
        "passes": values[-1] <= 1.02,
        "mode": tuple(used),
        "excluded_points": excluded_points,
        "delta": delta if excl is not None else None,
    }


# ---------------------------------------------------------------------------
# the Riesz integral over D minus B(y, R)


def _simpson(f, a: float, b: float, n: int) -> float:
    x = np.linspace(a, b, n + 1)
    y = f(x)
    h = (b - a) / n
    return float(h / 3.0 * (y[0] + y[-1] + 4 * y[1:-1:2].sum() + 2 * y[2:-1:2].sum()))


def _doubling(f, a: float, b: float, rtol: float, max_level: int = 22):
    """Composite Simpson refined until two successive doublings agree."""
    if b - a <= 0:
        return 0.0, True, 0
    prev = None
    for level in range(2, max_level + 1):
        val = _simpson(f, a, b, 2**level)
        if prev is not None and abs(val - prev) <= rtol * max(abs(val), 1e-300):
            return val, True, level
        prev = val
    return prev, False, max_level


def _curve_riesz(home, cell, y, R, rtol):
    total, conv, levels = 0.0, True, 0
    for part in geometry.one_dim_parts(home):
        period = (part.hi - part.lo) if part.wrap else None
        dom = _Intervals(period=period)
        if cell is None:
            dom.add(part.lo, part.hi)
        elif cell.part_index != part.index:
            continue
        elif cell.shape == "part":
            dom.add(part.lo, part.hi)
        elif cell.shape == "cap":
            sub = geometry._part(home, part.index)
            tc = geometry.arclength_param(home, part.index, np.asarray(cell.center))
            half = cell.geodesic * (sub.radius if sub.kind != "segment" else 1.0)
            lo, hi = tc - half, tc + half
            if not part.wrap:
                lo, hi = max(part.lo, lo), min(part.hi, hi)
            dom.add(lo, hi)
        else:  # box: parameter bounds to arclength
            sub = geometry._part(home, part.index)
            speed = sub.radius if sub.kind != "segment" else 1.0
            (lo, hi) = cell.bounds[0]
            dom.add(lo * speed, hi * speed)
        ball = _Intervals(period=period)
        for a, b in geometry.part_ball_window(home, part.index, y, R):
            ball.add(a, b)
        dom.subtract(ball)

        def integrand(t):
            pts = geometry.part_point(home, part.index, t)
            dist = np.linalg.norm(pts - np.asarray(y)[None, :], axis=-1)
            return dist ** (-float(home.d))

        for a, b in dom.segs:
            val, ok, lev = _doubling(integrand, a, b, rtol)
            total += val
            conv = conv and ok
            levels = max(levels, lev)
    return total, conv, levels


def _sphere_riesz(home, cell, y, R, rtol):
    rho = home.radius
    c0 = np.asarray(home.offset, dtype=float) if home.offset else np.zeros(3)
    yhat = (np.asarray(y, dtype=float) - c0) / rho
    phi_R = 2.0 * math.asin(min(1.0, R / (2.0 * rho)))
    if phi_R >= math.pi:
        return 0.0, True, 0
    if cell is None or cell.shape == "part":
        lo, hi = phi_R, math.pi

        def integrand(phi):
            chord2 = (2.0 * rho * np.sin(phi / 2.0)) ** 2
            return 2.0 * math.pi * rho * rho * np.sin(phi) / chord2

        val, ok, lev = _doubling(integrand, lo, hi, rtol)
        return val, ok, lev
    if cell.shape != "cap":
        raise NotImplementedError("sphere regions support caps and full sets")
    chat = (np.asarray(cell.center, dtype=float) - c0) / rho
    beta = math.acos(max(-1.0, min(1.0, float(yhat @ chat))))
    gamma = cell.geodesic
    hi = min(math.pi, gamma + beta)
    if hi <= phi_R:
        return 0.0, True, 0

    def w(phi):
        phi = np.asarray(phi, dtype=float)
        out = np.empty_like(phi)
        sb = math.sin(beta)
        denom = np.sin(phi) * sb
        small = denom < 1e-14
        with np.errstate(invalid="ignore", divide="ignore"):
            q = (math.cos(gamma) - np.cos(phi) * math.cos(beta)) / denom
        inside = phi + beta <= gamma  # entire azimuth circle in the cap
        out = np.where(
            small,
            np.where(inside | (np.abs(phi - beta) <= gamma), 2 * math.pi, 0.0),
            2.0 * np.arccos(np.clip(q, -1.0, 1.0)),
        )
        return out

    def integrand(phi):
        chord2 = (2.0 * rho * np.sin(phi / 2.0)) ** 2
        return w(phi) * rho * rho * np.sin(phi) / chord2

    # kinks where the azimuth window opens/closes
    knots = sorted({phi_R, hi} | {
        k for k in (abs(gamma - beta), gamma + beta) if phi_R < k < hi
    })
    total, conv, levels = 0.0, True, 0
    for a, b in zip(knots[:-1], knots[1:]):
        val, ok, lev = _doubling(integrand, a, b, rtol)
        total += val
        conv = conv and ok
        levels = max(levels, lev)
    return total, conv, levels


def riesz_integral(region, y, R: float, rtol: float = 1e-6,
                   details: bool = False):
    """Integral of |x - y|^(-d) over D minus B(y, R) for y in D.

    Supported regions: 1-dimensional catalog sets (and unions of them),
    the 2-sphere, and cap/box cells on those.  Quadrature is composite
    Simpson per smooth piece, doubled until successive levels agree to rtol
    relative; with details=True returns (value, converged, levels).
    """
    if R <= 0:
        raise ValueError("R must be positive")
    home, cell = _split_region(region)
    y = np.asarray(y, dtype=float)
    if not _region_contains(region, y, tol=1e-9):
        raise ValueError("y must lie in the region")
    if home.kind == "sphere" and home.d == 2:
        val, conv, lev = _sphere_riesz(home, cell, y, R, rtol)
    elif home.d == 1:
        val, conv, lev = _curve_riesz(home, cell, y, R, rtol)
    else:
        raise NotImplementedError(
            "riesz_integral covers 1-dimensional sets and the 2-sphere"
        )
    if details:
        return val, conv, lev
    return val


def lemma_bound_check(region, y, R: float, r: float,
                      alpha_value: float | None = None,
                      rtol: float = 1e-6) -> dict:
    """Verify the integral bound at one instance (0 < R <= r).

    lhs from quadrature; rhs = r^(-d) H_d(D) + beta_d alpha(D;r) d log(r/R)
    with the closed-form alpha unless an explicit value is supplied.
    """
    if not (0 < R <= r):
        raise ValueError("need 0 < R <= r")
    d = _region_dim(region)
    lhs, conv, _ = riesz_integral(region, y, R, rtol, details=True)
    a = alpha_exact(region, r) if alpha_value is None else float(alpha_value)
    rhs = (r ** (-d)) * _region_measure(region) + (
        geometry.unit_ball_volume(d) * a * d * math.log(r / R)
    )
    return {
        "lhs": float(lhs),
        "rhs": float(rhs),
        "holds": bool(lhs <= rhs + 1e-9),
        "alpha": float(a),
        "integral_converged": bool(conv),
        "d": d,
        "R": float(R),
        "r": float(r),
    }


def _cap_interior_point(desc, cell, rng):
    """Random point strictly inside a cap cell."""
    part = geometry._part(desc, cell.part_index)
    if part.kind == "sphere" and part.d == 2:
        rho = part.radius
        c0 = np.asarray(part.offset, dtype=float) if part.offset else np.zeros(3)
        chat = (np.asarray(cell.center) - c0) / rho
        a = np.zeros(3)
        a[int(np.argmin(np.abs(chat)))] = 1.0
        t1 = np.cross(chat, a)
        t1 /= np.linalg.norm(t1)
        t2 = np.cross(chat, t1)
        beta = cell.geodesic * rng.uniform(0.0, 0.95)
        tau = rng.uniform(0.0, 2 * math.pi)
        nvec = (
            math.cos(beta) * chat
            + math.sin(beta) * (math.cos(tau) * t1 + math.sin(tau) * t2)
        )
        return c0 + rho * nvec
    # 1-dimensional caps: uniform arclength inside the window
    tc = geometry.arclength_param(desc, cell.part_index, np.asarray(cell.center))
    speed = part.radius if part.kind != "segment" else 1.0
    half = cell.geodesic * speed
    lo, hi = tc - half, tc + half
    odp = {p.index: p for p in geometry.one_dim_parts(desc)}[cell.part_index]
    if not odp.wrap:
        lo, hi = max(odp.lo, lo), min(odp.hi, hi)
    t = rng.uniform(lo + 0.01 * (hi - lo), hi - 0.01 * (hi - lo))
    if odp.wrap:
        t = math.fmod(t, odp.hi - odp.lo)
        if t < 0:
            t += odp.hi - odp.lo
    return geometry.part_point(desc, cell.part_index, np.array([t]))[0]


def lemma_bound_suite(count: int = 200, seed: int = 0,
                      rtol: float = 1e-6) -> dict:
    """Randomized instances of the integral bound across region families.

    Families cycle target regions (circles, arcs, the 2-sphere, spherical
    caps, circle caps); y is drawn in the region, R and r log-uniformly
    with R <= r.  Returns per-instance results plus a summary.
    """
    rng = np.random.default_rng(seed)
    t0 = time.perf_counter()
    results = []
    for i in range(count):
        fam = i % 5
        if fam == 0:
            region = geometry.circle(rng.uniform(0.5, 2.0))
            diam = 2.0 * region.radius
            y = geometry.random_points(region, 1, rng)[0]
        elif fam == 1:
            region = geometry.arc(rng.uniform(0.5, 2.0),
                                  rng.uniform(0.5, 2.0 * math.pi))
            diam = 2.0 * region.radius
            y = geometry.random_points(region, 1, rng)[0]
        elif fam == 2:
            region = geometry.sphere(2, rng.uniform(0.5, 2.0))
            diam = 2.0 * region.radius
            y = geometry.random_points(region, 1, rng)[0]
        elif fam == 3:
            parent = geometry.sphere(2, rng.uniform(0.5, 2.0))
            center = geometry.random_points(parent, 1, rng)[0]
            cell = geometry._cap_cell(parent, center,
                                      rng.uniform(0.3, 0.5 * math.pi), "cap")
            region = cell
            diam = 2.0 * parent.radius
            y = _cap_interior_point(parent, cell, rng)
        else:
            parent = geometry.circle(rng.uniform(0.5, 2.0))
            center = geometry.random_points(parent, 1, rng)[0]
            cell = geometry._cap_cell(parent, center,
                                      rng.uniform(0.3, 0.5 * math.pi), "cap")
            region = cell
            diam = 2.0 * parent.radius
            y = _cap_interior_point(parent, cell, rng)
        r = math.exp(rng.uniform(math.log(0.05 * diam), math.log(0.9 * diam)))
        R = r * math.exp(rng.uniform(math.log(1e-2), 0.0))
        res = lemma_bound_check(region, y, R, r, rtol=rtol)
        res["family"] = fam
        results.append(res)
    worst = max(res["lhs"] - res["rhs"] for res in results)
    return {
        "count": count,
        "seed": seed,
        "all_hold": all(res["holds"] for res in results),
        "all_converged": all(res["integral_converged"] for res in results),
        "worst_slack": float(worst),
        "elapsed": time.perf_counter() - t0,
        "results": results,
    }


# ---------------------------------------------------------------------------
# counting measures


@dataclass(frozen=True)
class CountReport:
    """Cell counts of a configuration against measure-proportional targets.

    rows: (label, count, fraction, target, deviation); duplicates counted
    per copy; boundary points inside (closed cells).
    """

    n: int
    rows: tuple
    max_deviation: float


def empirical_counts(omega, cells) -> CountReport:
    """Count configuration points per cell, duplicates counted per copy.

    Cap cells are closed and may overlap: boundary points count as inside
    for each cap that reaches them.  Partition (box/part) cells assign
    every point exactly once, a tie on a shared boundary going to the
    earlier cell, so fractions over a partition sum to exactly 1.
    """
    if isinstance(omega, Configuration):
        pts, home = omega.points, omega.home
    else:
        raise TypeError("empirical_counts expects a Configuration")
    total = geometry.measure(home)
    counts = [0] * len(cells)
    exclusive = [i for i, c in enumerate(cells) if c.shape != "cap"]
    for p in pts:
        for i, cell in enumerate(cells):
            if cell.shape == "cap" and geometry.cell_contains(cell, p):
                counts[i] += 1
        for i in exclusive:
            if geometry.cell_contains(cells[i], p):
                counts[i] += 1
                break
    rows = []
    max_dev = 0.0
    for cell, count in zip(cells, counts):
        frac = count / len(pts)
        target = cell.measure / total if total > 0 else math.nan
        dev = abs(frac - target) if total > 0 else math.nan
        if total > 0:
            max_dev = max(max_dev, dev)
        rows.append((cell.label, int(count), float(frac), float(target),
                     float(dev)))
    return CountReport(n=len(pts), rows=tuple(rows),
                       max_deviation=float(max_dev))


def _as_configuration(item):
    if isinstance(item, Configuration):
        return item
    # solver reports carry .config (ndarray) and .home
    return Configuration(item.config, item.home, validate=False)


def equidistribution_report(reports, family="partition:32",
                            seed: int | None = None) -> dict:
    """Per-N max cell deviation for a sequence of configurations.

    All configurations must share one home set; cells are built once from
    the family spec.  decreasing flags whether the last deviation does not
    exceed the first.
    """
    configs = [_as_configuration(r) for r in reports]
    if not configs:
        raise ValueError("need at least one configuration")
    home = configs[0].home
    if any(c.home != home for c in configs[1:]):
        raise ValueError("all configurations must share one home set")
    cells = geometry.make_test_cells(home, family, seed)
    rows = []
    counts = []
    for c in configs:
        rep = empirical_counts(c, cells)
        counts.append(rep)
        rows.append((c.n, rep.max_deviation))
    return {
        "family": family if isinstance(family, str) else tuple(family),
        "cells": len(cells),
        "rows": tuple(rows),
        "decreasing": bool(rows[-1][1] <= rows[0][1] + 1e-12),
        "counts": tuple(counts),
    }
