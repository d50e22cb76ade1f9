"""Catalog of compact sets with exact measures, projections and meshes.

Every set A lives in some ambient R^m together with a declared Hausdorff
dimension d and an analytically known d-dimensional measure.  The catalog is
deliberately parametric (circles, arcs, segments, balls, cubes, spheres and
finite unions of those) so that each downstream quantity - covering density,
ball intersection measure, cell measure - has a closed form or a cheap exact
oracle instead of a mesh approximation.

Descriptors are immutable and hashable; all operations are pure functions of
the descriptor, so concurrent use is safe and results are cacheable.

Conventions fixed once here and relied on everywhere else:
  * projection tie-breaks: lowest part index, then smallest chart parameter;
  * sample(A, n) is deterministic and quasi-uniform with covering radius
    <= C (measure(A)/n)^(1/d), C <= 2 sqrt(d) over the catalog;
  * test cells are closed sets: boundary points count as inside.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field, replace
from functools import lru_cache

import numpy as np

__all__ = [
    "SetDescriptor",
    "TestCell",
    "circle",
    "arc",
    "segment",
    "ball",
    "cube",
    "sphere",
    "union",
    "augmented_arc",
    "placed",
    "scaled",
    "unit_ball_volume",
    "unit_sphere_area",
    "measure",
    "dimension",
    "ambient_dim",
    "project",
    "contains",
    "sample",
    "random_points",
    "natural_scale",
    "param_of",
    "tangent_basis",
    "part_count",
    "part_measure",
    "one_dim_parts",
    "part_point",
    "ball_intersection_measure",
    "pairwise_intersection_points",
    "make_test_cells",
    "cell_contains",
    "parse_set_spec",
    "format_set_spec",
    "descriptor_hash",
]


# ---------------------------------------------------------------------------
# volumes of round bodies


def unit_ball_volume(d: int) -> float:
    """Volume of the unit ball in R^d, pi^(d/2) / Gamma(d/2 + 1).

    Integer dimensions use the two-step recursion v_d = 2 pi v_{d-2} / d,
    which keeps the small cases exact in floating point (v_1 = 2, v_2 = pi).
    """
    if d < 0:
        raise ValueError("dimension must be >= 0")
    if d != int(d):
        return math.pi ** (d / 2.0) / math.gamma(d / 2.0 + 1.0)
    v = 1.0 if int(d) % 2 == 0 else 2.0
    for k in range(2 + int(d) % 2, int(d) + 1, 2):
        v *= 2.0 * math.pi / k
    return v


def unit_sphere_area(d: int) -> float:
    """d-dimensional surface measure of the unit sphere S^d in R^(d+1)."""
    if d < 0:
        raise ValueError("dimension must be >= 0")
    return (d + 1) * unit_ball_volume(d + 1)


# ---------------------------------------------------------------------------
# descriptors


@dataclass(frozen=True)
class SetDescriptor:
    """Immutable description of a compact set A in R^m.

    kind is one of 'circle', 'arc', 'segment', 'ball', 'cube', 'sphere',
    'union', 'augmented_arc'.  d is the declared Hausdorff dimension used for
    normalizations; for 'augmented_arc' it deliberately exceeds the
    topological dimension of the set, making the d-measure zero.

    offset/frame place the natural parametrization rigidly in R^m:
    global = offset + frame @ local, frame having orthonormal columns.
    Empty tuples mean zero offset / identity embedding in the leading
    coordinates.
    """

    kind: str
    d: int
    m: int
    radius: float = 0.0
    extent: float = 0.0
    length: float = 0.0
    parts: tuple = ()
    offset: tuple = ()
    frame: tuple = ()

    def __post_init__(self):
        if self.kind not in _NATURAL_AMBIENT and self.kind not in ("union",):
            raise ValueError(f"unknown set kind {self.kind!r}")


_NATURAL_AMBIENT = {
    "circle": 2,
    "arc": 2,
    "segment": 1,
    "ball": None,  # d
    "cube": None,  # d
    "sphere": None,  # d + 1
    "augmented_arc": 2,
}


def _natural_m(kind: str, d: int) -> int:
    if kind in ("ball", "cube"):
        return d
    if kind == "sphere":
        return d + 1
    return _NATURAL_AMBIENT[kind]


def circle(radius: float = 1.0) -> SetDescriptor:
    """Circle of the given radius centered at the origin of R^2."""
    if radius <= 0:
        raise ValueError("radius must be positive")
    return SetDescriptor("circle", 1, 2, radius=float(radius))


def arc(radius: float = 1.0, extent: float = math.pi) -> SetDescriptor:
    """Closed circular arc, angles [0, extent] on a circle of given radius."""
    if radius <= 0 or not (0 < extent <= 2 * math.pi):
        raise ValueError("need radius > 0 and 0 < extent <= 2*pi")
    return SetDescriptor("arc", 1, 2, radius=float(radius), extent=float(extent))


def segment(length: float = 2.0) -> SetDescriptor:
    """Closed segment [-length/2, length/2] on the real line."""
    if length <= 0:
        raise ValueError("length must be positive")
    return SetDescriptor("segment", 1, 1, length=float(length))


def ball(d: int, radius: float = 1.0) -> SetDescriptor:
    """Closed ball of the given radius centered at the origin of R^d."""
    if d < 1 or radius <= 0:
        raise ValueError("need d >= 1 and radius > 0")
    return SetDescriptor("ball", d, d, radius=float(radius))


def cube(d: int, side: float = 1.0) -> SetDescriptor:
    """Cube [0, side]^d."""
    if d < 1 or side <= 0:
        raise ValueError("need d >= 1 and side > 0")
    return SetDescriptor("cube", d, d, length=float(side))


def sphere(d: int, radius: float = 1.0) -> SetDescriptor:
    """Sphere S^d of the given radius centered at the origin of R^(d+1)."""
    if d not in (1, 2) or radius <= 0:
        raise ValueError("spheres supported for d in {1, 2} with radius > 0")
    return SetDescriptor("sphere", d, d + 1, radius=float(radius))


def union(*parts: SetDescriptor) -> SetDescriptor:
    """Finite union of placed parts sharing one ambient space and dimension."""
    if not parts:
        raise ValueError("union needs at least one part")
    m = max(ambient_dim(p) for p in parts)
    parts = tuple(_lift(p, m) for p in parts)
    d = parts[0].d
    if any(p.d != d for p in parts):
        raise ValueError("union parts must share the declared dimension")
    return SetDescriptor("union", d, m, parts=parts)


def augmented_arc(radius: float = 1.0, extent: float = math.pi) -> SetDescriptor:
    """Arc plus its isolated center point, declared 2-dimensional.

    The set is compact but its 2-measure vanishes, so normalized limits
    against beta_d / H_d(A) diverge.  It exists to exercise the degenerate
    branches of the asymptotic reports.
    """
    if radius <= 0 or not (0 < extent <= 2 * math.pi):
        raise ValueError("need radius > 0 and 0 < extent <= 2*pi")
    return SetDescriptor(
        "augmented_arc", 2, 2, radius=float(radius), extent=float(extent)
    )


def placed(desc: SetDescriptor, offset=None, frame=None) -> SetDescriptor:
    """Rigidly place a descriptor: global = offset + frame @ natural.

    frame must have orthonormal columns, shape (m_new, m_old).  Placement of
    a union distributes onto the parts so unions never carry their own frame.
    """
    m_old = desc.m
    if frame is None:
        F = np.eye(m_old)
    else:
        F = np.asarray(frame, dtype=float)
        if F.ndim != 2 or F.shape[1] != m_old:
            raise ValueError("frame must have shape (m_new, m_old)")
        if not np.allclose(F.T @ F, np.eye(m_old), atol=1e-12):
            raise ValueError("frame columns must be orthonormal")
    m_new = F.shape[0]
    if offset is None:
        off = np.zeros(m_new)
    else:
        off = np.asarray(offset, dtype=float)
        if off.shape != (m_new,):
            raise ValueError("offset length must match frame rows")
    if desc.kind == "union":
        return SetDescriptor(
            "union",
            desc.d,
            m_new,
            parts=tuple(placed(p, off, F) for p in desc.parts),
        )
    F0, off0 = _frame_of(desc), _offset_of(desc)
    # compose: off + F (off0 + F0 x) = (off + F off0) + (F F0) x
    F1 = F @ F0
    off1 = off + F @ off0
    return replace(
        desc,
        m=m_new,
        offset=tuple(float(v) for v in off1),
        frame=tuple(tuple(float(v) for v in row) for row in F1),
    )


def _lift(desc: SetDescriptor, m: int) -> SetDescriptor:
    if desc.m == m:
        return desc
    if desc.m > m:
        raise ValueError("cannot lower ambient dimension")
    F = np.zeros((m, desc.m))
    F[: desc.m] = np.eye(desc.m)
    return placed(desc, np.zeros(m), F)


def scaled(desc: SetDescriptor, lam: float) -> SetDescriptor:
    """Image of the set under x -> lam * x (offsets scale along)."""
    if lam <= 0:
        raise ValueError("scale factor must be positive")
    off = tuple(lam * v for v in desc.offset)
    if desc.kind == "union":
        return SetDescriptor(
            "union", desc.d, desc.m, parts=tuple(scaled(p, lam) for p in desc.parts)
        )
    out = replace(desc, offset=off)
    if desc.kind in ("circle", "arc", "ball", "sphere", "augmented_arc"):
        return replace(out, radius=lam * desc.radius)
    if desc.kind == "segment":
        return replace(out, length=lam * desc.length)
    if desc.kind == "cube":
        return replace(out, length=lam * desc.length)
    raise ValueError(desc.kind)


# ---------------------------------------------------------------------------
# local <-> global coordinates


def _frame_of(desc: SetDescriptor) -> np.ndarray:
    m0 = _natural_m(desc.kind, desc.d)
    if not desc.frame:
        F = np.zeros((desc.m, m0))
        F[:m0] = np.eye(m0)
        return F
    return np.asarray(desc.frame, dtype=float)


def _offset_of(desc: SetDescriptor) -> np.ndarray:
    if not desc.offset:
        return np.zeros(desc.m)
    return np.asarray(desc.offset, dtype=float)


def _to_local(desc: SetDescriptor, P: np.ndarray) -> np.ndarray:
    return (P - _offset_of(desc)) @ _frame_of(desc)


def _to_global(desc: SetDescriptor, X: np.ndarray) -> np.ndarray:
    return X @ _frame_of(desc).T + _offset_of(desc)


# ---------------------------------------------------------------------------
# measure, dimension


def dimension(desc: SetDescriptor) -> int:
    return desc.d


def ambient_dim(desc: SetDescriptor) -> int:
    return desc.m


def measure(desc: SetDescriptor) -> float:
    """d-dimensional Hausdorff measure of the set (exact)."""
    k = desc.kind
    if k == "circle":
        return 2 * math.pi * desc.radius
    if k == "arc":
        return desc.radius * desc.extent
    if k == "segment":
        return desc.length
    if k == "ball":
        return unit_ball_volume(desc.d) * desc.radius**desc.d
    if k == "cube":
        return desc.length**desc.d
    if k == "sphere":
        return unit_sphere_area(desc.d) * desc.radius**desc.d
    if k == "union":
        return float(sum(measure(p) for p in desc.parts))
    if k == "augmented_arc":
        return 0.0  # 1-dimensional set measured with d = 2
    raise ValueError(k)


def natural_scale(desc: SetDescriptor, n: int) -> float:
    """Length scale (measure/n)^(1/d) used for steps and mesh spacings."""
    mu = measure(desc)
    if mu <= 0:
        mu = desc.radius * desc.extent  # augmented arc: fall back to arclength
    return (mu / max(n, 1)) ** (1.0 / desc.d)


def anchor_point(desc: SetDescriptor) -> np.ndarray:
    """A canonical point of A: the exact center for balls and cubes, the
    parameter origin otherwise.  Collapsed configurations are seeded here;
    on balls that placement is exactly optimal in the s <= d - 2 regime, so
    the anchor must hit the center to full precision."""
    k = desc.kind
    if k == "ball":
        return _offset_of(desc)
    if k == "cube":
        return _to_global(desc, np.full((1, desc.d), desc.length / 2.0))[0]
    if k == "union":
        weights = [measure(p) for p in desc.parts]
        return anchor_point(desc.parts[int(np.argmax(weights))])
    if k == "augmented_arc":
        return np.array(sample(desc, 1)[0])
    return np.array(sample(desc, 1)[0])


# ---------------------------------------------------------------------------
# parts

# Unions are handled uniformly by treating every descriptor as a list of
# parts (a single-part list for the simple kinds).  The augmented arc is a
# two-part set: part 0 is the isolated point, part 1 the arc.


def part_count(desc: SetDescriptor) -> int:
    if desc.kind == "union":
        return len(desc.parts)
    if desc.kind == "augmented_arc":
        return 2
    return 1


def _part(desc: SetDescriptor, i: int) -> SetDescriptor:
    if desc.kind == "union":
        return desc.parts[i]
    if desc.kind == "augmented_arc":
        base = replace(
            desc, kind="arc", d=1, radius=desc.radius, extent=desc.extent
        )
        if i == 1:
            return base
        # part 0: the isolated point, modelled as a zero-length segment
        # placed at the arc's center; only used for projection/params
        col = tuple((1.0,) if j == 0 else (0.0,) for j in range(desc.m))
        pt = SetDescriptor(
            "segment", 1, desc.m, length=0.0,
            offset=desc.offset if desc.offset else (0.0,) * desc.m,
            frame=col,
        )
        return pt
    return desc


def part_measure(desc: SetDescriptor, i: int) -> float:
    return measure(_part(desc, i))


# ---------------------------------------------------------------------------
# projection


def _project_simple(desc: SetDescriptor, X: np.ndarray) -> np.ndarray:
    """Nearest-point map in natural local coordinates, vectorized."""
    k = desc.kind
    if k in ("circle", "sphere"):
        rho = desc.radius
        r = np.linalg.norm(X, axis=-1, keepdims=True)
        out = np.where(r > 0, X * (rho / np.where(r == 0, 1.0, r)), 0.0)
        # center of symmetry: tie-break to the parameter-0 point
        pole = np.zeros(X.shape[-1])
        if k == "sphere" and desc.d == 2:
            pole[2] = rho  # north pole, polar angle 0
        else:
            pole[0] = rho
        deg = (r[..., 0] == 0)
        if np.any(deg):
            out = np.where(deg[..., None], pole, out)
        return out
    if k == "arc":
        rho, ext = desc.radius, desc.extent
        theta = np.mod(np.arctan2(X[..., 1], X[..., 0]), 2 * math.pi)
        on = theta <= ext
        cand = rho * np.stack([np.cos(theta), np.sin(theta)], axis=-1)
        e0 = np.array([rho, 0.0])
        e1 = rho * np.array([math.cos(ext), math.sin(ext)])
        d0 = np.linalg.norm(X - e0, axis=-1)
        d1 = np.linalg.norm(X - e1, axis=-1)
        ends = np.where((d0 <= d1)[..., None], e0, e1)
        out = np.where(on[..., None], cand, ends)
        deg = np.linalg.norm(X, axis=-1) == 0
        if np.any(deg):
            out = np.where(deg[..., None], e0, out)
        return out
    if k == "segment":
        if desc.length == 0.0:
            return np.zeros_like(X)
        h = desc.length / 2.0
        return np.clip(X, -h, h)
    if k == "ball":
        rho = desc.radius
        r = np.linalg.norm(X, axis=-1, keepdims=True)
        return np.where(r <= rho, X, X * (rho / np.where(r == 0, 1.0, r)))
    if k == "cube":
        return np.clip(X, 0.0, desc.length)
    raise ValueError(k)


def project(desc: SetDescriptor, p) -> np.ndarray:
    """Nearest point of A to p (ties: lowest part index, smallest parameter)."""
    P = np.asarray(p, dtype=float)
    single = P.ndim == 1
    P2 = P.reshape(-1, desc.m)
    np_parts = part_count(desc)
    if np_parts == 1 and desc.kind != "union":
        X = _to_local(desc, P2)
        out = _to_global(desc, _project_simple(desc, X))
    else:
        cands = []
        for i in range(np_parts):
            part = _part(desc, i)
            cands.append(project(part, P2))
        C = np.stack(cands, axis=0)  # (parts, n, m)
        D = np.linalg.norm(C - P2[None], axis=-1)
        best = np.argmin(D, axis=0)  # first minimum = lowest part index
        out = C[best, np.arange(P2.shape[0])]
    return out[0] if single else out


def contains(desc: SetDescriptor, p, tol: float = 1e-12) -> bool:
    P = np.asarray(p, dtype=float)
    return bool(np.linalg.norm(P - project(desc, P)) <= tol)


# ---------------------------------------------------------------------------
# chart parameters (ordering, 1-d refinement, tangents)


def param_of(desc: SetDescriptor, p) -> tuple:
    """Chart parameters of a point of A, prefixed by its part index.

    Provides the total order used by deterministic tie-breaks: tuples
    compare lexicographically, so lowest part index wins, then smallest
    parameter.
    """
    P = np.asarray(p, dtype=float)
    if desc.kind == "union" or desc.kind == "augmented_arc":
        nparts = part_count(desc)
        dists = []
        for i in range(nparts):
            part = _part(desc, i)
            dists.append(np.linalg.norm(P - project(part, P)))
        i = int(np.argmin(dists))
        return (i,) + param_of(_part(desc, i), P)[1:]
    X = _to_local(desc, P.reshape(1, -1))[0]
    k = desc.kind
    if k == "circle":
        return (0, float(np.mod(math.atan2(X[1], X[0]), 2 * math.pi)))
    if k == "arc":
        th = float(np.mod(math.atan2(X[1], X[0]), 2 * math.pi))
        return (0, min(th, desc.extent))
    if k == "segment":
        h = desc.length / 2.0
        return (0, float(X[0] + h))
    if k == "sphere":
        if desc.d == 1:
            return (0, float(np.mod(math.atan2(X[1], X[0]), 2 * math.pi)))
        phi = math.acos(max(-1.0, min(1.0, X[2] / desc.radius)))
        theta = math.atan2(X[1], X[0]) if phi not in (0.0, math.pi) else 0.0
        return (0, float(phi), float(np.mod(theta, 2 * math.pi)))
    if k in ("ball", "cube"):
        return (0,) + tuple(float(v) for v in X)
    raise ValueError(k)


@dataclass(frozen=True)
class OneDimPart:
    """Arclength chart of a 1-dimensional part: t in [lo, hi], unit speed."""

    index: int
    lo: float
    hi: float
    wrap: bool  # parameter periodic with period hi - lo


def one_dim_parts(desc: SetDescriptor) -> list[OneDimPart]:
    """Arclength charts of all 1-dimensional parts of the set."""
    out = []
    for i in range(part_count(desc)):
        part = _part(desc, i)
        k = part.kind
        if k == "circle" or (k == "sphere" and part.d == 1):
            out.append(OneDimPart(i, 0.0, 2 * math.pi * part.radius, True))
        elif k == "arc":
            out.append(OneDimPart(i, 0.0, part.radius * part.extent, False))
        elif k == "segment" and part.length > 0:
            out.append(OneDimPart(i, 0.0, part.length, False))
    return out


def part_point(desc: SetDescriptor, index: int, t) -> np.ndarray:
    """Point(s) of the 1-dimensional part at arclength parameter t."""
    part = _part(desc, index)
    t = np.asarray(t, dtype=float)
    k = part.kind
    if k in ("circle", "arc") or (k == "sphere" and part.d == 1):
        th = t / part.radius
        X = part.radius * np.stack([np.cos(th), np.sin(th)], axis=-1)
    elif k == "segment":
        X = (t - part.length / 2.0)[..., None]
    else:
        raise ValueError(f"part {index} of kind {k} is not 1-dimensional")
    return _to_global(part, X)


def arclength_param(desc: SetDescriptor, index: int, p) -> float:
    """Arclength parameter of a point lying on the given 1-dim part."""
    part = _part(desc, index)
    key = param_of(part, np.asarray(p, dtype=float))
    if part.kind in ("circle", "arc") or (part.kind == "sphere" and part.d == 1):
        return key[1] * part.radius
    return key[1]


def tangent_basis(desc: SetDescriptor, p) -> np.ndarray:
    """Orthonormal tangent directions of A at p, rows of shape (k, m).

    Full-dimensional kinds (ball, cube) return the ambient basis; moves are
    kept feasible by projection.  At the rotational fixed points of a sphere
    chart an arbitrary orthonormal pair is returned.
    """
    P = np.asarray(p, dtype=float)
    k = desc.kind
    if k in ("union", "augmented_arc"):
        i = param_of(desc, P)[0]
        return tangent_basis(_part(desc, i), P)
    X = _to_local(desc, P.reshape(1, -1))[0]
    F = _frame_of(desc)
    if k in ("circle", "arc") or (k == "sphere" and desc.d == 1):
        th = math.atan2(X[1], X[0])
        tloc = np.array([[-math.sin(th), math.cos(th)]])
    elif k == "segment":
        if desc.length == 0.0:
            return np.zeros((0, desc.m))
        tloc = np.array([[1.0]])
    elif k == "sphere":
        n = X / max(np.linalg.norm(X), 1e-300)
        a = np.zeros(3)
        a[int(np.argmin(np.abs(n)))] = 1.0
        t1 = np.cross(n, a)
        t1 /= np.linalg.norm(t1)
        t2 = np.cross(n, t1)
        tloc = np.stack([t1, t2])
    elif k in ("ball", "cube"):
        tloc = np.eye(desc.d)
    else:
        raise ValueError(k)
    return tloc @ F.T


# ---------------------------------------------------------------------------
# deterministic quasi-uniform meshes


def _halton(n: int, dim: int, skip: int = 0) -> np.ndarray:
    bases = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29][:dim]
    out = np.empty((n, dim))
    for j, b in enumerate(bases):
        for i in range(n):
            x, f, k = 0.0, 1.0 / b, i + 1 + skip
            while k > 0:
                x += (k % b) * f
                k //= b
                f /= b
            out[i, j] = x
    return out


def _sphere_spiral(n: int, rho: float) -> np.ndarray:
    """Generalized spiral lattice on the 2-sphere (golden-angle azimuths)."""
    i = np.arange(n)
    z = 1.0 - (2.0 * i + 1.0) / n
    phi = i * math.pi * (3.0 - math.sqrt(5.0))
    r = np.sqrt(np.maximum(0.0, 1.0 - z * z))
    return rho * np.stack([r * np.cos(phi), r * np.sin(phi), z], axis=-1)


def _largest_remainder(weights: np.ndarray, n: int) -> np.ndarray:
    """Integer allocation of n by weight with largest-remainder rounding."""
    w = np.asarray(weights, dtype=float)
    tot = w.sum()
    if tot <= 0:
        quota = np.full(len(w), n / len(w))
    else:
        quota = n * w / tot
    base = np.floor(quota).astype(int)
    rem = n - int(base.sum())
    if rem > 0:
        frac = quota - base
        # ties resolved toward lower index by stable sort on -frac
        order = np.argsort(-frac, kind="stable")
        base[order[:rem]] += 1
    return base


def _ball_mesh(d: int, rho: float, n: int) -> np.ndarray:
    """Midpoint-grid mesh of the ball with an outer shell snapped to the
    boundary sphere, padded to exactly n nodes by a Halton sequence."""
    frac = unit_ball_volume(d) / 2.0**d
    k = max(1, int(round((n / frac) ** (1.0 / d))))
    while k > 1:
        pts = _ball_mesh_nodes(d, rho, k)
        if len(pts) <= n:
            break
        k -= 1
    pts = _ball_mesh_nodes(d, rho, k)
    if len(pts) > n:
        pts = pts[:n]
    need = n - len(pts)
    if need > 0:
        extra = []
        skip = 0
        while len(extra) < need:
            h = _halton(2 * need + 8, d, skip=skip) * (2 * rho) - rho
            for row in h:
                if np.linalg.norm(row) <= rho and len(extra) < need:
                    extra.append(row)
            skip += 2 * need + 8
        pts = np.concatenate([pts, np.asarray(extra)], axis=0)
    return pts


def _ball_mesh_nodes(d: int, rho: float, k: int) -> np.ndarray:
    h = 2.0 * rho / k
    axis = -rho + (np.arange(k) + 0.5) * h
    grids = np.meshgrid(*([axis] * d), indexing="ij")
    pts = np.stack([g.ravel() for g in grids], axis=-1)
    r = np.linalg.norm(pts, axis=-1)
    inside = pts[r <= rho]
    shell_mask = (r > rho) & (r <= rho + h * math.sqrt(d) / 2.0)
    shell = pts[shell_mask]
    if len(shell):
        shell = shell * (rho / np.linalg.norm(shell, axis=-1, keepdims=True))
    return np.concatenate([inside, shell], axis=0) if len(shell) else inside


def _cube_mesh(d: int, side: float, n: int) -> np.ndarray:
    k = max(1, int(math.floor(n ** (1.0 / d))))
    axis = (np.arange(k) + 0.5) * (side / k)
    grids = np.meshgrid(*([axis] * d), indexing="ij")
    pts = np.stack([g.ravel() for g in grids], axis=-1)
    need = n - len(pts)
    if need > 0:
        pts = np.concatenate([pts, _halton(need, d) * side], axis=0)
    return pts


@lru_cache(maxsize=256)
def _sample_cached(desc: SetDescriptor, n: int) -> np.ndarray:
    k = desc.kind
    if k == "circle" or (k == "sphere" and desc.d == 1):
        th = 2 * math.pi * np.arange(n) / n
        X = desc.radius * np.stack([np.cos(th), np.sin(th)], axis=-1)
    elif k == "arc":
        if n == 1:
            th = np.array([desc.extent / 2.0])
        else:
            th = desc.extent * np.arange(n) / (n - 1)
        X = desc.radius * np.stack([np.cos(th), np.sin(th)], axis=-1)
    elif k == "segment":
        h = desc.length / 2.0
        if n == 1:
            X = np.array([[0.0]])
        else:
            X = np.linspace(-h, h, n)[:, None]
    elif k == "sphere":
        X = _sphere_spiral(n, desc.radius)
    elif k == "ball":
        X = _ball_mesh(desc.d, desc.radius, n)
    elif k == "cube":
        X = _cube_mesh(desc.d, desc.length, n)
    elif k == "union":
        counts = _largest_remainder(
            np.array([measure(p) for p in desc.parts]), n
        )
        chunks = [sample(p, c) for p, c in zip(desc.parts, counts) if c > 0]
        out = np.concatenate(chunks, axis=0)
        out.setflags(write=False)
        return out
    elif k == "augmented_arc":
        pt = project(_part(desc, 0), np.zeros(desc.m))
        if n == 1:
            out = pt[None]
        else:
            out = np.concatenate([pt[None], sample(_part(desc, 1), n - 1)], axis=0)
        out = np.ascontiguousarray(out)
        out.setflags(write=False)
        return out
    else:
        raise ValueError(k)
    out = _to_global(desc, X)
    out.setflags(write=False)
    return out


def sample(desc: SetDescriptor, n: int) -> np.ndarray:
    """Deterministic quasi-uniform mesh of exactly n points of A.

    Returned array is read-only and cached; copy before mutating.
    Unions allocate points proportionally to part measure with
    largest-remainder rounding.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    return _sample_cached(desc, int(n))


def random_points(desc: SetDescriptor, n: int, rng: np.random.Generator) -> np.ndarray:
    """n points drawn from the normalized d-measure on A (arclength for the
    augmented arc, whose 2-measure vanishes)."""
    k = desc.kind
    if k == "circle" or (k == "sphere" and desc.d == 1):
        th = rng.uniform(0.0, 2 * math.pi, size=n)
        X = desc.radius * np.stack([np.cos(th), np.sin(th)], axis=-1)
    elif k == "arc" or k == "augmented_arc":
        th = rng.uniform(0.0, desc.extent, size=n)
        X = desc.radius * np.stack([np.cos(th), np.sin(th)], axis=-1)
    elif k == "segment":
        h = desc.length / 2.0
        X = rng.uniform(-h, h, size=(n, 1))
    elif k == "sphere":
        z = rng.uniform(-1.0, 1.0, size=n)
        th = rng.uniform(0.0, 2 * math.pi, size=n)
        r = np.sqrt(np.maximum(0.0, 1.0 - z * z))
        X = desc.radius * np.stack([r * np.cos(th), r * np.sin(th), z], axis=-1)
    elif k == "ball":
        g = rng.standard_normal(size=(n, desc.d))
        g /= np.linalg.norm(g, axis=-1, keepdims=True)
        u = rng.uniform(0.0, 1.0, size=(n, 1)) ** (1.0 / desc.d)
        X = desc.radius * g * u
    elif k == "cube":
        X = rng.uniform(0.0, desc.length, size=(n, desc.d))
    elif k == "union":
        w = np.array([measure(p) for p in desc.parts])
        if w.sum() <= 0:
            w = np.ones(len(w))
        counts = rng.multinomial(n, w / w.sum())
        chunks = [
            random_points(p, c, rng) for p, c in zip(desc.parts, counts) if c > 0
        ]
        return np.concatenate(chunks, axis=0)
    else:
        raise ValueError(k)
    return _to_global(desc, X)


# ---------------------------------------------------------------------------
# measures of metric balls intersected with A


class _Intervals:
    """Disjoint closed intervals on a line or on a circle of given period."""

    def __init__(self, period: float | None = None):
        self.period = period
        self.segs: list[tuple[float, float]] = []

    def add(self, lo: float, hi: float):
        if hi <= lo:
            return
        if self.period is not None:
            width = hi - lo
            if width >= self.period:
                self.segs = [(0.0, self.period)]
                return
            lo = math.fmod(lo, self.period)
            if lo < 0:
                lo += self.period
            hi = lo + width
            if hi > self.period:
                self._add_lin(lo, self.period)
                self._add_lin(0.0, hi - self.period)
                return
        self._add_lin(lo, hi)

    def _add_lin(self, lo: float, hi: float):
        segs = self.segs + [(lo, hi)]
        segs.sort()
        merged = []
        for a, b in segs:
            if merged and a <= merged[-1][1]:
                merged[-1] = (merged[-1][0], max(merged[-1][1], b))
            else:
                merged.append((a, b))
        self.segs = [(a, b) for a, b in merged]

    def subtract(self, other: "_Intervals"):
        for a, b in other.segs:
            out = []
            for lo, hi in self.segs:
                if b <= lo or a >= hi:
                    out.append((lo, hi))
                    continue
                if a > lo:
                    out.append((lo, a))
                if b < hi:
                    out.append((b, hi))
            self.segs = out

    def total(self) -> float:
        return float(sum(b - a for a, b in self.segs))


def _circle_window(part: SetDescriptor, x: np.ndarray, r: float):
    """Angular window {theta: |c(theta) - x| <= r} for a placed circle/arc.

    Returns (theta_center, half_width) with half_width in [0, pi], or
    'full'/'empty' markers via half_width = pi / -1.
    """
    rho = part.radius
    F, off = _frame_of(part), _offset_of(part)
    v = x - off
    a, b = float(v @ F[:, 0]), float(v @ F[:, 1])
    rin = math.hypot(a, b)
    d2 = float(v @ v)
    if rin == 0.0:
        # all points equidistant sqrt(d2 + rho^2)
        return (0.0, math.pi if d2 + rho * rho <= r * r else -1.0)
    q = (d2 + rho * rho - r * r) / (2.0 * rho * rin)
    if q > 1.0:
        return (0.0, -1.0)
    if q < -1.0:
        return (math.atan2(b, a), math.pi)
    return (math.atan2(b, a), math.acos(q))


def _segment_window(part: SetDescriptor, x: np.ndarray, r: float):
    """Parameter window {t in [0, L]: |p(t) - x| <= r} (single interval)."""
    L = part.length
    F, off = _frame_of(part), _offset_of(part)
    u = F[:, 0]
    p0 = off + u * (-L / 2.0)
    v = x - p0
    tbar = float(v @ u)
    perp2 = float(v @ v) - tbar * tbar
    disc = r * r - perp2
    if disc < 0:
        return None
    w = math.sqrt(disc)
    lo, hi = max(0.0, tbar - w), min(L, tbar + w)
    return (lo, hi) if hi > lo else None


def _part_ball_measure(part: SetDescriptor, x: np.ndarray, r: float, excl) -> float:
    """H_d(B(x, r) intersect part) for an external point x, with optional
    exclusion of delta-neighborhoods of given ambient points (1-dim parts)."""
    k = part.kind
    if k in ("circle", "arc") or (k == "sphere" and part.d == 1):
        rho = part.radius
        th0, hw = _circle_window(part, x, r)
        if hw < 0:
            return 0.0
        period = 2 * math.pi if k != "arc" else None
        iv = _Intervals(period=period)
        if k == "arc":
            lo, hi = th0 - hw, th0 + hw
            # unfold the window onto [0, extent] (window may wrap)
            for shift in (-2 * math.pi, 0.0, 2 * math.pi):
                a, b = lo + shift, hi + shift
                a2, b2 = max(0.0, a), min(part.extent, b)
                if b2 > a2:
                    iv.add(a2, b2)
        else:
            iv.add(th0 - hw, th0 + hw)
        if excl is not None:
            pts, delta = excl
            ex = _Intervals(period=period)
            for pt in pts:
                c0, w0 = _circle_window(part, np.asarray(pt, dtype=float), delta)
                if w0 < 0:
                    continue
                if k == "arc":
                    for shift in (-2 * math.pi, 0.0, 2 * math.pi):
                        a, b = c0 - w0 + shift, c0 + w0 + shift
                        a2, b2 = max(0.0, a), min(part.extent, b)
                        if b2 > a2:
                            ex.add(a2, b2)
                else:
                    ex.add(c0 - w0, c0 + w0)
            iv.subtract(ex)
        return rho * iv.total()
    if k == "segment":
        if part.length == 0.0:
            return 0.0
        iv = _Intervals()
        win = _segment_window(part, x, r)
        if win is None:
            return 0.0
        iv.add(*win)
        if excl is not None:
            pts, delta = excl
            ex = _Intervals()
            for pt in pts:
                w0 = _segment_window(part, np.asarray(pt, dtype=float), delta)
                if w0 is not None:
                    ex.add(*w0)
            iv.subtract(ex)
        return iv.total()
    if k == "sphere" and part.d == 2:
        if excl is not None and excl[0]:
            raise NotImplementedError("exclusions on sphere parts")
        rho = part.radius
        off = _offset_of(part)
        d0 = float(np.linalg.norm(np.asarray(x, dtype=float) - off))
        if d0 == 0.0:
            return measure(part) if r >= rho else 0.0
        cpsi = (d0 * d0 + rho * rho - r * r) / (2.0 * d0 * rho)
        if cpsi >= 1.0:
            return 0.0
        cpsi = max(-1.0, cpsi)
        return 2 * math.pi * rho * rho * (1.0 - cpsi)
    if k == "ball":
        if excl is not None and excl[0]:
            raise NotImplementedError("exclusions on ball parts")
        return _ball_ball_volume(part, x, r)
    if k == "cube":
        if excl is not None and excl[0]:
            raise NotImplementedError("exclusions on cube parts")
        return _ball_cube_volume(part, x, r)
    raise ValueError(k)


def _simpson_doubling(f, a: float, b: float, rtol: float, max_level: int = 22):
    """Composite Simpson with interval doubling until successive levels agree."""
    if b <= a:
        return 0.0
    prev = None
    for level in range(2, max_level + 1):
        n = 2**level
        x = np.linspace(a, b, n + 1)
        y = f(x)
        h = (b - a) / n
        val = h / 3.0 * (y[0] + y[-1] + 4 * y[1:-1:2].sum() + 2 * y[2:-1:2].sum())
        if prev is not None and abs(val - prev) <= rtol * max(abs(val), 1e-300):
            return val
        prev = val
    return prev


def _ball_ball_volume(part: SetDescriptor, x: np.ndarray, r: float) -> float:
    """Volume of B(x, r) intersect a placed ball, by a 1-d slice integral."""
    d, rho = part.d, part.radius
    off = _offset_of(part)
    t0 = float(np.linalg.norm(np.asarray(x, dtype=float) - off))
    if t0 + rho <= r:
        return measure(part)
    if t0 >= rho + r:
        return 0.0
    if t0 == 0.0:
        return unit_ball_volume(d) * min(rho, r) ** d
    lo, hi = max(-rho, t0 - r), min(rho, t0 + r)
    if d == 1:
        return max(0.0, hi - lo)
    bd1 = unit_ball_volume(d - 1)

    def integrand(t):
        # roundoff at the window ends can push a slice radius a hair negative
        s2 = np.maximum(0.0, np.minimum(rho * rho - t * t, r * r - (t - t0) ** 2))
        return bd1 * s2 ** ((d - 1) / 2.0)

    # kink where the two slice radii cross
    tc = (rho * rho - r * r + t0 * t0) / (2.0 * t0)
    pieces = sorted({lo, hi} | ({tc} if lo < tc < hi else set()))
    return float(
        sum(
            _simpson_doubling(integrand, a, b, 1e-9)
            for a, b in zip(pieces[:-1], pieces[1:])
        )
    )


def _disk_rect_area(c: np.ndarray, rvec: np.ndarray, side: float, nodes: int = 513):
    """Areas of disks B(c, r_i) intersect [0, side]^2, vectorized over r_i."""
    cx, cy = float(c[0]), float(c[1])
    rvec = np.atleast_1d(np.asarray(rvec, dtype=float))
    out = np.zeros_like(rvec)
    for i, r in enumerate(rvec):
        if r <= 0:
            continue
        lo, hi = max(0.0, cx - r), min(side, cx + r)
        if hi <= lo:
            continue
        u = np.linspace(lo, hi, nodes)
        w = np.sqrt(np.maximum(0.0, r * r - (u - cx) ** 2))
        seg = np.minimum(side, cy + w) - np.maximum(0.0, cy - w)
        seg = np.maximum(seg, 0.0)
        h = (hi - lo) / (nodes - 1)
        out[i] = h / 3.0 * (seg[0] + seg[-1] + 4 * seg[1:-1:2].sum() + 2 * seg[2:-1:2].sum())
    return out


def _ball_cube_volume(part: SetDescriptor, x: np.ndarray, r: float) -> float:
    d, side = part.d, part.length
    F, off = _frame_of(part), _offset_of(part)
    c = (np.asarray(x, dtype=float) - off) @ F
    if d == 1:
        lo, hi = max(0.0, c[0] - r), min(side, c[0] + r)
        return max(0.0, hi - lo)
    if d == 2:
        return float(_disk_rect_area(c, np.array([r]), side, nodes=4097)[0])
    if d == 3:
        lo, hi = max(0.0, c[2] - r), min(side, c[2] + r)
        if hi <= lo:
            return 0.0

        def integrand(t):
            rr = np.sqrt(np.maximum(0.0, r * r - (t - c[2]) ** 2))
            return _disk_rect_area(c[:2], rr, side)

        return float(_simpson_doubling(integrand, lo, hi, 1e-6, max_level=11))
    raise NotImplementedError("cube-ball intersection implemented for d <= 3")


def ball_intersection_measure(
    desc: SetDescriptor, x, r: float, exclude=None, tol: float = 1e-9
) -> float:
    """H_d(B(x, r) intersect A) for x on A (exact closed forms where known).

    exclude, if given, is a pair (points, delta): the metric delta
    neighborhoods of the listed ambient points are removed from A before
    measuring.  Supported for the 1-dimensional kinds, which is where
    overlapping unions need it.  Signals ValueError if x is farther than tol
    from A.
    """
    P = np.asarray(x, dtype=float)
    if r <= 0:
        raise ValueError("r must be positive")
    if np.linalg.norm(P - project(desc, P)) > tol:
        raise ValueError("x does not lie on the set within tolerance")
    if desc.kind == "augmented_arc":
        return 0.0  # 2-measure of a 1-dimensional set
    if desc.kind == "union":
        return float(
            sum(_part_ball_measure(p, P, r, exclude) for p in desc.parts)
        )
    return _part_ball_measure(desc, P, r, exclude)


def part_ball_window(desc: SetDescriptor, index: int, x, r: float):
    """Arclength intervals {t: |p(t) - x| <= r} on a 1-dimensional part.

    x may be any ambient point.  Circle windows come back as one
    (possibly seam-crossing) interval around the window center; fold them
    with an accumulator carrying the part's period.
    """
    part = _part(desc, index)
    x = np.asarray(x, dtype=float)
    k = part.kind
    if k == "circle" or (k == "sphere" and part.d == 1):
        th0, hw = _circle_window(part, x, r)
        if hw < 0:
            return []
        rho = part.radius
        return [((th0 - hw) * rho, (th0 + hw) * rho)]
    if k == "arc":
        th0, hw = _circle_window(part, x, r)
        if hw < 0:
            return []
        rho = part.radius
        acc = _Intervals()
        for shift in (-2 * math.pi, 0.0, 2 * math.pi):
            a = max(0.0, th0 - hw + shift)
            b = min(part.extent, th0 + hw + shift)
            if b > a:
                acc.add(a * rho, b * rho)
        return list(acc.segs)
    if k == "segment":
        if part.length == 0.0:
            return []
        win = _segment_window(part, x, r)
        return [win] if win is not None else []
    raise ValueError(f"part {index} of kind {k} is not 1-dimensional")


def pairwise_intersection_points(
    desc: SetDescriptor, tol: float = 1e-9, samples: int = 1024
) -> list[np.ndarray]:
    """Approximate the pairwise intersections of union parts by points.

    Scans a dense mesh of each part for points lying on another part and
    clusters the hits.  Adequate for the catalog, where parts meet in
    finitely many points (tangencies, crossings); returns [] for disjoint
    unions and for non-union sets.
    """
    if desc.kind != "union":
        return []
    hits: list[np.ndarray] = []
    for i, pi in enumerate(desc.parts):
        mesh = np.array(sample(pi, samples))
        spacing = measure(pi) / samples if measure(pi) > 0 else tol
        for j, pj in enumerate(desc.parts):
            if i == j:
                continue
            dist = np.linalg.norm(mesh - project(pj, mesh), axis=-1)
            near = mesh[dist <= max(tol, 2 * spacing)]
            for p in near:
                q = project(pj, p)
                mid = 0.5 * (p + q)
                if np.linalg.norm(mid - project(desc, mid)) > tol:
                    continue
                if all(np.linalg.norm(mid - h) > 4 * spacing for h in hits):
                    hits.append(mid)
    return hits


# ---------------------------------------------------------------------------
# test cells


@dataclass(frozen=True)
class TestCell:
    """Closed subregion of a catalog set with an exactly known measure.

    shape 'cap': metric ball around center, membership |p - center| <= chord;
    shape 'box': product of parameter intervals in the owning part's chart;
    shape 'part': one whole part of a union.
    """

    parent: SetDescriptor
    label: str
    shape: str
    measure: float
    center: tuple = ()
    chord: float = 0.0
    geodesic: float = 0.0
    part_index: int = 0
    bounds: tuple = ()


def _cap_cell(desc: SetDescriptor, center: np.ndarray, geo: float, label: str) -> TestCell:
    """Cap cell: the metric ball whose geodesic radius on the part is geo."""
    i = param_of(desc, center)[0]
    part = _part(desc, i)
    k = part.kind
    if k in ("circle", "arc") or (k == "sphere" and part.d == 1):
        rho = part.radius
        geo = min(geo, math.pi)
        chord = 2 * rho * math.sin(geo / 2.0)
        mu = _part_ball_measure(part, center, chord, None)
    elif k == "sphere":
        rho = part.radius
        geo = min(geo, math.pi)
        chord = 2 * rho * math.sin(geo / 2.0)
        mu = 2 * math.pi * rho * rho * (1.0 - math.cos(geo))
    elif k == "segment":
        chord = geo
        mu = _part_ball_measure(part, center, chord, None)
    else:
        chord = geo
        mu = _part_ball_measure(part, center, chord, None)
    return TestCell(
        parent=desc,
        label=label,
        shape="cap",
        measure=float(mu),
        center=tuple(float(v) for v in center),
        chord=float(chord),
        geodesic=float(geo),
        part_index=int(i),
    )


def _box_cell(desc: SetDescriptor, part_index: int, bounds, label: str) -> TestCell:
    part = _part(desc, part_index)
    k = part.kind
    b = tuple((float(lo), float(hi)) for lo, hi in bounds)
    if k in ("circle", "arc") or (k == "sphere" and part.d == 1):
        mu = part.radius * (b[0][1] - b[0][0])
    elif k == "segment":
        mu = b[0][1] - b[0][0]
    elif k == "sphere":
        (p0, p1), (t0, t1) = b
        mu = part.radius**2 * (t1 - t0) * (math.cos(p0) - math.cos(p1))
    elif k == "cube":
        mu = 1.0
        for lo, hi in b:
            mu *= hi - lo
    elif k == "ball":
        mu = _ball_slab_measure(part, b[0][0], b[0][1])
    else:
        raise ValueError(k)
    return TestCell(
        parent=desc,
        label=label,
        shape="box",
        measure=float(mu),
        part_index=int(part_index),
        bounds=b,
    )


def _ball_slab_measure(part: SetDescriptor, a: float, b: float) -> float:
    """Measure of the slab a <= x_1 <= b of a ball (closed forms, d <= 3)."""
    d, rho = part.d, part.radius
    a, b = max(a, -rho), min(b, rho)
    if b <= a:
        return 0.0
    if d == 1:
        return b - a
    if d == 2:

        def F(t):
            return t * math.sqrt(max(0.0, rho * rho - t * t)) + rho * rho * math.asin(
                max(-1.0, min(1.0, t / rho))
            )

        return F(b) - F(a)
    if d == 3:

        def F(t):
            return math.pi * (rho * rho * t - t**3 / 3.0)

        return F(b) - F(a)
    raise NotImplementedError("ball slabs implemented for d <= 3")


def _partition_cells(desc: SetDescriptor, k: int) -> list[TestCell]:
    kind = desc.kind
    if kind == "circle" or (kind == "sphere" and desc.d == 1):
        edges = 2 * math.pi * np.arange(k + 1) / k
        return [
            _box_cell(desc, 0, [(edges[j], edges[j + 1])], f"arc{j}")
            for j in range(k)
        ]
    if kind == "arc":
        edges = desc.extent * np.arange(k + 1) / k
        return [
            _box_cell(desc, 0, [(edges[j], edges[j + 1])], f"arc{j}")
            for j in range(k)
        ]
    if kind == "segment":
        edges = desc.length * np.arange(k + 1) / k
        return [
            _box_cell(desc, 0, [(edges[j], edges[j + 1])], f"seg{j}")
            for j in range(k)
        ]
    if kind == "sphere":
        # equal-area latitude bands: uniform splits of z = cos(phi)
        z = 1.0 - 2.0 * np.arange(k + 1) / k
        cells = []
        for j in range(k):
            p0, p1 = math.acos(z[j]), math.acos(z[j + 1])
            cells.append(
                _box_cell(desc, 0, [(p0, p1), (0.0, 2 * math.pi)], f"band{j}")
            )
        return cells
    if kind == "cube":
        edges = desc.length * np.arange(k + 1) / k
        full = [(0.0, desc.length)] * (desc.d - 1)
        return [
            _box_cell(desc, 0, [(edges[j], edges[j + 1])] + full, f"slab{j}")
            for j in range(k)
        ]
    if kind == "ball":
        edges = -desc.radius + 2 * desc.radius * np.arange(k + 1) / k
        return [
            _box_cell(desc, 0, [(edges[j], edges[j + 1])], f"slab{j}")
            for j in range(k)
        ]
    if kind == "union":
        weights = np.array([measure(p) for p in desc.parts])
        counts = _largest_remainder(weights, k)
        counts = np.maximum(counts, (weights > 0).astype(int))
        cells = []
        for i, (p, c) in enumerate(zip(desc.parts, counts)):
            if c == 0:
                continue
            for sub in _partition_cells(p, int(c)):
                cells.append(
                    TestCell(
                        parent=desc,
                        label=f"p{i}.{sub.label}",
                        shape=sub.shape,
                        measure=sub.measure,
                        center=sub.center,
                        chord=sub.chord,
                        geodesic=sub.geodesic,
                        part_index=i,
                        bounds=sub.bounds,
                    )
                )
        return cells
    raise ValueError(kind)


def part_cells(desc: SetDescriptor) -> list[TestCell]:
    """One cell per part of a union (the whole part)."""
    return [
        TestCell(
            parent=desc,
            label=f"part{i}",
            shape="part",
            measure=part_measure(desc, i),
            part_index=i,
        )
        for i in range(part_count(desc))
    ]


def make_test_cells(desc: SetDescriptor, family, seed: int | None = None) -> list[TestCell]:
    """Build a list of closed test cells.

    family is 'partition:k' (finite partition, measures summing to
    measure(A)), 'caps:k' (k random metric caps; needs seed), or 'parts'
    (one cell per union part).  Cap geodesic radii are drawn uniformly from
    [0.2, pi/2] (scaled into range for arcs and segments).
    """
    if isinstance(family, str):
        name, _, sz = family.partition(":")
        size = int(sz) if sz else 1
    else:
        name, size = family
    if size < 1:
        raise ValueError("family size must be >= 1")
    if name == "partition":
        return _partition_cells(desc, size)
    if name == "parts":
        return part_cells(desc)
    if name == "caps":
        if seed is None:
            raise ValueError("caps family requires a seed")
        rng = np.random.default_rng(seed)
        centers = random_points(desc, size, rng)
        lo, hi = 0.2, math.pi / 2.0
        if desc.kind == "arc":
            hi = min(hi, desc.extent / 2.0)
            lo = min(lo, hi / 2.0)
        if desc.kind == "segment":
            lo, hi = 0.05 * desc.length, 0.25 * desc.length
        radii = rng.uniform(lo, hi, size=size)
        return [
            _cap_cell(desc, centers[j], float(radii[j]), f"cap{j}")
            for j in range(size)
        ]
    raise ValueError(f"unknown cell family {name!r}")


def cell_contains(cell: TestCell, p, tol: float = 1e-12) -> bool:
    """Closed-cell membership: boundary points count as inside."""
    P = np.asarray(p, dtype=float)
    if cell.shape == "cap":
        return bool(
            np.linalg.norm(P - np.asarray(cell.center)) <= cell.chord + tol
        )
    if cell.shape == "part":
        part = _part(cell.parent, cell.part_index)
        return bool(np.linalg.norm(P - project(part, P)) <= tol)
    # box: compare chart parameters, wrap-aware for angles
    part = _part(cell.parent, cell.part_index)
    if np.linalg.norm(P - project(part, P)) > 1e-9:
        return False
    key = param_of(part, P)[1:]
    k = part.kind
    for v, (lo, hi), wraps in zip(key, cell.bounds, _box_wraps(part)):
        if wraps:
            period = 2 * math.pi
            if not (np.mod(v - lo, period) <= (hi - lo) + tol or
                    np.mod(lo - v, period) <= tol):
                return False
        else:
            if not (lo - tol <= v <= hi + tol):
                return False
    return True


def _box_wraps(part: SetDescriptor) -> tuple:
    k = part.kind
    if k == "circle" or (k == "sphere" and part.d == 1):
        return (True,)
    if k == "arc" or k == "segment":
        return (False,)
    if k == "sphere":
        return (False, True)
    if k == "ball":
        return (False,)
    return (False,) * part.d


# ---------------------------------------------------------------------------
# structured-text descriptors
#
# Grammar (whitespace-insensitive):
#   spec    := kind | kind "(" args ")"
#   args    := arg (";" arg)*
#   arg     := key "=" value
#   value   := number | number ("," number)+ | "[" spec ("," spec)* "]"
#   kind    := circle | arc | segment | ball | cube | sphere | union
#              | augmented_arc
# Keys: d, radius, extent, length, side, center, parts.
# Examples: "circle", "sphere(d=2)", "ball(d=3; radius=2)",
#   "union(parts=[circle, circle(center=3,0)])".


def parse_set_spec(text: str) -> SetDescriptor:
    """Parse the documented structured-text grammar into a descriptor."""
    s = "".join(text.split())
    desc, rest = _parse_spec(s)
    if rest:
        raise ValueError(f"trailing input in set spec: {rest!r}")
    return desc


def _parse_spec(s: str):
    i = 0
    while i < len(s) and (s[i].isalpha() or s[i] == "_"):
        i += 1
    kind, rest = s[:i], s[i:]
    if not kind:
        raise ValueError(f"expected a set kind at {s[:20]!r}")
    args = {}
    if rest.startswith("("):
        depth, j = 1, 1
        while j < len(rest) and depth:
            if rest[j] == "(" or rest[j] == "[":
                depth += 1
            elif rest[j] == ")" or rest[j] == "]":
                depth -= 1
            j += 1
        if depth:
            raise ValueError("unbalanced parentheses in set spec")
        args = _parse_args(rest[1 : j - 1])
        rest = rest[j:]
    return _build_spec(kind, args), rest


def _split_top(s: str, sep: str) -> list[str]:
    out, depth, cur = [], 0, []
    for ch in s:
        if ch in "([":
            depth += 1
        elif ch in ")]":
            depth -= 1
        if ch == sep and depth == 0:
            out.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    out.append("".join(cur))
    return [x for x in out if x]


def _parse_args(s: str) -> dict:
    args = {}
    for item in _split_top(s, ";"):
        key, eq, val = item.partition("=")
        if not eq:
            raise ValueError(f"expected key=value in set spec, got {item!r}")
        if key in args:
            raise ValueError(f"duplicate key {key!r} in set spec")
        args[key] = val
    return args


_SPEC_KINDS = ("circle", "arc", "segment", "ball", "cube", "sphere",
               "union", "augmented_arc")


def _build_spec(kind: str, args: dict) -> SetDescriptor:
    if kind not in _SPEC_KINDS:
        raise ValueError(f"unknown set kind {kind!r}")
    known = {"d", "radius", "extent", "length", "side", "center", "parts"}
    for key in args:
        if key not in known:
            raise ValueError(f"unknown set-spec key {key!r}")

    def num(key, default):
        return float(args[key]) if key in args else default

    def integer(key, default):
        return int(args[key]) if key in args else default

    if kind == "circle":
        desc = circle(num("radius", 1.0))
    elif kind == "arc":
        desc = arc(num("radius", 1.0), num("extent", math.pi))
    elif kind == "segment":
        desc = segment(num("length", 2.0))
    elif kind == "ball":
        desc = ball(integer("d", 2), num("radius", 1.0))
    elif kind == "cube":
        desc = cube(integer("d", 2), num("side", 1.0))
    elif kind == "sphere":
        desc = sphere(integer("d", 2), num("radius", 1.0))
    elif kind == "augmented_arc":
        desc = augmented_arc(num("radius", 1.0), num("extent", math.pi))
    elif kind == "union":
        if "parts" not in args:
            raise ValueError("union requires parts=[...]")
        body = args["parts"]
        if not (body.startswith("[") and body.endswith("]")):
            raise ValueError("parts must be a bracketed list")
        parts = []
        for sub in _split_top(body[1:-1], ","):
            d, rest = _parse_spec(sub)
            if rest:
                raise ValueError(f"trailing input in part spec: {rest!r}")
            parts.append(d)
        desc = union(*parts)
    else:
        raise ValueError(f"unknown set kind {kind!r}")
    if "center" in args and kind != "union":
        center = tuple(float(v) for v in args["center"].split(","))
        if len(center) != desc.m:
            raise ValueError(
                f"center has {len(center)} coordinates, expected {desc.m}"
            )
        desc = placed(desc, np.asarray(center))
    elif "center" in args:
        raise ValueError("place the parts of a union individually")
    return desc


def format_set_spec(desc: SetDescriptor) -> str:
    """Canonical text form; parse(format(desc)) reproduces the descriptor.

    Only grammar-expressible descriptors format (translations yes, rotated
    frames no).
    """
    if desc.frame and not np.allclose(
        np.asarray(desc.frame), np.eye(desc.m, _natural_m(desc.kind, desc.d))
        if desc.kind != "union"
        else np.eye(desc.m),
    ):
        raise ValueError("rotated descriptors have no text form")
    args = []
    k = desc.kind
    if k in ("circle", "arc", "sphere", "augmented_arc"):
        args.append(f"radius={desc.radius!r}")
    if k in ("arc", "augmented_arc"):
        args.append(f"extent={desc.extent!r}")
    if k == "segment":
        args.append(f"length={desc.length!r}")
    if k in ("ball", "cube", "sphere"):
        args.append(f"d={desc.d}")
    if k == "ball":
        args.append(f"radius={desc.radius!r}")
    if k == "cube":
        args.append(f"side={desc.length!r}")
    if k == "union":
        inner = ",".join(format_set_spec(p) for p in desc.parts)
        args.append(f"parts=[{inner}]")
    if desc.offset and any(v != 0.0 for v in desc.offset):
        args.append("center=" + ",".join(repr(float(v)) for v in desc.offset))
    return f"{k}({';'.join(args)})" if args else k


def descriptor_hash(desc: SetDescriptor) -> str:
    """Short stable identifier of a descriptor for report headers."""
    try:
        text = format_set_spec(desc)
    except ValueError:
        text = repr(desc)
    return hashlib.sha256(text.encode()).hexdigest()[:16]
