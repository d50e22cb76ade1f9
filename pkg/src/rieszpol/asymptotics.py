"""Ratio tables against the limit laws and their extrapolation.

For a d-dimensional catalog set A with H_d(A) > 0 the maximin values obey

    M_N / (N log N)  ->  beta_d / H_d(A),

and minimum energies the same limit under N^2 log N.  Finite-N ratios sit
10-15% away from the limit at desk scales, so tables carry a least-squares
fit of ratio(N) = a + b / log N; a is the limit estimate.  The fit model is
exact for the circle's closed form and a documented heuristic elsewhere.

When H_d(A) = 0 the target is rendered as infinity and comparisons are
replaced by divergence detection.  Tables normalized by plain N (Chebyshev
mode) assert existence of a limit only, so they carry the infinite target
as "no finite value asserted".
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import geometry, polarization
from .geometry import SetDescriptor
from .seeds import derive_seed

__all__ = [
    "AsymptoticsTable",
    "normalizer",
    "assemble_table",
    "polarization_ratio_table",
    "chebyshev_ratio_table",
    "extrapolate",
    "lower_bound_report",
    "to_csv",
    "write_plotdata",
]

NORMALIZATIONS = ("n_log_n", "n2_log_n", "n")


def normalizer(normalization: str):
    """The denominator turning raw values into ratios."""
    if normalization == "n_log_n":
        return lambda n: n * math.log(n)
    if normalization == "n2_log_n":
        return lambda n: n * n * math.log(n)
    if normalization == "n":
        return lambda n: float(n)
    raise ValueError(f"unknown normalization {normalization!r}")


@dataclass
class AsymptoticsTable:
    """Rows (N, raw value, ratio) against one normalization and target."""

    home: SetDescriptor
    s: float
    normalization: str
    rows: tuple  # of (N, value, ratio)
    target: float  # beta_d / H_d(A), or inf when no finite target is asserted
    source: str
    seed: int | None
    lower_bound: bool  # values are best-found lower estimates
    extrapolated: dict | None = None
    liminf_estimate: float = math.nan
    limsup_estimate: float = math.nan
    meta: dict = field(default_factory=dict)


def table_target(desc: SetDescriptor, normalization: str) -> float:
    """beta_d / H_d(A) for log-normalized tables on positive-measure sets;
    infinity otherwise (degenerate measure, or plain-N normalization)."""
    if "log" in normalization:
        mu = geometry.measure(desc)
        if mu > 0:
            return geometry.unit_ball_volume(desc.d) / mu
    return math.inf


def assemble_table(
    desc: SetDescriptor,
    s: float,
    normalization: str,
    entries,
    source: str,
    seed: int | None,
    lower_bound: bool,
    meta: dict | None = None,
) -> AsymptoticsTable:
    """Assemble and validate a table from (N, value) pairs sorted by N."""
    if normalization not in NORMALIZATIONS:
        raise ValueError(f"unknown normalization {normalization!r}")
    norm = normalizer(normalization)
    rows = []
    last_n = 0
    for n, value in entries:
        if n <= last_n:
            raise ValueError("N values must be strictly increasing")
        if "log" in normalization and n < 2:
            raise ValueError("log-normalized tables need N >= 2")
        last_n = n
        rows.append((int(n), float(value), float(value) / norm(n)))
    table = AsymptoticsTable(
        home=desc,
        s=float(s),
        normalization=normalization,
        rows=tuple(rows),
        target=table_target(desc, normalization),
        source=source,
        seed=seed,
        lower_bound=lower_bound,
        meta=dict(meta or {}),
    )
    ratios = [r[2] for r in rows]
    tail = ratios[len(ratios) // 2 :]
    table.liminf_estimate = min(tail) if tail else math.nan
    table.limsup_estimate = max(tail) if tail else math.nan
    if len(rows) >= 3 and all(r[0] >= 2 for r in rows):
        try:
            table.extrapolated = extrapolate(table)
        except ValueError:
            table.extrapolated = None
    return table


def polarization_ratio_table(
    desc: SetDescriptor,
    n_list,
    source: str = "solver",
    seed: int = 0,
    solver_opts: dict | None = None,
) -> AsymptoticsTable:
    """Maximin values normalized by N log N at s = d.

    source 'analytic_circle' uses the closed-form equally spaced values
    (circles only); 'solver' runs the maximin search per N with a seed
    derived from (seed, N) so rows are independent of list order.
    """
    s = float(desc.d)
    entries = []
    if source == "analytic_circle":
        if desc.kind != "circle":
            raise ValueError("analytic_circle source needs a circle")
        for n in n_list:
            entries.append(
                (n, polarization.equally_spaced_value(n, s, desc.radius))
            )
    elif source == "solver":
        opts = dict(solver_opts or {})
        for n in n_list:
            rep = polarization.solve(desc, n, s, seed=derive_seed(seed, n), **opts)
            entries.append((n, rep.value))
    else:
        raise ValueError(f"unknown source {source!r}")
    return assemble_table(desc, s, "n_log_n", entries, source, seed,
                          lower_bound=(source == "solver"))


def chebyshev_ratio_table(
    desc: SetDescriptor,
    s: float,
    n_list,
    source: str = "solver",
    seed: int = 0,
    solver_opts: dict | None = None,
) -> AsymptoticsTable:
    """Maximin values normalized by plain N (existence-of-limit mode)."""
    entries = []
    if source == "analytic_circle":
        if desc.kind != "circle":
            raise ValueError("analytic_circle source needs a circle")
        for n in n_list:
            entries.append(
                (n, polarization.equally_spaced_value(n, s, desc.radius))
            )
    elif source == "solver":
        opts = dict(solver_opts or {})
        for n in n_list:
            rep = polarization.solve(desc, n, s, seed=derive_seed(seed, n), **opts)
            entries.append((n, rep.value))
    else:
        raise ValueError(f"unknown source {source!r}")
    return assemble_table(desc, float(s), "n", entries, source, seed,
                          lower_bound=(source == "solver"))


def extrapolate(table) -> dict:
    """Least-squares fit ratio(N) = a + b / log N; a estimates the limit.

    Accepts a table or an iterable of (N, value, ratio) rows; rows with
    N < 2 are excluded (log N vanishes).  Invariant under row reordering.
    """
    rows = table.rows if isinstance(table, AsymptoticsTable) else tuple(table)
    pts = [(n, ratio) for n, _v, ratio in rows if n >= 2]
    if len(pts) < 3:
        raise ValueError("extrapolation needs at least 3 rows with N >= 2")
    x = np.array([1.0 / math.log(n) for n, _ in pts])
    y = np.array([r for _, r in pts])
    if np.ptp(x) == 0.0:
        raise ValueError("singular fit: all N equal")
    A = np.stack([np.ones_like(x), x], axis=-1)
    coef, *_ = np.linalg.lstsq(A, y, rcond=None)
    resid = float(np.linalg.norm(y - A @ coef))
    return {"a": float(coef[0]), "b": float(coef[1]), "residual": resid}


def lower_bound_report(table: AsymptoticsTable, tol: float = 0.05) -> dict:
    """Compare the extrapolated limit against beta_d / H_d(A) from below.

    Advisory: finite-N ratios may legitimately sit above or below the
    limit; the flag is 'consistent' when the fitted a clears (1 - tol) of
    the target, 'diverging' when the target is infinite and ratios at
    least double across the table, 'inconsistent'/'inconclusive' otherwise.
    """
    ratios = [r[2] for r in table.rows]
    tail = ratios[len(ratios) // 2 :]
    out = {
        "tail_min_ratio": min(tail) if tail else math.nan,
        "target": table.target,
        "tol": tol,
    }
    if math.isinf(table.target):
        if len(ratios) >= 2 and ratios[-1] >= 2.0 * ratios[0]:
            out["flag"] = "diverging"
        else:
            out["flag"] = "inconclusive"
        out["a"] = None
        return out
    fit = table.extrapolated
    if fit is None:
        try:
            fit = extrapolate(table)
        except ValueError:
            out["flag"] = "inconclusive"
            out["a"] = None
            return out
    out["a"] = fit["a"]
    out["flag"] = (
        "consistent" if fit["a"] >= table.target * (1.0 - tol) else "inconsistent"
    )
    return out


def _fmt(x: float) -> str:
    if math.isinf(x):
        return "inf"
    return format(float(x), ".17g")


def to_csv(table: AsymptoticsTable) -> str:
    """CSV with columns N,value,ratio,target,model_fit; hash+seed header."""
    lines = [
        "# set={} seed={} source={} normalization={} s={}".format(
            geometry.descriptor_hash(table.home),
            table.seed,
            table.source,
            table.normalization,
            _fmt(table.s),
        ),
        "N,value,ratio,target,model_fit",
    ]
    fit = table.extrapolated
    for n, value, ratio in table.rows:
        if fit is not None and n >= 2:
            model = _fmt(fit["a"] + fit["b"] / math.log(n))
        else:
            model = ""
        lines.append(
            f"{n},{_fmt(value)},{_fmt(ratio)},{_fmt(table.target)},{model}"
        )
    return "\n".join(lines) + "\n"


def write_plotdata(table: AsymptoticsTable) -> str:
    """Gnuplot-style whitespace table: N ratio target model_fit."""
    lines = ["# N ratio target model_fit"]
    fit = table.extrapolated
    for n, _value, ratio in table.rows:
        model = (
            _fmt(fit["a"] + fit["b"] / math.log(n))
            if fit is not None and n >= 2
            else "nan"
        )
        lines.append(f"{n} {_fmt(ratio)} {_fmt(table.target)} {model}")
    return "\n".join(lines) + "\n"
