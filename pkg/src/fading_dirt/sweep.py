"""
Bound evaluation over parameter grids and the long-format CSV writer.

Each row holds one bound at one (dist, delta, P, Q) point.  Bound labels
name the result they come from; ``trivial_inner`` is the interference-as-
noise rate 0.5*log2((1+P+Q)/(1+Q)).
"""

from __future__ import annotations

import csv
import io
import math
import os
import tempfile
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import bounds_binomial as bb
from . import bounds_uniform as bu
from .core import Binomial, ChannelParams, FadingDist, Uniform
from .gaussian_signaling import maximize_gaussian_rate
from .optimize import OptSpec

COLUMNS = ("dist", "delta", "P", "Q", "bound", "value", "clamped_value", "params")

BINOMIAL_BOUNDS = ("th2_inner", "th3_outer", "th4_outer", "lem1_outer", "th5_inner", "lem2_inner",
                   "trivial_outer", "trivial_inner")
UNIFORM_BOUNDS = ("th2_inner", "th6_outer", "th7_inner", "th7_exact_inner", "trivial_outer", "trivial_inner")

INNER = frozenset({"th2_inner", "th5_inner", "lem2_inner", "th7_inner", "th7_exact_inner", "trivial_inner"})
OUTER = frozenset({"th3_outer", "th4_outer", "lem1_outer", "th6_outer", "trivial_outer"})
# 0.5*log2(1+P) is below the binning rates of the inner bounds, so it is
# reported but left out of the inner <= outer ordering checks
UNCHECKED_OUTER = frozenset({"trivial_outer"})

FIG2_BOUNDS = ("th5_inner", "lem2_inner", "th4_outer", "lem1_outer", "trivial_outer", "trivial_inner")
FIG3_BOUNDS = ("th7_inner", "th6_outer")
GAP_LABEL = "gap_th6_th7"


@dataclass(frozen=True)
class Row:
    dist: str
    delta: float | None
    p: float
    q: float
    bound: str
    value: float
    params: dict = field(default_factory=dict, compare=False)

    @property
    def clamped_value(self) -> float:
        return max(0.0, self.value)

    def sort_key(self):
        return (self.dist, -1.0 if self.delta is None else self.delta, self.p, self.q, self.bound)


@dataclass(frozen=True)
class SweepSpec:
    p_start: float
    p_stop: float
    p_steps: int
    p_scale: str = "linear"
    q_mode: tuple = ("ratio", 10.0)
    dist: FadingDist = Binomial(math.pi / 2)

    def __post_init__(self):
        if not (0 < self.p_start <= self.p_stop):
            raise ValueError("need 0 < p_start <= p_stop")
        if self.p_steps < 1:
            raise ValueError("p_steps must be >= 1")
        if self.p_scale not in ("linear", "log"):
            raise ValueError("p_scale must be 'linear' or 'log'")
        kind, v = self.q_mode
        if kind not in ("ratio", "fixed") or not v > 0:
            raise ValueError("q_mode must be ('ratio', r) or ('fixed', q) with a positive value")

    def powers(self) -> np.ndarray:
        if self.p_steps == 1:
            return np.array([float(self.p_start)])
        if self.p_scale == "log":
            return np.geomspace(self.p_start, self.p_stop, self.p_steps)
        return np.linspace(self.p_start, self.p_stop, self.p_steps)

    def points(self) -> list[ChannelParams]:
        kind, v = self.q_mode
        return [ChannelParams(float(p), float(p * v if kind == "ratio" else v)) for p in self.powers()]


@dataclass
class GapReport:
    max_gap: float
    argmax_point: tuple
    per_point: list
    threshold: float

    @property
    def passed(self) -> bool:
        return self.max_gap <= self.threshold + 1e-6


# --------------------------------------------------------------------------
# evaluation


def evaluate_binomial(params: ChannelParams, delta: float, bounds=BINOMIAL_BOUNDS,
                      genie_spec: OptSpec = bb.GENIE_SPEC, gamma_spec: OptSpec = bb.GAMMA_SPEC) -> list[Row]:
    """Rows for the requested binomial bounds; inapplicable bounds are skipped."""
    p, q = params.p, params.q
    s = math.sin(delta) ** 2 * q
    rows = []

    def add(label, value, prm=None):
        rows.append(Row("binomial", delta, p, q, label, float(value), dict(prm or {})))

    for label in bounds:
        if label == "th2_inner":
            r = maximize_gaussian_rate(params, Binomial(delta))
            add(label, r.value, r.params)
        elif label == "th3_outer":
            if s > 0:
                add(label, bb.carbon_copy_outer(params, delta))
        elif label == "th4_outer":
            if q > 0:
                r = bb.genie_outer_bound(params, delta, genie_spec, gamma_spec)
                add(label, r.value, r.params)
        elif label == "lem1_outer":
            if math.pi / 4 - 1e-12 <= delta <= math.pi / 2 + 1e-12:
                add(label, bb.simple_outer_binomial(params, min(max(delta, math.pi / 4), math.pi / 2)))
        elif label == "th5_inner":
            r = bb.maximize_inner_binomial(params, delta)
            add(label, r.value, r.params)
        elif label == "lem2_inner":
            add(label, bb.simple_inner_binomial(params, delta))
        elif label == "trivial_outer":
            add(label, bb.trivial_outer(params))
        elif label == "trivial_inner":
            add(label, trivial_inner(params))
        else:
            raise ValueError(f"unknown binomial bound {label!r}")
    return rows


def exact_uniform_best(params: ChannelParams, n_alpha: int = 21) -> tuple[float, float]:
    """Best exact-integral inner rate over an alpha grid plus the closed-form vertex."""
    alphas = sorted(set(np.linspace(0, 1, n_alpha).tolist()) | {bu.optimal_alpha(params)})
    vals = [bu.uniform_inner_exact(params, bu.UniformInnerParams(a)) for a in alphas]
    i = int(np.argmax(vals))
    return vals[i], alphas[i]


def evaluate_uniform(params: ChannelParams, bounds=UNIFORM_BOUNDS) -> list[Row]:
    p, q = params.p, params.q
    rows = []

    def add(label, value, prm=None):
        rows.append(Row("uniform", None, p, q, label, float(value), dict(prm or {})))

    for label in bounds:
        if label == "th2_inner":
            r = maximize_gaussian_rate(params, Uniform())
            add(label, r.value, r.params)
        elif label == "th6_outer":
            add(label, bu.uniform_outer(params))
        elif label == "th7_inner":
            r = bu.maximize_uniform_inner(params)
            add(label, r.value, {"alpha": r.params["alpha"]})
        elif label == "th7_exact_inner":
            v, a = exact_uniform_best(params)
            add(label, v, {"alpha": a})
        elif label == "trivial_outer":
            add(label, bb.trivial_outer(params))
        elif label == "trivial_inner":
            add(label, trivial_inner(params))
        elif label == GAP_LABEL:
            r = bu.maximize_uniform_inner(params)
            add(label, bu.uniform_outer(params) - r.value, {"alpha": r.params["alpha"]})
        else:
            raise ValueError(f"unknown uniform bound {label!r}")
    return rows


def trivial_inner(params: ChannelParams) -> float:
    return 0.5 * math.log2((1 + params.p + params.q) / (1 + params.q))


def _evaluate(task):
    dist_name, delta, p, q, bounds = task
    params = ChannelParams(p, q)
    if dist_name == "binomial":
        return evaluate_binomial(params, delta, bounds)
    return evaluate_uniform(params, bounds)


def evaluate_points(tasks, workers: int = 1) -> list[Row]:
    """Evaluate ``(dist, delta, P, Q, bounds)`` tasks, returning sorted rows.

    With ``workers > 1`` the points run in separate processes; the sort
    makes the result independent of completion order.
    """
    tasks = list(tasks)
    if workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            chunks = list(ex.map(_evaluate, tasks))
    else:
        chunks = [_evaluate(t) for t in tasks]
    rows = [r for c in chunks for r in c]
    return sorted(rows, key=Row.sort_key)


def sweep(spec: SweepSpec, bounds=None, workers: int = 1) -> list[Row]:
    dist = spec.dist
    if isinstance(dist, Binomial):
        bounds = tuple(bounds or BINOMIAL_BOUNDS)
        tasks = [("binomial", dist.delta, pr.p, pr.q, bounds) for pr in spec.points()]
    else:
        bounds = tuple(bounds or UNIFORM_BOUNDS)
        tasks = [("uniform", None, pr.p, pr.q, bounds) for pr in spec.points()]
    return evaluate_points(tasks, workers)


# --------------------------------------------------------------------------
# presets

FIG2_NOTE = ("fig2 preset: binomial fading, P=500..1500 step 100, Q=10P; delta=pi/2 assumed "
             "(the figure does not state it); trivial_inner is 0.5*log2((1+P+Q)/(1+Q))")
FIG3_NOTE = "fig3 preset: uniform fading, P=500..1000 step 100, Q in {P/10, P, 10P}; gap_th6_th7 = th6_outer - th7_inner"


def fig2_rows(workers: int = 1) -> list[Row]:
    spec = SweepSpec(500, 1500, 11, "linear", ("ratio", 10.0), Binomial(math.pi / 2))
    return sweep(spec, FIG2_BOUNDS, workers)


def fig3_rows(workers: int = 1) -> list[Row]:
    rows = []
    for r in (0.1, 1.0, 10.0):
        spec = SweepSpec(500, 1000, 6, "linear", ("ratio", r), Uniform())
        rows += sweep(spec, FIG3_BOUNDS + (GAP_LABEL,), workers)
    return sorted(rows, key=Row.sort_key)


def binomial_gap_grid() -> list[tuple[ChannelParams, float]]:
    pts = []
    for p in (1.0, 10.0, 100.0, 1000.0, 10000.0):
        for r in (0.1, 1.0, 10.0):
            for d in (math.pi / 4, 3 * math.pi / 8, math.pi / 2):
                pts.append((ChannelParams(p, p * r), d))
    return pts


def uniform_gap_grid() -> list[ChannelParams]:
    return [ChannelParams(float(p), float(p * r)) for r in (0.1, 1.0, 10.0) for p in range(500, 1001, 100)]


def gap_report(dist: str, threshold: float, points=None) -> GapReport:
    """Outer minus inner gap (lem1 - th5 for binomial, th6 - th7 for uniform)."""
    rows = []
    if dist == "binomial":
        for pr, d in points or binomial_gap_grid():
            g = bb.simple_outer_binomial(pr, d) - bb.maximize_inner_binomial(pr, d).value
            rows.append(Row("binomial", d, pr.p, pr.q, "gap_lem1_th5", g))
    elif dist == "uniform":
        for pr in points or uniform_gap_grid():
            g = bu.uniform_outer(pr) - bu.maximize_uniform_inner(pr).value
            rows.append(Row("uniform", None, pr.p, pr.q, GAP_LABEL, g))
    else:
        raise ValueError(f"unknown dist {dist!r}")
    rows.sort(key=Row.sort_key)
    worst = max(rows, key=lambda r: r.value)
    return GapReport(worst.value, (worst.p, worst.q, worst.delta), rows, threshold)


def soundness_violations(rows, tol: float = 1e-6) -> list[tuple]:
    """(inner row, outer row) pairs at the same point with inner > outer + tol."""
    groups = {}
    for r in rows:
        groups.setdefault((r.dist, r.delta, r.p, r.q), []).append(r)
    bad = []
    for grp in groups.values():
        inner = [r for r in grp if r.bound in INNER]
        outer = [r for r in grp if r.bound in OUTER and r.bound not in UNCHECKED_OUTER]
        bad += [(i, o) for i in inner for o in outer if i.value > o.value + tol]
    return bad


# --------------------------------------------------------------------------
# CSV


def _num(v) -> str:
    if v is None:
        return ""
    return f"{float(v):.9g}"


def _params_field(prm: dict) -> str:
    return ";".join(f"{k}={_num(v)}" for k, v in prm.items())


def format_csv(rows, comment: str | None = None) -> str:
    buf = io.StringIO()
    if comment:
        for line in comment.splitlines():
            buf.write(f"# {line}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(COLUMNS)
    for r in rows:
        w.writerow([r.dist, _num(r.delta), _num(r.p), _num(r.q), r.bound, _num(r.value),
                    _num(r.clamped_value), _params_field(r.params)])
    return buf.getvalue()


def write_csv(rows, path, comment: str | None = None) -> None:
    """Write rows atomically: a temp file in the target directory is renamed into place."""
    text = format_csv(rows, comment)
    path = os.fspath(path)
    d = os.path.dirname(os.path.abspath(path))
    try:
        fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-", suffix=".csv")
    except OSError as e:
        raise OSError(f"cannot write {path}: {e}") from e
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException as e:
        if os.path.exists(tmp):
            os.unlink(tmp)
        if isinstance(e, OSError):
            raise OSError(f"cannot write {path}: {e}") from e
        raise
