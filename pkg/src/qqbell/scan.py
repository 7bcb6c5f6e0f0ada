"""Parameter scans over the example families, written as CSV."""
import math
import os
import tempfile
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .bell import LOCAL_THRESHOLD
from .bounds import CERTIFY_TOL, singular_values_batch
from .kernels import HALF_SQRT3
from .optimize import OptimizerConfig, classify_nonlocality
from .states import FanoDecomposition, decompose_batch, family_params, make_state, purity

TWO_PI = 2 * math.pi

# swept axes and default ranges per family
FAMILY_AXES = {
    "example1": (("x", 0.0, 1.0), ("y", 0.0, 1.0)),
    "example2": (("theta", 0.0, TWO_PI), ("gamma", 0.0, TWO_PI)),
    "tgx": (("theta1", 0.0, TWO_PI), ("theta2", 0.0, TWO_PI)),
}
FAMILY_FIXED = {"example1": (), "example2": (), "tgx": ("p1",)}

BASE_COLUMNS = ["p1", "p2", "mu1", "mu2", "mu3", "r_norm", "bound", "certified_local"]


@dataclass(frozen=True)
class Axis:
    lo: float
    hi: float
    count: int

    def __post_init__(self):
        if self.count < 2:
            raise ValueError("each swept axis needs at least 2 points")
        if not (math.isfinite(self.lo) and math.isfinite(self.hi)) or self.hi < self.lo:
            raise ValueError(f"bad axis range [{self.lo}, {self.hi}]")

    def values(self):
        return np.linspace(self.lo, self.hi, self.count)


@dataclass(frozen=True)
class ScanSpec:
    family: str
    axis1: Axis
    axis2: Axis
    fixed: dict = field(default_factory=dict)
    optimize: bool = False
    config: OptimizerConfig = field(default_factory=OptimizerConfig)
    with_purity: bool = False
    jobs: int = 1

    def __post_init__(self):
        if self.family not in FAMILY_AXES:
            raise ValueError(f"unknown family {self.family!r}")
        missing = set(FAMILY_FIXED[self.family]) - set(self.fixed)
        if missing:
            raise ValueError(f"family {self.family} needs fixed parameter(s) {sorted(missing)}")

    @property
    def axis_names(self):
        return tuple(name for name, _, _ in FAMILY_AXES[self.family])

    @property
    def columns(self):
        cols = list(BASE_COLUMNS)
        if self.optimize:
            cols += ["e_max", "verdict"]
        if self.with_purity:
            cols.append("purity")
        return cols


def default_spec(family, n1=200, n2=200, **kwargs):
    (_, lo1, hi1), (_, lo2, hi2) = FAMILY_AXES[family]
    return ScanSpec(family, Axis(lo1, hi1, n1), Axis(lo2, hi2, n2), **kwargs)


def grid_points(spec):
    """Admissible ``(p1, p2)`` pairs in row-major order."""
    pts = []
    for u in spec.axis1.values():
        for v in spec.axis2.values():
            if spec.family == "example1" and u + v > 1 + 1e-12:
                continue
            pts.append((float(u), float(v)))
    return pts


def _params(spec, u, v):
    n1, n2 = spec.axis_names
    values = dict(spec.fixed)
    values[n1], values[n2] = u, v
    return family_params(spec.family, values)


def _optimize_row(args):
    r_rows, R_rows, T_rows, cfg = args
    out = []
    for r, R, T in zip(r_rows, R_rows, T_rows):
        verdict = classify_nonlocality(FanoDecomposition(r, R, T), cfg, always_optimize=True)
        out.append((verdict.e_max, verdict.kind))
    return out


def run_scan(spec):
    """Evaluate the scan; returns ``(columns, rows)`` with rows as tuples."""
    pts = grid_points(spec)
    rhos = np.array([make_state(_params(spec, u, v)) for u, v in pts])
    r, R, T = decompose_batch(rhos)
    mu = singular_values_batch(T)
    r_norm = np.linalg.norm(r, axis=1)
    bound = HALF_SQRT3 * r_norm + 2 * np.hypot(mu[:, 0], mu[:, 1])
    certified = bound <= LOCAL_THRESHOLD + CERTIFY_TOL

    extra = None
    if spec.optimize:
        # chunk by grid row of the first axis; map keeps grid order
        chunks, start = [], 0
        for u in spec.axis1.values():
            n = sum(1 for p in pts if p[0] == float(u))
            sl = slice(start, start + n)
            chunks.append((r[sl], R[sl], T[sl], spec.config))
            start += n
        if spec.jobs > 1:
            with ProcessPoolExecutor(max_workers=spec.jobs) as pool:
                parts = list(pool.map(_optimize_row, chunks))
        else:
            parts = [_optimize_row(c) for c in chunks]
        extra = [item for part in parts for item in part]

    rows = []
    for k, (u, v) in enumerate(pts):
        row = [u, v, *mu[k], r_norm[k], bound[k], bool(certified[k])]
        if extra is not None:
            row += list(extra[k])
        if spec.with_purity:
            row.append(purity(rhos[k]))
        rows.append(tuple(row))
    return spec.columns, rows


def format_value(x):
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, str):
        return x
    return f"{float(x):.12g}"


def write_csv(path, columns, rows):
    """Write atomically: a failed write leaves no partial file behind."""
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(prefix=".scan-", suffix=".csv", dir=directory)
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(",".join(columns) + "\n")
            for row in rows:
                fh.write(",".join(format_value(x) for x in row) + "\n")
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def gnuplot_script(spec, csv_path):
    n1, n2 = spec.axis_names
    return "\n".join(
        [
            "set datafile separator ','",
            f"set xlabel '{n1}'",
            f"set ylabel '{n2}'",
            "set view map",
            "set palette defined (0 'white', 1 'navy')",
            f"# certified-local region: bound <= {LOCAL_THRESHOLD:.12g}",
            f"splot '{os.path.basename(csv_path)}' every ::1 using 1:2:($8 eq \"true\" ? 1 : 0) "
            "with points pointtype 5 pointsize 0.3 palette notitle",
            "",
        ]
    )
