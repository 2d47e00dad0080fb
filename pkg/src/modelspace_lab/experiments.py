"""Reproducible scans over truncation levels.

Every random draw comes from a generator seeded by ``(seed, n, trial, stream)``
so that serial and threaded runs give bit-identical reports.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Any

import numpy as np

from . import __version__
from .blaschke import CONDITIONING_DELTA, ZeroSequence, carleson_constant, separation_products
from .disk import DiskPoint
from .errors import ExperimentAssertionError, PreconditionError
from .modelspace import interpolate_in_KB
from .quadrature import DEFAULT_CAP, DEFAULT_RTOL, default_grid, hardy_norm
from .sequences import (
    check_gammas,
    counterexample_values,
    has_divergent_first_moment,
    power_gammas,
    weighted_lp_norm,
)
from .tilde import tilde_apply, weighted_operator_bound, weighted_operator_bounds

CONJECTURE_CAVEAT = (
    "Measurements only. Finite-section ratios neither confirm nor refute the "
    "open sufficiency question; no verdict is implied."
)

STREAM_ZEROS = 0
STREAM_VALUES = 1


# -- zero families ----------------------------------------------------------

def geometric_zeros(n: int, q: float = 0.5, use_gaps: bool = True) -> ZeroSequence:
    """``a_k = 1 - q**k``, k = 1..n."""
    if not 0 < q < 1:
        raise PreconditionError("q must lie in (0, 1)")
    gaps = [q ** k for k in range(1, n + 1)]
    if not use_gaps:
        if gaps[-1] < 2.0 ** -52:
            raise PreconditionError("gaps below 2**-52 need the gap representation")
        return ZeroSequence.from_values([1.0 - g for g in gaps])
    return ZeroSequence.radial(gaps)


def random_separated_zeros(n: int, rng: np.random.Generator, delta_min: float,
                           uniform: bool = False, max_tries: int = 2000) -> ZeroSequence:
    """Rejection sampling (radius**2 and angle uniform) with pairwise
    pseudo-hyperbolic distance >= ``delta_min``; with ``uniform=True`` every
    point's product of distances to the others must also stay >= ``delta_min``.
    Restarts from scratch when a point cannot be placed in ``max_tries`` draws."""
    while True:
        pts = np.empty(0, dtype=complex)
        prods = np.empty(0)
        while len(pts) < n:
            for _ in range(max_tries):
                r = math.sqrt(rng.random())
                t = 2 * math.pi * rng.random()
                z = complex(r * math.cos(t), r * math.sin(t))
                rho = np.abs(z - pts) / np.abs(1 - np.conj(pts) * z)
                if np.any(rho < delta_min):
                    continue
                if uniform:
                    new = prods * rho
                    own = float(np.prod(rho))
                    if np.any(new < delta_min) or own < delta_min:
                        continue
                    prods = np.append(new, own)
                pts = np.append(pts, z)
                break
            else:
                break
        if len(pts) == n:
            return ZeroSequence(tuple(DiskPoint(p) for p in pts))


def trial_rng(seed: int, n: int, trial: int, stream: int) -> np.random.Generator:
    return np.random.default_rng([seed, n, trial, stream])


def complex_normal(rng: np.random.Generator, n: int) -> np.ndarray:
    return rng.standard_normal(n) + 1j * rng.standard_normal(n)


# -- configuration ----------------------------------------------------------

FAMILY_KINDS = ("radial_geometric", "radial_custom", "random_separated")


@dataclass(frozen=True)
class ExperimentConfig:
    family: str = "radial_geometric"
    q: float = 0.5
    gaps: tuple[float, ...] | None = None
    delta_min: float = 0.3
    uniform_separation: bool = False
    n_values: tuple[int, ...] = (5, 10, 20, 40)
    gamma_exponent: float = 2.0
    gammas: tuple[float, ...] | None = None
    values: str = "random"
    trials: int = 64
    seed: int = 0
    grid_cap: int = DEFAULT_CAP
    rtol: float = DEFAULT_RTOL

    def __post_init__(self):
        if self.family not in FAMILY_KINDS:
            raise PreconditionError(f"unknown family {self.family!r}")
        ns = tuple(int(n) for n in self.n_values)
        object.__setattr__(self, "n_values", ns)
        if not ns or any(b <= a for a, b in zip(ns, ns[1:])) or ns[0] < 1:
            raise PreconditionError("n_values must be positive and strictly increasing")
        if self.trials < 1:
            raise PreconditionError("trials must be >= 1")
        if not 0 < self.q < 1:
            raise PreconditionError("q must lie in (0, 1)")
        if self.values not in ("random", "counterexample"):
            raise PreconditionError("values must be 'random' or 'counterexample'")
        if self.gaps is not None:
            object.__setattr__(self, "gaps", tuple(float(g) for g in self.gaps))
        if self.gammas is not None:
            object.__setattr__(self, "gammas", tuple(float(g) for g in check_gammas(self.gammas)))
        if not 0 <= int(self.seed) < 2 ** 64:
            raise PreconditionError("seed must be an unsigned 64-bit integer")

    @classmethod
    def from_dict(cls, d: dict) -> ExperimentConfig:
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(d) - known
        if unknown:
            raise PreconditionError(f"unknown config keys: {sorted(unknown)}")
        return cls(**d)

    def to_dict(self) -> dict:
        return asdict(self)

    @property
    def radial(self) -> bool:
        return self.family != "random_separated"

    def zeros(self, n: int) -> ZeroSequence:
        if self.family == "radial_geometric":
            return geometric_zeros(n, self.q)
        if self.family == "radial_custom":
            if self.gaps is None or len(self.gaps) < n:
                raise PreconditionError(f"radial_custom needs at least {n} gaps")
            return ZeroSequence.radial(self.gaps[:n])
        rng = trial_rng(self.seed, n, 0, STREAM_ZEROS)
        return random_separated_zeros(n, rng, self.delta_min, self.uniform_separation)

    def gamma(self, n: int) -> np.ndarray:
        if self.gammas is not None:
            if len(self.gammas) < n:
                raise PreconditionError(f"need at least {n} gammas")
            return np.array(self.gammas[:n])
        return power_gammas(n, self.gamma_exponent)


# -- reports ----------------------------------------------------------------

@dataclass
class Row:
    n: int
    trial: int | None
    quantity: str
    value: float


CSV_HEADER = ("n", "trial", "quantity", "value")


def fmt(x: float) -> str:
    """Shortest round-trip representation of a float."""
    return repr(float(x))


@dataclass
class ExperimentReport:
    name: str
    rows: list[Row] = field(default_factory=list)
    metadata: dict[str, Any] = field(default_factory=dict)
    flags: list[str] = field(default_factory=list)
    converged: bool = True

    def add(self, n: int, quantity: str, value, trial: int | None = None):
        self.rows.append(Row(int(n), trial, quantity, float(value)))

    def value(self, n: int, quantity: str, trial: int | None = None) -> float:
        for r in self.rows:
            if r.n == n and r.quantity == quantity and r.trial == trial:
                return r.value
        raise KeyError((n, quantity, trial))

    def column(self, quantity: str, trial: int | None = None) -> dict[int, float]:
        return {r.n: r.value for r in self.rows if r.quantity == quantity and r.trial == trial}

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_HEADER)
        for r in self.rows:
            w.writerow([r.n, "" if r.trial is None else r.trial, r.quantity, fmt(r.value)])
        return buf.getvalue()

    def to_json(self) -> str:
        doc = {
            "experiment": self.name,
            "metadata": self.metadata,
            "flags": self.flags,
            "rows": [asdict(r) for r in self.rows],
        }
        return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def _metadata(config: ExperimentConfig, **extra) -> dict:
    meta = {"config": config.to_dict(), "version": __version__, "seed": config.seed}
    meta.update(extra)
    return meta


def worker_count() -> int:
    try:
        return max(1, int(os.environ.get("MODELSPACE_LAB_THREADS", "1")))
    except ValueError:
        return 1


def map_trials(fn, items):
    items = list(items)
    workers = min(worker_count(), len(items))
    if workers <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


# -- experiments ------------------------------------------------------------

def run_counterexample(config: ExperimentConfig) -> ExperimentReport:
    """Radial zeros with ``w_k = B'(a_k) gamma_k``: the weighted l^1 sum of ``w``
    stays below ``sum gamma`` while that of ``w~`` exceeds ``(1/2) sum k gamma_k``."""
    if not config.radial:
        raise PreconditionError("the counterexample needs a radial family")
    report = ExperimentReport("counterexample", metadata=_metadata(config))
    for n in config.n_values:
        zeros = config.zeros(n)
        g = config.gamma(n)
        if not has_divergent_first_moment(g):
            raise PreconditionError("gammas must be strictly positive")
        w, wt = counterexample_values(zeros, g)
        gaps = zeros.margins
        k = np.arange(1, n + 1)
        A = float(np.sum(np.abs(w) * gaps))
        Bn = float(np.sum(np.abs(wt) * gaps))
        L = 0.5 * float(np.sum(k * g))
        S = float(np.sum(g))
        direct = tilde_apply(w, zeros)
        defect = float(np.max(np.abs(direct - wt)) / np.max(np.abs(wt)))
        row = {"n": n, "A": A, "B": Bn, "L": L, "gamma_sum": S}
        # rounding slack of a few ulps on sums of n positive terms
        slack = 4 * n * np.finfo(float).eps
        per_term = np.abs(w) * gaps
        if np.any(per_term > g * (1 + slack)):
            bad = int(np.argmax(per_term - g))
            raise ExperimentAssertionError(f"|w_k|(1-a_k) > gamma_k at k={bad + 1}", row)
        tails = np.cumsum(g[::-1])[::-1]
        if np.any(wt.real < tails / (2 * gaps) * (1 - slack)):
            raise ExperimentAssertionError("pointwise lower bound on w~_k failed", row)
        if A > S * (1 + slack):
            raise ExperimentAssertionError("A_n exceeds sum of gammas", row)
        if Bn < L * (1 - slack):
            raise ExperimentAssertionError("B_n below (1/2) sum k gamma_k", row)
        report.add(n, "A", A)
        report.add(n, "B", Bn)
        report.add(n, "L", L)
        report.add(n, "gamma_sum", S)
        report.add(n, "ratio", Bn / A)
        report.add(n, "tilde_defect", defect)
    return report


def random_unit_trace(zeros: ZeroSequence, rng, grid_cap: int, rtol: float):
    """Complex-normal trace rescaled so that the K_B element has unit H^1 norm."""
    w = complex_normal(rng, len(zeros))
    f = interpolate_in_KB(zeros, w)
    res = hardy_norm(f, 1, default_grid(zeros, grid_cap), grid_cap, rtol)
    return w / res.value, res.converged


def conjecture_ratio_scan(config: ExperimentConfig) -> ExperimentReport:
    """``||f||_1 / (sum |w_k|(1-|a_k|) + sum |w~_k|(1-|a_k|))`` for the K_B interpolant."""
    report = ExperimentReport("scan-conjecture", metadata=_metadata(config, caveat=CONJECTURE_CAVEAT))
    if config.values == "counterexample" and not config.radial:
        raise PreconditionError("counterexample values need a radial family")
    for n in config.n_values:
        zeros = config.zeros(n)
        grid = default_grid(zeros, config.grid_cap)
        trials = 1 if config.values == "counterexample" else config.trials

        def one(trial, zeros=zeros, grid=grid, n=n):
            if config.values == "counterexample":
                w = counterexample_values(zeros, config.gamma(n))[0]
            else:
                w = complex_normal(trial_rng(config.seed, n, trial, STREAM_VALUES), n)
            A = weighted_lp_norm(w, zeros, 1)
            At = weighted_lp_norm(tilde_apply(w, zeros), zeros, 1)
            if A + At == 0:
                return trial, None
            res = hardy_norm(interpolate_in_KB(zeros, w), 1, grid, config.grid_cap, config.rtol)
            return trial, (res.value, A, At, res.converged)

        ratios = []
        for trial, out in map_trials(one, range(trials)):
            if out is None:
                report.add(n, "skipped", 1, trial)
                report.flags.append(f"n={n} trial={trial}: zero data skipped")
                continue
            h1, A, At, conv = out
            r = h1 / (A + At)
            ratios.append(r)
            report.add(n, "h1_norm", h1, trial)
            report.add(n, "weighted_l1", A, trial)
            report.add(n, "weighted_l1_tilde", At, trial)
            report.add(n, "ratio", r, trial)
            report.add(n, "converged", conv, trial)
            if not conv:
                report.converged = False
                report.flags.append(f"n={n} trial={trial}: quadrature not converged")
        if ratios:
            report.add(n, "ratio_min", min(ratios))
            report.add(n, "ratio_median", float(np.median(ratios)))
            report.add(n, "ratio_max", max(ratios))
    return report


NECESSITY_FACTOR = 8.0
DRIFT_LIMIT = 0.5


def necessity_embedding_scan(config: ExperimentConfig) -> ExperimentReport:
    """Weighted l^1 sums of the traces of ``f`` and of its partner for random
    unit-H^1 elements of K_B, against the Carleson constant of the zeros."""
    report = ExperimentReport("scan-necessity", metadata=_metadata(config, factor=NECESSITY_FACTOR))
    prev = None
    for n in config.n_values:
        zeros = config.zeros(n)
        C = carleson_constant(zeros)

        def one(trial, zeros=zeros, n=n):
            w, conv = random_unit_trace(zeros, trial_rng(config.seed, n, trial, STREAM_VALUES),
                                        config.grid_cap, config.rtol)
            return (weighted_lp_norm(w, zeros, 1),
                    weighted_lp_norm(tilde_apply(w, zeros), zeros, 1), conv)

        results = map_trials(one, range(config.trials))
        max_a = max(r[0] for r in results)
        max_at = max(r[1] for r in results)
        all_conv = all(r[2] for r in results)
        bound = NECESSITY_FACTOR * C
        report.add(n, "carleson_constant", C)
        report.add(n, "max_weighted_l1", max_a)
        report.add(n, "max_weighted_l1_tilde", max_at)
        report.add(n, "bound", bound)
        report.add(n, "converged", all_conv)
        for name, v in (("max_weighted_l1", max_a), ("max_weighted_l1_tilde", max_at)):
            if v > bound:
                report.flags.append(f"n={n}: {name}={v!r} exceeds {NECESSITY_FACTOR}*Carleson={bound!r}")
        if not all_conv:
            report.converged = False
            report.flags.append(f"n={n}: quadrature not converged")
        if prev is not None and n == 2 * prev[0]:
            for name, old, new in (("max_weighted_l1", prev[1], max_a),
                                   ("max_weighted_l1_tilde", prev[2], max_at)):
                drift = abs(new / old - 1.0)
                report.add(n, f"drift_{name}", drift)
                if drift >= DRIFT_LIMIT:
                    report.flags.append(f"n={n}: {name} drifted by {drift:.3f} from n={prev[0]}")
        prev = (n, max_a, max_at)
    return report


def operator_bounds_scan(config: ExperimentConfig) -> ExperimentReport:
    """Singular-value bounds of the tilde map on weighted l^2 plus induced l^1 / l^inf bounds."""
    report = ExperimentReport("scan-operator", metadata=_metadata(config))
    for n in config.n_values:
        zeros = config.zeros(n)
        lo, hi = weighted_operator_bounds(zeros, 2)
        delta = float(separation_products(zeros).min())
        report.add(n, "sigma_min", lo)
        report.add(n, "sigma_max", hi)
        report.add(n, "sigma_ratio", hi / lo)
        report.add(n, "bound_l1", weighted_operator_bound(zeros, 1))
        report.add(n, "bound_linf", weighted_operator_bound(zeros, math.inf))
        report.add(n, "delta_product", delta)
        if delta < CONDITIONING_DELTA:
            report.flags.append(f"n={n}: conditioning warning, delta={delta!r}")
    return report


EXPERIMENTS = {
    "counterexample": run_counterexample,
    "scan-conjecture": conjecture_ratio_scan,
    "scan-necessity": necessity_embedding_scan,
    "scan-operator": operator_bounds_scan,
}
