"""Finite Blaschke products and interpolating-sequence diagnostics."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .disk import (
    POLE_TOL,
    DiskPoint,
    as_point,
    conj_mul_table,
    difference_table,
    pseudo_hyperbolic,
    unit_phase,
)
from .errors import DomainError, PreconditionError

MAX_ZEROS = 64
DEFAULT_THRESHOLD = 0.005
CONDITIONING_DELTA = 0.05


@dataclass(frozen=True)
class ZeroSequence:
    """Ordered, pairwise distinct points of the open disk."""

    points: tuple[DiskPoint, ...]

    def __post_init__(self):
        pts = tuple(as_point(p) for p in self.points)
        object.__setattr__(self, "points", pts)
        if not pts:
            raise PreconditionError("a zero sequence needs at least one point")
        if len(pts) > MAX_ZEROS:
            raise PreconditionError(f"{len(pts)} zeros exceeds the cap of {MAX_ZEROS}")
        dist = np.abs(difference_table(self.values, self.margins, self.has_gap))
        np.fill_diagonal(dist, 1.0)
        if np.any(dist == 0.0):
            i, j = np.argwhere(dist == 0.0)[0]
            raise PreconditionError(f"zeros {i} and {j} coincide")

    @classmethod
    def from_values(cls, values: Iterable[complex]) -> ZeroSequence:
        return cls(tuple(DiskPoint(v) for v in values))

    @classmethod
    def radial(cls, gaps: Iterable[float]) -> ZeroSequence:
        """Real points ``1 - gap`` with the gaps stored exactly."""
        return cls(tuple(DiskPoint.from_gap(g) for g in gaps))

    def __len__(self):
        return len(self.points)

    def __iter__(self):
        return iter(self.points)

    def __getitem__(self, j):
        return self.points[j]

    def prefix(self, n: int) -> ZeroSequence:
        return ZeroSequence(self.points[:n])

    @cached_property
    def values(self) -> np.ndarray:
        return np.array([p.value for p in self.points], dtype=complex)

    @cached_property
    def margins(self) -> np.ndarray:
        """``1 - |a_k|``, exact where a gap is stored."""
        return np.array([p.margin for p in self.points], dtype=float)

    @cached_property
    def has_gap(self) -> np.ndarray:
        return np.array([p.gap is not None for p in self.points], dtype=bool)

    @cached_property
    def radial_sorted(self) -> bool:
        v = self.values
        if np.any(v.imag != 0) or np.any(v.real < 0):
            return False
        return bool(np.all(np.diff(self.margins) < 0))

    @cached_property
    def min_gap(self) -> float:
        return float(self.margins.min())


class BlaschkeProduct:
    """Finite Blaschke product with zeros ``zeros``; callable on arrays."""

    def __init__(self, zeros: ZeroSequence | Sequence):
        if not isinstance(zeros, ZeroSequence):
            zeros = ZeroSequence(tuple(zeros))
        self.zeros = zeros
        # multiplication order: increasing |a_k|
        self._order = np.argsort(-zeros.margins, kind="stable")

    def __repr__(self):
        return f"BlaschkeProduct(n={len(self.zeros)})"

    def factors(self, z) -> np.ndarray:
        """Array of elementary factors ``b_k(z)``, shape ``z.shape + (n,)``."""
        z = np.asarray(z, dtype=complex)[..., None]
        a = self.zeros.values
        r = np.abs(a)
        den = 1.0 - np.conj(a) * z
        if np.any(np.abs(den) < POLE_TOL):
            raise DomainError("evaluation point at a pole of the Blaschke product")
        ca = np.conj(unit_phase(a))
        return np.where(r > 0, ca * (a - z) / den, z)

    def __call__(self, z):
        f = self.factors(z)[..., self._order]
        out = np.ones(f.shape[:-1], dtype=complex)
        for k in range(f.shape[-1]):
            out = out * f[..., k]
        return out if out.ndim else complex(out)

    def log_abs(self, z):
        """``log |B(z)|`` accumulated in the log domain; diagnostics only."""
        with np.errstate(divide="ignore"):
            s = np.log(np.abs(self.factors(z))).sum(axis=-1)
        return s if np.ndim(s) else float(s)

    @cached_property
    def cofactors(self) -> np.ndarray:
        """``P_j = prod_{k != j} b_k(a_j)``, from gap-stable pair tables."""
        zs = self.zeros
        # pair tables are indexed [k, j]: b_k(a_j) = conj(u_k)(a_k - a_j)/(1 - conj(a_k) a_j)
        diff = -difference_table(zs.values, zs.margins, zs.has_gap)
        den = conj_mul_table(zs.values, zs.margins, zs.has_gap)
        phase = np.array([p.phase.conjugate() for p in zs.points])
        table = phase[:, None] * diff / den
        zero_rows = zs.values == 0
        table[zero_rows, :] = zs.values[None, :]
        n = len(zs)
        out = np.ones(n, dtype=complex)
        for k in self._order:
            row = table[k].copy()
            row[k] = 1.0
            out = out * row
        return out

    @cached_property
    def derivatives(self) -> np.ndarray:
        """``B'(a_j)`` for every zero, in closed form."""
        local = np.array(
            [-p.phase.conjugate() / p.one_minus_abs_sq if p.value != 0 else 1.0 + 0j
             for p in self.zeros.points]
        )
        return local * self.cofactors


def blaschke_eval(B: BlaschkeProduct, z: complex) -> complex:
    return B(z)


def derivative_at_zero(B: BlaschkeProduct, j: int) -> complex:
    """``B'(a_j)`` (0-based ``j``)."""
    if not 0 <= j < len(B.zeros):
        raise IndexError(f"zero index {j} out of range")
    return complex(B.derivatives[j])


# -- separation and Carleson diagnostics ------------------------------------

@dataclass(frozen=True)
class SeparationReport:
    delta_derivative: float
    delta_product: float
    carleson_constant: float
    blaschke_sum: float
    is_interpolating: bool
    threshold: float

    @property
    def conditioning_warning(self) -> bool:
        return self.delta_product < CONDITIONING_DELTA

    def as_dict(self) -> dict:
        return {
            "delta_derivative": self.delta_derivative,
            "delta_product": self.delta_product,
            "carleson_constant": self.carleson_constant,
            "blaschke_sum": self.blaschke_sum,
            "is_interpolating": self.is_interpolating,
            "threshold": self.threshold,
            "conditioning_warning": self.conditioning_warning,
        }


def separation_products(zeros: ZeroSequence) -> np.ndarray:
    """``prod_{k != j} rho(a_j, a_k)`` for each j, by direct distance evaluation."""
    n = len(zeros)
    out = np.ones(n)
    for j in range(n):
        for k in range(n):
            if k != j:
                out[j] *= pseudo_hyperbolic(zeros[j], zeros[k])
    return out


def _dyadic_levels(min_gap: float) -> range:
    return range(0, math.ceil(math.log2(1.0 / min_gap)) + 2)


CARLESON_SHIFTS = (0.0, 1.0 / 3.0)


def carleson_constant(zeros: ZeroSequence) -> float:
    """Brute-force sup of ``mu(S(I)) / |I|`` for ``mu = sum (1-|a_k|) delta_{a_k}``.

    Boxes ``S(I) = {r e^{2 pi i t}: 1 - |I| <= r < 1, t in I}`` run over dyadic arcs
    of length ``2**-m`` on the standard grid and on the grid shifted by 1/3.
    Only arcs that contain a point are visited.
    """
    gaps = zeros.margins
    t = np.mod(np.angle(zeros.values) / (2 * math.pi), 1.0)
    best = 0.0
    for m in _dyadic_levels(zeros.min_gap):
        length = math.ldexp(1.0, -m)
        inside = gaps <= length
        if not inside.any():
            continue
        for shift in CARLESON_SHIFTS:
            cells = np.floor(np.mod(t[inside] - shift, 1.0) / length).astype(np.int64)
            mass: dict[int, float] = {}
            for c, g in zip(cells.tolist(), gaps[inside].tolist()):
                mass[c] = mass.get(c, 0.0) + g
            best = max(best, max(mass.values()) / length)
    return best


def smallest_box_length(zeros: ZeroSequence, k: int) -> float:
    """Length of the smallest dyadic box (over the levels scanned) containing ``a_k``."""
    g = zeros.margins[k]
    lengths = [math.ldexp(1.0, -m) for m in _dyadic_levels(zeros.min_gap)]
    return min(L for L in lengths if g <= L)


def separation_report(zeros: ZeroSequence, threshold: float = DEFAULT_THRESHOLD) -> SeparationReport:
    if not 0 < threshold < 1:
        raise PreconditionError("threshold must lie in (0, 1)")
    B = BlaschkeProduct(zeros)
    gaps = zeros.margins
    delta_derivative = float(np.min(np.abs(B.derivatives) * gaps))
    delta_product = float(np.min(separation_products(zeros)))
    return SeparationReport(
        delta_derivative=delta_derivative,
        delta_product=delta_product,
        carleson_constant=carleson_constant(zeros),
        blaschke_sum=float(gaps.sum()),
        is_interpolating=delta_derivative >= threshold,
        threshold=threshold,
    )


# -- serialization ----------------------------------------------------------

def zeros_to_json_obj(zeros: ZeroSequence) -> list[dict]:
    out = []
    for p in zeros.points:
        if p.gap is not None and p.value.imag == 0 and p.value.real >= 0:
            out.append({"gap": p.gap})
        else:
            out.append({"re": p.value.real, "im": p.value.imag})
    return out


def zeros_from_json_obj(obj) -> ZeroSequence:
    pts = []
    for item in obj:
        if "gap" in item:
            pts.append(DiskPoint.from_gap(float(item["gap"])))
        else:
            pts.append(DiskPoint(complex(float(item["re"]), float(item.get("im", 0.0)))))
    return ZeroSequence(tuple(pts))


def dumps_zeros(zeros: ZeroSequence) -> str:
    return json.dumps(zeros_to_json_obj(zeros))


def loads_zeros(text: str) -> ZeroSequence:
    return zeros_from_json_obj(json.loads(text))
