"""Elementary geometry of the unit disk.

Points can carry their distance to the circle, ``gap = 1 - |a|``, exactly.
For radial families such as ``a_k = 1 - 2**-k`` that distance is lost by
subtraction long before the points themselves stop being representable, so
every two-point expression below has a polar form built from stored gaps:

    1 - conj(a) b = (ea + eb - ea*eb) + |a||b| (1 - e^{i phi})
    b - a         = u_a [(ea - eb) - |b| (1 - e^{i phi})]

with ``phi = arg b - arg a`` and ``u_a`` the unit phase of ``a``. The polar
form is used only when both points carry an explicit gap.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError

EPS = np.finfo(float).eps
POLE_TOL = 1e-300


def unit_phase(values):
    """``a / |a|`` elementwise, 1 at the origin.

    Values are rescaled by a power of two first, so subnormal inputs keep full
    relative accuracy.
    """
    v = np.asarray(values, dtype=complex)
    big = np.maximum(np.abs(v.real), np.abs(v.imag))
    _, e = np.frexp(np.where(big > 0, big, 1.0))
    s = np.ldexp(v.real, -e) + 1j * np.ldexp(v.imag, -e)
    r = np.abs(s)
    out = np.where(r > 0, s / np.where(r > 0, r, 1.0), 1.0 + 0j)
    return out if out.ndim else complex(out)


@dataclass(frozen=True)
class DiskPoint:
    """A point of the open unit disk, optionally with an exact gap ``1 - |value|``."""

    value: complex
    gap: float | None = None

    def __post_init__(self):
        value = complex(self.value)
        object.__setattr__(self, "value", value)
        if not (math.isfinite(value.real) and math.isfinite(value.imag)):
            raise DomainError(f"non-finite disk point {value!r}")
        if self.gap is None:
            if abs(value) >= 1.0:
                raise DomainError(f"|{value!r}| >= 1: not in the open disk")
            return
        gap = float(self.gap)
        object.__setattr__(self, "gap", gap)
        if not (0.0 < gap <= 1.0):
            raise DomainError(f"gap must lie in (0, 1], got {gap!r}")
        # The value may round onto the circle once gap < 2**-53; the gap is
        # authoritative then and only consistency is required.
        if abs((1.0 - abs(value)) - gap) > 4 * EPS:
            raise DomainError(f"gap {gap!r} inconsistent with |{value!r}|")

    @classmethod
    def from_gap(cls, gap: float, angle: float = 0.0) -> DiskPoint:
        """The point ``(1 - gap) e^{i angle}`` with its gap stored exactly."""
        gap = float(gap)
        if angle == 0.0:
            value = complex(1.0 - gap, 0.0)
        else:
            value = (1.0 - gap) * cmath.exp(1j * angle)
        return cls(value, gap)

    @property
    def margin(self) -> float:
        """``1 - |a|``, from the stored gap when there is one."""
        if self.gap is not None:
            return self.gap
        return 1.0 - abs(self.value)

    @property
    def one_minus_abs_sq(self) -> float:
        m = self.margin
        return m * (2.0 - m)

    @property
    def phase(self) -> complex:
        """Unit complex number ``a / |a|``; 1 at the origin."""
        return unit_phase(self.value)

    @property
    def angle(self) -> float:
        return cmath.phase(self.value) if self.value != 0 else 0.0


def as_point(z) -> DiskPoint:
    if isinstance(z, DiskPoint):
        return z
    return DiskPoint(z)


def _one_minus_exp_i(phi: float) -> complex:
    # 1 - e^{i phi} without cancellation for small phi
    if phi == 0.0:
        return 0j
    return -2j * math.sin(phi / 2) * cmath.exp(0.5j * phi)


def one_minus_conj_mul(a: DiskPoint, b: DiskPoint) -> complex:
    """``1 - conj(a) * b``."""
    if a.gap is None or b.gap is None:
        return 1.0 - a.value.conjugate() * b.value
    ea, eb = a.gap, b.gap
    rr = (1.0 - ea) * (1.0 - eb)
    return (ea + eb - ea * eb) + rr * _one_minus_exp_i(b.angle - a.angle)


def difference(b: DiskPoint, a: DiskPoint) -> complex:
    """``b - a``."""
    if a.gap is None or b.gap is None:
        return b.value - a.value
    if a.value == 0:
        return b.value
    return a.phase * ((a.gap - b.gap) - (1.0 - b.gap) * _one_minus_exp_i(b.angle - a.angle))


def pseudo_hyperbolic(z, w) -> float:
    """Pseudo-hyperbolic distance ``|z - w| / |1 - conj(w) z|``."""
    z, w = as_point(z), as_point(w)
    # canonical argument order makes the result exactly symmetric
    if (z.value.real, z.value.imag, z.margin) > (w.value.real, w.value.imag, w.margin):
        z, w = w, z
    num = abs(difference(z, w))
    if num == 0.0:
        return 0.0
    return min(num / abs(one_minus_conj_mul(w, z)), 1.0 - EPS / 2)


def blaschke_factor(a, z: complex) -> complex:
    """Elementary factor ``(|a|/a)(a - z)/(1 - conj(a) z)``, equal to ``z`` when a = 0."""
    a = as_point(a)
    z = complex(z)
    if a.value == 0:
        return z
    den = 1.0 - a.value.conjugate() * z
    if abs(den) < POLE_TOL:
        raise DomainError(f"z={z!r} is the pole of the factor at a={a.value!r}")
    return a.phase.conjugate() * (a.value - z) / den


# Vectorised pair tables. ``values``, ``margins`` and ``has_gap`` describe the
# same sequence of points; entry [k, j] pairs point k with point j.

def _pair_phi(values):
    ang = np.angle(values)
    return ang[None, :] - ang[:, None]


def _one_minus_exp_i_array(phi):
    return -2j * np.sin(phi / 2) * np.exp(0.5j * phi)


def conj_mul_table(values, margins, has_gap) -> np.ndarray:
    """Matrix of ``1 - conj(a_k) a_j``."""
    values = np.asarray(values, dtype=complex)
    out = 1.0 - np.conj(values)[:, None] * values[None, :]
    both = np.asarray(has_gap)[:, None] & np.asarray(has_gap)[None, :]
    if both.any():
        e = np.asarray(margins, dtype=float)
        ek, ej = e[:, None], e[None, :]
        polar = (ek + ej - ek * ej) + (1 - ek) * (1 - ej) * _one_minus_exp_i_array(_pair_phi(values))
        out = np.where(both, polar, out)
    return out


def difference_table(values, margins, has_gap) -> np.ndarray:
    """Matrix of ``a_j - a_k``."""
    values = np.asarray(values, dtype=complex)
    out = values[None, :] - values[:, None]
    both = np.asarray(has_gap)[:, None] & np.asarray(has_gap)[None, :]
    if both.any():
        e = np.asarray(margins, dtype=float)
        ek, ej = e[:, None], e[None, :]
        uk = unit_phase(values)[:, None]
        polar = uk * ((ek - ej) - (1 - ej) * _one_minus_exp_i_array(_pair_phi(values)))
        zero_k = (values == 0)[:, None] & np.ones_like(out, dtype=bool)
        polar = np.where(zero_k, np.broadcast_to(values[None, :], out.shape), polar)
        out = np.where(both, polar, out)
    return out
