"""Weighted sequence spaces and the radial counterexample data."""

from __future__ import annotations

import json
import math

import numpy as np

from .blaschke import BlaschkeProduct, ZeroSequence
from .disk import conj_mul_table
from .errors import PreconditionError


def as_values(w, zeros: ZeroSequence | None = None) -> np.ndarray:
    w = np.asarray(w, dtype=complex).reshape(-1)
    if zeros is not None and len(w) != len(zeros):
        raise PreconditionError(f"{len(w)} values for {len(zeros)} zeros")
    return w


def weighted_lp_norm(w, zeros: ZeroSequence, p: float = 1.0) -> float:
    """``(sum |w_k|^p (1 - |a_k|))^(1/p)``; ``p = inf`` is the plain sup norm."""
    w = as_values(w, zeros)
    if p == math.inf:
        return float(np.max(np.abs(w)))
    if not p >= 1:
        raise PreconditionError(f"p must be >= 1, got {p}")
    a = np.abs(w)
    if p == 1:
        return float(np.sum(a * zeros.margins))
    # factor out the largest entry so |w|^p neither underflows nor overflows
    top = float(a.max(initial=0.0))
    if top == 0.0:
        return 0.0
    return top * float(np.sum((a / top) ** p * zeros.margins)) ** (1.0 / p)


def m_space_norm(w, zeros: ZeroSequence) -> float:
    """``sum_k k |w_k| (1 - a_k)`` with k counted from 1; radial zeros only."""
    if not zeros.radial_sorted:
        raise PreconditionError("the M-norm is defined for radial increasing zeros only")
    w = as_values(w, zeros)
    k = np.arange(1, len(w) + 1)
    return float(np.sum(k * np.abs(w) * zeros.margins))


def power_gammas(n: int, exponent: float = 2.0) -> np.ndarray:
    """``gamma_k = k**-exponent``, k = 1..n."""
    return np.arange(1, n + 1, dtype=float) ** (-exponent)


def check_gammas(gammas) -> np.ndarray:
    g = np.asarray(gammas, dtype=float).reshape(-1)
    if np.any(g < 0) or not np.all(np.isfinite(g)):
        raise PreconditionError("gammas must be finite and nonnegative")
    return g


def has_divergent_first_moment(gammas) -> bool:
    """Truncated stand-in for ``sum k gamma_k = inf``: partial sums strictly increase."""
    g = check_gammas(gammas)
    return bool(np.all(g > 0))


def counterexample_values(zeros: ZeroSequence, gammas):
    """Values ``w_k = B'(a_k) gamma_k`` and their simplified tilde transform.

    For radial zeros the derivative cancels and
    ``w~_k = sum_j gamma_j / (1 - a_j a_k)``, with the denominator formed from
    stored gaps. Returns ``(w, w_tilde)``.
    """
    if not zeros.radial_sorted:
        raise PreconditionError("counterexample data needs radial increasing zeros")
    g = check_gammas(gammas)
    if len(g) != len(zeros):
        raise PreconditionError(f"{len(g)} gammas for {len(zeros)} zeros")
    w = BlaschkeProduct(zeros).derivatives * g
    den = conj_mul_table(zeros.values, zeros.margins, zeros.has_gap).real
    w_tilde = (g[None, :] / den).sum(axis=1)
    return w, w_tilde


# -- serialization ----------------------------------------------------------

def dumps_values(w) -> str:
    w = as_values(w)
    return json.dumps([[float(z.real), float(z.imag)] for z in w])


def loads_values(text_or_obj) -> np.ndarray:
    obj = json.loads(text_or_obj) if isinstance(text_or_obj, str) else text_or_obj
    out = []
    for item in obj:
        if isinstance(item, (list, tuple)):
            re, im = item
            out.append(complex(float(re), float(im)))
        else:
            out.append(complex(float(item), 0.0))
    return np.array(out, dtype=complex)


def dumps_gammas(gammas) -> str:
    return json.dumps([float(x) for x in check_gammas(gammas)])


def loads_gammas(text: str) -> np.ndarray:
    return check_gammas(json.loads(text))
