"""The tilde transform ``w -> w~`` on traces and its closed-form inverse.

    w~_k = sum_j w_j / (B'(a_j) (1 - a_j conj(a_k)))
    w_k  = sum_j w~_j / (conj(B'(a_j)) (1 - conj(a_j) a_k))

The inverse matrix is the entrywise conjugate of the forward one; it is
assembled directly and never obtained from a solver.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass

import numpy as np

from .blaschke import BlaschkeProduct, ZeroSequence
from .disk import conj_mul_table
from .errors import UnsupportedParameterError
from .sequences import as_values


def _denominators(zeros: ZeroSequence) -> np.ndarray:
    # [k, j] -> 1 - conj(a_k) a_j
    return conj_mul_table(zeros.values, zeros.margins, zeros.has_gap)


def tilde_apply(w, zeros: ZeroSequence) -> np.ndarray:
    w = as_values(w, zeros)
    c = w / BlaschkeProduct(zeros).derivatives
    den = _denominators(zeros)
    return np.array([np.sum(c / den[k]) for k in range(len(zeros))])


def inverse_tilde_apply(w_tilde, zeros: ZeroSequence) -> np.ndarray:
    wt = as_values(w_tilde, zeros)
    c = wt / np.conj(BlaschkeProduct(zeros).derivatives)
    den = np.conj(_denominators(zeros))
    return np.array([np.sum(c / den[k]) for k in range(len(zeros))])


@dataclass(frozen=True)
class TildeMatrices:
    forward: np.ndarray
    inverse: np.ndarray

    def roundtrip_defect(self) -> float:
        n = self.forward.shape[0]
        return float(np.max(np.abs(self.inverse @ self.forward - np.eye(n))))


def tilde_matrices(zeros: ZeroSequence) -> TildeMatrices:
    d = BlaschkeProduct(zeros).derivatives
    den = _denominators(zeros)
    forward = 1.0 / (d[None, :] * den)
    inverse = 1.0 / (np.conj(d)[None, :] * np.conj(den))
    return TildeMatrices(forward, inverse)


def _weighted_forward(zeros: ZeroSequence) -> np.ndarray:
    s = np.sqrt(zeros.margins)
    return s[:, None] * tilde_matrices(zeros).forward / s[None, :]


def weighted_operator_bounds(zeros: ZeroSequence, p: float = 2) -> tuple[float, float]:
    """Extreme singular values of ``D^(1/2) T D^(-1/2)``, ``D = diag(1 - |a_k|)``.

    They bound ``||T w|| / ||w||`` in the weighted l^2 norm from below and above.
    """
    if p != 2:
        raise UnsupportedParameterError("singular-value bounds are available for p = 2 only")
    sv = np.linalg.svd(_weighted_forward(zeros), compute_uv=False)
    return float(sv[-1]), float(sv[0])


def weighted_operator_bound(zeros: ZeroSequence, p: float) -> float:
    """Induced-norm upper bound (not the norm) for p = 1 (weighted) or p = inf (unweighted)."""
    T = tilde_matrices(zeros).forward
    if p == 1:
        g = zeros.margins
        return float(np.max((g[:, None] * np.abs(T)).sum(axis=0) / g))
    if p == math.inf:
        return float(np.max(np.abs(T).sum(axis=1)))
    raise UnsupportedParameterError("induced bounds are reported for p in {1, inf}")


def matrix_to_csv(M: np.ndarray) -> str:
    """Row-major CSV with each complex cell written as a ``re,im`` pair."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    for row in np.asarray(M, dtype=complex):
        cells = []
        for z in row:
            cells += [repr(float(z.real)), repr(float(z.imag))]
        writer.writerow(cells)
    return buf.getvalue()


def matrix_from_csv(text: str) -> np.ndarray:
    rows = []
    for cells in csv.reader(io.StringIO(text)):
        vals = [float(c) for c in cells]
        rows.append([complex(vals[i], vals[i + 1]) for i in range(0, len(vals), 2)])
    return np.array(rows, dtype=complex)
