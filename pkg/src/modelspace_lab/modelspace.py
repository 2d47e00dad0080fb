"""The model space K_B of a finite Blaschke product, represented by traces.

An element is stored by its values at the zeros. The Lagrange-type basis
``h_j(z) = B(z) / (B'(a_j)(z - a_j))`` is evaluated in the cancelled form

    h_j(z) = (1 - |a_j|^2) / (1 - conj(a_j) z) * prod_{k != j} b_k(z) / b_k(a_j)

which has no removable singularity at ``a_j``.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass

import numpy as np

from .blaschke import BlaschkeProduct, ZeroSequence
from .quadrature import (
    DEFAULT_CAP,
    DEFAULT_RTOL,
    QuadResult,
    default_grid,
    hardy_norm,
    integrate,
    refine_until,
)
from .sequences import as_values


def _products_excluding_self(F: np.ndarray) -> np.ndarray:
    """``out[..., j] = prod_{k != j} F[..., k]`` via prefix and suffix products."""
    n = F.shape[-1]
    ones = np.ones(F.shape[:-1] + (1,), dtype=F.dtype)
    prefix = np.concatenate([ones, np.cumprod(F[..., :-1], axis=-1)], axis=-1)
    suffix = np.concatenate([np.cumprod(F[..., :0:-1], axis=-1)[..., ::-1], ones], axis=-1)
    return prefix * suffix if n > 1 else ones


def lagrange_basis(zeros: ZeroSequence, z, B: BlaschkeProduct | None = None) -> np.ndarray:
    """All basis functions at once: array of shape ``z.shape + (n,)`` holding ``h_j(z)``."""
    B = B if B is not None else BlaschkeProduct(zeros)
    z = np.asarray(z, dtype=complex)
    a = zeros.values
    F = B.factors(z)
    local = np.array([p.one_minus_abs_sq for p in zeros.points]) / (1.0 - np.conj(a) * z[..., None])
    H = local * _products_excluding_self(F) / B.cofactors
    hits = z[..., None] == a
    if hits.any():
        H = np.where(hits, 1.0 + 0j, H)
    return H


def lagrange_eval(zeros: ZeroSequence, j: int, z: complex) -> complex:
    return complex(lagrange_basis(zeros, np.asarray([z]))[0, j])


@dataclass(frozen=True, eq=False)
class ModelSpaceElement:
    """``f = sum_j trace[j] h_j`` in K_B."""

    zeros: ZeroSequence
    trace: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "trace", as_values(self.trace, self.zeros))
        object.__setattr__(self, "_B", BlaschkeProduct(self.zeros))

    @property
    def blaschke(self) -> BlaschkeProduct:
        return self._B

    def __call__(self, z):
        out = lagrange_basis(self.zeros, z, self._B) @ self.trace
        return out if np.ndim(out) else complex(out)

    evaluate = __call__

    def scaled(self, c) -> ModelSpaceElement:
        return ModelSpaceElement(self.zeros, c * self.trace)


def interpolate_in_KB(zeros: ZeroSequence, w) -> ModelSpaceElement:
    return ModelSpaceElement(zeros, as_values(w, zeros))


def gram_h2_norm(f: ModelSpaceElement) -> float:
    """H^2 norm from the trace alone: ``||f||^2 = t* G^{-1} t`` with the Cauchy
    matrix ``G[i, m] = 1/(1 - conj(a_m) a_i)`` of reproducing kernels."""
    a = f.zeros.values
    G = 1.0 / (1.0 - a[:, None] * np.conj(a)[None, :])
    t = f.trace
    c = np.linalg.solve(G, t)
    return float(math.sqrt(max(np.real(np.vdot(c, t)), 0.0)))


def _cauchy_values(f: ModelSpaceElement, grid) -> np.ndarray:
    a = f.zeros.values
    B = f.blaschke

    def integrand(zeta):
        g = np.conj(zeta) * np.conj(f(zeta)) * B(zeta)
        return g[:, None] / (1.0 - a[None, :] * np.conj(zeta)[:, None])

    return integrate(integrand, grid)


def tilde_trace_via_cauchy(f: ModelSpaceElement, grid=None, cap: int = DEFAULT_CAP,
                           rtol: float = DEFAULT_RTOL) -> QuadResult:
    """Trace of the partner ``g = conj(z) conj(f) B`` at the zeros, by the Cauchy
    integral of its boundary values. Equals ``conj(tilde_apply(trace))``."""
    grid = grid if grid is not None else default_grid(f.zeros, cap)
    return refine_until(lambda gr: _cauchy_values(f, gr), grid, cap, rtol)


def tilde_partner(f: ModelSpaceElement, grid=None, cap: int = DEFAULT_CAP,
                  rtol: float = DEFAULT_RTOL) -> tuple[ModelSpaceElement, bool]:
    res = tilde_trace_via_cauchy(f, grid, cap, rtol)
    return ModelSpaceElement(f.zeros, res.value), res.converged


def residue_identity_check(zeros: ZeroSequence, w, k: int, grid=None, cap: int = DEFAULT_CAP,
                           rtol: float = DEFAULT_RTOL):
    """Contour integral ``(1/2 pi i) \\oint f / (B (1 - zeta conj(a_k))) dzeta`` by quadrature,
    next to its residue sum ``sum_j w_j / (B'(a_j)(1 - a_j conj(a_k)))``.

    Returns ``(quad, residues, converged)``.
    """
    f = interpolate_in_KB(zeros, w)
    B = f.blaschke
    ak = zeros.values[k]
    grid = grid if grid is not None else default_grid(zeros, cap)

    def contour(gr):
        # d zeta / (2 pi i) = zeta dm(zeta)
        return integrate(lambda z: z * f(z) / (B(z) * (1.0 - z * np.conj(ak))), gr)

    res = refine_until(contour, grid, cap, rtol)
    residues = complex(np.sum(f.trace / (B.derivatives * (1.0 - zeros.values * np.conj(ak)))))
    return complex(res.value), residues, res.converged


@dataclass(frozen=True, eq=False)
class SquaredBasisSum:
    """``f = sum_j w_j h_j^2``; lies in K_{B^2} and interpolates ``w`` at the zeros."""

    zeros: ZeroSequence
    weights: np.ndarray

    def __call__(self, z):
        H = lagrange_basis(self.zeros, z)
        out = (H * H) @ self.weights
        return out if np.ndim(out) else complex(out)


def vinogradov_interpolant(zeros: ZeroSequence, w, grid=None, cap: int = DEFAULT_CAP,
                           rtol: float = DEFAULT_RTOL) -> tuple[SquaredBasisSum, QuadResult]:
    f = SquaredBasisSum(zeros, as_values(w, zeros))
    grid = grid if grid is not None else default_grid(zeros, cap)
    return f, hardy_norm(f, 1, grid, cap, rtol)


def boundary_csv(f, node_count: int = 1024) -> str:
    """``theta, re f, im f`` on a uniform grid of the circle."""
    theta = 2 * np.pi * np.arange(node_count) / node_count
    vals = np.asarray(f(np.exp(1j * theta)))
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["theta", "re", "im"])
    for t, v in zip(theta, vals):
        writer.writerow([repr(float(t)), repr(float(v.real)), repr(float(v.imag))])
    return buf.getvalue()

