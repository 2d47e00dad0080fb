import numpy as np
import pytest

from helpers import fleet
from modelspace_lab.blaschke import ZeroSequence, carleson_constant
from modelspace_lab.experiments import geometric_zeros
from modelspace_lab.modelspace import (
    boundary_csv,
    gram_h2_norm,
    interpolate_in_KB,
    lagrange_basis,
    lagrange_eval,
    residue_identity_check,
    tilde_partner,
    tilde_trace_via_cauchy,
    vinogradov_interpolant,
)
from modelspace_lab.quadrature import QuadratureGrid, default_grid, hardy_norm
from modelspace_lab.sequences import weighted_lp_norm
from modelspace_lab.tilde import tilde_apply

Z0 = ZeroSequence.from_values([0])
Z2 = ZeroSequence.from_values([0, 0.5])


def test_lagrange_examples():
    assert lagrange_eval(Z2, 0, 0) == 1
    assert lagrange_eval(Z2, 1, 0.5) == 1
    assert lagrange_eval(Z2, 0, 0.5) == 0
    assert lagrange_eval(Z2, 1, 0) == 0
    # (0.5 - z) / (0.5 (1 - 0.5 z)) at z = 0.25
    assert lagrange_eval(Z2, 0, 0.25) == pytest.approx(4 / 7, rel=1e-15)


def test_lagrange_matches_defining_quotient():
    for zeros, _ in fleet(20, 8, 0.3, seed=31):
        from modelspace_lab.blaschke import BlaschkeProduct
        B = BlaschkeProduct(zeros)
        z = np.array([0.1 + 0.2j, -0.6 + 0.05j, 0.95j])
        H = lagrange_basis(zeros, z)
        for j, a in enumerate(zeros.values):
            direct = B(z) / (B.derivatives[j] * (z - a))
            assert np.allclose(H[:, j], direct, rtol=1e-10, atol=1e-12)


def test_lagrange_smooth_through_zero():
    zeros = ZeroSequence.from_values([0.3 + 0.1j, -0.5, 0.7j])
    a = zeros.values[0]
    for d in (1e-4, 1e-7, 1e-10, 1e-13):
        assert lagrange_eval(zeros, 0, a + d) == pytest.approx(1, abs=1e-3 * d / 1e-4 + 1e-15)


def test_interpolate_examples():
    f = interpolate_in_KB(Z2, [1, 0])
    assert f(0.25) == pytest.approx(4 / 7, rel=1e-15)
    z = np.array([0.1, -0.3j, 0.8])
    assert np.allclose(f(z), (1 - 2 * z) / (1 - 0.5 * z), rtol=1e-14)
    g = interpolate_in_KB(Z0, [2 - 3j])
    assert np.allclose(g(z), 2 - 3j)


def test_interpolation_property():
    for zeros, w in fleet(40, 10, 0.3, seed=32):
        f = interpolate_in_KB(zeros, w)
        assert np.allclose(f(zeros.values), w, rtol=1e-10, atol=0)


def test_cauchy_trace_examples():
    res = tilde_trace_via_cauchy(interpolate_in_KB(Z0, [0.3 + 0.4j]))
    assert res.value == pytest.approx([0.3 - 0.4j], abs=1e-14)
    res = tilde_trace_via_cauchy(interpolate_in_KB(Z2, [1, 0]))
    assert res.converged
    assert np.allclose(res.value, [2, 2], atol=1e-13)


def test_cauchy_trace_random():
    for zeros, w in fleet(30, 10, 0.3, seed=33, uniform=True):
        res = tilde_trace_via_cauchy(interpolate_in_KB(zeros, w), cap=2 ** 14)
        assert res.converged
        assert np.max(np.abs(res.value - np.conj(tilde_apply(w, zeros)))) <= 1e-10


def test_residue_examples():
    quad, residues, conv = residue_identity_check(Z0, [1], 0)
    assert quad == pytest.approx(1, abs=1e-14) and residues == 1 and conv
    quad, residues, conv = residue_identity_check(Z2, [1, 0], 0)
    assert quad == pytest.approx(2, abs=1e-13) and residues == pytest.approx(2, abs=1e-15)


def test_residue_near_boundary_zeros():
    zeros = geometric_zeros(20)
    w = np.ones(20)
    quad, residues, conv = residue_identity_check(zeros, w, 19)
    assert conv
    assert abs(quad - residues) <= 1e-10 * (1 + abs(residues))


def test_involution():
    for zeros, w in fleet(20, 8, 0.3, seed=34, uniform=True):
        g, c1 = tilde_partner(interpolate_in_KB(zeros, w))
        f, c2 = tilde_partner(g)
        assert c1 and c2
        assert np.max(np.abs(f.trace - w)) <= 1e-9


def test_involution_geometric_family():
    zeros = geometric_zeros(25)
    w = np.linspace(1, 2, 25) * (1 + 0.5j)
    g, _ = tilde_partner(interpolate_in_KB(zeros, w))
    f, _ = tilde_partner(g)
    assert np.max(np.abs(f.trace - w)) <= 1e-8 * np.abs(w).max()


def test_gram_matches_quadrature():
    for zeros, w in fleet(40, 10, 0.3, seed=35):
        f = interpolate_in_KB(zeros, w)
        h2 = hardy_norm(f, 2, default_grid(zeros))
        assert h2.converged
        assert h2.value == pytest.approx(gram_h2_norm(f), rel=1e-9)


def test_partner_preserves_h2_norm():
    for zeros, w in fleet(10, 8, 0.3, seed=36):
        f = interpolate_in_KB(zeros, w)
        g, _ = tilde_partner(f)
        assert gram_h2_norm(g) == pytest.approx(gram_h2_norm(f), rel=1e-9)


def test_direct_sum_trace_kills_B_multiples():
    rng = np.random.default_rng(37)
    for zeros, w in fleet(20, 8, 0.3, seed=38):
        f = interpolate_in_KB(zeros, w)
        coeffs = rng.standard_normal(4)
        F = lambda z: f(z) + f.blaschke(z) * np.polyval(coeffs, z)
        g = interpolate_in_KB(zeros, F(zeros.values))
        z = np.exp(2j * np.pi * rng.random(50))
        assert np.allclose(g(z), f(z), rtol=1e-12, atol=1e-12 * np.abs(f(z)).max())


def test_carleson_embedding_fleet():
    rng = np.random.default_rng(39)
    worst = 0.0
    for zeros, _ in fleet(25, 10, 0.3, seed=40, uniform=True):
        C = carleson_constant(zeros)
        grid = default_grid(zeros)
        for _ in range(4):
            w = rng.standard_normal(len(zeros)) + 1j * rng.standard_normal(len(zeros))
            f = interpolate_in_KB(zeros, w)
            w = w / hardy_norm(f, 1, grid).value
            worst = max(worst,
                        weighted_lp_norm(w, zeros, 1) / C,
                        weighted_lp_norm(tilde_apply(w, zeros), zeros, 1) / C)
    assert worst <= 8


def test_vinogradov_examples():
    f, res = vinogradov_interpolant(Z0, [1.5 - 2j])
    assert res.value == pytest.approx(2.5, rel=1e-12)
    assert f(0.3) == pytest.approx(1.5 - 2j)
    for zeros, w in fleet(20, 10, 0.3, seed=41):
        f, _ = vinogradov_interpolant(zeros, w)
        assert np.allclose(f(zeros.values), w, rtol=1e-10, atol=0)


def test_vinogradov_lies_in_K_B_squared():
    # f in K_{B^2}: conj(z) conj(f) B^2 is analytic, so its negative Fourier modes vanish
    zeros = ZeroSequence.from_values([0.2, -0.4j, 0.5 + 0.3j])
    f, _ = vinogradov_interpolant(zeros, [1, 2j, -1])
    from modelspace_lab.blaschke import BlaschkeProduct
    B = BlaschkeProduct(zeros)
    grid = QuadratureGrid(256)
    z = grid.nodes
    g = np.conj(z) * np.conj(f(z)) * B(z) ** 2
    coeffs = np.fft.fft(g) / len(z)
    assert np.max(np.abs(coeffs[len(z) // 2:])) <= 1e-12


def test_boundary_csv():
    text = boundary_csv(interpolate_in_KB(Z2, [1, 0]), 8)
    lines = text.splitlines()
    assert lines[0] == "theta,re,im"
    assert len(lines) == 9
    t, re, im = map(float, lines[1].split(","))
    assert (t, re, im) == (0.0, -2.0, 0.0)
