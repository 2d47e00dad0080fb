import math

import numpy as np
import pytest

from modelspace_lab.errors import DomainError, PreconditionError
from modelspace_lab.experiments import geometric_zeros
from modelspace_lab.quadrature import (
    GradedGrid,
    QuadratureGrid,
    default_grid,
    hardy_norm,
    integrate,
    refine_until,
)


@pytest.mark.parametrize("N", [1, 8, 64, 1024])
def test_trapezoid_exact_on_monomials(N):
    grid = QuadratureGrid(N)
    assert integrate(lambda z: np.ones_like(z), grid) == pytest.approx(1, abs=1e-15)
    for m in range(1, N):
        assert abs(integrate(lambda z: z ** m, grid)) <= 1e-13
        assert abs(integrate(lambda z: z ** -m, grid)) <= 1e-13


def test_grid_must_be_power_of_two():
    with pytest.raises(PreconditionError):
        QuadratureGrid(48)


def test_graded_grid_is_a_probability_rule():
    grid = GradedGrid.for_zeros(geometric_zeros(40))
    assert grid.weights.sum() == pytest.approx(1, abs=1e-14)
    assert np.all(grid.weights > 0)
    assert np.allclose(np.abs(grid.nodes), 1)
    for m in (1, 2, 7):
        assert abs(integrate(lambda z: z ** m, grid)) <= 1e-13
    assert grid.refine().node_count == 2 * grid.node_count


def test_hardy_norm_examples():
    assert hardy_norm(lambda z: np.ones_like(z), 3).value == pytest.approx(1, abs=1e-15)
    assert hardy_norm(lambda z: z ** 5, 1).value == pytest.approx(1, abs=1e-15)
    res = hardy_norm(lambda z: 1 / (1 - 0.5 * z), 2)
    assert res.converged
    assert abs(res.value - math.sqrt(4 / 3)) <= 1e-10


def test_hardy_norm_graded_near_boundary_pole():
    # ||1/(1 - a z)||_2^2 = 1/(1 - a^2); nodes are stored as complex numbers,
    # so accuracy is limited to about eps / gap
    g = 2.0 ** -20
    a = 1 - g
    grid = GradedGrid((0.0,), (g,))
    res = hardy_norm(lambda z: 1 / (1 - a * z), 2, grid)
    exact = 1 / math.sqrt(g * (2 - g))
    assert res.converged
    assert res.value == pytest.approx(exact, rel=1e-10)


def test_nonconvergence_is_flagged():
    a = 1 - 1e-6
    res = hardy_norm(lambda z: 1 / (1 - a * z), 2, QuadratureGrid(64), cap=1024)
    assert not res.converged
    assert res.node_count == 1024


def test_nonfinite_integrand_rejected():
    with pytest.raises(DomainError):
        with np.errstate(divide="ignore", invalid="ignore"):
            integrate(lambda z: 1 / (z - 1), QuadratureGrid(8))


def test_default_grid_selection():
    assert isinstance(default_grid(geometric_zeros(3)), QuadratureGrid)
    assert isinstance(default_grid(geometric_zeros(20)), GradedGrid)


def test_refine_until_vector_values():
    res = refine_until(lambda g: integrate(lambda z: np.stack([z * np.conj(z), z], -1), g),
                       QuadratureGrid(4))
    assert res.converged
    assert np.allclose(res.value, [1, 0], atol=1e-15)
