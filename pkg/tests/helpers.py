"""Seeded instance fleets and independent oracles shared by the tests."""

from pathlib import Path

import numpy as np

from modelspace_lab.experiments import random_separated_zeros


def fleet(count, max_n, delta_min, seed, uniform=False, min_n=1):
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        n = int(rng.integers(min_n, max_n + 1))
        zeros = random_separated_zeros(n, rng, delta_min, uniform=uniform)
        w = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        out.append((zeros, w))
    return out


def naive_rho(a, b):
    return abs(a - b) / abs(1 - np.conj(b) * a)


def naive_blaschke(values, z):
    out = 1.0 + 0j
    for a in values:
        out *= z if a == 0 else (abs(a) / a) * (a - z) / (1 - np.conj(a) * z)
    return out


def naive_tilde_matrix(values):
    """Forward tilde matrix with B'(a_j) from central finite differences."""
    n = len(values)
    h = 1e-6
    d = np.array([(naive_blaschke(values, a + h) - naive_blaschke(values, a - h)) / (2 * h)
                  for a in values])
    return np.array([[1 / (d[j] * (1 - values[j] * np.conj(values[k]))) for j in range(n)]
                     for k in range(n)])


GOLDEN = Path(__file__).parent / "golden"

# (subcommand, config stem, format); expected output lives in golden/expected/<stem>.<format>
GOLDEN_CASES = [
    ("diagnose", "diagnose_two", "csv"),
    ("diagnose", "diagnose_geometric", "csv"),
    ("tilde", "tilde_two", "csv"),
    ("interpolate", "interpolate_three", "csv"),
    ("counterexample", "counterexample", "csv"),
    ("counterexample", "counterexample", "json"),
    ("scan-operator", "scan_operator", "csv"),
    ("scan-conjecture", "scan_conjecture", "csv"),
    ("scan-necessity", "scan_necessity", "csv"),
]
