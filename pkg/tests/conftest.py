"""Shared fixtures and generators for the blockpoly test suite."""

import os

import numpy as np
import pytest

from blockpoly.io import load_mfd, load_polynomial
from blockpoly.polynomial import SpectralFactorChain

FIXTURES = os.path.join(
    os.path.dirname(__file__), "..", "src", "blockpoly", "fixtures"
)


def fixture_path(name: str) -> str:
    return os.path.abspath(os.path.join(FIXTURES, name))


@pytest.fixture
def example1():
    return load_polynomial(fixture_path("example1.json"))


@pytest.fixture
def example2():
    return load_polynomial(fixture_path("example2.json"))


@pytest.fixture
def example3():
    return load_polynomial(fixture_path("example3.json"))


@pytest.fixture
def example4():
    return load_polynomial(fixture_path("example4.json"))


@pytest.fixture
def gas_turbine():
    return load_mfd(fixture_path("gas_turbine.json"))


def random_chain(m: int, l: int, rng, gap: float = 2.0, top: float = 8.0):
    """A chain whose factor spectra sit in disjoint modulus bands.

    factors[0] is the dominant (rightmost) block; consecutive bands are
    separated by at least ``gap`` in modulus, which is what the Q.D.
    dominance theory requires.
    """
    factors = []
    for _ in range(l):
        lo, hi = top / 1.2, top
        eigs = rng.uniform(lo, hi, size=m) * rng.choice([-1.0, 1.0], size=m)
        v = rng.standard_normal((m, m)) + 2.0 * np.eye(m)
        factors.append(v @ np.diag(eigs) @ np.linalg.inv(v))
        top = lo / gap
    return SpectralFactorChain(factors)


def spectrum_pair_error(a, b) -> float:
    """Max distance between two eigenvalue multisets after sorting."""
    a = np.sort_complex(np.asarray(a, dtype=complex))
    b = np.sort_complex(np.asarray(b, dtype=complex))
    if a.shape != b.shape:
        return float("inf")
    return float(np.max(np.abs(a - b))) if a.size else 0.0


def scalar_with_separated_roots(rng, max_degree: int = 5):
    """Random monic scalar polynomial with well-separated integer roots.

    Root moduli are drawn from a geometric ladder (ratio 1.5) so every
    pair is separated; sign patterns that zero out an interior coefficient
    are rejected (the Q.D. initialization needs them nonsingular).
    """
    ladder = [1, 2, 3, 5, 8, 12, 18, 27]
    while True:
        d = int(rng.integers(2, max_degree + 1))
        mods = rng.choice(ladder, size=d, replace=False)
        roots = [float(m * rng.choice([-1.0, 1.0])) for m in mods]
        coeffs = np.poly(roots)
        if all(abs(c) > 1e-9 for c in coeffs):
            return roots, coeffs
