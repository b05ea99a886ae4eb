import numpy as np
import pytest

from polylin import MatrixPolynomial, random_polynomial


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: long Monte-Carlo suites over many random polynomials")


@pytest.fixture
def cubic():
    """The scalar polynomial p(z) = z^3 - 1."""
    return MatrixPolynomial([-1.0, 0.0, 0.0, 1.0])


@pytest.fixture
def make_random():
    """Factory for seeded random polynomials, optionally with zeroed end coefficients."""

    def make(n, k, seed, hermitian=False, singular_leading=False, singular_trailing=False):
        P = random_polynomial(n, k, seed, hermitian=hermitian)
        coeffs = [np.array(a) for a in P.coeffs]
        if singular_leading:
            coeffs[-1][0, :] = 0
            coeffs[-1][:, 0] = 0
        if singular_trailing:
            coeffs[0][0, :] = 0
            coeffs[0][:, 0] = 0
        return MatrixPolynomial(coeffs)

    return make


@pytest.fixture
def assert_spectra_close():
    """Assert every expected eigenvalue has a distinct computed partner within rtol * max(1, |delta|)."""

    def check(computed, expected, rtol):
        remaining = list(np.asarray(computed, dtype=complex))
        for delta in np.asarray(expected, dtype=complex):
            assert remaining, f"no computed eigenvalue left for {delta}"
            distances = [abs(mu - delta) for mu in remaining]
            j = int(np.argmin(distances))
            assert distances[j] <= rtol * max(1.0, abs(delta)), f"{delta} not found, closest {remaining[j]}"
            remaining.pop(j)

    return check
