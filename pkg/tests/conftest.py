"""Dense reference constructions, written straight from the definitions.

Nothing here imports the package's linear-algebra code: these are the
oracles the package is tested against.
"""
import numpy as np
import pytest


def rho(a):
    return np.sqrt(1.0 - abs(a) ** 2)


def dense_LM(alpha, first, a, b, beta=None, gamma=None):
    """L and M on [a, b] from the 2x2 blocks Theta_n on {n, n+1}, n = a-1 .. b.

    Even n go into L, odd n into M.  beta replaces alpha_{a-1}, gamma replaces alpha_b.
    """
    N = b - a + 1
    L = np.zeros((N, N), complex)
    M = np.zeros((N, N), complex)
    for n in range(a - 1, b + 1):
        al = alpha[n - first]
        if n == a - 1 and beta is not None:
            al = beta
        if n == b and gamma is not None:
            al = gamma
        r = np.sqrt(max(0.0, 1.0 - abs(al) ** 2))
        th = np.array([[np.conj(al), r], [r, -al]])
        X = L if n % 2 == 0 else M
        for i, p in enumerate((n, n + 1)):
            for j, q in enumerate((n, n + 1)):
                if a <= p <= b and a <= q <= b:
                    X[p - a, q - a] = th[i, j]
    return L, M


def dense_E(alpha, first, a, b, beta=None, gamma=None):
    L, M = dense_LM(alpha, first, a, b, beta, gamma)
    return L @ M


def dense_charpoly(alpha, first, a, b, z, beta=None, gamma=None):
    if b < a:
        return 1.0 + 0j
    E = dense_E(alpha, first, a, b, beta, gamma)
    return complex(np.linalg.det(z * np.eye(b - a + 1) - E))


def dense_A(alpha, first, a, b, z, beta=None, gamma=None):
    L, M = dense_LM(alpha, first, a, b, beta, gamma)
    return z * L.conj().T - M


def step(z, a):
    return np.array([[z, -np.conj(a)], [-a * z, 1.0]]) / rho(a)


def random_alpha(rng, n, radius=0.9):
    return radius * np.sqrt(rng.random(n)) * np.exp(2j * np.pi * rng.random(n))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


# one line per acceptance criterion, repeated in the terminal summary
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
