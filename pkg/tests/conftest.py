import numpy as np
import pytest

from obslab.phase_observable import kolmogorov_decompose, validate

_ACCEPTANCE_LINES = []


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def acceptance_log():
    def log(number, name, ok, detail=""):
        line = f"[{'PASS' if ok else 'FAIL'}] criterion {number:>2}: {name}"
        if detail:
            line += f" ({detail})"
        _ACCEPTANCE_LINES.append(line)
        print(line)

    return log


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_ACCEPTANCE_LINES):
            terminalreporter.write_line(line)


def family_from_vectors(vectors):
    """Normalize the columns of ``vectors`` and return (phase matrix, family)."""
    v = np.asarray(vectors, dtype=complex)
    v = v / np.linalg.norm(v, axis=0)
    G = v.conj().T @ v
    G = (G + G.conj().T) / 2
    np.fill_diagonal(G, 1.0)
    C = validate(G)
    return C, kolmogorov_decompose(C)


def random_family(rng, r, d):
    v = rng.normal(size=(r, d)) + 1j * rng.normal(size=(r, d))
    return family_from_vectors(v)
