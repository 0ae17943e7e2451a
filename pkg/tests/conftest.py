import numpy as np
import pytest

from qumode import gaussian
from qumode.engine import Engine, make_op

#: verdict lines printed at the end of the session, keyed by criterion number
ACCEPTANCE_LINES = {}


def record_criterion(number, title, passed, detail):
    line = f"criterion {number:2d} {'PASS' if passed else 'FAIL'}  {title}: {detail}"
    ACCEPTANCE_LINES[number] = line
    print(line)
    return passed


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for number in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[number])


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def run_ops(n_modes, ops, backend, cutoff=None, **options):
    """Runs ``(name, params, modes)`` triples on a fresh engine."""
    eng = Engine(n_modes)
    for name, params, modes, *kw in ops:
        eng.queue(make_op(name, params, modes, **(kw[0] if kw else {})))
    return eng.run(backend, cutoff=cutoff, **options)


def run_program(program, backend, cutoff=None, **options):
    return Engine.from_program(program).run(backend, cutoff=cutoff, **options)


def random_gaussian_circuit(rng, max_modes=3):
    """A random sequence of Gaussian gates on 1 to ``max_modes`` modes."""
    n = int(rng.integers(1, max_modes + 1))
    names = ["Sgate", "Dgate", "Rgate", "BSgate", "S2gate"] if n > 1 else ["Sgate", "Dgate", "Rgate"]
    ops = []
    for _ in range(int(rng.integers(2, 3 * n + 2))):
        name = str(rng.choice(names))
        if name == "Sgate":
            ops.append((name, (rng.normal(0, 0.3), rng.uniform(0, 2 * np.pi)), (int(rng.integers(n)),)))
        elif name == "Dgate":
            ops.append((name, (complex(rng.normal(0, 0.3), rng.normal(0, 0.3)),), (int(rng.integers(n)),)))
        elif name == "Rgate":
            ops.append((name, (rng.uniform(0, 2 * np.pi),), (int(rng.integers(n)),)))
        else:
            a, b = (int(v) for v in rng.choice(n, 2, replace=False))
            first = rng.uniform(0, np.pi) if name == "BSgate" else rng.normal(0, 0.3)
            ops.append((name, (first, rng.uniform(0, 2 * np.pi)), (a, b)))
    return n, ops


def total_mean_photons(state):
    return sum(gaussian.mean_photon(state, m) for m in range(state.n_modes))
