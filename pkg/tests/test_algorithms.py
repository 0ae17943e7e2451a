import itertools
import math

import numpy as np
import pytest
from scipy.linalg import expm as scipy_expm

from qumode import algorithms, fock, gaussian
from qumode.blackbird import validate

from conftest import run_ops, run_program

HBAR = 2.0


def permanent_by_permutations(m):
    n = m.shape[0]
    return sum(math.prod(m[i, p[i]] for i in range(n)) for p in itertools.permutations(range(n)))


# teleportation


def test_selected_teleportation_matches_oracle():
    report = algorithms.teleportation(select=(0.0, 0.0)).evaluate()
    assert report.passed, report.lines()
    # with zero outcomes the output mean tends to the input mean as the resource squeezing grows
    target = math.sqrt(2 * HBAR) * np.array([0.5, 0.2])
    gaps = [np.abs(algorithms.teleportation_oracle(0.5 + 0.2j, r, (0.0, 0.0))[0] - target).max() for r in (1, 2, 4, 8)]
    assert all(a > b for a, b in zip(gaps, gaps[1:])) and gaps[-1] < 1e-6


def test_sampled_teleportation_recovers_the_amplitude():
    report = algorithms.teleportation(shots=1000).evaluate()
    assert report.passed, report.lines()


def test_weak_resource_adds_noise():
    vac = HBAR / 2 * np.identity(2)
    weak = algorithms.teleportation_average_state(0.5 + 0.2j, 0.05).cov
    strong = algorithms.teleportation_average_state(0.5 + 0.2j, 2.0).cov
    assert np.all(np.linalg.eigvalsh(weak - vac) > 0)
    assert np.trace(weak) > np.trace(strong) > np.trace(vac)


def test_teleportation_fidelity_grows_with_squeezing():
    f = [algorithms.teleportation_fidelity(0.5 + 0.2j, r) for r in (0.5, 1.0, 2.0)]
    assert f[0] < f[1] < f[2] < 1
    assert algorithms.teleportation_fidelity(0.5, 0.0) == pytest.approx(0.5, abs=1e-9)


# gate teleportation


def test_gate_teleportation_fidelity():
    report = algorithms.gate_teleportation(s=0.5, r=2.0).evaluate()
    assert report.passed, report.lines()
    assert algorithms.gate_teleportation_fidelity(0.5, r=2.0) >= 0.99


def test_gate_teleportation_improves_with_ancilla_squeezing():
    f = [algorithms.gate_teleportation_fidelity(0.5, r=r) for r in (0.5, 1.0, 2.0)]
    assert f[0] < f[1] < f[2]


def test_zero_shear_teleports_the_state_up_to_a_fourier_transform():
    mu, cov = algorithms.gate_teleportation_oracle(0.0)
    inp = run_ops(1, [("Squeezed", (0.3, 0.4), (0,)), ("Dgate", (0.4 + 0.3j,), (0,))], "gaussian").state
    means, v = inp.means, inp.cov
    f = np.array([[0.0, -1.0], [1.0, 0.0]])
    np.testing.assert_allclose(mu, f @ means, atol=1e-14)
    np.testing.assert_allclose(cov, f @ v @ f.T, atol=1e-14)


def test_gate_teleportation_oracle_matches_fock_gates():
    # the direct P(s) then F on the input, evaluated on the Fock backend
    s, d = 0.5, 30
    ops = [("Squeezed", (0.3, 0.4), (0,)), ("Dgate", (0.4 + 0.3j,), (0,)), ("Pgate", (s,), (0,)),
           ("Fouriergate", (), (0,))]
    state = run_ops(1, ops, "fock", cutoff=d).state
    _, _, _, x, p = fock.ladder_ops(d, HBAR)
    rho = fock.dm(state)
    mu, _ = algorithms.gate_teleportation_oracle(s)
    assert np.trace(rho @ x).real == pytest.approx(mu[0], abs=1e-4)
    assert np.trace(rho @ p).real == pytest.approx(mu[1], abs=1e-4)


# boson sampling


def test_identity_interferometer_preserves_the_input():
    u = np.identity(3)
    prog = algorithms.boson_sampling_program(u, (1, 0, 1))
    state = run_program(prog, "fock", cutoff=4).state
    assert fock.fock_prob(state, (1, 0, 1)) == pytest.approx(1, abs=1e-12)
    assert algorithms.boson_sampling_probability(u, (1, 0, 1), (1, 0, 1)) == pytest.approx(1)


def test_hong_ou_mandel_dip():
    t = r = 1 / math.sqrt(2)
    u = np.array([[t, -r], [r, t]])
    assert algorithms.boson_sampling_probability(u, (1, 1), (1, 1)) == pytest.approx(0, abs=1e-15)
    assert permanent_by_permutations(u) == pytest.approx(0, abs=1e-15)
    state = run_program(algorithms.boson_sampling_program(u, (1, 1)), "fock", cutoff=4).state
    assert fock.fock_prob(state, (1, 1)) == pytest.approx(0, abs=1e-12)
    assert fock.fock_prob(state, (2, 0)) == pytest.approx(0.5, abs=1e-12)


def test_three_mode_single_photon_patterns_match_permanents():
    u = algorithms.haar_unitary(3, 11)
    inputs = (1, 1, 1)
    state = run_program(algorithms.boson_sampling_program(u, inputs), "fock", cutoff=6).state
    total = 0.0
    for pattern in algorithms.photon_patterns(3, 3):
        backend = fock.fock_prob(state, pattern)
        total += backend
        rows = [j for j, n in enumerate(pattern) for _ in range(n)]
        norm = math.prod(math.factorial(n) for n in pattern)
        oracle = abs(permanent_by_permutations(u[np.ix_(rows, [0, 1, 2])])) ** 2 / norm
        assert backend == pytest.approx(oracle, abs=1e-6)
    result = run_program(algorithms.boson_sampling_program(u, inputs), "fock", cutoff=6)
    assert total == pytest.approx(1 - result.leakage, abs=1e-9)


def test_boson_sampling_example_passes():
    report = algorithms.boson_sampling().evaluate()
    assert report.passed, report.lines()


# gaussian boson sampling


def test_unsqueezed_inputs_give_vacuum():
    u = algorithms.haar_unitary(3, 2)
    state = run_program(algorithms.gbs_program(u, [0.0] * 3), "gaussian").state
    assert gaussian.fock_prob(state, (0, 0, 0)) == pytest.approx(1)
    assert algorithms.gbs_probability(u, [0.0] * 3, (0, 0, 0)) == pytest.approx(1)


def test_single_mode_squeezed_photon_distribution():
    r = 0.6
    state = run_program(algorithms.gbs_program(np.identity(1), [r]), "gaussian").state
    for n in range(4):
        amp2 = math.tanh(r) ** (2 * n) * math.factorial(2 * n) / (2**n * math.factorial(n)) ** 2 / math.cosh(r)
        assert gaussian.fock_prob(state, (2 * n,)) == pytest.approx(amp2, abs=1e-12)
        assert gaussian.fock_prob(state, (2 * n + 1,)) == pytest.approx(0, abs=1e-14)


def test_two_mode_hafnian_formula_matches_fock_backend():
    u = algorithms.haar_unitary(2, 8)
    r = (0.3, 0.3)
    state = run_program(algorithms.gbs_program(u, r), "fock", cutoff=12).state
    for pattern in [(0, 0), (1, 1), (1, 0), (0, 1)]:
        assert fock.fock_prob(state, pattern) == pytest.approx(algorithms.gbs_probability(u, r, pattern), abs=1e-6)


def test_gbs_example_passes():
    report = algorithms.gaussian_boson_sampling().evaluate()
    assert report.passed, report.lines()


# IQP


def test_iqp_orderings_are_bit_identical():
    report = algorithms.iqp().evaluate()
    assert report.passed, report.lines()


def test_iqp_program_needs_fock():
    prog = algorithms.iqp_program(algorithms.iqp_draw())
    assert "Vgate" in validate(prog).compatibility["gaussian"]
    assert not validate(prog, "gaussian").ok and validate(prog, "fock").ok


def test_gaussian_iqp_matches_gaussian_backend():
    gates = algorithms.iqp_draw(n_modes=2, n_gates=6, seed=5, s_scale=0.0, gamma_scale=0.0)
    prog = algorithms.iqp_program(gates, n_modes=2, r=-0.3, measure=False, drop_identity=True)
    g = run_program(prog, "gaussian").state
    f = run_program(prog, "fock", cutoff=20).state
    for pattern in itertools.product(range(4), repeat=2):
        assert fock.fock_prob(f, pattern) == pytest.approx(gaussian.fock_prob(g, pattern), abs=1e-6)


# Hamiltonian simulation


def test_single_boson_hops_between_sites():
    j, t = 1.0, 0.7
    exact = algorithms.bose_hubbard_exact(j, 0.0, t, (1, 0), 4)
    assert abs(exact[1, 0]) ** 2 == pytest.approx(math.cos(j * t) ** 2, abs=1e-12)
    state = run_program(algorithms.bose_hubbard_program(J=j, U=0.0, k=5, t=t, inputs=(1, 0)), "fock", cutoff=4).state
    # with U = 0 the beamsplitters commute with everything else, so Trotterization is exact
    assert fock.fock_prob(state, (1, 0)) == pytest.approx(math.cos(j * t) ** 2, abs=1e-12)


def test_exact_evolution_matches_scipy():
    d, j, u, t = 5, 1.0, 1.5, 1.086
    a = np.diag(np.sqrt(np.arange(1, d)), 1)
    eye = np.identity(d)
    a1, a2 = np.kron(a, eye), np.kron(eye, a)
    n1, n2 = a1.T @ a1, a2.T @ a2
    h = j * (a1.T @ a2 + a2.T @ a1) + u / 2 * (n1 @ n1 - n1 + n2 @ n2 - n2)
    psi0 = np.zeros(d * d)
    psi0[d + 1] = 1
    want = scipy_expm(-1j * h * t) @ psi0
    np.testing.assert_allclose(algorithms.bose_hubbard_exact(j, u, t, (1, 1), d).ravel(), want, atol=1e-12)


def test_trotter_error_halves_when_steps_double():
    e = [algorithms.trotter_error(k=k) for k in (20, 40, 80)]
    assert e[0] > e[1] > e[2]
    for coarse, fine in zip(e, e[1:]):
        assert 0.4 <= fine / coarse <= 0.6


# optimization


def test_displacement_objective_values():
    assert algorithms.displacement_objective(0.0) == pytest.approx(0, abs=1e-15)
    assert algorithms.displacement_objective(1.0) == pytest.approx(math.exp(-1), abs=1e-6)


def test_optimizer_finds_unit_displacement():
    alpha, value, used = algorithms.optimize_alpha(0.1)
    assert abs(alpha - 1) < 0.01 and used <= 200
    grid = np.linspace(0, 2, 201)
    best = grid[np.argmax([a * a * math.exp(-a * a) for a in grid])]
    assert abs(alpha - best) < 0.01
    assert value == pytest.approx(math.exp(-1), abs=1e-6)
    with pytest.raises(ValueError):
        algorithms.optimize_alpha(step=0)


def test_example_registry_lists_every_algorithm():
    assert set(algorithms.EXAMPLES) == {
        "teleportation", "gate-teleportation", "boson-sampling", "gaussian-boson-sampling", "iqp",
        "hamiltonian-simulation", "optimize-displacement",
    }
