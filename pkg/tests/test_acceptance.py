"""Acceptance criteria, one test each. Every test prints a PASS/FAIL line and
the session summary repeats them in criterion order."""
import itertools
import math
import subprocess
import sys
import time

import numpy as np
from scipy.linalg import expm as scipy_expm
from scipy.special import eval_hermite
from scipy.stats import unitary_group

from conftest import random_gaussian_circuit, record_criterion, run_ops, run_program, total_mean_photons
from program_gen import NumpySource, program
from qumode import algorithms, fock, gaussian, linalg
from qumode.blackbird import parse_text, serialize
from qumode.decompositions import bloch_messiah, clements, compound_gate_decomp, williamson
from qumode.linalg import sympmat


# ---------------------------------------------------------------------------
# independent oracles
# ---------------------------------------------------------------------------


def permanent_by_permutations(m):
    n = m.shape[0]
    return sum(np.prod([m[i, s[i]] for i in range(n)]) for s in itertools.permutations(range(n))) if n else 1.0


def hafnian_by_matchings(m):
    idx = list(range(m.shape[0]))
    if not idx:
        return 1.0
    first, rest = idx[0], idx[1:]
    total = 0.0
    for k, j in enumerate(rest):
        keep = rest[:k] + rest[k + 1:]
        total += m[first, j] * hafnian_by_matchings(m[np.ix_(keep, keep)])
    return total


def beamsplitter_mode_matrix(theta, phi):
    t, r = math.cos(theta), np.exp(1j * phi) * math.sin(theta)
    return np.array([[t, -np.conj(r)], [r, t]])


def random_symplectic(rng, n, scale=0.4):
    h = rng.normal(0, scale, (2 * n, 2 * n))
    return scipy_expm(sympmat(n) @ (h + h.T) / 2)


def compound_symplectic(name, params):
    """Heisenberg matrices of the compound gates written from their quadrature action."""
    if name == "Pgate":
        return np.array([[1.0, 0.0], [params[0], 1.0]])
    s = np.identity(4)
    if name == "CXgate":
        s[1, 0], s[2, 3] = params[0], -params[0]
        return s
    if name == "CZgate":
        s[2, 1] = s[3, 0] = params[0]
        return s
    r, phi = params
    ch, sh = math.cosh(r), math.sinh(r)
    c, si = math.cos(phi), math.sin(phi)
    # a1 -> ch a1 - e^{i phi} sh a2^dag, and symmetrically for a2
    return np.array([
        [ch, -sh * c, 0, -sh * si],
        [-sh * c, ch, -sh * si, 0],
        [0, -sh * si, ch, sh * c],
        [-sh * si, 0, sh * c, ch],
    ])


def primitive_product(ops, n_modes):
    total = np.identity(2 * n_modes)
    for op in ops:
        local = gaussian.gate_symplectic(op.name, op.params)
        local.modes = op.modes
        s, _ = gaussian.embed_symplectic(local, n_modes)
        total = s @ total
    return total


def hermite_function(n, x, hbar=2.0):
    return (
        (math.pi * hbar) ** -0.25
        / math.sqrt(2.0**n * math.factorial(n))
        * eval_hermite(n, x / math.sqrt(hbar))
        * math.exp(-x * x / (2 * hbar))
    )


# ---------------------------------------------------------------------------
# criteria
# ---------------------------------------------------------------------------


def test_criterion_01_coherent_statistics():
    alpha = 0.5
    state = run_ops(1, [("Coherent", (alpha,), (0,))], "fock", cutoff=10).state
    probs = np.real(fock.all_fock_probs(state))
    expected = [math.exp(-alpha**2) * alpha ** (2 * n) / math.factorial(n) for n in range(8)]
    err = max(abs(probs[n] - expected[n]) for n in range(8))
    ok = record_criterion(1, "coherent-state statistics", err <= 1e-6, f"max |P(n) - Poisson| = {err:.2e} (tol 1e-6)")
    assert ok


def test_criterion_02_squeezed_parity():
    r = 0.5
    state = run_ops(1, [("Squeezed", (r,), (0,))], "fock", cutoff=14).state
    probs = np.real(fock.all_fock_probs(state))
    odd = max(probs[1::2])
    even = max(
        abs(probs[2 * m] - math.factorial(2 * m) / (2**m * math.factorial(m)) ** 2 * math.tanh(r) ** (2 * m) / math.cosh(r))
        for m in range(7)
    )
    ok = odd < 1e-12 and even <= 1e-8
    record_criterion(2, "squeezed-state parity", ok, f"max odd P = {odd:.2e} (tol 1e-12), even error = {even:.2e} (tol 1e-8)")
    assert ok


def test_criterion_03_backend_agreement():
    rng = np.random.default_rng(2024)
    worst, count = 0.0, 0
    while count < 25:
        n, ops = random_gaussian_circuit(rng)
        g = run_ops(n, ops, "gaussian").state
        if total_mean_photons(g) > 1:
            continue
        count += 1
        probs = fock.all_fock_probs(run_ops(n, ops, "fock", cutoff=12).state)
        for pattern in itertools.product(range(5), repeat=n):
            if sum(pattern) <= 4:
                worst = max(worst, abs(probs[pattern] - gaussian.fock_prob(g, pattern)))
    ok = record_criterion(3, "backend agreement", worst <= 1e-6,
                          f"25 circuits, max probability difference = {worst:.2e} (tol 1e-6)")
    assert ok


def test_criterion_04_hafnian_permanent_oracles():
    rng = np.random.default_rng(44)
    worst = 0.0
    for _ in range(10):
        for n in range(1, 8):
            m = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
            ref = permanent_by_permutations(m)
            worst = max(worst, abs(linalg.permanent(m) - ref) / abs(ref))
        for n in (2, 4, 6, 8):
            a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
            a = a + a.T
            ref = hafnian_by_matchings(a)
            worst = max(worst, abs(linalg.hafnian(a, method="powertrace") - ref) / abs(ref))
            worst = max(worst, abs(linalg.hafnian(a) - ref) / abs(ref))
            b = a.copy()
            np.fill_diagonal(b, rng.normal(size=n))
            lref = linalg.loop_hafnian(b, method="enumerate")
            worst = max(worst, abs(linalg.loop_hafnian(b, method="bitmask") - lref) / abs(lref))
    k4 = linalg.hafnian(np.ones((4, 4)) - np.identity(4))
    ones = linalg.permanent(np.ones((3, 3)))
    ok = worst <= 1e-10 and abs(k4 - 3) < 1e-12 and abs(ones - 6) < 1e-12
    record_criterion(4, "hafnian/permanent oracles", ok,
                     f"max relative error = {worst:.2e} (tol 1e-10), haf(K4) = {k4.real:g}, per(J3) = {ones.real:g}")
    assert ok


def test_criterion_05_boson_sampling():
    u = algorithms.haar_unitary(3, algorithms.BOSON_SAMPLING_SEED)
    inputs = (1, 1, 0)
    ops = [("Fock", (k,), (i,)) for i, k in enumerate(inputs)]
    ops += [(o.name, tuple(a.evaluate() for a in o.args), tuple(o.targets)) for o in algorithms.interferometer_ops(u)]
    probs = fock.all_fock_probs(run_ops(3, ops, "fock", cutoff=6).state)
    cols = [i for i, k in enumerate(inputs) for _ in range(k)]
    worst = 0.0
    for pattern in itertools.product(range(3), repeat=3):
        if sum(pattern) != 2:
            continue
        rows = [i for i, k in enumerate(pattern) for _ in range(k)]
        norm = np.prod([math.factorial(k) for k in pattern]) * np.prod([math.factorial(k) for k in inputs])
        want = abs(permanent_by_permutations(u[np.ix_(rows, cols)])) ** 2 / norm
        worst = max(worst, abs(probs[pattern] - want))
    hom_ops = [("Fock", (1,), (0,)), ("Fock", (1,), (1,)), ("BSgate", (math.pi / 4, 0.0), (0, 1))]
    hom = float(np.real(fock.all_fock_probs(run_ops(2, hom_ops, "fock", cutoff=6).state)[1, 1]))
    ok = worst <= 1e-6 and hom < 1e-10
    record_criterion(5, "boson sampling", ok, f"max |P - |Per|^2/norm| = {worst:.2e} (tol 1e-6), HOM P(1,1) = {hom:.2e}")
    assert ok


def test_criterion_06_gaussian_boson_sampling():
    r = [0.3, 0.3]
    u = algorithms.haar_unitary(2, algorithms.GBS_SEED)
    prog = algorithms.gbs_program(u, r)
    fprobs = fock.all_fock_probs(run_program(prog, "fock", cutoff=10).state)
    gstate = run_program(prog, "gaussian").state
    b = u @ np.diag(np.tanh(r)) @ u.T
    worst = 0.0
    for pattern in itertools.product((0, 1), repeat=2):
        idx = [i for i, k in enumerate(pattern) if k]
        want = abs(hafnian_by_matchings(b[np.ix_(idx, idx)])) ** 2 / np.prod(np.cosh(r)) if len(idx) % 2 == 0 else 0.0
        worst = max(worst, abs(fprobs[pattern] - want), abs(gaussian.fock_prob(gstate, pattern) - want))
    ok = record_criterion(6, "Gaussian boson sampling", worst <= 1e-6,
                          f"max |P - |Haf|^2/prod cosh| over both backends = {worst:.2e} (tol 1e-6)")
    assert ok


def test_criterion_07_decomposition_round_trips():
    rng = np.random.default_rng(77)
    clem_err, count_ok = 0.0, True
    for case in range(100):
        n = 2 + case % 5
        u = unitary_group.rvs(n, random_state=rng)
        plan = clements(u)
        count_ok &= len(plan.beamsplitters) == n * (n - 1) // 2
        rebuilt = np.identity(n, dtype=complex)
        for k, theta, phi in plan.beamsplitters:
            step = np.identity(n, dtype=complex)
            step[k:k + 2, k:k + 2] = beamsplitter_mode_matrix(theta, phi)
            rebuilt = step @ rebuilt
        rebuilt = np.diag(np.exp(1j * np.asarray(plan.phases))) @ rebuilt
        clem_err = max(clem_err, np.abs(rebuilt - u).max())

    will_err = 0.0
    for case in range(100):
        n = 1 + case % 3
        nu = 1 + rng.exponential(1.0, n)
        s0 = random_symplectic(rng, n)
        v = s0 @ np.diag(np.concatenate([nu, nu])) @ s0.T
        s, d = williamson(v)
        omega = sympmat(n)
        will_err = max(will_err, np.abs(s @ d @ s.T - v).max(), np.abs(s @ omega @ s.T - omega).max())

    bm_err = 0.0
    for case in range(100):
        n = 1 + case % 4
        s = random_symplectic(rng, n)
        o1, z, o2 = bloch_messiah(s)
        bm_err = max(bm_err, np.abs(o1 @ z @ o2 - s).max())

    comp_err = 0.0
    for case in range(100):
        name = ("Pgate", "S2gate", "CXgate", "CZgate")[case % 4]
        params = (rng.normal(0, 1.0), rng.uniform(0, 2 * np.pi)) if name == "S2gate" else (rng.normal(0, 1.5),)
        n = 1 if name == "Pgate" else 2
        got = primitive_product(compound_gate_decomp(name, params, tuple(range(n))), n)
        comp_err = max(comp_err, np.abs(got - compound_symplectic(name, params)).max())

    ok = count_ok and clem_err <= 1e-10 and will_err <= 1e-9 and bm_err <= 1e-9 and comp_err <= 1e-10
    record_criterion(
        7, "decomposition round-trips", ok,
        f"Clements {clem_err:.1e} (N(N-1)/2 beamsplitters: {count_ok}), Williamson {will_err:.1e}, "
        f"Bloch-Messiah {bm_err:.1e}, compound {comp_err:.1e}",
    )
    assert ok


def test_criterion_08_teleportation():
    exact = algorithms.teleportation(select=(0.0, 0.0)).evaluate()
    sampled = algorithms.teleportation(shots=1000).evaluate()
    alpha = 0.5 + 0.2j
    fids = [algorithms.teleportation_fidelity(alpha, r) for r in (0.5, 1.0, 2.0)]
    monotone = fids[0] < fids[1] < fids[2]
    ok = exact.passed and sampled.passed and monotone
    worst_exact = max(c.error for c in exact.checks)
    record_criterion(
        8, "teleportation", ok,
        f"select error {worst_exact:.1e} (tol 1e-8), sampled within 5 SE: {sampled.passed}, "
        f"fidelities {', '.join(f'{f:.4f}' for f in fids)}",
    )
    assert ok


def test_criterion_09_hamiltonian_simulation():
    start = time.perf_counter()
    e1 = algorithms.trotter_error(k=20)
    e2 = algorithms.trotter_error(k=40)
    elapsed = time.perf_counter() - start
    ratio = e2 / e1
    ok = e1 <= 0.01 and 0.4 <= ratio <= 0.6 and elapsed <= 60
    record_criterion(
        9, "Hamiltonian simulation", ok,
        f"trace distance {e1:.4f} (tol 0.01), ratio e(2k)/e(k) = {ratio:.3f} (range [0.4, 0.6]), {elapsed:.1f} s",
    )
    assert ok


def test_criterion_10_optimization():
    alpha, prob, iterations = algorithms.optimize_alpha(iterations=200)
    ok = abs(alpha - 1) < 0.01 and abs(prob - math.exp(-1)) <= 1e-4 and iterations <= 200
    record_criterion(10, "displacement optimization", ok,
                     f"alpha = {alpha:.6f}, P(1) = {prob:.6f}, {iterations} iterations")
    assert ok


def _round_trip_failures(count=500):
    bad = 0
    for seed in range(count):
        prog = program(NumpySource(seed))
        text = serialize(prog)
        again = parse_text(text)
        if again != prog or serialize(again) != text:
            bad += 1
    return bad


def _cli_bytes(path, *flags):
    cmd = [sys.executable, "-m", "qumode", "run", str(path), *flags]
    return subprocess.run(cmd, capture_output=True, check=True).stdout


def _postselection_errors():
    gates = [
        ("Sgate", (0.3, 0.4), (0,)),
        ("Dgate", (0.2 + 0.1j,), (1,)),
        ("BSgate", (0.7, 0.3), (0, 1)),
        ("Kgate", (0.2,), (1,)),
    ]
    d = 6
    psi = run_ops(2, gates, "fock", cutoff=d).state.data

    # photon counting on mode 0
    want = psi[1, :] / np.linalg.norm(psi[1, :])
    post = run_ops(2, gates + [("MeasureFock", (), (0,), {"select": [1]})], "fock", cutoff=d).state
    err_fock = np.abs(fock.reduced_dm(post, [1]) - np.outer(want, want.conj())).max()

    # homodyne on mode 0
    x = 0.3
    bra = np.array([hermite_function(n, x) for n in range(d)])
    cond = bra @ psi
    cond /= np.linalg.norm(cond)
    post = run_ops(2, gates + [("MeasureHomodyne", (0.0,), (0,), {"select": x})], "fock", cutoff=d).state
    err_hom = np.abs(fock.reduced_dm(post, [1]) - np.outer(cond, cond.conj())).max()

    # Gaussian homodyne: conditional moments by Schur complement
    ggates = gates[:3]
    g = run_ops(2, ggates, "gaussian").state
    post = run_ops(2, ggates + [("MeasureHomodyne", (0.0,), (0,), {"select": x})], "gaussian").state
    keep = [1, 3]
    v = g.cov
    gain = v[np.ix_(keep, [0])] / v[0, 0]
    mean = g.means[keep] + gain[:, 0] * (x - g.means[0])
    cov = v[np.ix_(keep, keep)] - gain @ v[np.ix_([0], keep)]
    err_gauss = max(np.abs(post.means[keep] - mean).max(), np.abs(post.cov[np.ix_(keep, keep)] - cov).max())
    return max(err_fock, err_hom, err_gauss)


def test_criterion_11_language_and_determinism(tmp_path):
    bad = _round_trip_failures()
    path = tmp_path / "prog.xbb"
    path.write_text(
        "modes 3\ncutoff 5\n\nSgate(0.4) | q[0]\nDgate(0.3+0.2j) | q[1]\nBSgate(pi/4, 0.1) | (q[0], q[1])\n"
        "MeasureHomodyne(0) | q[0]\nXgate(q[0]) | q[2]\nMeasureHeterodyne | q[2]\n"
    )
    identical = all(
        _cli_bytes(path, *flags) == _cli_bytes(path, *flags)
        for flags in (["--shots", "5", "--seed", "7"], ["--backend", "fock", "--shots", "3"])
    )
    post_err = _postselection_errors()
    ok = bad == 0 and identical and post_err <= 1e-9
    record_criterion(
        11, "language and engine determinism", ok,
        f"round-trip failures {bad}/500, CLI byte-identical: {identical}, post-selection error {post_err:.1e} (tol 1e-9)",
    )
    assert ok


def test_criterion_12_iqp_commutation():
    gates = algorithms.iqp_draw()
    order = np.random.default_rng(7).permutation(len(gates))
    shuffled = [gates[i] for i in order]
    kets = []
    for draw in (gates, shuffled):
        prog = algorithms.iqp_program(draw, measure=False)
        kets.append(run_program(prog, "fock", cutoff=8).state.data)
    ok = record_criterion(12, "IQP commutation", np.array_equal(kets[0], kets[1]),
                          f"bit-identical kets for {len(gates)} gates in two orders: {np.array_equal(kets[0], kets[1])}")
    assert ok
