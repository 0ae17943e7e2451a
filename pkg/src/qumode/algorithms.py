"""Reference programs with independently computed expectations.

Each factory returns a :class:`ReferenceAlgorithm`: a circuit program, the
backend and options to run it with, and an evaluator that compares the
simulator's output against an oracle that does not go through the simulator
(permanents, hafnians, exact matrix evolution, hand-built covariance algebra
or closed forms).
"""
import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from . import fock, gaussian
from .blackbird.ast import BinOp, Call, Num, Pi, Program, Reg
from .decompositions import clements
from .engine import Engine, make_op
from .linalg import hafnian, permanent

#: seeds for the Haar-random interferometers used by the sampling demos
BOSON_SAMPLING_SEED = 1234
GBS_SEED = 4321
IQP_SEED = 2718


@dataclass
class Check:
    """One observed-versus-expected comparison."""

    label: str
    observed: object
    expected: object
    error: float
    tolerance: float

    @property
    def passed(self):
        return bool(self.error <= self.tolerance)


@dataclass
class AlgorithmReport:
    """Outcome of :meth:`ReferenceAlgorithm.evaluate`."""

    name: str
    checks: list = field(default_factory=list)
    info: dict = field(default_factory=dict)

    @property
    def passed(self):
        return all(c.passed for c in self.checks)

    def lines(self):
        out = [f"{self.name}: {'PASS' if self.passed else 'FAIL'}"]
        for c in self.checks:
            verdict = "ok" if c.passed else "FAIL"
            out.append(
                f"  {c.label}: observed={_fmt(c.observed)} expected={_fmt(c.expected)} "
                f"error={c.error:.3e} tol={c.tolerance:.1e} {verdict}"
            )
        return out


def _fmt(v):
    if isinstance(v, complex):
        return f"{v.real:.6g}{v.imag:+.6g}j"
    if isinstance(v, float):
        return f"{v:.6g}"
    if isinstance(v, (list, tuple)):
        return "(" + ", ".join(_fmt(x) for x in v) + ")"
    return str(v)


@dataclass
class ReferenceAlgorithm:
    """A program paired with an oracle-based evaluator.

    Attributes:
        name (str): example name
        program (Program): the circuit
        params (dict): parameters used to build it
        backend (str): backend it is meant for
        options (dict): run options (cutoff, shots, seed)
        expected (str): what the evaluator compares against
        tolerance (float): main comparison tolerance
        evaluator (callable): ``evaluator(algorithm) -> AlgorithmReport``
    """

    name: str
    program: Program
    params: dict
    backend: str
    options: dict
    expected: str
    tolerance: float
    evaluator: object = None

    def engine(self):
        return Engine.from_program(self.program)

    def run(self, **overrides):
        opts = dict(self.options)
        opts.update(overrides)
        return self.engine().run(self.backend, **opts)

    def evaluate(self):
        return self.evaluator(self)


def _program(n_modes, ops, name=None, cutoff=None):
    return Program(modes=n_modes, cutoff=cutoff, name=name, ops=list(ops))


def haar_unitary(n, seed):
    """Haar-random unitary from the QR decomposition of a complex Gaussian matrix."""
    rng = np.random.default_rng(seed)
    z = (rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))) / math.sqrt(2)
    q, r = np.linalg.qr(z)
    return q * (np.diagonal(r) / np.abs(np.diagonal(r)))


def interferometer_ops(u, modes=None):
    """Beamsplitter and rotation operations realizing the mode matrix ``u``."""
    return [make_op(op.name, op.params, op.modes) for op in clements(u).ops(modes)]


# ---------------------------------------------------------------------------
# state teleportation
# ---------------------------------------------------------------------------

TELEPORT_GAIN = math.sqrt(2)


def teleportation_program(alpha, r, select=None, readout=False):
    """Three-mode teleportation of ``Coherent(alpha)`` from q[0] to q[2].

    Modes 1 and 2 share a two-mode squeezed resource made from two single-mode
    squeezers and a balanced beamsplitter. After a balanced beamsplitter on
    modes 0 and 1, x is measured on q[0] and p on q[1]; the results displace
    q[2] by ``sqrt(2)`` times each outcome.
    """
    sel0 = {} if select is None else {"select": select[0]}
    sel1 = {} if select is None else {"select": select[1]}
    gain = Call("sqrt", (Num(2),))
    ops = [
        make_op("Coherent", (complex(alpha),), (0,)),
        make_op("Squeezed", (-r,), (1,)),
        make_op("Squeezed", (r,), (2,)),
        make_op("BSgate", (BinOp("/", Pi(), Num(4)), 0), (1, 2)),
        make_op("BSgate", (BinOp("/", Pi(), Num(4)), 0), (0, 1)),
        make_op("MeasureHomodyne", (0,), (0,), **sel0),
        make_op("MeasureHomodyne", (BinOp("/", Pi(), Num(2)),), (1,), **sel1),
        make_op("Xgate", (BinOp("*", gain, Reg(0)),), (2,)),
        make_op("Zgate", (BinOp("*", gain, Reg(1)),), (2,)),
    ]
    if readout:
        ops.append(make_op("MeasureHeterodyne", (), (2,)))
    return _program(3, ops, name="teleportation")


def teleportation_oracle(alpha, r, outcomes=(0.0, 0.0), hbar=gaussian.DEFAULT_HBAR):
    """Output moments of mode 2 for given homodyne outcomes.

    Builds the three-mode covariance with explicit matrices and conditions on
    ``x0 = outcomes[0]``, ``p1 = outcomes[1]`` by a Schur complement, then adds
    the feed-forward displacement.

    Returns:
        tuple[array, array]: means (x, p) and 2x2 covariance of mode 2
    """
    h = hbar / 2
    means = np.zeros(6)
    means[0] = math.sqrt(2 * hbar) * complex(alpha).real
    means[3] = math.sqrt(2 * hbar) * complex(alpha).imag
    cov = np.diag([h, h * math.exp(2 * r), h * math.exp(-2 * r), h, h * math.exp(-2 * r), h * math.exp(2 * r)])
    c = s = 1 / math.sqrt(2)

    def bs(i, j):
        m = np.identity(6)
        for off in (0, 3):
            m[i + off, i + off] = c
            m[i + off, j + off] = -s
            m[j + off, i + off] = s
            m[j + off, j + off] = c
        return m

    t = bs(0, 1) @ bs(1, 2)
    means = t @ means
    cov = t @ cov @ t.T
    meas = [0, 4]  # x0, p1
    out = [2, 5]  # x2, p2
    vaa = cov[np.ix_(meas, meas)]
    vba = cov[np.ix_(out, meas)]
    gain = vba @ np.linalg.inv(vaa)
    m = np.asarray(outcomes, dtype=float)
    cond_means = means[out] + gain @ (m - means[meas])
    cond_cov = cov[np.ix_(out, out)] - gain @ vba.T
    return cond_means + TELEPORT_GAIN * m, cond_cov


def teleportation_average_state(alpha, r, hbar=gaussian.DEFAULT_HBAR):
    """Outcome-averaged output of mode 2 computed through the simulator.

    The conditional output mean is affine in the two outcomes, so three
    post-selected runs give its offset and gain; the outcome distribution
    comes from a run without measurements.

    Returns:
        GaussianState: single-mode averaged output
    """
    runs = {}
    for m in [(0.0, 0.0), (1.0, 0.0), (0.0, 1.0)]:
        res = Engine.from_program(teleportation_program(alpha, r, select=m)).run("gaussian", hbar=hbar)
        runs[m] = gaussian.reduced_state(res.state, [2])
    base = runs[(0.0, 0.0)]
    k = np.column_stack([runs[(1.0, 0.0)].means - base.means, runs[(0.0, 1.0)].means - base.means])
    pre = teleportation_program(alpha, r)
    pre.ops = pre.ops[:5]
    st = Engine.from_program(pre).run("gaussian", hbar=hbar).state
    idx = [0, st.n_modes + 1]  # x0, p1
    mu_a = st.means[idx]
    v_aa = st.cov[np.ix_(idx, idx)]
    return gaussian.GaussianState(base.means + k @ mu_a, base.cov + k @ v_aa @ k.T, hbar)


def teleportation_fidelity(alpha, r, hbar=gaussian.DEFAULT_HBAR):
    """Average fidelity of the teleported state with the input coherent state."""
    return gaussian.fidelity_coherent(teleportation_average_state(alpha, r, hbar), [alpha])


def teleportation(alpha=0.5 + 0.2j, r=2.0, select=None, shots=1000, seed=42):
    """Coherent-state teleportation.

    With ``select`` both homodyne outcomes are fixed and mode 2's moments are
    compared with :func:`teleportation_oracle` to 1e-8. Without it the program
    ends with a heterodyne readout of mode 2; the sample mean over ``shots``
    must match ``alpha`` within five standard errors.
    """
    alpha = complex(alpha)
    if select is not None:
        select = tuple(float(v) for v in np.atleast_1d(select))
        if len(select) != 2:
            raise ValueError("teleportation select needs two outcomes")
    prog = teleportation_program(alpha, r, select, readout=select is None)
    options = {"shots": 1, "seed": seed} if select is not None else {"shots": shots, "seed": seed}

    def evaluate(alg):
        rep = AlgorithmReport(alg.name, info={"alpha": alpha, "r": r})
        if select is not None:
            res = alg.run()
            out = gaussian.reduced_state(res.state, [2])
            mu, cov = teleportation_oracle(alpha, r, select)
            rep.checks.append(Check("mode 2 means", tuple(out.means), tuple(mu), float(np.max(np.abs(out.means - mu))), 1e-8))
            rep.checks.append(Check("mode 2 covariance", float(out.cov[0, 0]), float(cov[0, 0]),
                                    float(np.max(np.abs(out.cov - cov))), 1e-8))
        else:
            res = alg.run()
            samples = np.array(res.samples[2], dtype=complex)
            mean = samples.mean()
            se_re = samples.real.std(ddof=1) / math.sqrt(len(samples))
            se_im = samples.imag.std(ddof=1) / math.sqrt(len(samples))
            rep.checks.append(Check("Re alpha (standard errors)", mean.real, alpha.real,
                                    abs(mean.real - alpha.real) / se_re, 5.0))
            rep.checks.append(Check("Im alpha (standard errors)", mean.imag, alpha.imag,
                                    abs(mean.imag - alpha.imag) / se_im, 5.0))
        return rep

    return ReferenceAlgorithm(
        "teleportation",
        prog,
        {"alpha": alpha, "r": r, "select": select},
        "gaussian",
        options,
        "conditional-Gaussian oracle (select) or input coherent amplitude (sampled)",
        1e-8 if select is not None else 5.0,
        evaluate,
    )


# ---------------------------------------------------------------------------
# gate teleportation
# ---------------------------------------------------------------------------


def _input_moments(alpha, r_in, phi_in, hbar):
    c, s = math.cosh(r_in), math.sinh(r_in)
    sq = np.array([[c - s * math.cos(phi_in), -s * math.sin(phi_in)], [-s * math.sin(phi_in), c + s * math.cos(phi_in)]])
    means = math.sqrt(2 * hbar) * np.array([complex(alpha).real, complex(alpha).imag])
    return means, hbar / 2 * sq @ sq.T


def gate_teleportation_program(s, r=2.0, alpha=0.4 + 0.3j, r_in=0.3, phi_in=0.4, select=0.0):
    """Local teleportation of a quadratic phase gate.

    The input on q[0] is coupled by ``CZgate(1)`` to a momentum-squeezed
    ancilla on q[1]; ``Pgate(s)`` is applied to q[0] (it commutes with the
    coupling) and p is measured on q[0]. For outcome m the ancilla carries
    ``X(m) F P(s)`` applied to the input.
    """
    sel = {} if select is None else {"select": select}
    ops = [
        make_op("Squeezed", (r_in, phi_in), (0,)),
        make_op("Dgate", (complex(alpha),), (0,)),
        make_op("Squeezed", (-r,), (1,)),
        make_op("CZgate", (1,), (0, 1)),
        make_op("Pgate", (s,), (0,)),
        make_op("MeasureHomodyne", (BinOp("/", Pi(), Num(2)),), (0,), **sel),
    ]
    return _program(2, ops, name="gate-teleportation")


def gate_teleportation_oracle(s, alpha=0.4 + 0.3j, r_in=0.3, phi_in=0.4, hbar=gaussian.DEFAULT_HBAR):
    """Moments of ``F P(s)`` applied directly to the input, from explicit matrices."""
    means, cov = _input_moments(alpha, r_in, phi_in, hbar)
    m = np.array([[0.0, -1.0], [1.0, 0.0]]) @ np.array([[1.0, 0.0], [s, 1.0]])
    return m @ means, m @ cov @ m.T


def gate_teleportation_fidelity(s, r=2.0, alpha=0.4 + 0.3j, r_in=0.3, phi_in=0.4, hbar=gaussian.DEFAULT_HBAR):
    """Fidelity of the select=0 output with the directly transformed input."""
    prog = gate_teleportation_program(s, r, alpha, r_in, phi_in, 0.0)
    res = Engine.from_program(prog).run("gaussian", hbar=hbar)
    out = gaussian.reduced_state(res.state, [1])
    mu, cov = gate_teleportation_oracle(s, alpha, r_in, phi_in, hbar)
    return gaussian.gaussian_overlap(out, mu, cov)


def gate_teleportation(s=0.5, r=2.0, alpha=0.4 + 0.3j, r_in=0.3, phi_in=0.4):
    """Gate teleportation of ``Pgate(s)`` with a select=0 homodyne outcome.

    The output must have fidelity at least 0.99 with ``F P(s)`` applied
    directly to the input, and the fidelity must grow with the ancilla
    squeezing over r = 0.5, 1, 2.
    """
    prog = gate_teleportation_program(s, r, alpha, r_in, phi_in, 0.0)

    def evaluate(alg):
        rep = AlgorithmReport(alg.name, info={"s": s, "r": r})
        fid = gate_teleportation_fidelity(s, r, alpha, r_in, phi_in)
        rep.checks.append(Check("fidelity with F P(s)|psi>", fid, 1.0, 1 - fid, 0.01))
        ladder = [gate_teleportation_fidelity(s, rr, alpha, r_in, phi_in) for rr in (0.5, 1.0, 2.0)]
        steps = float(max(0.0, -min(np.diff(ladder))))
        rep.checks.append(Check("fidelity increasing over r=0.5,1,2", tuple(ladder), "increasing", steps, 0.0))
        rep.info["fidelities"] = ladder
        return rep

    return ReferenceAlgorithm(
        "gate-teleportation",
        prog,
        {"s": s, "r": r, "alpha": alpha},
        "gaussian",
        {"shots": 1},
        "Fourier times quadratic phase applied directly to the input",
        0.01,
        evaluate,
    )


# ---------------------------------------------------------------------------
# boson sampling
# ---------------------------------------------------------------------------


def boson_sampling_probability(u, inputs, outputs):
    """``|Per(U_st)|^2 / (prod m_i! prod n_j!)`` with rows repeated by output and columns by input."""
    if sum(inputs) != sum(outputs):
        return 0.0
    rows = [j for j, n in enumerate(outputs) for _ in range(n)]
    cols = [i for i, m in enumerate(inputs) for _ in range(m)]
    if not rows:
        return 1.0
    sub = np.asarray(u)[np.ix_(rows, cols)]
    norm = np.prod([math.factorial(v) for v in list(inputs) + list(outputs)])
    return float(abs(permanent(sub)) ** 2 / norm)


def photon_patterns(n_modes, total, cutoff=None):
    """All patterns over ``n_modes`` with ``total`` photons, each below ``cutoff``."""
    cap = total + 1 if cutoff is None else min(total + 1, cutoff)
    return [p for p in itertools.product(range(cap), repeat=n_modes) if sum(p) == total]


def boson_sampling_program(u, inputs):
    ops = [make_op("Fock", (int(n),), (k,)) for k, n in enumerate(inputs)]
    ops += interferometer_ops(u)
    return _program(len(inputs), ops, name="boson-sampling")


def boson_sampling(n_modes=4, inputs=None, unitary=None, seed=BOSON_SAMPLING_SEED, cutoff=None, tol=1e-6):
    """Fock inputs through a beamsplitter mesh, compared with the permanent formula.

    Args:
        n_modes (int): number of modes
        inputs (Sequence[int]): photons per input mode (default one photon in
            every mode but the last)
        unitary (array): interferometer mode matrix; Haar-random from ``seed``
            when omitted
        cutoff (int): Fock cutoff, default total photons + 3
    """
    inputs = tuple(int(v) for v in (inputs if inputs is not None else [1] * (n_modes - 1) + [0]))
    if len(inputs) != n_modes:
        raise ValueError(f"input pattern needs {n_modes} entries")
    total = sum(inputs)
    cutoff = cutoff or total + 3
    if total > cutoff - 2:
        raise ValueError(f"{total} photons need a cutoff of at least {total + 2}, got {cutoff}")
    u = haar_unitary(n_modes, seed) if unitary is None else np.asarray(unitary, dtype=complex)
    prog = boson_sampling_program(u, inputs)

    def evaluate(alg):
        res = alg.run()
        probs = fock.all_fock_probs(res.state)
        rep = AlgorithmReport(alg.name, info={"inputs": inputs, "cutoff": cutoff})
        worst, rows = 0.0, []
        for pattern in photon_patterns(n_modes, total, cutoff):
            want = boson_sampling_probability(u, inputs, pattern)
            got = float(probs[pattern])
            rows.append((pattern, got, want))
            worst = max(worst, abs(got - want))
        rep.info["table"] = rows
        rep.info["columns"] = ("pattern", "observed", "expected")
        rep.checks.append(Check("max |P - |Per|^2/norm|", worst, 0.0, worst, tol))
        mass = sum(r[1] for r in rows)
        rep.checks.append(Check("probability mass in the photon sector", mass, 1 - res.leakage,
                                abs(mass - (1 - res.leakage)), 1e-6))
        return rep

    return ReferenceAlgorithm(
        "boson-sampling",
        prog,
        {"n_modes": n_modes, "inputs": inputs, "seed": seed, "unitary": u},
        "fock",
        {"cutoff": cutoff},
        "permanent formula",
        tol,
        evaluate,
    )


# ---------------------------------------------------------------------------
# Gaussian boson sampling
# ---------------------------------------------------------------------------


def gbs_probability(u, r, pattern):
    """``|Haf[(U diag(tanh r) U^T)_S]|^2 / prod cosh r`` for a 0/1 pattern."""
    pattern = tuple(int(v) for v in pattern)
    if any(v not in (0, 1) for v in pattern):
        raise ValueError("the hafnian formula covers 0/1 patterns only")
    r = np.asarray(r, dtype=float)
    b = np.asarray(u) @ np.diag(np.tanh(r)) @ np.asarray(u).T
    s = [i for i, v in enumerate(pattern) if v]
    if len(s) % 2:
        return 0.0
    h = hafnian(b[np.ix_(s, s)]) if s else 1.0
    return float(abs(h) ** 2 / np.prod(np.cosh(r)))


def gbs_program(u, r):
    ops = [make_op("Sgate", (float(v),), (k,)) for k, v in enumerate(r)]
    ops += interferometer_ops(u)
    return _program(len(r), ops, name="gaussian-boson-sampling")


def gaussian_boson_sampling(n_modes=4, r=None, unitary=None, seed=GBS_SEED, cutoff=10, tol=1e-6):
    """Squeezed inputs through an interferometer, compared with the hafnian formula.

    Both backends are checked: the Fock backend's photon-number distribution
    and the Gaussian backend's ``fock_prob``.
    """
    r = [0.3] * n_modes if r is None else [float(v) for v in r]
    if len(r) != n_modes:
        raise ValueError(f"need {n_modes} squeezing values")
    u = haar_unitary(n_modes, seed) if unitary is None else np.asarray(unitary, dtype=complex)
    prog = gbs_program(u, r)

    def evaluate(alg):
        eng = alg.engine()
        fstate = eng.run("fock", cutoff=cutoff).state
        gstate = Engine.from_program(alg.program).run("gaussian").state
        probs = fock.all_fock_probs(fstate)
        rep = AlgorithmReport(alg.name, info={"r": r})
        worst_f = worst_g = 0.0
        rows = []
        for pattern in itertools.product((0, 1), repeat=n_modes):
            want = gbs_probability(u, r, pattern)
            pf = float(probs[pattern])
            pg = float(gaussian.fock_prob(gstate, pattern))
            rows.append((pattern, pf, pg, want))
            worst_f = max(worst_f, abs(pf - want))
            worst_g = max(worst_g, abs(pg - want))
        rep.info["table"] = rows
        rep.info["columns"] = ("pattern", "fock", "gaussian", "hafnian")
        rep.checks.append(Check("fock backend vs hafnian", worst_f, 0.0, worst_f, tol))
        rep.checks.append(Check("gaussian backend vs hafnian", worst_g, 0.0, worst_g, tol))
        return rep

    return ReferenceAlgorithm(
        "gaussian-boson-sampling",
        prog,
        {"n_modes": n_modes, "r": r, "seed": seed, "unitary": u},
        "fock",
        {"cutoff": cutoff},
        "hafnian formula",
        tol,
        evaluate,
    )


# ---------------------------------------------------------------------------
# CV-IQP
# ---------------------------------------------------------------------------


def iqp_draw(n_modes=4, n_gates=12, seed=IQP_SEED, p_scale=1.0, s_scale=1.0, gamma_scale=0.2):
    """Random gates diagonal in x: ``Zgate(p)``, ``CZgate(s)``, ``Vgate(gamma)``.

    Returns:
        list[tuple]: ``(name, params, modes)`` in drawn order
    """
    rng = np.random.default_rng(seed)
    gates = []
    for _ in range(n_gates):
        kind = rng.integers(3) if n_modes > 1 else rng.choice([0, 2])
        if kind == 0:
            gates.append(("Zgate", (float(p_scale * rng.uniform(-1, 1)),), (int(rng.integers(n_modes)),)))
        elif kind == 1:
            a, b = rng.choice(n_modes, size=2, replace=False)
            gates.append(("CZgate", (float(s_scale * rng.uniform(-1, 1)),), (int(a), int(b))))
        else:
            gates.append(("Vgate", (float(gamma_scale * rng.uniform(-1, 1)),), (int(rng.integers(n_modes)),)))
    return gates


def iqp_program(gates, n_modes=4, r=-0.5, measure=True, drop_identity=False):
    """Momentum-squeezed inputs, the x-diagonal gates in the given order, then p homodyne on every mode."""
    ops = [make_op("Sgate", (r,), (k,)) for k in range(n_modes)]
    for name, params, modes in gates:
        if drop_identity and all(p == 0 for p in params):
            continue
        ops.append(make_op(name, params, modes))
    if measure:
        ops += [make_op("MeasureHomodyne", (BinOp("/", Pi(), Num(2)),), (k,)) for k in range(n_modes)]
    return _program(n_modes, ops, name="iqp")


def iqp(n_modes=4, r=-0.5, n_gates=12, seed=IQP_SEED, order_seed=7, cutoff=8):
    """CV-IQP circuit; checks that reordering the diagonal gates changes nothing.

    The evaluator runs the circuit without the final measurements in the drawn
    order and in a shuffled order and requires bit-identical kets.
    """
    gates = iqp_draw(n_modes, n_gates, seed)
    prog = iqp_program(gates, n_modes, r)

    def evaluate(alg):
        shuffled = [gates[i] for i in np.random.default_rng(order_seed).permutation(len(gates))]
        kets = []
        for order in (gates, shuffled):
            res = Engine.from_program(iqp_program(order, n_modes, r, measure=False)).run("fock", cutoff=cutoff)
            kets.append(fock.ket(res.state))
        diff = float(np.max(np.abs(kets[0] - kets[1])))
        rep = AlgorithmReport(alg.name, info={"gates": gates, "shuffled": shuffled})
        rep.checks.append(Check("max |ket difference| between orderings", diff, 0.0, diff, 0.0))
        rep.checks.append(Check("bit-identical kets", bool(np.array_equal(kets[0], kets[1])), True,
                                0.0 if np.array_equal(kets[0], kets[1]) else 1.0, 0.0))
        return rep

    return ReferenceAlgorithm(
        "iqp",
        prog,
        {"n_modes": n_modes, "r": r, "n_gates": n_gates, "seed": seed, "gates": gates},
        "fock",
        {"cutoff": cutoff},
        "commutation of x-diagonal gates",
        0.0,
        evaluate,
    )


# ---------------------------------------------------------------------------
# Hamiltonian simulation
# ---------------------------------------------------------------------------


def bose_hubbard_program(J=1.0, U=1.5, k=20, t=1.086, inputs=(1, 1)):
    """Trotterized two-site Bose-Hubbard evolution: k rounds of BS, then Kerr and rotation on each site."""
    theta = -J * t / k
    r = -U * t / (2 * k)
    ops = [make_op("Fock", (int(n),), (m,)) for m, n in enumerate(inputs)]
    for _ in range(k):
        ops.append(make_op("BSgate", (theta, BinOp("/", Pi(), Num(2))), (0, 1)))
        for m in (0, 1):
            ops.append(make_op("Kgate", (r,), (m,)))
            ops.append(make_op("Rgate", (-r,), (m,)))
    return _program(2, ops, name="hamiltonian-simulation")


def bose_hubbard_exact(J, U, t, inputs, cutoff):
    """``exp(-iHt)|inputs>`` for the two-site Bose-Hubbard Hamiltonian on the truncated space.

    ``H = J (a1^dag a2 + a2^dag a1) + U/2 sum_i n_i (n_i - 1)``, evolved by
    diagonalizing the Hermitian matrix.
    """
    d = cutoff
    a = np.diag(np.sqrt(np.arange(1, d)), 1)
    eye = np.identity(d)
    a1, a2 = np.kron(a, eye), np.kron(eye, a)
    n1, n2 = a1.conj().T @ a1, a2.conj().T @ a2
    h = J * (a1.conj().T @ a2 + a2.conj().T @ a1) + U / 2 * (n1 @ n1 - n1 + n2 @ n2 - n2)
    w, v = np.linalg.eigh(h)
    psi0 = np.zeros(d * d, dtype=complex)
    psi0[inputs[0] * d + inputs[1]] = 1
    return (v @ (np.exp(-1j * w * t) * (v.conj().T @ psi0))).reshape(d, d)


def trace_distance_pure(psi, phi):
    psi, phi = np.ravel(psi), np.ravel(phi)
    psi = psi / np.linalg.norm(psi)
    phi = phi / np.linalg.norm(phi)
    return float(math.sqrt(max(0.0, 1 - abs(np.vdot(psi, phi)) ** 2)))


def trotter_error(J=1.0, U=1.5, k=20, t=1.086, inputs=(1, 1), cutoff=6):
    """Trace distance between the Trotterized circuit output and exact evolution."""
    res = Engine.from_program(bose_hubbard_program(J, U, k, t, inputs)).run("fock", cutoff=cutoff)
    return trace_distance_pure(fock.ket(res.state), bose_hubbard_exact(J, U, t, inputs, cutoff))


def hamiltonian_simulation(J=1.0, U=1.5, k=20, t=1.086, inputs=(1, 1), cutoff=6):
    """Bose-Hubbard simulation: error at most 0.01, and halving when k doubles."""
    prog = bose_hubbard_program(J, U, k, t, inputs)

    def evaluate(alg):
        e1 = trotter_error(J, U, k, t, inputs, cutoff)
        e2 = trotter_error(J, U, 2 * k, t, inputs, cutoff)
        ratio = e2 / e1 if e1 > 0 else 0.0
        rep = AlgorithmReport(alg.name, info={"error_k": e1, "error_2k": e2})
        rep.checks.append(Check("trace distance to exact evolution", e1, 0.0, e1, 0.01))
        # first-order Trotter error halves when k doubles: 0.5 within 20%
        dev = max(0.0, 0.4 - ratio, ratio - 0.6)
        rep.checks.append(Check("error ratio for doubled k", ratio, 0.5, dev, 0.0))
        return rep

    return ReferenceAlgorithm(
        "hamiltonian-simulation",
        prog,
        {"J": J, "U": U, "k": k, "t": t, "inputs": tuple(inputs)},
        "fock",
        {"cutoff": cutoff},
        "exact evolution of the truncated Hamiltonian",
        0.01,
        evaluate,
    )


# ---------------------------------------------------------------------------
# circuit-parameter optimization
# ---------------------------------------------------------------------------


def displacement_program(alpha):
    return _program(1, [make_op("Dgate", (float(alpha),), (0,))], name="optimize-displacement")


def displacement_objective(alpha, cutoff=10):
    """Probability of one photon after ``Dgate(alpha)`` on vacuum, from the Fock backend."""
    res = Engine.from_program(displacement_program(alpha)).run("fock", cutoff=cutoff)
    return float(fock.fock_prob(res.state, (1,)))


def optimize_alpha(alpha0=0.1, cutoff=10, iterations=200, step=0.5, h=1e-4, tol=1e-10):
    """Gradient ascent on the displacement with central finite differences.

    Returns:
        tuple[float, float, int]: optimal alpha, objective there, iterations used
    """
    if step <= 0:
        raise ValueError(f"step must be positive, got {step}")
    alpha = float(alpha0)
    used = 0
    for used in range(1, iterations + 1):
        grad = (displacement_objective(alpha + h, cutoff) - displacement_objective(alpha - h, cutoff)) / (2 * h)
        alpha += step * grad
        if abs(step * grad) < tol:
            break
    return alpha, displacement_objective(alpha, cutoff), used


def optimize_displacement(cutoff=10, iterations=200, step=0.5, alpha0=0.1):
    """Maximizes P(n=1) over a real displacement; the optimum is alpha = 1, P = 1/e."""
    if step <= 0:
        raise ValueError(f"step must be positive, got {step}")

    def evaluate(alg):
        alpha, value, used = optimize_alpha(alpha0, cutoff, iterations, step)
        grid = np.linspace(0.0, 2.0, 201)
        scan = [displacement_objective(a, cutoff) for a in grid]
        best = float(grid[int(np.argmax(scan))])
        rep = AlgorithmReport(alg.name, info={"alpha": alpha, "iterations": used, "grid_best": best})
        rep.checks.append(Check("alpha", alpha, 1.0, abs(alpha - 1), 0.01))
        rep.checks.append(Check("P(n=1)", value, math.exp(-1), abs(value - math.exp(-1)), 1e-4))
        rep.checks.append(Check("grid-scan optimum", best, alpha, abs(best - alpha), 0.01))
        return rep

    return ReferenceAlgorithm(
        "optimize-displacement",
        displacement_program(alpha0),
        {"cutoff": cutoff, "iterations": iterations, "step": step, "alpha0": alpha0},
        "fock",
        {"cutoff": cutoff},
        "analytic optimum alpha = 1, P = exp(-1)",
        1e-4,
        evaluate,
    )


#: CLI example names
EXAMPLES = {
    "teleportation": teleportation,
    "gate-teleportation": gate_teleportation,
    "boson-sampling": boson_sampling,
    "gaussian-boson-sampling": gaussian_boson_sampling,
    "iqp": iqp,
    "hamiltonian-simulation": hamiltonian_simulation,
    "optimize-displacement": optimize_displacement,
}
