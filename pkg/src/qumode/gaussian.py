"""Gaussian backend: states as mean vectors and covariance matrices.

Gates act through their Heisenberg symplectic matrices, ``means <- S means + d``
and ``cov <- S cov S^T``. Quadratures are ordered ``(x_1..x_N, p_1..p_N)`` and
scaled so that vacuum has covariance ``(hbar/2) I``.
"""
import math
from dataclasses import dataclass, field

import numpy as np

from .linalg import (
    DEFAULT_HBAR,
    MatrixError,
    is_symplectic,
    is_valid_covariance,
    loop_hafnian,
    sympmat,
)

#: relative density below which a ``select`` value is treated as impossible
SELECT_DENSITY_FLOOR = 1e-12
#: largest photon total accepted by :func:`fock_prob`
FOCK_PROB_PHOTON_LIMIT = 12

GAUSSIAN_GATES = (
    "Dgate",
    "Xgate",
    "Zgate",
    "Rgate",
    "Fouriergate",
    "Sgate",
    "Pgate",
    "BSgate",
    "S2gate",
    "CXgate",
    "CZgate",
)
GAUSSIAN_PREPARATIONS = ("Vacuum", "Coherent", "Squeezed", "DisplacedSqueezed", "Thermal", "Gaussian")


class GaussianError(ValueError):
    """Raised for invalid Gaussian states, operations or measurement outcomes."""


@dataclass
class GaussianState:
    """Mean vector and covariance matrix of an N-mode Gaussian state.

    Attributes:
        means (array): real vector of length 2N
        cov (array): real symmetric 2N x 2N matrix
        hbar (float): convention for :math:`[\\hat x, \\hat p] = i\\hbar`
    """

    means: np.ndarray
    cov: np.ndarray
    hbar: float = DEFAULT_HBAR

    @property
    def n_modes(self):
        return self.means.shape[0] // 2

    def copy(self):
        return GaussianState(self.means.copy(), self.cov.copy(), self.hbar)

    def is_pure(self, tol=1e-9):
        """Whether ``det V = (hbar/2)^{2N}`` within a relative tolerance."""
        sign, logdet = np.linalg.slogdet(self.cov / (self.hbar / 2))
        return sign > 0 and abs(logdet) < tol * max(1, self.n_modes)

    def quad_indices(self, modes):
        """Positions of the x then p quadratures of ``modes`` in the phase-space vector."""
        modes = list(modes)
        return modes + [m + self.n_modes for m in modes]


@dataclass
class SymplecticOp:
    """Affine phase-space map restricted to a set of modes.

    Attributes:
        s (array): 2k x 2k symplectic matrix in xxpp order of the acted modes
        d (array): displacement of length 2k
        modes (tuple[int]): the k modes acted on, in order
    """

    s: np.ndarray
    d: np.ndarray
    modes: tuple = field(default_factory=tuple)


def _check_mode(state, mode):
    if not 0 <= mode < state.n_modes:
        raise GaussianError(f"mode {mode} out of range for a {state.n_modes}-mode state")


def vacuum_state(n_modes, hbar=DEFAULT_HBAR):
    """N-mode vacuum: zero means and covariance ``(hbar/2) I``."""
    if n_modes < 1:
        raise GaussianError("a Gaussian state needs at least one mode")
    if hbar <= 0:
        raise GaussianError("hbar must be positive")
    return GaussianState(np.zeros(2 * n_modes), hbar / 2 * np.identity(2 * n_modes), hbar)


# ---------------------------------------------------------------------------
# single-mode building blocks
# ---------------------------------------------------------------------------


def rotation_matrix(theta):
    """Symplectic of ``R(theta) = exp(i theta n)``: rotates (x, p) by theta."""
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, -s], [s, c]])


def squeezing_matrix(r, phi=0.0):
    """Symplectic of ``S(r e^{i phi})``; ``phi = 0`` squeezes x by ``e^{-r}``."""
    ch, sh = math.cosh(r), math.sinh(r)
    c, s = math.cos(phi), math.sin(phi)
    return np.array([[ch - sh * c, -sh * s], [-sh * s, ch + sh * c]])


def passive_symplectic(u):
    """Real 2N x 2N symplectic of the passive map ``a -> U a``."""
    u = np.asarray(u, dtype=complex)
    return np.block([[u.real, -u.imag], [u.imag, u.real]])


def beamsplitter_unitary(theta, phi):
    """Mode matrix of ``BSgate(theta, phi)``: ``t = cos(theta)``, ``r = e^{i phi} sin(theta)``."""
    t = math.cos(theta)
    r = np.exp(1j * phi) * math.sin(theta)
    return np.array([[t, -np.conj(r)], [r, t]])


def displacement_vector(alpha, hbar=DEFAULT_HBAR):
    """Phase-space displacement of ``D(alpha)``: ``sqrt(2 hbar) (Re alpha, Im alpha)``."""
    alpha = complex(alpha)
    return math.sqrt(2 * hbar) * np.array([alpha.real, alpha.imag])


def gate_symplectic(name, params=(), hbar=DEFAULT_HBAR):
    """Heisenberg action of a Gaussian gate on the quadratures of its modes.

    Args:
        name (str): gate name, one of :data:`GAUSSIAN_GATES`
        params (Sequence): gate parameters as they appear in the circuit language
        hbar (float): convention for :math:`\\hbar`

    Returns:
        SymplecticOp: the local map; ``modes`` is ``(0,)`` or ``(0, 1)`` and is
        rebound by the caller
    """
    p = [complex(v) if isinstance(v, complex) else float(v) for v in params]
    for v in p:
        if not np.isfinite(v):
            raise GaussianError(f"{name} parameter {v} is not finite")
    one = np.identity(2)
    if name == "Dgate":
        return SymplecticOp(one, displacement_vector(p[0], hbar), (0,))
    if name == "Xgate":
        return SymplecticOp(one, np.array([p[0], 0.0]), (0,))
    if name == "Zgate":
        return SymplecticOp(one, np.array([0.0, p[0]]), (0,))
    if name == "Rgate":
        return SymplecticOp(rotation_matrix(p[0]), np.zeros(2), (0,))
    if name == "Fouriergate":
        return SymplecticOp(rotation_matrix(math.pi / 2), np.zeros(2), (0,))
    if name == "Sgate":
        return SymplecticOp(squeezing_matrix(p[0], p[1] if len(p) > 1 else 0.0), np.zeros(2), (0,))
    if name == "Pgate":
        return SymplecticOp(np.array([[1.0, 0.0], [p[0], 1.0]]), np.zeros(2), (0,))
    two = (0, 1)
    if name == "BSgate":
        return SymplecticOp(passive_symplectic(beamsplitter_unitary(p[0], p[1])), np.zeros(4), two)
    if name == "S2gate":
        r, phi = p[0], p[1] if len(p) > 1 else 0.0
        ch, sh = math.cosh(r), math.sinh(r)
        # a1 -> ch a1 - e^{i phi} sh a2^dag, a2 -> ch a2 - e^{i phi} sh a1^dag
        a = ch * np.identity(2)
        b = -np.exp(1j * phi) * sh * np.array([[0, 1], [1, 0]])
        return SymplecticOp(_bogoliubov_symplectic(a, b), np.zeros(4), two)
    if name == "CXgate":
        s = np.identity(4)
        s[1, 0] = p[0]  # x2 += s x1
        s[2, 3] = -p[0]  # p1 -= s p2
        return SymplecticOp(s, np.zeros(4), two)
    if name == "CZgate":
        s = np.identity(4)
        s[2, 1] = p[0]  # p1 += s x2
        s[3, 0] = p[0]  # p2 += s x1
        return SymplecticOp(s, np.zeros(4), two)
    raise GaussianError(f"{name} is not a Gaussian gate")


def _bogoliubov_symplectic(a, b):
    """Real symplectic of ``a_out = A a + B a^dag``."""
    return np.block([[(a + b).real, -(a - b).imag], [(a + b).imag, (a - b).real]])


def embed_symplectic(op, n_modes):
    """Expands a local :class:`SymplecticOp` to the full 2N-dimensional phase space."""
    k = len(op.modes)
    idx = list(op.modes) + [m + n_modes for m in op.modes]
    s = np.identity(2 * n_modes)
    s[np.ix_(idx, idx)] = op.s
    d = np.zeros(2 * n_modes)
    d[idx] = op.d
    if op.s.shape != (2 * k, 2 * k):
        raise GaussianError("symplectic size does not match the number of modes")
    return s, d


def apply_symplectic(state, op, tol=1e-10):
    """Applies an affine symplectic map to a state.

    Args:
        state (GaussianState): input state, left unchanged
        op (SymplecticOp): map with ``modes`` bound to state positions
        tol (float): symplecticity tolerance

    Returns:
        GaussianState: ``(S means + d, S cov S^T)``
    """
    for m in op.modes:
        _check_mode(state, m)
    if len(set(op.modes)) != len(op.modes):
        raise GaussianError("a gate cannot act twice on the same mode")
    if not is_symplectic(op.s, tol):
        raise GaussianError("operation matrix is not symplectic")
    idx = state.quad_indices(op.modes)
    means = state.means.copy()
    cov = state.cov.copy()
    # only the rows/columns of the acted quadratures change
    means[idx] = op.s @ means[idx] + op.d
    cov[idx, :] = op.s @ cov[idx, :]
    cov[:, idx] = cov[:, idx] @ op.s.T
    return GaussianState(means, (cov + cov.T) / 2, state.hbar)


def apply_gate(state, name, params, modes):
    """Convenience wrapper: :func:`gate_symplectic` bound to ``modes`` then applied."""
    op = gate_symplectic(name, params, state.hbar)
    op.modes = tuple(modes)
    if len(op.modes) * 2 != op.s.shape[0]:
        raise GaussianError(f"{name} acts on {op.s.shape[0] // 2} modes, got {len(op.modes)}")
    return apply_symplectic(state, op)


# ---------------------------------------------------------------------------
# preparations
# ---------------------------------------------------------------------------


def single_mode_moments(name, params, hbar=DEFAULT_HBAR):
    """Means and covariance of a single-mode Gaussian preparation.

    Args:
        name (str): ``Vacuum``, ``Coherent``, ``Squeezed``, ``DisplacedSqueezed``,
            ``Thermal`` or ``Gaussian`` (params ``(cov, means)``)
        params (Sequence): preparation parameters
        hbar (float): convention for :math:`\\hbar`

    Returns:
        tuple[array, array]: means of length 2 and 2x2 covariance
    """
    vac = hbar / 2 * np.identity(2)
    if name == "Vacuum":
        return np.zeros(2), vac
    if name == "Coherent":
        return displacement_vector(params[0], hbar), vac
    if name == "Squeezed":
        s = squeezing_matrix(float(params[0]), float(params[1]) if len(params) > 1 else 0.0)
        return np.zeros(2), s @ vac @ s.T
    if name == "DisplacedSqueezed":
        s = squeezing_matrix(float(params[1]), float(params[2]) if len(params) > 2 else 0.0)
        return displacement_vector(params[0], hbar), s @ vac @ s.T
    if name == "Thermal":
        nbar = float(params[0])
        if nbar < 0:
            raise GaussianError(f"thermal mean photon number must be non-negative, got {nbar}")
        return np.zeros(2), (2 * nbar + 1) * vac
    if name == "Gaussian":
        cov = np.asarray(params[0], dtype=float)
        means = np.zeros(2) if len(params) < 2 else np.asarray(params[1], dtype=float)
        if cov.shape != (2, 2):
            raise GaussianError("single-mode Gaussian preparation needs a 2x2 covariance")
        ok, msg = is_valid_covariance(cov, hbar)
        if not ok:
            raise GaussianError(f"invalid covariance: {msg}")
        return means, cov
    raise GaussianError(f"{name} is not a Gaussian preparation")


def prepare_mode(state, mode, name, params=()):
    """Replaces one mode by a freshly prepared state, discarding its correlations."""
    _check_mode(state, mode)
    mu, v = single_mode_moments(name, params, state.hbar)
    return _replace_mode(state, mode, mu, v)


def _replace_mode(state, mode, mu, v):
    idx = state.quad_indices([mode])
    means = state.means.copy()
    cov = state.cov.copy()
    cov[idx, :] = 0
    cov[:, idx] = 0
    cov[np.ix_(idx, idx)] = v
    means[idx] = mu
    return GaussianState(means, cov, state.hbar)


def reset_mode(state, mode):
    """Sets one mode to vacuum and removes its correlations."""
    return prepare_mode(state, mode, "Vacuum")


# ---------------------------------------------------------------------------
# measurements
# ---------------------------------------------------------------------------


def _split(state, mode):
    idx = state.quad_indices([mode])
    rest = [i for i in range(2 * state.n_modes) if i not in idx]
    v = state.cov
    return idx, rest, v[np.ix_(rest, rest)], v[np.ix_(rest, idx)], v[np.ix_(idx, idx)]


def _select_guard(value, mean, var, what):
    if not np.isfinite(value):
        raise GaussianError(f"{what} select value {value} is not finite")
    if var <= 0:
        if abs(value - mean) > 1e-9:
            raise GaussianError(f"{what} outcome {value} has zero probability")
        return
    if math.exp(-((value - mean) ** 2) / (2 * var)) < SELECT_DENSITY_FLOOR:
        raise GaussianError(f"{what} outcome {value} has negligible probability density")


def measure_homodyne(state, mode, phi=0.0, rng=None, select=None):
    """Homodyne measurement of ``x cos(phi) + p sin(phi)`` on one mode.

    The other modes are conditioned on the outcome and the measured mode is
    reset to vacuum.

    Args:
        state (GaussianState): input state
        mode (int): measured mode
        phi (float): quadrature angle
        rng (numpy.random.Generator): random source for sampling
        select (float): post-selected outcome, bypassing sampling

    Returns:
        tuple[float, GaussianState]: outcome and conditional state
    """
    _check_mode(state, mode)
    if phi:
        state = apply_symplectic(state, SymplecticOp(rotation_matrix(-phi), np.zeros(2), (mode,)))
    idx, rest, a, b, c = _split(state, mode)
    mu_x, var = state.means[idx[0]], c[0, 0]
    if select is None:
        if rng is None:
            raise GaussianError("sampling a homodyne outcome requires an rng")
        outcome = float(rng.normal(mu_x, math.sqrt(max(var, 0.0))))
    else:
        outcome = float(select)
        _select_guard(outcome, mu_x, var, "homodyne")
    # pseudo-inverse of diag(1, 0) C diag(1, 0)
    pcp_inv = np.zeros((2, 2))
    if var > 0:
        pcp_inv[0, 0] = 1 / var
    means = state.means.copy()
    cov = state.cov.copy()
    delta = np.array([outcome - mu_x, 0.0])
    means[rest] = state.means[rest] + b @ pcp_inv @ delta
    cov[np.ix_(rest, rest)] = a - b @ pcp_inv @ b.T
    out = GaussianState(means, cov, state.hbar)
    return outcome, reset_mode(out, mode)


def measure_heterodyne(state, mode, rng=None, select=None):
    """Heterodyne measurement: samples alpha from the Husimi function of one mode.

    Args:
        state (GaussianState): input state
        mode (int): measured mode
        rng (numpy.random.Generator): random source for sampling
        select (complex): post-selected outcome

    Returns:
        tuple[complex, GaussianState]: outcome alpha and conditional state
    """
    _check_mode(state, mode)
    hbar = state.hbar
    idx, rest, a, b, c = _split(state, mode)
    mu = state.means[idx]
    husimi_cov = c + hbar / 2 * np.identity(2)
    if select is None:
        if rng is None:
            raise GaussianError("sampling a heterodyne outcome requires an rng")
        r = rng.multivariate_normal(mu, husimi_cov)
    else:
        alpha = complex(select)
        r = displacement_vector(alpha, hbar)
        if not np.all(np.isfinite(r)):
            raise GaussianError("heterodyne select value is not finite")
        dev = r - mu
        if math.exp(-0.5 * dev @ np.linalg.solve(husimi_cov, dev)) < SELECT_DENSITY_FLOOR:
            raise GaussianError(f"heterodyne outcome {alpha} has negligible probability density")
    inv = np.linalg.inv(husimi_cov)
    means = state.means.copy()
    cov = state.cov.copy()
    means[rest] = state.means[rest] + b @ inv @ (r - mu)
    cov[np.ix_(rest, rest)] = a - b @ inv @ b.T
    out = GaussianState(means, cov, hbar)
    alpha = complex(r[0], r[1]) / math.sqrt(2 * hbar)
    return alpha, reset_mode(out, mode)


# ---------------------------------------------------------------------------
# state queries
# ---------------------------------------------------------------------------


def reduced_state(state, modes):
    """Marginal Gaussian state of ``modes``, in the order given."""
    modes = list(modes)
    for m in modes:
        _check_mode(state, m)
    idx = state.quad_indices(modes)
    return GaussianState(state.means[idx].copy(), state.cov[np.ix_(idx, idx)].copy(), state.hbar)


def mean_photon(state, mode):
    """Mean photon number ``(tr V_m + |mu_m|^2) / (2 hbar) - 1/2`` of one mode."""
    red = reduced_state(state, [mode])
    return float((np.trace(red.cov) + red.means @ red.means) / (2 * state.hbar) - 0.5)


def _uncorrelated_block(state, mode, tol=1e-10):
    """The mode's 2x2 covariance block, provided it has no correlations with other modes."""
    idx, rest, _, cross, block = _split(state, mode)
    if rest and np.abs(cross).max() > tol * max(1.0, np.abs(state.cov).max()):
        raise GaussianError(f"mode {mode} is correlated with other modes; its parameters are not defined")
    return idx, block


def displacement(state, mode):
    """Complex amplitude ``alpha`` of an uncorrelated mode, with means ``sqrt(2 hbar) (Re, Im) alpha``."""
    _check_mode(state, mode)
    idx, _ = _uncorrelated_block(state, mode)
    mu = state.means[idx]
    return complex(mu[0], mu[1]) / math.sqrt(2 * state.hbar)


def squeezing(state, mode):
    """Squeezing ``(r, phi)`` of an uncorrelated mode, ``r >= 0``.

    The block is written as ``nu (hbar/2) S(r, phi)^2`` with ``nu`` its
    symplectic eigenvalue, so thermal noise does not bias the result.
    """
    _check_mode(state, mode)
    _, block = _uncorrelated_block(state, mode)
    v = block / (state.hbar / 2)
    nu = math.sqrt(max(np.linalg.det(v), 0.0))
    cosh2r = max(np.trace(v) / (2 * nu), 1.0)
    r = 0.5 * math.acosh(cosh2r)
    sinh2r = math.sinh(2 * r)
    if sinh2r < 1e-12:
        return 0.0, 0.0
    c = -(v[0, 0] - v[1, 1]) / (2 * nu * sinh2r)
    s = -v[0, 1] / (nu * sinh2r)
    return r, math.atan2(s, c)


def fidelity_coherent(state, alphas):
    """Fidelity with the pure product coherent state ``|alpha_1, ..., alpha_N>``."""
    alphas = np.atleast_1d(np.asarray(alphas, dtype=complex))
    if alphas.shape[0] != state.n_modes:
        raise GaussianError("one coherent amplitude per mode is required")
    hbar = state.hbar
    target = np.concatenate([alphas.real, alphas.imag]) * math.sqrt(2 * hbar)
    return gaussian_overlap(state, target, hbar / 2 * np.identity(2 * state.n_modes))


def gaussian_overlap(state, target_means, target_cov):
    """``Tr(rho sigma)`` for a pure Gaussian target ``sigma``."""
    hbar = state.hbar
    total = state.cov + target_cov
    delta = state.means - target_means
    n = state.n_modes
    return float(hbar**n * math.exp(-0.5 * delta @ np.linalg.solve(total, delta)) / math.sqrt(np.linalg.det(total)))


def wigner(state, mode, xvec, pvec):
    """Wigner function of one mode on the grid ``xvec x pvec``.

    Returns:
        array: values with shape ``(len(xvec), len(pvec))``
    """
    red = reduced_state(state, [mode])
    inv = np.linalg.inv(red.cov)
    xx, pp = np.meshgrid(np.asarray(xvec, float) - red.means[0], np.asarray(pvec, float) - red.means[1], indexing="ij")
    quad = inv[0, 0] * xx**2 + 2 * inv[0, 1] * xx * pp + inv[1, 1] * pp**2
    return np.exp(-0.5 * quad) / (2 * math.pi * math.sqrt(np.linalg.det(red.cov)))


def _complex_moments(state):
    """Covariance ``Q`` (vacuum -> I) and means in the ``(a, a^dag)`` basis."""
    n, hbar = state.n_modes, state.hbar
    eye = np.identity(n)
    t = np.block([[eye, 1j * eye], [eye, -1j * eye]]) / math.sqrt(2 * hbar)
    sigma = t @ state.cov @ t.conj().T
    q = sigma + np.identity(2 * n) / 2
    beta = t @ state.means
    return q, beta


def fock_prob(state, pattern, limit=FOCK_PROB_PHOTON_LIMIT):
    """Probability of measuring the photon-number pattern ``n``.

    Uses the loop hafnian of the pattern-indexed submatrix of
    ``A = X (I - Q^{-1})^*``, with the displacement on the diagonal.

    Args:
        state (GaussianState): any valid Gaussian state
        pattern (Sequence[int]): photon number per mode
        limit (int): maximum accepted total photon number

    Returns:
        float: the probability
    """
    pattern = [int(k) for k in pattern]
    n = state.n_modes
    if len(pattern) != n or any(k < 0 for k in pattern):
        raise GaussianError(f"pattern must have {n} non-negative entries")
    total = sum(pattern)
    if total > limit:
        raise GaussianError(f"pattern with {total} photons exceeds the limit {limit}")
    ok, msg = is_valid_covariance(state.cov, state.hbar)
    if not ok:
        raise GaussianError(f"invalid covariance: {msg}")
    q, beta = _complex_moments(state)
    q_inv = np.linalg.inv(q)
    x = np.block([[np.zeros((n, n)), np.identity(n)], [np.identity(n), np.zeros((n, n))]])
    a_mat = x @ (np.identity(2 * n) - q_inv).conj()
    gamma = x @ q_inv.conj() @ beta.conj()
    prefactor = np.exp(-0.5 * beta.conj() @ q_inv @ beta) / np.sqrt(np.linalg.det(q))
    rows = np.repeat(np.arange(n), pattern)
    idx = np.concatenate([rows, rows + n])
    sub = a_mat[np.ix_(idx, idx)]
    np.fill_diagonal(sub, gamma[idx])
    norm = np.prod([math.factorial(k) for k in pattern])
    prob = prefactor * loop_hafnian((sub + sub.T) / 2) / norm
    return float(prob.real)


# ---------------------------------------------------------------------------
# backend facade used by the engine
# ---------------------------------------------------------------------------


class GaussianBackend:
    """Mutable wrapper around a :class:`GaussianState` with the engine's backend interface."""

    kind = "gaussian"

    def __init__(self, n_modes, hbar=DEFAULT_HBAR):
        self.hbar = hbar
        self.state = vacuum_state(n_modes, hbar)

    @property
    def n_modes(self):
        return self.state.n_modes

    def prepare(self, name, params, modes):
        if len(modes) != 1:
            raise GaussianError(f"{name} prepares a single mode on this backend")
        self.state = prepare_mode(self.state, modes[0], name, params)

    def apply(self, name, params, modes):
        self.state = apply_gate(self.state, name, params, modes)

    def measure_homodyne(self, mode, phi, rng, select=None):
        value, self.state = measure_homodyne(self.state, mode, phi, rng, select)
        return value

    def measure_heterodyne(self, mode, rng, select=None):
        value, self.state = measure_heterodyne(self.state, mode, rng, select)
        return value

    def measure_fock(self, modes, rng, select=None):
        raise GaussianError("MeasureFock is not available on the gaussian backend")

    def add_mode(self):
        n = self.n_modes
        means = np.concatenate([self.state.means[:n], [0.0], self.state.means[n:], [0.0]])
        cov = self.hbar / 2 * np.identity(2 * n + 2)
        old = list(range(n)) + list(range(n + 1, 2 * n + 1))
        cov[np.ix_(old, old)] = self.state.cov
        self.state = GaussianState(means, cov, self.hbar)

    def remove_mode(self, mode):
        if self.n_modes == 1:
            raise GaussianError("cannot remove the last mode")
        keep = [m for m in range(self.n_modes) if m != mode]
        self.state = reduced_state(self.state, keep)

    def leakage(self):
        return 0.0


__all__ = [
    "GAUSSIAN_GATES",
    "GAUSSIAN_PREPARATIONS",
    "GaussianBackend",
    "GaussianError",
    "GaussianState",
    "MatrixError",
    "SymplecticOp",
    "apply_gate",
    "apply_symplectic",
    "beamsplitter_unitary",
    "displacement",
    "displacement_vector",
    "embed_symplectic",
    "fidelity_coherent",
    "fock_prob",
    "gate_symplectic",
    "gaussian_overlap",
    "mean_photon",
    "measure_heterodyne",
    "measure_homodyne",
    "passive_symplectic",
    "prepare_mode",
    "reduced_state",
    "reset_mode",
    "rotation_matrix",
    "single_mode_moments",
    "squeezing",
    "squeezing_matrix",
    "sympmat",
    "vacuum_state",
    "wigner",
]
