"""Matrix-to-circuit factorizations.

* :func:`clements` splits an N x N unitary into a rectangular mesh of
  N(N-1)/2 beamsplitters followed by one layer of phases.
* :func:`williamson` writes a covariance matrix as ``S D S^T`` with ``D`` the
  symplectic eigenvalues.
* :func:`bloch_messiah` splits a symplectic matrix into passive - squeezing -
  passive.
* :func:`synthesize_gaussian` chains the above into a preparation circuit.
* :func:`compound_gate_decomp` expands Pgate, S2gate, CXgate and CZgate into
  squeezers, rotations and beamsplitters.

Mode matrices follow the beamsplitter convention ``t = cos(theta)``,
``r = e^{i phi} sin(theta)``: ``BSgate(theta, phi)`` maps the amplitudes
``(a_1, a_2) -> [[t, -r^*], [r, t]] (a_1, a_2)``.
"""
import math
from collections import namedtuple
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import schur

from .gaussian import beamsplitter_unitary, passive_symplectic
from .linalg import DEFAULT_HBAR, MatrixError, is_symplectic, is_valid_covariance, sympmat

#: a lowered operation: name, parameter tuple, tuple of target modes
PrimitiveOp = namedtuple("PrimitiveOp", "name params modes")

UNITARY_TOL = 1e-10
DEGENERACY_TOL = 1e-8


class DecompositionError(ValueError):
    """Raised when a matrix does not satisfy a decomposition's precondition."""


# ---------------------------------------------------------------------------
# Clements
# ---------------------------------------------------------------------------


@dataclass
class InterferometerPlan:
    """Beamsplitter mesh plus output phases.

    Attributes:
        n_modes (int): number of modes N
        beamsplitters (list[tuple]): ``(mode, theta, phi)`` acting on modes
            ``(mode, mode + 1)``, in the order they are applied
        phases (list[float]): final ``Rgate`` angle per mode
    """

    n_modes: int
    beamsplitters: list = field(default_factory=list)
    phases: list = field(default_factory=list)

    def depth(self):
        """Number of beamsplitter layers when each is scheduled as early as possible."""
        free = [0] * self.n_modes
        for mode, _, _ in self.beamsplitters:
            layer = max(free[mode], free[mode + 1]) + 1
            free[mode] = free[mode + 1] = layer
        return max(free, default=0)

    def ops(self, modes=None, drop_identity=True):
        """Primitive ``BSgate``/``Rgate`` ops realizing the plan on ``modes``.

        Beamsplitters with ``theta == 0`` exactly are identities and are skipped
        when ``drop_identity`` is set.
        """
        modes = list(range(self.n_modes)) if modes is None else list(modes)
        out = []
        for k, theta, phi in self.beamsplitters:
            if drop_identity and theta == 0:
                continue
            out.append(PrimitiveOp("BSgate", (theta, phi), (modes[k], modes[k + 1])))
        for k, phase in enumerate(self.phases):
            out.append(PrimitiveOp("Rgate", (phase,), (modes[k],)))
        return out


def check_unitary(u, tol=UNITARY_TOL):
    u = np.asarray(u, dtype=complex)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        raise DecompositionError(f"unitary must be square, got shape {u.shape}")
    err = np.max(np.abs(u.conj().T @ u - np.identity(u.shape[0]))) if u.size else 0.0
    if err > tol:
        raise DecompositionError(f"matrix is not unitary (max |U^dag U - I| = {err:.3e})")
    return u


def _embed(n, k, block):
    m = np.identity(n, dtype=complex)
    m[k : k + 2, k : k + 2] = block
    return m


def _nulling_angles(num, den):
    """``(theta, phi)`` with ``tan(theta) e^{i phi} = num / den``."""
    theta = math.atan2(abs(num), abs(den))
    phi = (np.angle(num) - np.angle(den)) if abs(num) > 0 else 0.0
    return theta, float(phi)


def clements(u, tol=UNITARY_TOL):
    """Rectangular beamsplitter-mesh decomposition of a unitary.

    Alternately nulls the lower-left entries from the right (column
    operations) and from the left (row operations), then pushes the left
    beamsplitters through the remaining diagonal.

    Args:
        u (array): N x N unitary
        tol (float): unitarity tolerance

    Returns:
        InterferometerPlan: N(N-1)/2 beamsplitters and N output phases
    """
    u = check_unitary(u, tol).copy()
    n = u.shape[0]
    right, left = [], []
    for i in range(n - 1):
        if i % 2 == 0:
            for j in range(i + 1):
                row, col = n - 1 - j, i - j
                theta, phi = _nulling_angles(u[row, col], u[row, col + 1])
                u = u @ _embed(n, col, beamsplitter_unitary(theta, phi).conj().T)
                right.append((col, theta, phi if theta else 0.0))
        else:
            for j in range(i + 1):
                row, col = n - 1 - i + j, j
                theta, phi = _nulling_angles(-u[row, col], u[row - 1, col])
                u = _embed(n, row - 1, beamsplitter_unitary(theta, phi)) @ u
                left.append((row - 1, theta, phi if theta else 0.0))
    diag = np.diagonal(u).copy()
    # T^-1(theta, phi) diag(e^{ia}, e^{ib}) = diag(e^{ia}, e^{ib}) T(theta, phi + a - b + pi)
    moved = []
    for k, theta, phi in reversed(left):
        a, b = np.angle(diag[k]), np.angle(diag[k + 1])
        moved.append((k, theta, float(_wrap(phi + a - b + math.pi)) if theta else 0.0))
    # U = D L'_1 ... L'_k R_m ... R_1: right ops first, then L'_k down to L'_1
    mesh = right + moved
    return InterferometerPlan(n, mesh, [float(v) for v in np.angle(diag)])


def _wrap(angle):
    return (angle + math.pi) % (2 * math.pi) - math.pi


def reconstruct_interferometer(plan):
    """Mode matrix of an :class:`InterferometerPlan`."""
    n = plan.n_modes
    u = np.identity(n, dtype=complex)
    for k, theta, phi in plan.beamsplitters:
        if not 0 <= k < n - 1:
            raise DecompositionError(f"beamsplitter on modes ({k}, {k + 1}) is outside {n} modes")
        u = _embed(n, k, beamsplitter_unitary(theta, phi)) @ u
    if len(plan.phases) != n:
        raise DecompositionError("one output phase per mode is required")
    return np.diag(np.exp(1j * np.asarray(plan.phases, dtype=float))) @ u


# ---------------------------------------------------------------------------
# Williamson and Bloch-Messiah
# ---------------------------------------------------------------------------


def _sym_sqrt(v):
    w, q = np.linalg.eigh(v)
    return (q * np.sqrt(w)) @ q.T


def _pivot_rows(m, count):
    """Greedy choice of ``count`` rows of ``m`` by largest residual norm.

    Row norms and residuals are unchanged by ``m -> m Q`` with Q unitary, so the
    choice depends only on the column span.
    """
    resid = m.copy()
    rows = []
    for _ in range(count):
        norms = np.linalg.norm(resid, axis=1)
        norms[rows] = -1
        best = float(norms.max())
        # ties (within rounding) go to the lowest row index
        row = int(np.flatnonzero(norms >= best - 1e-9 * max(best, 1.0))[0])
        rows.append(row)
        vec = resid[row] / np.linalg.norm(resid[row])
        resid = resid - np.outer(resid @ vec.conj(), vec)
    return rows


def _canonical_columns(m):
    """Right-multiplies ``m`` by a unitary so its pivot rows form a lower-triangular
    block with positive diagonal, making the result independent of the basis
    chosen for the column span.

    Returns:
        tuple[array, list[int]]: canonical columns and their pivot rows
    """
    k = m.shape[1]
    rows = sorted(_pivot_rows(m, k))
    q, r = np.linalg.qr(m[rows].conj().T)
    q = q * (np.sign(np.diagonal(r)).conj() + (np.diagonal(r) == 0))
    return m @ q, rows


def williamson(v, hbar=DEFAULT_HBAR, tol=1e-9):
    """Williamson normal form ``V = S D S^T``.

    Args:
        v (array): valid 2N x 2N covariance matrix
        hbar (float): convention for :math:`\\hbar`
        tol (float): validity tolerance

    Returns:
        tuple[array, array]: symplectic ``S`` and ``D = diag(nu, nu)`` where
        ``nu`` are the symplectic eigenvalues in absolute units (vacuum gives
        ``hbar/2``). Slots are ordered by the mode they mostly act on, so
        product thermal states give ``S = I``.
    """
    v = np.asarray(v, dtype=float)
    ok, msg = is_valid_covariance(v, hbar, tol)
    if not ok:
        raise DecompositionError(f"invalid covariance matrix: {msg}")
    w = np.linalg.eigvalsh(v)
    if w[0] <= 0:
        raise DecompositionError("covariance matrix must be positive definite")
    n = v.shape[0] // 2
    root = _sym_sqrt(v)
    form = root @ sympmat(n) @ root
    form = (form - form.T) / 2
    t, k = schur(form, output="real")
    nus, xcols, pcols = [], [], []
    for i in range(n):
        a, b = 2 * i, 2 * i + 1
        if t[a, b] >= 0:
            nus.append(t[a, b])
            xcols.append(k[:, a])
            pcols.append(k[:, b])
        else:
            nus.append(t[b, a])
            xcols.append(k[:, b])
            pcols.append(k[:, a])
    nus = np.array(nus)
    kx, kp = np.array(xcols).T, np.array(pcols).T
    sx = root @ kx / np.sqrt(nus)
    sp = root @ kp / np.sqrt(nus)
    # canonicalize within clusters of equal eigenvalues
    cols = sx + 1j * sp
    order = np.argsort(nus, kind="stable")
    pivots = np.zeros(n, dtype=int)
    start = 0
    while start < n:
        stop = start + 1
        while stop < n and abs(nus[order[stop]] - nus[order[start]]) <= DEGENERACY_TOL * max(1.0, nus[order[start]]):
            stop += 1
        idx = order[start:stop]
        canon, rows = _canonical_columns(cols[:, idx])
        cols[:, idx] = canon
        pivots[idx] = rows
        start = stop
    slot_order = np.argsort(pivots % n * 2 + pivots // n, kind="stable")
    cols = cols[:, slot_order]
    nus = nus[slot_order]
    s = np.hstack([cols.real, cols.imag])
    d = np.diag(np.concatenate([nus, nus]))
    return s, d


def _complete_unitary(cols, n):
    """Extends orthonormal columns to an N x N unitary by QR with positive diagonal."""
    k = cols.shape[1]
    if k == n:
        return cols
    basis = np.hstack([cols, np.identity(n, dtype=complex)])
    q, r = np.linalg.qr(basis)
    q = q * (np.sign(np.diagonal(r)).conj() + (np.diagonal(r) == 0))
    # the first k columns of q reproduce ``cols`` up to the phases fixed above
    return np.hstack([cols, q[:, k:n]])


def _fix_column_phases(u, tol=1e-9):
    """Makes the first significant entry of each column real and positive."""
    u = u.copy()
    for j in range(u.shape[1]):
        col = u[:, j]
        idx = int(np.flatnonzero(np.abs(col) > tol * np.abs(col).max())[0])
        u[:, j] = col * np.conj(col[idx]) / abs(col[idx])
    return u


def passive_unitary(o):
    """Unitary ``U = A + iB`` of an orthogonal symplectic ``[[A, -B], [B, A]]``."""
    n = o.shape[0] // 2
    return o[:n, :n] + 1j * o[n:, :n]


def bloch_messiah(s, tol=1e-10):
    """Bloch-Messiah decomposition ``S = O_1 Z O_2``.

    Args:
        s (array): 2N x 2N real symplectic matrix
        tol (float): symplecticity tolerance

    Returns:
        tuple[array, array, array]: passive ``O_1``, diagonal
        ``Z = diag(e^{r_1}..e^{r_N}, e^{-r_1}..e^{-r_N})`` with ``r`` non-negative
        and sorted in descending order, and passive ``O_2``
    """
    s = np.asarray(s, dtype=float)
    if s.ndim != 2 or s.shape[0] != s.shape[1] or s.shape[0] % 2:
        raise DecompositionError("symplectic matrix must be square with even dimension")
    if not is_symplectic(s, max(tol, 1e-10) * max(1.0, np.abs(s).max() ** 2)):
        raise DecompositionError("matrix is not symplectic")
    n = s.shape[0] // 2
    w, q = np.linalg.eigh(s @ s.T)
    r_all = 0.5 * np.log(w)
    order = np.argsort(-r_all, kind="stable")
    squeezing = [i for i in order if r_all[i] > 1e-12][:n]
    vecs = q[:, squeezing]
    # squeezed directions are fixed up to sign only: make the first significant entry positive
    for j in range(vecs.shape[1]):
        col = vecs[:, j]
        lead = col[np.flatnonzero(np.abs(col) > 1e-9 * np.abs(col).max())[0]]
        vecs[:, j] = col * np.sign(lead)
    cols = vecs[:n] + 1j * vecs[n:]
    u = _complete_unitary(cols, n)
    # the unsqueezed completion has a free phase per column
    u[:, len(squeezing) :] = _fix_column_phases(u[:, len(squeezing) :])
    r = np.zeros(n)
    r[: len(squeezing)] = r_all[squeezing]
    o_u = passive_symplectic(u)
    z = np.diag(np.concatenate([np.exp(r), np.exp(-r)]))
    z_inv = np.diag(np.concatenate([np.exp(-r), np.exp(r)]))
    o_p = o_u @ z_inv @ o_u.T @ s
    o2 = o_u.T @ o_p
    return o_u, z, o2


# ---------------------------------------------------------------------------
# Gaussian state synthesis
# ---------------------------------------------------------------------------


@dataclass
class GaussianSynthesis:
    """Circuit preparing a Gaussian state: thermal inputs, interferometer,
    squeezers, interferometer, displacements.

    Attributes:
        nbar (list[float]): thermal mean photon number per mode
        first (InterferometerPlan): interferometer after the thermal inputs, or
            ``None`` when the inputs are all vacuum
        squeezing (list[float]): ``r`` per mode, applied as ``Sgate(r, pi)``
        second (InterferometerPlan): interferometer after the squeezers
        alphas (list[complex]): final displacement per mode
        first_unitary, second_unitary (array): the interferometers' mode matrices
    """

    nbar: list
    first: InterferometerPlan
    squeezing: list
    second: InterferometerPlan
    alphas: list
    first_unitary: np.ndarray = None
    second_unitary: np.ndarray = None

    def ops(self, modes=None, drop_identity=True):
        """Primitive preparations and gates realizing the synthesis on ``modes``."""
        n = len(self.nbar)
        modes = list(range(n)) if modes is None else list(modes)
        out = []
        for k, nbar in enumerate(self.nbar):
            if nbar > 0:
                out.append(PrimitiveOp("Thermal", (nbar,), (modes[k],)))
            else:
                out.append(PrimitiveOp("Vacuum", (), (modes[k],)))
        if self.first is not None:
            out += self.first.ops(modes, drop_identity)
        for k, r in enumerate(self.squeezing):
            if not (drop_identity and r == 0):
                out.append(PrimitiveOp("Sgate", (r, math.pi), (modes[k],)))
        out += self.second.ops(modes, drop_identity)
        for k, alpha in enumerate(self.alphas):
            if not (drop_identity and alpha == 0):
                out.append(PrimitiveOp("Dgate", (alpha,), (modes[k],)))
        return out


def symplectic_ops(s, modes=None, drop_identity=True):
    """Primitive ops applying a symplectic matrix: interferometer, squeezers, interferometer."""
    o1, z, o2 = bloch_messiah(s)
    n = s.shape[0] // 2
    modes = list(range(n)) if modes is None else list(modes)
    r = np.log(np.diagonal(z)[:n])
    out = clements(passive_unitary(o2), 1e-8).ops(modes, drop_identity)
    for k in range(n):
        if not (drop_identity and r[k] == 0):
            out.append(PrimitiveOp("Sgate", (float(r[k]), math.pi), (modes[k],)))
    out += clements(passive_unitary(o1), 1e-8).ops(modes, drop_identity)
    return out


def synthesize_gaussian(v, means=None, hbar=DEFAULT_HBAR, tol=1e-9):
    """Preparation circuit for the Gaussian state with covariance ``v`` and ``means``.

    Args:
        v (array): valid covariance matrix
        means (array): mean vector (zero by default)
        hbar (float): convention for :math:`\\hbar`
        tol (float): validity tolerance

    Returns:
        GaussianSynthesis: the circuit description
    """
    v = np.asarray(v, dtype=float)
    n = v.shape[0] // 2
    means = np.zeros(2 * n) if means is None else np.asarray(means, dtype=float)
    if means.shape != (2 * n,):
        raise DecompositionError(f"means must have length {2 * n}")
    s, d = williamson(v, hbar, tol)
    nus = np.diagonal(d)[:n] / (hbar / 2)
    nbar = [float(max((nu - 1) / 2, 0.0)) if abs(nu - 1) > 1e-9 else 0.0 for nu in nus]
    o1, z, o2 = bloch_messiah(s)
    u1, u2 = passive_unitary(o1), passive_unitary(o2)
    first = None if all(nb == 0 for nb in nbar) else clements(u2, 1e-8)
    alphas = [complex(means[k], means[k + n]) / math.sqrt(2 * hbar) for k in range(n)]
    return GaussianSynthesis(
        nbar,
        first,
        [float(x) for x in np.log(np.diagonal(z)[:n])],
        clements(u1, 1e-8),
        alphas,
        u2,
        u1,
    )


# ---------------------------------------------------------------------------
# compound gates
# ---------------------------------------------------------------------------


def compound_gate_decomp(name, params, modes=(0, 1)):
    """Expands a compound gate into squeezers, rotations and beamsplitters.

    The returned list is in application order (first element acts first).

    Args:
        name (str): ``Pgate``, ``S2gate``, ``CXgate`` or ``CZgate``
        params (Sequence[float]): gate parameters
        modes (Sequence[int]): target mode(s)

    Returns:
        list[PrimitiveOp]: the primitive sequence
    """
    if name == "Pgate":
        s = float(params[0])
        r = math.acosh(math.sqrt(1 + (s / 2) ** 2))
        theta = math.atan(s / 2)
        phi = -np.sign(s) * math.pi / 2 - theta
        m = modes[0]
        return [PrimitiveOp("Sgate", (r, float(phi)), (m,)), PrimitiveOp("Rgate", (theta,), (m,))]
    a, b = modes[0], modes[1]
    if name == "S2gate":
        r = float(params[0])
        phi = float(params[1]) if len(params) > 1 else 0.0
        return [
            PrimitiveOp("BSgate", (-math.pi / 4, 0.0), (a, b)),
            PrimitiveOp("Sgate", (r, phi), (a,)),
            PrimitiveOp("Sgate", (r, phi + math.pi), (b,)),
            PrimitiveOp("BSgate", (math.pi / 4, 0.0), (a, b)),
        ]
    if name == "CXgate":
        s = float(params[0])
        r = math.asinh(-s / 2)
        phi = 0.5 * math.atan2(-1 / math.cosh(r), -math.tanh(r))
        return [
            PrimitiveOp("BSgate", (phi, 0.0), (a, b)),
            PrimitiveOp("Sgate", (r, 0.0), (a,)),
            PrimitiveOp("Sgate", (r, math.pi), (b,)),
            PrimitiveOp("BSgate", (math.pi / 2 + phi, 0.0), (a, b)),
        ]
    if name == "CZgate":
        return (
            [PrimitiveOp("Rgate", (-math.pi / 2,), (b,))]
            + compound_gate_decomp("CXgate", params, modes)
            + [PrimitiveOp("Rgate", (math.pi / 2,), (b,))]
        )
    raise DecompositionError(f"{name} has no compound decomposition")


__all__ = [
    "DecompositionError",
    "GaussianSynthesis",
    "InterferometerPlan",
    "MatrixError",
    "PrimitiveOp",
    "bloch_messiah",
    "check_unitary",
    "clements",
    "compound_gate_decomp",
    "passive_unitary",
    "reconstruct_interferometer",
    "symplectic_ops",
    "synthesize_gaussian",
    "williamson",
]
