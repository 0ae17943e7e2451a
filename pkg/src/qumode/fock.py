"""Truncated Fock-space backend.

A pure N-mode state is a ket of shape ``(D,) * N``; a mixed state is a density
matrix of shape ``(D,) * 2N`` with the ket indices first and the bra indices
after them. Gate matrices are exponentials of generators built from truncated
ladder operators. They are evaluated on a padded space and cropped to the
cutoff, so the only error left is the truncation of the state itself.
"""
import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .linalg import DEFAULT_HBAR, expm

DEFAULT_CUTOFF = 10
#: largest number of complex amplitudes a state may hold
MEMORY_BUDGET = 2**26
#: unitarity defect above which building a gate warns
DEFECT_WARNING = 1e-6
#: outcome probability below which ``select`` is rejected
SELECT_PROB_FLOOR = 1e-12
HOMODYNE_GRID_POINTS = 8192
HETERODYNE_GRID_POINTS = 201

FOCK_DIAGONAL_GATES = ("Rgate", "Fouriergate", "Kgate", "CKgate")
X_DIAGONAL_GATES = ("Zgate", "Pgate", "Vgate", "CZgate")
FOCK_GATES = (
    "Dgate",
    "Xgate",
    "Zgate",
    "Sgate",
    "Rgate",
    "Fouriergate",
    "Pgate",
    "Vgate",
    "Kgate",
    "BSgate",
    "S2gate",
    "CXgate",
    "CZgate",
    "CKgate",
)
TWO_MODE_GATES = ("BSgate", "S2gate", "CXgate", "CZgate", "CKgate")


class FockError(ValueError):
    """Raised for invalid Fock states, operations or measurement outcomes."""


class TruncationWarning(UserWarning):
    """A gate matrix cropped to the cutoff is measurably non-unitary."""


@dataclass
class FockState:
    """State of N modes truncated to ``cutoff`` levels each.

    Attributes:
        data (array): ket of shape ``(D,)*N`` or density matrix of shape ``(D,)*2N``
        n_modes (int): number of modes N
        cutoff (int): levels per mode D
        pure (bool): whether ``data`` is a ket
        hbar (float): convention for :math:`\\hbar`
    """

    data: np.ndarray
    n_modes: int
    cutoff: int
    pure: bool = True
    hbar: float = DEFAULT_HBAR

    def copy(self):
        return FockState(self.data.copy(), self.n_modes, self.cutoff, self.pure, self.hbar)


@dataclass
class GateTensor:
    """Cropped gate matrix with its truncation diagnostics.

    Attributes:
        name (str): gate name
        params (tuple): gate parameters
        arity (int): number of modes acted on
        matrix (array): ``D x D`` or ``D^2 x D^2`` matrix; two-mode indices are
            ``(n1, n2)`` flattened row-major
        defect (float): spectral norm of ``U^dag U - I``
    """

    name: str
    params: tuple
    arity: int
    matrix: np.ndarray
    defect: float = field(default=0.0)


def _check_cutoff(cutoff):
    if int(cutoff) != cutoff or cutoff < 2:
        raise FockError(f"cutoff must be an integer >= 2, got {cutoff}")


def padded_dim(cutoff):
    """Dimension of the padded space in which gate exponentials are evaluated."""
    return 4 * cutoff + 40


def new_state(n_modes, cutoff=DEFAULT_CUTOFF, pure=True, hbar=DEFAULT_HBAR):
    """Multimode vacuum as a ket or a density matrix."""
    _check_cutoff(cutoff)
    if n_modes < 1:
        raise FockError("a Fock state needs at least one mode")
    size = cutoff ** (n_modes if pure else 2 * n_modes)
    if size > MEMORY_BUDGET:
        raise FockError(f"state with {size} amplitudes exceeds the memory budget {MEMORY_BUDGET}")
    shape = (cutoff,) * (n_modes if pure else 2 * n_modes)
    data = np.zeros(shape, dtype=complex)
    data[(0,) * len(shape)] = 1.0
    return FockState(data, n_modes, cutoff, pure, hbar)


def ladder_ops(cutoff, hbar=DEFAULT_HBAR):
    """Truncated ladder, number and quadrature operators.

    Returns:
        tuple[array]: ``(a, a_dag, n, x, p)`` each ``D x D``
    """
    _check_cutoff(cutoff)
    a = np.diag(np.sqrt(np.arange(1, cutoff, dtype=float)), 1).astype(complex)
    ad = a.conj().T
    n = np.diag(np.arange(cutoff, dtype=float)).astype(complex)
    x = math.sqrt(hbar / 2) * (a + ad)
    p = -1j * math.sqrt(hbar / 2) * (a - ad)
    return a, ad, n, x, p


# ---------------------------------------------------------------------------
# gate matrices
# ---------------------------------------------------------------------------


def _quadrature_basis(dim, hbar, which):
    """Eigen-decomposition of the truncated x (or p) operator on ``dim`` levels."""
    _, _, _, x, p = ladder_ops(dim, hbar)
    return np.linalg.eigh(x if which == "x" else p)


def _function_of_quadrature(cutoff, hbar, which, phase):
    """Cropped ``exp(i phase(q))`` for q the padded x or p quadrature."""
    w, v = _quadrature_basis(padded_dim(cutoff), hbar, which)
    vd = v[:cutoff]
    return (vd * np.exp(1j * phase(w))) @ vd.conj().T


def _two_mode_quadrature_function(cutoff, hbar, which1, which2, phase):
    """Cropped ``exp(i phase(q1, q2))`` with q1, q2 padded quadratures of modes 1, 2."""
    dim = padded_dim(cutoff)
    w1, v1 = _quadrature_basis(dim, hbar, which1)
    w2, v2 = _quadrature_basis(dim, hbar, which2)
    v1, v2 = v1[:cutoff], v2[:cutoff]
    kernel = np.exp(1j * phase(w1[:, None], w2[None, :]))
    # rows (m, n) of v_m v_n^*, contracted against the kernel on both modes
    left = np.einsum("mi,ni->mni", v1, v1.conj()).reshape(cutoff**2, dim)
    right = np.einsum("mj,nj->mnj", v2, v2.conj()).reshape(cutoff**2, dim)
    u = (left @ kernel @ right.T).reshape(cutoff, cutoff, cutoff, cutoff)
    # u[m1, n1, m2, n2] -> rows (m1, m2), columns (n1, n2)
    return u.transpose(0, 2, 1, 3).reshape(cutoff**2, cutoff**2)


def _padded_single(cutoff, hbar, generator):
    dim = padded_dim(cutoff)
    a, ad, n, x, p = ladder_ops(dim, hbar)
    return expm(generator(a, ad, x, p))[:cutoff, :cutoff]


def _beamsplitter(cutoff, theta, phi):
    """BSgate restricted to each total-photon sector, where it is exact."""
    d = cutoff
    u = np.zeros((d, d, d, d), dtype=complex)
    for total in range(2 * d - 1):
        k = np.arange(total + 1)
        # generator theta (e^{i phi} a1 a2^dag - e^{-i phi} a1^dag a2) on |k, total - k>
        amp = np.sqrt((k[1:]) * (total - k[1:] + 1.0))
        gen = np.zeros((total + 1, total + 1), dtype=complex)
        gen[k[:-1], k[1:]] = theta * np.exp(1j * phi) * amp
        gen[k[1:], k[:-1]] = -theta * np.exp(-1j * phi) * amp
        block = expm(gen)
        keep = k[(k < d) & (total - k < d)]
        sub = block[np.ix_(keep, keep)]
        for i, ki in enumerate(keep):
            u[ki, total - ki, keep, total - keep] = sub[i]
    return u.reshape(d * d, d * d)


def _two_mode_squeezer(cutoff, r, phi):
    """S2gate restricted to each photon-difference sector, a padded chain per sector."""
    d = cutoff
    length = padded_dim(cutoff)
    z = r * np.exp(1j * phi)
    u = np.zeros((d, d, d, d), dtype=complex)
    for diff in range(-(d - 1), d):
        # basis |k + max(diff, 0), k + max(-diff, 0)>, k = 0..length-1
        o1, o2 = max(diff, 0), max(-diff, 0)
        k = np.arange(length)
        n1, n2 = k + o1, k + o2
        amp = np.sqrt((n1[1:]) * (n2[1:]).astype(float))
        gen = np.zeros((length, length), dtype=complex)
        # z^* a1 a2 lowers both, -z a1^dag a2^dag raises both
        gen[k[:-1], k[1:]] = np.conj(z) * amp
        gen[k[1:], k[:-1]] = -z * amp
        block = expm(gen)
        keep = k[(n1 < d) & (n2 < d)]
        for i in keep:
            u[n1[i], n2[i], n1[keep], n2[keep]] = block[i, keep]
    return u.reshape(d * d, d * d)


def gate_tensor(name, params=(), cutoff=DEFAULT_CUTOFF, hbar=DEFAULT_HBAR):
    """Matrix of a gate on the truncated space.

    Args:
        name (str): gate name from the single- or two-mode gate tables
        params (Sequence): gate parameters
        cutoff (int): levels per mode
        hbar (float): convention for :math:`\\hbar`

    Returns:
        GateTensor: cropped matrix with its unitarity defect
    """
    _check_cutoff(cutoff)
    params = tuple(params)
    for v in params:
        if not np.isfinite(complex(v)):
            raise FockError(f"{name} parameter {v} is not finite")
    d = cutoff
    nums = np.arange(d, dtype=float)
    par = [complex(v) if isinstance(v, complex) else float(v) for v in params]
    if name == "Rgate":
        u = np.diag(np.exp(1j * par[0] * nums))
    elif name == "Fouriergate":
        u = np.diag(np.exp(1j * (math.pi / 2) * nums))
    elif name == "Kgate":
        u = np.diag(np.exp(1j * par[0] * nums**2))
    elif name == "CKgate":
        u = np.diag(np.exp(1j * par[0] * np.outer(nums, nums)).ravel())
    elif name == "Dgate":
        alpha = complex(par[0])
        u = _padded_single(d, hbar, lambda a, ad, x, p: alpha * ad - np.conj(alpha) * a)
    elif name == "Xgate":
        u = _function_of_quadrature(d, hbar, "p", lambda q: -par[0] * q / hbar)
    elif name == "Zgate":
        u = _function_of_quadrature(d, hbar, "x", lambda q: par[0] * q / hbar)
    elif name == "Pgate":
        u = _function_of_quadrature(d, hbar, "x", lambda q: par[0] * q**2 / (2 * hbar))
    elif name == "Vgate":
        u = _function_of_quadrature(d, hbar, "x", lambda q: par[0] * q**3 / (3 * hbar))
    elif name == "Sgate":
        z = par[0] * np.exp(1j * (par[1] if len(par) > 1 else 0.0))
        u = _padded_single(d, hbar, lambda a, ad, x, p: (np.conj(z) * a @ a - z * ad @ ad) / 2)
    elif name == "BSgate":
        u = _beamsplitter(d, par[0], par[1] if len(par) > 1 else 0.0)
    elif name == "S2gate":
        u = _two_mode_squeezer(d, par[0], par[1] if len(par) > 1 else 0.0)
    elif name == "CXgate":
        u = _two_mode_quadrature_function(d, hbar, "x", "p", lambda q1, q2: -par[0] * q1 * q2 / hbar)
    elif name == "CZgate":
        u = _two_mode_quadrature_function(d, hbar, "x", "x", lambda q1, q2: par[0] * q1 * q2 / hbar)
    else:
        raise FockError(f"unknown gate {name}")
    arity = 2 if name in TWO_MODE_GATES else 1
    defect = float(np.linalg.norm(u.conj().T @ u - np.identity(u.shape[0]), 2))
    if defect > DEFECT_WARNING:
        warnings.warn(
            f"{name}{params} cropped to cutoff {d} has unitarity defect {defect:.2e}",
            TruncationWarning,
            stacklevel=2,
        )
    return GateTensor(name, params, arity, u, defect)


# ---------------------------------------------------------------------------
# tensor plumbing
# ---------------------------------------------------------------------------


def _apply_to_axes(data, mat, axes):
    """Contracts ``mat`` (k-mode, reshaped ``(D,)*2k``) into ``data`` on ``axes``."""
    k = len(axes)
    d = data.shape[0]
    tensor = mat.reshape((d,) * (2 * k))
    out = np.tensordot(tensor, data, axes=(list(range(k, 2 * k)), list(axes)))
    # tensordot puts the new axes first; move them back into place
    return np.moveaxis(out, list(range(k)), list(axes))


def apply_matrix(state, mat, modes):
    """Applies a (possibly non-unitary) operator on ``modes``, ``rho -> M rho M^dag``."""
    modes = list(modes)
    if len(set(modes)) != len(modes):
        raise FockError("a gate cannot act twice on the same mode")
    for m in modes:
        if not 0 <= m < state.n_modes:
            raise FockError(f"mode {m} out of range for a {state.n_modes}-mode state")
    data = _apply_to_axes(state.data, mat, modes)
    if not state.pure:
        data = _apply_to_axes(data, mat.conj(), [m + state.n_modes for m in modes])
    return FockState(data, state.n_modes, state.cutoff, state.pure, state.hbar)


def apply_gate(state, tensor, modes):
    """Applies a :class:`GateTensor`; the trace may drop through truncation."""
    if len(modes) != tensor.arity:
        raise FockError(f"{tensor.name} acts on {tensor.arity} modes, got {len(modes)}")
    return apply_matrix(state, tensor.matrix, modes)


def to_mixed(state):
    """Density-matrix form of a state."""
    if not state.pure:
        return state
    size = state.cutoff ** (2 * state.n_modes)
    if size > MEMORY_BUDGET:
        raise FockError(f"density matrix with {size} amplitudes exceeds the memory budget")
    dm = np.multiply.outer(state.data, state.data.conj())
    return FockState(dm, state.n_modes, state.cutoff, False, state.hbar)


def trace(state):
    """``<psi|psi>`` or ``tr rho``."""
    if state.pure:
        return float(np.vdot(state.data, state.data).real)
    d, n = state.cutoff, state.n_modes
    return float(np.trace(state.data.reshape(d**n, d**n)).real)


def _flat_dm(state):
    d, n = state.cutoff, state.n_modes
    if state.pure:
        v = state.data.ravel()
        return np.outer(v, v.conj())
    return state.data.reshape(d**n, d**n)


def reduced_dm(state, modes):
    """Reduced density matrix of ``modes`` with shape ``(D,)*2k``."""
    modes = list(modes)
    n = state.n_modes
    rest = [m for m in range(n) if m not in modes]
    if state.pure:
        letters = "abcdefghijklmnopqrstuvwxyz"
        ket = [letters[i] for i in range(n)]
        bra = list(ket)
        for m in modes:
            bra[m] = letters[n + m]
        out = [ket[m] for m in modes] + [bra[m] for m in modes]
        spec = f"{''.join(ket)},{''.join(bra)}->{''.join(out)}"
        return np.einsum(spec, state.data, state.data.conj())
    data = state.data
    # trace out the remaining modes from the highest index down
    for m in sorted(rest, reverse=True):
        cur = data.ndim // 2
        data = np.trace(data, axis1=m, axis2=m + cur)
    # remaining axes are kept modes in increasing order; reorder to ``modes``
    kept = sorted(modes)
    perm = [kept.index(m) for m in modes]
    k = len(modes)
    return data.transpose(perm + [p + k for p in perm])


def _is_product_mode(state, mode, tol=1e-12):
    """Whether a pure state factorizes as (mode) x (rest), by the rank of the split."""
    mat = np.moveaxis(state.data, mode, 0).reshape(state.cutoff, -1)
    sv = np.linalg.svd(mat, compute_uv=False)
    return sv.size < 2 or sv[1] <= tol * max(sv[0], 1e-300)


# ---------------------------------------------------------------------------
# preparations
# ---------------------------------------------------------------------------


def coherent_amplitudes(alpha, cutoff):
    """``e^{-|alpha|^2/2} alpha^n / sqrt(n!)`` for n < cutoff, not renormalized."""
    alpha = complex(alpha)
    amps = np.zeros(cutoff, dtype=complex)
    amps[0] = math.exp(-abs(alpha) ** 2 / 2)
    for k in range(1, cutoff):
        amps[k] = amps[k - 1] * alpha / math.sqrt(k)
    return amps


def squeezed_amplitudes(r, phi, cutoff):
    """Even-photon expansion of ``S(r e^{i phi})|0>``, not renormalized."""
    amps = np.zeros(cutoff, dtype=complex)
    amps[0] = 1 / math.sqrt(math.cosh(r))
    ratio = -np.exp(1j * phi) * math.tanh(r)
    for k in range(2, cutoff, 2):
        # <2m|z> / <2m-2|z> = ratio * sqrt((2m-1) / 2m)
        amps[k] = amps[k - 2] * ratio * math.sqrt((k - 1) / k)
    return amps


def thermal_probabilities(nbar, cutoff):
    """``nbar^n / (1 + nbar)^(n+1)`` for n < cutoff."""
    nums = np.arange(cutoff)
    if nbar == 0:
        return (nums == 0).astype(float)
    return nbar**nums / (1 + nbar) ** (nums + 1)


def single_mode_preparation(name, params, cutoff, hbar=DEFAULT_HBAR):
    """Ket or density matrix of a single-mode preparation.

    Returns:
        tuple[array, bool]: the data and whether it is a ket
    """
    d = cutoff
    if name == "Vacuum":
        ket = np.zeros(d, dtype=complex)
        ket[0] = 1
        return ket, True
    if name == "Fock":
        n = int(params[0])
        if n != params[0] or not 0 <= n < d:
            raise FockError(f"Fock({params[0]}) needs an integer photon number below the cutoff {d}")
        ket = np.zeros(d, dtype=complex)
        ket[n] = 1
        return ket, True
    if name == "Coherent":
        return coherent_amplitudes(params[0], d), True
    if name == "Squeezed":
        return squeezed_amplitudes(float(params[0]), float(params[1]) if len(params) > 1 else 0.0, d), True
    if name == "DisplacedSqueezed":
        alpha, r = complex(params[0]), float(params[1])
        phi = float(params[2]) if len(params) > 2 else 0.0
        dim = padded_dim(d)
        a, ad, _, _, _ = ladder_ops(dim, hbar)
        z = r * np.exp(1j * phi)
        vac = np.zeros(dim, dtype=complex)
        vac[0] = 1
        ket = expm(alpha * ad - np.conj(alpha) * a) @ (expm((np.conj(z) * a @ a - z * ad @ ad) / 2) @ vac)
        return ket[:d], True
    if name == "Catstate":
        alpha = complex(params[0])
        p = float(params[1]) if len(params) > 1 else 0.0
        amps = coherent_amplitudes(alpha, d)
        parity = (-1.0) ** np.arange(d)
        norm = 2 * (1 + math.cos(math.pi * p) * math.exp(-2 * abs(alpha) ** 2))
        if norm <= 0:
            raise FockError("cat state with zero amplitude is not normalizable")
        return amps * (1 + np.exp(1j * math.pi * p) * parity) / math.sqrt(norm), True
    if name == "Thermal":
        nbar = float(params[0])
        if nbar < 0:
            raise FockError(f"thermal mean photon number must be non-negative, got {nbar}")
        return np.diag(thermal_probabilities(nbar, d)).astype(complex), False
    raise FockError(f"{name} is not a single-mode preparation")


def _normalized_user_array(arr, k, cutoff, mixed):
    arr = np.asarray(arr, dtype=complex)
    shape = (cutoff,) * (2 * k if mixed else k)
    if arr.size != cutoff ** len(shape):
        raise FockError(f"array with {arr.size} entries does not fit {k} mode(s) at cutoff {cutoff}")
    arr = arr.reshape(shape)
    if mixed:
        flat = arr.reshape(cutoff**k, cutoff**k)
        norm = np.trace(flat).real
        if np.max(np.abs(flat - flat.conj().T)) > 1e-10:
            raise FockError("density matrix is not Hermitian")
    else:
        norm = np.vdot(arr, arr).real
    if abs(norm - 1) > 1e-6:
        raise FockError(f"user state has norm {norm:.6g}, expected 1")
    return arr


def prepare_modes(state, modes, data, is_ket):
    """Replaces ``modes`` by a prepared state (ket or density matrix over those modes).

    The rest of the system is kept as the partial trace over ``modes``. The
    representation becomes mixed when the prepared state is mixed, when the
    replaced modes were correlated with the rest, or when the system has more
    than two modes.
    """
    modes = list(modes)
    n, d = state.n_modes, state.cutoff
    for m in modes:
        if not 0 <= m < n:
            raise FockError(f"mode {m} out of range for a {n}-mode state")
    rest = [m for m in range(n) if m not in modes]
    stay_pure = state.pure and is_ket and n <= 2
    if stay_pure and rest:
        stay_pure = all(_is_product_mode(state, m) for m in modes)
    if stay_pure:
        if rest:
            # the rest factor is any nonzero slice through the prepared modes
            flat = np.moveaxis(state.data, rest, list(range(len(rest)))).reshape(d ** len(rest), -1)
            col = np.argmax(np.linalg.norm(flat, axis=0))
            rest_ket = flat[:, col]
            rest_ket = rest_ket / np.linalg.norm(rest_ket) * math.sqrt(trace(state))
            full = np.multiply.outer(rest_ket.reshape((d,) * len(rest)), data)
            order = rest + modes
            new = np.moveaxis(full, list(range(n)), order)
        else:
            new = data
        return FockState(np.asarray(new, dtype=complex), n, d, True, state.hbar)
    mixed = to_mixed(state)
    k = len(modes)
    prep = data if not is_ket else np.multiply.outer(data, data.conj())
    if rest:
        rest_dm = reduced_dm(mixed, rest)
        r = len(rest)
        full = np.multiply.outer(rest_dm, prep)
        # axes: rest kets, rest bras, prep kets, prep bras
        src_ket = list(range(r)) + list(range(2 * r, 2 * r + k))
        src_bra = list(range(r, 2 * r)) + list(range(2 * r + k, 2 * r + 2 * k))
        order = rest + modes
        perm = [0] * (2 * n)
        for pos, m in enumerate(order):
            perm[m] = src_ket[pos]
            perm[m + n] = src_bra[pos]
        new = full.transpose(perm)
    else:
        new = prep
    return FockState(np.asarray(new, dtype=complex), n, d, False, state.hbar)


def prepare_fock_mode(state, mode, name, params=()):
    """Prepares one mode (or, for Ket/DensityMatrix, several) in a named state.

    Args:
        state (FockState): input state
        mode (int or Sequence[int]): target mode(s)
        name (str): preparation name
        params (Sequence): its parameters; Ket/DensityMatrix take the array

    Returns:
        FockState: updated state
    """
    modes = [mode] if np.isscalar(mode) else list(mode)
    if name in ("Ket", "DensityMatrix"):
        mixed = name == "DensityMatrix"
        arr = _normalized_user_array(params[0], len(modes), state.cutoff, mixed)
        return prepare_modes(state, modes, arr, not mixed)
    if len(modes) != 1:
        raise FockError(f"{name} prepares a single mode")
    data, is_ket = single_mode_preparation(name, params, state.cutoff, state.hbar)
    return prepare_modes(state, modes, data, is_ket)


# ---------------------------------------------------------------------------
# measurements
# ---------------------------------------------------------------------------


def _project(state, mode, vec):
    """Contracts ``<vec|`` into ``mode`` (and ``|vec>`` on the bra side), then resets it."""
    n = state.n_modes
    d = state.cutoff
    vac = np.zeros(d, dtype=complex)
    vac[0] = 1
    proj = np.outer(vac, vec.conj())
    out = apply_matrix(state, proj, [mode])
    norm = trace(out)
    if norm <= 0:
        raise FockError("measurement outcome has zero probability")
    scale = 1 / math.sqrt(norm) if out.pure else 1 / norm
    return FockState(out.data * scale, n, d, out.pure, state.hbar), norm


def measure_fock(state, modes, rng=None, select=None):
    """Photon counting on ``modes``.

    Args:
        state (FockState): input state
        modes (Sequence[int]): measured modes
        rng (numpy.random.Generator): random source for sampling
        select (Sequence[int]): post-selected pattern

    Returns:
        tuple[tuple[int], FockState]: pattern and the renormalized conditional
        state with the measured modes reset to vacuum
    """
    modes = list(modes)
    d = state.cutoff
    red = reduced_dm(state, modes)
    k = len(modes)
    probs = np.real(np.diagonal(red.reshape(d**k, d**k))).clip(min=0)
    total = probs.sum()
    if select is None:
        if rng is None:
            raise FockError("sampling a photon pattern requires an rng")
        flat = int(rng.choice(probs.size, p=probs / total))
        pattern = tuple(int(v) for v in np.unravel_index(flat, (d,) * k))
    else:
        pattern = tuple(int(v) for v in np.atleast_1d(select))
        if len(pattern) != k or any(not 0 <= v < d for v in pattern):
            raise FockError(f"select pattern {pattern} is outside the truncated space")
        if probs[np.ravel_multi_index(pattern, (d,) * k)] / total < SELECT_PROB_FLOOR:
            raise FockError(f"photon pattern {pattern} has zero probability")
    for m, v in zip(modes, pattern):
        basis = np.zeros(d, dtype=complex)
        basis[v] = 1
        state, _ = _project(state, m, basis)
    return pattern, state


def quadrature_wavefunctions(cutoff, grid, hbar=DEFAULT_HBAR):
    """``<x|n>`` for n < cutoff on ``grid``, shape ``(cutoff, len(grid))``.

    Hermite functions scaled so that ``x = sqrt(hbar/2)(a + a^dag)``.
    """
    grid = np.asarray(grid, dtype=float)
    psi = np.zeros((cutoff, grid.size))
    psi[0] = (math.pi * hbar) ** -0.25 * np.exp(-(grid**2) / (2 * hbar))
    if cutoff > 1:
        psi[1] = math.sqrt(2 / hbar) * grid * psi[0]
    for k in range(1, cutoff - 1):
        psi[k + 1] = math.sqrt(2 / (hbar * (k + 1))) * grid * psi[k] - math.sqrt(k / (k + 1)) * psi[k - 1]
    return psi


def homodyne_grid(cutoff, hbar=DEFAULT_HBAR, points=HOMODYNE_GRID_POINTS):
    """Uniform grid over ``[-q_max, q_max]`` with ``q_max = sqrt(2 hbar (D + 3))``."""
    q_max = math.sqrt(2 * hbar * (cutoff + 3))
    return np.linspace(-q_max, q_max, points)


def quadrature_density(state, mode, grid, phi=0.0):
    """Probability density of ``x cos(phi) + p sin(phi)`` on one mode over ``grid``."""
    if phi:
        state = apply_matrix(state, gate_tensor("Rgate", (-phi,), state.cutoff).matrix, [mode])
    rho = reduced_dm(state, [mode])
    psi = quadrature_wavefunctions(state.cutoff, grid, state.hbar)
    return np.real(np.einsum("mx,mn,nx->x", psi, rho, psi))


def measure_homodyne_fock(state, mode, phi=0.0, rng=None, select=None):
    """Homodyne measurement of ``x cos(phi) + p sin(phi)`` on one mode.

    The outcome is drawn by inverse-CDF sampling of the quadrature density on
    :func:`homodyne_grid`; the conditional state is renormalized and the
    measured mode reset to vacuum.

    Returns:
        tuple[float, FockState]: outcome and conditional state
    """
    d, hbar = state.cutoff, state.hbar
    if phi:
        state = apply_matrix(state, gate_tensor("Rgate", (-phi,), d).matrix, [mode])
    grid = homodyne_grid(d, hbar)
    if select is None:
        if rng is None:
            raise FockError("sampling a homodyne outcome requires an rng")
        dens = quadrature_density(state, mode, grid).clip(min=0)
        cdf = np.cumsum(dens)
        cdf /= cdf[-1]
        outcome = float(np.interp(rng.uniform(), cdf, grid))
    else:
        outcome = float(select)
        if not np.isfinite(outcome) or abs(outcome) > grid[-1]:
            raise FockError(f"homodyne select value {select} lies outside the grid +-{grid[-1]:.4g}")
    vec = quadrature_wavefunctions(d, [outcome], hbar)[:, 0].astype(complex)
    if select is not None:
        dens = quadrature_density(state, mode, grid)
        here = float(np.real(vec.conj() @ reduced_dm(state, [mode]) @ vec))
        if here < SELECT_PROB_FLOOR * max(dens.max(), 1e-300):
            raise FockError(f"homodyne outcome {outcome} has negligible probability density")
    new, _ = _project(state, mode, vec)
    return outcome, new


def measure_heterodyne_fock(state, mode, rng=None, select=None, points=HETERODYNE_GRID_POINTS):
    """Heterodyne measurement by sampling the Husimi function on a square grid.

    Returns:
        tuple[complex, FockState]: outcome alpha and the conditional state
    """
    d = state.cutoff
    rho = reduced_dm(state, [mode])
    if select is None:
        if rng is None:
            raise FockError("sampling a heterodyne outcome requires an rng")
        radius = math.sqrt(d) + 3
        axis = np.linspace(-radius, radius, points)
        re, im = np.meshgrid(axis, axis, indexing="ij")
        alphas = (re + 1j * im).ravel()
        coh = np.stack([coherent_amplitudes(a, d) for a in alphas])
        husimi = np.real(np.einsum("km,mn,kn->k", coh.conj(), rho, coh)).clip(min=0)
        alpha = complex(alphas[rng.choice(alphas.size, p=husimi / husimi.sum())])
    else:
        alpha = complex(select)
        coh = coherent_amplitudes(alpha, d)
        if np.real(coh.conj() @ rho @ coh) < SELECT_PROB_FLOOR:
            raise FockError(f"heterodyne outcome {alpha} has negligible probability")
    new, _ = _project(state, mode, coherent_amplitudes(alpha, d))
    return alpha, new


# ---------------------------------------------------------------------------
# queries
# ---------------------------------------------------------------------------


def ket(state):
    """The ket of a pure state."""
    if not state.pure:
        raise FockError("state is mixed and has no ket")
    return state.data


def dm(state):
    """The density matrix, shape ``(D,)*2N``."""
    return to_mixed(state).data


def all_fock_probs(state):
    """Joint photon-number probabilities, shape ``(D,)*N``."""
    d, n = state.cutoff, state.n_modes
    if state.pure:
        return np.abs(state.data) ** 2
    return np.real(np.diagonal(_flat_dm(state))).reshape((d,) * n)


def fock_prob(state, pattern):
    """Probability of a photon-number pattern; zero beyond the cutoff."""
    pattern = tuple(int(v) for v in pattern)
    if len(pattern) != state.n_modes:
        raise FockError(f"pattern must have {state.n_modes} entries")
    if any(v >= state.cutoff for v in pattern):
        return 0.0
    return float(all_fock_probs(state)[pattern])


def mean_photon(state, mode):
    """Expectation value of the photon number in one mode."""
    rho = reduced_dm(state, [mode])
    return float(np.real(np.diagonal(rho) @ np.arange(state.cutoff)))


def wigner(state, mode, xvec, pvec):
    """Wigner function of one mode on the grid ``xvec x pvec``.

    Evaluated from the reduced density matrix with the Laguerre recursion for the
    Wigner functions of ``|m><n|``.

    Returns:
        array: values with shape ``(len(xvec), len(pvec))``
    """
    rho = reduced_dm(state, [mode])
    d, hbar = state.cutoff, state.hbar
    xx, pp = np.meshgrid(np.asarray(xvec, float), np.asarray(pvec, float), indexing="ij")
    alpha = (xx + 1j * pp) / math.sqrt(2 * hbar)
    # w[n] holds the Wigner function of |m><n| for the current row m
    w = [None] * d
    w[0] = np.exp(-2 * np.abs(alpha) ** 2) / math.pi
    total = np.real(rho[0, 0]) * np.real(w[0])
    for n in range(1, d):
        w[n] = 2 * alpha * w[n - 1] / math.sqrt(n)
        total = total + 2 * np.real(rho[0, n] * w[n])
    for m in range(1, d):
        prev = w[m]
        w[m] = (2 * np.conj(alpha) * prev - math.sqrt(m) * w[m - 1]) / math.sqrt(m)
        total = total + np.real(rho[m, m] * w[m])
        for n in range(m + 1, d):
            nxt = (2 * alpha * w[n - 1] - math.sqrt(m) * prev) / math.sqrt(n)
            prev = w[n]
            w[n] = nxt
            total = total + 2 * np.real(rho[m, n] * w[n])
    return total / hbar


def add_mode(state):
    """Appends a vacuum mode at the end."""
    d, n = state.cutoff, state.n_modes
    vac = np.zeros(d, dtype=complex)
    vac[0] = 1
    if state.pure:
        data = np.multiply.outer(state.data, vac)
    else:
        data = np.multiply.outer(state.data, np.outer(vac, vac))
        # axes: n kets, n bras, new ket, new bra -> n kets, new ket, n bras, new bra
        order = list(range(n)) + [2 * n] + list(range(n, 2 * n)) + [2 * n + 1]
        data = data.transpose(order)
    if data.size > MEMORY_BUDGET:
        raise FockError("adding a mode exceeds the memory budget")
    return FockState(data, n + 1, d, state.pure, state.hbar)


def remove_mode(state, mode):
    """Traces out one mode; the state stays pure only if that mode was unentangled."""
    n, d = state.n_modes, state.cutoff
    if n == 1:
        raise FockError("cannot remove the last mode")
    if not 0 <= mode < n:
        raise FockError(f"mode {mode} out of range")
    keep = [m for m in range(n) if m != mode]
    if state.pure and _is_product_mode(state, mode):
        mat = np.moveaxis(state.data, mode, -1).reshape(-1, d)
        u, s, vh = np.linalg.svd(mat, full_matrices=False)
        rest = (u[:, 0] * s[0]).reshape((d,) * (n - 1))
        # fix the global phase so the largest amplitude keeps its original phase
        ref = np.unravel_index(np.argmax(np.abs(state.data)), state.data.shape)
        ref_rest = tuple(v for i, v in enumerate(ref) if i != mode)
        target = state.data[ref]
        got = rest[ref_rest] * vh[0, ref[mode]]
        if abs(got) > 0:
            rest = rest * (target / got) / abs(target / got)
        return FockState(rest, n - 1, d, True, state.hbar)
    return FockState(reduced_dm(state, keep), n - 1, d, False, state.hbar)


# ---------------------------------------------------------------------------
# backend facade used by the engine
# ---------------------------------------------------------------------------


def _canonical_key(gate):
    name, params, modes = gate
    return (name, tuple(modes), tuple((complex(p).real, complex(p).imag) for p in params))


class FockBackend:
    """Mutable wrapper around a :class:`FockState` with the engine's backend interface.

    Runs of mutually commuting gates (all Fock-diagonal, or all x-diagonal) are
    applied in a canonical order, so any reordering of such a run gives
    bit-identical results.
    """

    kind = "fock"

    def __init__(self, n_modes, cutoff=DEFAULT_CUTOFF, hbar=DEFAULT_HBAR, pure=True):
        self.cutoff = cutoff
        self.hbar = hbar
        self.state = new_state(n_modes, cutoff, pure, hbar)
        self.leaked = 0.0
        self.max_defect = 0.0
        self._cache = {}

    @property
    def n_modes(self):
        return self.state.n_modes

    def prepare(self, name, params, modes):
        self.state = prepare_fock_mode(self.state, modes if len(modes) > 1 else modes[0], name, params)

    def _tensor(self, name, params):
        key = (name, tuple(params))
        if key not in self._cache:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", TruncationWarning)
                self._cache[key] = gate_tensor(name, params, self.cutoff, self.hbar)
        return self._cache[key]

    def apply(self, name, params, modes):
        self.apply_run([(name, tuple(params), tuple(modes))])

    def apply_run(self, gates):
        """Applies a run of gates; commuting runs are sorted canonically first."""
        names = {g[0] for g in gates}
        if len(gates) > 1 and (names <= set(FOCK_DIAGONAL_GATES) or names <= set(X_DIAGONAL_GATES)):
            gates = sorted(gates, key=_canonical_key)
        for name, params, modes in gates:
            tensor = self._tensor(name, params)
            self.max_defect = max(self.max_defect, tensor.defect)
            before = trace(self.state)
            self.state = apply_gate(self.state, tensor, list(modes))
            self.leaked += max(before - trace(self.state), 0.0)

    def measure_homodyne(self, mode, phi, rng, select=None):
        value, self.state = measure_homodyne_fock(self.state, mode, phi, rng, select)
        return value

    def measure_heterodyne(self, mode, rng, select=None):
        value, self.state = measure_heterodyne_fock(self.state, mode, rng, select)
        return value

    def measure_fock(self, modes, rng, select=None):
        pattern, self.state = measure_fock(self.state, modes, rng, select)
        return pattern

    def add_mode(self):
        self.state = add_mode(self.state)

    def remove_mode(self, mode):
        self.state = remove_mode(self.state, mode)

    def leakage(self):
        return self.leaked
