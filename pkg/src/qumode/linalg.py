"""Dense linear algebra shared by the backends and decompositions.

Contains the combinatorial matrix functions (permanent, hafnian, loop
hafnian), a scaling-and-squaring matrix exponential, and the symplectic-form
utilities. All phase-space quantities use the ``xxpp`` ordering
``(x_1, ..., x_N, p_1, ..., p_N)``.
"""
import math
from itertools import permutations

import numpy as np

DEFAULT_HBAR = 2.0

#: hard limits on the combinatorial functions, overridable per call
PERMANENT_LIMIT = 20
HAFNIAN_LIMIT = 16

SYMMETRY_TOL = 1e-10
POSITIVITY_TOL = 1e-9


class MatrixError(ValueError):
    """Raised when a matrix argument violates a precondition."""


def _as_square(m, what="matrix"):
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise MatrixError(f"{what} must be square, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise MatrixError(f"{what} has non-finite entries")
    return m


def _check_symmetric(m, tol):
    if m.size and np.max(np.abs(m - m.T)) > tol * max(1.0, np.max(np.abs(m))):
        raise MatrixError("matrix is not symmetric within tolerance")


# ---------------------------------------------------------------------------
# symplectic form
# ---------------------------------------------------------------------------


def sympmat(n_modes):
    r"""Returns the symplectic form :math:`\Omega = [[0, I], [-I, 0]]` in xxpp ordering.

    Args:
        n_modes (int): number of modes N

    Returns:
        array: :math:`2N\times 2N` real matrix
    """
    eye = np.identity(n_modes)
    zero = np.zeros((n_modes, n_modes))
    return np.block([[zero, eye], [-eye, zero]])


def _n_modes_of(m):
    if m.shape[0] % 2:
        raise MatrixError(f"phase-space matrix must have even dimension, got {m.shape[0]}")
    return m.shape[0] // 2


def is_symplectic(s, tol=1e-10):
    """Checks whether ``s`` preserves the symplectic form, ``S Omega S^T = Omega``.

    Args:
        s (array): real square matrix of even dimension
        tol (float): absolute tolerance on the entries of the difference

    Returns:
        bool: whether ``s`` is symplectic
    """
    s = _as_square(s, "symplectic matrix")
    omega = sympmat(_n_modes_of(s))
    return bool(np.allclose(s @ omega @ s.T, omega, atol=tol, rtol=0))


def is_valid_covariance(v, hbar=DEFAULT_HBAR, tol=POSITIVITY_TOL, sym_tol=SYMMETRY_TOL):
    r"""Tests the uncertainty principle :math:`V + i(\hbar/2)\Omega \geq 0`.

    Args:
        v (array): real symmetric :math:`2N\times 2N` matrix
        hbar (float): convention for :math:`[\hat x, \hat p] = i\hbar`
        tol (float): smallest eigenvalue accepted is ``-tol``
        sym_tol (float): symmetry tolerance

    Returns:
        tuple[bool, str]: validity flag and a human-readable diagnostic
    """
    v = _as_square(v, "covariance matrix")
    n = _n_modes_of(v)
    if np.iscomplexobj(v) and np.max(np.abs(v.imag)) > sym_tol:
        return False, "covariance matrix has an imaginary part"
    v = np.real(v)
    asym = np.max(np.abs(v - v.T)) if v.size else 0.0
    if asym > sym_tol * max(1.0, np.max(np.abs(v))):
        return False, f"covariance matrix is not symmetric (max asymmetry {asym:.3e})"
    eigs = np.linalg.eigvalsh(v + 0.5j * hbar * sympmat(n))
    lowest = eigs[0]
    if lowest < -tol:
        return False, f"V + i(hbar/2)Omega has negative eigenvalue {lowest:.3e}"
    return True, "ok"


def symplectic_eigenvalues(v, hbar=DEFAULT_HBAR, tol=POSITIVITY_TOL):
    r"""Symplectic eigenvalues of a covariance matrix, in units of :math:`\hbar/2`.

    These are the moduli of the eigenvalues of :math:`i(2/\hbar)\Omega V`, taken
    once per pair, so vacuum gives 1 and a thermal mode gives :math:`2\bar n + 1`.

    Args:
        v (array): valid covariance matrix
        hbar (float): convention for :math:`\hbar`
        tol (float): validity tolerance

    Returns:
        array: the N symplectic eigenvalues sorted in ascending order
    """
    ok, msg = is_valid_covariance(v, hbar, tol)
    if not ok:
        raise MatrixError(f"invalid covariance matrix: {msg}")
    v = np.real(np.asarray(v))
    n = v.shape[0] // 2
    # i Omega V is similar to the Hermitian V^1/2 (i Omega) V^1/2
    w, q = np.linalg.eigh(v)
    root = (q * np.sqrt(np.clip(w, 0, None))) @ q.T
    herm = (2 / hbar) * root @ (1j * sympmat(n)) @ root
    eigs = np.linalg.eigvalsh(herm)
    # spectrum is {+nu_i, -nu_i}; keep the non-negative half
    return np.sort(eigs[n:])


# ---------------------------------------------------------------------------
# permanent
# ---------------------------------------------------------------------------


def permanent(m, method="ryser", limit=PERMANENT_LIMIT):
    """Permanent of a square matrix.

    The default method is Ryser's inclusion-exclusion formula visiting the
    column subsets in Gray-code order, so consecutive subsets differ by one
    column and the row sums are updated in O(n). ``method="enumerate"`` sums
    over all permutations and serves as the reference.

    Args:
        m (array): square matrix
        method (str): ``"ryser"`` or ``"enumerate"``
        limit (int): maximum accepted dimension

    Returns:
        complex: the permanent; the 0x0 matrix has permanent 1
    """
    m = _as_square(m)
    n = m.shape[0]
    if n > limit:
        raise MatrixError(f"permanent of a {n}x{n} matrix exceeds the limit {limit}")
    if n == 0:
        return 1.0 + 0j
    m = m.astype(complex)
    if method == "enumerate":
        return _permanent_enumerate(m)
    if method == "ryser":
        return _permanent_ryser(m)
    raise ValueError(f"unknown permanent method {method!r}")


def _permanent_enumerate(m):
    n = m.shape[0]
    rows = np.arange(n)
    total = 0j
    for perm in permutations(range(n)):
        total += np.prod(m[rows, perm])
    return complex(total)


def _permanent_ryser(m):
    n = m.shape[0]
    row_sums = np.zeros(n, dtype=complex)
    total = 0j
    gray = 0
    # subset k of the Gray sequence differs from k-1 in the lowest set bit of k
    for k in range(1, 2**n):
        bit = (k & -k).bit_length() - 1
        gray ^= 1 << bit
        if gray >> bit & 1:
            row_sums += m[:, bit]
        else:
            row_sums -= m[:, bit]
        sign = -1 if bin(gray).count("1") % 2 else 1
        total += sign * np.prod(row_sums)
    return complex((-1) ** n * total)


# ---------------------------------------------------------------------------
# hafnian and loop hafnian
# ---------------------------------------------------------------------------


def _matching_sum(m, idx, loops):
    """Recursively sums over all (loop) perfect matchings of ``idx``.

    Every matching is visited explicitly: the first index is either paired with
    each later index in turn or, when ``loops`` is set, matched to itself.
    """
    if not idx:
        return 1.0 + 0j
    first, rest = idx[0], idx[1:]
    total = 0j
    if loops:
        total += m[first, first] * _matching_sum(m, rest, loops)
    for k, j in enumerate(rest):
        total += m[first, j] * _matching_sum(m, rest[:k] + rest[k + 1 :], loops)
    return total


def _hafnian_powertrace(m):
    """Power-trace hafnian: sum over subsets of index pairs of
    ``[lambda^k] exp(sum_j tr((B X)^j) lambda^j / 2j)``.
    """
    n = m.shape[0]
    half = n // 2
    total = 0j
    for mask in range(2**half):
        pairs = [i for i in range(half) if mask >> i & 1]
        sign = -1 if (half - len(pairs)) % 2 else 1
        if not pairs:
            # exp(0) has no lambda^half coefficient unless half == 0
            continue
        idx = [k for i in pairs for k in (2 * i, 2 * i + 1)]
        swap = [k for i in pairs for k in (2 * i + 1, 2 * i)]
        bx = m[np.ix_(idx, swap)]
        coeffs = np.zeros(half + 1, dtype=complex)
        power = np.identity(len(idx), dtype=complex)
        for j in range(1, half + 1):
            power = power @ bx
            coeffs[j] = np.trace(power) / (2 * j)
        total += sign * _exp_series_coefficient(coeffs, half)
    return total


def _exp_series_coefficient(coeffs, order):
    """Coefficient of ``lambda^order`` in ``exp(sum_j coeffs[j] lambda^j)``."""
    e = np.zeros(order + 1, dtype=complex)
    e[0] = 1.0
    for j in range(1, order + 1):
        acc = 0j
        for k in range(1, j + 1):
            acc += k * coeffs[k] * e[j - k]
        e[j] = acc / j
    return e[order]


def _loop_hafnian_bitmask(m):
    """Memoized recursion over the set of unmatched indices (as a bitmask)."""
    n = m.shape[0]
    full = (1 << n) - 1
    memo = {0: 1.0 + 0j}

    def rec(mask):
        if mask in memo:
            return memo[mask]
        first = (mask & -mask).bit_length() - 1
        rest = mask & ~(1 << first)
        total = m[first, first] * rec(rest)
        j_mask = rest
        while j_mask:
            j = (j_mask & -j_mask).bit_length() - 1
            j_mask &= j_mask - 1
            total += m[first, j] * rec(rest & ~(1 << j))
        memo[mask] = total
        return total

    return rec(full)


def hafnian(m, method="auto", limit=HAFNIAN_LIMIT, tol=SYMMETRY_TOL):
    """Hafnian of a symmetric matrix of even dimension.

    Args:
        m (array): symmetric matrix
        method (str): ``"enumerate"`` visits all (n-1)!! perfect matchings and
            is the reference; ``"powertrace"`` is the faster subset-sum
            algorithm; ``"auto"`` picks enumeration up to n = 8
        limit (int): maximum accepted dimension
        tol (float): symmetry tolerance

    Returns:
        complex: the hafnian; the 0x0 matrix has hafnian 1
    """
    m = _as_square(m)
    n = m.shape[0]
    if n % 2:
        raise MatrixError(f"hafnian requires an even dimension, got {n}")
    _check_symmetric(m, tol)
    if n > limit:
        raise MatrixError(f"hafnian of a {n}x{n} matrix exceeds the limit {limit}")
    if n == 0:
        return 1.0 + 0j
    m = m.astype(complex)
    if method == "auto":
        method = "enumerate" if n <= 8 else "powertrace"
    if method == "enumerate":
        return complex(_matching_sum(m, tuple(range(n)), loops=False))
    if method == "powertrace":
        return complex(_hafnian_powertrace(m))
    raise ValueError(f"unknown hafnian method {method!r}")


def loop_hafnian(m, method="auto", limit=HAFNIAN_LIMIT, tol=SYMMETRY_TOL):
    """Loop hafnian: sum over matchings of the complete graph with self-loops.

    Each self-loop on index i contributes the diagonal entry ``m[i, i]``. With a
    zero diagonal this reduces to :func:`hafnian`.

    Args:
        m (array): symmetric matrix of any dimension
        method (str): ``"enumerate"`` (reference), ``"bitmask"`` (memoized
            recursion over unmatched subsets) or ``"auto"``
        limit (int): maximum accepted dimension
        tol (float): symmetry tolerance

    Returns:
        complex: the loop hafnian
    """
    m = _as_square(m)
    n = m.shape[0]
    _check_symmetric(m, tol)
    if n > limit:
        raise MatrixError(f"loop hafnian of a {n}x{n} matrix exceeds the limit {limit}")
    if n == 0:
        return 1.0 + 0j
    m = m.astype(complex)
    if method == "auto":
        method = "enumerate" if n <= 6 else "bitmask"
    if method == "enumerate":
        return complex(_matching_sum(m, tuple(range(n)), loops=True))
    if method == "bitmask":
        return complex(_loop_hafnian_bitmask(m))
    raise ValueError(f"unknown loop hafnian method {method!r}")


# ---------------------------------------------------------------------------
# matrix exponential
# ---------------------------------------------------------------------------

# Pade coefficients b_0..b_13 and the 1-norm bounds theta_m (Higham 2005)
_PADE13 = (
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
)
_PADE_LOW = {
    3: (120.0, 60.0, 12.0, 1.0),
    5: (30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0),
    7: (17297280.0, 8648640.0, 1995840.0, 277200.0, 25200.0, 1512.0, 56.0, 1.0),
    9: (
        17643225600.0,
        8821612800.0,
        2075673600.0,
        302702400.0,
        30270240.0,
        2162160.0,
        110880.0,
        3960.0,
        90.0,
        1.0,
    ),
}
_THETA = {3: 1.495585217958292e-2, 5: 2.539398330063230e-1, 7: 9.504178996162932e-1, 9: 2.097847961257068e0}
_THETA13 = 5.371920351148152


def _pade_low(a, degree):
    b = _PADE_LOW[degree]
    ident = np.identity(a.shape[0], dtype=a.dtype)
    a2 = a @ a
    powers = [ident, a2]
    for _ in range(2, degree // 2 + 1):
        powers.append(powers[-1] @ a2)
    u = sum(b[2 * k + 1] * powers[k] for k in range(len(powers)))
    v = sum(b[2 * k] * powers[k] for k in range(len(powers)))
    return a @ u, v


def _pade13(a):
    b = _PADE13
    ident = np.identity(a.shape[0], dtype=a.dtype)
    a2 = a @ a
    a4 = a2 @ a2
    a6 = a2 @ a4
    u = a @ (a6 @ (b[13] * a6 + b[11] * a4 + b[9] * a2) + b[7] * a6 + b[5] * a4 + b[3] * a2 + b[1] * ident)
    v = a6 @ (b[12] * a6 + b[10] * a4 + b[8] * a2) + b[6] * a6 + b[4] * a4 + b[2] * a2 + b[0] * ident
    return u, v


def expm(m):
    """Matrix exponential by scaling and squaring with a Pade core.

    Diagonal input is exponentiated entrywise, which is exact.

    Args:
        m (array): square matrix

    Returns:
        array: ``exp(m)``
    """
    a = _as_square(m)
    n = a.shape[0]
    a = a.astype(complex) if np.iscomplexobj(a) else a.astype(float)
    if n == 0:
        return a.copy()
    if np.count_nonzero(a - np.diag(np.diagonal(a))) == 0:
        return np.diag(np.exp(np.diagonal(a)))
    norm = np.linalg.norm(a, 1)
    for degree in (3, 5, 7, 9):
        if norm <= _THETA[degree]:
            u, v = _pade_low(a, degree)
            return np.linalg.solve(v - u, v + u)
    s = max(0, int(math.ceil(math.log2(norm / _THETA13)))) if norm > _THETA13 else 0
    a = a / 2**s
    u, v = _pade13(a)
    r = np.linalg.solve(v - u, v + u)
    for _ in range(s):
        r = r @ r
    return r
