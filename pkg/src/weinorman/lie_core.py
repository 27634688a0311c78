"""
Skew-Hermitian bases of su(N), structure constants and adjoint matrices.

Generators are labelled 1..n as in A_1, ..., A_n; arrays are indexed from 0,
so ``basis.structure[i, j, k]`` is c_{i+1, j+1}^{k+1}.

The su(N) basis is built from the generalized Gell-Mann matrices as
A_k = (i/2) * transpose(lambda_k), ordered symmetric family, antisymmetric
family, diagonal family. The transpose only flips the sign of the
antisymmetric family; with it the su(2) basis has c_12^3 = c_23^1 = c_31^2 = +1
under the usual bracket [X, Y] = XY - YX.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations

import numpy as np
import scipy.linalg

__all__ = [
    "LieBasis",
    "build_su_basis",
    "structure_constants",
    "adjoint_matrix",
    "commutator",
    "inner",
    "expm",
]

_TOL = 1e-12


def commutator(x, y):
    return x @ y - y @ x


def inner(x, y):
    """Trace form <X, Y> = -2 Re tr(XY); orthonormal on the (i/2) Gell-Mann basis."""
    return -2.0 * np.real(np.trace(x @ y))


def _is_skew_hermitian(m, tol=_TOL):
    scale = max(1.0, float(np.max(np.abs(m))))
    return np.max(np.abs(m + m.conj().T)) <= tol * scale


def expm(m):
    """Matrix exponential.

    Skew-Hermitian (and real antisymmetric) input goes through a Hermitian
    eigendecomposition, so the result is unitary to rounding. Anything else is
    handed to :func:`scipy.linalg.expm` (scaling and squaring with Pade).
    """
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expm needs a square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("expm input has non-finite entries")
    if m.shape[0] == 0:
        return m.copy()
    if _is_skew_hermitian(m):
        # m = -i h with h Hermitian
        w, v = np.linalg.eigh(1j * m)
        out = (v * np.exp(-1j * w)) @ v.conj().T
        if np.isrealobj(m):
            return out.real
        return out
    return scipy.linalg.expm(m)


class _SkewExp:
    """exp(s M) for a fixed skew-Hermitian M, reusing one eigendecomposition."""

    __slots__ = ("vecs", "vecs_h", "freqs", "real", "dim")

    def __init__(self, m):
        w, v = np.linalg.eigh(1j * np.asarray(m))
        self.freqs = -w
        self.vecs = v
        self.vecs_h = v.conj().T
        self.real = np.isrealobj(m)
        self.dim = v.shape[0]

    def __call__(self, s):
        if s == 0:
            return np.eye(self.dim) if self.real else np.eye(self.dim, dtype=complex)
        out = (self.vecs * np.exp(1j * s * self.freqs)) @ self.vecs_h
        return out.real if self.real else out


def _period(freqs, max_multiple=64):
    """Smallest P > 0 with exp(P * i * freqs) = 1, or inf if none is found."""
    f = np.abs(freqs[np.abs(freqs) > 1e-12])
    if f.size == 0:
        return np.inf
    base = 2.0 * np.pi / f.min()
    for m in range(1, max_multiple + 1):
        p = m * base
        turns = p * f / (2.0 * np.pi)
        if np.all(np.abs(turns - np.round(turns)) < 1e-9):
            return p
    return np.inf


@dataclass(frozen=True, eq=False)
class LieBasis:
    """Ordered basis A_1..A_n of a matrix Lie algebra with its structure constants.

    ``structure[i, j, k]`` holds c with [A_i, A_j] = sum_k c[i, j, k] A_k.
    """

    elements: np.ndarray
    structure: np.ndarray = field(repr=False)

    def __post_init__(self):
        el = np.asarray(self.elements, dtype=complex)
        el.setflags(write=False)
        object.__setattr__(self, "elements", el)
        st = np.asarray(self.structure, dtype=float)
        st.setflags(write=False)
        object.__setattr__(self, "structure", st)

    @property
    def N(self) -> int:
        return self.elements.shape[1]

    @property
    def n(self) -> int:
        return self.elements.shape[0]

    @cached_property
    def gram(self) -> np.ndarray:
        return _gram(self.elements)

    @cached_property
    def _gram_factor(self):
        return scipy.linalg.cho_factor(self.gram)

    def coords(self, x) -> np.ndarray:
        """Real coordinates of ``x`` in the basis (projection with the trace form)."""
        rhs = np.array([inner(a, x) for a in self.elements])
        return scipy.linalg.cho_solve(self._gram_factor, rhs)

    def matrix(self, coeffs) -> np.ndarray:
        """sum_j coeffs[j] A_{j+1}."""
        return np.tensordot(np.asarray(coeffs, dtype=float), self.elements, axes=1)

    @cached_property
    def adjoints(self) -> np.ndarray:
        """Stack of ad matrices, ``adjoints[j] = ad_{A_{j+1}}``."""
        return np.transpose(self.structure, (0, 2, 1)).copy()

    @cached_property
    def _exp_generators(self):
        return [_SkewExp(a) for a in self.elements]

    @cached_property
    def _exp_adjoints(self):
        return [_SkewExp(ad) for ad in self.adjoints]

    @cached_property
    def periods(self) -> np.ndarray:
        """Period of s -> exp(s A_j) for every generator (inf when not periodic)."""
        return np.array([_period(e.freqs) for e in self._exp_generators])

    def exp_generator(self, label: int, s: float) -> np.ndarray:
        """exp(s A_label) for a 1-based generator label."""
        return self._exp_generators[label - 1](s)

    def exp_adjoint(self, label: int, s: float) -> np.ndarray:
        """exp(s ad_{A_label}) for a 1-based generator label."""
        return self._exp_adjoints[label - 1](s)

    def check(self, tol=_TOL) -> None:
        """Raise ``ValueError`` if any basis invariant is violated."""
        for j, a in enumerate(self.elements, start=1):
            if np.max(np.abs(a + a.conj().T)) > tol:
                raise ValueError(f"A_{j} is not skew-Hermitian")
            if abs(np.trace(a)) > tol:
                raise ValueError(f"A_{j} is not traceless")
        if not np.allclose(self.structure, -np.transpose(self.structure, (1, 0, 2)), atol=tol):
            raise ValueError("structure constants are not antisymmetric")
        for i, j in combinations(range(self.n), 2):
            direct = commutator(self.elements[i], self.elements[j])
            rebuilt = self.matrix(self.structure[i, j])
            if np.max(np.abs(direct - rebuilt)) > tol:
                raise ValueError(f"[A_{i + 1}, A_{j + 1}] is not reproduced by the structure constants")


def _gram(elements):
    n = len(elements)
    g = np.empty((n, n))
    for i in range(n):
        for j in range(i, n):
            g[i, j] = g[j, i] = inner(elements[i], elements[j])
    return g


def structure_constants(elements) -> np.ndarray:
    """Structure constants of a list of matrices, by projecting every commutator.

    Raises ``ValueError`` if the matrices are linearly dependent.
    """
    elements = np.asarray(elements, dtype=complex)
    n = elements.shape[0]
    g = _gram(elements)
    if np.linalg.cond(g) > 1e12:
        raise ValueError("Gram matrix is singular: elements do not form a basis")
    factor = scipy.linalg.cho_factor(g)
    c = np.zeros((n, n, n))
    for i, j in combinations(range(n), 2):
        comm = commutator(elements[i], elements[j])
        rhs = np.array([inner(a, comm) for a in elements])
        c[i, j] = scipy.linalg.cho_solve(factor, rhs)
        c[j, i] = -c[i, j]
    return c


def _gell_mann(N):
    sym, antisym, diag = [], [], []
    for j, k in combinations(range(N), 2):
        s = np.zeros((N, N), dtype=complex)
        s[j, k] = s[k, j] = 1.0
        sym.append(s)
        a = np.zeros((N, N), dtype=complex)
        a[j, k] = -1j
        a[k, j] = 1j
        antisym.append(a)
    for m in range(1, N):
        d = np.zeros(N)
        d[:m] = 1.0
        d[m] = -m
        diag.append(np.diag(np.sqrt(2.0 / (m * (m + 1))) * d).astype(complex))
    return sym + antisym + diag


def build_su_basis(N: int) -> LieBasis:
    """Skew-Hermitian basis of su(N) with n = N**2 - 1 elements.

    For N = 2 the elements are (i/2)(sigma_1, -sigma_2, sigma_3)::

        A_1 = 1/2 [[0, i], [i, 0]]
        A_2 = 1/2 [[0, -1], [1, 0]]
        A_3 = 1/2 [[i, 0], [0, -i]]

    with c_12^3 = c_23^1 = c_31^2 = 1.
    """
    if not isinstance(N, (int, np.integer)) or N < 2:
        raise ValueError(f"su(N) needs an integer N >= 2, got {N!r}")
    elements = np.array([0.5j * lam.T for lam in _gell_mann(int(N))])
    return LieBasis(elements, structure_constants(elements))


def adjoint_matrix(basis: LieBasis, j: int) -> np.ndarray:
    """Matrix of X -> [A_j, X] in basis coordinates (j is 1-based).

    ``adjoint_matrix(basis, j)[k, i] == basis.structure[j-1, i, k]``.
    """
    if not 1 <= j <= basis.n:
        raise IndexError(f"generator label {j} outside 1..{basis.n}")
    return basis.adjoints[j - 1].copy()
