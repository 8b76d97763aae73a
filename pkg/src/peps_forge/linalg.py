"""Dense complex linear-algebra kernel.

All higher-level modules funnel their numerics through the handful of
operations here: SVD, Hermitian eigendecomposition, polar decomposition,
kernel projectors and register embeddings. Matrices are plain complex
``numpy`` arrays; every function validates its preconditions and raises a
typed error instead of propagating raw LAPACK failures.

Index convention: a tensor product of registers is flattened in mixed-radix
order with register 0 as the most significant digit. ``numpy.kron`` follows
the same convention, so ``kron(a, b)`` acts on registers ``(0, 1)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InjectivityError, InvalidInputError, NumericalFailureError

#: relative threshold separating genuine rank deficiency from float noise
RANK_RTOL = 1e-8

#: eigenvalues below this count as zero energy
ZERO_TOL = 1e-9

#: tolerated deviation from exact hermiticity
HERM_TOL = 1e-10


def as_matrix(a: np.ndarray, name: str = "matrix") -> np.ndarray:
    """Coerce to a finite 2-d complex array."""
    m = np.asarray(a, dtype=complex)
    if m.ndim != 2:
        raise InvalidInputError(f"{name} must be 2-dimensional, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise InvalidInputError(f"{name} contains non-finite entries")
    return m


@dataclass(frozen=True)
class SingularDecomposition:
    """Thin SVD ``a = u @ diag(sigma) @ vh`` with ``sigma`` descending."""

    u: np.ndarray
    sigma: np.ndarray
    vh: np.ndarray

    @property
    def sigma_max(self) -> float:
        return float(self.sigma[0])

    @property
    def sigma_min(self) -> float:
        return float(self.sigma[-1])

    def reconstruct(self) -> np.ndarray:
        return (self.u * self.sigma) @ self.vh


@dataclass(frozen=True)
class SpectralDecomposition:
    """Eigensystem of a Hermitian matrix, eigenvalues ascending.

    ``eigenvectors`` holds orthonormal eigenvectors as columns, so that
    ``eigenvectors @ diag(eigenvalues) @ eigenvectors.conj().T`` rebuilds
    the input.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T

    def kernel_basis(self, zero_tol: float = ZERO_TOL) -> np.ndarray:
        """Orthonormal columns spanning eigenspaces with eigenvalue < zero_tol."""
        mask = self.eigenvalues < zero_tol
        return self.eigenvectors[:, mask]


def svd(m: np.ndarray) -> SingularDecomposition:
    """Thin singular value decomposition.

    Raises :class:`NumericalFailureError` if the iterative solver does not
    converge (rare, but possible for pathological inputs).
    """
    m = as_matrix(m)
    try:
        u, s, vh = np.linalg.svd(m, full_matrices=False)
    except np.linalg.LinAlgError as exc:
        raise NumericalFailureError(f"SVD did not converge: {exc}") from exc
    return SingularDecomposition(u=u, sigma=s, vh=vh)


def hermitian_eig(h: np.ndarray, herm_tol: float = HERM_TOL) -> SpectralDecomposition:
    """Eigendecomposition of a Hermitian matrix, eigenvalues ascending.

    The input is symmetrized before solving; deviations from hermiticity
    beyond ``herm_tol`` (relative to the largest entry) are rejected.
    """
    h = as_matrix(h)
    if h.shape[0] != h.shape[1]:
        raise InvalidInputError(f"expected a square matrix, got shape {h.shape}")
    scale = max(1.0, float(np.abs(h).max(initial=0.0)))
    dev = float(np.abs(h - h.conj().T).max(initial=0.0))
    if dev > herm_tol * scale:
        raise InvalidInputError(
            f"matrix is not Hermitian: max |h - h^dag| = {dev:.3e} "
            f"exceeds {herm_tol:.1e} * {scale:.3e}"
        )
    h = (h + h.conj().T) / 2
    try:
        w, v = np.linalg.eigh(h)
    except np.linalg.LinAlgError as exc:
        raise NumericalFailureError(f"eigendecomposition did not converge: {exc}") from exc
    return SpectralDecomposition(eigenvalues=w, eigenvectors=v)


def polar_decompose(a: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Split ``a = isometry @ psd`` with ``psd = sqrt(a^dag a)`` positive definite.

    ``a`` must be tall or square (rows >= cols) with full column rank;
    rank deficiency raises :class:`InjectivityError` because downstream it
    always means a vertex map lost injectivity.
    """
    a = as_matrix(a)
    rows, cols = a.shape
    if rows < cols:
        raise InvalidInputError(
            f"polar decomposition expects rows >= cols, got {rows}x{cols}"
        )
    dec = svd(a)
    if dec.sigma_min <= RANK_RTOL * dec.sigma_max or dec.sigma_max == 0.0:
        raise InjectivityError(
            f"matrix is rank deficient: sigma_min={dec.sigma_min:.3e}, "
            f"sigma_max={dec.sigma_max:.3e}"
        )
    isometry = dec.u @ dec.vh
    psd = (dec.vh.conj().T * dec.sigma) @ dec.vh
    psd = (psd + psd.conj().T) / 2
    return isometry, psd


def condition_number(a: np.ndarray) -> float:
    """Ratio of the largest to the smallest singular value.

    Raises :class:`InjectivityError` when the smallest singular value is
    below the rank tolerance.
    """
    dec = svd(a)
    if dec.sigma_min <= RANK_RTOL * dec.sigma_max or dec.sigma_max == 0.0:
        raise InjectivityError(
            f"condition number undefined for rank-deficient matrix: "
            f"sigma_min={dec.sigma_min:.3e}, sigma_max={dec.sigma_max:.3e}"
        )
    return dec.sigma_max / dec.sigma_min


def kernel_projector(h: np.ndarray, zero_tol: float = ZERO_TOL) -> np.ndarray:
    """Orthogonal projector onto the span of eigenvectors with eigenvalue < zero_tol.

    ``h`` must be Hermitian and positive semidefinite within tolerance.
    """
    dec = hermitian_eig(h)
    scale = max(1.0, float(abs(dec.eigenvalues[-1])))
    if dec.eigenvalues[0] < -zero_tol * scale:
        raise InvalidInputError(
            f"matrix is not PSD: smallest eigenvalue {dec.eigenvalues[0]:.3e}"
        )
    basis = dec.kernel_basis(zero_tol)
    return basis @ basis.conj().T


def kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product; the first factor is the most significant register."""
    return np.kron(np.asarray(a, dtype=complex), np.asarray(b, dtype=complex))


def _embedding_layout(
    support: tuple[int, ...], dims: tuple[int, ...]
) -> tuple[list[int], list[int]]:
    """Validate support indices and return (permutation, inverse permutation).

    ``permutation`` lists factor indices with the support first, the rest in
    natural order; ``inverse`` undoes it.
    """
    n = len(dims)
    if len(set(support)) != len(support):
        raise InvalidInputError(f"support registers must be distinct, got {support}")
    for s in support:
        if not 0 <= s < n:
            raise InvalidInputError(f"support register {s} out of range for {n} registers")
    rest = [i for i in range(n) if i not in support]
    perm = list(support) + rest
    inv = [0] * n
    for pos, p in enumerate(perm):
        inv[p] = pos
    return perm, inv


def embed_term(
    term: np.ndarray, support: tuple[int, ...], register_dims: tuple[int, ...]
) -> np.ndarray:
    """Embed an operator on a subset of registers into the full product space.

    ``term`` acts on the registers listed in ``support`` (in that order) and
    is extended by the identity on the rest. Global flattening follows the
    mixed-radix convention with register 0 most significant.
    """
    term = as_matrix(term, "term")
    dims = tuple(int(d) for d in register_dims)
    perm, inv = _embedding_layout(tuple(support), dims)
    support_dim = math.prod(dims[s] for s in support)
    if term.shape != (support_dim, support_dim):
        raise InvalidInputError(
            f"term shape {term.shape} does not match support dimension {support_dim}"
        )
    n = len(dims)
    rest_dim = math.prod(dims[p] for p in perm[len(support):]) if n > len(support) else 1
    full = np.kron(term, np.eye(rest_dim, dtype=complex))
    dims_perm = [dims[p] for p in perm]
    tensor = full.reshape(dims_perm + dims_perm)
    tensor = tensor.transpose(inv + [n + i for i in inv])
    total = math.prod(dims)
    return np.ascontiguousarray(tensor.reshape(total, total))


def embed_columns(
    block: np.ndarray, support: tuple[int, ...], dims: tuple[int, ...]
) -> np.ndarray:
    """Reorder the rows of a stack of column vectors between factor layouts.

    ``block`` columns live on the product of all ``dims`` factors, flattened
    with the ``support`` factors most significant (in the given order) and
    the remaining factors following in natural order. The result has rows in
    the natural mixed-radix order of ``dims``.
    """
    block = np.asarray(block, dtype=complex)
    dims = tuple(int(d) for d in dims)
    perm, inv = _embedding_layout(tuple(support), dims)
    total = math.prod(dims)
    if block.shape[0] != total:
        raise InvalidInputError(
            f"column block has {block.shape[0]} rows, expected {total}"
        )
    ncols = block.shape[1]
    tensor = block.reshape([dims[p] for p in perm] + [ncols])
    tensor = tensor.transpose(inv + [len(dims)])
    return np.ascontiguousarray(tensor.reshape(total, ncols))
