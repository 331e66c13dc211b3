"""Small dense complex linear algebra used by the automaton code."""

from __future__ import annotations

import logging
from typing import Iterable, Optional, Sequence

import numpy as np
from scipy import linalg as sla

logger = logging.getLogger(__name__)

VALIDATION_TOL = 1e-9
IDENTITY_TOL = 1e-12
BORDERLINE_TOL = 1e-6

# Residue below which a Gram-Schmidt candidate is considered already spanned.
_SPANNED_TOL = 1e-7


def as_matrix(m) -> np.ndarray:
    """Return ``m`` as a finite 2-D complex array."""
    arr = np.asarray(m, dtype=complex)
    if arr.ndim != 2:
        raise ValueError(f"Expected a matrix, got array with shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("Matrix contains NaN or infinite entries")
    return arr


def as_vector(v) -> np.ndarray:
    """Return ``v`` as a finite 1-D complex array."""
    arr = np.asarray(v, dtype=complex)
    if arr.ndim != 1:
        raise ValueError(f"Expected a vector, got array with shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("Vector contains NaN or infinite entries")
    return arr


def _readonly(arr: np.ndarray) -> np.ndarray:
    arr = np.array(arr, dtype=complex, copy=True)
    arr.setflags(write=False)
    return arr


class Basis:
    """Orthonormal family of vectors, stored as the columns of a matrix."""

    def __init__(self, columns, tol: float = VALIDATION_TOL):
        cols = as_matrix(columns)
        if cols.shape[1]:
            gram = cols.conj().T @ cols
            defect = np.max(np.abs(gram - np.eye(cols.shape[1])))
            if defect > tol:
                raise ValueError(
                    f"Basis vectors are not orthonormal (defect {defect:.3e})"
                )
        self.matrix = _readonly(cols)

    @classmethod
    def empty(cls, dim: int) -> "Basis":
        return cls(np.zeros((dim, 0), dtype=complex))

    @classmethod
    def from_vectors(cls, vectors: Sequence, dim: Optional[int] = None) -> "Basis":
        if not vectors:
            if dim is None:
                raise ValueError("Dimension is required for an empty basis")
            return cls.empty(dim)
        return cls(np.column_stack([as_vector(v) for v in vectors]))

    @property
    def dim(self) -> int:
        """Dimension of the ambient space."""
        return self.matrix.shape[0]

    @property
    def rank(self) -> int:
        return self.matrix.shape[1]

    def __len__(self) -> int:
        return self.rank

    @property
    def vectors(self) -> list:
        return [self.matrix[:, i] for i in range(self.rank)]

    def projector(self) -> np.ndarray:
        return self.matrix @ self.matrix.conj().T

    def distance(self, v) -> float:
        """Norm of the component of ``v`` orthogonal to the span."""
        v = as_vector(v)
        return float(np.linalg.norm(v - project(v, self)))

    def __repr__(self) -> str:
        return f"Basis(dim={self.dim}, rank={self.rank})"


def mat_vec(m, v) -> np.ndarray:
    """Matrix-vector product with a dimension check."""
    m = as_matrix(m)
    v = as_vector(v)
    if m.shape[1] != v.shape[0]:
        raise ValueError(
            f"Dimension mismatch: matrix has {m.shape[1]} columns, vector has {v.shape[0]} entries"
        )
    return m @ v


def is_unitary(m, tol: float = IDENTITY_TOL) -> bool:
    """True iff ``max |m^H m - I| <= tol``."""
    m = as_matrix(m)
    if m.shape[0] != m.shape[1]:
        raise ValueError(f"Unitarity needs a square matrix, got shape {m.shape}")
    defect = np.max(np.abs(m.conj().T @ m - np.eye(m.shape[0]))) if m.size else 0.0
    return bool(defect <= tol)


def nullspace(m, tol: float = VALIDATION_TOL) -> Basis:
    """Orthonormal basis of ``{v : |m v| <= tol |v|}``.

    Rank is decided with an absolute threshold on the singular values.
    """
    if tol <= 0:
        raise ValueError("Tolerance must be positive")
    m = as_matrix(m)
    n = m.shape[1]
    if m.shape[0] == 0:
        return Basis(np.eye(n, dtype=complex))
    _, s, vh = sla.svd(m, full_matrices=True)
    rank = int(np.sum(s > tol))
    return Basis(vh[rank:].conj().T)


def singular_values(m) -> np.ndarray:
    m = as_matrix(m)
    if m.size == 0:
        return np.zeros(0)
    return sla.svdvals(m)


def project(v, b: Basis) -> np.ndarray:
    """Orthogonal projection of ``v`` onto the span of ``b``."""
    v = as_vector(v)
    if v.shape[0] != b.dim:
        raise ValueError(
            f"Dimension mismatch: vector has {v.shape[0]} entries, basis lives in {b.dim}"
        )
    q = b.matrix
    return q @ (q.conj().T @ v)


def orthogonal_complement(b: Basis, tol: float = VALIDATION_TOL) -> Basis:
    """Basis of the orthogonal complement of ``b`` in its ambient space."""
    if b.rank == 0:
        return Basis(np.eye(b.dim, dtype=complex))
    return nullspace(b.matrix.conj().T, tol)


def complete_to_unitary(
    partial_columns: Iterable,
    tol: float = VALIDATION_TOL,
    dim: Optional[int] = None,
) -> np.ndarray:
    """Extend orthonormal columns to a square unitary matrix.

    The given columns come first; the remaining ones are produced by
    Gram-Schmidt over the standard basis e_0, e_1, ... in order, so the
    result is deterministic.
    """
    columns = [as_vector(c) for c in partial_columns]
    if not columns and dim is None:
        raise ValueError("Dimension is required when no columns are given")
    n = dim if dim is not None else columns[0].shape[0]
    if any(c.shape[0] != n for c in columns):
        raise ValueError("All columns must have the same dimension")
    if len(columns) > n:
        raise ValueError(f"{len(columns)} columns do not fit in dimension {n}")
    if columns:
        given = np.column_stack(columns)
        defect = np.max(np.abs(given.conj().T @ given - np.eye(len(columns))))
        if defect > tol:
            raise ValueError(
                f"Given columns are not orthonormal within {tol:g} (defect {defect:.3e})"
            )

    result = list(columns)
    for i in range(n):
        if len(result) == n:
            break
        candidate = np.zeros(n, dtype=complex)
        candidate[i] = 1.0
        # Two passes of classical Gram-Schmidt keep the residue orthogonal.
        for _ in range(2):
            for q in result:
                candidate = candidate - np.vdot(q, candidate) * q
        norm = np.linalg.norm(candidate)
        if norm > _SPANNED_TOL:
            result.append(candidate / norm)

    unitary = np.column_stack(result) if result else np.zeros((0, 0), dtype=complex)
    if not is_unitary(unitary, 10 * tol):
        logger.warning("Unitary completion drifted beyond %g", 10 * tol)
    return unitary
