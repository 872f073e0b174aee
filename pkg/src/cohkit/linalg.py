"""Dense complex linear algebra used by the rest of the package.

Everything here operates on square numpy arrays (real or complex) and is a
pure function of its inputs. Matrices are small (d <= 64), so all routines
are plain O(d^3) dense algorithms backed by LAPACK.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import prod

import numpy as np

# A matrix counts as Hermitian when ||H - H^dag||_F <= HERMITIAN_RTOL * max(1, ||H||_F).
HERMITIAN_RTOL = 1e-10


class EigConvergenceError(RuntimeError):
    """Raised when the underlying eigensolver fails to converge."""


@dataclass(frozen=True)
class HermitianEig:
    """Eigendecomposition H = V diag(w) V^dag with w sorted ascending."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T


def frobenius_norm(m: np.ndarray) -> float:
    """sqrt of the sum of squared entry moduli."""
    return float(np.linalg.norm(m))


def hermiticity_defect(m: np.ndarray) -> float:
    """Relative Frobenius distance from m to its Hermitian part."""
    return frobenius_norm(m - m.conj().T) / max(1.0, frobenius_norm(m))


def hermitize(m: np.ndarray) -> np.ndarray:
    """Hermitian part (m + m^dag) / 2."""
    return (m + m.conj().T) / 2


def kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product of two square matrices."""
    a = np.asarray(a)
    b = np.asarray(b)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or b.ndim != 2 or b.shape[0] != b.shape[1]:
        raise ValueError("kron expects square matrices")
    return np.kron(a, b)


def partial_trace(m: np.ndarray, dims: list[int] | tuple[int, ...], keep: int) -> np.ndarray:
    """Reduce a matrix on a tensor-product space to the subsystem `keep`.

    `dims` lists the subsystem dimensions in tensor order; their product must
    equal the matrix dimension. The trace of the result equals the trace of
    the input.
    """
    m = np.asarray(m)
    dims = list(dims)
    if not dims or any(d < 1 for d in dims):
        raise ValueError(f"invalid subsystem dimensions {dims}")
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError("partial_trace expects a square matrix")
    if prod(dims) != m.shape[0]:
        raise ValueError(
            f"subsystem dimensions {dims} do not factor a {m.shape[0]}-dimensional matrix"
        )
    if not 0 <= keep < len(dims):
        raise ValueError(f"keep={keep} out of range for {len(dims)} subsystems")

    n = len(dims)
    t = m.reshape(dims + dims)
    row = []
    col = []
    out: list[int] = []
    next_sym = iter(range(2 * n + 2))
    for sub in range(n):
        if sub == keep:
            a, b = next(next_sym), next(next_sym)
            row.append(a)
            col.append(b)
            out = [a, b]
        else:
            s = next(next_sym)
            row.append(s)
            col.append(s)
    return np.einsum(t, row + col, out)


def hermitian_eig(h: np.ndarray) -> HermitianEig:
    """Eigendecomposition of a Hermitian matrix.

    Inputs within HERMITIAN_RTOL of Hermitian are symmetrized before the
    decomposition; anything farther is rejected.
    """
    h = np.asarray(h)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise ValueError("hermitian_eig expects a square matrix")
    defect = hermiticity_defect(h)
    if defect > HERMITIAN_RTOL:
        raise ValueError(f"matrix is not Hermitian (relative defect {defect:.3e})")
    try:
        w, v = np.linalg.eigh(hermitize(h))
    except np.linalg.LinAlgError as exc:
        raise EigConvergenceError(
            f"eigendecomposition failed to converge for d={h.shape[0]}: {exc}"
        ) from exc
    return HermitianEig(eigenvalues=w, eigenvectors=v)
