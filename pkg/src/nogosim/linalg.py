"""Dense complex linear algebra used throughout the package.

Operators and kets are plain complex numpy arrays. The eigensolver is a
cyclic Jacobi iteration applied directly to the Hermitian matrix; every
dimension in this package is tiny (products of qubit/qutrit factors), so
robustness and reproducible output matter more than speed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, NoConvergence, NonHermitian

#: Entrywise Hermiticity tolerance.
TOL_HERMITIAN = 1e-12
#: State normalization tolerance on |norm^2 - 1|.
TOL_NORM = 1e-12
#: Default tolerance for grouping nearly equal eigenvalues.
TOL_DEG = 1e-9
#: Default tolerance for postselection-invariance checks.
TOL_VERIFY = 1e-9
#: Probabilities at or below this cutoff count as impossible conditioning.
TOL_POSTSELECT = 1e-12

_MAX_SWEEPS = 64
_PHASE_CUTOFF = 1e-12


def readonly(arr: np.ndarray) -> np.ndarray:
    """Copy an array and mark it immutable."""
    out = np.array(arr)
    out.setflags(write=False)
    return out


def as_operator(a, name: str = "operator") -> np.ndarray:
    arr = np.asarray(a, dtype=complex)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise DimensionMismatch(f"{name} must be a square matrix, got shape {arr.shape}")
    return arr


def as_ket(v, name: str = "ket") -> np.ndarray:
    arr = np.asarray(v, dtype=complex).reshape(-1)
    if arr.size == 0:
        raise DimensionMismatch(f"{name} must be non-empty")
    return arr


def as_state(v, tol: float = TOL_NORM, name: str = "state") -> np.ndarray:
    """Coerce to a normalized ket; unnormalized input is rejected."""
    arr = as_ket(v, name)
    norm_sq = float(np.vdot(arr, arr).real)
    if abs(norm_sq - 1.0) > tol:
        raise ValueError(f"{name} must be normalized: |norm^2 - 1| = {abs(norm_sq - 1.0):.3e}")
    return arr


def is_hermitian(a, tol: float = TOL_HERMITIAN) -> bool:
    arr = as_operator(a)
    return float(np.max(np.abs(arr - arr.conj().T))) <= tol


def require_hermitian(a, tol: float = TOL_HERMITIAN, name: str = "operator") -> np.ndarray:
    arr = as_operator(a, name)
    dev = float(np.max(np.abs(arr - arr.conj().T)))
    if dev > tol:
        raise NonHermitian(f"{name} deviates from Hermiticity by {dev:.3e} (tol {tol:.1e})")
    return arr


def is_unitary(u, tol: float = 1e-10) -> bool:
    arr = as_operator(u)
    eye = np.eye(arr.shape[0])
    return float(np.max(np.abs(arr.conj().T @ arr - eye))) <= tol


def tensor_product(a, b) -> np.ndarray:
    """Kronecker product; joint index (i, j) sits at flat position i*m + j."""
    return np.kron(as_operator(a, "left factor"), as_operator(b, "right factor"))


def tensor_ket(x, y) -> np.ndarray:
    return np.kron(as_ket(x), as_ket(y))


def outer(x, y=None) -> np.ndarray:
    """Rank-1 operator |x><y| (|x><x| when y is omitted)."""
    xv = as_ket(x)
    yv = xv if y is None else as_ket(y)
    return np.outer(xv, yv.conj())


@dataclass(frozen=True)
class SpectralDecomposition:
    """Eigensystem of a Hermitian matrix.

    ``eigenvalues`` ascend; column k of ``eigenvectors`` belongs to
    ``eigenvalues[k]``. ``eigenspace_groups`` partitions the indices into
    runs whose eigenvalues agree within the grouping tolerance.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    eigenspace_groups: tuple[tuple[int, ...], ...]

    @property
    def dim(self) -> int:
        return int(self.eigenvalues.size)

    def projector(self, k: int) -> np.ndarray:
        v = self.eigenvectors[:, k]
        return np.outer(v, v.conj())

    def eigenspace_projector(self, g: int) -> np.ndarray:
        cols = self.eigenvectors[:, list(self.eigenspace_groups[g])]
        return cols @ cols.conj().T

    def reconstruct(self) -> np.ndarray:
        return (self.eigenvectors * self.eigenvalues) @ self.eigenvectors.conj().T


def _rotate(a: np.ndarray, vec: np.ndarray, p: int, q: int) -> None:
    """One complex Jacobi rotation zeroing a[p, q], accumulated into vec."""
    apq = a[p, q]
    r = abs(apq)
    phase = apq / r
    # smaller-magnitude root of t^2 - 2*zeta*t - 1 = 0 keeps the rotation angle small
    zeta = (a[q, q].real - a[p, p].real) / (2.0 * r)
    if zeta == 0.0:
        t = 1.0
    else:
        t = -math.copysign(1.0, zeta) / (abs(zeta) + math.hypot(1.0, zeta))
    c = 1.0 / math.sqrt(1.0 + t * t)
    s = t * c
    conj_phase = phase.conjugate()

    col_p = a[:, p].copy()
    col_q = a[:, q].copy()
    a[:, p] = c * col_p + s * conj_phase * col_q
    a[:, q] = -s * phase * col_p + c * col_q
    row_p = a[p, :].copy()
    row_q = a[q, :].copy()
    a[p, :] = c * row_p + s * phase * row_q
    a[q, :] = -s * conj_phase * row_p + c * row_q
    a[p, q] = 0.0
    a[q, p] = 0.0
    a[p, p] = a[p, p].real
    a[q, q] = a[q, q].real

    vec_p = vec[:, p].copy()
    vec_q = vec[:, q].copy()
    vec[:, p] = c * vec_p + s * conj_phase * vec_q
    vec[:, q] = -s * phase * vec_p + c * vec_q


def _off_norm(a: np.ndarray) -> float:
    off = a - np.diag(np.diag(a))
    return float(np.linalg.norm(off))


def _fix_column_phases(vectors: np.ndarray) -> np.ndarray:
    """Make the first non-negligible component of every column real positive."""
    fixed = vectors.copy()
    for k in range(fixed.shape[1]):
        col = fixed[:, k]
        nz = np.flatnonzero(np.abs(col) > _PHASE_CUTOFF)
        if nz.size == 0:
            continue
        lead = col[nz[0]]
        col *= lead.conjugate() / abs(lead)
        col[nz[0]] = abs(col[nz[0]])
    return fixed


def _tie_groups(values: np.ndarray) -> list[list[int]]:
    groups = [[0]]
    for i in range(1, values.size):
        if values[i] == values[i - 1]:
            groups[-1].append(i)
        else:
            groups.append([i])
    return groups


def _tolerance_groups(values: np.ndarray, tol_deg: float) -> tuple[tuple[int, ...], ...]:
    groups = [[0]]
    for i in range(1, values.size):
        if values[i] - values[i - 1] <= tol_deg:
            groups[-1].append(i)
        else:
            groups.append([i])
    return tuple(tuple(g) for g in groups)


def spectral_decompose(h, tol_deg: float = TOL_DEG, max_sweeps: int = _MAX_SWEEPS) -> SpectralDecomposition:
    """Eigendecomposition of a Hermitian matrix via cyclic Jacobi rotations.

    Eigenvalues ascend; exact ties are ordered by descending lexicographic
    comparison of the phase-fixed eigenvectors, which keeps identity-like
    matrices in canonical column order. Raises NonHermitian on bad input and
    NoConvergence if the sweep budget is exhausted.
    """
    mat = require_hermitian(h)
    dim = mat.shape[0]
    a = (mat + mat.conj().T) / 2.0
    vec = np.eye(dim, dtype=complex)
    scale = max(1.0, float(np.linalg.norm(a)))
    target = 1e-14 * scale
    pivot_floor = 1e-18 * scale

    if dim > 1:
        converged = False
        for _ in range(max_sweeps):
            if _off_norm(a) <= target:
                converged = True
                break
            for p in range(dim - 1):
                for q in range(p + 1, dim):
                    if abs(a[p, q]) > pivot_floor:
                        _rotate(a, vec, p, q)
        else:
            converged = _off_norm(a) <= target
        if not converged:
            raise NoConvergence(f"Jacobi sweep budget of {max_sweeps} exhausted at dim {dim}")

    eigenvalues = np.diag(a).real.copy()
    order = np.argsort(eigenvalues, kind="stable")
    eigenvalues = eigenvalues[order]
    vectors = _fix_column_phases(vec[:, order])

    perm: list[int] = []
    for group in _tie_groups(eigenvalues):
        if len(group) == 1:
            perm.extend(group)
            continue
        ranked = sorted(group, key=lambda k: tuple((-c.real, -c.imag) for c in vectors[:, k]))
        perm.extend(ranked)
    vectors = vectors[:, perm]

    return SpectralDecomposition(
        eigenvalues=readonly(eigenvalues),
        eigenvectors=readonly(vectors),
        eigenspace_groups=_tolerance_groups(eigenvalues, tol_deg),
    )


def matrix_exponential_skew(h, t: float) -> np.ndarray:
    """exp(-i t H) for Hermitian H, built from its spectral decomposition."""
    dec = spectral_decompose(h)
    phases = np.exp(-1j * float(t) * dec.eigenvalues)
    return (dec.eigenvectors * phases) @ dec.eigenvectors.conj().T
