"""Dense symmetric matrices, Jacobi eigendecomposition and PSD square roots."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

SYMMETRY_TOL = 1e-12
JACOBI_TOL = 1e-12
JACOBI_MAX_SWEEPS = 100
PSD_FLOOR = 1e-10


class NotPositiveSemidefiniteError(ValueError):
    pass


@dataclass(frozen=True)
class SymmetricMatrix:
    """Real symmetric matrix.

    The input is symmetrized as ``(A + A.T) / 2``. ``was_asymmetric``
    records whether that changed any entry by more than ``1e-12``.
    """

    entries: np.ndarray
    was_asymmetric: bool = field(default=False, compare=False)

    def __init__(self, entries):
        a = np.array(entries, dtype=float)
        if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
            raise ValueError(f"expected a non-empty square matrix, got shape {a.shape}")
        sym = (a + a.T) / 2.0
        changed = bool(np.any(np.abs(sym - a) > SYMMETRY_TOL))
        sym.setflags(write=False)
        object.__setattr__(self, "entries", sym)
        object.__setattr__(self, "was_asymmetric", changed)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    @classmethod
    def identity(cls, dim: int) -> "SymmetricMatrix":
        return cls(np.eye(dim))

    @classmethod
    def diag(cls, values) -> "SymmetricMatrix":
        return cls(np.diag(np.asarray(values, dtype=float)))

    def __array__(self, dtype=None, copy=None):
        return self.entries if dtype is None else self.entries.astype(dtype)

    def trace(self) -> float:
        return float(np.trace(self.entries))


@dataclass(frozen=True)
class EigenSpectrum:
    """Eigenvalues in descending order; ``vectors[:, k]`` pairs with ``values[k]``."""

    values: np.ndarray
    vectors: np.ndarray

    @property
    def dim(self) -> int:
        return self.values.shape[0]


def as_symmetric(a) -> SymmetricMatrix:
    return a if isinstance(a, SymmetricMatrix) else SymmetricMatrix(a)


def _jacobi(a: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Cyclic Jacobi sweeps; returns (diagonal, accumulated rotations)."""
    a = a.copy()
    p = a.shape[0]
    v = np.eye(p)
    scale = np.linalg.norm(a)
    if p == 1 or scale == 0.0:
        return np.diag(a).copy(), v
    target = JACOBI_TOL * scale
    for _ in range(JACOBI_MAX_SWEEPS):
        off = np.linalg.norm(a - np.diag(np.diag(a)))
        if off <= target:
            break
        for i in range(p - 1):
            for j in range(i + 1, p):
                aij = a[i, j]
                if aij == 0.0:
                    continue
                diff = a[j, j] - a[i, i]
                if abs(aij) < abs(diff) * 1e-36:
                    t = aij / diff
                else:
                    theta = diff / (2.0 * aij)
                    t = np.copysign(1.0, theta) / (abs(theta) + np.sqrt(theta * theta + 1.0))
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                # A <- J^T A J with J the (i, j) rotation
                ai = a[:, i].copy()
                aj = a[:, j]
                a[:, i] = c * ai - s * aj
                a[:, j] = s * ai + c * aj
                ai = a[i, :].copy()
                aj = a[j, :]
                a[i, :] = c * ai - s * aj
                a[j, :] = s * ai + c * aj
                a[i, j] = a[j, i] = 0.0
                vi = v[:, i].copy()
                vj = v[:, j]
                v[:, i] = c * vi - s * vj
                v[:, j] = s * vi + c * vj
    else:
        raise RuntimeError(f"Jacobi did not converge in {JACOBI_MAX_SWEEPS} sweeps")
    return np.diag(a).copy(), v


def eigen_decompose(a) -> EigenSpectrum:
    """Full eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.

    Eigenvalues are sorted descending. Each eigenvector is signed so that its
    largest-magnitude entry is positive (first such entry on ties).
    """
    m = as_symmetric(a).entries
    bad = np.argwhere(~np.isfinite(m))
    if bad.size:
        i, j = bad[0]
        raise ValueError(f"non-finite entry at index ({i}, {j}): {m[i, j]}")
    values, vectors = _jacobi(m)
    order = np.argsort(-values, kind="stable")
    values = values[order]
    vectors = vectors[:, order]
    pivots = np.argmax(np.abs(vectors), axis=0)
    signs = np.sign(vectors[pivots, np.arange(vectors.shape[1])])
    signs[signs == 0] = 1.0
    vectors = vectors * signs
    values.setflags(write=False)
    vectors.setflags(write=False)
    return EigenSpectrum(values, vectors)


def psd_sqrt(a) -> SymmetricMatrix:
    """Symmetric square root ``B`` with ``B @ B == a``.

    Slightly negative eigenvalues (at most ``1e-10 * |lambda_max|`` below
    zero) are clamped to zero.
    """
    spec = eigen_decompose(a)
    lam = spec.values
    top = np.max(np.abs(lam)) if lam.size else 0.0
    if np.any(lam < -PSD_FLOOR * top):
        raise NotPositiveSemidefiniteError(
            f"matrix is not positive semi-definite (min eigenvalue {lam.min():.6g})"
        )
    root = np.sqrt(np.clip(lam, 0.0, None))
    v = spec.vectors
    return SymmetricMatrix((v * root) @ v.T)
