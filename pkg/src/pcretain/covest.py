"""Covariance estimators for an n x p data matrix.

Five estimators share one entry point, :func:`estimate`:

* ``MLE``: divisor ``n``.
* ``UNBIASED``: divisor ``n - 1``.
* ``LEDOIT_WOLF``: convex shrinkage of the MLE toward ``mu * I`` with the
  Ledoit & Wolf (2004) plug-in intensity.
* ``PDC``: pairwise differences of observations. Algebraically equal to
  ``UNBIASED``; kept as its own code path so the identity can be tested.
* ``SPDC``: standardized PDC. Columns are scaled to unit PDC variance, the
  resulting correlation-like matrix is shrunk toward the identity, then
  rescaled. This is a documented stand-in; see ``spdc_covariance``.
"""

from __future__ import annotations

import enum
import warnings
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np

from .matrixcore import SymmetricMatrix


class InsufficientObservationsError(ValueError):
    pass


class DegenerateDataWarning(UserWarning):
    pass


@dataclass(frozen=True)
class DataMatrix:
    """Observations in rows, variables in columns."""

    values: np.ndarray
    labels: tuple[str, ...] | None = None
    constant_columns: tuple[int, ...] = field(default=(), compare=False)

    def __init__(self, values, labels: Sequence[str] | None = None):
        x = np.array(values, dtype=float)
        if x.ndim == 1:
            x = x[:, None]
        if x.ndim != 2 or x.shape[0] < 1 or x.shape[1] < 1:
            raise ValueError(f"expected a non-empty 2-D array, got shape {x.shape}")
        bad = np.argwhere(~np.isfinite(x))
        if bad.size:
            r, c = bad[0]
            raise ValueError(f"non-finite value at row {r}, column {c}")
        if labels is not None:
            labels = tuple(str(s) for s in labels)
            if len(labels) != x.shape[1]:
                raise ValueError(f"{len(labels)} labels for {x.shape[1]} columns")
        x.setflags(write=False)
        const = tuple(int(j) for j in np.flatnonzero(np.ptp(x, axis=0) == 0)) if x.shape[0] > 1 else ()
        object.__setattr__(self, "values", x)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "constant_columns", const)

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def p(self) -> int:
        return self.values.shape[1]

    def __array__(self, dtype=None, copy=None):
        return self.values if dtype is None else self.values.astype(dtype)


class Estimator(str, enum.Enum):
    MLE = "MLE"
    UNBIASED = "UNBIASED"
    LEDOIT_WOLF = "LEDOIT_WOLF"
    PDC = "PDC"
    SPDC = "SPDC"

    @classmethod
    def parse(cls, text: str) -> "Estimator":
        key = text.strip().upper().replace("-", "_")
        aliases = {"LW": "LEDOIT_WOLF", "LEDOITWOLF": "LEDOIT_WOLF"}
        try:
            return cls(aliases.get(key, key))
        except ValueError:
            choices = ", ".join(e.value for e in cls)
            raise ValueError(f"unknown estimator {text!r}; choose from {choices}") from None


@dataclass(frozen=True)
class EstimatorKind:
    tag: Estimator
    spdc_shrinkage: float = 0.1

    def __post_init__(self):
        object.__setattr__(self, "tag", Estimator(self.tag))
        if not 0.0 <= self.spdc_shrinkage <= 1.0:
            raise ValueError(f"spdc_shrinkage must lie in [0, 1], got {self.spdc_shrinkage}")

    @property
    def name(self) -> str:
        return self.tag.value


class LedoitWolfResult(NamedTuple):
    covariance: SymmetricMatrix
    shrinkage: float

    @property
    def degenerate(self) -> bool:
        """True for all-constant data (zero estimate, full shrinkage)."""
        return self.shrinkage == 1.0 and not np.any(self.covariance.entries)


def _as_data(x) -> np.ndarray:
    arr = x.values if isinstance(x, DataMatrix) else DataMatrix(x).values
    if arr.shape[0] < 2:
        raise InsufficientObservationsError(
            f"insufficient observations: need n >= 2, got n = {arr.shape[0]}"
        )
    return arr


def _scatter(x: np.ndarray) -> np.ndarray:
    xc = x - x.mean(axis=0)
    return xc.T @ xc


def mle_covariance(x) -> SymmetricMatrix:
    arr = _as_data(x)
    return SymmetricMatrix(_scatter(arr) / arr.shape[0])


def unbiased_covariance(x) -> SymmetricMatrix:
    arr = _as_data(x)
    return SymmetricMatrix(_scatter(arr) / (arr.shape[0] - 1))


def ledoit_wolf(x) -> LedoitWolfResult:
    """Ledoit-Wolf shrinkage toward a scaled identity.

    With ``S`` the MLE covariance, ``mu = tr(S) / p`` and Frobenius norms
    normalized by ``p``::

        d2 = ||S - mu I||^2 / p
        b2 = min(d2, sum_k ||x_k x_k' - S||^2 / (p n^2))
        rho = b2 / d2

    and the estimate is ``rho * mu * I + (1 - rho) * S``.
    All-constant data give the zero matrix, ``rho = 1`` and a warning.
    """
    arr = _as_data(x)
    n, p = arr.shape
    xc = arr - arr.mean(axis=0)
    s = xc.T @ xc / n
    mu = np.trace(s) / p
    if mu <= 0.0:
        warnings.warn("all columns are constant; Ledoit-Wolf estimate is zero", DegenerateDataWarning, stacklevel=2)
        return LedoitWolfResult(SymmetricMatrix(np.zeros((p, p))), 1.0)
    target = mu * np.eye(p)
    d2 = np.sum((s - target) ** 2) / p
    if d2 <= 0.0:
        # S already equals the target
        return LedoitWolfResult(SymmetricMatrix(s), 0.0)
    # sum_k ||x_k x_k' - S||^2 = sum_k ||x_k||^4 - n ||S||^2
    sq = np.sum(xc * xc, axis=1)
    b2_bar = (np.sum(sq * sq) - n * np.sum(s * s)) / (p * n * n)
    b2 = min(max(b2_bar, 0.0), d2)
    rho = float(min(max(b2 / d2, 0.0), 1.0))
    return LedoitWolfResult(SymmetricMatrix(rho * target + (1.0 - rho) * s), rho)


def pdc_covariance(x) -> SymmetricMatrix:
    """Average outer product of pairwise observation differences, halved.

    Sums over unordered pairs ``i < j`` and divides by ``n (n - 1)``.
    """
    arr = _as_data(x)
    n, p = arr.shape
    acc = np.zeros((p, p))
    for i in range(n - 1):
        d = arr[i + 1:] - arr[i]
        acc += d.T @ d
    return SymmetricMatrix(acc / (n * (n - 1)))


def spdc_covariance(x, shrinkage: float = 0.1) -> SymmetricMatrix:
    """Standardized pairwise-differences covariance with identity shrinkage.

    Steps: ``d_j = sqrt(PDC_jj)``; divide column ``j`` by ``d_j`` (columns
    with ``d_j == 0`` stay unscaled); take the PDC of the standardized data
    ``R``; shrink ``R_s = (1 - shrinkage) R + shrinkage I``; rescale
    ``Sigma_ij = d_i d_j R_s_ij``.
    """
    if not 0.0 <= shrinkage <= 1.0:
        raise ValueError(f"shrinkage must lie in [0, 1], got {shrinkage}")
    arr = _as_data(x)
    p = arr.shape[1]
    d = np.sqrt(np.clip(np.diag(pdc_covariance(arr).entries), 0.0, None))
    scale = np.where(d > 0.0, d, 1.0)
    r = pdc_covariance(arr / scale).entries
    r_shrunk = (1.0 - shrinkage) * r + shrinkage * np.eye(p)
    return SymmetricMatrix(r_shrunk * np.outer(d, d))


def estimate(x, kind: EstimatorKind | Estimator | str = Estimator.MLE) -> SymmetricMatrix:
    """Dispatch to the estimator named by ``kind``."""
    if not isinstance(kind, EstimatorKind):
        kind = EstimatorKind(Estimator.parse(kind) if isinstance(kind, str) else kind)
    tag = kind.tag
    if tag is Estimator.MLE:
        return mle_covariance(x)
    if tag is Estimator.UNBIASED:
        return unbiased_covariance(x)
    if tag is Estimator.LEDOIT_WOLF:
        return ledoit_wolf(x).covariance
    if tag is Estimator.PDC:
        return pdc_covariance(x)
    return spdc_covariance(x, kind.spdc_shrinkage)
