"""Principal components of a covariance estimate."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .covest import DataMatrix
from .matrixcore import EigenSpectrum, as_symmetric, eigen_decompose


class DegenerateCovarianceError(ValueError):
    pass


@dataclass(frozen=True)
class PcaResult:
    """Spectrum plus variance accounting.

    ``spectrum.values`` keeps raw eigenvalues (possibly slightly negative for
    indefinite estimates); the ratios use ``max(lambda, 0)``.
    """

    spectrum: EigenSpectrum
    explained_ratio: np.ndarray
    cumulative_ratio: np.ndarray
    total_variance: float

    @property
    def p(self) -> int:
        return self.spectrum.dim


def pca_from_spectrum(spectrum: EigenSpectrum) -> PcaResult:
    clipped = np.clip(spectrum.values, 0.0, None)
    total = float(clipped.sum())
    if not total > 0.0:
        raise DegenerateCovarianceError("degenerate covariance: total variance is not positive")
    explained = clipped / total
    cumulative = np.cumsum(explained)
    # pin the last entry; cumsum rounding can leave it at 1 - eps
    cumulative[-1] = 1.0
    cumulative = np.minimum(cumulative, 1.0)
    return PcaResult(spectrum, explained, cumulative, total)


def pca_from_covariance(sigma) -> PcaResult:
    return pca_from_spectrum(eigen_decompose(as_symmetric(sigma)))


def project_scores(x, result: PcaResult, k: int) -> DataMatrix:
    """Scores of the centred data on the leading ``k`` components."""
    arr = x.values if isinstance(x, DataMatrix) else DataMatrix(x).values
    p = result.p
    if arr.shape[1] != p:
        raise ValueError(f"data has {arr.shape[1]} columns, components have {p}")
    if not 1 <= k <= p:
        raise ValueError(f"k must lie in [1, {p}], got {k}")
    centred = arr - arr.mean(axis=0)
    return DataMatrix(centred @ result.spectrum.vectors[:, :k])
