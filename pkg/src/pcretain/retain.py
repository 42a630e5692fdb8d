"""Component-retention rules: Kaiser-Guttman, scree largest drop, cumulative variance."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .matrixcore import EigenSpectrum
from .pca import PcaResult

# cumulative ratios are float sums; a hair below the threshold still counts
RATIO_SLACK = 1e-12


@dataclass(frozen=True)
class RetentionConfig:
    kgc_threshold: float = 1.0
    cv_threshold: float = 0.80

    def __post_init__(self):
        _check_fraction(self.cv_threshold, "cv_threshold")


@dataclass(frozen=True)
class RetentionDecision:
    kgc: int
    scree: int
    cumvar: int
    threshold_used: float
    kgc_threshold: float
    gaps: np.ndarray

    def as_tuple(self) -> tuple[int, int, int]:
        return (self.kgc, self.scree, self.cumvar)


@dataclass(frozen=True)
class ParetoData:
    component_ids: tuple[str, ...]
    individual_percent: np.ndarray
    cumulative_percent: np.ndarray
    cutoff_percent: float
    cutoff_index: int


def _check_fraction(value: float, name: str) -> None:
    if not 0.0 < value <= 1.0:
        raise ValueError(f"{name} must lie in (0, 1], got {value}")


def _values(spectrum) -> np.ndarray:
    if isinstance(spectrum, PcaResult):
        spectrum = spectrum.spectrum
    if isinstance(spectrum, EigenSpectrum):
        return np.asarray(spectrum.values)
    return np.asarray(spectrum, dtype=float)


def kaiser_guttman(spectrum, threshold: float = 1.0) -> int:
    """Number of eigenvalues strictly above ``threshold``."""
    return int(np.count_nonzero(_values(spectrum) > threshold))


def scree_largest_drop(spectrum) -> int:
    """Position ``k`` (1-based) of the largest drop ``lambda_k - lambda_{k+1}``.

    Ties go to the smallest ``k``.
    """
    lam = _values(spectrum)
    if lam.size < 2:
        raise ValueError("scree test needs at least two eigenvalues")
    return int(np.argmax(lam[:-1] - lam[1:])) + 1


def cumulative_variance_rule(result: PcaResult, threshold: float = 0.80) -> int:
    """Smallest ``k`` whose cumulative explained ratio reaches ``threshold``."""
    _check_fraction(threshold, "threshold")
    hits = np.flatnonzero(result.cumulative_ratio >= threshold - RATIO_SLACK)
    return int(hits[0]) + 1


def decide_all(result: PcaResult, config: RetentionConfig | None = None) -> RetentionDecision:
    config = config or RetentionConfig()
    lam = _values(result)
    return RetentionDecision(
        kgc=kaiser_guttman(lam, config.kgc_threshold),
        scree=scree_largest_drop(lam) if lam.size >= 2 else 1,
        cumvar=cumulative_variance_rule(result, config.cv_threshold),
        threshold_used=config.cv_threshold,
        kgc_threshold=config.kgc_threshold,
        gaps=lam[:-1] - lam[1:],
    )


def pareto_data(result: PcaResult, cutoff: float = 0.80) -> ParetoData:
    _check_fraction(cutoff, "cutoff")
    p = result.p
    return ParetoData(
        component_ids=tuple(f"PC-{k}" for k in range(1, p + 1)),
        individual_percent=100.0 * result.explained_ratio,
        cumulative_percent=100.0 * result.cumulative_ratio,
        cutoff_percent=100.0 * cutoff,
        cutoff_index=cumulative_variance_rule(result, cutoff),
    )
