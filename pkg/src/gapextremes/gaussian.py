"""Samplers for length-n standard Gaussian paths.

Three stationary families, all with unit marginal variance:

* ``iid`` — independent coordinates.
* ``one_factor`` — Y_j = sqrt(1-rho_n) Z_j + sqrt(rho_n) xi with a shared
  standard-normal factor xi and rho_n = gamma / ln n.  Conditional on xi
  the coordinates are independent, so finite-n event probabilities reduce
  to one-dimensional integrals; this makes it the reference family for
  exact verification.
* ``log_decay`` — genuine stationary covariance r_k = gamma / ln(k + shift),
  whose lag-k correlation times ln k tends to gamma.  Sampled exactly by
  circulant embedding (FFT) when the embedding is positive semidefinite.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidParameterError, NonEmbeddableCovarianceError

__all__ = [
    "FAMILIES",
    "CovarianceSpec",
    "GaussianModel",
    "SamplePath",
    "build_model",
    "sample_path",
    "model_correlation",
]

FAMILIES = ("iid", "one_factor", "log_decay")

#: relative tolerance for clipping round-off negatives in the embedding spectrum
SPECTRUM_CLIP_REL = 1e-8


@dataclass(frozen=True)
class CovarianceSpec:
    """Covariance family and its limiting dependence parameter.

    ``gamma`` is the limit of r_k * ln k; ``shift`` enters only the
    log_decay family, whose lag-k correlation is gamma / ln(k + shift).
    """

    family: str
    gamma: float = 0.0
    shift: float = math.e

    def __post_init__(self) -> None:
        if self.family not in FAMILIES:
            raise InvalidParameterError(f"unknown family {self.family!r}")
        if not np.isfinite(self.gamma) or self.gamma < 0.0:
            raise InvalidParameterError(f"gamma must be finite and >= 0, got {self.gamma}")
        if self.family == "iid" and self.gamma != 0.0:
            raise InvalidParameterError("iid family requires gamma = 0")
        if self.family == "log_decay" and self.shift <= 1.0 - math.e:
            raise InvalidParameterError(
                f"log_decay shift must exceed 1 - e so ln(k + shift) is defined, got {self.shift}"
            )


@dataclass(frozen=True)
class GaussianModel:
    """A sampler specification for a fixed path length ``n``."""

    n: int
    spec: CovarianceSpec
    rho_n: float = 0.0
    spectrum: np.ndarray | None = field(default=None, repr=False, compare=False)

    @property
    def family(self) -> str:
        return self.spec.family

    @property
    def gamma(self) -> float:
        return self.spec.gamma


@dataclass(frozen=True)
class SamplePath:
    """One realization of the model; ``latent_factor`` is the shared xi
    for one_factor models and None otherwise."""

    values: np.ndarray
    latent_factor: float | None = None

    def __len__(self) -> int:
        return len(self.values)


def _log_decay_correlation(gamma: float, shift: float, k) -> np.ndarray:
    return gamma / np.log(np.asarray(k, dtype=float) + shift)


def build_model(n: int, spec: CovarianceSpec) -> GaussianModel:
    """Validate parameters and precompute whatever sampling needs.

    For log_decay this builds and spectrally validates the circulant
    embedding of the covariance over the next power of two >= 2n.

    Raises
    ------
    InvalidParameterError
        n too small, gamma >= ln n for one_factor, or a log_decay lag
        correlation with modulus >= 1.
    NonEmbeddableCovarianceError
        The embedding spectrum has an entry below -tol_clip.
    """
    n = int(n)
    if spec.family == "one_factor":
        if n < 3:
            raise InvalidParameterError(f"one_factor requires n >= 3, got {n}")
        if spec.gamma >= math.log(n):
            raise InvalidParameterError(
                f"one_factor requires gamma < ln n ({math.log(n):.6g}), got {spec.gamma}"
            )
        return GaussianModel(n=n, spec=spec, rho_n=spec.gamma / math.log(n))

    if n < 2:
        raise InvalidParameterError(f"need n >= 2, got {n}")
    if spec.family == "iid":
        return GaussianModel(n=n, spec=spec)

    # log_decay: the lag correlations themselves must be valid ...
    lags = np.arange(1, n)
    r = _log_decay_correlation(spec.gamma, spec.shift, lags)
    bad = np.abs(r) >= 1.0
    if bad.any():
        k = int(lags[bad][0])
        raise InvalidParameterError(
            f"log_decay correlation at lag {k} is {r[bad][0]:.6g}; |r_k| < 1 required "
            f"(gamma={spec.gamma}, shift={spec.shift})"
        )
    # ... and the circulant embedding must be (numerically) psd.
    m = 1 << (2 * n - 1).bit_length()
    row = np.empty(m)
    row[0] = 1.0
    circ_lags = np.minimum(np.arange(1, m), m - np.arange(1, m))
    row[1:] = _log_decay_correlation(spec.gamma, spec.shift, circ_lags)
    spectrum = np.fft.fft(row).real
    tol_clip = SPECTRUM_CLIP_REL * spectrum.max()
    if spectrum.min() < -tol_clip:
        raise NonEmbeddableCovarianceError(
            f"embedding spectrum reaches {spectrum.min():.3e} < -{tol_clip:.3e} at "
            f"size {m}; r_k = {spec.gamma:g}/ln(k+{spec.shift:g}) is not embeddable for n={n}"
        )
    spectrum = np.maximum(spectrum, 0.0)
    spectrum.setflags(write=False)
    return GaussianModel(n=n, spec=spec, spectrum=spectrum)


def sample_path(model: GaussianModel, stream: np.random.Generator) -> SamplePath:
    """Draw one path from the model using the given stream.

    The draw order per call is fixed, so identical (model, stream state)
    yields bit-identical paths.
    """
    n = model.n
    if model.family == "iid":
        return SamplePath(values=stream.standard_normal(n))
    if model.family == "one_factor":
        z = stream.standard_normal(n)
        xi = float(stream.standard_normal())
        values = math.sqrt(1.0 - model.rho_n) * z
        values += math.sqrt(model.rho_n) * xi
        return SamplePath(values=values, latent_factor=xi)
    # log_decay: complex white noise shaped by the embedding spectrum; the
    # real part of the length-m transform carries the target covariance.
    spectrum = model.spectrum
    m = len(spectrum)
    noise = stream.standard_normal(m) + 1j * stream.standard_normal(m)
    y = np.fft.fft(np.sqrt(spectrum / m) * noise)
    return SamplePath(values=y.real[:n].copy())


def model_correlation(model: GaussianModel, k: int) -> float:
    """Exact model covariance at lag ``k`` (unit variance at lag 0)."""
    k = int(k)
    if not 0 <= k < model.n:
        raise InvalidParameterError(f"lag must satisfy 0 <= k < n={model.n}, got {k}")
    if k == 0:
        return 1.0
    if model.family == "iid":
        return 0.0
    if model.family == "one_factor":
        return model.rho_n
    return float(_log_decay_correlation(model.gamma, model.spec.shift, k))
