"""Observation-indicator models.

Each model produces a 0/1 vector eps of length n whose observed fraction
S_n / n converges (in probability) to a possibly random limit:

* ``iid_bernoulli`` — independent Bernoulli(p), constant limit p.
* ``exchangeable`` — draw the fraction once per replication from a
  LambdaLaw, then conditionally iid Bernoulli; random limit.
* ``periodic`` — a deterministic 0/1 word tiled to length n; constant
  limit equal to the word's density.

Indicators are sampled from their own stream, independent of whatever
stream drives the Gaussian path.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidParameterError
from .lambdalaw import LambdaLaw

__all__ = ["MissingnessModel", "IndicatorPath", "sample_indicators", "observed_fraction"]

_KINDS = ("iid_bernoulli", "exchangeable", "periodic")


@dataclass(frozen=True)
class MissingnessModel:
    kind: str
    lambda_law: LambdaLaw | None = None
    pattern: tuple[int, ...] | None = None

    def __post_init__(self) -> None:
        if self.kind not in _KINDS:
            raise InvalidParameterError(f"unknown missingness kind {self.kind!r}")
        if self.kind == "iid_bernoulli":
            if self.lambda_law is None or self.lambda_law.kind != "point":
                raise InvalidParameterError("iid_bernoulli requires a point lambda law")
        elif self.kind == "exchangeable":
            if self.lambda_law is None:
                raise InvalidParameterError("exchangeable requires a lambda law")
        else:
            if not self.pattern:
                raise InvalidParameterError("periodic pattern must be nonempty")
            if any(b not in (0, 1) for b in self.pattern):
                raise InvalidParameterError("periodic pattern must be a 0/1 word")

    @classmethod
    def iid_bernoulli(cls, p: float) -> "MissingnessModel":
        return cls("iid_bernoulli", lambda_law=LambdaLaw.point(p))

    @classmethod
    def exchangeable(cls, law: LambdaLaw) -> "MissingnessModel":
        return cls("exchangeable", lambda_law=law)

    @classmethod
    def periodic(cls, pattern) -> "MissingnessModel":
        word = tuple(int(b) for b in pattern)
        return cls("periodic", pattern=word)

    def limit_law(self) -> LambdaLaw:
        """Law of the limiting observed fraction implied by the model."""
        if self.kind == "periodic":
            return LambdaLaw.point(sum(self.pattern) / len(self.pattern))
        return self.lambda_law

    def is_deterministic(self) -> bool:
        """True when eps is a fixed word (no indicator randomness)."""
        return self.kind == "periodic"


@dataclass(frozen=True)
class IndicatorPath:
    """eps in {0,1}^n plus the realized limiting fraction: the drawn
    lambda for exchangeable models, p for iid Bernoulli, the pattern
    density for periodic words."""

    eps: np.ndarray
    realized_lambda: float

    def __len__(self) -> int:
        return len(self.eps)


def fixed_pattern(model: MissingnessModel, n: int) -> np.ndarray:
    """The deterministic eps of a periodic model, tiled to length n."""
    if model.kind != "periodic":
        raise InvalidParameterError("fixed_pattern is defined for periodic models only")
    word = np.asarray(model.pattern, dtype=np.uint8)
    reps = -(-n // len(word))
    return np.tile(word, reps)[:n]


def sample_indicators(
    model: MissingnessModel, n: int, stream: np.random.Generator
) -> IndicatorPath:
    """Draw eps_1..eps_n from the model."""
    n = int(n)
    if n < 1:
        raise InvalidParameterError(f"need n >= 1, got {n}")
    if model.kind == "periodic":
        eps = fixed_pattern(model, n)
        return IndicatorPath(eps=eps, realized_lambda=sum(model.pattern) / len(model.pattern))
    if model.kind == "iid_bernoulli":
        lam = model.lambda_law.params[0]
    else:
        lam = float(model.lambda_law.sample(stream))
    eps = (stream.random(n) < lam).astype(np.uint8)
    return IndicatorPath(eps=eps, realized_lambda=lam)


def observed_fraction(eps: IndicatorPath | np.ndarray) -> float:
    """S_n / n for an indicator path."""
    arr = eps.eps if isinstance(eps, IndicatorPath) else np.asarray(eps)
    return float(np.mean(arr))
