"""Distributions on [0, 1] for the limiting observed fraction.

The same law object is used in two roles: drawing the fraction for
exchangeable missingness simulation, and taking expectations over it in
the closed-form limit evaluators (exact sums for atomic laws, Gauss
quadrature for the continuous ones).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import special

from .errors import InvalidParameterError

__all__ = ["LambdaLaw"]

_KINDS = ("point", "discrete", "uniform", "beta")


@dataclass(frozen=True)
class LambdaLaw:
    """Law of a random variable supported on [0, 1].

    Construct through the classmethods; ``params`` holds the raw
    parameters in a hashable form so laws can key caches.
    """

    kind: str
    params: tuple

    def __post_init__(self) -> None:
        if self.kind not in _KINDS:
            raise InvalidParameterError(f"unknown lambda-law kind {self.kind!r}")

    # -- constructors ------------------------------------------------------

    @classmethod
    def point(cls, p: float) -> "LambdaLaw":
        p = float(p)
        if not 0.0 <= p <= 1.0:
            raise InvalidParameterError(f"point mass must lie in [0,1], got {p}")
        return cls("point", (p,))

    @classmethod
    def discrete(cls, values, weights) -> "LambdaLaw":
        values = tuple(float(v) for v in values)
        weights = tuple(float(w) for w in weights)
        if len(values) != len(weights) or not values:
            raise InvalidParameterError("values and weights must be equal-length and nonempty")
        if any(not 0.0 <= v <= 1.0 for v in values):
            raise InvalidParameterError("discrete atoms must lie in [0,1]")
        if any(w <= 0.0 for w in weights):
            raise InvalidParameterError("weights must be positive")
        total = sum(weights)
        if abs(total - 1.0) > 1e-9:
            raise InvalidParameterError(f"weights must sum to 1, got {total}")
        weights = tuple(w / total for w in weights)
        return cls("discrete", (values, weights))

    @classmethod
    def uniform(cls, a: float, b: float) -> "LambdaLaw":
        a, b = float(a), float(b)
        if not 0.0 <= a < b <= 1.0:
            raise InvalidParameterError(f"need 0 <= a < b <= 1, got a={a}, b={b}")
        return cls("uniform", (a, b))

    @classmethod
    def beta(cls, alpha: float, beta: float) -> "LambdaLaw":
        alpha, beta = float(alpha), float(beta)
        if alpha <= 0.0 or beta <= 0.0:
            raise InvalidParameterError("beta shape parameters must be positive")
        return cls("beta", (alpha, beta))

    # -- queries -----------------------------------------------------------

    def mean(self) -> float:
        if self.kind == "point":
            return self.params[0]
        if self.kind == "discrete":
            values, weights = self.params
            return float(np.dot(values, weights))
        if self.kind == "uniform":
            a, b = self.params
            return 0.5 * (a + b)
        alpha, beta = self.params
        return alpha / (alpha + beta)

    def is_atomic(self) -> bool:
        """True when expectations over the law are exact finite sums."""
        return self.kind in ("point", "discrete")

    def sample(self, rng: np.random.Generator, size: int | None = None) -> np.ndarray | float:
        if self.kind == "point":
            p = self.params[0]
            return p if size is None else np.full(size, p)
        if self.kind == "discrete":
            values, weights = self.params
            return rng.choice(np.asarray(values), size=size, p=np.asarray(weights))
        if self.kind == "uniform":
            a, b = self.params
            return rng.uniform(a, b, size=size)
        alpha, beta = self.params
        return rng.beta(alpha, beta, size=size)

    def nodes(self, n: int) -> tuple[np.ndarray, np.ndarray]:
        """Nodes and weights so that E[f] ~= sum(w * f(nodes)).

        Exact for atomic laws regardless of ``n``; Gauss-Legendre /
        Gauss-Jacobi with ``n`` nodes otherwise.  Weights are normalized
        to sum to one.
        """
        if self.kind == "point":
            return np.array([self.params[0]]), np.array([1.0])
        if self.kind == "discrete":
            values, weights = self.params
            return np.asarray(values, dtype=float), np.asarray(weights, dtype=float)
        if self.kind == "uniform":
            a, b = self.params
            t, w = np.polynomial.legendre.leggauss(n)
            return 0.5 * (b - a) * t + 0.5 * (b + a), w / w.sum()
        alpha, beta = self.params
        # roots_jacobi weight (1-x)^a (1+x)^b on [-1,1]; map x -> (x+1)/2 so the
        # density u^(alpha-1) (1-u)^(beta-1) needs a=beta-1, b=alpha-1.
        x, w = special.roots_jacobi(n, beta - 1.0, alpha - 1.0)
        return 0.5 * (x + 1.0), w / w.sum()

    def complement(self) -> "LambdaLaw":
        """Law of 1 - X when X follows this law."""
        if self.kind == "point":
            return LambdaLaw.point(1.0 - self.params[0])
        if self.kind == "discrete":
            values, weights = self.params
            return LambdaLaw.discrete([1.0 - v for v in values], weights)
        if self.kind == "uniform":
            a, b = self.params
            return LambdaLaw.uniform(1.0 - b, 1.0 - a)
        alpha, beta = self.params
        return LambdaLaw.beta(beta, alpha)

    def describe(self) -> str:
        """Short human/CSV-friendly rendering, e.g. ``point(0.5)``."""
        if self.kind == "point":
            return f"point({self.params[0]:g})"
        if self.kind == "discrete":
            values, weights = self.params
            atoms = ",".join(f"{v:g}:{w:g}" for v, w in zip(values, weights))
            return f"discrete({atoms})"
        if self.kind == "uniform":
            a, b = self.params
            return f"uniform({a:g},{b:g})"
        alpha, beta = self.params
        return f"beta({alpha:g},{beta:g})"
