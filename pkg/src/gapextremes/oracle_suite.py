"""Equivalence suites pitting the closed-form evaluators against the
brute-force limit samplers.

``counts_suite`` checks the joint count pmf cell by cell against the
empirical distribution of the thinning sampler; ``maxima_suite`` checks
the locations-and-heights laws against the Gumbel-race sampler.  Both are
deterministic given (samples, seed) and report one z-scored row per
checked quantity.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .lambdalaw import LambdaLaw
from .limit_laws import (
    LimitLawParams,
    joint_counts_pmf,
    locations_cdf,
    locations_heights_cdf,
)
from .limit_oracle import sample_limit_counts, sample_limit_maxima_locations
from .streams import substream

__all__ = ["CheckRow", "COUNT_SETTINGS", "counts_suite", "maxima_suite"]


@dataclass(frozen=True)
class CheckRow:
    check_id: str
    samples: int
    empirical: float
    theory: float
    z: float
    passed: bool


def _check(check_id: str, emp: float, theory: float, n: int, sigma: float) -> CheckRow:
    se = math.sqrt(theory * (1.0 - theory) / n)
    if se > 0.0:
        z = (emp - theory) / se
    else:
        z = 0.0 if emp == theory else math.inf
    return CheckRow(check_id, n, emp, theory, z, abs(z) <= sigma)


#: (gamma, lambda law, family measure) — covers every gamma, law and
#: measure the count-pmf machinery branches on, at levels x=1 > y=0
COUNT_SETTINGS = (
    (0.0, LambdaLaw.point(0.5), 1.0),
    (0.0, LambdaLaw.uniform(0.0, 1.0), 0.5),
    (0.5, LambdaLaw.beta(2.0, 2.0), 1.0),
    (0.5, LambdaLaw.point(0.5), 0.5),
    (1.0, LambdaLaw.uniform(0.0, 1.0), 1.0),
    (1.0, LambdaLaw.beta(2.0, 2.0), 0.5),
)

COUNT_LEVELS = (0.0, 1.0)  # y (low), x (high)


def counts_suite(
    samples: int = 1_000_000,
    seed: int = 0,
    sigma: float = 4.0,
    min_prob: float = 1e-4,
) -> list[CheckRow]:
    """Cellwise pmf agreement for every setting in COUNT_SETTINGS.

    Every joint count cell with limit probability >= ``min_prob`` is
    checked within ``sigma`` binomial standard errors.  Candidate cells
    come from the empirical support: a cell of probability min_prob is
    expected ``samples * min_prob`` times, so requiring a quarter of that
    cannot lose a qualifying cell in any realistic draw.

    Below 25 expected hits the normal approximation behind the z-score
    breaks down, so ``min_prob`` is floored at 25 / samples; at the
    standard contract size of 1e6 samples the floor is inactive.
    """
    rows = []
    min_prob = max(min_prob, 25.0 / samples)
    support_floor = max(5, int(samples * min_prob * 0.25))
    y_level, x_level = COUNT_LEVELS
    for idx, (gamma, law, measure) in enumerate(COUNT_SETTINGS):
        params = LimitLawParams(gamma, law)
        stream = substream(seed, idx, "oracle-counts")
        batch = sample_limit_counts(params, measure, COUNT_LEVELS, stream, size=samples)
        # joint cells (observed@x, missed@x, observed@y, missed@y)
        cells = np.stack([batch.observed[1], batch.missed[1], batch.observed[0], batch.missed[0]])
        keys = np.ravel_multi_index(cells, (1 << 15,) * 4, mode="raise")
        uniq, counts = np.unique(keys, return_counts=True)
        keep = counts >= support_floor
        label = f"g{gamma:g}-{law.describe()}-m{measure:g}"
        for key, hits in zip(uniq[keep], counts[keep]):
            k1, k2, k3, k4 = np.unravel_index(key, (1 << 15,) * 4)
            theory = joint_counts_pmf(
                params, measure, x_level, y_level, int(k1), int(k2), int(k3), int(k4)
            )
            if theory < min_prob:
                continue
            rows.append(
                _check(
                    f"counts[{label}]({k1},{k2},{k3},{k4})",
                    hits / samples,
                    theory,
                    samples,
                    sigma,
                )
            )
    return rows


MAXIMA_PARAMS = LimitLawParams(0.5, LambdaLaw.beta(2.0, 3.0))
MAXIMA_ST_GRID = (0.25, 0.5, 0.75)
MAXIMA_XY_GRID = (-0.5, 0.3, 1.2)


def maxima_suite(
    samples: int = 1_000_000, seed: int = 0, sigma: float = 4.0
) -> list[CheckRow]:
    """Locations-and-heights grid plus location-only laws for all pairs."""
    params = MAXIMA_PARAMS
    stream = substream(seed, 0, "oracle-maxima")
    batch = sample_limit_maxima_locations(params, stream, size=samples)
    rows = []

    s_hits = {s: batch.observed_loc <= s for s in MAXIMA_ST_GRID}
    t_hits = {t: batch.missed_loc <= t for t in MAXIMA_ST_GRID}
    x_hits = {x: batch.observed_max <= x for x in MAXIMA_XY_GRID}
    y_hits = {y: batch.missed_max <= y for y in MAXIMA_XY_GRID}
    for s in MAXIMA_ST_GRID:
        for t in MAXIMA_ST_GRID:
            for x in MAXIMA_XY_GRID:
                for y in MAXIMA_XY_GRID:
                    emp = float(np.mean(s_hits[s] & t_hits[t] & x_hits[x] & y_hits[y]))
                    theory = locations_heights_cdf(params, "obs_missed", s, t, x, y)
                    rows.append(
                        _check(f"heights({s},{t},{x},{y})", emp, theory, samples, sigma)
                    )

    overall_loc = batch.overall_loc
    pair_locs = {
        "obs_missed": (batch.observed_loc, batch.missed_loc),
        "obs_all": (batch.observed_loc, overall_loc),
        "missed_all": (batch.missed_loc, overall_loc),
    }
    for pair, (first, second) in pair_locs.items():
        for s in MAXIMA_ST_GRID:
            for t in MAXIMA_ST_GRID:
                emp = float(np.mean((first <= s) & (second <= t)))
                theory = locations_cdf(params.lambda_law, pair, s, t)
                rows.append(_check(f"locations[{pair}]({s},{t})", emp, theory, samples, sigma))
    return rows
