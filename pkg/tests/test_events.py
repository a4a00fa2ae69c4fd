import math

import numpy as np
import pytest

from gapextremes import limit_laws
from gapextremes.errors import ConfigError
from gapextremes.events import (
    CompiledEvents,
    CountTerm,
    Event,
    LocationTerm,
    OrderStatTerm,
    parse_event,
    theory_finite_n,
    theory_limit,
)
from gapextremes.extremes import (
    IntervalFamily,
    LevelParams,
    exceedance_counts,
    kth_maximum,
    max_location,
)
from gapextremes.lambdalaw import LambdaLaw
from gapextremes.limit_laws import LimitLawParams

PARAMS = LimitLawParams(0.5, LambdaLaw.beta(2.0, 2.0))
INF = math.inf


def test_parse_event_roundtrip():
    doc = {
        "id": "ev",
        "terms": [
            {"type": "order_stat", "class": "observed", "k": 2, "x": 0.5},
            {"type": "count", "class": "missed", "intervals": [[0.0, 0.5]], "x": 0.0,
             "op": "eq", "value": 0},
            {"type": "location", "class": "all", "s": 0.25},
        ],
    }
    event = parse_event(doc)
    assert event.event_id == "ev"
    assert event.terms[0] == OrderStatTerm("observed", 2, 0.5)
    assert isinstance(event.terms[1], CountTerm)
    assert event.terms[2] == LocationTerm("all", 0.25)


def test_parse_event_strict_keys():
    with pytest.raises(ConfigError):
        parse_event({"id": "e", "terms": [], "extra": 1})
    with pytest.raises(ConfigError):
        parse_event({"id": "e", "terms": [{"type": "order_stat", "class": "observed",
                                           "k": 1, "x": 0.0, "y": 1.0}]})
    with pytest.raises(ConfigError):
        parse_event({"id": "e", "terms": [{"type": "nope"}]})
    with pytest.raises(ConfigError):
        parse_event({"id": "e", "terms": []})


def test_compiled_events_match_direct_functions():
    rng = np.random.default_rng(123)
    n = 200
    family = IntervalFamily.of((0.1, 0.4), (0.6, 0.9))
    events = [
        Event("a", (OrderStatTerm("observed", 1, 0.0), OrderStatTerm("missed", 1, 0.5))),
        Event("b", (OrderStatTerm("all", 3, -0.5),)),
        Event("c", (CountTerm("observed", family, 0.0, "eq", 0),
                    CountTerm("missed", family, 0.2, "le", 2))),
        Event("d", (LocationTerm("observed", 0.5), LocationTerm("all", 0.25))),
        Event("e", (OrderStatTerm("observed", 2, 0.3), LocationTerm("missed", 0.75))),
    ]
    compiled = CompiledEvents(events, n)
    lp = LevelParams.for_length(n)
    for _ in range(50):
        values = rng.standard_normal(n)
        eps = rng.random(n) < rng.random()
        got = compiled(values, eps)
        rec = exceedance_counts(values, eps, [0.0, 0.2], [family])
        expected = [
            kth_maximum(values, eps, "observed", 1) <= lp.level(0.0)
            and kth_maximum(values, eps, "missed", 1) <= lp.level(0.5),
            kth_maximum(values, eps, "all", 3) <= lp.level(-0.5),
            rec.observed[0, 0] == 0 and rec.missed[1, 0] <= 2,
            (max_location(values, eps, "observed") or n + 1) <= math.floor(0.5 * n)
            and (max_location(values, eps, "all") or n + 1) <= math.floor(0.25 * n),
            kth_maximum(values, eps, "observed", 2) <= lp.level(0.3)
            and (max_location(values, eps, "missed") or n + 1) <= math.floor(0.75 * n),
        ]
        assert got.tolist() == expected


def test_compiled_events_empty_class_location_is_false():
    event = Event("loc", (LocationTerm("missed", 1.0),))
    compiled = CompiledEvents([event], 10)
    values = np.zeros(10)
    assert not compiled(values, np.ones(10, dtype=bool))[0]
    assert compiled(values, np.zeros(10, dtype=bool))[0]


# ---------------------------------------------------------------------------
# limit-theory recognition


def test_theory_order_stat_pairs():
    ev = Event("x", (OrderStatTerm("observed", 2, 0.1), OrderStatTerm("missed", 3, 0.4)))
    assert theory_limit(ev, PARAMS) == limit_laws.order_stats_obs_missed_cdf(PARAMS, 2, 3, 0.1, 0.4)

    ev = Event("x", (OrderStatTerm("observed", 2, 0.1), OrderStatTerm("all", 3, 0.4)))
    assert theory_limit(ev, PARAMS) == limit_laws.order_stats_vs_all_cdf(PARAMS, "observed", 2, 3, 0.1, 0.4)

    ev = Event("x", (OrderStatTerm("missed", 1, 0.5), OrderStatTerm("all", 2, 0.2)))
    assert theory_limit(ev, PARAMS) == limit_laws.order_stats_vs_all_cdf(PARAMS, "missed", 1, 2, 0.5, 0.2)


def test_theory_order_stat_marginals():
    ev = Event("x", (OrderStatTerm("observed", 2, 0.1),))
    assert theory_limit(ev, PARAMS) == limit_laws.order_stats_obs_missed_cdf(PARAMS, 2, 1, 0.1, INF)
    ev = Event("x", (OrderStatTerm("all", 2, 0.1),))
    assert theory_limit(ev, PARAMS) == limit_laws.order_stats_vs_all_cdf(PARAMS, "observed", 1, 2, INF, 0.1)


def test_theory_void_counts():
    left = IntervalFamily.of((0.0, 0.3))
    right = IntervalFamily.of((0.5, 0.9))
    ev = Event(
        "v",
        (
            CountTerm("observed", left, 0.0, "eq", 0),
            CountTerm("missed", left, 0.5, "eq", 0),
            CountTerm("all", right, 0.2, "le", 0),
        ),
    )
    expected = limit_laws.void_probability_intervals(
        PARAMS, [(0.3, 0.0, 0.5), (0.4, 0.2, 0.2)]
    )
    assert theory_limit(ev, PARAMS) == pytest.approx(expected, abs=1e-15)


def test_theory_void_multiple_levels_fold_to_min():
    fam = IntervalFamily.of((0.0, 0.5))
    ev = Event(
        "v",
        (
            CountTerm("observed", fam, 0.0, "eq", 0),
            CountTerm("observed", fam, 0.7, "eq", 0),  # redundant given level 0
        ),
    )
    expected = limit_laws.void_probability_intervals(PARAMS, [(0.5, 0.0, INF)])
    assert theory_limit(ev, PARAMS) == pytest.approx(expected, abs=1e-15)


def test_theory_counts_pmf_quadruple():
    fam = IntervalFamily.of((0.2, 0.7))
    ev = Event(
        "pmf",
        (
            CountTerm("observed", fam, 1.0, "eq", 1),
            CountTerm("missed", fam, 1.0, "eq", 0),
            CountTerm("observed", fam, 0.0, "eq", 2),
            CountTerm("missed", fam, 0.0, "eq", 1),
        ),
    )
    expected = limit_laws.joint_counts_pmf(PARAMS, 0.5, 1.0, 0.0, 1, 0, 2, 1)
    assert theory_limit(ev, PARAMS) == pytest.approx(expected, abs=1e-15)


def test_theory_counts_pair_single_level():
    fam = IntervalFamily.of((0.2, 0.7))
    ev = Event(
        "pair",
        (CountTerm("observed", fam, 0.3, "eq", 2), CountTerm("missed", fam, 0.3, "eq", 1)),
    )
    expected = limit_laws.joint_counts_pmf(PARAMS, 0.5, 0.3, 0.3, 2, 1, 2, 1)
    assert theory_limit(ev, PARAMS) == pytest.approx(expected, abs=1e-15)


def test_theory_locations():
    ev = Event("l", (LocationTerm("observed", 0.3), LocationTerm("missed", 0.7)))
    assert theory_limit(ev, PARAMS) == pytest.approx(0.21, abs=1e-12)

    ev = Event("l", (LocationTerm("observed", 0.3), LocationTerm("all", 0.7)))
    assert theory_limit(ev, PARAMS) == pytest.approx(
        limit_laws.locations_cdf(PARAMS.lambda_law, "obs_all", 0.3, 0.7), abs=1e-10
    )

    ev = Event("l", (LocationTerm("observed", 0.4),))
    assert theory_limit(ev, PARAMS) == pytest.approx(0.4, abs=1e-12)

    ev = Event("l", (LocationTerm("all", 0.4),))
    assert theory_limit(ev, PARAMS) == pytest.approx(0.4, abs=1e-12)


def test_theory_locations_with_heights():
    ev = Event(
        "lh",
        (
            LocationTerm("observed", 0.3),
            LocationTerm("missed", 0.7),
            OrderStatTerm("observed", 1, 0.0),
            OrderStatTerm("missed", 1, 0.5),
        ),
    )
    expected = limit_laws.locations_heights_cdf(PARAMS, "obs_missed", 0.3, 0.7, 0.0, 0.5)
    assert theory_limit(ev, PARAMS) == pytest.approx(expected, abs=1e-15)

    # overall pair where the class level exceeds the overall level: the class
    # constraint is slack and must be tightened, not rejected
    ev = Event(
        "lh2",
        (
            LocationTerm("observed", 0.3),
            LocationTerm("all", 0.7),
            OrderStatTerm("observed", 1, 0.9),
            OrderStatTerm("all", 1, 0.2),
        ),
    )
    expected = limit_laws.locations_heights_cdf(PARAMS, "obs_all", 0.3, 0.7, 0.2, 0.2)
    assert theory_limit(ev, PARAMS) == pytest.approx(expected, abs=1e-15)


def test_theory_unrecognized_shapes():
    fam = IntervalFamily.of((0.0, 0.5))
    assert theory_limit(Event("u", (OrderStatTerm("observed", 1, 0.0),
                                    OrderStatTerm("observed", 2, 0.5))), PARAMS) is None
    assert theory_limit(Event("u", (OrderStatTerm("observed", 1, 0.0),
                                    OrderStatTerm("missed", 1, 0.1),
                                    OrderStatTerm("all", 1, 0.2))), PARAMS) is None
    assert theory_limit(Event("u", (CountTerm("observed", fam, 0.0, "le", 2),)), PARAMS) is None
    assert theory_limit(Event("u", (LocationTerm("observed", 0.5),
                                    OrderStatTerm("observed", 2, 0.0))), PARAMS) is None
    assert theory_limit(Event("u", (LocationTerm("observed", 0.5),
                                    CountTerm("observed", fam, 0.0, "eq", 0))), PARAMS) is None


# ---------------------------------------------------------------------------
# finite-n theory recognition


def test_finite_n_maxima_event():
    n, gamma = 100, 1.0
    pattern = np.arange(n) % 2 == 0
    ev = Event("m", (OrderStatTerm("observed", 1, 0.0), OrderStatTerm("missed", 1, 0.5)))
    expected = limit_laws.finite_n_one_factor_prob(n, gamma, [(50, 50, 0.0, 0.5)])
    assert theory_finite_n(ev, n, gamma, pattern) == pytest.approx(expected, abs=1e-15)

    ev_all = Event("m2", (OrderStatTerm("all", 1, 0.3),))
    expected = limit_laws.finite_n_one_factor_prob(n, gamma, [(50, 50, 0.3, 0.3)])
    assert theory_finite_n(ev_all, n, gamma, pattern) == pytest.approx(expected, abs=1e-15)


def test_finite_n_void_event():
    n, gamma = 100, 0.5
    pattern = np.arange(n) % 2 == 0
    left = IntervalFamily.of((0.0, 0.3))
    right = IntervalFamily.of((0.5, 0.9))
    ev = Event(
        "v",
        (
            CountTerm("observed", left, 0.0, "eq", 0),
            CountTerm("missed", left, 0.5, "eq", 0),
            CountTerm("observed", right, 0.0, "eq", 0),
            CountTerm("missed", right, 0.5, "eq", 0),
        ),
    )
    expected = limit_laws.finite_n_one_factor_prob(
        n, gamma, [(15, 15, 0.0, 0.5), (20, 20, 0.0, 0.5)]
    )
    assert theory_finite_n(ev, n, gamma, pattern) == pytest.approx(expected, abs=1e-15)


def test_finite_n_unsupported():
    pattern = np.arange(100) % 2 == 0
    assert theory_finite_n(Event("u", (OrderStatTerm("observed", 2, 0.0),)), 100, 1.0, pattern) is None
    assert theory_finite_n(Event("u", (LocationTerm("observed", 0.5),)), 100, 1.0, pattern) is None
    ev = Event("m", (OrderStatTerm("observed", 1, 0.0),))
    assert theory_finite_n(ev, 100, 1.0, None) is None
