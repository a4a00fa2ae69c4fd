import math

import numpy as np
import pytest

from gapextremes.errors import QuadratureConvergenceError
from gapextremes.lambdalaw import LambdaLaw
from gapextremes.quadrature import converge, rule_for


@pytest.mark.parametrize("law", [LambdaLaw.point(0.5), LambdaLaw.uniform(0, 1), LambdaLaw.beta(2, 2)])
def test_weights_normalized(law):
    rule = rule_for(law, 64, 64)
    assert rule.z_weights.sum() == pytest.approx(1.0, abs=1e-15)
    assert rule.lam_weights.sum() == pytest.approx(1.0, abs=1e-15)
    # doubling the node count moves the integral of 1 by < 1e-14
    bigger = rule_for(law, 128, 128)
    assert abs(rule.expect(np.ones((rule.lam.size, rule.z.size))) - 1.0) < 1e-14
    assert abs(bigger.expect(np.ones((bigger.lam.size, bigger.z.size))) - 1.0) < 1e-14


def test_gaussian_moments_exact():
    rule = rule_for(LambdaLaw.point(1.0), 64, 1)
    assert rule.expect(rule.z) == pytest.approx(0.0, abs=1e-13)
    assert rule.expect(rule.z**2) == pytest.approx(1.0, abs=1e-12)
    assert rule.expect(rule.z**4) == pytest.approx(3.0, abs=1e-11)
    # lognormal mean: E exp(a Z) = exp(a^2 / 2)
    for a in (0.5, 1.0, 2.0):
        assert rule.expect(np.exp(a * rule.z)) == pytest.approx(math.exp(a * a / 2), rel=1e-12)


def test_converge_returns_stable_value():
    law = LambdaLaw.uniform(0, 1)

    def evaluate(rule):
        lam = rule.lam_col
        return rule.expect(np.exp(-lam * np.exp(-1.0 + math.sqrt(2.0) * rule.z)))

    value = converge(law, evaluate)
    finer = evaluate(rule_for(law, 512, 512))
    assert value == pytest.approx(finer, abs=1e-9)


def test_converge_escalates_then_errors():
    calls = []

    def never_stable(rule):
        calls.append(rule.n_z)
        return float(len(calls))  # changes every time

    with pytest.raises(QuadratureConvergenceError):
        converge(LambdaLaw.point(0.5), never_stable)
    assert calls == [64, 128, 256, 512]


def test_rules_are_cached_and_immutable():
    a = rule_for(LambdaLaw.beta(2, 2), 64, 64)
    b = rule_for(LambdaLaw.beta(2, 2), 64, 64)
    assert a.z is b.z and a.lam is b.lam
    with pytest.raises(ValueError):
        a.z[0] = 0.0
