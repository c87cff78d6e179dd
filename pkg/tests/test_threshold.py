import numpy as np
import pytest

from sirswitch import (
    Classification,
    EnvParams,
    EnvState,
    InvalidParameterError,
    ModelParams,
    NotApplicableError,
    Point,
    SwitchRates,
    UnresolvedThresholdError,
    Verdict,
    classify,
    is_proportional,
    occupation_lower_bound,
    permanence_bounds,
    persistence_threshold,
    persistence_verdict,
    simulate,
)


def test_threshold_values(params_p1, params_p2, params_p3):
    # symmetric rates, lambda = 0.5*(0.04*100-1) + 0.5*(0.02*100-1) = 2.0
    assert persistence_threshold(params_p1) == pytest.approx(2.0, abs=1e-12)
    # 0.5*3 + 0.5*(-0.2) = 1.4
    assert persistence_threshold(params_p2) == pytest.approx(1.4, abs=1e-12)
    # 0.5*0.2 + 0.5*(-0.5) = -0.15
    assert persistence_threshold(params_p3) == pytest.approx(-0.15, abs=1e-12)


def test_threshold_rate_weighting():
    plus = EnvParams(0.04, 1.0, 0.5)
    minus = EnvParams(0.01, 1.0, 0.5)
    # p = beta/(alpha+beta) = 1/3 weights the plus growth 3, minus growth 0:
    # lambda = 1.0
    params = ModelParams(plus=plus, minus=minus, N=100.0, rates=SwitchRates(2.0, 1.0))
    assert persistence_threshold(params) == pytest.approx(1.0, abs=1e-12)


def test_classify_regimes(params_p1, params_p2, params_p3, params_p4, params_p5):
    assert classify(params_p1).classification is Classification.PERMANENT
    assert classify(params_p2).classification is Classification.PERSISTENT
    rep3 = classify(params_p3)
    assert rep3.classification is Classification.EXTINCTION
    assert rep3.predicted_limit == Point(100.0, 0.0)
    rep4 = classify(params_p4)
    assert rep4.classification is Classification.DEGENERATE_COMMON_EQUILIBRIUM
    assert rep4.predicted_limit is not None
    assert rep4.predicted_limit.s == pytest.approx(25.0, abs=1e-12)
    assert rep4.predicted_limit.i == pytest.approx(25.0, abs=1e-12)
    assert classify(params_p5).classification is Classification.EXTINCTION


def test_classify_reports_r0(params_p1, params_p2):
    rep = classify(params_p1)
    assert rep.r0_plus == pytest.approx(4.0, rel=1e-15)
    assert rep.r0_minus == pytest.approx(2.0, rel=1e-15)
    rep = classify(params_p2)
    assert rep.r0_minus < 1.0 < rep.r0_plus


def test_classify_zero_threshold_raises():
    # growth rates +1 and -1 under symmetric switching cancel exactly
    params = ModelParams(
        plus=EnvParams(0.02, 1.0, 0.5),
        minus=EnvParams(0.01, 2.0, 0.5),
        N=100.0,
        rates=SwitchRates(1.0, 1.0),
    )
    with pytest.raises(UnresolvedThresholdError):
        classify(params)


def test_relabel_invariance(params_p1):
    # feeding the environments in the other order must produce the same report
    swapped = ModelParams(
        plus=params_p1.minus,
        minus=params_p1.plus,
        N=params_p1.N,
        rates=SwitchRates(params_p1.rates.beta, params_p1.rates.alpha),
    )
    assert swapped.relabeled
    a, b = classify(params_p1), classify(swapped)
    assert a.lambda_value == b.lambda_value
    assert a.classification is b.classification


def test_is_proportional(params_p1, params_p4):
    assert not is_proportional(params_p1)
    assert is_proportional(params_p4)
    # scaling every coefficient by the same factor is proportional
    plus = EnvParams(0.04, 1.0, 0.5)
    minus = EnvParams(0.04 * 0.7, 0.7, 0.35)
    params = ModelParams(plus=plus, minus=minus, N=100.0, rates=SwitchRates(1.0, 1.0))
    assert is_proportional(params)


def test_occupation_lower_bound(params_p1, params_p2, params_p3):
    # rho = c_min*lambda/((a_max*N + c_max)*a_max) = 0.5*2/(4.5*0.04) = 50/9
    assert occupation_lower_bound(params_p1) == pytest.approx(50.0 / 9.0, rel=1e-12)
    assert occupation_lower_bound(params_p2) == pytest.approx(35.0 / 9.0, rel=1e-12)
    with pytest.raises(NotApplicableError):
        occupation_lower_bound(params_p3)


def test_verdict_persistent(params_p1, start):
    traj = simulate(params_p1, start, EnvState.PLUS, 2000.0, seed=0)
    assert persistence_verdict(traj) is Verdict.PERSISTENT_OBSERVED


def test_verdict_extinct(params_p3, start):
    traj = simulate(params_p3, start, EnvState.PLUS, 5000.0, seed=0)
    assert persistence_verdict(traj) is Verdict.EXTINCT_OBSERVED


def test_verdict_horizon_guard(params_p1, start):
    traj = simulate(params_p1, start, EnvState.PLUS, 50.0, seed=0)
    with pytest.raises(InvalidParameterError):
        persistence_verdict(traj)


def test_permanence_bounds(p1_ensemble_2000):
    i_lo, i_hi, s_lo, s_hi = permanence_bounds(p1_ensemble_2000)
    assert 0.0 < i_lo < i_hi
    assert 0.0 < s_lo < s_hi
    assert i_hi <= 100.0 and s_hi <= 100.0


def test_permanence_bounds_guards(params_p1, start, p1_ensemble_2000):
    with pytest.raises(InvalidParameterError):
        permanence_bounds([])
    with pytest.raises(InvalidParameterError):
        permanence_bounds(p1_ensemble_2000, tail_fraction=0.0)
    short = simulate(params_p1, start, EnvState.PLUS, 5.0, seed=0)
    with pytest.raises(InvalidParameterError):
        permanence_bounds([short])
