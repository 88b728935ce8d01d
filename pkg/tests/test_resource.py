# tests/test_resource.py

import math

import numpy as np
import pytest

from core.resource import (
    ExponentialFit,
    FitError,
    ResourceModelError,
    RuntimeModelParams,
    best_gap,
    crossover_size,
    fit_exponential,
    hybrid_speedup_ratio,
    rqaoa_asymptotic_time,
    rqaoa_total_time,
    shots_required,
    single_round_time,
    time_per_shot,
)


#12.1 Shot and runtime models
def test_shots_for_twenty_variables():
    assert shots_required(20, 0.1, 0.05) == 634


def test_shots_grow_with_size_and_precision():
    assert shots_required(40, 0.1, 0.05) > shots_required(20, 0.1, 0.05)
    assert shots_required(20, 0.05, 0.05) > shots_required(20, 0.1, 0.05)
    assert shots_required(20, 0.1, 0.01) > shots_required(20, 0.1, 0.05)


def test_tolerances_must_be_open_unit_interval():
    for epsilon, delta in [(0.0, 0.05), (1.0, 0.05), (0.1, 0.0), (0.1, 1.0)]:
        with pytest.raises(ResourceModelError):
            shots_required(10, epsilon, delta)
    with pytest.raises(ResourceModelError):
        shots_required(0, 0.1, 0.05)


def test_parameter_validation():
    with pytest.raises(ResourceModelError):
        RuntimeModelParams(p=0)
    with pytest.raises(ResourceModelError):
        RuntimeModelParams(t_g=-1.0)


def test_round_time_composition():
    params = RuntimeModelParams(t_g=1e-6, t_p=1e-3, t_opt=2.0, p=2)

    assert time_per_shot(10, params) == pytest.approx(2 * 1000 * 1e-6 + 1e-3)
    assert single_round_time(10, params) == pytest.approx(
        shots_required(10, 0.1, 0.05) * time_per_shot(10, params) + 2.0
    )


def test_total_time_sums_every_round():
    params = RuntimeModelParams()

    total = rqaoa_total_time(5, 2, params)

    assert total == pytest.approx(sum(single_round_time(n, params) for n in (5, 4, 3)))
    assert rqaoa_total_time(5, 4, params) == pytest.approx(single_round_time(5, params))


def test_total_time_cutoff_range():
    with pytest.raises(ResourceModelError):
        rqaoa_total_time(5, 5, RuntimeModelParams())
    with pytest.raises(ResourceModelError):
        rqaoa_total_time(5, -1, RuntimeModelParams())


def test_asymptotic_form():
    params = RuntimeModelParams(t_g=1e-7, epsilon=0.1, p=3)

    assert rqaoa_asymptotic_time(10, params) == pytest.approx(3 * 1e4 * 1e-7 / 0.01)


#12.2 Exponential fits
def test_fit_recovers_exact_exponential():
    sizes = np.arange(10, 22, 2)
    runtimes = 2e-4 * np.exp(0.7 * sizes) + 0.01

    fit = fit_exponential(sizes, runtimes)

    assert fit.b == pytest.approx(0.7, rel=1e-5)
    assert fit.a == pytest.approx(2e-4, rel=1e-4)
    assert fit.relative_rms < 1e-6
    assert fit.domain == (10.0, 20.0)
    for size, runtime in zip(sizes, runtimes):
        assert fit.predict(size) == pytest.approx(runtime, rel=1e-6)


def test_fit_is_order_independent():
    sizes = np.array([16, 10, 20, 12, 14])
    runtimes = 1e-3 * np.exp(0.5 * sizes)

    fit = fit_exponential(sizes, runtimes)

    assert fit.b == pytest.approx(0.5, rel=1e-5)
    assert fit.domain == (10.0, 20.0)


def test_constant_runtimes_fit_flat_line():
    fit = fit_exponential([1, 2, 3], [5.0, 5.0, 5.0])

    assert (fit.a, fit.b, fit.c) == (0.0, 0.0, 5.0)
    assert fit.predict(100) == 5.0


def test_fit_input_checks():
    with pytest.raises(FitError):
        fit_exponential([1, 2], [1.0, 2.0])
    with pytest.raises(FitError):
        fit_exponential([1, 1, 2], [1.0, 2.0, 3.0])
    with pytest.raises(FitError):
        fit_exponential([1, 2, 3], [1.0, 2.0])


#12.3 Speedup and crossover
def _fit(a, b, c=0.0):
    return ExponentialFit(a=a, b=b, c=c, rms=0.0, relative_rms=0.0, domain=(10.0, 20.0))


def test_no_reduction_has_unit_ratio():
    assert hybrid_speedup_ratio(12, 12, _fit(1e-3, 0.5), RuntimeModelParams()) == 1.0


def test_cutoff_above_size_rejected():
    with pytest.raises(ResourceModelError):
        hybrid_speedup_ratio(12, 13, _fit(1e-3, 0.5), RuntimeModelParams())


def test_crossover_is_the_first_size_below_unit_ratio():
    fit, params = _fit(1e-6, 1.0), RuntimeModelParams()

    size = crossover_size(fit, params, reduction_rounds=6)

    assert size is not None
    assert hybrid_speedup_ratio(size, size - 6, fit, params) < 1.0
    assert hybrid_speedup_ratio(size - 1, size - 7, fit, params) >= 1.0
    # 1e-6 e^N (1 - e^-6) must outgrow six rounds of about one second each
    assert 14 <= size <= 18


def test_no_growth_means_no_crossover():
    params = RuntimeModelParams()

    assert crossover_size(_fit(0.0, 0.0, 5.0), params, reduction_rounds=6) is None
    assert crossover_size(_fit(1.0, -0.1), params, reduction_rounds=6) is None


def test_slow_growth_finds_no_crossover_within_limit():
    assert crossover_size(_fit(1e-9, 1e-4), RuntimeModelParams(), reduction_rounds=6, limit=200) is None


def test_crossover_needs_a_reduction_round():
    with pytest.raises(ResourceModelError):
        crossover_size(_fit(1e-6, 1.0), RuntimeModelParams(), reduction_rounds=0)


def test_overflow_ends_the_search():
    assert crossover_size(_fit(1e-300, 1.0), RuntimeModelParams(t_opt=1e300), reduction_rounds=1) is None


def test_crossover_search_computes_each_round_time_once(monkeypatch):
    import core.resource as resource

    calls = []
    original = resource.single_round_time

    def counted(num_vars, params):
        calls.append(num_vars)
        return original(num_vars, params)

    monkeypatch.setattr(resource, "single_round_time", counted)

    assert crossover_size(_fit(1e-9, 1e-3), RuntimeModelParams(), reduction_rounds=50, limit=300) is None
    assert sorted(calls) == list(range(1, 301))


def test_crossover_agrees_with_direct_ratio_scan():
    params = RuntimeModelParams(t_g=1e-6, t_opt=0.5)
    for a, b, rounds in ((1e-6, 1.0, 3), (1e-4, 0.5, 8), (1e-5, 0.8, 12)):
        fit = _fit(a, b)
        expected = next(
            size for size in range(rounds + 1, 500)
            if hybrid_speedup_ratio(size, size - rounds, fit, params) < 1.0
        )
        assert crossover_size(fit, params, reduction_rounds=rounds) == expected


#12.4 Gaps
def test_relative_gap():
    gap, absolute = best_gap(-9.0, -10.0)

    assert gap == pytest.approx(0.1)
    assert not absolute


def test_absolute_gap_when_best_is_zero():
    assert best_gap(0.5, 0.0) == (0.5, True)
    assert math.isclose(best_gap(-3.0, -3.0)[0], 0.0)
