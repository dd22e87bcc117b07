"""The verification harness itself: determinism, fault capture, generators."""

import random
from fractions import Fraction

import pytest

from dworkbox import LinearFunctional, apply_k, reduction_functional
from dworkbox.verify import (
    FAULT_HOOKS,
    fault_injection,
    random_charge_element,
    random_element,
    random_homogeneous,
    run_suite,
)


def test_suite_passes_on_good_build(cubic_dwork, cubic_presentation):
    report = run_suite(cubic_dwork, cubic_presentation, seed=3, iterations=30)
    assert report.ok
    assert all(c.passed for c in report.checks)
    assert len(report.checks) >= 19


def test_suite_deterministic(cubic_dwork, cubic_presentation):
    a = run_suite(cubic_dwork, cubic_presentation, seed=5, iterations=20)
    b = run_suite(cubic_dwork, cubic_presentation, seed=5, iterations=20)
    assert a.lines() == b.lines()
    c = run_suite(cubic_dwork, cubic_presentation, seed=6, iterations=20)
    assert a.lines()[0] != c.lines()[0]


@pytest.mark.parametrize("hook", FAULT_HOOKS)
def test_fault_injection_caught(cubic_dwork, cubic_presentation, hook):
    with fault_injection(hook):
        report = run_suite(cubic_dwork, cubic_presentation, seed=3, iterations=25)
    assert not report.ok
    failing = [c for c in report.checks if not c.passed]
    assert failing and all(c.detail for c in failing)
    # operators restored after the context exits
    clean = run_suite(cubic_dwork, cubic_presentation, seed=3, iterations=10)
    assert clean.ok


def test_fault_injection_unknown_hook():
    with pytest.raises(ValueError):
        fault_injection("no-such-hook")


def test_random_element_homogeneity(cubic_ctx):
    rng = random.Random(8)
    for _ in range(50):
        e = random_element(cubic_ctx, rng, homogeneous_degree=1)
        assert e.degrees() <= {-1}
        h = random_homogeneous(cubic_ctx, rng)
        assert h.homogeneous_degree() is not None


def test_random_charge_element_slices(cubic_dwork):
    rng = random.Random(9)
    for lam in (-3, 0, 1):
        for s in (0, -1):
            e = random_charge_element(cubic_dwork, rng, lam, s, max_weight=2)
            assert e.charges() <= {lam}
            assert e.degrees() <= {s}


def test_reduction_functional_contract(cubic_dwork, cubic_presentation):
    rng = random.Random(10)
    row = (Fraction(3), Fraction(-1, 2))
    f = reduction_functional(cubic_presentation, row)
    assert isinstance(f, LinearFunctional) and f.cochain
    # linearity spot-check
    a = random_charge_element(cubic_dwork, rng, 0, 0)
    b = random_charge_element(cubic_dwork, rng, 0, 0)
    assert f(a.scale(Fraction(2, 3)) + b) == Fraction(2, 3) * f(a) + f(b)
    # vanishes outside degree 0 and off the background charge
    assert f(random_charge_element(cubic_dwork, rng, 0, -1)) == 0
    assert f(random_charge_element(cubic_dwork, rng, 2, 0)) == 0
    # kills the image of K
    xi = random_charge_element(cubic_dwork, rng, 0, -1)
    assert f(apply_k(cubic_dwork, xi)) == 0


def test_reduction_functional_row_length(cubic_presentation):
    with pytest.raises(ValueError):
        reduction_functional(cubic_presentation, (Fraction(1),))
