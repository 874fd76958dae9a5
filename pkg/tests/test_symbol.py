"""Root extraction, separation ratio, and discriminant identities."""

import numpy as np
import pytest

from weakhyp.equation import CoefficientSpec
from weakhyp.symbol import (
    NonHyperbolicError,
    UnsupportedOrderError,
    characteristic_roots,
    check_diam,
    diam_ratio,
    discriminant_check,
)


def test_roots_simple():
    # lam^2 - 1
    np.testing.assert_allclose(characteristic_roots([0.0, -1.0]), [-1.0, 1.0], atol=1e-12)
    # (lam - 1)^2 = lam^2 - 2 lam + 1
    np.testing.assert_allclose(characteristic_roots([-2.0, 1.0]), [1.0, 1.0], atol=1e-7)
    # lam^3 - lam
    np.testing.assert_allclose(
        characteristic_roots([0.0, -1.0, 0.0]), [-1.0, 0.0, 1.0], atol=1e-12
    )


def test_roots_sorted_and_match_polyfromroots():
    rng = np.random.default_rng(3)
    for _ in range(100):
        m = int(rng.integers(2, 5))
        roots = np.sort(rng.uniform(-2.0, 2.0, size=m))
        # a_h from monic expansion, descending powers minus the leading 1
        coeffs = np.poly(roots)[1:]
        got = characteristic_roots(coeffs)
        np.testing.assert_allclose(got, roots, atol=1e-6)
        assert (np.diff(got) >= 0).all()


def test_roots_nonhyperbolic():
    with pytest.raises(NonHyperbolicError) as exc_info:
        characteristic_roots([0.0, 1.0])  # lam^2 + 1
    assert exc_info.value.max_imag == pytest.approx(1.0, rel=1e-9)


def test_diam_ratio_frozen():
    assert diam_ratio([-1.0, 1.0]) == 0.5
    assert diam_ratio([-1.0, 0.0, 1.0]) == 1.0
    assert diam_ratio([1.0, 1.0]) == float("inf")
    assert diam_ratio([0.0, 0.0]) == 0.0  # coincidence at zero is allowed
    assert diam_ratio([0.0, 3.0]) == 1.0


def test_check_diam_satisfied():
    spec = CoefficientSpec.from_strings(2, 1.0, ["0", "-1"], 0, ["cos(x)", "0"])
    report = check_diam(spec, np.linspace(0.0, 1.0, 11))
    assert report.satisfied
    assert report.sup_ratio == 0.5
    assert report.failure_times.size == 0
    d = report.to_dict()
    assert set(d) == {"grid", "M", "M_sup", "satisfied", "failure_times"}


def test_check_diam_degenerate_roots_touch_zero():
    # roots +-t coincide only at t = 0: ratio is 1/2 wherever defined
    spec = CoefficientSpec.from_strings(2, 1.0, ["0", "-t^2"], 0, ["cos(x)", "0"])
    report = check_diam(spec, np.linspace(0.0, 1.0, 11))
    assert report.satisfied
    assert report.sup_ratio == pytest.approx(0.5)


def test_check_diam_failure():
    # (lam - 1)^2: nonzero double root at every time
    spec = CoefficientSpec.from_strings(2, 1.0, ["-2", "1"], 0, ["cos(x)", "0"])
    report = check_diam(spec, np.linspace(0.0, 1.0, 5))
    assert not report.satisfied
    assert report.sup_ratio == float("inf")
    assert report.failure_times.size == 5


def test_check_diam_propagates_nonhyperbolic_time():
    spec = CoefficientSpec.from_strings(2, 1.0, ["0", "t - 0.5"], 0, ["cos(x)", "0"])
    with pytest.raises(NonHyperbolicError) as exc_info:
        check_diam(spec, np.linspace(0.0, 1.0, 21))
    assert exc_info.value.t is not None and exc_info.value.t > 0.5


def test_discriminant_frozen_m2():
    res = discriminant_check([0.0, -1.0])  # roots -1, 1
    assert res.delta == 4.0
    assert res.rhs == 0.0
    assert res.ratio == float("inf")
    res = discriminant_check([-2.0, 1.0])  # double root 1
    assert res.delta == 0.0
    assert res.rhs == 4.0
    assert res.ratio == 0.0
    assert res.holds(0.01) is False
    res = discriminant_check([0.0, 0.0])  # double root 0
    assert res.delta == 0.0 and res.rhs == 0.0 and res.ratio == 1.0


def test_discriminant_frozen_m3():
    # lam^3 - lam: roots -1, 0, 1, squared difference product 4
    res = discriminant_check([0.0, -1.0, 0.0])
    assert res.delta == pytest.approx(4.0)
    assert res.rhs == 0.0
    assert res.ratio == float("inf")
    assert res.holds(0.01)


def test_discriminant_matches_root_products():
    rng = np.random.default_rng(5)
    for _ in range(300):
        m = int(rng.integers(2, 4))
        roots = rng.uniform(-2.0, 2.0, size=m)
        coeffs = np.poly(roots)[1:]
        res = discriminant_check(coeffs)
        brute = 1.0
        for i in range(m):
            for j in range(i + 1, m):
                brute *= (roots[i] - roots[j]) ** 2
        scale = 1.0 + abs(res.delta) + abs(brute)
        assert abs(res.delta - brute) <= 1e-10 * scale


def test_discriminant_unsupported_order():
    with pytest.raises(UnsupportedOrderError):
        discriminant_check([0.0, 0.0, 0.0, -1.0])
