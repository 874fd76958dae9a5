"""Quasi-symmetrizer layers, certificate constants, zero partitions, Glaeser.

Closed forms used as oracles (order 2, roots lam1, lam2):

    Q_0 = w1 w1^T + w2 w2^T with w1 = (-lam2, 1), w2 = (-lam1, 1)
    Q_1 = 2 * diag(1, 0)

so roots (0,0) give Q_0 = diag(0, 2), roots (-1,1) give Q_0 = diag(2, 2),
roots (1,1) give Q_0 = [[2,-2],[-2,2]].  The commutator constant for roots
(-1,1) is eps*sqrt(2)/sqrt(2+2 eps^2) and for roots (0,0) it is 1 for every
eps; the near-diagonality constant for the double root (1,1) is
1 - 1/sqrt(1+eps^2) ~ eps^2/2, decaying below any eps-linear floor.
"""

import math

import numpy as np
import pytest

from weakhyp.quasisym import (
    build_quasi_symmetrizer,
    entry_derivative_bound,
    glaeser_quotient,
    partition_by_zeros,
    sample_unit_vectors,
    verify_quasi_symmetrizer,
)
from weakhyp.spectral import companion_matrix


def test_layers_frozen_double_zero():
    qs = build_quasi_symmetrizer([0.0, 0.0])
    np.testing.assert_allclose(qs.layers[0], [[0.0, 0.0], [0.0, 2.0]])
    np.testing.assert_allclose(qs.layers[1], [[2.0, 0.0], [0.0, 0.0]])
    np.testing.assert_allclose(qs.assemble(0.5), [[0.5, 0.0], [0.0, 2.0]])


def test_layers_frozen_separated():
    qs = build_quasi_symmetrizer([-1.0, 1.0])
    np.testing.assert_allclose(qs.layers[0], [[2.0, 0.0], [0.0, 2.0]])
    np.testing.assert_allclose(qs.layers[1], [[2.0, 0.0], [0.0, 0.0]])


def test_layers_symmetric_psd():
    rng = np.random.default_rng(17)
    for _ in range(120):
        m = int(rng.integers(2, 5))
        roots = rng.uniform(-2.0, 2.0, size=m)
        qs = build_quasi_symmetrizer(roots)
        assert len(qs.layers) == m
        for layer in qs.layers:
            np.testing.assert_allclose(layer, layer.T, atol=1e-12)
            w = np.linalg.eigvalsh(layer)
            assert w.min() >= -1e-10 * max(1.0, w.max())
        # the full family must be strictly positive definite for eps > 0
        w = np.linalg.eigvalsh(qs.assemble(0.3))
        assert w.min() > 0.0


def test_certificate_frozen_separated_roots():
    qs = build_quasi_symmetrizer([-1.0, 1.0])
    a = companion_matrix([0.0, -1.0])  # lam^2 - 1
    cert = verify_quasi_symmetrizer(qs, a, [1.0])
    assert cert.c_lower == pytest.approx(0.5)
    assert cert.c_upper == pytest.approx(4.0)
    assert cert.c_comm == pytest.approx(1.0 / math.sqrt(2.0))
    assert cert.c_nd == pytest.approx(1.0)
    assert cert.passed


def test_commutator_scaling_separated_roots():
    qs = build_quasi_symmetrizer([-1.0, 1.0])
    a = companion_matrix([0.0, -1.0])
    for eps in (1.0, 0.1, 0.01):
        cert = verify_quasi_symmetrizer(qs, a, [eps])
        expected = eps * math.sqrt(2.0) / math.sqrt(2.0 + 2.0 * eps * eps)
        assert cert.c_comm == pytest.approx(expected, rel=1e-10)


def test_commutator_constant_for_zero_roots():
    # double root at zero: C_comm = 1 independent of eps
    qs = build_quasi_symmetrizer([0.0, 0.0])
    a = companion_matrix([0.0, 0.0])
    for eps in (1.0, 0.1, 0.01, 1e-4):
        cert = verify_quasi_symmetrizer(qs, a, [eps])
        assert cert.c_comm == pytest.approx(1.0, rel=1e-9)


def test_commutator_constant_triple_zero():
    # all-zero roots, order 3: C_comm = sqrt(5/2) for every eps
    qs = build_quasi_symmetrizer([0.0, 0.0, 0.0])
    a = companion_matrix([0.0, 0.0, 0.0])
    for eps in (1.0, 0.1, 0.01):
        cert = verify_quasi_symmetrizer(qs, a, [eps])
        assert cert.c_comm == pytest.approx(math.sqrt(2.5), rel=1e-8)


def test_near_diagonality_negative_control():
    # nonzero double root: c_nd ~ eps^2/2 falls below any linear-in-eps floor
    qs = build_quasi_symmetrizer([1.0, 1.0])
    a = companion_matrix([-2.0, 1.0])
    for eps in (1.0, 0.1, 0.01, 1e-3, 1e-4):
        cert = verify_quasi_symmetrizer(qs, a, [eps])
        expected = 1.0 - 1.0 / math.sqrt(1.0 + eps * eps)
        assert cert.c_nd == pytest.approx(expected, rel=1e-6, abs=1e-15)
    smallest = verify_quasi_symmetrizer(qs, a, [1e-4])
    assert smallest.c_nd < 1e-3 * 1e-4


def test_sampled_audit_consistent_with_exact():
    rng = np.random.default_rng(23)
    samples = sample_unit_vectors(3, 2000, rng)
    for _ in range(20):
        roots = np.sort(rng.uniform(-2.0, 2.0, size=3))
        coeffs = np.poly(roots)[1:]
        qs = build_quasi_symmetrizer(roots)
        cert = verify_quasi_symmetrizer(qs, companion_matrix(coeffs), [1.0, 0.1], samples)
        # random directions can only underestimate the extremal ratios
        assert cert.sampled_c_comm <= cert.c_comm * (1.0 + 1e-9)
        assert cert.sampled_c_nd >= cert.c_nd - 1e-9


def test_certificate_to_dict_keys():
    qs = build_quasi_symmetrizer([-1.0, 1.0])
    cert = verify_quasi_symmetrizer(qs, companion_matrix([0.0, -1.0]), [1.0, 0.1])
    d = cert.to_dict()
    assert set(d) == {
        "eps_set", "C_lower", "C_upper", "C_comm", "C_comm_by_eps", "c_nd",
        "c_nd_by_eps", "sampled_C_comm", "sampled_c_nd", "diam_ratio",
        "samples", "nd_floor", "pass",
    }
    assert d["pass"]["all"] is True


def test_verify_rejects_mismatched_dimensions():
    qs = build_quasi_symmetrizer([-1.0, 1.0])
    with pytest.raises(ValueError):
        verify_quasi_symmetrizer(qs, np.zeros((3, 3)), [1.0])
    with pytest.raises(ValueError):
        verify_quasi_symmetrizer(qs, companion_matrix([0.0, -1.0]), [0.0])


def test_partition_by_zeros_sign_change():
    grid = np.linspace(0.0, 1.0, 1001)
    part = partition_by_zeros([lambda t: t - 0.5, lambda t: 1.0], grid)
    assert part.identically_zero == (False, False)
    np.testing.assert_allclose(part.breakpoints, [0.0, 0.5, 1.0], atol=1e-9)
    np.testing.assert_allclose(part.interior, [0.5], atol=1e-9)


def test_partition_by_zeros_touching_zero():
    grid = np.linspace(0.0, 1.0, 1001)
    part = partition_by_zeros([lambda t: (t - 0.3) ** 2], grid)
    np.testing.assert_allclose(part.interior, [0.3], atol=1e-3)


def test_partition_identically_zero_entry():
    grid = np.linspace(0.0, 1.0, 101)
    part = partition_by_zeros([lambda t: 0.0, lambda t: math.sin(t) + 2.0], grid)
    assert part.identically_zero == (True, False)
    assert part.interior.size == 0


def test_entry_derivative_bound_linear():
    grid = np.linspace(0.0, 1.0, 1001)
    # q = 1 + t: sup |q'|(T-t)/|q| = 1 at t = 0, second-order FD is exact
    bound = entry_derivative_bound(lambda t: 1.0 + t, 1.0, grid)
    assert bound == pytest.approx(1.0, rel=1e-9)


def test_entry_derivative_bound_vanishing_entry():
    grid = np.linspace(0.0, 1.0, 1001)
    assert entry_derivative_bound(lambda t: t - 0.5, 1.0, grid) == float("inf")


def test_glaeser_quotient_frozen_square():
    # f = t^2, k = 2, theta = 1/2: |2t| / (|t| * sqrt(2)) = sqrt(2)
    grid = np.linspace(-1.0, 1.0, 2001)
    q = glaeser_quotient(lambda t: t * t, 2, grid)
    assert q == pytest.approx(math.sqrt(2.0), rel=1e-6)


def test_glaeser_quotient_linear():
    grid = np.linspace(0.1, 1.0, 901)
    q = glaeser_quotient(lambda t: t, 1, grid)
    assert q == pytest.approx(1.0, rel=1e-9)


def test_glaeser_quotient_unbounded():
    # f = t has f(0) = 0 with f'(0) = 1: quotient blows up at the zero
    grid = np.linspace(-1.0, 1.0, 2001)
    assert glaeser_quotient(lambda t: t, 1, grid) == float("inf")
