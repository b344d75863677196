import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from tll.jets import Jet, JetError, jet_compose, jet_exp, jet_log, jet_sqrt


def random_jet(rng, nv, order, const=0.0, scale=0.5):
    n = len(Jet.zero(nv, order).coeffs)
    c = scale * (rng.standard_normal(n) + 1j * rng.standard_normal(n))
    c[0] = const
    return Jet(nv, order, c)


jets_seed = st.integers(min_value=0, max_value=10_000)


def test_product_of_binomials():
    x = Jet.variable(0, 1, 4)
    assert (1 + x) * (1 - x) == 1 - x * x


def test_truncation_drops_high_degrees():
    x, y = Jet.variables(2, 3)
    p = (x + y) ** 4
    assert p.is_zero()
    assert ((x + y) ** 3)[(2, 1)] == pytest.approx(3)


def test_exact_sqrt_squares_back():
    x = Jet.variable(0, 1, 6, exact=True)
    s = (1 + x).sqrt()
    assert s * s == 1 + x
    assert s[(2,)] == Fraction(-1, 8)


def test_exact_sqrt_needs_rational_square():
    x = Jet.variable(0, 1, 3, exact=True)
    with pytest.raises(JetError):
        (2 + x).sqrt()


def test_log_exp_inverse():
    x = Jet.variable(0, 1, 8)
    assert ((1 + x).log()).exp().allclose(1 + x, atol=1e-12)


def test_exp_series_coefficients():
    x = Jet.variable(0, 1, 6, exact=True)
    e = x.exp()
    for k in range(7):
        assert e[(k,)] == Fraction(1, math.factorial(k))


def test_compose_substitution():
    x = Jet.variable(0, 1, 4)
    u, v = Jet.variables(2, 4)
    f = x * x
    assert f.compose([u + v]) == u * u + 2 * u * v + v * v


def test_compose_requires_zero_constant():
    x = Jet.variable(0, 1, 3)
    with pytest.raises(JetError):
        x.compose([1 + x])


def test_diff_and_eval():
    x, y = Jet.variables(2, 5)
    f = x ** 2 * y + 3 * y
    assert f.diff(0) == 2 * x * y
    assert f.eval([0.5, 2.0]) == pytest.approx(0.25 * 2 + 6)


def test_sqrt_branch_cut_rejected():
    x = Jet.variable(0, 1, 3)
    with pytest.raises(JetError):
        (-1 + x).sqrt()


def test_json_roundtrip_float_and_exact():
    rng = np.random.default_rng(1)
    f = random_jet(rng, 3, 4, const=1.0)
    assert Jet.from_json(f.to_json()) == f
    x = Jet.variable(0, 2, 3, exact=True)
    g = (1 + x) ** 2 * Fraction(2, 3)
    h = Jet.from_json(g.to_json())
    assert h.exact and h == g


@settings(max_examples=40, deadline=None)
@given(jets_seed)
def test_ring_laws(seed):
    rng = np.random.default_rng(seed)
    a, b, c = (random_jet(rng, 3, 4, const=rng.standard_normal()) for _ in range(3))
    assert (a * b).allclose(b * a, atol=1e-10)
    assert ((a * b) * c).allclose(a * (b * c), atol=1e-9)
    assert (a * (b + c)).allclose(a * b + a * c, atol=1e-10)


@settings(max_examples=40, deadline=None)
@given(jets_seed)
def test_inverse_sqrt_log_exp(seed):
    rng = np.random.default_rng(seed)
    f = random_jet(rng, 2, 5, const=1.0 + 0.3j, scale=0.3)
    assert (f * f.invert()).allclose(Jet.constant(1.0, 2, 5), atol=1e-9)
    assert (jet_sqrt(f) ** 2).allclose(f, atol=1e-9)
    assert jet_exp(jet_log(f)).allclose(f, atol=1e-9)


@settings(max_examples=30, deadline=None)
@given(jets_seed)
def test_chain_rule(seed):
    rng = np.random.default_rng(seed)
    f = random_jet(rng, 2, 5, const=0.2)
    g = [random_jet(rng, 2, 5) for _ in range(2)]
    h = jet_compose(f, g)
    lhs = h.diff(0).truncate(4)
    rhs = sum((f.diff(i).compose(g) * g[i].diff(0) for i in range(2)), Jet.zero(2, 4))
    assert lhs.allclose(rhs.truncate(4), atol=1e-9)


@settings(max_examples=30, deadline=None)
@given(jets_seed)
def test_compose_agrees_with_evaluation(seed):
    rng = np.random.default_rng(seed)
    f = random_jet(rng, 2, 6, const=0.1)
    g = [random_jet(rng, 1, 6, scale=0.4) for _ in range(2)]
    t = 1e-2
    val = f.compose(g).eval([t])
    ref = f.eval([gi.eval([t]) for gi in g])
    assert abs(val - ref) < 1e-10


def test_ten_variable_product_is_fast():
    import time
    rng = np.random.default_rng(0)
    a, b = random_jet(rng, 10, 6, 1.0), random_jet(rng, 10, 6, 1.0)
    a * b
    t0 = time.perf_counter()
    for _ in range(5):
        a * b
    assert (time.perf_counter() - t0) / 5 < 0.1
