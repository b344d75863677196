import math

import numpy as np
import pytest
from scipy.spatial.transform import Rotation

from tll.contact import ContactError, ContactFormS3, S3Quadrature, lambda_n, lambda_st, lambda_st_tilde
from tll.hopf import (
    HopfError,
    HopfMap,
    covector_map,
    homotopy_path_check,
    hopf_invariant,
    linking_number,
    polygon_linking,
    trivialize,
)
from tll.hopf import _frame

Q = S3Quadrature()


def circle(center, e1, e2, r=1.0, n=400):
    t = np.linspace(0, 2 * math.pi, n, endpoint=False)[:, None]
    return np.asarray(center) + r * (np.cos(t) * np.asarray(e1) + np.sin(t) * np.asarray(e2))


def gauss_integral(A, B):
    """Midpoint discretization of (1/4pi) int int (a - b) . (da x db) / |a - b|^3."""
    dA = np.roll(A, -1, 0) - A
    dB = np.roll(B, -1, 0) - B
    mA = A + dA / 2
    mB = B + dB / 2
    r = mA[:, None] - mB[None]
    num = (r * np.cross(dA[:, None], dB[None])).sum(-1)
    return (num / np.linalg.norm(r, axis=-1) ** 3).sum() / (4 * math.pi)


def test_polygon_linking_matches_gauss_integral():
    A = circle([0, 0, 0], [1, 0, 0], [0, 1, 0])
    B = circle([1, 0, 0], [1, 0, 0], [0, 0, 1])
    lk = polygon_linking(A, B)
    assert abs(lk) == pytest.approx(1.0, abs=1e-10)
    assert lk == pytest.approx(gauss_integral(A, B), abs=1e-3)
    assert polygon_linking(A, B[::-1]) == pytest.approx(-lk, abs=1e-10)
    far = circle([5, 0, 0], [1, 0, 0], [0, 0, 1])
    assert abs(polygon_linking(A, far)) < 1e-12


def test_frame_is_positive():
    rng = np.random.default_rng(0)
    for _ in range(5):
        x = rng.standard_normal(4)
        x /= np.linalg.norm(x)
        assert np.linalg.det(np.vstack([x, _frame(x)])) == pytest.approx(1.0)


def test_standard_form_is_constant_I():
    U = trivialize(lambda_st()).samples(Q)
    assert np.abs(U - [1, 0, 0]).max() < 1e-10


def test_conformal_factor_invisible():
    f = trivialize(lambda_st().conformal(lambda p: 2 + np.sin(p), np.cos))
    assert np.abs(f.samples(Q) - [1, 0, 0]).max() < 1e-10


def test_trivialize_requires_contact():
    wrong = ContactFormS3(np.cos, lambda p: -np.sin(p), lambda p: -np.sin(p), lambda p: -np.cos(p))
    with pytest.raises(ContactError):
        trivialize(wrong)


def test_constant_map():
    r = hopf_invariant(HopfMap.constant((0.2, 0.3, 0.9)), Q)
    assert r.value == 0 and r.raw == 0.0


def test_generator_and_conjugate_against_linking():
    gen, conj = HopfMap.hopf_generator(), HopfMap.hopf_generator(conjugate=True)
    rg, rc = hopf_invariant(gen, Q), hopf_invariant(conj, Q)
    assert abs(rg.value) == 1 and rc.value == -rg.value
    assert rg.distance < 0.05 and rc.distance < 0.05
    lg, lc = linking_number(gen), linking_number(conj)
    assert round(lg["raw"]) == rg.value and abs(lg["raw"] - rg.value) < 0.05
    assert round(lc["raw"]) == rc.value


def test_linking_method_directly():
    r = hopf_invariant(HopfMap.hopf_generator(), Q, method="linking")
    assert r.method == "linking" and r.value == -1


@pytest.mark.parametrize("n,expected", [(0, 0), (1, -1), (2, 0), (3, -1), (4, 0)])
def test_lambda_n_classes(n, expected):
    r = hopf_invariant(trivialize(lambda_n(n)), Q)
    assert r.value == expected
    assert r.distance < 0.05


def test_lambda_tilde_class():
    assert hopf_invariant(trivialize(lambda_st_tilde(), require_contact=False), Q).value == -1


@pytest.mark.parametrize("n", [1, 3])
def test_lambda_n_linking_oracle(n):
    assert round(linking_number(trivialize(lambda_n(n)))["raw"]) == -1


def test_rotation_invariance():
    maps = [HopfMap.hopf_generator(), trivialize(lambda_n(1)), trivialize(lambda_n(2))]
    base = [hopf_invariant(m, Q).value for m in maps]
    for s in range(5):
        R = Rotation.random(random_state=s).as_matrix()
        assert [hopf_invariant(m.rotated(R), Q).value for m in maps] == base


def test_conformal_invariance_of_class():
    f, df = (lambda p: 1.5 + np.cos(3 * p)), (lambda p: -3 * np.sin(3 * p))
    for n in (1, 2):
        form = lambda_n(n)
        assert hopf_invariant(trivialize(form.conformal(f, df)), Q).value == \
            hopf_invariant(trivialize(form), Q).value


def test_under_resolved_grid_rejected():
    with pytest.raises(HopfError, match="under-resolved"):
        hopf_invariant(trivialize(lambda_n(5)), S3Quadrature(8, 8))


def test_non_unit_map_rejected():
    with pytest.raises(HopfError):
        HopfMap(lambda x: 2 * x[..., 1:]).samples(S3Quadrature(8, 8))


@pytest.mark.parametrize("n", [0, 1, 2, 3])
def test_homotopy_path(n):
    rep = homotopy_path_check(n, Q)
    assert rep["min_coefficient_norm"] > 0.1
    assert rep["endpoint_residual"] < 1e-12
    assert rep["classes"] == [rep["expected"]] * 4


def test_covector_with_dphi_component_is_unit():
    m = covector_map(np.cos, np.sin, lambda p: -np.sin(p), np.cos, c=lambda p: np.sin(2 * p) ** 2)
    U = m.samples(S3Quadrature(16, 16))
    assert np.abs(np.linalg.norm(U, axis=-1) - 1).max() < 1e-12
