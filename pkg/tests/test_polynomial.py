import numpy as np
import pytest

from lkcurv.catalog.polynomial import Poly


def brute_eval(terms, pts):
    out = np.zeros(pts.shape[0])
    for exps, coeff in terms.items():
        term = np.full(pts.shape[0], coeff)
        for j, e in enumerate(exps):
            term = term * pts[:, j] ** e
        out += term
    return out


@pytest.fixture()
def quadric():
    # x^2 + y^2 - z^2 - 1
    return Poly(3, {(2, 0, 0): 1.0, (0, 2, 0): 1.0, (0, 0, 2): -1.0, (0, 0, 0): -1.0})


def test_eval_matches_brute_force(rng):
    terms = {(2, 0, 1): 1.5, (0, 3, 0): -2.0, (1, 1, 1): 0.25, (0, 0, 0): 3.0}
    p = Poly(3, terms)
    pts = rng.standard_normal((200, 3))
    assert np.allclose(p.eval(pts), brute_eval(terms, pts), atol=1e-12)


def test_gradient_matches_finite_differences(quadric, rng):
    pts = rng.standard_normal((50, 3))
    grads = quadric.grad_eval(pts)
    h = 1e-6
    for j in range(3):
        shift = np.zeros(3)
        shift[j] = h
        fd = (quadric.eval(pts + shift) - quadric.eval(pts - shift)) / (2 * h)
        assert np.allclose(grads[:, j], fd, atol=1e-6)


def test_compose_affine_agrees_pointwise(quadric, rng):
    base = np.array([0.2, -0.5, 1.0])
    frame = np.linalg.qr(rng.standard_normal((3, 2)))[0].T
    restricted = quadric.compose_affine(base, frame)
    s = rng.standard_normal((100, 2))
    ambient = base[None, :] + s @ frame
    assert np.allclose(restricted.eval(s), quadric.eval(ambient), atol=1e-10)


def test_leading_form_commutes_with_restriction(quadric, rng):
    # the end classification of sections rests on this: the top part of the
    # restricted polynomial is the linear restriction of the ambient top part
    ambient = quadric.leading_form().quadratic_form_matrix()
    for _ in range(20):
        base = rng.standard_normal(3)
        frame = np.linalg.qr(rng.standard_normal((3, 2)))[0].T
        restricted = quadric.compose_affine(base, frame)
        assert restricted.degree() == 2
        got = restricted.leading_form().quadratic_form_matrix()
        expected = frame @ ambient @ frame.T
        assert np.allclose(got, expected, atol=1e-12)


def test_degree_and_leading_form(quadric):
    assert quadric.degree() == 2
    top = quadric.leading_form()
    assert top.terms == {(2, 0, 0): 1.0, (0, 2, 0): 1.0, (0, 0, 2): -1.0}
    a = Poly(2, {(2, 0): 1.0, (1, 1): 4.0, (0, 2): 2.0, (1, 0): 7.0}).quadratic_form_matrix()
    assert np.allclose(a, [[1.0, 2.0], [2.0, 2.0]])


def test_json_term_round_trip(quadric):
    doc = quadric.to_json_terms()
    back = Poly.from_json_terms(3, doc)
    assert back.terms == quadric.terms


def test_algebra():
    x = Poly.variable(2, 0)
    y = Poly.variable(2, 1)
    p = (x + y) * (x - y)
    assert p.terms == {(2, 0): 1.0, (0, 2): -1.0}
    assert (x.power(3)).terms == {(3, 0): 1.0}
    assert Poly.zero(2).degree() == -1
