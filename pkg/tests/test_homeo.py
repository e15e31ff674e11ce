import numpy as np
import pytest

from stablab.geometry import PhaseSpace, RandomUniform, distances, sample
from stablab.homeo import (Affine, Compose, Identity, Inverse, MapPower, ProductOf, negation, simplify,
                           translation)

X2 = sample(PhaseSpace.TORUS2, RandomUniform(500, seed=2))


def test_identity_and_power(cat):
    np.testing.assert_array_equal(Identity(PhaseSpace.TORUS2).forward(X2), X2)
    p = MapPower(cat, 3)
    back = p.backward(p.forward(X2))
    assert np.max(distances(back, X2)) < 1e-12


def test_affine_requires_unimodular():
    with pytest.raises(ValueError):
        Affine(PhaseSpace.TORUS2, [[2, 0], [0, 1]])
    t = translation(PhaseSpace.TORUS2, (0.3, 0.7))
    assert np.max(distances(t.backward(t.forward(X2)), X2)) < 1e-15


def test_inverse_collapses():
    n = negation(PhaseSpace.TORUS2)
    assert Inverse(Inverse(n)) is n
    assert n.inv.inv is n


def test_compose_order(cat):
    t = translation(PhaseSpace.TORUS2, (0.1, 0.0))
    c = Compose(t, MapPower(cat))  # translate after the map
    expected = t.forward(cat.forward(X2))
    np.testing.assert_allclose(c.forward(X2), expected, atol=1e-15)
    assert np.max(distances(c.backward(c.forward(X2)), X2)) < 1e-12
    assert len(Compose(c, c).parts) == 4


def test_compose_space_mismatch(cat, ns):
    with pytest.raises(ValueError, match="space mismatch"):
        Compose(MapPower(cat), MapPower(ns))


def test_simplify_cancels_pairs(cat):
    k = MapPower(cat, 1)
    t = translation(PhaseSpace.TORUS2, (0.2, 0.2))
    assert isinstance(simplify(Compose(k.inv, k)), Identity)
    assert simplify(Compose(t, k, k.inv)) is t


def test_product_of(ns, cat):
    p = ProductOf(MapPower(ns), Identity(PhaseSpace.TORUS2))
    X = sample(PhaseSpace.CIRCLE_TIMES_TORUS2, RandomUniform(100, seed=0))
    Y = p.forward(X)
    np.testing.assert_array_equal(Y[:, 1:], X[:, 1:])
    np.testing.assert_allclose(Y[:, :1], ns.forward(X[:, :1]))
    with pytest.raises(ValueError):
        ProductOf(MapPower(cat), Identity(PhaseSpace.TORUS2))
    assert p.describe()["node"] == "ProductOf"
