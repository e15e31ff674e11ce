import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from stablab.catalog import (AffinePerturbedAnosov, CompositeMap, DerivedFromAnosov, FourierField, FourierTerm,
                             HyperbolicityMeta, LinearAnosov, NorthSouthCircle, PlateauBump, QuarticBump,
                             catalog_from_json, get_map, load_catalog_json, named_perturbation, orbit,
                             periodic_point_count_bruteforce, periodic_point_count_linear,
                             stable_unstable_frame)
from stablab.geometry import PhaseSpace, RandomUniform, distances, sample

A = [[2, 1], [1, 1]]
unit = st.floats(min_value=0.0, max_value=1.0, exclude_max=True)


def lucas(n):
    a, b = 2, 1
    for _ in range(n):
        a, b = b, a + b
    return a


def test_cat_examples(cat):
    np.testing.assert_allclose(cat((0.0, 0.0)), [[0.0, 0.0]])
    np.testing.assert_allclose(cat((0.5, 0.5)), [[0.5, 0.0]], atol=1e-15)
    np.testing.assert_allclose(cat.inverse((0.5, 0.0)), [[0.5, 0.5]], atol=1e-15)


def test_northsouth_examples(ns):
    assert ns((0.25,))[0, 0] == pytest.approx(0.35, abs=1e-15)
    assert ns.inverse((0.35,))[0, 0] == pytest.approx(0.25, abs=1e-12)


def test_northsouth_derivative_positive(ns):
    t = np.linspace(0, 1, 100_001)
    assert np.min(ns.derivative(t)) > 0
    with pytest.raises(ValueError):
        NorthSouthCircle(0.2)


@pytest.mark.parametrize("name", ["cat", "cat_perturbed", "northsouth", "da", "product"])
def test_inverse_contract(catalog, name):
    f = catalog[name]
    X = sample(f.space, RandomUniform(10_000, seed=3))
    assert np.max(distances(f.backward(f.forward(X)), X)) < 1e-10
    assert np.max(distances(f.forward(f.backward(X)), X)) < 1e-10


@pytest.mark.parametrize("name", ["cat", "cat_perturbed", "da"])
@given(x=unit, y=unit)
def test_inverse_contract_pointwise(catalog, name, x, y):
    f = catalog[name]
    p = np.array([[x, y]])
    assert distances(f.backward(f.forward(p)), p)[0] < 1e-10


def test_linear_anosov_rejects_non_hyperbolic():
    with pytest.raises(ValueError, match="not hyperbolic"):
        LinearAnosov([[1, 1], [0, 1]])
    with pytest.raises(ValueError):
        LinearAnosov([[2, 0], [0, 1]])


def test_frame_values():
    fr = stable_unstable_frame(A)
    assert fr.lam_u == pytest.approx((3 + math.sqrt(5)) / 2, abs=1e-12)
    assert fr.lam_s == pytest.approx((3 - math.sqrt(5)) / 2, abs=1e-12)
    assert fr.lam_s * fr.lam_u == pytest.approx(1.0, abs=1e-12)
    # unstable direction proportional to (1, (sqrt 5 - 1)/2)
    assert fr.e_u[1] / fr.e_u[0] == pytest.approx((math.sqrt(5) - 1) / 2, abs=1e-12)
    np.testing.assert_allclose(fr.dual @ np.column_stack([fr.e_s, fr.e_u]), np.eye(2), atol=1e-14)
    s, u = fr.coords(fr.vector(0.3, -0.2)[None])
    assert (s[0], u[0]) == pytest.approx((0.3, -0.2))


@pytest.mark.parametrize("n", range(1, 7))
def test_periodic_counts(n):
    # |det(A^n - I)| = L_{2n} - 2 for the golden cat map (Lucas numbers)
    expected = lucas(2 * n) - 2
    assert periodic_point_count_linear(A, n) == expected
    assert periodic_point_count_bruteforce(A, n) == expected


def test_periodic_counts_frozen():
    assert [periodic_point_count_linear(A, n) for n in range(1, 7)] == [1, 5, 16, 45, 121, 320]
    with pytest.raises(ValueError):
        periodic_point_count_linear(A, 0)


def test_orbit_examples(cat, ns):
    ns_, pts = orbit(cat, (0.0, 0.0), -3, 3)
    assert list(ns_) == list(range(-3, 4))
    np.testing.assert_array_equal(pts, np.zeros((7, 2)))
    _, fwd = orbit(ns, (0.25,), 0, 60)
    # strictly increasing until it rounds onto the fixed point
    assert np.all(np.diff(fwd[:20, 0]) > 0) and np.all(np.diff(fwd[:, 0]) >= 0)
    assert fwd[-1, 0] == pytest.approx(0.5, abs=1e-6)
    _, bwd = orbit(ns, (0.25,), -60, 0)
    assert np.all(np.diff(bwd[:, 0]) > 0) and bwd[0, 0] == pytest.approx(0.0, abs=1e-6)
    with pytest.raises(ValueError):
        orbit(cat, (0.0, 0.0), 2, 1)


def test_da_equals_cat_outside_bump(da, cat):
    X = sample(PhaseSpace.TORUS2, RandomUniform(20_000, seed=2))
    out = distances(X, np.zeros_like(X)) >= da.radius
    assert np.array_equal(da.forward(X[out]), cat.forward(X[out]))
    # the inverses agree wherever the cat preimage avoids the bump
    pre = cat.backward(X)
    keep = distances(pre, np.zeros_like(pre)) >= da.radius
    assert np.max(distances(da.backward(X[keep]), pre[keep])) < 1e-14


def test_da_fixed_point_repels(da):
    fr = da.frame
    assert fr.lam_s + da.strength > 1
    # along the stable line through p the map expands near p
    s = np.array([1e-3])
    assert abs(da.stable_map(s, np.zeros(1))[0]) > abs(s[0])
    assert da.min_stable_derivative > 0


def test_quartic_bump_is_not_injective():
    with pytest.raises(ValueError, match="not injective"):
        DerivedFromAnosov(bump=QuarticBump())


def test_plateau_bump_shape():
    b = PlateauBump()
    assert b(0.0) == 1.0 and b(0.1) == 1.0
    assert b(1.0) == 0.0 and b(1.5) == 0.0
    rho = np.linspace(0, 1, 2001)
    g = rho * b(rho)
    # rho*phi has slope >= -slope and is continuous at the support edge
    assert np.min(np.diff(g) / np.diff(rho)) >= -b.slope - 1e-6
    assert g[-2] == pytest.approx(0.0, abs=1e-6)


def test_fourier_field_periodic_and_jacobian():
    p = named_perturbation("default")
    X = sample(PhaseSpace.TORUS2, RandomUniform(200, seed=5))
    np.testing.assert_allclose(p(X + 1.0), p(X), atol=1e-13)
    h = 1e-6
    for k in range(2):
        e = np.zeros(2)
        e[k] = h
        num = (p(X + e) - p(X - e)) / (2 * h)
        np.testing.assert_allclose(p.jacobian(X)[..., k], num, atol=1e-8)
    assert FourierField.from_json(p.to_json()) == p
    with pytest.raises(ValueError):
        FourierTerm((0, 1), (1.0, 0.0), "tan")


def test_perturbed_map_distance(catalog, cat):
    g = catalog["cat_perturbed"]
    X = sample(PhaseSpace.TORUS2, RandomUniform(2000, seed=1))
    d = np.max(distances(cat.forward(X), g.forward(X)))
    assert d == pytest.approx(0.01 / (2 * np.pi), rel=1e-3)


def test_meta_validation():
    with pytest.raises(ValueError):
        HyperbolicityMeta(0.1, 1.2)
    with pytest.raises(ValueError):
        HyperbolicityMeta(0.1, 0.5, C=0.5)
    with pytest.raises(ValueError):
        HyperbolicityMeta(0.0, 0.5)
    m = HyperbolicityMeta(0.3, 0.38, 1.0, "cat")
    assert HyperbolicityMeta.from_json(m.to_json()) == m


def test_catalog_round_trip(catalog):
    obj = load_catalog_json()
    rebuilt = catalog_from_json(obj)
    assert list(rebuilt) == list(catalog)
    for name, f in catalog.items():
        assert rebuilt[name].parameters() == f.parameters()
        assert rebuilt[name].meta == f.meta
    assert get_map("cat").meta.spectral_spec == "cat"
    with pytest.raises(KeyError):
        get_map("henon")


def test_composite_map(cat):
    ident = CompositeMap(PhaseSpace.TORUS2)
    X = sample(PhaseSpace.TORUS2, RandomUniform(50, seed=0))
    np.testing.assert_array_equal(ident.forward(X), X)
    two = CompositeMap(PhaseSpace.TORUS2, [(cat, 2)])
    np.testing.assert_allclose(two.forward(X), cat.forward(cat.forward(X)), atol=1e-15)
    np.testing.assert_allclose(two.backward(two.forward(X)), X, atol=1e-12)


def test_affine_perturbed_zero_amplitude(cat):
    g = AffinePerturbedAnosov(amplitude=0.0)
    X = sample(PhaseSpace.TORUS2, RandomUniform(50, seed=0))
    np.testing.assert_array_equal(g.forward(X), cat.forward(X))
