import numpy as np
import pytest

from stablab.catalog import AffinePerturbedAnosov, LinearAnosov, named_perturbation
from stablab.conjugacy import (F_h, F_h_inverse, GridHomeo, PerturbationTooLarge, c0_distance,
                               conjugacy_residual, d0, modulus_of_continuity, moser_solve,
                               push_centralizer, reversibility_check)
from stablab.geometry import PhaseSpace, RandomUniform, distances, sample
from stablab.homeo import Identity, MapPower, negation, translation

T2 = PhaseSpace.TORUS2


def perturbed(eps, name="default"):
    return AffinePerturbedAnosov(perturbation=named_perturbation(name), amplitude=eps)


@pytest.fixture(scope="module")
def solved():
    cat = LinearAnosov()
    g = perturbed(0.01)
    return cat, g, moser_solve(cat, g, resolution=128)


def test_d0_is_symmetric_and_zero_on_diagonal(cat):
    t = translation(T2, (0.1, 0.05))
    ident = Identity(T2)
    assert d0(t, t).value == 0.0
    assert d0(t, ident).value == pytest.approx(d0(ident, t).value)
    # a translation by v moves every point by |v| forwards and backwards
    assert d0(t, ident).value == pytest.approx(2 * np.hypot(0.1, 0.05), abs=1e-12)


def test_d0_space_mismatch(cat, ns):
    with pytest.raises(ValueError):
        d0(cat, ns)


def test_c0_distance_constant_perturbation(cat):
    g = perturbed(0.01, "constant")
    assert c0_distance(cat, g) == pytest.approx(0.01, abs=1e-15)


def test_constant_perturbation_closed_form(cat):
    # g(x) = Ax + c has the conjugacy h(x) = x + u0 with (I - A) u0 = c
    g = perturbed(0.01, "constant")
    h = moser_solve(cat, g, resolution=32)
    u0 = 0.01 * np.linalg.solve(np.eye(2) - cat.matrix, [1.0, 0.0])
    np.testing.assert_allclose(h.field, np.broadcast_to(u0, h.field.shape), atol=1e-12)
    assert h.residual < 1e-12


def test_moser_residual_small(solved):
    cat, g, h = solved
    assert h.residual < 1e-6
    assert conjugacy_residual(cat, g, h, RandomUniform(500, seed=1)) < 1e-6
    assert h.injectivity_probe()
    assert h.residual_history[-1] <= h.residual_history[0]


def test_moser_sup_u_scales_linearly():
    cat = LinearAnosov()
    a = moser_solve(cat, perturbed(1e-3), resolution=64)
    b = moser_solve(cat, perturbed(1e-2), resolution=64)
    assert b.sup_u / a.sup_u == pytest.approx(10.0, rel=0.05)


def test_grid_homeo_inverse(solved):
    _, _, h = solved
    X = sample(T2, RandomUniform(1000, seed=4))
    assert np.max(distances(h.backward(h.forward(X)), X)) < 1e-12


def test_grid_homeo_validation():
    with pytest.raises(ValueError):
        GridHomeo(np.zeros((4, 4, 3)))
    with pytest.raises(ValueError):
        GridHomeo(np.zeros((4, 4, 2)), interpolation="cubic")


def test_moser_rejects_bad_input(cat, ns):
    with pytest.raises(TypeError):
        moser_solve(ns, perturbed(0.01))
    with pytest.raises(ValueError):
        moser_solve(cat, perturbed(0.01), resolution=1)


def test_moser_perturbation_too_large(cat):
    with pytest.raises(PerturbationTooLarge):
        moser_solve(cat, perturbed(0.9), resolution=32, max_outer=30)


def test_F_h_round_trip(solved):
    _, _, h = solved
    neg = negation(T2)
    X = sample(T2, RandomUniform(1000, seed=2))
    rt = F_h_inverse(h, F_h(h, neg))
    assert np.max(distances(rt.forward(X), neg.forward(X))) < 1e-12


def test_F_h_composition_law(solved, cat):
    _, _, h = solved
    neg, A = negation(T2), MapPower(cat, 1)
    lhs = F_h(h, neg @ A)
    rhs = F_h(h, neg) @ h.inv @ F_h(h, A)
    assert d0(lhs, rhs, RandomUniform(500, seed=3)).value < 1e-10


def test_F_h_warns_on_non_commuting(solved, cat):
    _, _, h = solved
    with pytest.warns(UserWarning, match="does not commute"):
        F_h(h, translation(T2, (0.3, 0.1)), f=cat)


def test_push_centralizer_commutes(solved):
    _, g, h = solved
    psi = push_centralizer(h.inv, negation(T2))
    X = sample(T2, RandomUniform(500, seed=8))
    assert np.max(distances(psi.forward(g.forward(X)), g.forward(psi.forward(X)))) < 1e-5


def test_negation_reverses_nothing_but_commutes(cat):
    # -id commutes with the cat map, so it is not a reversor
    assert reversibility_check(cat, negation(T2)) > 0.1


def test_modulus_of_continuity_translation():
    t = translation(T2, (0.3, 0.3))
    assert modulus_of_continuity(t, 0.01) == pytest.approx(0.01, abs=1e-12)


def test_conjugacy_rejects_bad_grid_displacement():
    with pytest.raises(ValueError):
        GridHomeo(np.full((4, 4, 2), 0.4))


def test_push_centralizer_constant_perturbation(cat):
    # g = A x + c is not symmetric under -id, but h o (-id) o h^-1 = x -> -x + 2 u0 is
    g = perturbed(0.01, "constant")
    h = moser_solve(cat, g, resolution=16)
    neg = negation(T2)
    X = sample(T2, RandomUniform(500, seed=12))
    assert np.max(distances(neg.forward(g.forward(X)), g.forward(neg.forward(X)))) > 1e-3
    psi = push_centralizer(h.inv, neg)
    assert np.max(distances(psi.forward(g.forward(X)), g.forward(psi.forward(X)))) < 1e-12
    u0 = 0.01 * np.linalg.solve(np.eye(2) - cat.matrix, [1.0, 0.0])
    assert np.max(distances(psi.forward(X), neg.forward(X) + 2 * u0)) < 1e-12


def test_residual_history_non_increasing(solved):
    hist = np.asarray(solved[2].residual_history)
    assert np.all(np.diff(hist[1:]) <= 1e-14)


def test_grid_refinement_consistency(cat):
    g = perturbed(0.01)
    coarse = moser_solve(cat, g, resolution=32).residual
    fine = moser_solve(cat, g, resolution=64).residual
    assert fine <= coarse + 1e-8


def test_F_h_is_d0_continuous_on_bump_family(solved, da):
    from stablab.centralizer import bump_family
    _, _, h = solved
    ts = [0.125, 0.25, 0.5, 1.0]
    fam = bump_family(da, [*ts, 0.0])
    ref, members = fam[-1], fam[:-1]
    s = RandomUniform(1500, seed=14)
    raw = [d0(m, ref, s).value for m in members]
    pushed = [d0(F_h(h, m), F_h(h, ref), s).value for m in members]
    assert np.all(np.diff(raw) > 0) and np.all(np.diff(pushed) > 0)
    # h is close to the identity with modulus about 1, so distances change little
    np.testing.assert_allclose(pushed, raw, rtol=0.1)
