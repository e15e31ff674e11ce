"""The acceptance suite: seven criteria with measured values, thresholds and verdicts."""
from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from . import chains
from .catalog import (AffinePerturbedAnosov, LinearAnosov, default_catalog, named_perturbation,
                      periodic_point_count_bruteforce, periodic_point_count_linear)
from .centralizer import (BumpPushSpec, bump_push_family, commutation_residual, discreteness_probe,
                          ms_family, product_lift, translation_candidates)
from .conjugacy import F_h, F_h_inverse, c0_distance, d0, moser_solve, push_centralizer
from .expansive import (dense_expansiveness_probe, heteroclinic_separated_set, sensitivity_probe,
                        shrinking_ball_certificate)
from .geometry import PhaseSpace, RandomUniform, UniformGrid, distances, sample
from .homeo import Affine, MapPower, negation

SUITES = {
    "conjugacy": (1, 2),
    "centralizer": (3, 4),
    "expansive": (5,),
    "chains": (6,),
    "all": (1, 2, 3, 4, 5, 6, 7),
}


@dataclass
class Check:
    name: str
    value: float
    threshold: float
    relation: str  # "<", "<=", ">", ">=", "==", "in"
    passed: bool

    def to_json(self) -> dict:
        return {"name": self.name, "value": self.value, "threshold": self.threshold,
                "relation": self.relation, "passed": self.passed}


def check(name: str, value, relation: str, threshold) -> Check:
    ops = {
        "<": lambda v, t: v < t,
        "<=": lambda v, t: v <= t,
        ">": lambda v, t: v > t,
        ">=": lambda v, t: v >= t,
        "==": lambda v, t: v == t,
        "in": lambda v, t: t[0] <= v <= t[1],
    }
    return Check(name, value, threshold, relation, bool(ops[relation](value, threshold)))


@dataclass
class CriterionResult:
    number: int
    title: str
    checks: list[Check]
    seconds: float

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_json(self, timing: bool = False) -> dict:
        out = {"criterion": self.number, "title": self.title, "passed": self.passed,
               "checks": [c.to_json() for c in self.checks]}
        if timing:
            out["seconds"] = self.seconds
        return out


# ---------------------------------------------------------------- criteria


def _perturbed(eps: float, name: str = "default") -> AffinePerturbedAnosov:
    return AffinePerturbedAnosov(perturbation=named_perturbation(name), amplitude=eps)


def criterion_1() -> list[Check]:
    cat = LinearAnosov()
    out = []
    K = {}
    t0 = time.perf_counter()
    for eps in (1e-3, 1e-2):
        g = _perturbed(eps)
        h = moser_solve(cat, g, resolution=256)
        out.append(check(f"off-grid conjugacy residual, eps={eps:g}", h.residual, "<", 1e-6))
        K[eps] = h.sup_u / c0_distance(cat, g)
    out.append(check("K_estimate(1e-2) / K_estimate(1e-3)", K[1e-2] / K[1e-3], "in", (0.5, 2.0)))
    g = _perturbed(0.01, "constant")
    h = moser_solve(cat, g, resolution=32)
    u0 = 0.01 * np.linalg.solve(np.eye(2) - cat.matrix, [1.0, 0.0])
    err = float(np.max(np.abs(h.field - u0)))
    out.append(check("constant perturbation closed form error", err, "<", 1e-10))
    out.append(check("solver runtime seconds", time.perf_counter() - t0, "<", 60.0))
    return out


def criterion_2() -> list[Check]:
    cat = LinearAnosov()
    g = _perturbed(0.01)
    h = moser_solve(cat, g, resolution=256)
    X = sample(PhaseSpace.TORUS2, RandomUniform(1000, seed=21))
    neg = negation(PhaseSpace.TORUS2)
    A = MapPower(cat, 1)
    rt = F_h_inverse(h, F_h(h, neg))
    round_trip = float(np.max(distances(rt.forward(X), neg.forward(X))))
    lhs = F_h(h, neg @ A)
    rhs = F_h(h, neg) @ h.inv @ F_h(h, A)
    law = d0(lhs, rhs, RandomUniform(1000, seed=22)).value
    # h o cat = g o h, so conjugating by h^-1 carries the cat centralizer to that of g
    psi = push_centralizer(h.inv, neg)
    comm = commutation_residual(g, psi, RandomUniform(1000, seed=23))
    return [
        check("F_h round trip error", round_trip, "<", 1e-12),
        check("composition law d0", law, "<", 1e-10),
        check("Psi(-id) commutation residual with g", comm, "<", 1e-5),
    ]


def criterion_3() -> list[Check]:
    cat = default_catalog()
    ns, da = cat["northsouth"], cat["da"]
    out = []
    ts = np.linspace(0.0, 1.0, 11)
    fam = ms_family(ns, ts, scale=0.01)
    res = max(commutation_residual(ns, h) for h in fam)
    out.append(check("north-south family max commutation residual", res, "<", 1e-8))
    grid = UniformGrid(2048)
    dmin = min(d0(fam[i], fam[j], grid).value for i in range(len(fam)) for j in range(i + 1, len(fam)))
    out.append(check("north-south family min pairwise d0", dmin, ">", 1e-4))
    X = sample(da.space, RandomUniform(10_000, seed=11))
    spec = BumpPushSpec(da, zeta=0.01)
    worst, unresolved = 0.0, 0.0
    for t in ts:
        h = bump_push_family(spec.with_t(float(t)))
        worst = max(worst, commutation_residual(da, h))
        unresolved = max(unresolved, h.unresolved_fraction(X))
    out.append(check("DA bump-push max commutation residual", worst, "<", 1e-6))
    out.append(check("DA bump-push unresolved fraction", unresolved, "<", 1e-3))
    h0 = bump_push_family(spec.with_t(0.0))
    out.append(check("DA h_0 max displacement", float(np.max(np.abs(h0.forward(X) - X))), "==", 0.0))
    lift = product_lift(fam[-1])
    out.append(check("product lift commutation residual", commutation_residual(cat["product"], lift), "<", 1e-8))
    return out


def criterion_4() -> list[Check]:
    f = default_catalog()["cat"]
    report = discreteness_probe(f, translation_candidates(64), sampler=UniformGrid(16))
    out = [check("min commutation residual over nonzero 64-grid translations", report.min_residual, ">=", 0.05)]
    exact = [negation(f.space)] + [Affine(f.space, np.linalg.matrix_power(f.matrix, n)) for n in (1, 2, 3)]
    exact += [Affine(f.space, np.rint(np.linalg.matrix_power(f.matrix.astype(float), -n)).astype(np.int64))
              for n in (1, 2, 3)]
    worst = max(commutation_residual(f, h, RandomUniform(4096, seed=4)) for h in exact)
    out.append(check("max commutation residual of -id and A^n, |n|<=3", worst, "<", 1e-12))
    return out


def criterion_5() -> list[Check]:
    cat = default_catalog()
    f, da, ns, prod = cat["cat"], cat["da"], cat["northsouth"], cat["product"]
    out = []
    r = dense_expansiveness_probe(f, sample(f.space, UniformGrid(32)), 0.2, 15, max_pairs=None)
    out.append(check("cat: fraction of 32x32 grid pairs separated (eps 0.2, N 15)", r.fraction, "==", 1.0))
    H = heteroclinic_separated_set(da, 200)
    r = dense_expansiveness_probe(da, H, da.meta.eps0 / 2, 60, max_pairs=None)
    out.append(check("DA: fraction of heteroclinic-set pairs separated (eps0/2, N 60)", r.fraction, "==", 1.0))
    r = dense_expansiveness_probe(ns, sample(ns.space, UniformGrid(64)), 0.1, 200)
    out.append(check("north-south: fraction of 64-grid pairs separated (eps 0.1, N 200)", r.fraction, "<", 1.0))
    cert = shrinking_ball_certificate(ns, 0.1)
    out.append(check("north-south: certified max diameter of shrinking ball", cert.max_diameter, "<", 0.1))
    s = sensitivity_probe(ns, UniformGrid(200), 1e-3, 0.2, 200)
    out.append(check("north-south: sensitivity fraction", s.fraction, "<", 1.0))
    s = sensitivity_probe(prod, UniformGrid(6), 1e-3, 0.1, 30)
    out.append(check("product: sensitivity fraction (delta 1e-3, eps 0.1, N 30)", s.fraction, "==", 1.0))
    return out


EXPECTED_VERDICTS = {
    "cat": (True, True, True, True),
    "da": (True, True, False, False),
    "northsouth": (False, False, False, False),
    "product": (True, True, False, False),
}


def criterion_6(n_random: int = 1000, seed: int = 6) -> list[Check]:
    out = []
    for name, want in EXPECTED_VERDICTS.items():
        got = chains.verdict(chains.load_spec(name)).as_tuple()
        out.append(check(f"verdict of shipped spec {name}", float(got == want), "==", 1.0))
    ex = chains.load_spec("example44")
    out.append(check("example44 forward selection", float(chains.select_theta(ex) == (["L1", "L2"], [])), "==", 1.0))
    rev = chains.select_theta(chains.reverse_spec(ex))
    out.append(check("example44 inverse selection", float(rev == (["L5"], ["L1"])), "==", 1.0))
    rng = np.random.default_rng(seed)
    bad = 0
    for _ in range(n_random):
        v = chains.verdict(chains.random_valid_spec(rng))
        bad += (v.densely_expansive != v.sensitive) or (v.anosov != v.centralizer_discrete)
    out.append(check(f"random specs violating verdict equivalences (of {n_random})", bad, "==", 0))
    return out


def criterion_7() -> list[Check]:
    cat = default_catalog()
    out = []
    for name, f in cat.items():
        X = sample(f.space, RandomUniform(10_000, seed=7))
        err = float(np.max(distances(f.forward(f.backward(X)), X)))
        err = max(err, float(np.max(distances(f.backward(f.forward(X)), X))))
        out.append(check(f"inverse contract error, {name}", err, "<", 1e-10))
    A = cat["cat"].matrix
    mism = sum(periodic_point_count_linear(A, n) != periodic_point_count_bruteforce(A, n) for n in range(1, 7))
    out.append(check("periodic count mismatches for n<=6", mism, "==", 0))
    da, f = cat["da"], cat["cat"]
    X = sample(f.space, RandomUniform(10_000, seed=8))
    outside = distances(X, np.broadcast_to(da.center, X.shape)) >= da.radius
    diff = float(np.max(np.abs(da.forward(X[outside]) - f.forward(X[outside]))))
    out.append(check("DA minus cat outside the bump support", diff, "==", 0.0))
    return out


CRITERIA = {
    1: ("Moser conjugacy", criterion_1),
    2: ("Conjugacy-space machinery", criterion_2),
    3: ("Centralizer constructions", criterion_3),
    4: ("Discreteness contrast", criterion_4),
    5: ("Expansiveness", criterion_5),
    6: ("Chains oracle", criterion_6),
    7: ("Catalog soundness", criterion_7),
}


def run_criterion(k: int) -> CriterionResult:
    title, fn = CRITERIA[k]
    t0 = time.perf_counter()
    checks = fn()
    return CriterionResult(k, title, checks, time.perf_counter() - t0)


def run_suite(selector: str = "all") -> list[CriterionResult]:
    if selector not in SUITES:
        raise ValueError(f"unknown suite {selector!r}; choose from {sorted(SUITES)}")
    return [run_criterion(k) for k in SUITES[selector]]


def format_table(results: list[CriterionResult]) -> str:
    lines = []
    for r in results:
        lines.append(f"[{'PASS' if r.passed else 'FAIL'}] {r.number}. {r.title}")
        for c in r.checks:
            thr = f"[{c.threshold[0]:g}, {c.threshold[1]:g}]" if c.relation == "in" else f"{c.threshold:g}"
            lines.append(f"    {'ok ' if c.passed else 'BAD'} {c.name}: {c.value:.6g} {c.relation} {thr}")
    return "\n".join(lines)
