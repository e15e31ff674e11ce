import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from stablab.chains import (SHIPPED_SPECS, Piece, SpecError, SpectralSpec, analyze, format_spec, load_spec,
                            maximal_chains, parse_spec, random_valid_spec, reverse_spec, select_theta,
                            theorem_A_predicate, theorem_C_predicate, verdict)

MS = """ambient 1
piece N kind=repeller trivial=yes dim_u=1 dim_s=0
piece S kind=attractor trivial=yes dim_u=0 dim_s=1
edge N > S
"""


def messages(text):
    with pytest.raises(SpecError) as exc:
        parse_spec(text)
    return [(v.line, v.message) for v in exc.value.violations]


@pytest.mark.parametrize("name,want", [
    ("cat", (True, True, True, True)),
    ("da", (True, True, False, False)),
    ("northsouth", (False, False, False, False)),
    ("product", (True, True, False, False)),
])
def test_shipped_verdicts(name, want):
    assert verdict(load_spec(name)).as_tuple() == want


def test_all_shipped_specs_parse():
    for name in SHIPPED_SPECS:
        spec = load_spec(name)
        assert parse_spec(format_spec(spec)) == spec
    with pytest.raises(KeyError):
        load_spec("lorenz")


def test_example44_selection():
    ex = load_spec("example44")
    assert select_theta(ex) == (["L1", "L2"], [])
    assert select_theta(reverse_spec(ex)) == (["L5"], ["L1"])


def test_da_selection():
    # the trivial repeller above Lambda blocks it, and p then misses every selected attractor
    assert select_theta(load_spec("da")) == ([], ["p"])


def test_northsouth_witness():
    ok, wit = theorem_A_predicate(parse_spec(MS))
    assert not ok and wit == [("N", "S")]


def test_maximal_chains():
    ex = load_spec("example44")
    assert maximal_chains(ex) == [("L3", "L1"), ("L4", "L1"), ("L5", "L2")]
    assert maximal_chains(load_spec("cat")) == [("T2",)]


def test_transitive_vs_one_step():
    text = """ambient 2
piece R kind=repeller trivial=yes dim_u=2 dim_s=0
piece M kind=saddle trivial=no dim_u=1 dim_s=1
piece A kind=attractor trivial=yes dim_u=0 dim_s=2
edge R > M
edge M > A
"""
    spec = parse_spec(text)
    assert theorem_A_predicate(spec) == (False, [("R", "A")])
    assert theorem_A_predicate(spec, transitive=False) == (True, [])
    assert maximal_chains(spec) == [("R", "M", "A")]
    assert not theorem_C_predicate(spec)[0]
    out = analyze(spec, verbose=True)
    assert out["one_step"]["theorem_A"] is True and out["verdict"]["sensitive"] is False


def test_cycle_detected():
    text = """ambient 2
piece A kind=saddle trivial=no dim_u=1 dim_s=1
piece B kind=saddle trivial=no dim_u=1 dim_s=1
edge A > B
edge B > A
"""
    msgs = messages(text)
    assert any("no-cycles violated" in m for _, m in msgs)


def test_self_edge():
    text = MS + "edge N > N\n"
    assert (5, "no-cycles violated: self edge") in messages(text)


def test_dim_u_increase():
    text = """ambient 2
piece A kind=repeller trivial=no dim_u=1 dim_s=1
piece B kind=attractor trivial=no dim_u=2 dim_s=0
edge A > B
"""
    assert (4, "dim_u increases along A > B") in messages(text)


def test_splitting_dimensions():
    text = "ambient 2\npiece A kind=attractor trivial=no dim_u=1 dim_s=2\n"
    assert any(ln == 2 and "splitting dimensions" in m for ln, m in messages(text))
    text = "ambient 1\npiece A kind=attractor trivial=yes dim_u=1 dim_s=0\n"
    assert any("trivial attractor" in m for _, m in messages(text))


def test_unknown_piece_in_edge():
    assert (5, "unknown piece X in edge") in messages(MS + "edge N > X\n")


def test_parse_errors_have_line_numbers():
    msgs = messages("piece A kind=blob trivial=no dim_u=1 dim_s=0\nfoo bar\n")
    lines = [ln for ln, _ in msgs]
    assert 1 in lines and 2 in lines
    assert any("missing 'ambient" in m for _, m in msgs)


def test_kind_position_rules():
    text = """ambient 1
piece S kind=attractor trivial=yes dim_u=0 dim_s=1
piece N kind=repeller trivial=yes dim_u=1 dim_s=0
edge S > N
"""
    msgs = [m for _, m in messages(text)]
    assert any("must be a sink" in m for m in msgs)
    assert any("must be a source" in m for m in msgs)


def test_direct_construction_validates():
    with pytest.raises(SpecError):
        SpectralSpec((Piece("A", "attractor", False, 1, 1),), (), 3)


def test_reverse_is_involution():
    for name in SHIPPED_SPECS:
        spec = load_spec(name)
        assert reverse_spec(reverse_spec(spec)) == spec


@given(seed=st.integers(0, 2**32 - 1))
def test_random_specs_round_trip_and_equivalences(seed):
    spec = random_valid_spec(np.random.default_rng(seed))
    assert parse_spec(format_spec(spec)) == spec
    v = verdict(spec)
    assert v.densely_expansive == v.sensitive
    assert v.anosov == v.centralizer_discrete
    reverse_spec(spec)


def test_thousand_random_specs():
    rng = np.random.default_rng(2024)
    for _ in range(1000):
        spec = random_valid_spec(rng)
        assert parse_spec(format_spec(spec)) == spec


def _components(spec):
    parent = {p.name: p.name for p in spec.pieces}

    def find(a):
        while parent[a] != a:
            a = parent[a]
        return a

    for a, b in spec.edges:
        parent[find(a)] = find(b)
    groups = {}
    for p in spec.pieces:
        groups.setdefault(find(p.name), []).append(p)
    return list(groups.values())


@given(seed=st.integers(0, 2**32 - 1))
def test_structural_invariants(seed):
    spec = random_valid_spec(np.random.default_rng(seed))
    by = spec.by_name
    if verdict(spec).anosov:
        # dim_u is constant along chains, hence on each connected component
        for comp in _components(spec):
            assert len({p.dim_u for p in comp}) == 1
    theta_a, theta_r = select_theta(spec)
    assert all(by[n].kind == "attractor" for n in theta_a)
    assert all(by[n].kind == "repeller" for n in theta_r)
    assert {p.name for p in spec.pieces if p.kind == "attractor" and p.trivial} <= set(theta_a)
    for chain in maximal_chains(spec):
        if len(chain) > 1:
            assert by[chain[0]].kind == "repeller" and by[chain[-1]].kind == "attractor"
