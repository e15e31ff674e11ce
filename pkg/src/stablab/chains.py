"""Declared spectral decompositions and the combinatorial decision procedures.

A spec lists basic pieces (attractor, repeller or saddle; trivial or not;
unstable and stable dimensions) and the order edges ``A > B`` between them.
From it we read off maximal chains, the trivial-basin predicate behind dense
expansiveness and sensitivity, the constant-unstable-dimension predicate
behind the Anosov property and discreteness of the centralizer, and the
selection of periodic orbits used to build dense expansive sets.
"""
from __future__ import annotations

import graphlib
from dataclasses import asdict, dataclass, field
from functools import cached_property
from importlib import resources

import numpy as np

KINDS = ("attractor", "repeller", "saddle")
SHIPPED_SPECS = ("cat", "da", "northsouth", "product", "example44")


@dataclass(frozen=True)
class Piece:
    name: str
    kind: str
    trivial: bool
    dim_u: int
    dim_s: int


@dataclass(frozen=True)
class Violation:
    line: int
    message: str

    def __str__(self):
        return f"line {self.line}: {self.message}" if self.line else self.message


class SpecError(ValueError):
    """Raised with the full list of violations found while parsing or validating."""

    def __init__(self, violations: list[Violation]):
        self.violations = list(violations)
        super().__init__("; ".join(str(v) for v in self.violations))


@dataclass(frozen=True)
class SpectralSpec:
    pieces: tuple[Piece, ...]
    edges: tuple[tuple[str, str], ...]
    ambient: int

    def __post_init__(self):
        violations = validate(self)
        if violations:
            raise SpecError(violations)

    @cached_property
    def by_name(self) -> dict[str, Piece]:
        return {p.name: p for p in self.pieces}

    @cached_property
    def successors(self) -> dict[str, list[str]]:
        out = {p.name: [] for p in self.pieces}
        for a, b in self.edges:
            out[a].append(b)
        return out

    @cached_property
    def closure(self) -> dict[str, frozenset[str]]:
        """Names strictly below each piece in the transitive closure of the order."""
        order = graphlib.TopologicalSorter({a: set(bs) for a, bs in self.successors.items()})
        below: dict[str, frozenset[str]] = {}
        for a in order.static_order():  # successors come first
            acc = set()
            for b in self.successors[a]:
                acc |= {b} | below[b]
            below[a] = frozenset(acc)
        return below

    def reaches(self, a: str, b: str) -> bool:
        return b in self.closure[a]

    def names(self, kind: str) -> list[str]:
        return [p.name for p in self.pieces if p.kind == kind]

    def to_json(self) -> dict:
        return {
            "ambient": self.ambient,
            "pieces": [asdict(p) for p in self.pieces],
            "edges": [list(e) for e in self.edges],
        }


# ---------------------------------------------------------------- validation


def _edge_line(lines: dict, a: str, b: str) -> int:
    return lines.get(("edge", a, b), 0)


def validate(spec: SpectralSpec, lines: dict | None = None) -> list[Violation]:
    """All structural violations of a spec (empty list when valid)."""
    lines = lines or {}
    out: list[Violation] = []
    if spec.ambient < 1:
        out.append(Violation(lines.get("ambient", 0), "ambient dimension must be positive"))
    names = [p.name for p in spec.pieces]
    seen = set()
    for p in spec.pieces:
        ln = lines.get(("piece", p.name), 0)
        if p.name in seen:
            out.append(Violation(ln, f"duplicate piece {p.name}"))
        seen.add(p.name)
        if p.kind not in KINDS:
            out.append(Violation(ln, f"unknown kind {p.kind}"))
        if p.dim_u < 0 or p.dim_s < 0 or p.dim_u + p.dim_s != spec.ambient:
            out.append(Violation(ln, f"splitting dimensions of {p.name}: {p.dim_u} + {p.dim_s} != {spec.ambient}"))
        if p.trivial and p.kind == "attractor" and p.dim_u != 0:
            out.append(Violation(ln, f"splitting dimensions of {p.name}: a trivial attractor has dim_u = 0"))
        if p.trivial and p.kind == "repeller" and p.dim_s != 0:
            out.append(Violation(ln, f"splitting dimensions of {p.name}: a trivial repeller has dim_s = 0"))
    if not spec.pieces:
        out.append(Violation(0, "spec declares no pieces"))
    known = set(names)
    good_edges = []
    for a, b in spec.edges:
        ln = _edge_line(lines, a, b)
        bad = [n for n in (a, b) if n not in known]
        if bad:
            out.append(Violation(ln, f"unknown piece {bad[0]} in edge"))
        elif a == b:
            out.append(Violation(ln, "no-cycles violated: self edge"))
        else:
            good_edges.append((a, b))
    if out:
        return out
    kinds = {p.name: p for p in spec.pieces}
    has_in = {a: False for a in names}
    has_out = {a: False for a in names}
    for a, b in good_edges:
        has_out[a] = has_in[b] = True
        ln = _edge_line(lines, a, b)
        if kinds[a].dim_u < kinds[b].dim_u:
            out.append(Violation(ln, f"dim_u increases along {a} > {b}"))
    graph = {a: set() for a in names}
    for a, b in good_edges:
        graph[a].add(b)
    try:
        tuple(graphlib.TopologicalSorter(graph).static_order())
    except graphlib.CycleError as exc:
        cycle = exc.args[1]
        ln = min((_edge_line(lines, cycle[i + 1], cycle[i]) or _edge_line(lines, cycle[i], cycle[i + 1])
                  for i in range(len(cycle) - 1)), default=0)
        out.append(Violation(ln, "no-cycles violated: " + " > ".join(reversed(cycle))))
    for p in spec.pieces:
        ln = lines.get(("piece", p.name), 0)
        if p.kind == "attractor" and has_out[p.name]:
            out.append(Violation(ln, f"attractor {p.name} must be a sink of the order"))
        if p.kind == "repeller" and has_in[p.name]:
            out.append(Violation(ln, f"repeller {p.name} must be a source of the order"))
        if p.kind == "saddle" and not (has_in[p.name] and has_out[p.name]):
            out.append(Violation(ln, f"saddle {p.name} must lie between a repeller and an attractor"))
    return out


# ---------------------------------------------------------------- DSL


def _parse_bool(v: str) -> bool:
    if v not in ("yes", "no"):
        raise ValueError(f"trivial must be yes or no, got {v}")
    return v == "yes"


def parse_spec(text: str) -> SpectralSpec:
    """Parse the line-oriented DSL; raise :class:`SpecError` listing every violation."""
    pieces: list[Piece] = []
    edges: list[tuple[str, str]] = []
    ambient = None
    lines: dict = {}
    errors: list[Violation] = []
    for ln, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head, *rest = line.split()
        try:
            if head == "ambient":
                if len(rest) != 1 or ambient is not None:
                    raise ValueError("expected a single 'ambient <int>' line")
                ambient = int(rest[0])
                lines["ambient"] = ln
            elif head == "piece":
                if not rest:
                    raise ValueError("piece needs a name")
                name, attrs = rest[0], dict(kv.split("=", 1) for kv in rest[1:])
                missing = {"kind", "trivial", "dim_u", "dim_s"} - attrs.keys()
                extra = attrs.keys() - {"kind", "trivial", "dim_u", "dim_s"}
                if missing or extra:
                    raise ValueError(f"piece attributes: missing {sorted(missing)}, unexpected {sorted(extra)}")
                if attrs["kind"] not in KINDS:
                    raise ValueError(f"unknown kind {attrs['kind']}")
                pieces.append(Piece(name, attrs["kind"], _parse_bool(attrs["trivial"]),
                                    int(attrs["dim_u"]), int(attrs["dim_s"])))
                lines.setdefault(("piece", name), ln)
            elif head == "edge":
                if len(rest) != 3 or rest[1] != ">":
                    raise ValueError("expected 'edge <A> > <B>'")
                edges.append((rest[0], rest[2]))
                lines.setdefault(("edge", rest[0], rest[2]), ln)
            else:
                raise ValueError(f"unknown directive {head}")
        except ValueError as exc:
            errors.append(Violation(ln, f"parse error: {exc}"))
    if ambient is None:
        errors.append(Violation(0, "parse error: missing 'ambient <int>' line"))
    if errors:
        raise SpecError(errors)
    spec = object.__new__(SpectralSpec)
    object.__setattr__(spec, "pieces", tuple(pieces))
    object.__setattr__(spec, "edges", tuple(edges))
    object.__setattr__(spec, "ambient", ambient)
    violations = validate(spec, lines)
    if violations:
        raise SpecError(violations)
    return spec


def format_spec(spec: SpectralSpec) -> str:
    out = [f"ambient {spec.ambient}"]
    for p in spec.pieces:
        out.append(f"piece {p.name} kind={p.kind} trivial={'yes' if p.trivial else 'no'} "
                   f"dim_u={p.dim_u} dim_s={p.dim_s}")
    for a, b in spec.edges:
        out.append(f"edge {a} > {b}")
    return "\n".join(out) + "\n"


def load_spec(name: str) -> SpectralSpec:
    """One of the shipped specs by name."""
    if name not in SHIPPED_SPECS:
        raise KeyError(f"unknown spec {name}")
    return parse_spec(resources.files("stablab").joinpath(f"data/specs/{name}.txt").read_text("utf-8"))


def reverse_spec(spec: SpectralSpec) -> SpectralSpec:
    """The spec of the inverse map: attractors and repellers swap, edges and splittings flip."""
    swap = {"attractor": "repeller", "repeller": "attractor", "saddle": "saddle"}
    pieces = tuple(Piece(p.name, swap[p.kind], p.trivial, p.dim_s, p.dim_u) for p in spec.pieces)
    return SpectralSpec(pieces, tuple((b, a) for a, b in spec.edges), spec.ambient)


# ---------------------------------------------------------------- chains and predicates


def maximal_chains(spec: SpectralSpec) -> list[tuple[str, ...]]:
    """Maximal totally ordered chains, i.e. source-to-sink paths of the transitive reduction."""
    closure = spec.closure
    cover = {a: sorted(b for b in closure[a] if not any(b in closure[c] for c in closure[a]))
             for a in closure}
    has_in = {b for bs in cover.values() for b in bs}
    chains: list[tuple[str, ...]] = []

    def walk(path):
        nxt = cover[path[-1]]
        if not nxt:
            chains.append(tuple(path))
        for b in nxt:
            walk(path + [b])

    for p in spec.pieces:
        if p.name not in has_in:
            walk([p.name])
    return sorted(chains)


def theorem_A_predicate(spec: SpectralSpec, transitive: bool = True) -> tuple[bool, list[tuple[str, str]]]:
    """True iff no trivial repeller reaches a trivial attractor.

    ``transitive=False`` only looks at declared one-step edges.
    """
    rep = [p.name for p in spec.pieces if p.kind == "repeller" and p.trivial]
    att = [p.name for p in spec.pieces if p.kind == "attractor" and p.trivial]
    edges = set(spec.edges)
    witnesses = [(r, a) for r in rep for a in att
                 if (spec.reaches(r, a) if transitive else (r, a) in edges)]
    return not witnesses, witnesses


def theorem_C_predicate(spec: SpectralSpec, transitive: bool = True) -> tuple[bool, list[tuple[str, ...]]]:
    """True iff every maximal chain has constant unstable dimension.

    ``transitive=False`` checks the declared edges one at a time instead.
    """
    dim = {p.name: p.dim_u for p in spec.pieces}
    if transitive:
        witnesses = [c for c in maximal_chains(spec) if len({dim[n] for n in c}) > 1]
    else:
        witnesses = [e for e in spec.edges if dim[e[0]] != dim[e[1]]]
    return not witnesses, witnesses


def select_theta(spec: SpectralSpec) -> tuple[list[str], list[str]]:
    """Pieces carrying the selected periodic orbits, attractors first then repellers.

    Attractors are scanned in declaration order: trivial ones are always
    taken, non-trivial ones only when every repeller above them is
    non-trivial.  Repellers are taken only if some repeller misses every
    selected attractor, in which case all such repellers are taken.
    """
    by = spec.by_name
    theta_a = []
    for a in spec.names("attractor"):
        above = [r for r in spec.names("repeller") if spec.reaches(r, a)]
        if by[a].trivial or all(not by[r].trivial for r in above):
            theta_a.append(a)
    loose = [r for r in spec.names("repeller") if not any(spec.reaches(r, a) for a in theta_a)]
    return theta_a, loose


@dataclass
class ChainVerdict:
    theorem_A: bool
    theorem_C: bool
    witnesses: dict = field(default_factory=dict)

    # the equivalences hold by construction: each pair is read from one predicate
    @property
    def densely_expansive(self) -> bool:
        return self.theorem_A

    @property
    def sensitive(self) -> bool:
        return self.theorem_A

    @property
    def anosov(self) -> bool:
        return self.theorem_C

    @property
    def centralizer_discrete(self) -> bool:
        return self.theorem_C

    def as_tuple(self) -> tuple[bool, bool, bool, bool]:
        return self.densely_expansive, self.sensitive, self.anosov, self.centralizer_discrete

    def to_json(self) -> dict:
        return {
            "densely_expansive": self.densely_expansive,
            "sensitive": self.sensitive,
            "anosov": self.anosov,
            "centralizer_discrete": self.centralizer_discrete,
            "witnesses": self.witnesses,
        }


def verdict(spec: SpectralSpec) -> ChainVerdict:
    a_ok, a_wit = theorem_A_predicate(spec)
    c_ok, c_wit = theorem_C_predicate(spec)
    return ChainVerdict(a_ok, c_ok, {
        "trivial_basin_pairs": [list(w) for w in a_wit],
        "dim_u_jump_chains": [list(w) for w in c_wit],
    })


def analyze(spec: SpectralSpec, verbose: bool = False) -> dict:
    """Everything the CLI reports for a valid spec."""
    theta_a, theta_r = select_theta(spec)
    out = {
        "valid": True,
        "violations": [],
        "chains": [list(c) for c in maximal_chains(spec)],
        "theta": {"attractors": theta_a, "repellers": theta_r},
        "verdict": verdict(spec).to_json(),
    }
    if verbose:
        a1, wa = theorem_A_predicate(spec, transitive=False)
        c1, wc = theorem_C_predicate(spec, transitive=False)
        out["one_step"] = {
            "theorem_A": a1, "trivial_basin_pairs": [list(w) for w in wa],
            "theorem_C": c1, "dim_u_jump_edges": [list(w) for w in wc],
        }
    return out


# ---------------------------------------------------------------- random specs


def random_valid_spec(rng: np.random.Generator, max_pieces: int = 7, max_ambient: int = 4) -> SpectralSpec:
    """A random spec satisfying every validation rule.

    Pieces are layered repellers > saddles > attractors with edges only
    pointing down the layers and unstable dimensions non-increasing.
    """
    ambient = int(rng.integers(1, max_ambient + 1))
    n_rep = int(rng.integers(1, 3))
    n_att = int(rng.integers(1, 3))
    n_sad = int(rng.integers(0, max(1, max_pieces - n_rep - n_att) + 1))
    n_sad = min(n_sad, max_pieces - n_rep - n_att)

    def dims(kind, trivial, hi, lo):
        if trivial and kind == "attractor":
            return 0
        if trivial and kind == "repeller":
            return ambient
        return int(rng.integers(lo, hi + 1))

    rep = []
    for i in range(n_rep):
        t = bool(rng.integers(0, 2))
        rep.append(Piece(f"R{i}", "repeller", t, dims("repeller", t, ambient, 0), 0))
    # saddles and attractors are chosen below their upstream pieces
    pieces = list(rep)
    edges: list[tuple[str, str]] = []
    upper = list(rep)
    for i in range(n_sad):
        parents = [u for u in upper if rng.random() < 0.6] or [upper[int(rng.integers(len(upper)))]]
        cap = min(p.dim_u for p in parents)
        t = bool(rng.integers(0, 2))
        pieces.append(Piece(f"S{i}", "saddle", t, dims("saddle", t, cap, 0), 0))
        edges += [(p.name, f"S{i}") for p in parents]
        upper.append(pieces[-1])
    for i in range(n_att):
        parents = [u for u in upper if rng.random() < 0.5]
        t = bool(rng.integers(0, 2))
        cap = min((p.dim_u for p in parents), default=ambient)
        pieces.append(Piece(f"A{i}", "attractor", t, dims("attractor", t, cap, 0), 0))
        edges += [(p.name, f"A{i}") for p in parents]
    # saddles need a way down: attach each dangling saddle to some attractor it dominates
    atts = [p for p in pieces if p.kind == "attractor"]
    for s in [p for p in pieces if p.kind == "saddle"]:
        if not any(a == s.name for a, _ in edges):
            ok = [a for a in atts if a.dim_u <= s.dim_u]
            if not ok:
                z = Piece(f"A{len(atts)}", "attractor", True, 0, 0)
                pieces.append(z)
                atts.append(z)
                ok = [z]
            edges.append((s.name, ok[int(rng.integers(len(ok)))].name))
    pieces = [Piece(p.name, p.kind, p.trivial, p.dim_u, ambient - p.dim_u) for p in pieces]
    return SpectralSpec(tuple(pieces), tuple(edges), ambient)
