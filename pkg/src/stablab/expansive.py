"""Separation probes: expansiveness, sensitivity and shrinking-ball certificates.

All probes are falsification tools on finite samples with a declared
threshold eps and horizon N; a pair counts as separated when
d(f^n x, f^n y) > eps for some |n| <= N.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .catalog import DerivedFromAnosov, Diffeo, LinearAnosov, NorthSouthCircle
from .geometry import RandomUniform, UniformGrid, as_points, distances, sample, wrap

MAX_PAIRS = 100_000
CHUNK = 250_000


def time_order(N: int) -> list[int]:
    """0, 1, -1, 2, -2, ..., N, -N (smallest |n| first, positive before negative)."""
    out = [0]
    for k in range(1, N + 1):
        out += [k, -k]
    return out


def orbit_stack(f: Diffeo, X, N: int) -> np.ndarray:
    """Array of shape (2N+1, m, d) holding f^n(X) for n = -N..N (index n + N)."""
    X = as_points(X, f.space)
    out = np.empty((2 * N + 1,) + X.shape)
    out[N] = X
    cur = X
    for k in range(1, N + 1):
        cur = f.forward(cur)
        out[N + k] = cur
    cur = X
    for k in range(1, N + 1):
        cur = f.backward(cur)
        out[N - k] = cur
    return out


# ---------------------------------------------------------------- single pairs


@dataclass
class SeparationReport:
    x: np.ndarray
    y: np.ndarray
    n: int | None
    separation: float
    horizon: int
    eps: float

    def to_json(self) -> dict:
        return {
            "x": self.x.tolist(),
            "y": self.y.tolist(),
            "n": self.n,
            "separation": self.separation,
            "horizon": self.horizon,
            "eps": self.eps,
        }


def separation_time(f: Diffeo, x, y, eps: float, N: int) -> SeparationReport:
    """Smallest |n| <= N with d(f^n x, f^n y) > eps (ties: positive n first)."""
    xa, ya = as_points(x, f.space), as_points(y, f.space)
    if float(distances(xa, ya)[0]) <= 1e-14:
        raise ValueError("degenerate pair")
    orb = orbit_stack(f, np.vstack([xa, ya]), N)
    d = distances(orb[:, 0], orb[:, 1])
    for n in time_order(N):
        if d[n + N] > eps:
            return SeparationReport(xa[0], ya[0], n, float(d[n + N]), N, eps)
    return SeparationReport(xa[0], ya[0], None, float(np.max(d)), N, eps)


def _first_separation(orb_a: np.ndarray, orb_b: np.ndarray, eps: float, N: int):
    """Per pair: first time in :func:`time_order` with separation > eps, and the max separation."""
    m = orb_a.shape[1]
    first = np.full(m, N + 1, dtype=np.int64)
    found = np.zeros(m, dtype=bool)
    best = np.zeros(m)
    for n in time_order(N):
        d = distances(orb_a[n + N], orb_b[n + N])
        best = np.maximum(best, d)
        hit = ~found & (d > eps)
        first[hit] = n
        found |= hit
    return found, first, best


# ---------------------------------------------------------------- dense expansiveness


@dataclass
class ExpansivenessReport:
    n_points: int
    n_pairs_total: int
    n_pairs_tested: int
    n_separated: int
    eps: float
    horizon: int
    max_abs_time: int
    failing: list[tuple[int, int, float]] = field(default_factory=list)
    points: np.ndarray | None = None

    @property
    def fraction(self) -> float:
        return self.n_separated / self.n_pairs_tested if self.n_pairs_tested else 1.0

    def to_json(self) -> dict:
        return {
            "n_points": self.n_points,
            "n_pairs_total": self.n_pairs_total,
            "n_pairs_tested": self.n_pairs_tested,
            "n_separated": self.n_separated,
            "fraction": self.fraction,
            "eps": self.eps,
            "horizon": self.horizon,
            "max_abs_time": self.max_abs_time,
            "n_failing": len(self.failing),
        }

    def failing_rows(self) -> list[list[float]]:
        """Rows x..., y..., max_separation for the CSV export."""
        rows = []
        for i, j, sep in self.failing:
            rows.append(list(self.points[i]) + list(self.points[j]) + [sep])
        return rows


def _pair_indices(m: int, max_pairs: int | None, seed: int):
    total = m * (m - 1) // 2
    if max_pairs is None or total <= max_pairs:
        i, j = np.triu_indices(m, k=1)
        return i, j, total
    rng = np.random.default_rng(seed)
    lin = np.sort(rng.choice(total, size=max_pairs, replace=False))
    # invert the row-major enumeration of the upper triangle
    i = (m - 2 - np.floor(np.sqrt(-8 * lin + 4 * m * (m - 1) - 7) / 2 - 0.5)).astype(np.int64)
    j = (lin + i + 1 - m * (m - 1) // 2 + (m - i) * ((m - i) - 1) // 2).astype(np.int64)
    return i, j, total


def dense_expansiveness_probe(f: Diffeo, D, eps: float, N: int, max_pairs: int | None = MAX_PAIRS,
                              seed: int = 0, keep_failing: int = 10_000) -> ExpansivenessReport:
    """Fraction of pairs of D separated beyond eps within |n| <= N.

    Pairs are subsampled deterministically (seeded) when there are more than
    ``max_pairs``; ``max_pairs=None`` tests every pair.
    """
    X = as_points(D, f.space)
    m = len(X)
    orb = orbit_stack(f, X, N)
    i_all, j_all, total = _pair_indices(m, max_pairs, seed)
    n_sep = 0
    max_t = 0
    failing: list[tuple[int, int, float]] = []
    for start in range(0, len(i_all), CHUNK):
        i, j = i_all[start:start + CHUNK], j_all[start:start + CHUNK]
        if np.any(distances(X[i], X[j]) <= 1e-14):
            raise ValueError("points of D must be pairwise distinct")
        found, first, best = _first_separation(orb[:, i], orb[:, j], eps, N)
        n_sep += int(np.sum(found))
        if np.any(found):
            max_t = max(max_t, int(np.max(np.abs(first[found]))))
        for k in np.flatnonzero(~found):
            if len(failing) < keep_failing:
                failing.append((int(i[k]), int(j[k]), float(best[k])))
    return ExpansivenessReport(m, total, len(i_all), n_sep, eps, N, max_t, failing, X)


# ---------------------------------------------------------------- sensitivity


def ring_directions(d: int) -> np.ndarray:
    """Unit vectors pointing to the nonzero vertices of the cube {-1,0,1}^d."""
    v = np.array([p for p in itertools.product((-1, 0, 1), repeat=d) if any(p)], dtype=float)
    return v / np.linalg.norm(v, axis=1, keepdims=True)


@dataclass
class SensitivityReport:
    n_points: int
    n_witnessed: int
    delta: float
    eps: float
    horizon: int
    unwitnessed: np.ndarray

    @property
    def fraction(self) -> float:
        return self.n_witnessed / self.n_points if self.n_points else 1.0

    def to_json(self) -> dict:
        return {
            "n_points": self.n_points,
            "n_witnessed": self.n_witnessed,
            "fraction": self.fraction,
            "delta": self.delta,
            "eps": self.eps,
            "horizon": self.horizon,
            "n_unwitnessed": int(len(self.unwitnessed)),
        }


def sensitivity_probe(f: Diffeo, X, delta: float, eps: float, N: int) -> SensitivityReport:
    """For each x, look for a companion at distance delta separating beyond eps within |n| <= N."""
    if delta <= 0:
        raise ValueError("perturbation radius must be positive")
    X = sample(f.space, X) if isinstance(X, (UniformGrid, RandomUniform)) else as_points(X, f.space)
    m, d = X.shape
    dirs = ring_directions(d)
    k = len(dirs)
    comp = wrap(X[:, None, :] + delta * dirs[None, :, :]).reshape(-1, d)
    orb_x = orbit_stack(f, X, N)
    orb_c = orbit_stack(f, comp, N)
    base = np.repeat(orb_x, k, axis=1)
    found, _, _ = _first_separation(base, orb_c, eps, N)
    witnessed = found.reshape(m, k).any(axis=1)
    return SensitivityReport(m, int(witnessed.sum()), delta, eps, N, X[~witnessed])


# ---------------------------------------------------------------- shrinking ball


@dataclass
class ShrinkingBallCertificate:
    arc: tuple[float, float]
    max_diameter: float
    argmax_n: int
    horizon: int
    forward_steps: int
    backward_steps: int
    eps: float
    tail: str = "MonotoneTail"

    def to_json(self) -> dict:
        return {
            "arc": list(self.arc),
            "max_diameter": self.max_diameter,
            "argmax_n": self.argmax_n,
            "horizon": self.horizon,
            "forward_steps": self.forward_steps,
            "backward_steps": self.backward_steps,
            "eps": self.eps,
            "tail": self.tail,
        }


def _arc_diameters(f: NorthSouthCircle, a: float, b: float, n_fwd: int, n_bwd: int):
    ends = np.array([[a], [b]])
    out = {0: b - a}
    cur = ends
    for n in range(1, n_fwd + 1):
        cur = f.forward(cur)
        out[n] = float(cur[1, 0] - cur[0, 0])
    cur = ends
    for n in range(1, n_bwd + 1):
        cur = f.backward(cur)
        out[-n] = float(cur[1, 0] - cur[0, 0])
    return out


def shrinking_ball_certificate(f: NorthSouthCircle, eps: float, center: float = 0.2,
                               cap: int = 10_000) -> ShrinkingBallCertificate:
    """An arc B with sup over all n of diam f^n(B) < eps, certified by monotone tails.

    Forward, once both endpoints lie in [1/4, 1/2) they stay there and f' <= 1
    on that collar, so diameters cannot grow; backward the same holds on
    (0, 1/4] where (f^-1)' <= 1.  The finite maximum is therefore the sup.
    """
    if not isinstance(f, NorthSouthCircle):
        raise TypeError("shrinking-ball certificates are built for the north-south map")
    if eps >= 0.5:
        raise ValueError("no certificate needed at this scale")
    if eps <= 0:
        raise ValueError("eps must be positive")
    w = min(eps / 4, center / 2, (0.5 - center) / 2)
    while True:
        a, b = center - w, center + w
        ends = np.array([[a], [b]])
        n_fwd = 0
        cur = ends
        while not np.all((cur >= 0.25) & (cur < 0.5)):
            cur = f.forward(cur)
            n_fwd += 1
            if n_fwd > cap:
                raise RuntimeError("forward tail not reached")
        n_bwd = 0
        cur = ends
        while not np.all((cur > 0.0) & (cur <= 0.25)):
            cur = f.backward(cur)
            n_bwd += 1
            if n_bwd > cap:
                raise RuntimeError("backward tail not reached")
        diams = _arc_diameters(f, a, b, n_fwd, n_bwd)
        n_star = max(diams, key=lambda n: (diams[n], -abs(n)))
        if diams[n_star] < eps:
            return ShrinkingBallCertificate((a, b), diams[n_star], int(n_star), max(n_fwd, n_bwd),
                                            n_fwd, n_bwd, eps)
        w /= 2


def recheck_certificate(f: NorthSouthCircle, cert: ShrinkingBallCertificate, factor: int = 2) -> dict[int, float]:
    """Diameters of f^n(B) for |n| <= factor * horizon, recomputed from scratch."""
    H = factor * cert.horizon
    return _arc_diameters(f, cert.arc[0], cert.arc[1], H, H)


# ---------------------------------------------------------------- heteroclinic set


def lattice_offsets():
    """Integer offsets (m, n) by increasing |m| + |n|, then lexicographically."""
    r = 0
    while True:
        ring = sorted((m, n) for m in range(-r, r + 1) for n in (r - abs(m), -(r - abs(m))) if abs(m) + abs(n) == r)
        for off in dict.fromkeys(ring):
            yield off
        r += 1


def homoclinic_point(frame, offset) -> np.ndarray:
    """Intersection s e_s = u e_u + offset of the stable and unstable lines through 0."""
    M = np.column_stack([frame.e_s, -frame.e_u])
    s, _ = np.linalg.solve(M, np.asarray(offset, dtype=float))
    return wrap(s * frame.e_s)


def heteroclinic_separated_set(f: Diffeo, count: int) -> np.ndarray:
    """``count`` intersection points of the stable and unstable lines of the fixed point.

    For the DA map the lines through its repelling fixed point are used and
    points inside the bump support are skipped.
    """
    if count < 1:
        raise ValueError("count must be positive")
    if isinstance(f, LinearAnosov):
        frame, center, radius = f.frame, np.zeros(2), 0.0
    elif isinstance(f, DerivedFromAnosov):
        frame, center, radius = f.frame, f.center, f.radius
    else:
        raise TypeError("heteroclinic sets are built for linear Anosov and DA maps")
    out = []
    for off in lattice_offsets():
        x = wrap(homoclinic_point(frame, off) + center)
        if radius and float(distances(x[None], center[None])[0]) < radius:
            continue
        out.append(x)
        if len(out) == count:
            return np.array(out)
    raise AssertionError("unreachable")


def cat_separation_bound(eps: float, resolution: int, lam_u: float) -> int:
    """Time bound ceil(log(eps * r)/log lam_u) + 2 for grid pairs at distance >= 1/r."""
    return math.ceil(math.log(eps * resolution) / math.log(lam_u)) + 2
