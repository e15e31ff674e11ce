"""Explicit elements of the C0-centralizer and discreteness probes.

Three constructions:

* fundamental-domain extension for the north-south map,
  h(x) = f^-n(h0(f^n(x))) with n the transit time of x into a fundamental
  domain I;
* the bump-push family h_t on the DA map, which shifts points along straight
  stable fibres inside a wandering box U and is spread along orbits;
* the product lift c x id on S^1 x T^2.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .catalog import DerivedFromAnosov, Diffeo, NorthSouthCircle
from .conjugacy import as_homeo, d0
from .geometry import PhaseSpace, RandomUniform, Sampler, UniformGrid, as_points, distances, sample, wrap, wrap_diff
from .homeo import Affine, Homeo, Identity, ProductOf

DEFAULT_TAU = 1e-6
N_MAX = 200
# backward capture times on the DA map have a geometric tail (about 2% per
# step), so the DA family needs a longer horizon than the circle constructions
DA_N_MAX = 600
BOUNDARY_TOL = 1e-12


def commutation_residual(f, h, sampler: Sampler = RandomUniform(10_000, seed=11)) -> float:
    """sup over samples of d(h(f(x)), f(h(x)))."""
    f, h = as_homeo(f), as_homeo(h)
    if f.space is not h.space:
        raise ValueError("space mismatch")
    X = sample(f.space, sampler)
    return float(np.max(distances(h.forward(f.forward(X)), f.forward(h.forward(X)))))


# ---------------------------------------------------------------- piecewise linear h0


@dataclass(frozen=True)
class PiecewiseLinearHomeo:
    """Increasing piecewise-linear homeomorphism of [xs[0], xs[-1]] fixing both ends."""

    xs: tuple[float, ...]
    ys: tuple[float, ...]

    def __post_init__(self):
        xs, ys = np.asarray(self.xs, float), np.asarray(self.ys, float)
        if len(xs) < 2 or len(xs) != len(ys):
            raise ValueError("need at least two matching nodes")
        if np.any(np.diff(xs) <= 0) or np.any(np.diff(ys) <= 0):
            raise ValueError("node values must be strictly increasing")
        if xs[0] != ys[0] or xs[-1] != ys[-1]:
            raise ValueError("h0 must fix both endpoints exactly")

    @classmethod
    def identity(cls, lo: float, hi: float) -> "PiecewiseLinearHomeo":
        return cls((lo, hi), (lo, hi))

    @classmethod
    def midpoint_bump(cls, lo: float, hi: float, shift: float) -> "PiecewiseLinearHomeo":
        """Single interior node moving the midpoint by ``shift``."""
        if shift == 0.0:
            return cls.identity(lo, hi)
        mid = 0.5 * (lo + hi)
        return cls((lo, mid, hi), (lo, mid + shift, hi))

    @classmethod
    def trapezoid_push(cls, lo: float, hi: float, center: float, ell0: float, amount: float):
        """x + amount * beta(x - center) with beta = 1 on [-ell0/4, ell0/4], 0 off [-ell0/2, ell0/2]."""
        if amount == 0.0:
            return cls.identity(lo, hi)
        if not 0 <= amount < ell0 / 4:
            raise ValueError("push must satisfy 0 <= t zeta < ell0/4")
        a, b = center - ell0 / 2, center - ell0 / 4
        xs = [lo, a, b, center + ell0 / 4, center + ell0 / 2, hi]
        ys = [lo, a, b + amount, center + ell0 / 4 + amount, center + ell0 / 2, hi]
        if not (lo <= a and center + ell0 / 2 <= hi):
            raise ValueError("bump support must lie inside the domain")
        keep = [0] + [i for i in range(1, 6) if xs[i] > xs[i - 1]]
        return cls(tuple(xs[i] for i in keep), tuple(ys[i] for i in keep))

    def __call__(self, x):
        return np.interp(x, self.xs, self.ys)

    def inverse(self, y):
        return np.interp(y, self.ys, self.xs)

    def to_json(self) -> dict:
        return {"xs": list(self.xs), "ys": list(self.ys)}


# ---------------------------------------------------------------- fundamental domains


@dataclass(frozen=True)
class FundamentalDomain:
    """Half-open arc from ``start`` (included) to ``end = f(start)`` (excluded)."""

    start: float
    end: float

    @property
    def lo(self) -> float:
        return min(self.start, self.end)

    @property
    def hi(self) -> float:
        return max(self.start, self.end)

    @property
    def upward(self) -> bool:
        return self.end > self.start

    def contains(self, y) -> np.ndarray:
        y = np.asarray(y, dtype=float)
        # both endpoints shifted by the same tolerance keeps exactly one of x, f(x)
        if self.upward:
            return (y >= self.start - BOUNDARY_TOL) & (y < self.end - BOUNDARY_TOL)
        return (y <= self.start + BOUNDARY_TOL) & (y > self.end + BOUNDARY_TOL)


NotFound = None


def _fixed_points(f: Diffeo) -> tuple[float, ...]:
    return getattr(f, "fixed_points", (0.0, 0.5))


def _near_fixed(f: Diffeo, x: np.ndarray) -> np.ndarray:
    fp = np.asarray(_fixed_points(f))
    d = np.abs(x[:, None] - fp[None, :]) % 1.0
    return np.min(np.minimum(d, 1 - d), axis=1) < BOUNDARY_TOL


def _transit(f: Diffeo, dom: FundamentalDomain, x: np.ndarray, cap: int):
    """Vectorised transit times on the wandering arc of ``dom``.

    Returns (n, y) with y = f^n(x) in dom; n is set to cap+1 where not found.
    Orbits on an arc are monotone, so the search direction is known in advance.
    """
    x = np.asarray(x, dtype=float).reshape(-1)
    n = np.zeros(len(x), dtype=np.int64)
    y = x.copy()
    found = dom.contains(y)
    if dom.upward:
        go_forward = y < dom.start
    else:
        go_forward = y > dom.start
    for step in range(1, cap + 1):
        todo = ~found
        if not np.any(todo):
            break
        fw = todo & go_forward
        bw = todo & ~go_forward
        if np.any(fw):
            y[fw] = f.forward(y[fw][:, None])[:, 0]
            n[fw] = step
        if np.any(bw):
            y[bw] = f.backward(y[bw][:, None])[:, 0]
            n[bw] = -step
        found = found | (todo & dom.contains(y))
    n[~found] = cap + 1
    return n, y


def transit_time(f: Diffeo, I: FundamentalDomain, x, cap: int = N_MAX):
    """The n with f^n(x) in I and |n| <= cap, or ``NotFound`` (None)."""
    xv = float(as_points(x, f.space)[0, 0])
    if _near_fixed(f, np.array([xv]))[0]:
        raise ValueError("fixed point has no transit time")
    arc = _arc_of(f, I)
    if not arc(np.array([xv]))[0]:
        return NotFound
    n, _ = _transit(f, I, np.array([xv]), cap)
    return NotFound if abs(int(n[0])) > cap else int(n[0])


def _arc_of(f: Diffeo, dom: FundamentalDomain):
    """Membership test for the open wandering arc (between consecutive fixed points) containing dom."""
    fp = sorted(_fixed_points(f)) + [1.0]
    for a, b in zip(fp[:-1], fp[1:]):
        if a < dom.lo and dom.hi < b:
            return lambda x, a=a, b=b: (x > a + BOUNDARY_TOL) & (x < b - BOUNDARY_TOL)
    raise ValueError("fundamental domain does not lie on a single wandering arc")


@dataclass(frozen=True)
class FundamentalDomainPiece:
    map: Diffeo
    domains: tuple[FundamentalDomain, ...]
    h0: tuple[PiecewiseLinearHomeo, ...]

    def __post_init__(self):
        if len(self.domains) != len(self.h0):
            raise ValueError("one h0 per fundamental domain")
        for dom, h0 in zip(self.domains, self.h0):
            image = float(self.map.forward(np.array([[dom.start]]))[0, 0])
            if abs(image - dom.end) > 1e-12:
                raise ValueError("not a fundamental domain: f(start) != end")
            if h0.xs[0] != dom.lo or h0.xs[-1] != dom.hi:
                raise ValueError("h0 must act on the closed domain")
            _arc_of(self.map, dom)


def northsouth_domains(f: NorthSouthCircle, x0: float = 0.25) -> tuple[FundamentalDomain, FundamentalDomain]:
    """I = [x0, f(x0)) on (0, 1/2) and its mirror (1 - f(x0), 1 - x0] on (1/2, 1)."""
    fx0 = float(f.forward(np.array([[x0]]))[0, 0])
    m0 = 1.0 - x0
    fm0 = float(f.forward(np.array([[m0]]))[0, 0])
    return FundamentalDomain(x0, fx0), FundamentalDomain(m0, fm0)


def northsouth_piece(f: NorthSouthCircle, shift: float = 0.01, x0: float = 0.25) -> FundamentalDomainPiece:
    """Midpoint bump of size ``shift`` on I and the mirrored bump on the other arc."""
    d1, d2 = northsouth_domains(f, x0)
    h1 = PiecewiseLinearHomeo.midpoint_bump(d1.lo, d1.hi, shift)
    h2 = PiecewiseLinearHomeo.midpoint_bump(d2.lo, d2.hi, -shift)
    return FundamentalDomainPiece(f, (d1, d2), (h1, h2))


class FundamentalDomainHomeo(Homeo):
    """h(x) = f^-n(h0(f^n(x))) on each wandering arc, identity at the fixed points."""

    label = "FundamentalDomainPiece"

    def __init__(self, piece: FundamentalDomainPiece, cap: int = N_MAX):
        self.piece = piece
        self.space = PhaseSpace.CIRCLE
        self.cap = cap
        self.last_unresolved = 0

    def _apply(self, X, inverse: bool):
        X = np.asarray(X, dtype=float)
        out = X.copy()
        x = X[:, 0]
        f = self.piece.map
        unresolved = 0
        for dom, h0 in zip(self.piece.domains, self.piece.h0):
            on_arc = _arc_of(f, dom)(x) & ~_near_fixed(f, x)
            idx = np.flatnonzero(on_arc)
            if idx.size == 0:
                continue
            n, y = _transit(f, dom, x[idx], self.cap)
            ok = np.abs(n) <= self.cap
            unresolved += int(np.sum(~ok))
            idx, n, y = idx[ok], n[ok], y[ok]
            z = h0.inverse(y) if inverse else h0(y)
            moved = z != y
            idx, n, z = idx[moved], n[moved], z[moved]
            # pull back along the orbit: apply f^-n
            z = z.copy()
            for step in range(1, int(np.max(np.abs(n), initial=0)) + 1):
                back = n >= step
                fwd = -n >= step
                if np.any(back):
                    z[back] = f.backward(z[back][:, None])[:, 0]
                if np.any(fwd):
                    z[fwd] = f.forward(z[fwd][:, None])[:, 0]
            out[idx, 0] = z
        self.last_unresolved = unresolved
        return out

    def forward(self, X):
        return self._apply(X, inverse=False)

    def backward(self, X):
        return self._apply(X, inverse=True)

    def describe(self):
        return {
            "node": self.label,
            "map": self.piece.map.name,
            "domains": [[d.start, d.end] for d in self.piece.domains],
            "h0": [h.to_json() for h in self.piece.h0],
        }


def ms_centralizer(piece: FundamentalDomainPiece) -> FundamentalDomainHomeo:
    return FundamentalDomainHomeo(piece)


def ms_family(f: NorthSouthCircle, ts, scale: float = 0.01) -> list[FundamentalDomainHomeo]:
    return [ms_centralizer(northsouth_piece(f, t * scale)) for t in ts]


# ---------------------------------------------------------------- bump push


@dataclass(frozen=True)
class Box:
    """Product of intervals in local (s, u) coordinates: |s| < s_half, u_lo < u < u_hi."""

    s_half: float
    u_lo: float
    u_hi: float

    def contains(self, s, u) -> np.ndarray:
        return (np.abs(s) < self.s_half) & (u > self.u_lo) & (u < self.u_hi)

    def closure_inside(self, other: "Box") -> bool:
        return self.s_half < other.s_half and other.u_lo < self.u_lo and self.u_hi < other.u_hi


@dataclass(frozen=True)
class BumpPushSpec:
    """Data of the bump-push family on a wandering box.

    For the DA map the local coordinates are the stable/unstable coordinates
    around the repelling fixed point p.  ``core`` = (a, b) is the repelling box
    |s| < a, |u| < b; U = {|s| < a, b < u < lam_u b} is the first layer outside
    it, so every orbit meets U at most once.  Fibres are the straight stable
    segments {u = const} and the fibre centre is the unstable line of p.
    """

    map: Diffeo
    zeta: float = 0.01
    t: float = 1.0
    ell0: float = 0.05
    core: tuple[float, float] = (0.03, 0.03)
    N_max: int | None = None

    def __post_init__(self):
        if self.N_max is None:
            default = DA_N_MAX if isinstance(self.map, DerivedFromAnosov) else N_MAX
            object.__setattr__(self, "N_max", default)
        if self.zeta <= 0:
            raise ValueError("push size must be positive")
        if not 0.0 <= self.t <= 1.0:
            raise ValueError("t must lie in [0, 1]")
        if self.t * self.zeta > self.ell0 / 4:
            raise ValueError("push exceeds the fibre chart: t zeta > ell0/4")
        if isinstance(self.map, DerivedFromAnosov):
            if not self.V.closure_inside(self.W) or not self.W.closure_inside(self.U):
                raise ValueError("boxes must nest: closure(V) in W, closure(W) in U")
            a, b = self.core
            f = self.map
            uu = np.linspace(-b, b, 201)
            # backward invariance of the core: F_u(a) > a on the whole side
            if np.any(f.stable_map(np.full_like(uu, a), uu / f.frame.lam_u) <= a):
                raise ValueError("core box is not repelling")
        elif isinstance(self.map, NorthSouthCircle):
            d1, _ = northsouth_domains(self.map)
            if self.ell0 > d1.hi - d1.lo:
                raise ValueError("bump support must lie inside the fundamental domain")
        else:
            raise TypeError("bump push is defined for the DA and north-south maps")

    def with_t(self, t: float) -> "BumpPushSpec":
        return BumpPushSpec(self.map, self.zeta, t, self.ell0, self.core, self.N_max)

    @property
    def U(self) -> Box:
        a, b = self.core
        return Box(a, b, self.map.frame.lam_u * b)

    @property
    def W(self) -> Box:
        U = self.U
        span = U.u_hi - U.u_lo
        return Box(self.ell0 / 2, U.u_lo + 0.1 * span, U.u_hi - 0.1 * span)

    @property
    def V(self) -> Box:
        U = self.U
        span = U.u_hi - U.u_lo
        return Box(self.ell0 / 4, U.u_lo + 0.3 * span, U.u_hi - 0.3 * span)

    def in_core(self, s, u) -> np.ndarray:
        a, b = self.core
        return (np.abs(s) < a) & (np.abs(u) < b)

    def disjointness_check(self, count: int = 400, seed: int = 0) -> bool:
        """Sampled check that f^n(U), 0 < |n| <= N_max, never meets U."""
        f = self.map
        rng = np.random.default_rng(seed)
        U = self.U
        s = rng.uniform(-U.s_half, U.s_half, count)
        u = rng.uniform(U.u_lo, U.u_hi, count)
        Z = wrap(f.center + f.frame.vector(s, u))
        fw, bw = Z.copy(), Z.copy()
        for _ in range(self.N_max):
            fw, bw = f.forward(fw), f.backward(bw)
            if np.any(U.contains(*f.local(fw))) or np.any(U.contains(*f.local(bw))):
                return False
        return True


def _trapezoid(x, ell0):
    return np.clip((ell0 / 2 - np.abs(x)) / (ell0 / 4), 0.0, 1.0)


def _fibre_push(s, c, ell0):
    return s + c * _trapezoid(s, ell0)


def _fibre_unpush(s, c, ell0):
    """Exact inverse of the piecewise-linear fibre map s -> s + c beta(s), 0 <= c < ell0/4."""
    q, h = ell0 / 4, ell0 / 2
    out = np.array(s, dtype=float, copy=True)
    left = (s > -h) & (s < -q + c)
    mid = (s >= -q + c) & (s <= q + c)
    right = (s > q + c) & (s < h)
    out[left] = -h + (s[left] + h) * q / (q + c[left])
    out[mid] = s[mid] - c[mid]
    out[right] = q + (s[right] - q - c[right]) * q / (q - c[right])
    return out


_LOCATE_CACHE: dict = {}


class BumpPush(Homeo):
    """h_t(z) = f^-n(h_{0,t}(f^n(z))) where f^n(z) in U, identity elsewhere (DA map)."""

    label = "BumpPush"

    def __init__(self, spec: BumpPushSpec):
        if not isinstance(spec.map, DerivedFromAnosov):
            raise TypeError("BumpPush needs the DA map")
        self.spec = spec
        self.space = PhaseSpace.TORUS2
        self.last_unresolved = 0

    def _transverse(self, u):
        W, V = self.spec.W, self.spec.V
        up = np.clip((u - W.u_lo) / (V.u_lo - W.u_lo), 0.0, 1.0)
        down = np.clip((W.u_hi - u) / (W.u_hi - V.u_hi), 0.0, 1.0)
        return np.minimum(up, down)

    def push_amount(self, s, u):
        """Fibre displacement t zeta beta(s) gamma(u) in the chart."""
        sp = self.spec
        return sp.t * sp.zeta * _trapezoid(s, sp.ell0) * self._transverse(u)

    def locate(self, X):
        """Cached :meth:`_locate`; the visit data do not depend on t or zeta."""
        X = np.asarray(X, dtype=float)
        sp = self.spec
        key = (id(sp.map), sp.core, sp.N_max, X.shape, hash(X.tobytes()))
        hit = _LOCATE_CACHE.get(key)
        if hit is not None and np.array_equal(hit[0], X):
            return hit[1]
        result = self._locate(X)
        if len(_LOCATE_CACHE) >= 16:
            _LOCATE_CACHE.pop(next(iter(_LOCATE_CACHE)))
        _LOCATE_CACHE[key] = (X.copy(), result)
        return result

    def _locate(self, X):
        """Time n and point f^n(x) of the unique visit of x's orbit to U.

        Returns (n, Y, status, forward_hist, backward_hist).  status is 1 for a
        visit, 0 for an orbit that provably misses U and -1 for unresolved
        within N_max.  The histories hold, per step k, the indices still being
        iterated and their k-th iterates; they are the orbit segments along
        which displacements are transported.
        """
        sp, f = self.spec, self.spec.map
        m = len(X)
        n = np.zeros(m, dtype=np.int64)
        Y = X.copy()
        status = np.full(m, -1, dtype=np.int64)
        s, u = f.local(X)
        core = sp.in_core(s, u)
        at_p = np.hypot(s, u) < 1e-12
        status[at_p] = 0
        # core points: the visit (if any) is the first exit from the core
        fw_hist = [None]
        idx = np.flatnonzero(core & ~at_p)
        cur = X[idx]
        for step in range(1, sp.N_max + 1):
            if idx.size == 0:
                break
            cur = f.forward(cur)
            fw_hist.append((idx, cur))
            cs, cu = f.local(cur)
            left = ~sp.in_core(cs, cu)
            done = idx[left]
            n[done] = step
            Y[done] = cur[left]
            status[done] = 1
            idx, cur = idx[~left], cur[~left]
        # other points: the visit is the iterate just before the orbit enters the core
        bw_hist = [None]
        idx = np.flatnonzero(~core)
        prev = X[idx]
        for step in range(1, sp.N_max + 1):
            if idx.size == 0:
                break
            cur = f.backward(prev)
            bw_hist.append((idx, cur))
            cs, cu = f.local(cur)
            entered = sp.in_core(cs, cu)
            done = idx[entered]
            n[done] = -(step - 1)
            Y[done] = prev[entered]
            status[done] = 1
            idx, prev = idx[~entered], cur[~entered]
        # candidates outside U mean the orbit never visits U
        ys, yu = f.local(Y)
        miss = (status == 1) & ~sp.U.contains(ys, yu)
        status[miss] = 0
        return n, Y, status, fw_hist, bw_hist

    @staticmethod
    def _gather(hist, step, idx):
        hidx, pts = hist[step]
        return pts[np.searchsorted(hidx, idx)]

    def _apply(self, X, inverse: bool):
        sp, f = self.spec, self.spec.map
        X = np.asarray(X, dtype=float)
        out = X.copy()
        if sp.t * sp.zeta == 0.0:
            self.last_unresolved = 0
            return out
        n, Y, status, fw_hist, bw_hist = self.locate(X)
        self.last_unresolved = int(np.sum(status < 0))
        ys, yu = f.local(Y)
        c = sp.t * sp.zeta * self._transverse(yu)
        amount = c * _trapezoid(ys, sp.ell0)
        active = np.flatnonzero((status == 1) & (amount > 0))
        if active.size == 0:
            return out
        s_a, c_a = ys[active], c[active]
        s_new = _fibre_unpush(s_a, c_a, sp.ell0) if inverse else _fibre_push(s_a, c_a, sp.ell0)
        keep = s_new != s_a
        active, s_new, s_a = active[keep], s_new[keep], s_a[keep]
        sigma = s_new - s_a
        na = n[active]
        e_s, dual_s = f.frame.e_s, f.frame.dual[0]
        # carry the fibre displacement from the visit back to time 0 along the
        # stored orbit of x.  Stable lines map to stable lines, so the
        # displacement is a scalar multiple of e_s; projecting every step
        # discards round-off in the unstable direction, which would grow.
        for step in range(int(np.max(np.abs(na), initial=0)), 0, -1):
            sel = na >= step
            if np.any(sel):
                P = self._gather(fw_hist, step, active[sel])
                Q = wrap(P + np.outer(sigma[sel], e_s))
                sigma[sel] = wrap_diff(f.backward(Q) - f.backward(P)) @ dual_s
            sel = -na >= step
            if np.any(sel):
                P = self._gather(bw_hist, step, active[sel])
                Q = wrap(P + np.outer(sigma[sel], e_s))
                sigma[sel] = wrap_diff(f.forward(Q) - f.forward(P)) @ dual_s
        D = np.outer(sigma, e_s)
        out[active] = wrap(X[active] + D)
        return out

    def forward(self, X):
        return self._apply(X, inverse=False)

    def backward(self, X):
        return self._apply(X, inverse=True)

    def unresolved_fraction(self, X) -> float:
        status = self.locate(np.asarray(X, dtype=float))[2]
        return float(np.mean(status < 0))

    def describe(self):
        sp = self.spec
        return {
            "node": self.label,
            "map": sp.map.name,
            "t": sp.t,
            "zeta": sp.zeta,
            "ell0": sp.ell0,
            "core": list(sp.core),
            "N_max": sp.N_max,
        }


def bump_push_family(spec: BumpPushSpec) -> Homeo:
    """The member h_t of the bump-push family described by ``spec``.

    On the north-south map the chart is the arc-length coordinate of the
    fundamental domain I, so h_t is a fundamental-domain extension whose h0
    is the trapezoid push.
    """
    if isinstance(spec.map, NorthSouthCircle):
        d1, d2 = northsouth_domains(spec.map)
        amount = spec.t * spec.zeta
        h1 = PiecewiseLinearHomeo.trapezoid_push(d1.lo, d1.hi, 0.5 * (d1.lo + d1.hi), spec.ell0, amount)
        h2 = PiecewiseLinearHomeo.trapezoid_push(d2.lo, d2.hi, 0.5 * (d2.lo + d2.hi), spec.ell0, amount)
        return FundamentalDomainHomeo(FundamentalDomainPiece(spec.map, (d1, d2), (h1, h2)), cap=spec.N_max)
    return BumpPush(spec)


def bump_family(f: Diffeo, ts, zeta: float = 0.01, **kw) -> list[Homeo]:
    base = BumpPushSpec(f, zeta=zeta, **kw)
    return [bump_push_family(base.with_t(float(t))) for t in ts]


# ---------------------------------------------------------------- product lift


def product_lift(c: Homeo) -> ProductOf:
    """c x id on S^1 x T^2."""
    c = as_homeo(c)
    if c.space is not PhaseSpace.CIRCLE:
        raise ValueError("space mismatch")
    return ProductOf(c, Identity(PhaseSpace.TORUS2))


# ---------------------------------------------------------------- discreteness probe


def translation_candidates(grid: int = 64) -> list[tuple[str, Affine]]:
    """All nonzero translations by (i/grid, j/grid) of the torus."""
    out = []
    for i in range(grid):
        for j in range(grid):
            if i or j:
                out.append((f"translate({i}/{grid},{j}/{grid})", Affine(PhaseSpace.TORUS2, None, (i / grid, j / grid))))
    return out


@dataclass
class ProbeEntry:
    label: str
    residual: float
    d0: float
    witness: bool


@dataclass
class DiscretenessReport:
    eps: float
    tau: float
    entries: list[ProbeEntry] = field(default_factory=list)

    @property
    def witnesses(self) -> list[ProbeEntry]:
        return [e for e in self.entries if e.witness]

    @property
    def min_residual(self) -> float:
        return min(e.residual for e in self.entries) if self.entries else float("nan")

    def to_json(self) -> dict:
        return {
            "eps": self.eps,
            "tau": self.tau,
            "candidates": len(self.entries),
            "min_residual": self.min_residual,
            "witnesses": [{"label": e.label, "residual": e.residual, "d0": e.d0} for e in self.witnesses],
        }


def discreteness_probe(f: Diffeo, candidates, eps: float | None = None,
                       sampler: Sampler = UniformGrid(16), tau: float = DEFAULT_TAU,
                       d0_sampler: Sampler | None = None) -> DiscretenessReport:
    """Flag candidates with commutation residual < tau and d0(h, id) < eps.

    ``candidates`` is a list of homeomorphisms or of (label, homeomorphism)
    pairs.  ``eps`` defaults to half the catalog expansiveness constant.
    """
    if eps is None:
        if f.meta is None:
            raise ValueError("eps is required for maps without metadata")
        eps = f.meta.eps0 / 2
    d0_sampler = sampler if d0_sampler is None else d0_sampler
    ident = Identity(f.space)
    report = DiscretenessReport(eps, tau)
    for k, cand in enumerate(candidates):
        label, h = cand if isinstance(cand, tuple) else (f"candidate[{k}]", cand)
        res = commutation_residual(f, h, sampler)
        dist = d0(h, ident, d0_sampler).value
        report.entries.append(ProbeEntry(label, res, dist, bool(res < tau and dist < eps)))
    return report
