"""Concrete diffeomorphisms with forward and inverse evaluation.

Every map acts on ``(n, d)`` coordinate arrays and returns canonical
representatives.  Inverses are closed form for linear maps and use a
safeguarded Newton/bisection solve for the circle and DA maps.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np

from .geometry import PhaseSpace, RandomUniform, as_points, distances, sample, wrap, wrap_diff

INVERSE_TOL = 1e-12
NEWTON_CAP = 200


class InverseSolveError(RuntimeError):
    pass


@dataclass(frozen=True)
class HyperbolicityMeta:
    """Declared hyperbolicity data of a map (not computed from the map)."""

    eps0: float
    lam: float
    C: float = 1.0
    spectral_spec: str | None = None

    def __post_init__(self):
        if not 0.0 < self.lam < 1.0:
            raise ValueError("contraction rate must lie in (0, 1)")
        if self.C < 1.0:
            raise ValueError("constant C must be >= 1")
        if self.eps0 <= 0.0:
            raise ValueError("expansiveness constant must be positive")

    def to_json(self) -> dict:
        return {"eps0": self.eps0, "lam": self.lam, "C": self.C, "spectral_spec": self.spectral_spec}

    @classmethod
    def from_json(cls, obj: dict) -> "HyperbolicityMeta":
        return cls(float(obj["eps0"]), float(obj["lam"]), float(obj.get("C", 1.0)), obj.get("spectral_spec"))


# ---------------------------------------------------------------- frames


@dataclass(frozen=True)
class Frame:
    """Stable/unstable eigenframe of a hyperbolic 2x2 matrix."""

    e_s: np.ndarray
    e_u: np.ndarray
    lam_s: float
    lam_u: float
    dual: np.ndarray  # rows: covector for the s and u coordinates

    def coords(self, v: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Stable and unstable coordinates of vectors ``v`` (shape (n, 2))."""
        c = np.asarray(v) @ self.dual.T
        return c[..., 0], c[..., 1]

    def vector(self, s, u) -> np.ndarray:
        s = np.asarray(s, dtype=float)
        u = np.asarray(u, dtype=float)
        return s[..., None] * self.e_s + u[..., None] * self.e_u


def _orient(v: np.ndarray) -> np.ndarray:
    v = v / np.linalg.norm(v)
    k = np.flatnonzero(np.abs(v) > 1e-14)[0]
    return v if v[k] > 0 else -v


def stable_unstable_frame(A) -> Frame:
    A = np.asarray(A, dtype=float)
    w, V = np.linalg.eig(A)
    if np.any(np.abs(np.imag(w)) > 0) or np.any(np.abs(np.abs(w) - 1.0) < 1e-9):
        raise ValueError("not hyperbolic")
    w = np.real(w)
    V = np.real(V)
    i_u = int(np.argmax(np.abs(w)))
    i_s = 1 - i_u
    e_s = _orient(V[:, i_s])
    e_u = _orient(V[:, i_u])
    dual = np.linalg.inv(np.column_stack([e_s, e_u]))
    return Frame(e_s, e_u, float(w[i_s]), float(w[i_u]), dual)


# ---------------------------------------------------------------- Fourier field


@dataclass(frozen=True)
class FourierTerm:
    frequency: tuple[int, int]
    coefficient: tuple[float, float]
    phase: str = "sin"  # "sin" or "cos"

    def __post_init__(self):
        if self.phase not in ("sin", "cos"):
            raise ValueError("phase must be 'sin' or 'cos'")


@dataclass(frozen=True)
class FourierField:
    """Periodic vector field sum_k c_k * trig(2 pi k.x) on the torus."""

    terms: tuple[FourierTerm, ...]

    def __call__(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        out = np.zeros(X.shape[:-1] + (2,))
        for t in self.terms:
            arg = 2 * np.pi * (X @ np.asarray(t.frequency, dtype=float))
            trig = np.sin(arg) if t.phase == "sin" else np.cos(arg)
            out += trig[..., None] * np.asarray(t.coefficient)
        return out

    def jacobian(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        J = np.zeros(X.shape[:-1] + (2, 2))
        for t in self.terms:
            k = np.asarray(t.frequency, dtype=float)
            arg = 2 * np.pi * (X @ k)
            dtrig = np.cos(arg) if t.phase == "sin" else -np.sin(arg)
            J += (2 * np.pi * dtrig)[..., None, None] * np.outer(t.coefficient, k)
        return J

    def sup_bound(self) -> float:
        return float(sum(np.hypot(*t.coefficient) for t in self.terms))

    def to_json(self) -> list[dict]:
        return [
            {"frequency": list(t.frequency), "coefficient": list(t.coefficient), "phase": t.phase}
            for t in self.terms
        ]

    @classmethod
    def from_json(cls, obj) -> "FourierField":
        if isinstance(obj, str):
            return named_perturbation(obj)
        return cls(
            tuple(
                FourierTerm(
                    tuple(int(k) for k in t["frequency"]),
                    tuple(float(c) for c in t["coefficient"]),
                    t.get("phase", "sin"),
                )
                for t in obj
            )
        )


def named_perturbation(name: str) -> FourierField:
    """``default``: (sin 2 pi y, 0)/(2 pi).  ``constant``: the constant field (1, 0)."""
    if name == "default":
        return FourierField((FourierTerm((0, 1), (1.0 / (2 * np.pi), 0.0), "sin"),))
    if name == "constant":
        return FourierField((FourierTerm((0, 0), (1.0, 0.0), "cos"),))
    raise ValueError(f"unknown perturbation {name!r}")


# ---------------------------------------------------------------- bumps


@dataclass(frozen=True)
class PlateauBump:
    """Radial C^1 bump phi(rho) = g(rho)/rho, flat near 0, zero for rho >= 1.

    g' is piecewise linear through (0,1), (flat,1), (ramp_end,-slope),
    (c,-slope), (1,0) with c chosen so that g(1) = 0.  The minimum of
    d/drho (rho phi) is -slope, which keeps the DA map injective when
    lam_s - k*slope > 0.
    """

    flat: float = 0.15
    ramp_end: float = 0.30
    slope: float = 0.3

    def __post_init__(self):
        if not 0 < self.flat < self.ramp_end < 1 or self.slope <= 0:
            raise ValueError("invalid plateau bump parameters")
        if not self.ramp_end < self.c < 1:
            raise ValueError("plateau bump parameters leave no room for the tail")

    @property
    def c(self) -> float:
        a, b, m = self.flat, self.ramp_end, self.slope
        pos = a + (b - a) * (1 - m) / 2
        return 2 * pos / m + 2 * b - 1

    def _g(self, rho: np.ndarray) -> np.ndarray:
        a, b, m, c = self.flat, self.ramp_end, self.slope, self.c
        rho = np.clip(rho, 0.0, 1.0)
        # integral of the piecewise linear g' up to rho
        g = np.minimum(rho, a)
        t = np.clip(rho - a, 0.0, b - a)
        g = g + t - (1 + m) * t**2 / (2 * (b - a))
        t = np.clip(rho - b, 0.0, c - b)
        g = g - m * t
        t = np.clip(rho - c, 0.0, 1.0 - c)
        g = g - m * t + m * t**2 / (2 * (1 - c))
        return g

    def __call__(self, rho) -> np.ndarray:
        rho = np.asarray(rho, dtype=float)
        safe = np.where(rho > 0, rho, 1.0)
        out = np.where(rho <= self.flat, 1.0, self._g(rho) / safe)
        return np.where(rho >= 1.0, 0.0, out)

    def to_json(self) -> dict:
        return {"kind": "plateau", "flat": self.flat, "ramp_end": self.ramp_end, "slope": self.slope}


@dataclass(frozen=True)
class QuarticBump:
    """phi(rho) = (1 - rho^2)^2 on [0, 1]."""

    def __call__(self, rho) -> np.ndarray:
        rho = np.asarray(rho, dtype=float)
        return np.where(rho < 1.0, (1.0 - np.minimum(rho, 1.0) ** 2) ** 2, 0.0)

    def to_json(self) -> dict:
        return {"kind": "quartic"}


def bump_from_json(obj) -> PlateauBump | QuarticBump:
    if obj is None:
        return PlateauBump()
    kind = obj.get("kind", "plateau")
    if kind == "quartic":
        return QuarticBump()
    if kind == "plateau":
        return PlateauBump(float(obj["flat"]), float(obj["ramp_end"]), float(obj["slope"]))
    raise ValueError(f"unknown bump kind {kind!r}")


# ---------------------------------------------------------------- monotone solver


def monotone_solve(F, dF, target, lo, hi, tol=1e-15, cap=NEWTON_CAP):
    """Solve F(x) = target for increasing F on brackets [lo, hi], elementwise.

    Newton steps that leave the current bracket are replaced by bisection.
    """
    lo = np.array(lo, dtype=float)
    hi = np.array(hi, dtype=float)
    x = 0.5 * (lo + hi)
    for _ in range(cap):
        r = F(x) - target
        done = np.abs(r) <= tol * np.maximum(1.0, np.abs(target))
        if np.all(done | (hi - lo <= 4e-16 * np.maximum(1.0, np.abs(x)))):
            return x
        lo = np.where(r < 0, x, lo)
        hi = np.where(r > 0, x, hi)
        d = dF(x)
        with np.errstate(divide="ignore", invalid="ignore"):
            xn = x - r / d
        bad = ~np.isfinite(xn) | (xn <= lo) | (xn >= hi)
        xn = np.where(bad, 0.5 * (lo + hi), xn)
        x = np.where(done, x, xn)
    raise InverseSolveError("inverse solve failed")


# ---------------------------------------------------------------- maps


class Diffeo:
    """Base class: an invertible self-map of a phase space."""

    kind = "Diffeo"
    space: PhaseSpace
    name: str
    meta: HyperbolicityMeta | None

    def forward(self, X: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def backward(self, X: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def __call__(self, x):
        return self.forward(as_points(x, self.space))

    def inverse(self, x):
        return self.backward(as_points(x, self.space))

    def iterate(self, x, n: int) -> np.ndarray:
        X = as_points(x, self.space)
        step = self.forward if n >= 0 else self.backward
        for _ in range(abs(int(n))):
            X = step(X)
        return X

    def parameters(self) -> dict:
        return {}

    def to_json(self) -> dict:
        out = {"name": self.name, "kind": self.kind, "parameters": self.parameters()}
        if self.meta is not None:
            out["metadata"] = self.meta.to_json()
            out["spectral_spec"] = self.meta.spectral_spec
        return out

    def check_inverse(self, count: int = 256, seed: int = 12345, tol: float = 1e-10) -> float:
        """Max distance f(f^-1(x)) to x on a random sample; raises if >= tol."""
        X = sample(self.space, RandomUniform(count, seed))
        err = float(np.max(distances(self.forward(self.backward(X)), X)))
        if err >= tol:
            raise ValueError(f"forward and inverse disagree ({err:.3g})")
        return err

    def __repr__(self):
        return f"{type(self).__name__}({self.name!r})"


def _integer_matrix(A) -> np.ndarray:
    M = np.asarray(A)
    if M.shape != (2, 2) or not np.all(np.equal(np.mod(M, 1), 0)):
        raise ValueError("matrix must be a 2x2 integer matrix")
    return M.astype(np.int64)


def _integer_inverse(M: np.ndarray) -> np.ndarray:
    det = int(round(np.linalg.det(M)))
    if det not in (1, -1):
        raise ValueError("matrix must have determinant +-1")
    return det * np.array([[M[1, 1], -M[0, 1]], [-M[1, 0], M[0, 0]]], dtype=np.int64)


class LinearAnosov(Diffeo):
    kind = "LinearAnosov"

    def __init__(self, matrix=((2, 1), (1, 1)), name: str = "cat", meta: HyperbolicityMeta | None = None):
        self.space = PhaseSpace.TORUS2
        self.matrix = _integer_matrix(matrix)
        self.matrix_inv = _integer_inverse(self.matrix)
        self.frame = stable_unstable_frame(self.matrix)
        self.name = name
        self.meta = meta
        self.check_inverse()

    def forward(self, X):
        return wrap(X @ self.matrix.T)

    def backward(self, X):
        return wrap(X @ self.matrix_inv.T)

    def parameters(self):
        return {"matrix": self.matrix.tolist()}


class AffinePerturbedAnosov(Diffeo):
    """g(x) = A x + amplitude * p(x) mod 1."""

    kind = "AffinePerturbedAnosov"

    def __init__(self, matrix=((2, 1), (1, 1)), perturbation: FourierField | None = None,
                 amplitude: float = 0.01, name: str = "cat_perturbed", meta: HyperbolicityMeta | None = None):
        self.space = PhaseSpace.TORUS2
        self.base = LinearAnosov(matrix, name=f"{name}_base")
        self.matrix = self.base.matrix
        self.field = perturbation if perturbation is not None else named_perturbation("default")
        self.amplitude = float(amplitude)
        self.name = name
        self.meta = meta
        self.check_inverse()

    def forward(self, X):
        return wrap(X @ self.matrix.T + self.amplitude * self.field(X))

    def backward(self, X):
        y = self.base.backward(X)
        if self.amplitude == 0.0:
            return y
        A = self.matrix.astype(float)
        for _ in range(NEWTON_CAP):
            r = wrap_diff(y @ A.T + self.amplitude * self.field(y) - X)
            if np.max(np.abs(r)) < 1e-15:
                return wrap(y)
            J = A + self.amplitude * self.field.jacobian(y)
            y = y - np.linalg.solve(J, r[..., None])[..., 0]
        r = wrap_diff(y @ A.T + self.amplitude * self.field(y) - X)
        if np.max(np.abs(r)) < INVERSE_TOL:
            return wrap(y)
        raise InverseSolveError("inverse solve failed")

    def parameters(self):
        return {"matrix": self.matrix.tolist(), "amplitude": self.amplitude, "perturbation": self.field.to_json()}


class NorthSouthCircle(Diffeo):
    """theta -> theta + a sin(2 pi theta): N = 0 repels, S = 1/2 attracts."""

    kind = "NorthSouthCircle"
    fixed_points = (0.0, 0.5)

    def __init__(self, a: float = 0.1, name: str = "northsouth", meta: HyperbolicityMeta | None = None):
        if not 0.0 < a < 1.0 / (2 * np.pi):
            raise ValueError("parameter a must lie in (0, 1/(2 pi))")
        self.space = PhaseSpace.CIRCLE
        self.a = float(a)
        self.name = name
        self.meta = meta
        self.check_inverse()

    def lift(self, t):
        return t + self.a * np.sin(2 * np.pi * t)

    def derivative(self, t):
        return 1.0 + 2 * np.pi * self.a * np.cos(2 * np.pi * t)

    def forward(self, X):
        return wrap(self.lift(X))

    def backward(self, X):
        y = np.asarray(X, dtype=float)
        t = monotone_solve(self.lift, self.derivative, y, y - self.a, y + self.a)
        return wrap(t)

    def parameters(self):
        return {"a": self.a}


class DerivedFromAnosov(Diffeo):
    """x -> A x + phi(|x - p|/r) k s(x) e_s mod 1.

    The push acts along the stable eigendirection only, so the linear stable
    foliation is preserved and the unstable coordinate evolves linearly.
    """

    kind = "DerivedFromAnosov"

    def __init__(self, matrix=((2, 1), (1, 1)), radius: float = 0.15, strength: float = 1.0,
                 center=(0.0, 0.0), bump=None, name: str = "da", meta: HyperbolicityMeta | None = None):
        self.space = PhaseSpace.TORUS2
        self.base = LinearAnosov(matrix, name=f"{name}_base")
        self.matrix = self.base.matrix
        self.frame = self.base.frame
        self.radius = float(radius)
        self.strength = float(strength)
        self.center = np.asarray(center, dtype=float)
        self.bump = bump if bump is not None else PlateauBump()
        self.name = name
        self.meta = meta
        if not 0 < self.radius < 0.25:
            raise ValueError("bump radius must lie in (0, 0.25)")
        if np.max(distances(self.base.forward(self.center[None]), self.center[None])) > 1e-12:
            raise ValueError("center must be a fixed point of the linear map")
        if self.frame.lam_s + self.strength <= 1.0:
            raise ValueError("push too weak: the fixed point does not become a repeller")
        self.min_stable_derivative = self._min_stable_derivative()
        if self.min_stable_derivative <= 0.0:
            raise ValueError("DA map not injective on the bump support")
        self.check_inverse()

    def local(self, X):
        """Stable and unstable coordinates of x - p (wrapped)."""
        return self.frame.coords(wrap_diff(X - self.center))

    def stable_map(self, s, u):
        """Local stable coordinate of the image, for a point with local coords (s, u)."""
        rho = np.hypot(s, u) / self.radius
        return self.frame.lam_s * s + self.strength * self.bump(rho) * s

    def _min_stable_derivative(self, n: int = 241) -> float:
        g = np.linspace(-self.radius, self.radius, n)
        s, u = np.meshgrid(g, g, indexing="ij")
        h = 1e-7
        d = (self.stable_map(s + h, u) - self.stable_map(s - h, u)) / (2 * h)
        return float(d.min())

    def push(self, X):
        s, u = self.local(X)
        rho = np.hypot(s, u) / self.radius
        return (self.strength * self.bump(rho) * s)[..., None] * self.frame.e_s

    def forward(self, X):
        return wrap(X @ self.matrix.T + self.push(X))

    def backward(self, X):
        y = self.base.backward(X)
        s0, u0 = self.local(y)
        inside = np.hypot(s0, u0) < self.radius
        if not np.any(inside):
            return y
        s0i, u0i = s0[inside], u0[inside]
        lam_s, k = self.frame.lam_s, self.strength
        target = lam_s * s0i
        mag = np.abs(s0i)
        lo = lam_s * mag / (lam_s + k)
        # F is odd in s, solve for |s| and restore the sign
        sol = monotone_solve(
            lambda t: self.stable_map(t, u0i),
            lambda t: (self.stable_map(t + 1e-8, u0i) - self.stable_map(t - 1e-8, u0i)) / 2e-8,
            np.abs(target), lo, mag,
        )
        s = np.sign(s0i) * sol
        out = y.copy()
        out[inside] = wrap(self.center + self.frame.vector(s, u0i))
        return out

    def parameters(self):
        return {
            "matrix": self.matrix.tolist(),
            "radius": self.radius,
            "strength": self.strength,
            "center": self.center.tolist(),
            "bump": self.bump.to_json(),
        }


class ProductMap(Diffeo):
    """f x g on S^1 x T^2 with coordinates (theta, x, y)."""

    kind = "Product"

    def __init__(self, circle: Diffeo, torus: Diffeo, name: str = "product", meta: HyperbolicityMeta | None = None):
        if circle.space is not PhaseSpace.CIRCLE or torus.space is not PhaseSpace.TORUS2:
            raise ValueError("space mismatch")
        self.space = PhaseSpace.CIRCLE_TIMES_TORUS2
        self.circle = circle
        self.torus = torus
        self.name = name
        self.meta = meta

    def forward(self, X):
        return np.concatenate([self.circle.forward(X[:, :1]), self.torus.forward(X[:, 1:])], axis=1)

    def backward(self, X):
        return np.concatenate([self.circle.backward(X[:, :1]), self.torus.backward(X[:, 1:])], axis=1)

    def parameters(self):
        return {"circle": self.circle.name, "torus": self.torus.name}


class CompositeMap(Diffeo):
    """f1^n1 o f2^n2 o ... (rightmost factor applied first).  No factors is the identity."""

    kind = "Composite"

    def __init__(self, space: PhaseSpace, factors=(), name: str = "composite", meta: HyperbolicityMeta | None = None):
        self.space = space
        self.factors = tuple((f, int(n)) for f, n in factors)
        for f, _ in self.factors:
            if f.space is not space:
                raise ValueError("space mismatch")
        self.name = name
        self.meta = meta

    def forward(self, X):
        for f, n in reversed(self.factors):
            X = f.iterate(X, n)
        return wrap(X)

    def backward(self, X):
        for f, n in self.factors:
            X = f.iterate(X, -n)
        return wrap(X)

    def parameters(self):
        return {"space": self.space.value, "factors": [[f.name, n] for f, n in self.factors]}


# ---------------------------------------------------------------- orbits and counts


def orbit(f: Diffeo, x, n_min: int, n_max: int) -> tuple[np.ndarray, np.ndarray]:
    """Times ``n_min..n_max`` and the points f^n(x), iterated outward from n = 0."""
    if n_min > n_max:
        raise ValueError("n_min must not exceed n_max")
    x0 = as_points(x, f.space)
    if x0.shape[0] != 1:
        raise ValueError("orbit takes a single point")
    pts = {0: x0[0]}
    cur = x0
    for n in range(1, max(n_max, 0) + 1):
        cur = f.forward(cur)
        pts[n] = cur[0]
    cur = x0
    for n in range(-1, min(n_min, 0) - 1, -1):
        cur = f.backward(cur)
        pts[n] = cur[0]
    ns = np.arange(n_min, n_max + 1)
    return ns, np.array([pts[int(n)] for n in ns])


def periodic_point_count_linear(A, n: int) -> int:
    """Number of fixed points of A^n on the torus, |det(A^n - I)|."""
    if n < 1:
        raise ValueError("period must be >= 1")
    M = np.linalg.matrix_power(_integer_matrix(A), n) - np.eye(2, dtype=np.int64)
    return abs(int(M[0, 0] * M[1, 1] - M[0, 1] * M[1, 0]))


def periodic_point_count_bruteforce(A, n: int) -> int:
    """Count x in the unit square with A^n x = x mod 1 by exact lattice search.

    Any solution satisfies (A^n - I) x in Z^2, hence x in (1/D) Z^2 with
    D = |det(A^n - I)|; every such grid point is tested with integer arithmetic.
    """
    if n < 1:
        raise ValueError("period must be >= 1")
    An = np.linalg.matrix_power(_integer_matrix(A), n)
    M = An - np.eye(2, dtype=np.int64)
    D = abs(int(round(np.linalg.det(M.astype(float)))))
    if D == 0:
        raise ValueError("A^n - I is singular")
    i, j = np.meshgrid(np.arange(D), np.arange(D), indexing="ij")
    v = np.stack([i.ravel(), j.ravel()], axis=1)
    return int(np.sum(np.all((v @ M.T) % D == 0, axis=1)))


# ---------------------------------------------------------------- catalog I/O


def _build(entry: dict, built: dict[str, Diffeo], entries: dict[str, dict]) -> Diffeo:
    name = entry["name"]
    if name in built:
        return built[name]
    kind = entry["kind"]
    par = entry.get("parameters", {})
    meta = HyperbolicityMeta.from_json(entry["metadata"]) if "metadata" in entry else None
    if meta is not None and entry.get("spectral_spec") and meta.spectral_spec is None:
        meta = HyperbolicityMeta(meta.eps0, meta.lam, meta.C, entry["spectral_spec"])

    def ref(obj):
        if isinstance(obj, str):
            if obj not in entries:
                raise ValueError(f"unknown map reference {obj!r}")
            return _build(entries[obj], built, entries)
        return _build(obj, built, entries)

    if kind == "LinearAnosov":
        f = LinearAnosov(par.get("matrix", [[2, 1], [1, 1]]), name=name, meta=meta)
    elif kind == "AffinePerturbedAnosov":
        f = AffinePerturbedAnosov(
            par.get("matrix", [[2, 1], [1, 1]]),
            FourierField.from_json(par.get("perturbation", "default")),
            float(par.get("amplitude", 0.01)), name=name, meta=meta,
        )
    elif kind == "NorthSouthCircle":
        f = NorthSouthCircle(float(par.get("a", 0.1)), name=name, meta=meta)
    elif kind == "DerivedFromAnosov":
        f = DerivedFromAnosov(
            par.get("matrix", [[2, 1], [1, 1]]), float(par.get("radius", 0.15)),
            float(par.get("strength", 1.0)), par.get("center", [0.0, 0.0]),
            bump_from_json(par.get("bump")), name=name, meta=meta,
        )
    elif kind == "Product":
        f = ProductMap(ref(par["circle"]), ref(par["torus"]), name=name, meta=meta)
    elif kind == "Composite":
        space = PhaseSpace.from_kind(par["space"])
        f = CompositeMap(space, [(ref(g), int(n)) for g, n in par.get("factors", [])], name=name, meta=meta)
    else:
        raise ValueError(f"unknown map kind {kind!r}")
    built[name] = f
    return f


def catalog_from_json(obj: dict) -> dict[str, Diffeo]:
    entries = {e["name"]: e for e in obj["maps"]}
    built: dict[str, Diffeo] = {}
    for e in obj["maps"]:
        _build(e, built, entries)
    return {e["name"]: built[e["name"]] for e in obj["maps"]}


def catalog_entries(obj: dict) -> list[dict]:
    return list(obj["maps"])


def load_catalog_json(path: str | Path | None = None) -> dict:
    if path is None:
        text = resources.files("stablab").joinpath("data/catalog.json").read_text(encoding="utf-8")
    else:
        text = Path(path).read_text(encoding="utf-8")
    return json.loads(text)


def load_catalog(path: str | Path | None = None) -> dict[str, Diffeo]:
    return catalog_from_json(load_catalog_json(path))


_DEFAULT: dict[str, Diffeo] | None = None


def default_catalog() -> dict[str, Diffeo]:
    """The shipped catalog (built once, maps are immutable)."""
    global _DEFAULT
    if _DEFAULT is None:
        _DEFAULT = load_catalog()
    return _DEFAULT


def get_map(name: str, catalog: dict[str, Diffeo] | None = None) -> Diffeo:
    cat = default_catalog() if catalog is None else catalog
    if name not in cat:
        raise KeyError(f"unknown map {name!r}; available: {', '.join(cat)}")
    return cat[name]
