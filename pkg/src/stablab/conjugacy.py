"""The d0 metric, the Moser fixed-point solver and the F_h / Psi operators.

The solver finds h = id + u with h o A = g o h for g = A + eps p on the
torus.  Each outer step solves the linear twisted equation

    u(Ax) = A u(x) + phi(x),   phi(x) = eps p(x + u_k(x)),

on a periodic grid by summing the geometric series in the eigenframe.  Grid
nodes are mapped onto grid nodes by A, so the on-grid sums are exact index
permutations.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .catalog import AffinePerturbedAnosov, Diffeo, InverseSolveError, LinearAnosov
from .geometry import PhaseSpace, RandomUniform, Sampler, UniformGrid, distances, sample, wrap, wrap_diff
from .homeo import Compose, Homeo, Identity, Inverse, MapPower

SUP_U_LIMIT = 0.25
DEFAULT_RESIDUAL_SAMPLER = RandomUniform(4096, seed=2024)


class PerturbationTooLarge(ArithmeticError):
    def __init__(self, detail: str = ""):
        super().__init__("perturbation too large" + (f" ({detail})" if detail else ""))


def as_homeo(h) -> Homeo:
    """Accept a Homeo or a Diffeo (read as its first power)."""
    if isinstance(h, Homeo):
        return h
    if isinstance(h, Diffeo):
        return MapPower(h, 1)
    raise TypeError(f"not a homeomorphism: {h!r}")


# ---------------------------------------------------------------- d0


@dataclass
class D0Report:
    value: float
    witness_forward: np.ndarray
    witness_inverse: np.ndarray
    sup_forward: float
    sup_inverse: float
    sampler: Sampler

    def __float__(self):
        return self.value

    def to_json(self) -> dict:
        return {
            "value": self.value,
            "sup_forward": self.sup_forward,
            "sup_inverse": self.sup_inverse,
            "witness_forward": self.witness_forward.tolist(),
            "witness_inverse": self.witness_inverse.tolist(),
            "sampler": self.sampler.to_json(),
        }


def d0(h1, h2, sampler: Sampler = UniformGrid(64)) -> D0Report:
    """Sum of the sampled sup distances of the maps and of their inverses."""
    h1, h2 = as_homeo(h1), as_homeo(h2)
    if h1.space is not h2.space:
        raise ValueError("space mismatch")
    X = sample(h1.space, sampler)
    fwd = distances(h1.forward(X), h2.forward(X))
    inv = distances(h1.backward(X), h2.backward(X))
    i, j = int(np.argmax(fwd)), int(np.argmax(inv))
    return D0Report(float(fwd[i] + inv[j]), X[i], X[j], float(fwd[i]), float(inv[j]), sampler)


def c0_distance(f, g, sampler: Sampler = UniformGrid(256)) -> float:
    """Sampled sup distance between two maps (forward direction only)."""
    f, g = as_homeo(f), as_homeo(g)
    X = sample(f.space, sampler)
    return float(np.max(distances(f.forward(X), g.forward(X))))


def conjugacy_residual(f, g, h, sampler: Sampler = DEFAULT_RESIDUAL_SAMPLER) -> float:
    """sup over samples of d(h(f(x)), g(h(x)))."""
    f, g, h = as_homeo(f), as_homeo(g), as_homeo(h)
    X = sample(f.space, sampler)
    return float(np.max(distances(h.forward(f.forward(X)), g.forward(h.forward(X)))))


def modulus_of_continuity(h, delta: float, sampler: Sampler = RandomUniform(2048, seed=3)) -> float:
    """Sampled estimate of sup{d(h x, h y) : d(x, y) <= delta} along axis and diagonal offsets."""
    h = as_homeo(h)
    X = sample(h.space, sampler)
    d = h.space.dimension
    dirs = np.vstack([np.eye(d), -np.eye(d), np.ones((1, d)) / math.sqrt(d), -np.ones((1, d)) / math.sqrt(d)])
    hx = h.forward(X)
    best = 0.0
    for v in dirs:
        best = max(best, float(np.max(distances(h.forward(wrap(X + delta * v)), hx))))
    return best


# ---------------------------------------------------------------- grid homeomorphism


def _bilinear(U: np.ndarray, X: np.ndarray) -> np.ndarray:
    R = U.shape[0]
    y = np.asarray(X) * R
    i0 = np.floor(y).astype(np.int64)
    fr = y - i0
    i0 %= R
    i1 = (i0 + 1) % R
    fx, fy = fr[:, 0:1], fr[:, 1:2]
    return (
        U[i0[:, 0], i0[:, 1]] * (1 - fx) * (1 - fy)
        + U[i1[:, 0], i0[:, 1]] * fx * (1 - fy)
        + U[i0[:, 0], i1[:, 1]] * (1 - fx) * fy
        + U[i1[:, 0], i1[:, 1]] * fx * fy
    )


class GridHomeo(Homeo):
    """h(x) = x + u(x) with u given on an R x R periodic grid.

    ``interpolation="bilinear"`` interpolates u directly.  ``"series"`` (only
    for Moser solutions) evaluates u off-grid by one pointwise sweep of the
    twisted-equation series along the exact orbit of x, with the bilinear
    field used inside the perturbation term.
    """

    label = "GridHomeo"

    def __init__(self, field: np.ndarray, interpolation: str = "bilinear",
                 base: LinearAnosov | None = None, g: AffinePerturbedAnosov | None = None,
                 series_terms: int = 40):
        self.space = PhaseSpace.TORUS2
        self.field = np.asarray(field, dtype=float)
        R = self.field.shape[0]
        if self.field.shape != (R, R, 2):
            raise ValueError("displacement field must have shape (R, R, 2)")
        if interpolation not in ("bilinear", "series"):
            raise ValueError("interpolation must be 'bilinear' or 'series'")
        if interpolation == "series" and (base is None or g is None):
            raise ValueError("series interpolation needs the base map and its perturbation")
        self.resolution = R
        self.interpolation = interpolation
        self.base = base
        self.g = g
        self.series_terms = int(series_terms)
        self.sup_u = float(np.max(np.abs(self.field))) if self.field.size else 0.0
        if self.sup_u >= SUP_U_LIMIT:
            raise ValueError("displacement too large for a grid homeomorphism")
        self.residual: float | None = None
        self.iterations_used = 0
        self.update_history: list[float] = []
        self.residual_history: list[float] = []

    def displacement(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        if self.interpolation == "bilinear":
            return _bilinear(self.field, X)
        A = self.base.matrix
        Ainv = self.base.matrix_inv
        fr = self.base.frame
        eps, p = self.g.amplitude, self.g.field
        out = np.zeros_like(X)
        y = X
        for n in range(self.series_terms):
            phi_u = (eps * p(y + _bilinear(self.field, y))) @ fr.dual[1]
            out -= np.outer(phi_u, fr.e_u) / fr.lam_u ** (n + 1)
            y = wrap(y @ A.T)
        y = X
        for n in range(1, self.series_terms + 1):
            y = wrap(y @ Ainv.T)
            phi_s = (eps * p(y + _bilinear(self.field, y))) @ fr.dual[0]
            out += np.outer(phi_s, fr.e_s) * fr.lam_s ** (n - 1)
        return out

    def forward(self, X):
        return wrap(np.asarray(X) + self.displacement(X))

    def backward(self, X, tol: float = 1e-15, cap: int = 200):
        X = np.asarray(X, dtype=float)
        y = X.copy()
        for _ in range(cap):
            y_new = wrap(X - self.displacement(y))
            step = float(np.max(np.abs(wrap_diff(y_new - y)))) if len(y) else 0.0
            y = y_new
            if step <= tol:
                return y
        err = float(np.max(distances(self.forward(y), X)))
        if err < 1e-13:
            return y
        raise InverseSolveError("inverse solve failed")

    def injectivity_probe(self) -> bool:
        """True if x + u(x) has positive Jacobian at all corners of all grid cells."""
        U, R = self.field, self.resolution
        dx = (np.roll(U, -1, axis=0) - U) * R  # forward differences along each axis
        dy = (np.roll(U, -1, axis=1) - U) * R
        ok = True
        # the bilinear Jacobian at a corner uses the two incident cell edges
        for ex in (dx, np.roll(dx, -1, axis=1)):
            for ey in (dy, np.roll(dy, -1, axis=0)):
                det = (1 + ex[..., 0]) * (1 + ey[..., 1]) - ex[..., 1] * ey[..., 0]
                ok = ok and bool(np.all(det > 0))
        return ok

    def to_json(self) -> dict:
        return {
            "resolution": self.resolution,
            "interpolation": self.interpolation,
            "residual": self.residual,
            "iterations_used": self.iterations_used,
            "sup_u": self.sup_u,
            "nodes": self.field.reshape(-1, 2).tolist(),
        }

    def describe(self):
        return {"node": self.label, "resolution": self.resolution, "interpolation": self.interpolation}


# ---------------------------------------------------------------- Moser solver


def _grid_permutations(M: np.ndarray, Minv: np.ndarray, R: int):
    i, j = np.meshgrid(np.arange(R), np.arange(R), indexing="ij")
    idx = np.stack([i.ravel(), j.ravel()], axis=1)
    fw = (idx @ M.T) % R
    bw = (idx @ Minv.T) % R
    return idx / R, fw[:, 0] * R + fw[:, 1], bw[:, 0] * R + bw[:, 1]


def twisted_solve(phi: np.ndarray, frame, fw: np.ndarray, bw: np.ndarray, tol_inner: float) -> tuple[np.ndarray, int]:
    """Solve u(Ax) = A u(x) + phi(x) on grid nodes; returns (u, series length)."""
    c = phi @ frame.dual.T
    p_s, p_u = c[:, 0], c[:, 1]
    lam = max(abs(frame.lam_s), 1.0 / abs(frame.lam_u))
    sup = float(np.max(np.abs(c))) if c.size else 0.0
    if sup == 0.0:
        return np.zeros_like(phi), 0
    n_terms = max(1, math.ceil(math.log(tol_inner * (1 - lam) / sup) / math.log(lam)))
    v_u = np.zeros(len(phi))
    v_s = np.zeros(len(phi))
    for _ in range(n_terms):
        v_u = (v_u[fw] - p_u) / frame.lam_u
        v_s = frame.lam_s * v_s[bw] + p_s[bw]
    return np.outer(v_s, frame.e_s) + np.outer(v_u, frame.e_u), n_terms


def moser_solve(base: LinearAnosov, g: AffinePerturbedAnosov, resolution: int = 256,
                tol_inner: float = 1e-15, tol_outer: float = 1e-13, max_outer: int = 100,
                interpolation: str = "series",
                residual_sampler: Sampler = DEFAULT_RESIDUAL_SAMPLER) -> GridHomeo:
    """Conjugacy h = id + u with h o base = g o h."""
    if not isinstance(base, LinearAnosov) or not isinstance(g, AffinePerturbedAnosov):
        raise TypeError("moser_solve needs a linear Anosov map and an affine perturbation of it")
    if not np.array_equal(base.matrix, g.matrix):
        raise ValueError("g must perturb the given linear map")
    R = int(resolution)
    if R < 2:
        raise ValueError("resolution must be at least 2")
    frame = base.frame
    X, fw, bw = _grid_permutations(base.matrix, base.matrix_inv, R)
    eps, p = g.amplitude, g.field
    A = base.matrix.astype(float)
    u = np.zeros_like(X)
    updates: list[float] = []
    residuals: list[float] = []
    converged = False
    for k in range(1, max_outer + 1):
        phi = eps * p(X + u)
        u_new, _ = twisted_solve(phi, frame, fw, bw, tol_inner)
        step = float(np.max(np.abs(u_new - u)))
        u = u_new
        updates.append(step)
        # on-grid residual of the nonlinear equation for the current iterate
        residuals.append(float(np.max(np.abs(u[fw] - u @ A.T - eps * p(X + u)))))
        if not np.all(np.isfinite(u)) or np.max(np.abs(u)) >= SUP_U_LIMIT:
            raise PerturbationTooLarge(f"sup|u| reached {np.max(np.abs(u)):.3g}")
        if step < tol_outer:
            converged = True
            break
    if not converged:
        raise PerturbationTooLarge(f"no convergence in {max_outer} outer iterations")
    h = GridHomeo(u.reshape(R, R, 2), interpolation, base=base, g=g)
    h.iterations_used = k
    h.update_history = updates
    h.residual_history = residuals
    h.residual_sampler = residual_sampler
    h.residual = conjugacy_residual(base, g, h, residual_sampler)
    return h


# ---------------------------------------------------------------- conjugacy-space operators


def F_h(h, tilde_f, f: Diffeo | None = None, tau: float = 1e-6,
        sampler: Sampler = RandomUniform(512, seed=5)) -> Compose:
    """F_h(f~) = h o f~.  If ``f`` is given, warn when f~ does not commute with it."""
    h, tilde_f = as_homeo(h), as_homeo(tilde_f)
    if f is not None:
        X = sample(f.space, sampler)
        res = float(np.max(distances(tilde_f.forward(f.forward(X)), f.forward(tilde_f.forward(X)))))
        if res >= tau:
            warnings.warn(f"argument does not commute with the map (residual {res:.3g})", stacklevel=2)
    return Compose(h, tilde_f)


def F_h_inverse(h, tilde_h) -> Compose:
    """F_h^-1(h~) = h^-1 o h~."""
    return Compose(Inverse(as_homeo(h)), as_homeo(tilde_h))


def push_centralizer(h_g, tilde_f) -> Compose:
    """Psi(f~) = h_g^-1 o f~ o h_g, where h_g o g = f o h_g."""
    h_g = as_homeo(h_g)
    return Compose(Inverse(h_g), as_homeo(tilde_f), h_g)


def reversibility_check(f, R, sampler: Sampler = RandomUniform(1024, seed=9)) -> float:
    """max(sup d(R R x, x), sup d(R f x, f^-1 R x)); zero for a reversor."""
    f, R = as_homeo(f), as_homeo(R)
    X = sample(f.space, sampler)
    rx = R.forward(X)
    inv = float(np.max(distances(R.forward(rx), X)))
    rev = float(np.max(distances(R.forward(f.forward(X)), f.backward(rx))))
    return max(inv, rev)


def identity(space: PhaseSpace) -> Identity:
    return Identity(space)
