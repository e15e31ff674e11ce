"""Homeomorphisms as evaluable expression trees.

A tree is built from :class:`Identity`, :class:`MapPower`, :class:`Affine`,
:class:`ProductOf`, :class:`Inverse` and :class:`Compose`; the centralizer and
conjugacy modules add leaf types (fundamental-domain pieces, bump pushes,
grid homeomorphisms).  Every node evaluates both directions.
"""
from __future__ import annotations

import numpy as np

from .catalog import Diffeo
from .geometry import PhaseSpace, as_points, wrap


class Homeo:
    space: PhaseSpace
    label = "homeo"

    def forward(self, X: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def backward(self, X: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def __call__(self, x):
        return self.forward(as_points(x, self.space))

    def inverse(self, x):
        return self.backward(as_points(x, self.space))

    def __matmul__(self, other: "Homeo") -> "Compose":
        return Compose(self, other)

    @property
    def inv(self) -> "Homeo":
        return Inverse(self)

    def describe(self) -> dict:
        return {"node": self.label}

    def __repr__(self):
        return f"{type(self).__name__}<{self.space.value}>"


class Identity(Homeo):
    label = "Identity"

    def __init__(self, space: PhaseSpace):
        self.space = space

    def forward(self, X):
        return np.array(X, dtype=float)

    def backward(self, X):
        return np.array(X, dtype=float)


class MapPower(Homeo):
    """f^n for a catalog diffeomorphism f."""

    label = "MapPower"

    def __init__(self, f: Diffeo, n: int = 1):
        self.f = f
        self.n = int(n)
        self.space = f.space

    def forward(self, X):
        return self.f.iterate(X, self.n)

    def backward(self, X):
        return self.f.iterate(X, -self.n)

    def describe(self):
        return {"node": self.label, "map": self.f.name, "power": self.n}


class Affine(Homeo):
    """x -> M x + b mod 1 with M an integer matrix of determinant +-1."""

    label = "Affine"

    def __init__(self, space: PhaseSpace, matrix=None, offset=None):
        d = space.dimension
        self.space = space
        self.matrix = np.eye(d, dtype=np.int64) if matrix is None else np.asarray(matrix, dtype=np.int64)
        self.offset = np.zeros(d) if offset is None else np.asarray(offset, dtype=float).reshape(d)
        det = int(round(np.linalg.det(self.matrix.astype(float))))
        if self.matrix.shape != (d, d) or det not in (1, -1):
            raise ValueError("affine part must be a unimodular integer matrix")
        self.matrix_inv = np.rint(np.linalg.inv(self.matrix.astype(float))).astype(np.int64)

    def forward(self, X):
        return wrap(np.asarray(X) @ self.matrix.T + self.offset)

    def backward(self, X):
        return wrap((np.asarray(X) - self.offset) @ self.matrix_inv.T)

    def describe(self):
        return {"node": self.label, "matrix": self.matrix.tolist(), "offset": self.offset.tolist()}


def translation(space: PhaseSpace, v) -> Affine:
    return Affine(space, None, v)


def negation(space: PhaseSpace) -> Affine:
    return Affine(space, -np.eye(space.dimension, dtype=np.int64))


class Inverse(Homeo):
    label = "Inverse"

    def __new__(cls, h: Homeo):
        if isinstance(h, Inverse):
            return h.h
        return super().__new__(cls)

    def __init__(self, h: Homeo):
        if self is h:
            return
        self.h = h
        self.space = h.space

    def forward(self, X):
        return self.h.backward(X)

    def backward(self, X):
        return self.h.forward(X)

    def describe(self):
        return {"node": self.label, "of": self.h.describe()}


class Compose(Homeo):
    """h1 o h2 o ... o hk (the rightmost factor acts first)."""

    label = "Compose"

    def __init__(self, *parts: Homeo):
        if not parts:
            raise ValueError("empty composition")
        flat: list[Homeo] = []
        for p in parts:
            flat.extend(p.parts if isinstance(p, Compose) else [p])
        space = flat[0].space
        if any(p.space is not space for p in flat):
            raise ValueError("space mismatch")
        self.parts = tuple(flat)
        self.space = space

    def forward(self, X):
        for p in reversed(self.parts):
            X = p.forward(X)
        return X

    def backward(self, X):
        for p in self.parts:
            X = p.backward(X)
        return X

    def describe(self):
        return {"node": self.label, "parts": [p.describe() for p in self.parts]}


class ProductOf(Homeo):
    """c x t on S^1 x T^2."""

    label = "ProductOf"

    def __init__(self, circle: Homeo, torus: Homeo):
        if circle.space is not PhaseSpace.CIRCLE or torus.space is not PhaseSpace.TORUS2:
            raise ValueError("space mismatch")
        self.circle = circle
        self.torus = torus
        self.space = PhaseSpace.CIRCLE_TIMES_TORUS2

    def forward(self, X):
        X = np.asarray(X)
        return np.concatenate([self.circle.forward(X[:, :1]), self.torus.forward(X[:, 1:])], axis=1)

    def backward(self, X):
        X = np.asarray(X)
        return np.concatenate([self.circle.backward(X[:, :1]), self.torus.backward(X[:, 1:])], axis=1)

    def describe(self):
        return {"node": self.label, "circle": self.circle.describe(), "torus": self.torus.describe()}


def simplify(h: Homeo) -> Homeo:
    """Cancel adjacent pairs k^-1 o k and k o k^-1 (by node identity) in a composition."""
    if not isinstance(h, Compose):
        return h
    out: list[Homeo] = []
    for p in h.parts:
        if out and (
            (isinstance(p, Inverse) and p.h is out[-1])
            or (isinstance(out[-1], Inverse) and out[-1].h is p)
        ):
            out.pop()
        else:
            out.append(p)
    if not out:
        return Identity(h.space)
    return out[0] if len(out) == 1 else Compose(*out)
