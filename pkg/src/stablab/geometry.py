"""Phase spaces, points, flat wrap-around metrics and samplers.

Points are handled internally as numpy arrays of shape ``(n, d)`` (or ``(d,)``
for a single point) with coordinates in ``[0, 1)``.  The :class:`Point` value
type exists for validated single points and JSON round trips.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

# all point equality tests go through this tolerance, never raw coordinates
POINT_TOL = 1e-12


class PhaseSpace(enum.Enum):
    CIRCLE = "Circle"
    TORUS2 = "Torus2"
    CIRCLE_TIMES_TORUS2 = "CircleTimesTorus2"

    @property
    def kind(self) -> str:
        return self.value

    @property
    def dimension(self) -> int:
        return {"Circle": 1, "Torus2": 2, "CircleTimesTorus2": 3}[self.value]

    @property
    def diameter(self) -> float:
        return 0.5 if self is PhaseSpace.CIRCLE else math.sqrt(0.5)

    @classmethod
    def from_kind(cls, kind: str) -> "PhaseSpace":
        for space in cls:
            if space.value == kind:
                return space
        raise ValueError(f"unknown phase space {kind!r}")


@dataclass(frozen=True)
class Point:
    """A single point in canonical coordinates."""

    coords: tuple[float, ...]

    def __post_init__(self):
        coords = tuple(float(c) for c in self.coords)
        if not 1 <= len(coords) <= 3:
            raise ValueError("a point has 1, 2 or 3 coordinates")
        for c in coords:
            if not (0.0 <= c < 1.0):
                raise ValueError(f"coordinate {c} outside [0, 1)")
        object.__setattr__(self, "coords", coords)

    @classmethod
    def of(cls, *coords: float) -> "Point":
        """Build a point from arbitrary reals, wrapping each coordinate."""
        return cls(tuple(wrap(c) for c in coords))

    @property
    def space(self) -> PhaseSpace:
        return {1: PhaseSpace.CIRCLE, 2: PhaseSpace.TORUS2, 3: PhaseSpace.CIRCLE_TIMES_TORUS2}[
            len(self.coords)
        ]

    def to_json(self) -> list[float]:
        return list(self.coords)

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.coords, dtype=dtype or float)


def wrap(c):
    """Canonical representative of ``c`` modulo 1, in ``[0, 1)``.

    Works on scalars and arrays.  ``np.mod`` can return exactly 1.0 for tiny
    negative inputs, which is folded back to 0.
    """
    arr = np.asarray(c, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise ValueError("non-finite coordinate")
    out = np.mod(arr, 1.0)
    out = np.where(out >= 1.0, 0.0, out)
    if np.ndim(c) == 0:
        return float(out)
    return out


def wrap_diff(d):
    """Signed wrapped difference in ``[-0.5, 0.5)``."""
    d = np.asarray(d, dtype=float)
    return d - np.floor(d + 0.5)


def as_points(x, space: PhaseSpace | None = None) -> np.ndarray:
    """Coerce a Point, a sequence of Points or an array to shape ``(n, d)``."""
    if isinstance(x, Point):
        arr = np.asarray(x.coords, dtype=float)[None, :]
    elif isinstance(x, (list, tuple)) and x and isinstance(x[0], Point):
        arr = np.array([p.coords for p in x], dtype=float)
    else:
        arr = np.asarray(x, dtype=float)
        if arr.ndim == 0:
            arr = arr.reshape(1, 1)
        elif arr.ndim == 1:
            if space is not None and space.dimension == 1:
                arr = arr[:, None]
            else:
                arr = arr[None, :]
    if space is not None and arr.shape[-1] != space.dimension:
        raise ValueError("space mismatch")
    return arr


def _factor_norms(delta: np.ndarray, dim: int) -> np.ndarray:
    if dim == 1:
        return np.abs(delta[..., 0])
    if dim == 2:
        return np.hypot(delta[..., 0], delta[..., 1])
    return np.maximum(np.abs(delta[..., 0]), np.hypot(delta[..., 1], delta[..., 2]))


def distances(x, y, dim: int | None = None) -> np.ndarray:
    """Vectorised flat quotient distance between point arrays of equal shape."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape[-1:] != y.shape[-1:]:
        raise ValueError("space mismatch")
    dim = x.shape[-1] if dim is None else dim
    d = np.abs(x - y) % 1.0
    d = np.minimum(d, 1.0 - d)
    return _factor_norms(d, dim)


def distance(space: PhaseSpace, x, y) -> float:
    """Distance between two single points of ``space``."""
    xa = as_points(x)
    ya = as_points(y)
    if xa.shape[-1] != space.dimension or ya.shape[-1] != space.dimension:
        raise ValueError("space mismatch")
    return float(distances(xa, ya)[0])


@dataclass(frozen=True)
class UniformGrid:
    resolution: int

    def to_json(self) -> dict:
        return {"scheme": "UniformGrid", "resolution": self.resolution}


@dataclass(frozen=True)
class RandomUniform:
    count: int
    seed: int = 0

    def to_json(self) -> dict:
        return {"scheme": "RandomUniform", "count": self.count, "seed": self.seed}


Sampler = UniformGrid | RandomUniform


def sample(space: PhaseSpace, sampler: Sampler) -> np.ndarray:
    """Deterministic sample of ``space`` as an ``(n, d)`` array."""
    d = space.dimension
    if isinstance(sampler, UniformGrid):
        r = int(sampler.resolution)
        if r < 1:
            raise ValueError("empty sampler")
        axes = [np.arange(r) / r] * d
        mesh = np.meshgrid(*axes, indexing="ij")
        return np.stack([m.ravel() for m in mesh], axis=-1)
    if isinstance(sampler, RandomUniform):
        if sampler.count < 1:
            raise ValueError("empty sampler")
        rng = np.random.default_rng(sampler.seed)
        return wrap(rng.random((sampler.count, d)))
    raise TypeError(f"unknown sampler {sampler!r}")


def sample_points(space: PhaseSpace, sampler: Sampler) -> list[Point]:
    return [Point(tuple(row)) for row in sample(space, sampler)]
