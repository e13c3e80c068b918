"""Sphere geometry: points, arcs, samplers, and hyperplane crossings.

Conventions used throughout the package:

* a point of S^n is a unit vector in R^(n+1), so ``n`` always denotes the
  sphere dimension and ``n + 1`` the ambient dimension;
* distances are normalized geodesic distances, arccos of the inner product
  divided by pi, so antipodal points sit at distance exactly 1;
* the sign of 0 is +1 everywhere a sign is taken.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import (
    DegenerateGeodesicError,
    DimensionMismatchError,
    InvalidDimensionError,
    NotSeparatingError,
)

UNIT_NORM_TOL = 1e-9
ANTIPODAL_TOL = 1e-12
BISECTION_TOL = 1e-12

_MAX_REJECTION_ATTEMPTS = 10_000


class UnitVector:
    """A point on S^n, validated to unit length.

    Parameters
    ----------
    coords : array_like
        Ambient coordinates, at least two of them.  The Euclidean norm must
        equal 1 within ``UNIT_NORM_TOL``; use :meth:`normalized` to project
        an arbitrary nonzero vector onto the sphere first.
    """

    __slots__ = ("coords",)

    def __init__(self, coords):
        arr = np.array(coords, dtype=float)
        if arr.ndim != 1 or arr.size < 2:
            raise InvalidDimensionError(
                f"a sphere point needs at least 2 coordinates, got shape {arr.shape}"
            )
        if not np.all(np.isfinite(arr)):
            raise ValueError("sphere point coordinates must be finite")
        norm = float(np.linalg.norm(arr))
        if abs(norm - 1.0) > UNIT_NORM_TOL:
            raise ValueError(f"not a unit vector: |norm - 1| = {abs(norm - 1.0):.3e}")
        arr.flags.writeable = False
        object.__setattr__(self, "coords", arr)

    @classmethod
    def normalized(cls, coords) -> "UnitVector":
        arr = np.asarray(coords, dtype=float)
        norm = np.linalg.norm(arr)
        if norm == 0.0 or not np.isfinite(norm):
            raise ValueError("cannot normalize a zero or non-finite vector")
        return cls(arr / norm)

    @property
    def ambient(self) -> int:
        return self.coords.size

    @property
    def n(self) -> int:
        """Sphere dimension (ambient dimension minus 1)."""
        return self.coords.size - 1

    def __array__(self, dtype=None, copy=None):
        if dtype is not None:
            return self.coords.astype(dtype)
        return self.coords

    def __repr__(self):
        return f"UnitVector(dim={self.n}, coords={np.array2string(self.coords, precision=4)})"


@dataclass(frozen=True)
class SparseSpec:
    """Sparsity regime: s-sparse (or l1-constrained) unit vectors in R^(n+1).

    ``n`` is the sphere dimension, ``s`` the sparsity level; 0 < s < n + 1.
    """

    n: int
    s: int

    def __post_init__(self):
        if not isinstance(self.n, (int, np.integer)) or not isinstance(self.s, (int, np.integer)):
            raise ValueError("SparseSpec fields must be integers")
        if self.n < 1:
            raise InvalidDimensionError(f"sphere dimension must be >= 1, got {self.n}")
        if not (0 < self.s < self.n + 1):
            raise ValueError(f"need 0 < s < n + 1, got s={self.s}, n={self.n}")

    @property
    def ambient(self) -> int:
        return self.n + 1


class GeneratorTag(str, Enum):
    SPARSE = "sparse"
    CONVEX_SPARSE = "convex-sparse"
    UNIFORM = "uniform"
    EXPLICIT = "explicit"


def _check_same_ambient(*arrs):
    sizes = {a.shape[-1] for a in arrs}
    if len(sizes) != 1:
        raise DimensionMismatchError(f"mixed ambient dimensions: {sorted(sizes)}")


def geodesic_distance(x: UnitVector, y: UnitVector) -> float:
    """Normalized geodesic distance in [0, 1]; antipodal pairs map to 1."""
    _check_same_ambient(x.coords, y.coords)
    dot = float(np.clip(x.coords @ y.coords, -1.0, 1.0))
    return math.acos(dot) / math.pi


def pairwise_geodesic(points: np.ndarray) -> np.ndarray:
    """Normalized geodesic distance matrix for rows of a (k, n+1) array.

    The diagonal is set to exactly 0 so downstream covariance constructions
    see the identity d(x, x) = 0 without arccos roundoff.
    """
    gram = np.clip(points @ points.T, -1.0, 1.0)
    dist = np.arccos(gram) / np.pi
    np.fill_diagonal(dist, 0.0)
    return dist


# --- samplers ---------------------------------------------------------------


def sample_gaussian_vector(n: int, rng: np.random.Generator) -> np.ndarray:
    """Standard gaussian vector in R^(n+1)."""
    if n < 1:
        raise InvalidDimensionError(f"sphere dimension must be >= 1, got {n}")
    return rng.standard_normal(n + 1)


def sample_uniform_sphere(n: int, rng: np.random.Generator) -> UnitVector:
    """Uniform point of S^n (normalized gaussian)."""
    if n < 1:
        raise InvalidDimensionError(f"sphere dimension must be >= 1, got {n}")
    while True:
        g = rng.standard_normal(n + 1)
        norm = np.linalg.norm(g)
        if norm > 0:
            return UnitVector(g / norm)


def uniform_sphere_rows(n: int, count: int, rng: np.random.Generator) -> np.ndarray:
    """(count, n+1) array of independent uniform points of S^n."""
    if n < 1:
        raise InvalidDimensionError(f"sphere dimension must be >= 1, got {n}")
    if count < 0:
        raise ValueError("count must be nonnegative")
    g = rng.standard_normal((count, n + 1))
    norms = np.linalg.norm(g, axis=1, keepdims=True)
    # resample any zero-norm rows; probability zero but keeps the map total
    bad = np.flatnonzero(norms[:, 0] == 0.0)
    for i in bad:
        g[i] = rng.standard_normal(n + 1)
        norms[i, 0] = np.linalg.norm(g[i])
    return g / norms


def sample_sparse_unit(spec: SparseSpec, rng: np.random.Generator) -> UnitVector:
    """Uniform s-sparse unit vector: uniform support, uniform subsphere direction.

    Exactly ``spec.s`` coordinates are nonzero.
    """
    support = rng.choice(spec.ambient, size=spec.s, replace=False)
    while True:
        g = rng.standard_normal(spec.s)
        norm = np.linalg.norm(g)
        if norm > 0 and np.all(g != 0.0):
            break
    out = np.zeros(spec.ambient)
    out[support] = g / norm
    return UnitVector(out)


def sample_convex_sparse(spec: SparseSpec, rng: np.random.Generator) -> UnitVector:
    """Sample from the l1-constrained spherical set {|x|_2 = 1, |x|_1 <= s}.

    Mixture sampler: with probability 1/2 draw a k-sparse unit vector with a
    uniformly random k <= floor(s^2) and rejection on the l1 constraint, and
    with probability 1/2 draw a dense direction inside a uniformly random
    floor(s^2)-coordinate subspace, again rejecting until |x|_1 <= s.  Both
    routes terminate quickly because k = 1 is always feasible and a dense
    direction in a d-dimensional subspace has expected l1 norm about
    sqrt(2 d / pi) < s for d = s^2.
    """
    k_cap = min(int(spec.s) * int(spec.s), spec.ambient)
    for _ in range(_MAX_REJECTION_ATTEMPTS):
        if rng.random() < 0.5:
            k = int(rng.integers(1, k_cap + 1))
        else:
            k = k_cap
        support = rng.choice(spec.ambient, size=k, replace=False)
        g = rng.standard_normal(k)
        norm = np.linalg.norm(g)
        if norm == 0.0:
            continue
        g /= norm
        if np.abs(g).sum() <= spec.s:
            out = np.zeros(spec.ambient)
            out[support] = g
            return UnitVector(out)
    raise RuntimeError("rejection sampler failed to produce an admissible point")


def in_sparse_set(x: UnitVector, spec: SparseSpec) -> bool:
    """Membership in the s-sparse unit sphere (at most s nonzero coordinates)."""
    if x.ambient != spec.ambient:
        raise DimensionMismatchError(
            f"point has ambient dimension {x.ambient}, spec expects {spec.ambient}"
        )
    return int(np.count_nonzero(x.coords)) <= spec.s


def in_convex_sparse_set(x: UnitVector, spec: SparseSpec, tol: float = 1e-9) -> bool:
    """Membership in {|x|_2 = 1, |x|_1 <= s} within tolerance."""
    if x.ambient != spec.ambient:
        raise DimensionMismatchError(
            f"point has ambient dimension {x.ambient}, spec expects {spec.ambient}"
        )
    return float(np.abs(x.coords).sum()) <= spec.s + tol


# --- point sets --------------------------------------------------------------


class PointSet:
    """A finite collection of sphere points stored as rows, with a generator tag."""

    __slots__ = ("points", "generator")

    def __init__(self, points: np.ndarray, generator: GeneratorTag = GeneratorTag.EXPLICIT):
        arr = np.array(points, dtype=float)
        if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 2:
            raise ValueError(f"need a nonempty (k, n+1) array with n >= 1, got {arr.shape}")
        norms = np.linalg.norm(arr, axis=1)
        worst = float(np.abs(norms - 1.0).max())
        if worst > UNIT_NORM_TOL:
            raise ValueError(f"rows must be unit vectors: worst |norm - 1| = {worst:.3e}")
        arr.flags.writeable = False
        self.points = arr
        self.generator = GeneratorTag(generator)

    def __len__(self):
        return self.points.shape[0]

    @property
    def ambient(self) -> int:
        return self.points.shape[1]

    @property
    def n(self) -> int:
        return self.points.shape[1] - 1

    def unit(self, i: int) -> UnitVector:
        return UnitVector(self.points[i])

    def subset(self, indices) -> "PointSet":
        return PointSet(self.points[np.asarray(indices, dtype=int)], self.generator)

    def pairwise_geodesic(self) -> np.ndarray:
        return pairwise_geodesic(self.points)

    @classmethod
    def uniform(cls, n: int, count: int, rng: np.random.Generator) -> "PointSet":
        if count < 1:
            raise ValueError("count must be >= 1")
        return cls(uniform_sphere_rows(n, count, rng), GeneratorTag.UNIFORM)

    @classmethod
    def sparse(cls, spec: SparseSpec, count: int, rng: np.random.Generator) -> "PointSet":
        if count < 1:
            raise ValueError("count must be >= 1")
        rows = np.stack([sample_sparse_unit(spec, rng).coords for _ in range(count)])
        return cls(rows, GeneratorTag.SPARSE)

    @classmethod
    def convex_sparse(cls, spec: SparseSpec, count: int, rng: np.random.Generator) -> "PointSet":
        if count < 1:
            raise ValueError("count must be >= 1")
        rows = np.stack([sample_convex_sparse(spec, rng).coords for _ in range(count)])
        return cls(rows, GeneratorTag.CONVEX_SPARSE)


def sparse_net(
    spec: SparseSpec,
    size: int,
    rng: np.random.Generator,
    close_pairs: int = 10,
    close_scale: float = 0.05,
) -> PointSet:
    """Finite stand-in for the s-sparse sphere used by sup-over-pairs checks.

    Draws ``size`` independent s-sparse points, then appends one companion
    per nearest pair (``close_pairs`` of them): a small in-support tangent
    perturbation of one endpoint.  Companions stay inside the s-sparse set
    and guarantee the net exercises small geodesic distances, where relative
    distortion checks are hardest.
    """
    base = PointSet.sparse(spec, size, rng)
    if close_pairs <= 0:
        return base
    dist = base.pairwise_geodesic()
    np.fill_diagonal(dist, 2.0)
    order = np.argsort(dist, axis=None)
    chosen: list[int] = []
    seen: set[tuple[int, int]] = set()
    for flat in order:
        i, j = np.unravel_index(flat, dist.shape)
        key = (min(i, j), max(i, j))
        if key in seen:
            continue
        seen.add(key)
        chosen.append(int(i))
        if len(chosen) >= close_pairs:
            break
    extras = []
    for idx in chosen:
        x = base.points[idx]
        support = np.flatnonzero(x)
        t = rng.standard_normal(support.size)
        local = x[support]
        t -= (t @ local) * local  # tangent within the support subsphere
        perturbed = local + close_scale * t
        perturbed /= np.linalg.norm(perturbed)
        row = np.zeros_like(x)
        row[support] = perturbed
        extras.append(row)
    rows = np.vstack([base.points, np.stack(extras)])
    return PointSet(rows, GeneratorTag.SPARSE)


# --- wedges and geodesics ----------------------------------------------------


def signs(values: np.ndarray) -> np.ndarray:
    """Elementwise sign with sign(0) = +1, as int8."""
    return np.where(np.asarray(values) >= 0, 1, -1).astype(np.int8)


def in_wedge(theta: UnitVector, x: UnitVector, y: UnitVector) -> bool:
    """True when the hyperplane normal to theta separates x from y.

    Membership is a sign disagreement of the two inner products, with the
    sign of 0 taken as +1, so tangent hyperplanes count as non-separating.
    """
    _check_same_ambient(theta.coords, x.coords, y.coords)
    a = float(theta.coords @ x.coords)
    b = float(theta.coords @ y.coords)
    return (a >= 0) != (b >= 0)


def wedge_mask(thetas: np.ndarray, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Vectorized wedge membership for direction rows."""
    thetas = np.asarray(thetas, dtype=float)
    _check_same_ambient(thetas, np.asarray(x), np.asarray(y))
    return (thetas @ np.asarray(x) >= 0) != (thetas @ np.asarray(y) >= 0)


@dataclass(frozen=True, eq=False)
class Geodesic:
    """Minimal great-circle arc between two non-antipodal, distinct points."""

    x: UnitVector
    y: UnitVector
    angle: float = 0.0

    def __post_init__(self):
        _check_same_ambient(self.x.coords, self.y.coords)
        dot = float(np.clip(self.x.coords @ self.y.coords, -1.0, 1.0))
        if abs(dot) >= 1.0 - ANTIPODAL_TOL:
            raise DegenerateGeodesicError(
                "endpoints are equal or antipodal; the arc is not unique"
            )
        object.__setattr__(self, "angle", math.acos(dot))

    @property
    def length(self) -> float:
        """Normalized geodesic length, equal to angle / pi."""
        return self.angle / math.pi


def geodesic_point(geo: Geodesic, t: float) -> UnitVector:
    """Constant-speed parametrization of the arc; t in [0, 1]."""
    if not (0.0 <= t <= 1.0):
        raise ValueError(f"t must lie in [0, 1], got {t}")
    a = geo.angle
    s = math.sin(a)
    coords = (math.sin((1.0 - t) * a) * geo.x.coords + math.sin(t * a) * geo.y.coords) / s
    return UnitVector.normalized(coords)


def _tangent_component(geo: Geodesic, theta: np.ndarray, t) -> np.ndarray:
    """theta . gamma'(t) / |gamma'(t)| for the constant-speed parametrization.

    gamma'(t) = (-a cos((1-t)a) x + a cos(ta) y) / sin(a) has norm a, so the
    normalized tangent component is the bracket divided by sin(a).
    """
    a = geo.angle
    ax = theta @ geo.x.coords
    ay = theta @ geo.y.coords
    return (-np.cos((1.0 - t) * a) * ax + np.cos(t * a) * ay) / math.sin(a)


def _bisect_crossing(f, fa, tol=BISECTION_TOL):
    """Bisection for the sign change of f on [0, 1]; fa = f(0)."""
    lo, hi = 0.0, 1.0
    sign_lo = fa >= 0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if (fm >= 0) == sign_lo:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def transversal_separation(theta: UnitVector, x: UnitVector, y: UnitVector) -> bool:
    """Does the hyperplane normal to theta cut the arc x..y transversally?

    The crossing must make an angle of at least pi/4 with the arc and sit at
    geodesic distance at least d(x, y) / 4 from both endpoints.  Raises
    :class:`NotSeparatingError` when theta is not in the wedge of the pair,
    and :class:`DegenerateGeodesicError` when the arc itself is degenerate.
    """
    geo = Geodesic(x, y)
    if not in_wedge(theta, x, y):
        raise NotSeparatingError("direction does not separate the pair")
    th = theta.coords
    fa = float(th @ x.coords)
    fb = float(th @ y.coords)
    if fa == 0.0 or fb == 0.0:
        # crossing at an endpoint: the distance condition cannot hold
        return False

    def f(t):
        a = geo.angle
        return (math.sin((1.0 - t) * a) * fa + math.sin(t * a) * fb) / math.sin(a)

    t_star = _bisect_crossing(f, fa)
    z = geodesic_point(geo, t_star)
    d_xy = geodesic_distance(x, y)
    d_min = min(geodesic_distance(z, x), geodesic_distance(z, y))
    if d_min < d_xy / 4.0:
        return False
    sin_angle = abs(float(_tangent_component(geo, th, t_star)))
    angle = math.asin(min(1.0, sin_angle))
    return angle >= math.pi / 4.0


def transversal_mask(thetas: np.ndarray, x: UnitVector, y: UnitVector) -> np.ndarray:
    """Vectorized transversal separation over direction rows.

    Directions outside the wedge are reported False rather than raising,
    which is the convention Monte Carlo frequency estimates need.  The
    crossing solver is the same interval bisection as the scalar routine,
    run on all wedge members simultaneously.
    """
    geo = Geodesic(x, y)
    thetas = np.asarray(thetas, dtype=float)
    _check_same_ambient(thetas, x.coords, y.coords)
    fa = thetas @ x.coords
    fb = thetas @ y.coords
    mask = (fa >= 0) != (fb >= 0)
    out = np.zeros(thetas.shape[0], dtype=bool)
    if not mask.any():
        return out
    fa = fa[mask]
    fb = fb[mask]
    a = geo.angle
    sin_a = math.sin(a)
    endpoint = (fa == 0.0) | (fb == 0.0)

    lo = np.zeros_like(fa)
    hi = np.ones_like(fa)
    sign_lo = fa >= 0
    steps = int(math.ceil(-math.log2(BISECTION_TOL)))
    for _ in range(steps):
        mid = 0.5 * (lo + hi)
        fm = (np.sin((1.0 - mid) * a) * fa + np.sin(mid * a) * fb) / sin_a
        go_right = (fm >= 0) == sign_lo
        lo = np.where(go_right, mid, lo)
        hi = np.where(go_right, hi, mid)
    t_star = 0.5 * (lo + hi)

    # distance condition: constant-speed parametrization puts the crossing at
    # arc fraction t_star, so both endpoint distances are fractions of d(x,y)
    span = np.minimum(t_star, 1.0 - t_star) * geo.length
    far_enough = span >= geo.length / 4.0

    tangent = (-np.cos((1.0 - t_star) * a) * fa + np.cos(t_star * a) * fb) / sin_a
    steep_enough = np.arcsin(np.minimum(1.0, np.abs(tangent))) >= math.pi / 4.0

    out[np.flatnonzero(mask)] = far_enough & steep_enough & ~endpoint
    return out
