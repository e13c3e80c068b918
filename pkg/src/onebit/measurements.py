"""One-bit measurement maps and the distances built from them.

A measurement ensemble is a fixed batch of directions; the one-bit map of a
point records, per direction, which side of the normal hyperplane the point
falls on.  Hamming distance between two such sign patterns is the empirical
frequency of separating directions, which for uniform directions estimates
the normalized geodesic distance of the pair.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import DimensionMismatchError, EnsembleKindError, InvalidDimensionError
from .rng import substream
from .sphere import UNIT_NORM_TOL, PointSet, UnitVector, signs, uniform_sphere_rows

HALF_NORMAL_MEAN = math.sqrt(2.0 / math.pi)


class EnsembleKind(str, Enum):
    UNIFORM_SPHERE = "uniform-sphere"
    GAUSSIAN = "gaussian"


class MeasurementEnsemble:
    """Immutable batch of measurement directions with provenance.

    Attributes
    ----------
    directions : (m, n+1) ndarray, read-only
    kind : EnsembleKind
        Uniform-sphere rows are unit vectors; gaussian rows are standard
        normal draws.
    seed : int or None
        Seed the directions were derived from, or None for explicit arrays.

    An empty ensemble (m = 0) is allowed so that tessellation edge cases can
    be expressed; operations that need at least one direction validate this
    themselves.
    """

    __slots__ = ("directions", "kind", "seed")

    def __init__(self, directions: np.ndarray, kind: EnsembleKind, seed: int | None = None):
        arr = np.array(directions, dtype=float)
        if arr.ndim != 2 or arr.shape[1] < 2:
            raise InvalidDimensionError(
                f"directions must form an (m, n+1) array with n >= 1, got {arr.shape}"
            )
        if not np.all(np.isfinite(arr)):
            raise ValueError("directions must be finite")
        kind = EnsembleKind(kind)
        if kind is EnsembleKind.UNIFORM_SPHERE and arr.shape[0] > 0:
            norms = np.linalg.norm(arr, axis=1)
            worst = float(np.abs(norms - 1.0).max())
            if worst > UNIT_NORM_TOL:
                raise ValueError(
                    f"uniform-sphere directions must be unit rows: worst |norm - 1| = {worst:.3e}"
                )
        arr.flags.writeable = False
        self.directions = arr
        self.kind = kind
        self.seed = None if seed is None else int(seed)

    @classmethod
    def uniform(cls, n: int, m: int, seed: int) -> "MeasurementEnsemble":
        rng = substream(seed, "ensemble", EnsembleKind.UNIFORM_SPHERE.value)
        return cls(uniform_sphere_rows(n, m, rng), EnsembleKind.UNIFORM_SPHERE, seed)

    @classmethod
    def gaussian(cls, n: int, m: int, seed: int) -> "MeasurementEnsemble":
        if n < 1:
            raise InvalidDimensionError(f"sphere dimension must be >= 1, got {n}")
        if m < 0:
            raise ValueError("m must be nonnegative")
        rng = substream(seed, "ensemble", EnsembleKind.GAUSSIAN.value)
        return cls(rng.standard_normal((m, n + 1)), EnsembleKind.GAUSSIAN, seed)

    @property
    def m(self) -> int:
        return self.directions.shape[0]

    @property
    def ambient(self) -> int:
        return self.directions.shape[1]

    def prefix(self, m: int) -> "MeasurementEnsemble":
        """The sub-ensemble of the first m directions (nested ensembles)."""
        if not (0 <= m <= self.m):
            raise ValueError(f"prefix length must lie in [0, {self.m}], got {m}")
        return MeasurementEnsemble(self.directions[:m], self.kind, self.seed)

    def __len__(self):
        return self.m


class SignPattern:
    """Vector of one-bit measurements, entries in {-1, +1}."""

    __slots__ = ("bits",)

    def __init__(self, bits):
        arr = np.asarray(bits)
        if arr.ndim != 1:
            raise ValueError("sign pattern must be one-dimensional")
        if arr.size and not np.all(np.isin(arr, (-1, 1))):
            raise ValueError("sign pattern entries must be -1 or +1")
        arr = arr.astype(np.int8)
        arr.flags.writeable = False
        self.bits = arr

    def __len__(self):
        return self.bits.size

    def __eq__(self, other):
        if not isinstance(other, SignPattern):
            return NotImplemented
        return self.bits.size == other.bits.size and bool(np.all(self.bits == other.bits))

    def __hash__(self):
        return hash(self.bits.tobytes())

    def to_string(self) -> str:
        """Serialize as a '+'/'-' string, one character per measurement."""
        return "".join("+" if b > 0 else "-" for b in self.bits)

    @classmethod
    def from_string(cls, text: str) -> "SignPattern":
        lookup = {"+": 1, "-": -1}
        try:
            return cls([lookup[c] for c in text])
        except KeyError as exc:
            raise ValueError(f"invalid sign character {exc.args[0]!r}") from None

    def __repr__(self):
        return f"SignPattern({self.to_string()!r})"


def _check_point(ens: MeasurementEnsemble, *points: UnitVector):
    for p in points:
        if p.ambient != ens.ambient:
            raise DimensionMismatchError(
                f"point ambient dimension {p.ambient} != ensemble {ens.ambient}"
            )


def one_bit_map(ens: MeasurementEnsemble, x: UnitVector) -> SignPattern:
    """Signs of the inner products against every direction; sign(0) = +1."""
    _check_point(ens, x)
    return SignPattern(signs(ens.directions @ x.coords))


def sign_matrix(ens: MeasurementEnsemble, points: PointSet) -> np.ndarray:
    """(k, m) int8 matrix of one-bit measurements for every point row."""
    if points.ambient != ens.ambient:
        raise DimensionMismatchError(
            f"points ambient dimension {points.ambient} != ensemble {ens.ambient}"
        )
    return signs(points.points @ ens.directions.T)


def hamming_distance(p: SignPattern, q: SignPattern) -> float:
    """Fraction of disagreeing measurements; a pseudometric on patterns."""
    if len(p) != len(q):
        raise DimensionMismatchError(f"pattern lengths differ: {len(p)} != {len(q)}")
    if len(p) == 0:
        return 0.0
    return float(np.mean(p.bits != q.bits))


def conditional_metric_sq(ens: MeasurementEnsemble, x: UnitVector, y: UnitVector) -> float:
    """Empirical wedge frequency of the pair under the ensemble.

    This is the squared conditional metric of the symmetrized process and is
    bit-identical to the Hamming distance of the two one-bit maps.
    """
    _check_point(ens, x, y)
    return hamming_distance(one_bit_map(ens, x), one_bit_map(ens, y))


def linear_l1_distance(ens: MeasurementEnsemble, x: UnitVector, y: UnitVector) -> float:
    """Normalized l1 statistic (1 / (m sqrt(2/pi))) * sum_j |g_j . (x - y)|.

    Requires a gaussian ensemble; each summand then has expectation
    sqrt(2/pi) |x - y|_2, so the statistic is an unbiased estimator of the
    Euclidean distance of the pair.
    """
    if ens.kind is not EnsembleKind.GAUSSIAN:
        raise EnsembleKindError("linear l1 distance requires a gaussian ensemble")
    _check_point(ens, x, y)
    if ens.m == 0:
        raise ValueError("need at least one measurement")
    diff = x.coords - y.coords
    return float(np.abs(ens.directions @ diff).sum() / (ens.m * HALF_NORMAL_MEAN))


@dataclass(frozen=True)
class SignProductReport:
    """Centered sign-product statistic for one pair.

    ``statistic`` is (1/m) sum_j sign(x . g_j) (y . g_j) minus lam * (x . y),
    where ``lam`` = sqrt(2/pi) is the exact expectation factor, so the report
    value fluctuates around zero.
    """

    lam: float
    statistic: float
    m: int
    x: UnitVector
    y: UnitVector


def sign_product_statistic(
    ens: MeasurementEnsemble, x: UnitVector, y: UnitVector
) -> SignProductReport:
    """Centered estimator of lam * (x . y) from signed first measurements."""
    if ens.kind is not EnsembleKind.GAUSSIAN:
        raise EnsembleKindError("sign-product statistic requires a gaussian ensemble")
    _check_point(ens, x, y)
    if ens.m == 0:
        raise ValueError("need at least one measurement")
    px = ens.directions @ x.coords
    py = ens.directions @ y.coords
    raw = float(np.mean(np.where(px >= 0, 1.0, -1.0) * py))
    centered = raw - HALF_NORMAL_MEAN * float(x.coords @ y.coords)
    return SignProductReport(
        lam=HALF_NORMAL_MEAN, statistic=centered, m=ens.m, x=x, y=y
    )
