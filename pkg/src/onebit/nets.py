"""Packing and covering nets, cap shattering, and entropy estimates.

The central construction is randomized greedy packing: scan the points in a
seeded random order and keep every point further than delta from everything
kept so far.  The kept set is delta-separated by construction and, being
maximal, also covers the input at radius delta, so one run yields both a
packing lower estimate and a covering upper estimate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import FeasibilityError
from .sphere import PointSet, pairwise_geodesic

SHATTER_MAX_POINTS = 22
_CONSTRUCTIVE_ENUM_LIMIT = 12  # constructive per-dichotomy candidates up to 2^12 splits


@dataclass(frozen=True)
class NetReport:
    """Result of one greedy net construction at scale delta.

    ``packing_size`` lower-bounds the maximal delta-separated cardinality;
    ``covering_size`` upper-bounds the delta-covering number.  For greedy
    maximal packings the same centers serve both roles, so the two counts
    coincide; the sandwich inequality across scales is what makes the pair
    informative.
    """

    delta: float
    packing_size: int
    covering_size: int
    centers: PointSet
    center_indices: tuple[int, ...]


def greedy_packing(points: PointSet, delta: float, rng: np.random.Generator) -> NetReport:
    """Maximal delta-separated subset in a seeded random scan order.

    Separation is strict (pairwise distance > delta), so every rejected
    point is within delta of some center and the centers form a covering.
    Both properties are re-verified exhaustively before returning.
    """
    if not (0.0 < delta < 1.0):
        raise ValueError(f"delta must lie in (0, 1), got {delta}")
    k = len(points)
    order = rng.permutation(k)
    dist = points.pairwise_geodesic()
    available = np.ones(k, dtype=bool)
    kept: list[int] = []
    for idx in order:
        i = int(idx)
        if available[i]:
            kept.append(i)
            available &= dist[i] > delta
    kept_arr = np.array(kept, dtype=int)

    sub = dist[np.ix_(kept_arr, kept_arr)]
    off = sub[~np.eye(len(kept_arr), dtype=bool)]
    if off.size and off.min() <= delta:
        raise RuntimeError("greedy packing produced a non-separated set")
    cover_gap = dist[:, kept_arr].min(axis=1)
    if cover_gap.max() > delta:
        raise RuntimeError("greedy packing centers fail to cover the input")

    return NetReport(
        delta=float(delta),
        packing_size=len(kept),
        covering_size=len(kept),
        centers=points.subset(kept_arr),
        center_indices=tuple(int(i) for i in kept),
    )


def nearest_center_projection(point, centers: PointSet) -> int:
    """Index of the geodesically nearest center; ties resolve to the lowest index."""
    coords = np.asarray(point, dtype=float)
    dots = np.clip(centers.points @ coords, -1.0, 1.0)
    dist = np.arccos(dots) / math.pi
    return int(np.argmin(dist))


def first_uncovered_cover(dist: np.ndarray, radius: float) -> list[int]:
    """Greedy covering of a finite metric space given its distance matrix.

    Scans indices in order, opens a center at the first uncovered index, and
    marks everything within ``radius`` covered.  Deterministic given the
    matrix, which keeps covering-number curves reproducible.
    """
    k = dist.shape[0]
    uncovered = np.ones(k, dtype=bool)
    centers: list[int] = []
    while uncovered.any():
        c = int(np.flatnonzero(uncovered)[0])
        centers.append(c)
        uncovered &= dist[c] > radius
    return centers


def sandwich_check(points: PointSet, delta: float, rng: np.random.Generator) -> dict:
    """Packing/covering sandwich at scales delta and 2*delta.

    Checks |packing(2 delta)| <= |covering(delta)| <= |packing(delta)| using
    greedy constructions, where the covering is the one induced by the
    maximal delta-packing.
    """
    if not (0.0 < 2.0 * delta < 1.0):
        raise ValueError(f"need 0 < 2*delta < 1 for the sandwich, got delta={delta}")
    fine = greedy_packing(points, delta, rng)
    coarse = greedy_packing(points, 2.0 * delta, rng)
    ok = coarse.packing_size <= fine.covering_size <= fine.packing_size
    return {
        "delta": float(delta),
        "packing_2delta": coarse.packing_size,
        "covering_delta": fine.covering_size,
        "packing_delta": fine.packing_size,
        "ok": bool(ok),
    }


def sauer_bound(num_points: int, vc_dim: int) -> float:
    """Growth-function bound (num_points * e / vc_dim) ** vc_dim."""
    if num_points <= 1:
        raise ValueError("the bound needs num_points > 1")
    if vc_dim < 1:
        raise ValueError("vc_dim must be >= 1")
    return float((num_points * math.e / vc_dim) ** vc_dim)


@dataclass(frozen=True)
class VcReport:
    """Cap-shattering search outcome for one witness point set.

    ``shattered`` False means the search budget was exhausted before every
    dichotomy was realized, never that a dichotomy is impossible.
    """

    n: int
    witness_points: PointSet
    shattered: bool
    dichotomies_realized: int
    sauer_bound: float | None


def _register_direction(proj: np.ndarray, realized: np.ndarray, weights: np.ndarray):
    """Record every dichotomy realized by caps with this projection vector.

    Caps along a direction c are threshold sets {i : proj_i > t}; sweeping t
    through the sorted distinct projections enumerates all of them, and the
    reversed direction contributes the complementary prefixes.
    """
    order = np.argsort(proj, kind="stable")
    sorted_proj = proj[order]
    masks_bits = weights[order]
    suffix = np.cumsum(masks_bits[::-1])[::-1]  # suffix[i] = mask of {order[i:]}
    realized[0] = True  # empty cap (threshold above the maximum)
    for i in range(proj.size):
        if i == 0 or sorted_proj[i] != sorted_proj[i - 1]:
            realized[int(suffix[i])] = True  # cap {proj > sorted_proj[i-1]} etc.
            prefix_mask = int(suffix[0]) ^ int(suffix[i])
            realized[prefix_mask] = True  # same cut along the reversed direction


def _constructive_directions(points: np.ndarray):
    """Deterministic candidate directions tried before random search.

    Per-dichotomy candidates separate the two groups when the witness set is
    coordinate-like (standard basis vectors plus a diagonal direction): the
    indicator of one side, optionally with a heavily negative weight on the
    other side, followed by group-mean differences as a generic fallback.
    """
    k = points.shape[0]
    yield from points
    yield from -points
    for i in range(k):
        for j in range(i + 1, k):
            diff = points[i] - points[j]
            if np.linalg.norm(diff) > 0:
                yield diff
            s = points[i] + points[j]
            if np.linalg.norm(s) > 0:
                yield s
    if k > _CONSTRUCTIVE_ENUM_LIMIT:
        return
    penalty = 4.0 * k
    for mask in range(1, 2**k - 1):
        inside = np.array([(mask >> i) & 1 for i in range(k)], dtype=bool)
        mean_in = points[inside].mean(axis=0)
        mean_out = points[~inside].mean(axis=0)
        yield mean_in - mean_out
        yield points[inside].sum(axis=0) - penalty * points[~inside].sum(axis=0)


def shatter_check(
    points: PointSet, rng: np.random.Generator, budget: int = 100_000
) -> VcReport:
    """Search for spherical caps realizing every dichotomy of the points.

    Tries a deterministic constructive family first, then random directions,
    counting each candidate direction against ``budget``.  All threshold
    cuts of a candidate are registered at once, so a single direction can
    realize many dichotomies.
    """
    k = len(points)
    if k > SHATTER_MAX_POINTS:
        raise FeasibilityError(
            f"exhaustive dichotomy tracking supports at most {SHATTER_MAX_POINTS} points, got {k}"
        )
    if budget < 1:
        raise ValueError("budget must be >= 1")
    P = points.points
    weights = (1 << np.arange(k)).astype(np.int64)
    realized = np.zeros(2**k, dtype=bool)
    spent = 0
    for cand in _constructive_directions(P):
        if spent >= budget or realized.all():
            break
        _register_direction(P @ cand, realized, weights)
        spent += 1
    while spent < budget and not realized.all():
        batch = min(256, budget - spent)
        dirs = rng.standard_normal((batch, P.shape[1]))
        projections = dirs @ P.T
        for row in projections:
            _register_direction(row, realized, weights)
        spent += batch
    count = int(realized.sum())
    bound = sauer_bound(k, points.n + 1) if k > 1 else None
    return VcReport(
        n=points.n,
        witness_points=points,
        shattered=bool(realized.all()),
        dichotomies_realized=count,
        sauer_bound=bound,
    )


def canonical_witness(n: int) -> PointSet:
    """The n+1 point set {e_1, ..., e_n, ones/sqrt(n)} on the unit sphere of R^n."""
    if n < 2:
        raise ValueError("need n >= 2 for the canonical witness set")
    rows = np.eye(n)
    diag = np.ones((1, n)) / math.sqrt(n)
    return PointSet(np.vstack([rows, diag]))


@dataclass(frozen=True)
class VcEntropyReport:
    """Monte Carlo covering estimates of an indicator class in the d_P metric."""

    vc_dim: int
    class_kind: str
    class_size: int
    trials: int
    deltas: tuple[float, ...]
    covering_numbers: tuple[int, ...]
    ratios: tuple[float, ...]


def vc_entropy_check(
    vc_dim: int,
    deltas,
    sample: PointSet,
    trials: int,
    rng: np.random.Generator,
    class_kind: str = "wedge",
) -> VcEntropyReport:
    """Covering numbers of the wedge (or hemisphere) class over a sample.

    The probability metric d_P(C1, C2) = P(C1 symmetric-difference C2) is
    estimated by the disagreement frequency of indicator columns over
    ``trials`` uniform directions; covering numbers come from deterministic
    first-uncovered greedy passes.  Ratios are against the entropy envelope
    (delta / 2) ** (-4 vc_dim).
    """
    deltas = tuple(float(d) for d in deltas)
    if not deltas or any(not (0.0 < d < 1.0) for d in deltas):
        raise ValueError("deltas must be a nonempty list inside (0, 1)")
    if vc_dim < 1:
        raise ValueError("vc_dim must be >= 1")
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if class_kind not in ("wedge", "hemisphere"):
        raise ValueError(f"unknown class kind {class_kind!r}")

    thetas = rng.standard_normal((trials, sample.ambient))
    norms = np.linalg.norm(thetas, axis=1, keepdims=True)
    norms[norms == 0.0] = 1.0
    thetas /= norms
    hemi = thetas @ sample.points.T >= 0  # (trials, k)

    if class_kind == "hemisphere":
        cols = hemi
    else:
        k = len(sample)
        i_idx, j_idx = np.triu_indices(k, 1)
        cols = hemi[:, i_idx] ^ hemi[:, j_idx]
    if cols.shape[1] == 0:
        raise ValueError("sample is too small to induce any class member")

    count = cols.shape[1]

    def dist_from(c):
        return np.mean(cols != cols[:, c : c + 1], axis=0)

    coverings = []
    for delta in deltas:
        uncovered = np.ones(count, dtype=bool)
        centers = 0
        while uncovered.any():
            c = int(np.flatnonzero(uncovered)[0])
            centers += 1
            uncovered &= dist_from(c) > delta
        coverings.append(centers)
    ratios = tuple(
        coverings[i] * (deltas[i] / 2.0) ** (4 * vc_dim) for i in range(len(deltas))
    )
    return VcEntropyReport(
        vc_dim=int(vc_dim),
        class_kind=class_kind,
        class_size=count,
        trials=int(trials),
        deltas=deltas,
        covering_numbers=tuple(int(c) for c in coverings),
        ratios=ratios,
    )
