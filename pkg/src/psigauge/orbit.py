"""Orbit closure on the Bloch sphere: grow a point cloud by rotating every
point about other points' axes, measure how fast the generated set fills the
sphere.

Points are unit 3-vectors. Each growth step is quadratic in the cloud size
before budgeting, so candidate generation is capped and subsampled with a
seeded generator; dedup uses a coarse grid pass followed by an exact
KD-tree pass so steps stay near-linear in the candidate count.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree

from ._geometry import rodrigues_rotate


@dataclass(frozen=True)
class OrbitCloud:
    points: np.ndarray  # (n, 3) unit vectors
    generation: int
    dedup_tolerance: float

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim != 2 or pts.shape[1] != 3:
            raise ValueError(f"expected an (n, 3) array, got shape {pts.shape}")
        norms = np.linalg.norm(pts, axis=1)
        if pts.shape[0] and (np.abs(norms - 1.0) > 1e-9).any():
            raise ValueError("cloud contains non-unit vectors")
        pts.flags.writeable = False
        object.__setattr__(self, "points", pts)

    @property
    def size(self) -> int:
        return self.points.shape[0]


@dataclass(frozen=True)
class CoverageTrajectory:
    steps: int | None  # first generation reaching the target, None if not reached
    reached: bool
    trajectory: tuple  # ((generation, cloud_size, coverage), ...)


def _chord(angular_tol: float) -> float:
    # Euclidean distance corresponding to an angular separation
    return 2.0 * np.sin(angular_tol / 2.0)


def _dedup(points: np.ndarray, tol: float) -> np.ndarray:
    """Keep earliest representatives of clusters closer than the angular tol.

    Pass 1 snaps points to a grid with cells small enough that cell-mates are
    always within tol (cell diagonal = chord). Pass 2 resolves neighbors that
    pass 1 put in different cells.
    """
    if points.shape[0] == 0:
        return points
    chord = _chord(tol)
    cell = chord / np.sqrt(3.0)
    keys = np.floor(points / cell).astype(np.int64)
    # stable first-occurrence per cell
    _, first = np.unique(keys, axis=0, return_index=True)
    reps = points[np.sort(first)]
    tree = cKDTree(reps)
    keep = np.ones(reps.shape[0], dtype=bool)
    for i, neighbors in enumerate(tree.query_ball_point(reps, chord)):
        if not keep[i]:
            continue
        for j in neighbors:
            if j > i:
                keep[j] = False
    return reps[keep]


def initial_cloud(theta: float, dedup_tolerance: float = 0.02) -> OrbitCloud:
    """Two points separated by the angle theta: the pole and a point tilted
    by theta in the xz-plane."""
    if not 0.0 < theta <= np.pi:
        raise ValueError(f"theta must lie in (0, pi], got {theta}")
    if theta <= dedup_tolerance:
        raise ValueError(
            f"theta {theta} does not exceed the dedup tolerance {dedup_tolerance};"
            " the two seed points would merge"
        )
    pts = np.array([[0.0, 0.0, 1.0], [np.sin(theta), 0.0, np.cos(theta)]])
    return OrbitCloud(pts, 0, dedup_tolerance)


def orbit_step(
    cloud: OrbitCloud,
    rotations_per_pair: int = 24,
    seed: int = 0,
    max_candidates: int = 200_000,
    point_cap: int = 100_000,
) -> OrbitCloud:
    """One closure step: rotate points about other points' axes.

    For each selected (point, axis) pair, ``rotations_per_pair`` evenly
    spaced angles (offset by half a step so the identity rotation is never
    wasted) produce candidates. When the full quadratic pair set exceeds
    ``max_candidates`` candidates, pairs are subsampled with a generator
    seeded by ``seed``; the grown cloud is likewise thinned to
    ``point_cap``. Existing points always survive dedup because they are
    listed first.
    """
    if rotations_per_pair < 4:
        raise ValueError(f"rotations per pair must be >= 4, got {rotations_per_pair}")
    n = cloud.size
    if n == 0:
        return OrbitCloud(cloud.points, cloud.generation + 1, cloud.dedup_tolerance)
    rng = np.random.default_rng(seed)
    angles = 2.0 * np.pi * (np.arange(rotations_per_pair) + 0.5) / rotations_per_pair

    pair_budget = max(1, max_candidates // rotations_per_pair)
    if n * (n - 1) <= pair_budget:
        idx_i, idx_j = np.nonzero(~np.eye(n, dtype=bool))
    else:
        idx_i = rng.integers(0, n, size=pair_budget)
        # j != i, uniform over the other points
        idx_j = (idx_i + rng.integers(1, n, size=pair_budget)) % n

    vectors = cloud.points[idx_i][:, None, :]  # (p, 1, 3)
    axes = cloud.points[idx_j][:, None, :]
    rotated = rodrigues_rotate(vectors, axes, angles[None, :])  # (p, R, 3)
    candidates = rotated.reshape(-1, 3)
    candidates /= np.linalg.norm(candidates, axis=1, keepdims=True)

    merged = np.concatenate([cloud.points, candidates], axis=0)
    deduped = _dedup(merged, cloud.dedup_tolerance)
    if deduped.shape[0] > point_cap:
        pick = rng.choice(deduped.shape[0], size=point_cap, replace=False)
        deduped = deduped[np.sort(pick)]
    return OrbitCloud(deduped, cloud.generation + 1, cloud.dedup_tolerance)


def coverage(cloud: OrbitCloud, grid_size: int, angular_tol: float) -> float:
    """Fraction of a reference Fibonacci grid within angular_tol of the cloud."""
    from ._geometry import fibonacci_sphere

    if grid_size < 100:
        raise ValueError(f"grid size must be >= 100, got {grid_size}")
    if cloud.size == 0:
        return 0.0
    grid = fibonacci_sphere(grid_size)
    tree = cKDTree(cloud.points)
    dist, _ = tree.query(grid, k=1)
    return float(np.mean(dist <= _chord(angular_tol)))


def steps_to_cover(
    theta: float,
    target_coverage: float,
    angular_tol: float,
    seed: int = 0,
    rotations_per_pair: int = 24,
    dedup_tolerance: float = 0.02,
    grid_size: int = 4000,
    max_steps: int = 30,
    max_candidates: int = 200_000,
    point_cap: int = 100_000,
) -> CoverageTrajectory:
    """Grow the two-point seed cloud until the coverage target is reached.

    Returns the full (generation, size, coverage) trajectory; ``steps`` is
    the first generation at or above the target, or None if it is not hit
    within ``max_steps``. Step k uses seed + k so trajectories are
    reproducible per step.
    """
    if not 0.0 < target_coverage <= 1.0:
        raise ValueError(f"target coverage must lie in (0, 1], got {target_coverage}")
    cloud = initial_cloud(theta, dedup_tolerance)
    rows = []
    cov = coverage(cloud, grid_size, angular_tol)
    rows.append((0, cloud.size, cov))
    if cov >= target_coverage:
        return CoverageTrajectory(0, True, tuple(rows))
    for k in range(1, max_steps + 1):
        cloud = orbit_step(
            cloud,
            rotations_per_pair=rotations_per_pair,
            seed=seed + k,
            max_candidates=max_candidates,
            point_cap=point_cap,
        )
        cov = coverage(cloud, grid_size, angular_tol)
        rows.append((k, cloud.size, cov))
        if cov >= target_coverage:
            return CoverageTrajectory(k, True, tuple(rows))
    return CoverageTrajectory(None, False, tuple(rows))
