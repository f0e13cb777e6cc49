"""Partitions of [0,1], discretized trajectories and their weighted step-function
L2 geometry.

A path observed at grid points t_1 < ... < t_p embeds into the vector
(|D_1|^(1/2) Z(t_1), ..., |D_p|^(1/2) Z(t_p)) with D_i = (t_{i-1}, t_i], so that
the L2 distance between two step-function interpolants equals the Euclidean
distance of the embedded vectors.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

__all__ = [
    "Partition",
    "Trajectory",
    "WeightedVector",
    "PairedSample",
    "uniform_partition",
    "embed",
    "step_l2_distance",
    "write_trajectories_csv",
    "read_trajectories_csv",
    "write_pair_csv",
    "read_pair_csv",
]


@dataclass(frozen=True)
class Partition:
    """Grid 0 = t_0 < t_1 < ... < t_p = 1 with interval weights |D_i| = t_i - t_{i-1}."""

    points: np.ndarray

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        object.__setattr__(self, "points", pts)
        if pts.ndim != 1 or pts.size < 2:
            raise ValueError("partition needs at least the two endpoints 0 and 1")
        if not np.all(np.isfinite(pts)):
            raise ValueError("partition points must be finite")
        if pts[0] != 0.0 or pts[-1] != 1.0:
            raise ValueError("partition must start at 0 and end at 1")
        if np.any(np.diff(pts) <= 0):
            raise ValueError("partition points must be strictly increasing")
        weights = np.diff(pts)
        if abs(weights.sum() - 1.0) > 1e-12:
            raise ValueError("interval weights must sum to 1")
        object.__setattr__(self, "_weights", weights)

    @property
    def p(self) -> int:
        return self.points.size - 1

    @property
    def weights(self) -> np.ndarray:
        """Interval lengths |D_1|, ..., |D_p|."""
        return self._weights

    @property
    def mesh(self) -> float:
        return float(self._weights.max())

    def __eq__(self, other) -> bool:
        return isinstance(other, Partition) and np.array_equal(self.points, other.points)

    def __hash__(self):
        return hash(self.points.tobytes())


def uniform_partition(p: int) -> Partition:
    """Equidistant partition {i/p : i = 0..p} with mesh 1/p."""
    if p < 1:
        raise ValueError(f"grid size must be >= 1, got {p}")
    return Partition(np.arange(p + 1) / p)


@dataclass(frozen=True)
class Trajectory:
    """Values of one path at the partition's right endpoints t_1, ..., t_p.

    The value at t_0 = 0 is never used by any statistic and is not stored.
    """

    partition: Partition
    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", vals)
        if vals.ndim != 1 or vals.size != self.partition.p:
            raise ValueError(
                f"expected {self.partition.p} values, got array of shape {vals.shape}"
            )
        if not np.all(np.isfinite(vals)):
            raise ValueError("trajectory values must be finite")


@dataclass(frozen=True)
class WeightedVector:
    """Embedding coordinates |D_i|^(1/2) Z(t_i) of a trajectory."""

    coords: np.ndarray


def embed(traj: Trajectory) -> WeightedVector:
    """Map a trajectory to its weighted coordinate vector (linear in the values)."""
    return WeightedVector(np.sqrt(traj.partition.weights) * traj.values)


def step_l2_distance(a: Trajectory, b: Trajectory) -> float:
    """L2 distance of the step-function interpolants of two trajectories.

    Equals the Euclidean distance between the embedded weighted vectors.
    """
    if a.partition != b.partition:
        raise ValueError("trajectories must share one partition")
    diff = a.values - b.values
    return float(np.sqrt(np.sum(diff * diff * a.partition.weights)))


@dataclass(frozen=True)
class PairedSample:
    """n index-aligned pairs (X_i, Y_i) of trajectories on a shared partition.

    Values are stored as (n, p) arrays; row i of ``x`` and row i of ``y`` form
    one observed pair.
    """

    partition: Partition
    x: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        x = np.asarray(self.x, dtype=float)
        y = np.asarray(self.y, dtype=float)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)
        p = self.partition.p
        if x.ndim != 2 or y.ndim != 2 or x.shape[1] != p or y.shape[1] != p:
            raise ValueError(f"path arrays must have shape (n, {p})")
        if x.shape[0] != y.shape[0] or x.shape[0] < 1:
            raise ValueError("x and y must hold the same number n >= 1 of paths")
        if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
            raise ValueError("path values must be finite")

    @property
    def n(self) -> int:
        return self.x.shape[0]

    @classmethod
    def from_trajectories(cls, x_paths, y_paths) -> "PairedSample":
        if len(x_paths) == 0 or len(x_paths) != len(y_paths):
            raise ValueError("need equally many x and y trajectories, at least one pair")
        part = x_paths[0].partition
        for t in list(x_paths) + list(y_paths):
            if t.partition != part:
                raise ValueError("all trajectories must share one partition")
        return cls(part, np.stack([t.values for t in x_paths]),
                   np.stack([t.values for t in y_paths]))

    def x_paths(self) -> list[Trajectory]:
        return [Trajectory(self.partition, row) for row in self.x]

    def y_paths(self) -> list[Trajectory]:
        return [Trajectory(self.partition, row) for row in self.y]


# ---------------------------------------------------------------------------
# CSV interchange: one row per path, first column a path id, remaining columns
# the values at t_1..t_p; the header row carries "id" plus the grid points.

_FMT = "%.17g"


def _header(partition: Partition) -> list[str]:
    return ["id"] + [_FMT % t for t in partition.points[1:]]


def _partition_from_header(header: list[str]) -> Partition:
    pts = np.concatenate([[0.0], np.array([float(c) for c in header[1:]])])
    return Partition(pts)


def write_trajectories_csv(path, partition: Partition, ids, values: np.ndarray) -> None:
    values = np.asarray(values, dtype=float)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(_header(partition))
        for pid, row in zip(ids, values):
            w.writerow([pid] + [_FMT % v for v in row])


def read_trajectories_csv(path) -> tuple[Partition, list[str], np.ndarray]:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise ValueError(f"{path}: empty trajectory CSV")
    part = _partition_from_header(rows[0])
    ids = [r[0] for r in rows[1:]]
    if not ids:
        raise ValueError(f"{path}: no path rows")
    vals = np.array([[float(c) for c in r[1:]] for r in rows[1:]])
    if vals.shape[1] != part.p:
        raise ValueError(f"{path}: rows have {vals.shape[1]} values, header implies {part.p}")
    return part, ids, vals


def write_pair_csv(path, sample: PairedSample) -> None:
    """Paired sample as one CSV: ids x0..x{n-1} then y0..y{n-1}."""
    ids = [f"x{i}" for i in range(sample.n)] + [f"y{i}" for i in range(sample.n)]
    write_trajectories_csv(path, sample.partition,
                           ids, np.vstack([sample.x, sample.y]))


def read_pair_csv(path) -> PairedSample:
    part, ids, vals = read_trajectories_csv(path)
    xs = {int(i[1:]): v for i, v in zip(ids, vals) if i.startswith("x")}
    ys = {int(i[1:]): v for i, v in zip(ids, vals) if i.startswith("y")}
    if not xs or set(xs) != set(ys):
        raise ValueError(f"{path}: expected matched ids x0..x{{n-1}} / y0..y{{n-1}}")
    order = sorted(xs)
    return PairedSample(part, np.stack([xs[i] for i in order]),
                        np.stack([ys[i] for i in order]))
