import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from procdcov import (PairedSample, Partition, Trajectory, embed, read_pair_csv,
                      read_trajectories_csv, step_l2_distance, uniform_partition,
                      write_pair_csv, write_trajectories_csv)


def test_uniform_partition_examples():
    assert np.allclose(uniform_partition(1).points, [0.0, 1.0])
    p4 = uniform_partition(4)
    assert np.allclose(p4.points, [0, 0.25, 0.5, 0.75, 1.0])
    assert p4.mesh == 0.25
    assert uniform_partition(100).mesh == pytest.approx(0.01)


def test_uniform_partition_rejects_zero():
    with pytest.raises(ValueError):
        uniform_partition(0)


@pytest.mark.parametrize("points", [
    [0.0, 0.5],                # does not end at 1
    [0.1, 0.5, 1.0],           # does not start at 0
    [0.0, 0.5, 0.5, 1.0],      # not strictly increasing
    [0.0, 0.7, 0.3, 1.0],
])
def test_partition_invariants(points):
    with pytest.raises(ValueError):
        Partition(np.array(points))


def test_partition_weights_sum_to_one():
    part = Partition(np.array([0.0, 0.1, 0.35, 0.9, 1.0]))
    assert part.weights.sum() == pytest.approx(1.0, abs=1e-12)
    assert part.mesh == pytest.approx(0.55)


def test_trajectory_rejects_nonfinite_and_bad_length():
    part = uniform_partition(3)
    with pytest.raises(ValueError):
        Trajectory(part, np.array([1.0, np.nan, 0.0]))
    with pytest.raises(ValueError):
        Trajectory(part, np.array([1.0, np.inf, 0.0]))
    with pytest.raises(ValueError):
        Trajectory(part, np.ones(2))


def test_embed_examples():
    part = uniform_partition(4)
    assert np.array_equal(embed(Trajectory(part, np.zeros(4))).coords, np.zeros(4))
    assert np.allclose(embed(Trajectory(part, np.ones(4))).coords, 0.5)
    p = 10
    unif = uniform_partition(p)
    t_vals = np.arange(1, p + 1) / p
    coords = embed(Trajectory(unif, t_vals)).coords
    assert np.allclose(coords, t_vals / np.sqrt(p), rtol=1e-14)


def test_embed_norm_identity():
    # |coords|^2 equals the weighted sum of squared values
    rng = np.random.default_rng(5)
    part = Partition(np.array([0.0, 0.2, 0.3, 0.8, 1.0]))
    vals = rng.normal(size=4)
    coords = embed(Trajectory(part, vals)).coords
    assert np.dot(coords, coords) == pytest.approx(np.sum(vals**2 * part.weights), rel=1e-14)


def test_step_l2_examples():
    part = uniform_partition(7)
    a = Trajectory(part, np.arange(7.0))
    assert step_l2_distance(a, a) == 0.0
    one = Trajectory(part, np.ones(7))
    zero = Trajectory(part, np.zeros(7))
    assert step_l2_distance(one, zero) == pytest.approx(1.0, rel=1e-15)
    p = 100
    unif = uniform_partition(p)
    ramp = Trajectory(unif, np.arange(1, p + 1) / p)
    z = Trajectory(unif, np.zeros(p))
    expect = np.sqrt((p + 1) * (2 * p + 1) / (6 * p**2))
    assert step_l2_distance(ramp, z) == pytest.approx(expect, rel=1e-12)
    assert step_l2_distance(ramp, z) == pytest.approx(0.581678, abs=1e-6)


def test_step_l2_rejects_mismatched_partitions():
    a = Trajectory(uniform_partition(4), np.ones(4))
    b = Trajectory(uniform_partition(5), np.ones(5))
    with pytest.raises(ValueError):
        step_l2_distance(a, b)


@given(st.integers(0, 2**32 - 1), st.integers(1, 40))
def test_isometry_with_embedding(seed, p):
    rng = np.random.default_rng(seed)
    cuts = np.sort(rng.uniform(size=p - 1)) if p > 1 else np.empty(0)
    part = Partition(np.unique(np.concatenate([[0.0], cuts, [1.0]])))
    a = Trajectory(part, rng.normal(size=part.p))
    b = Trajectory(part, rng.normal(size=part.p))
    direct = step_l2_distance(a, b)
    via_embedding = np.linalg.norm(embed(a).coords - embed(b).coords)
    assert direct == pytest.approx(via_embedding, rel=1e-12)


@given(st.integers(0, 2**32 - 1))
def test_translation_invariance(seed):
    rng = np.random.default_rng(seed)
    part = uniform_partition(17)
    a = rng.normal(size=17)
    b = rng.normal(size=17)
    shift = rng.normal()
    d0 = step_l2_distance(Trajectory(part, a), Trajectory(part, b))
    d1 = step_l2_distance(Trajectory(part, a + shift), Trajectory(part, b + shift))
    assert d1 == pytest.approx(d0, rel=1e-12)


def test_riemann_convergence_rate():
    # f(t) = t^2, g = 0: the exact integral of (f-g)^2 is 1/5; the
    # right-endpoint rule error shrinks like 1/p.
    exact = np.sqrt(1.0 / 5.0)
    errors = []
    for p in (10, 100, 1000):
        part = uniform_partition(p)
        t = np.arange(1, p + 1) / p
        d = step_l2_distance(Trajectory(part, t**2), Trajectory(part, np.zeros(p)))
        errors.append(abs(d - exact))
    assert errors[0] > errors[1] > errors[2]
    # error ~ c/p: each 10x refinement shrinks the error by roughly 10x
    assert errors[0] / errors[1] == pytest.approx(10.0, rel=0.25)
    assert errors[1] / errors[2] == pytest.approx(10.0, rel=0.25)


def test_paired_sample_validation():
    part = uniform_partition(3)
    with pytest.raises(ValueError):
        PairedSample(part, np.ones((2, 3)), np.ones((3, 3)))
    with pytest.raises(ValueError):
        PairedSample(part, np.ones((0, 3)), np.ones((0, 3)))
    sample = PairedSample(part, np.ones((2, 3)), np.zeros((2, 3)))
    assert sample.n == 2
    assert all(isinstance(t, Trajectory) for t in sample.x_paths())


def test_paired_sample_from_trajectories():
    part = uniform_partition(2)
    xs = [Trajectory(part, np.array([1.0, 2.0]))]
    ys = [Trajectory(part, np.array([3.0, 4.0]))]
    sample = PairedSample.from_trajectories(xs, ys)
    assert np.array_equal(sample.x, [[1.0, 2.0]])
    other = [Trajectory(uniform_partition(3), np.ones(3))]
    with pytest.raises(ValueError):
        PairedSample.from_trajectories(xs, other)


def test_trajectory_csv_round_trip(tmp_path):
    rng = np.random.default_rng(3)
    part = Partition(np.array([0.0, 0.125, 0.5, 1.0]))
    vals = rng.normal(size=(4, 3))
    path = tmp_path / "paths.csv"
    write_trajectories_csv(path, part, [f"p{i}" for i in range(4)], vals)
    part2, ids, vals2 = read_trajectories_csv(path)
    assert part2 == part
    assert ids == ["p0", "p1", "p2", "p3"]
    assert np.array_equal(vals, vals2)


def test_pair_csv_round_trip(tmp_path):
    rng = np.random.default_rng(4)
    part = uniform_partition(5)
    sample = PairedSample(part, rng.normal(size=(3, 5)), rng.normal(size=(3, 5)))
    path = tmp_path / "pair.csv"
    write_pair_csv(path, sample)
    back = read_pair_csv(path)
    assert back.partition == part
    assert np.array_equal(back.x, sample.x)
    assert np.array_equal(back.y, sample.y)
