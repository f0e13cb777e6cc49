import json

import numpy as np
import pytest

from procdcov import (DcovParams, DistMatrix, H2Matrix, KernelContext, PairedSample,
                      RngSpec, bootstrap_null, h2_matrix, independence_test,
                      pair_dist_matrices, permutation_test, sample_dcov, u_boot,
                      uniform_partition)
from procdcov.simulate import FbmPairSpec, fbm_pair_values

from oracles import random_dist_pair

PARAMS = DcovParams(1.0)


def bm_sample(seed, n=40, p=20, rho=0.0):
    rng = np.random.default_rng(seed)
    x, y = fbm_pair_values(FbmPairSpec(H=0.5, rho=rho, p=p), n, rng)
    return PairedSample(uniform_partition(p), x, y)


# ---------------------------------------------------------------------------
# u_boot

def test_u_boot_constant_indices():
    rng = np.random.default_rng(0)
    a, b = random_dist_pair(rng, 6, 3, 1.0)
    h2 = h2_matrix(KernelContext(a, b))
    k = 2
    got = u_boot(h2, np.full(6, k))
    assert got == pytest.approx((6 - 1) * h2.entries[k, k], rel=1e-12)


def test_u_boot_identity_indices_is_negative_trace_over_n():
    rng = np.random.default_rng(1)
    a, b = random_dist_pair(rng, 9, 4, 1.0)
    h2 = h2_matrix(KernelContext(a, b))
    got = u_boot(h2, np.arange(9))
    # rows of h2 sum to zero, so the off-diagonal sum is minus the trace
    assert got == pytest.approx(-np.trace(h2.entries) / 9, rel=1e-9)


def test_u_boot_n3_hand_sum():
    m = np.array([[1.0, 2.0, 3.0],
                  [2.0, 5.0, 7.0],
                  [3.0, 7.0, 11.0]])
    h2 = H2Matrix(m)
    idx = np.array([2, 0, 2])
    # ordered pairs (i, j), i != j, of (2, 0, 2):
    # (2,0) + (2,2) + (0,2) + (0,2) + (2,2) + (2,0) = 3+11+3+3+11+3
    assert u_boot(h2, idx) == pytest.approx((3 + 11 + 3 + 3 + 11 + 3) / 3.0)


def test_u_boot_validates_indices():
    h2 = H2Matrix(np.zeros((4, 4)))
    with pytest.raises(ValueError):
        u_boot(h2, np.arange(3))
    with pytest.raises(ValueError):
        u_boot(h2, np.array([0, 1, 2, 4]))


# ---------------------------------------------------------------------------
# bootstrap_null

def test_bootstrap_single_replicate_reproducible():
    sample = bm_sample(7)
    v1 = bootstrap_null(sample, PARAMS, 1, RngSpec(123))
    v2 = bootstrap_null(sample, PARAMS, 1, RngSpec(123))
    assert v1[0] == v2[0]
    v3 = bootstrap_null(sample, PARAMS, 1, RngSpec(124))
    assert v1[0] != v3[0]


def test_bootstrap_two_seed_consistency():
    sample = bm_sample(8, n=60)
    draws1 = bootstrap_null(sample, PARAMS, 2000, RngSpec(1))
    draws2 = bootstrap_null(sample, PARAMS, 2000, RngSpec(2))
    se = np.sqrt(draws1.var() / 2000 + draws2.var() / 2000)
    assert abs(draws1.mean() - draws2.mean()) <= 3 * se


def test_bootstrap_distribution_right_skewed():
    sample = bm_sample(9, n=100, p=50)
    draws = bootstrap_null(sample, PARAMS, 500, RngSpec(5))
    assert np.median(draws) < draws.mean()
    centered = draws - draws.mean()
    skew = np.mean(centered**3) / np.mean(centered**2) ** 1.5
    assert skew > 0.5


def test_bootstrap_modes_differ_but_agree_roughly():
    sample = bm_sample(10, n=50, p=20)
    paired = bootstrap_null(sample, PARAMS, 400, RngSpec(3), mode="bootstrap_paired")
    product = bootstrap_null(sample, PARAMS, 400, RngSpec(3), mode="bootstrap_product")
    assert not np.array_equal(paired, product)
    assert np.mean(paired) == pytest.approx(np.mean(product), abs=4 * np.std(paired))


def test_bootstrap_rejects_bad_args():
    sample = bm_sample(11, n=3, p=4)
    with pytest.raises(ValueError):
        bootstrap_null(sample, PARAMS, 10, RngSpec(0))
    with pytest.raises(ValueError):
        bootstrap_null(bm_sample(11), PARAMS, 0, RngSpec(0))
    with pytest.raises(ValueError):
        bootstrap_null(bm_sample(11), PARAMS, 10, RngSpec(0), mode="nope")


# ---------------------------------------------------------------------------
# independence_test / permutation_test

def test_maximal_dependence_rejects():
    rng = np.random.default_rng(12)
    part = uniform_partition(20)
    x = np.cumsum(rng.normal(size=(100, 20)) / np.sqrt(20), axis=1)
    sample = PairedSample(part, x, x.copy())
    for method in ("bootstrap_paired", "bootstrap_product"):
        res = independence_test(sample, PARAMS, 200, RngSpec(0), mode=method)
        assert res.p_value <= 0.01
    res = permutation_test(sample, PARAMS, 200, RngSpec(0))
    assert res.p_value <= 0.01


def test_p_value_formula_and_reference_length():
    sample = bm_sample(13, n=30)
    res = independence_test(sample, PARAMS, 99, RngSpec(4))
    assert res.B == 99 and res.reference_sample.shape == (99,)
    count = int(np.count_nonzero(res.reference_sample >= res.statistic))
    assert res.p_value == (1 + count) / 100
    assert 0.0 < res.p_value <= 1.0


def test_statistic_above_all_references_gives_min_p():
    # maximally dependent data puts the observed statistic beyond every
    # reference draw, so p bottoms out at 1/(B+1)
    rng = np.random.default_rng(14)
    part = uniform_partition(10)
    x = rng.normal(size=(60, 10)).cumsum(axis=1)
    sample = PairedSample(part, x, 2.0 * x)
    res = independence_test(sample, PARAMS, 99, RngSpec(0))
    assert res.p_value == pytest.approx(1 / 100)


def test_statistic_below_all_references_gives_p_one():
    sample = bm_sample(15, n=40)
    res = independence_test(sample, PARAMS, 99, RngSpec(6))
    fake = [v for v in res.reference_sample]
    # recompute the p-value the way the contract states for a statistic
    # below every reference value
    below = min(fake) - 1.0
    count = int(np.count_nonzero(res.reference_sample >= below))
    assert (1 + count) / 100 == 1.0


def test_permutation_identity_draw_reproduces_statistic():
    sample = bm_sample(16, n=25)
    a, b = pair_dist_matrices(sample, PARAMS)
    stat = sample.n * sample_dcov(a, b)
    ident = np.arange(sample.n)
    permuted = DistMatrix(b.entries[np.ix_(ident, ident)], b.beta)
    assert sample.n * sample_dcov(a, permuted) == stat


def test_degenerate_sample_tagged_with_p_one():
    part = uniform_partition(6)
    x = np.ones((20, 6))
    rng = np.random.default_rng(17)
    y = rng.normal(size=(20, 6))
    sample = PairedSample(part, x, y)
    res = independence_test(sample, PARAMS, 50, RngSpec(0))
    assert res.degenerate
    assert res.p_value == 1.0
    res_p = permutation_test(sample, PARAMS, 50, RngSpec(0))
    assert res_p.degenerate and res_p.p_value == 1.0


def test_small_sample_warns():
    sample = bm_sample(18, n=6)
    with pytest.warns(UserWarning):
        independence_test(sample, PARAMS, 120, RngSpec(0))
    with pytest.warns(UserWarning):
        permutation_test(bm_sample(18, n=10), PARAMS, 50, RngSpec(0))


def test_results_bit_identical_across_thread_counts():
    sample = bm_sample(19, n=50)
    for fn, kwargs in ((independence_test, {"mode": "bootstrap_paired"}),
                       (independence_test, {"mode": "bootstrap_product"}),
                       (permutation_test, {})):
        r1 = fn(sample, PARAMS, 150, RngSpec(11), threads=1, **kwargs)
        r8 = fn(sample, PARAMS, 150, RngSpec(11), threads=8, **kwargs)
        assert r1.statistic == r8.statistic
        assert r1.p_value == r8.p_value
        assert np.array_equal(r1.reference_sample, r8.reference_sample)


def test_scaling_leaves_p_value_unchanged():
    # scaling by a power of two keeps every float exact, so the decision and
    # the p-value cannot move at all
    sample = bm_sample(20, n=40)
    scaled = PairedSample(sample.partition, 2.0 * sample.x, 2.0 * sample.y)
    for fn, kwargs in ((independence_test, {"mode": "bootstrap_paired"}),
                       (permutation_test, {})):
        r1 = fn(sample, PARAMS, 100, RngSpec(2), **kwargs)
        r2 = fn(scaled, PARAMS, 100, RngSpec(2), **kwargs)
        assert r2.statistic == 4.0 * r1.statistic
        assert np.array_equal(r2.reference_sample, 4.0 * r1.reference_sample)
        assert r2.p_value == r1.p_value


def test_bootstrap_mode_agreement_on_independent_samples():
    agree = 0
    runs = 40
    for i in range(runs):
        sample = bm_sample(1000 + i, n=100, p=30)
        p1 = independence_test(sample, PARAMS, 200, RngSpec(i),
                               mode="bootstrap_paired").p_value
        p2 = independence_test(sample, PARAMS, 200, RngSpec(i),
                               mode="bootstrap_product").p_value
        agree += abs(p1 - p2) <= 0.1
    assert agree >= 0.9 * runs


def test_permutation_p_values_nearly_uniform_under_null():
    pvals = []
    runs = 300
    for i in range(runs):
        sample = bm_sample(5000 + i, n=30, p=10)
        pvals.append(permutation_test(sample, PARAMS, 199, RngSpec(i)).p_value)
    pvals = np.sort(pvals)
    grid = (np.arange(1, runs + 1)) / runs
    ks = np.max(np.abs(pvals - grid))
    assert ks <= 0.1
    # validity: P(p <= alpha) <= alpha + 1/(B+1) up to binomial noise
    alpha = 0.05
    rate = np.mean(pvals <= alpha)
    assert rate <= alpha + 1 / 200 + 3 * np.sqrt(alpha * (1 - alpha) / runs)


def test_result_json_round_trip():
    sample = bm_sample(21, n=30)
    res = independence_test(sample, PARAMS, 99, RngSpec(9))
    doc = json.loads(res.to_json())
    assert doc["method"] == "bootstrap_paired"
    assert doc["B"] == 99
    assert "reference_sample" not in doc
    full = json.loads(res.to_json(include_reference=True))
    assert len(full["reference_sample"]) == 99


def test_rng_spec_streams_are_stable():
    spec = RngSpec(42)
    a = spec.stream("foo", 3).integers(0, 1000, 5)
    b = spec.stream("foo", 3).integers(0, 1000, 5)
    c = spec.stream("foo", 4).integers(0, 1000, 5)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)
