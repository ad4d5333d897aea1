import math
from itertools import combinations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nofade.complexity import (
    ClassDistribution,
    EntropyDistribution,
    jensen_shannon_distance,
    kl_divergence,
    pairwise_jsd_sum,
    pairwise_jsd_terms,
)
from nofade.exceptions import DegenerateInputError, ShapeError, SupportError, ValidationError


def random_dist(rng, n=64, sparsity=0.0):
    p = rng.random(n)
    if sparsity:
        p[rng.random(n) < sparsity] = 0.0
        if p.sum() == 0:
            p[rng.integers(n)] = 1.0
    return p / p.sum()


def brute_jsd(p, q):
    """Independent oracle: natural-log KL, converted to bits at the end."""
    m = [(a + b) / 2 for a, b in zip(p, q)]
    kl_pm = sum(a * math.log(a / c) for a, c in zip(p, m) if a > 0)
    kl_qm = sum(b * math.log(b / c) for b, c in zip(q, m) if b > 0)
    return math.sqrt(max((kl_pm + kl_qm) / 2 / math.log(2), 0.0))


def test_kl_examples():
    p = np.array([0.5, 0.5])
    assert kl_divergence(p, p) == 0.0
    expected = 0.5 * math.log2(0.5 / 0.75) + 0.5 * math.log2(0.5 / 0.25)
    assert kl_divergence(p, [0.75, 0.25]) == pytest.approx(expected, abs=1e-15)
    assert kl_divergence(p, [0.75, 0.25]) == pytest.approx(0.20752, abs=1e-5)


def test_kl_support_error():
    with pytest.raises(SupportError):
        kl_divergence([0.5, 0.5], [1.0, 0.0])


def test_kl_against_mixture_never_raises(rng):
    for _ in range(1000):
        p = random_dist(rng, 16, sparsity=0.5)
        q = random_dist(rng, 16, sparsity=0.5)
        d = kl_divergence(p, 0.5 * (p + q))
        assert math.isfinite(d) and d >= 0


def test_kl_rejects_unnormalized_and_mismatched():
    with pytest.raises(ValidationError):
        kl_divergence([0.5, 0.6], [0.5, 0.5])
    with pytest.raises(ShapeError):
        kl_divergence([1.0], [0.5, 0.5])


def test_jsd_examples():
    assert jensen_shannon_distance([0.5, 0.5], [0.5, 0.5]) == 0.0
    assert jensen_shannon_distance([1.0, 0.0], [0.0, 1.0]) == 1.0
    # radicand = 0.5 * 0.20752 + 0.5 * log2(4/3) = 0.5 * (0.20752 + 0.41504)
    kl_p = 0.5 * math.log2(0.5 / 0.75) + 0.5 * math.log2(0.5 / 0.25)
    kl_q = math.log2(1 / 0.75)
    expected = math.sqrt(0.5 * kl_p + 0.5 * kl_q)
    got = jensen_shannon_distance([0.5, 0.5], [1.0, 0.0])
    assert got == pytest.approx(expected, abs=1e-15)
    assert got == pytest.approx(0.55793, abs=1e-4)


def test_jsd_shape_error():
    with pytest.raises(ShapeError):
        jensen_shannon_distance([1.0], [0.5, 0.5])


def test_jsd_matches_brute_force(rng):
    for _ in range(200):
        p, q = random_dist(rng, sparsity=0.3), random_dist(rng, sparsity=0.3)
        assert jensen_shannon_distance(p, q) == pytest.approx(brute_jsd(p, q), abs=1e-12)


def test_jsd_metric_axioms(rng):
    for _ in range(1000):
        p, q, r = (random_dist(rng, sparsity=0.3) for _ in range(3))
        pq = jensen_shannon_distance(p, q)
        assert pq == jensen_shannon_distance(q, p)
        assert 0.0 <= pq <= 1.0
        assert jensen_shannon_distance(p, p) < 1e-12
        assert pq <= jensen_shannon_distance(p, r) + jensen_shannon_distance(r, q) + 1e-12


simplex = st.lists(st.floats(0, 1), min_size=8, max_size=8).filter(lambda v: sum(v) > 1e-3).map(
    lambda v: np.array(v) / sum(v))


@settings(max_examples=200)
@given(simplex, simplex)
def test_jsd_properties_hypothesis(p, q):
    # renormalizing can leave sums a few ulp off; the validator allows 1e-12
    d = jensen_shannon_distance(p, q)
    assert d == jensen_shannon_distance(q, p)
    assert 0.0 <= d <= 1.0


def classes_from(rng, n):
    out = []
    for k in range(n):
        counts = rng.integers(0, 20, 64)
        counts[rng.integers(64)] += 1
        out.append(ClassDistribution(f"c{k}", EntropyDistribution(counts)))
    return out


def test_pairwise_sum_examples():
    same = [ClassDistribution(str(k), EntropyDistribution.from_entropies([1.0, 2.0])) for k in range(3)]
    assert pairwise_jsd_sum(same) == 0.0
    disjoint = [ClassDistribution("a", EntropyDistribution.from_entropies([0.0])),
                ClassDistribution("b", EntropyDistribution.from_entropies([7.9]))]
    assert pairwise_jsd_sum(disjoint) == 1.0
    with pytest.raises(DegenerateInputError):
        pairwise_jsd_sum(disjoint[:1])


def test_pairwise_sum_double_loop_oracle(rng):
    classes = classes_from(rng, 10)
    total, terms = 0.0, 0
    for i in range(10):
        for j in range(i + 1, 10):
            total += brute_jsd(classes[i].normalized(), classes[j].normalized())
            terms += 1
    assert terms == 45
    assert len(pairwise_jsd_terms(classes)) == 45
    assert pairwise_jsd_sum(classes) == pytest.approx(total, abs=1e-12)


def test_pairwise_sum_reorder_invariant(rng):
    classes = classes_from(rng, 7)
    shuffled = [classes[i] for i in rng.permutation(7)]
    assert pairwise_jsd_sum(shuffled) == pytest.approx(pairwise_jsd_sum(classes), abs=1e-12)
    n = len(pairwise_jsd_terms(classes))
    assert n == len(list(combinations(range(7), 2)))
