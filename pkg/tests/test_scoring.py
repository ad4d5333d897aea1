import math

import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from nofade.complexity import ComplexityScore
from nofade.exceptions import ValidationError
from nofade.scoring import FlopsDomainError, nofade

metric = st.floats(0.01, 100)
complexity = st.floats(0.01, 8)
flops = st.floats(11, 1e13)


def test_examples():
    assert nofade(0, 5.0, 1e9).value == 0
    assert nofade(80, 7.0, 1e10).value == pytest.approx(56.0, abs=1e-12)
    assert nofade(50, 3.0, 100).value == 2 * nofade(50, 3.0, 10000).value


def test_accepts_complexity_score():
    score = nofade(80, ComplexityScore("ds", "mean-entropy", 7.0), 1e10, model="m")
    assert (score.model, score.dataset) == ("m", "ds")
    assert score.recompute() == score.value


def test_domain_errors():
    with pytest.raises(FlopsDomainError):
        nofade(50, 1.0, 10)
    with pytest.raises(FlopsDomainError):
        nofade(50, 1.0, 0.5)
    with pytest.raises(ValidationError):
        nofade(101, 1.0, 1e9)
    with pytest.raises(ValidationError):
        nofade(-1, 1.0, 1e9)
    with pytest.raises(ValidationError):
        nofade(50, -0.1, 1e9)


@given(metric, metric, complexity, flops)
def test_increasing_in_metric(m1, m2, c, f):
    assume(m1 < m2)
    assert nofade(m1, c, f).value < nofade(m2, c, f).value


@given(metric, complexity, complexity, flops)
def test_increasing_in_complexity(m, c1, c2, f):
    assume(c1 < c2)
    assert nofade(m, c1, f).value < nofade(m, c2, f).value


@given(metric, complexity, flops, flops)
def test_decreasing_in_flops(m, c, f1, f2):
    assume(math.log10(f1) < math.log10(f2))
    assert nofade(m, c, f1).value > nofade(m, c, f2).value


@given(st.lists(metric, min_size=2, max_size=6), complexity, flops, st.floats(0.1, 10))
def test_homogeneity_keeps_ranking(metrics, c, f, scale):
    base = [nofade(m, c, f).value for m in metrics]
    scaled = [nofade(m, c * scale, f).value for m in metrics]
    for a, b in zip(base, scaled):
        assert b == pytest.approx(a * scale, rel=1e-12)
    order = sorted(range(len(metrics)), key=lambda i: (metrics[i], i))
    assert sorted(range(len(metrics)), key=lambda i: (base[i], i)) == order
