import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from smobs.fuzzy import (
    LABELS_5,
    LABELS_7,
    FuzzyRule,
    FuzzySystem,
    MembershipFunction,
    build_psi,
    build_standard_psi,
    eval_membership,
    infer,
    partition_sets,
)

PSIS = {i: build_standard_psi(i) for i in (1, 2, 3)}
finite = st.floats(min_value=-50, max_value=50, allow_nan=False)


def reference_centroid(labels, peaks, x, points=100_001):
    """Dense trapezoid centroid of the Mamdani aggregate, built with np.interp."""
    u = np.linspace(-1.0, 1.0, points)
    x = min(1.0, max(-1.0, x))
    agg = np.zeros_like(u)
    for k in range(len(labels)):
        xp = [-1.0, *peaks, 1.0]
        fp = np.zeros(len(xp))
        fp[k + 1] = 1.0
        if k == 0:
            fp[0] = 1.0
        if k == len(labels) - 1:
            fp[-1] = 1.0
        # np.interp needs increasing xp; duplicated edge points are harmless here
        mu_in = float(np.interp(x, xp, fp))
        if mu_in > 0:
            agg = np.maximum(agg, np.minimum(np.interp(u, xp, fp), mu_in))
    return np.trapezoid(agg * u, u) / np.trapezoid(agg, u)


@pytest.mark.parametrize("x, expected", [(0.0, 1.0), (0.25, 0.5), (0.75, 0.0), (-0.5, 0.0), (-0.25, 0.5)])
def test_triangle_examples(x, expected):
    assert eval_membership(MembershipFunction(-0.5, 0.0, 0.5), x) == expected


def test_shoulders_saturate():
    left = MembershipFunction(-1.0, -1.0, -0.5, left_shoulder=True)
    right = MembershipFunction(0.5, 1.0, 1.0, right_shoulder=True)
    assert left(-1.0) == 1.0 and left(-3.0) == 1.0 and left(-0.75) == 0.5 and left(0.0) == 0.0
    assert right(1.0) == 1.0 and right(2.0) == 1.0 and right(0.75) == 0.5


def test_bad_breakpoints_rejected():
    with pytest.raises(ValueError, match="left <= peak <= right"):
        MembershipFunction(0.5, 0.0, 1.0)


@given(st.floats(-1, 1), st.floats(-1, 1), st.floats(-1, 1), st.floats(-1, 1))
def test_membership_degree_bounded(a, b, c, x):
    left, peak, right = sorted((a, b, c))
    d = MembershipFunction(left, peak, right)(x)
    assert 0.0 <= d <= 1.0


def test_standard_structure():
    assert PSIS[1].labels == LABELS_5 and len(PSIS[1].rules) == 5
    assert PSIS[2].labels == LABELS_7 and len(PSIS[2].rules) == 7
    assert PSIS[3].labels == PSIS[2].labels
    assert [mf for _, mf in PSIS[3].input_sets] == [mf for _, mf in PSIS[2].input_sets]
    assert all(r.antecedent == r.consequent for r in PSIS[2].rules)
    with pytest.raises(ValueError):
        build_standard_psi(4)


@pytest.mark.parametrize("index", [1, 2, 3])
def test_layout_odd_symmetric(index):
    sets = [mf for _, mf in PSIS[index].input_sets]
    for mf, mirror in zip(sets, reversed(sets)):
        assert (mf.left, mf.peak, mf.right) == (-mirror.right, -mirror.peak, -mirror.left)
    assert PSIS[index].grid[len(PSIS[index].grid) // 2] == 0.0


def test_coverage_gap_rejected():
    sets = (
        ("N", MembershipFunction(-1.0, -1.0, -0.5, left_shoulder=True)),
        ("P", MembershipFunction(0.5, 1.0, 1.0, right_shoulder=True)),
    )
    with pytest.raises(ValueError, match="uncovered"):
        FuzzySystem(sets, sets, (FuzzyRule("N", "N"), FuzzyRule("P", "P")))


def test_unknown_rule_label_rejected():
    sets = partition_sets(("N", "Z", "P"), (-1.0, 0.0, 1.0))
    with pytest.raises(ValueError, match="unknown input label"):
        FuzzySystem(sets, sets, (FuzzyRule("X", "Z"),))


@pytest.mark.parametrize("index", [1, 2, 3])
def test_zero_maps_to_zero(index):
    assert infer(PSIS[index], 0.0) == 0.0


def test_full_positive_input_matches_oracle():
    got = infer(PSIS[3], 1.0)
    assert got == pytest.approx(reference_centroid(LABELS_7, [k / 3 for k in range(-3, 4)], 1.0), abs=1e-3)
    # PBB alone, clipped at 1: centroid of the rising ramp on [2/3, 1]
    assert got == pytest.approx(1 - 1 / 9, abs=1e-3)


@pytest.mark.parametrize("index", [1, 2, 3])
def test_oracle_agreement_grid(index):
    labels = LABELS_5 if index == 1 else LABELS_7
    half = (len(labels) - 1) // 2
    peaks = [k / half for k in range(-half, half + 1)]
    for x in np.linspace(-1, 1, 100):
        assert PSIS[index](x) == pytest.approx(reference_centroid(labels, peaks, x), abs=1e-3)


@pytest.mark.parametrize("index", [1, 2, 3])
def test_sampled_monotone_and_lipschitz(index):
    xs = np.linspace(-1, 1, 401)
    ys = np.array([PSIS[index](x) for x in xs])
    assert np.all(np.diff(ys) >= -1e-12)
    assert np.max(np.abs(np.diff(ys)) / np.diff(xs)) <= 10.0


@settings(max_examples=200)
@given(finite)
def test_bounded_and_odd(eps):
    for psi in PSIS.values():
        v = psi(eps)
        assert -1.0 <= v <= 1.0
        assert abs(psi(-eps) + v) <= 1e-9


@settings(max_examples=200)
@given(finite.filter(lambda e: abs(e) >= 0.05))
def test_sign_agreement(eps):
    for psi in PSIS.values():
        assert np.sign(psi(eps)) == np.sign(eps)


def test_input_scale_and_clamp():
    wide = build_standard_psi(2, scale=0.1)
    assert wide(0.05) == pytest.approx(PSIS[2](0.5))
    assert PSIS[2](7.0) == PSIS[2](1.0)
    with pytest.raises(ValueError, match="scale"):
        build_standard_psi(2, scale=0.0)


def test_custom_peaks():
    psi = build_psi(LABELS_5, peaks=[-1, -0.2, 0, 0.2, 1])
    assert psi(0.2) > PSIS[1](0.2)
    with pytest.raises(ValueError, match="strictly increasing"):
        build_psi(LABELS_5, peaks=[-1, 0, 0, 0.5, 1])
