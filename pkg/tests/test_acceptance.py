"""Exit criteria, each at its pinned tolerance.

Run with ``pytest tests/test_acceptance.py``; the terminal summary lists one
PASS/FAIL line per criterion with the measured quantity.
"""
import dataclasses
import math

import numpy as np
import pytest

from smobs.config import preset_scenario
from smobs.fuzzy import LABELS_5, LABELS_7, build_standard_psi
from smobs.metrics import chattering_index, tail_loss
from smobs.observer import gates, sign_switch
from smobs.output import trace_csv
from smobs.plant import Polynomial, Signal, TriangularSystem, simulate_truth
from smobs.simulate import run

TRACE_FIELDS = ("t", "z", "z_hat", "z_tilde", "theta", "eps", "gates", "gamma", "loss")


@pytest.fixture(scope="module")
def fig1():
    return run(preset_scenario("fig1-sign-1e5"))


@pytest.fixture(scope="module")
def fig3():
    return {name: run(preset_scenario(name)) for name in ("fig3-sign-1e3", "fig3-fuzzy-1e3")}


@pytest.fixture(scope="module")
def fig4():
    return {name: run(preset_scenario(name)) for name in ("fig4-adaptive", "fig4-fuzzy-frozen")}


def bit_identical(a, b, fields=TRACE_FIELDS):
    return all(getattr(a, f).tobytes() == getattr(b, f).tobytes() for f in fields)


@pytest.mark.criterion(1, "baseline sign observer, |eps_i| < 0.05 on [5, 20] s at dt=1e-5")
def test_baseline_convergence(fig1, record_property):
    worst = np.abs(fig1.eps[fig1.window(5.0, 20.0)]).max(axis=0)
    record_property("measured", "max |eps| = " + ", ".join(f"{v:.3g}" for v in worst))
    assert np.all(worst < 0.05)


@pytest.mark.criterion(2, "fuzzy CI(zhat4) <= 0.5 x sign CI(zhat4) and sign CI > 1 on [10, 20] s")
def test_chattering_elimination(fig3, record_property):
    ci = {}
    for name, tr in fig3.items():
        w = tr.window(10.0, 20.0)
        ci[name] = chattering_index(tr.z_hat[w, 3], tr.z[w, 3])
    sign, fuzzy = ci["fig3-sign-1e3"], ci["fig3-fuzzy-1e3"]
    record_property("measured", f"CI sign = {sign:.3g}, CI fuzzy = {fuzzy:.3g}")
    assert sign > 1.0
    assert fuzzy <= 0.5 * sign


@pytest.mark.criterion(3, "adaptive tail loss <= frozen-gamma tail loss, gamma in [0.05, 1]")
def test_adaptive_improvement(fig4, record_property):
    adaptive, frozen = fig4["fig4-adaptive"], fig4["fig4-fuzzy-frozen"]
    la, lf = tail_loss(adaptive, 5.0), tail_loss(frozen, 5.0)
    record_property(
        "measured",
        f"tail loss adaptive = {la:.4g}, frozen = {lf:.4g}, gamma in [{adaptive.gamma.min():.4g}, {adaptive.gamma.max():.4g}]",
    )
    assert la <= lf
    assert adaptive.gamma.min() >= 0.05 and adaptive.gamma.max() <= 1.0


def dense_centroid(labels, x, points=100_000):
    """Trapezoid centroid of the min/max aggregate on a dense grid (np.interp sets)."""
    half = (len(labels) - 1) // 2
    peaks = [k / half for k in range(-half, half + 1)]
    u = np.linspace(-1.0, 1.0, points)
    x = min(1.0, max(-1.0, x))
    agg = np.zeros_like(u)
    for k in range(len(labels)):
        fp = [1.0 if j == k else 0.0 for j in range(len(labels))]
        act = float(np.interp(x, peaks, fp))
        if act > 0:
            agg = np.maximum(agg, np.minimum(np.interp(u, peaks, fp), act))
    return np.trapezoid(agg * u, u) / np.trapezoid(agg, u)


@pytest.mark.criterion(4, "fuzzy centroid vs 1e5-point reference within 1e-3; odd symmetry within 1e-9")
def test_fuzzy_oracle(record_property):
    worst_gap = worst_odd = 0.0
    for index, labels in ((1, LABELS_5), (2, LABELS_7), (3, LABELS_7)):
        psi = build_standard_psi(index)
        for x in np.linspace(-1.0, 1.0, 100):
            worst_gap = max(worst_gap, abs(psi(x) - dense_centroid(labels, x)))
            worst_odd = max(worst_odd, abs(psi(-x) + psi(x)))
    record_property("measured", f"max gap = {worst_gap:.2e}, max odd residual = {worst_odd:.2e}")
    assert worst_gap <= 1e-3
    assert worst_odd <= 1e-9


@pytest.mark.criterion(5, "adaptive(rate 0) == fuzzy and fuzzy(sign switches) == sign, bit for bit")
def test_variant_degeneracy(fig3, fig4, record_property):
    frozen_sc = preset_scenario("fig4-adaptive", observer={"learning_rate": 0.0, "gamma0": 0.5})
    frozen = run(frozen_sc)
    fuzzy = fig4["fig4-fuzzy-frozen"]
    same_a = bit_identical(frozen, fuzzy, ("z_hat", "z_tilde", "theta", "eps", "gates", "loss"))

    sc = preset_scenario("fig3-fuzzy-1e3")
    relay = dataclasses.replace(sc, observer=dataclasses.replace(sc.observer, psi=(sign_switch,) * 4))
    same_b = bit_identical(run(relay), fig3["fig3-sign-1e3"], ("z_hat", "z_tilde", "theta", "eps", "gates", "loss"))
    record_property("measured", f"adaptive/fuzzy identical = {same_a}, relay/sign identical = {same_b}")
    assert same_a and same_b


@pytest.mark.criterion(6, "gate nesting and brute-force agreement on 1e4 random error vectors")
def test_gate_properties(record_property):
    rng = np.random.default_rng(20261014)
    thr = 0.025
    mismatches = 0
    for _ in range(10_000):
        dim = int(rng.integers(1, 7))
        errors = list(rng.uniform(-0.05, 0.05, size=dim))
        E = gates(errors, thr)
        for i in range(1, dim):
            brute = 1 if all(abs(errors[j]) <= thr for j in range(i)) else 0
            if E[i - 1] != brute or (E[i - 1] == 1 and not all(E[: i - 1])):
                mismatches += 1
    record_property("measured", f"mismatches = {mismatches}")
    assert mismatches == 0


@pytest.mark.criterion(7, "Euler error on x' = -x shrinks by [1.7, 2.3] per halving of dt")
def test_integrator_order(record_property):
    sys = TriangularSystem(2, (Polynomial.monomial(-1.0, (1,)),), Signal.zero())
    errs = []
    for dt in (1e-2, 5e-3, 2.5e-3):
        _, z = simulate_truth(sys, [1.0, 0.0], dt, 1.0)
        errs.append(abs(z[-1, 0] - math.exp(-1.0)))
    ratios = [a / b for a, b in zip(errs, errs[1:])]
    record_property("measured", "ratios = " + ", ".join(f"{r:.4f}" for r in ratios))
    assert all(1.7 <= r <= 2.3 for r in ratios)


@pytest.mark.criterion(8, "running presets twice gives byte-identical CSV")
def test_determinism(fig1, fig3, fig4, record_property):
    first = {"fig1-sign-1e5": fig1, **fig3, **fig4}
    checked = []
    for name, trace in first.items():
        again = run(preset_scenario(name))
        assert trace_csv(trace).encode() == trace_csv(again).encode(), name
        checked.append(name)
    record_property("measured", f"{len(checked)} presets identical")
