"""Convergence and chattering measures over recorded traces."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

TV_FLOOR = 1e-9
DEFAULT_WINDOW = (10.0, 20.0)
DEFAULT_BAND = 0.05
DEFAULT_TAIL = 5.0


def rmse(errors) -> float:
    e = np.asarray(errors, dtype=float)
    if e.size == 0:
        raise ValueError("rmse of an empty window")
    return float(np.sqrt(np.mean(e * e)))


def max_abs(errors) -> float:
    e = np.asarray(errors, dtype=float)
    if e.size == 0:
        raise ValueError("max-abs of an empty window")
    return float(np.max(np.abs(e)))


def total_variation(x) -> float:
    return float(np.sum(np.abs(np.diff(np.asarray(x, dtype=float)))))


def chattering_index(estimate, truth, floor: float = TV_FLOOR) -> float:
    """Excess total variation of ``estimate`` relative to ``truth``.

    ``max(0, TV(estimate) / max(TV(truth), floor) - 1)``: zero when the
    estimate moves no more than the signal it tracks.
    """
    est = np.asarray(estimate, dtype=float)
    tru = np.asarray(truth, dtype=float)
    if est.shape != tru.shape:
        raise ValueError(f"estimate and truth are misaligned: {est.shape} vs {tru.shape}")
    if est.size < 2:
        raise ValueError("chattering index needs at least two samples")
    return max(0.0, total_variation(est) / max(total_variation(tru), floor) - 1.0)


def convergence_time(t, errors, band: float = DEFAULT_BAND) -> Optional[float]:
    """Earliest recorded time after which ``|error|`` never leaves the band.

    ``None`` when the last sample is already outside.
    """
    if not band > 0:
        raise ValueError(f"band must be positive, got {band}")
    t = np.asarray(t, dtype=float)
    outside = np.abs(np.asarray(errors, dtype=float)) > band
    if t.size == 0 or outside[-1]:
        return None
    bad = np.flatnonzero(outside)
    return float(t[0] if bad.size == 0 else t[bad[-1] + 1])


def tail_loss(trace, tail: float = DEFAULT_TAIL) -> float:
    """Mean recorded loss over ``[T - tail, T]``."""
    T = float(trace.t[-1])
    if tail > T - float(trace.t[0]) + 1e-12:
        raise ValueError(f"tail {tail} exceeds the trace horizon")
    mask = trace.window(T - tail, T)
    return float(np.mean(trace.loss[mask]))


@dataclass
class MetricsReport:
    name: str
    variant: str
    rmse: list = field(default_factory=list)
    max_abs: list = field(default_factory=list)
    convergence_time: list = field(default_factory=list)
    chattering: list = field(default_factory=list)
    tail_loss: float = 0.0
    final_gamma: float = 0.5

    def row(self) -> dict:
        out = {"name": self.name, "variant": self.variant}
        for key in ("rmse", "max_abs", "convergence_time", "chattering"):
            for i, v in enumerate(getattr(self, key), start=1):
                out[f"{key}{i}"] = v
        out["tail_loss"] = self.tail_loss
        out["final_gamma"] = self.final_gamma
        return out


def report(
    trace,
    window: Sequence[float] = DEFAULT_WINDOW,
    band: float = DEFAULT_BAND,
    tail: float = DEFAULT_TAIL,
) -> MetricsReport:
    """Per-channel metrics on the estimation error ``z - z_hat``.

    The evaluation window is clipped to the recorded horizon; runs too short
    to reach it are evaluated on the second half of their samples.
    """
    lo = max(window[0], float(trace.t[0]))
    hi = min(window[1], float(trace.t[-1]))
    if lo >= hi:
        lo, hi = 0.5 * (float(trace.t[0]) + float(trace.t[-1])), float(trace.t[-1])
    mask = trace.window(lo, hi)
    if mask.sum() < 2:
        raise ValueError(f"evaluation window {tuple(window)} holds fewer than two samples")
    err = trace.error
    rep = MetricsReport(trace.name, trace.variant)
    for i in range(trace.m):
        rep.rmse.append(rmse(err[mask, i]))
        rep.max_abs.append(max_abs(err[mask, i]))
        rep.convergence_time.append(convergence_time(trace.t, err[:, i], band))
        rep.chattering.append(chattering_index(trace.z_hat[mask, i], trace.z[mask, i]))
    rep.tail_loss = tail_loss(trace, min(tail, float(trace.t[-1] - trace.t[0])))
    rep.final_gamma = float(trace.gamma[-1])
    return rep
