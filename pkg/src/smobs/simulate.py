"""Lockstep rollout of plant and observer on a shared time grid."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .metrics import report
from .observer import ObserverConfig, adapt_gamma, advance, errors_of, gates
from .plant import SimulationError, TriangularSystem, simulate_truth, step_count


@dataclass(frozen=True)
class Scenario:
    system: TriangularSystem
    observer: ObserverConfig
    z0: tuple
    z_hat0: tuple
    z_tilde0: tuple
    theta0: float
    dt: float
    T: float
    stride: int = 1
    name: str = "run"

    def __post_init__(self):
        for key in ("z0", "z_hat0", "z_tilde0"):
            object.__setattr__(self, key, tuple(float(v) for v in getattr(self, key)))
        object.__setattr__(self, "theta0", float(self.theta0))
        n = self.system.n
        if not self.dt > 0:
            raise ValueError(f"dt must be > 0, got {self.dt}")
        if not self.T >= self.dt:
            raise ValueError(f"T must be >= dt, got T={self.T}, dt={self.dt}")
        if int(self.stride) != self.stride or self.stride < 1:
            raise ValueError(f"stride must be an integer >= 1, got {self.stride}")
        if len(self.z0) != n:
            raise ValueError(f"z0: expected {n} values, got {len(self.z0)}")
        if self.observer.m != n:
            raise ValueError(f"observer has {self.observer.m} channels, system has {n} states")
        if len(self.z_hat0) != n:
            raise ValueError(f"z_hat0: expected {n} values, got {len(self.z_hat0)}")
        if len(self.z_tilde0) != n - 1:
            raise ValueError(f"z_tilde0: expected {n - 1} values, got {len(self.z_tilde0)}")

    @property
    def steps(self) -> int:
        return step_count(self.dt, self.T)

    def truth_key(self):
        return (self.system, self.z0, self.dt, self.T)


@dataclass
class SimulationTrace:
    """Recorded samples; rows are time, columns are channels.

    ``z_tilde`` has m-1 columns and ``gates`` holds ``E_1..E_{m-1}``.
    """

    name: str
    variant: str
    t: np.ndarray
    z: np.ndarray
    z_hat: np.ndarray
    z_tilde: np.ndarray
    theta: np.ndarray
    eps: np.ndarray
    gates: np.ndarray
    gamma: np.ndarray
    loss: np.ndarray
    dt: float = field(default=0.0)

    def __len__(self):
        return len(self.t)

    @property
    def m(self) -> int:
        return self.z.shape[1]

    @property
    def error(self) -> np.ndarray:
        """Estimation error ``z - z_hat`` against ground truth."""
        return self.z - self.z_hat

    def window(self, start: float, stop: float) -> np.ndarray:
        half = 0.5 * self.dt if self.dt else 0.0
        return (self.t >= start - half) & (self.t <= stop + half)


def run(sc: Scenario, truth: Optional[tuple] = None) -> SimulationTrace:
    """Roll out one scenario.

    The observer at step k consumes ``y = z_1(t_k)``. For the adaptive
    variant two twin observers run at exponents ``gamma +/- fd_delta`` on the
    same measurements; the central difference of their instantaneous losses
    drives the exponent update after each step.
    """
    cfg = sc.observer
    if truth is None:
        truth = simulate_truth(sc.system, sc.z0, sc.dt, sc.T)
    t_all, z_all = truth
    steps = sc.steps
    if len(t_all) != steps + 1:
        raise ValueError("truth trajectory does not match the scenario grid")

    m = cfg.m
    dt = sc.dt
    phi = sc.system.phi
    rec = list(range(0, steps + 1, sc.stride))
    K = len(rec)
    z_hat = np.empty((K, m))
    z_tilde = np.empty((K, m - 1))
    theta = np.empty(K)
    eps_rec = np.empty((K, m))
    gate_rec = np.empty((K, m - 1), dtype=np.int8)
    gamma_rec = np.empty(K)
    loss_rec = np.empty(K)

    zh = list(sc.z_hat0)
    zt = list(sc.z_tilde0)
    th = sc.theta0
    gamma = cfg.gamma0
    adaptive = cfg.adaptive
    if adaptive:
        delta = cfg.fd_delta
        twins = [[list(zh), list(zt), th], [list(zh), list(zt), th]]
    y_all = z_all[:, 0].tolist()
    stride = sc.stride

    r = 0
    k = 0
    try:
        for k in range(steps + 1):
            y = y_all[k]
            if k == steps:
                eps = errors_of(zh, zt, y)
                E = gates(eps, cfg.gate_threshold)
            else:
                exponent = gamma if adaptive else 0.5
                nzh, nzt, nth, eps, E = advance(cfg, zh, zt, th, y, phi, dt, exponent)
            if k % stride == 0:
                z_hat[r] = zh
                z_tilde[r] = zt
                theta[r] = th
                eps_rec[r] = eps
                gate_rec[r] = E
                gamma_rec[r] = gamma
                loss_rec[r] = cfg.loss_of(eps)
                r += 1
            if k == steps:
                break
            if not math.isfinite(sum(nzh) + sum(nzt) + nth):
                raise SimulationError("non-finite observer estimate", k + 1, (k + 1) * dt)
            zh, zt, th = nzh, nzt, nth
            if adaptive:
                losses = []
                for twin, g in zip(twins, (gamma + delta, gamma - delta)):
                    twin[0], twin[1], twin[2], e_twin, _ = advance(cfg, *twin, y, phi, dt, g)
                    losses.append(cfg.loss_of(e_twin))
                grad = (losses[0] - losses[1]) / (2.0 * delta)
                gamma = adapt_gamma(cfg, gamma, grad, dt)
    except OverflowError:
        raise SimulationError("observer estimate overflowed", k + 1, (k + 1) * dt) from None

    return SimulationTrace(
        name=sc.name,
        variant=cfg.variant,
        t=t_all[rec],
        z=z_all[rec],
        z_hat=z_hat,
        z_tilde=z_tilde,
        theta=theta,
        eps=eps_rec,
        gates=gate_rec,
        gamma=gamma_rec,
        loss=loss_rec,
        dt=dt * stride,
    )


def run_comparison(scenarios: Sequence[Scenario], **metric_kw) -> list:
    """Run several scenarios, sharing one plant rollout per distinct grid.

    Returns ``(trace, report)`` pairs in input order.
    """
    if len(scenarios) < 2:
        raise ValueError("a comparison needs at least two scenarios")
    cache: dict = {}
    out = []
    for sc in scenarios:
        key = sc.truth_key()
        if key not in cache:
            cache[key] = simulate_truth(sc.system, sc.z0, sc.dt, sc.T)
        trace = run(sc, truth=cache[key])
        out.append((trace, report(trace, **metric_kw)))
    return out
