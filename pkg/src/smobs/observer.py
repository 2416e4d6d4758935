"""Cascaded super-twisting observers: sign, fuzzy and adaptive-order variants.

For m channels with measured ``y = z_1`` the observer carries estimates
``zh_1..zh_m``, internal states ``zt_2..zt_m`` and a final internal state
``theta``. With ``e_1 = y - zh_1`` and ``e_i = zt_i - zh_i``, channel i moves as

    zh_i'     = E_{i-1} [zt_{i+1} + lam_i |e_i|^g s_i(e_i) + phi_i(y, zt_2..zt_i)]
    zt_{i+1}' = E_{i-1} [alpha_i s_i(e_i)]

where ``zt_{m+1}`` is ``theta``, ``E_0 = 1`` and ``E_i`` opens once the first
i errors sit inside the gate threshold. ``s_i`` is ``sign`` or a fuzzy
system and ``g`` is 1/2, or the adapted exponent for the adaptive variant.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Optional, Sequence

from .fuzzy import build_standard_psi
from .plant import SimulationError

VARIANTS = ("sign", "fuzzy", "adaptive")
LOSS_CHANNELS = ("all", "exclude-last")

Switch = Callable[[float], float]


def sign_switch(eps: float) -> float:
    if eps > 0.0:
        return 1.0
    if eps < 0.0:
        return -1.0
    return 0.0


def gate(errors: Sequence[float], threshold: float) -> int:
    """E_i for i = len(errors): 1 iff every error is within the threshold."""
    for e in errors:
        if abs(e) > threshold:
            return 0
    return 1


def gates(errors: Sequence[float], threshold: float) -> list[int]:
    """``[E_1, ..., E_{m-1}]`` for an m-channel error vector."""
    out = []
    is_open = 1
    for e in errors[:-1]:
        if abs(e) > threshold:
            is_open = 0
        out.append(is_open)
    return out


def correction(lam: float, eps: float, gamma: float, switch: float) -> float:
    return lam * abs(eps) ** gamma * switch


def loss(errors: Sequence[float]) -> float:
    return sum(e * e for e in errors)


@lru_cache(maxsize=None)
def _standard_psi(index: int):
    return build_standard_psi(index)


def standard_assignment(m: int) -> tuple:
    """psi_1 on channel 1, psi_2 on channel 2, psi_3 on every later channel."""
    return tuple(_standard_psi(min(i + 1, 3)) for i in range(m))


@dataclass(frozen=True)
class ObserverConfig:
    variant: str
    lambdas: tuple
    alphas: tuple
    gate_threshold: float = 0.025
    gamma0: float = 0.5
    learning_rate: float = 0.0
    gamma_bounds: tuple = (0.05, 1.0)
    fd_delta: float = 1e-3
    psi: Optional[tuple] = None
    loss_channels: str = "all"
    _switches: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "lambdas", tuple(float(v) for v in self.lambdas))
        object.__setattr__(self, "alphas", tuple(float(v) for v in self.alphas))
        object.__setattr__(self, "gamma_bounds", tuple(float(v) for v in self.gamma_bounds))
        if self.variant not in VARIANTS:
            raise ValueError(f"variant must be one of {VARIANTS}, got {self.variant!r}")
        if len(self.lambdas) < 2:
            raise ValueError("lambdas: at least two channels are required")
        if len(self.alphas) != len(self.lambdas):
            raise ValueError(
                f"alphas: expected {len(self.lambdas)} values to match lambdas, got {len(self.alphas)}"
            )
        for name, values in (("lambda", self.lambdas), ("alpha", self.alphas)):
            for i, v in enumerate(values):
                if not v > 0:
                    raise ValueError(f"{name}_{i + 1} must be > 0, got {v}")
        if not self.gate_threshold > 0:
            raise ValueError(f"gate_threshold must be > 0, got {self.gate_threshold}")
        if len(self.gamma_bounds) != 2:
            raise ValueError("gamma_bounds must be a [min, max] pair")
        lo, hi = self.gamma_bounds
        if not 0 < lo <= hi <= 1:
            raise ValueError(f"gamma_bounds must satisfy 0 < min <= max <= 1, got {self.gamma_bounds}")
        if not lo <= self.gamma0 <= hi:
            raise ValueError(f"gamma0 must lie in gamma_bounds {self.gamma_bounds}, got {self.gamma0}")
        if not self.learning_rate >= 0:
            raise ValueError(f"learning_rate must be >= 0, got {self.learning_rate}")
        if not self.fd_delta > 0:
            raise ValueError(f"fd_delta must be > 0, got {self.fd_delta}")
        if self.loss_channels not in LOSS_CHANNELS:
            raise ValueError(f"loss_channels must be one of {LOSS_CHANNELS}, got {self.loss_channels!r}")
        if self.psi is not None:
            object.__setattr__(self, "psi", tuple(self.psi))
            if len(self.psi) != self.m:
                raise ValueError(f"psi: expected {self.m} switching functions, got {len(self.psi)}")

        if self.variant == "sign":
            switches = (sign_switch,) * self.m
        else:
            switches = self.psi if self.psi is not None else standard_assignment(self.m)
        object.__setattr__(self, "_switches", switches)

    @property
    def m(self) -> int:
        return len(self.lambdas)

    @property
    def switches(self) -> tuple:
        return self._switches

    @property
    def adaptive(self) -> bool:
        return self.variant == "adaptive"

    def exponent(self, gamma: float) -> float:
        return gamma if self.adaptive else 0.5

    def loss_of(self, errors: Sequence[float]) -> float:
        if self.loss_channels == "exclude-last":
            errors = errors[:-1]
        return loss(errors)

    def clamp_gamma(self, gamma: float) -> float:
        lo, hi = self.gamma_bounds
        return min(hi, max(lo, gamma))


@dataclass(frozen=True)
class ObserverState:
    """``z_tilde`` holds zt_2..zt_m; ``theta`` is the last internal state."""

    z_hat: tuple
    z_tilde: tuple
    theta: float
    gamma: float = 0.5

    def __post_init__(self):
        if len(self.z_tilde) != len(self.z_hat) - 1:
            raise ValueError(
                f"z_tilde must hold {len(self.z_hat) - 1} values for {len(self.z_hat)} estimates"
            )

    @classmethod
    def initial(cls, cfg: ObserverConfig, z_hat, z_tilde, theta) -> "ObserverState":
        if len(z_hat) != cfg.m:
            raise ValueError(f"z_hat: expected {cfg.m} values, got {len(z_hat)}")
        return cls(tuple(map(float, z_hat)), tuple(map(float, z_tilde)), float(theta), cfg.gamma0)

    def errors(self, y: float) -> list[float]:
        return errors_of(self.z_hat, self.z_tilde, y)


def errors_of(z_hat: Sequence[float], z_tilde: Sequence[float], y: float) -> list[float]:
    return [y - z_hat[0]] + [zt - zh for zt, zh in zip(z_tilde, z_hat[1:])]


def advance(cfg: ObserverConfig, z_hat, z_tilde, theta, y, phi, dt, exponent):
    """One explicit Euler step of the cascade from a single error snapshot.

    Returns ``(z_hat, z_tilde, theta, errors, gates)``; the errors and gates
    are those of the pre-step state.
    """
    m = len(z_hat)
    eps = errors_of(z_hat, z_tilde, y)
    thr = cfg.gate_threshold
    lams = cfg.lambdas
    alps = cfg.alphas
    sws = cfg._switches
    args = [y]
    args.extend(z_tilde)

    new_hat = list(z_hat)
    new_tilde = list(z_tilde)
    new_theta = theta
    E = []
    is_open = 1
    for i in range(m):
        if i > 0:
            if abs(eps[i - 1]) > thr:
                is_open = 0
            E.append(is_open)
        if not is_open:
            continue
        e = eps[i]
        s = sws[i](e)
        nxt = z_tilde[i] if i + 1 < m else theta
        rhs = nxt + lams[i] * abs(e) ** exponent * s
        f = phi[i] if i < len(phi) else None
        if f is not None:
            rhs += f(args[: i + 1])
        new_hat[i] = z_hat[i] + dt * rhs
        if i + 1 < m:
            new_tilde[i] = z_tilde[i] + dt * (alps[i] * s)
        else:
            new_theta = theta + dt * (alps[i] * s)
    return new_hat, new_tilde, new_theta, eps, E


def step_observer(
    cfg: ObserverConfig, st: ObserverState, y: float, phi: Sequence, dt: float
) -> ObserverState:
    """Advance one step; ``gamma`` is carried unchanged (see ``adapt_gamma``)."""
    if len(st.z_hat) != cfg.m:
        raise ValueError(f"state has {len(st.z_hat)} channels, config expects {cfg.m}")
    zh, zt, th, _, _ = advance(cfg, st.z_hat, st.z_tilde, st.theta, y, phi, dt, cfg.exponent(st.gamma))
    if not math.isfinite(sum(zh) + sum(zt) + th):
        raise SimulationError("non-finite observer estimate", -1, float("nan"))
    return ObserverState(tuple(zh), tuple(zt), th, st.gamma)


def adapt_gamma(cfg: ObserverConfig, gamma: float, grad: float, dt: float) -> float:
    """Projected gradient step ``gamma - dt * rate * grad`` clipped to the bounds."""
    return cfg.clamp_gamma(gamma - dt * cfg.learning_rate * grad)
