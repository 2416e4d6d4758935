"""Triangular nonlinear systems and their ground-truth rollouts.

A system of dimension n evolves as

    z_i' = z_{i+1} + phi_i(z_1..z_i)     for i < n
    z_n' = eta(t) [+ phi_n(z_1..z_n)]
    y    = z_1

with each ``phi_i`` receiving only the first i states.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np


class SimulationError(RuntimeError):
    """A rollout produced a non-finite value."""

    def __init__(self, message: str, step: int, t: float):
        super().__init__(f"{message} (step {step}, t={t:.6g})")
        self.step = step
        self.t = t


@dataclass(frozen=True)
class Signal:
    """Scalar signal of time: ``sine``, ``cosine``, ``constant`` or ``custom``.

    ``sine`` is ``amplitude * sin(omega * t + phase)``; ``cosine`` likewise;
    ``constant`` is ``amplitude``. Custom signals wrap a callable and may
    carry an explicit derivative.
    """

    kind: str = "constant"
    amplitude: float = 0.0
    omega: float = 1.0
    phase: float = 0.0
    fn: Optional[Callable[[float], float]] = None
    dfn: Optional[Callable[[float], float]] = None
    name: str = ""

    def __post_init__(self):
        if self.kind not in ("sine", "cosine", "constant", "custom"):
            raise ValueError(f"unknown signal kind {self.kind!r}")
        if self.kind == "custom" and self.fn is None:
            raise ValueError("custom signal needs a callable")

    @classmethod
    def sine(cls, amplitude: float = 1.0, omega: float = 1.0, phase: float = 0.0) -> "Signal":
        return cls("sine", amplitude, omega, phase)

    @classmethod
    def constant(cls, value: float) -> "Signal":
        return cls("constant", value)

    @classmethod
    def zero(cls) -> "Signal":
        return cls("constant", 0.0)

    @classmethod
    def custom(cls, fn, derivative=None, name: str = "custom") -> "Signal":
        return cls("custom", fn=fn, dfn=derivative, name=name)

    def __call__(self, t: float) -> float:
        if self.kind == "sine":
            return self.amplitude * math.sin(self.omega * t + self.phase)
        if self.kind == "cosine":
            return self.amplitude * math.cos(self.omega * t + self.phase)
        if self.kind == "constant":
            return self.amplitude
        return float(self.fn(t))

    @property
    def has_derivative(self) -> bool:
        return self.kind != "custom" or self.dfn is not None

    def derivative(self) -> "Signal":
        if self.kind == "sine":
            return Signal("cosine", self.amplitude * self.omega, self.omega, self.phase)
        if self.kind == "cosine":
            return Signal("sine", -self.amplitude * self.omega, self.omega, self.phase)
        if self.kind == "constant":
            return Signal.zero()
        if self.dfn is None:
            raise ValueError(f"signal {self.name!r} has no derivative")
        return Signal.custom(self.dfn, name=f"d{self.name}")

    def bound(self) -> Optional[float]:
        """Sup of ``|signal|`` when known in closed form."""
        if self.kind == "custom":
            return None
        return abs(self.amplitude)


@dataclass(frozen=True)
class Polynomial:
    """Sum of monomials ``coef * prod(z_j ** powers[j])``.

    ``terms`` holds ``(coef, powers)`` pairs; missing trailing powers are 0.
    """

    terms: tuple[tuple[float, tuple[int, ...]], ...] = ()

    @classmethod
    def monomial(cls, coef: float, powers: Sequence[int]) -> "Polynomial":
        return cls(((float(coef), tuple(int(p) for p in powers)),))

    @property
    def arity(self) -> int:
        return max((len(p) for _, p in self.terms), default=0)

    def __call__(self, z: Sequence[float]) -> float:
        total = 0.0
        for coef, powers in self.terms:
            term = coef
            for zj, p in zip(z, powers):
                if p:
                    term *= zj**p
            total += term
        return total


@dataclass(frozen=True)
class TriangularSystem:
    """Plant in triangular form; ``phi[i]`` is the nonlinearity of state i+1.

    ``phi`` has length n-1, or n when the last state also has a drift term.
    ``None`` entries are zero maps.
    """

    n: int
    phi: tuple = ()
    eta: Signal = Signal.zero()
    eta_max: Optional[float] = None
    name: str = ""

    def __post_init__(self):
        if self.n < 2:
            raise ValueError(f"system dimension must be >= 2, got {self.n}")
        phi = tuple(self.phi) + (None,) * max(0, self.n - 1 - len(self.phi))
        if len(phi) > self.n:
            raise ValueError(f"at most {self.n} nonlinearities for n={self.n}, got {len(phi)}")
        for i, f in enumerate(phi):
            if isinstance(f, Polynomial) and f.arity > i + 1:
                raise ValueError(f"phi_{i + 1} may depend on z_1..z_{i + 1} only")
        object.__setattr__(self, "phi", phi)
        if self.eta_max is None:
            object.__setattr__(self, "eta_max", self.eta.bound())

    @property
    def has_last_drift(self) -> bool:
        return len(self.phi) == self.n and self.phi[-1] is not None

    def derivative(self, t: float, z: Sequence[float]) -> list[float]:
        if len(z) != self.n:
            raise ValueError(f"state has dimension {len(z)}, system expects {self.n}")
        n = self.n
        dz = [0.0] * n
        for i in range(n - 1):
            f = self.phi[i]
            dz[i] = z[i + 1] + (f(z[: i + 1]) if f is not None else 0.0)
        dz[n - 1] = self.eta(t)
        if self.has_last_drift:
            dz[n - 1] += self.phi[n - 1](z)
        return dz


def derivative(sys: TriangularSystem, t: float, z: Sequence[float]) -> list[float]:
    return sys.derivative(t, z)


def augment_with_input(sys: TriangularSystem, d: Optional[Signal] = None) -> TriangularSystem:
    """Promote the input ``d`` driving the last state to an extra state.

    The last state's drift ``phi_n`` stays in place, ``z_{n+1} = d`` and the
    new input becomes the derivative of ``d``.
    """
    d = sys.eta if d is None else d
    if d != sys.eta:
        raise ValueError("d must be the input currently driving the last state")
    if not d.has_derivative:
        raise ValueError(f"cannot augment with {d.name or d.kind!r}: derivative unavailable")
    phi = tuple(sys.phi) + (None,) * (sys.n - len(sys.phi))
    return TriangularSystem(
        n=sys.n + 1,
        phi=phi,
        eta=d.derivative(),
        name=f"{sys.name}+input" if sys.name else "",
    )


def step_count(dt: float, T: float) -> int:
    if not dt > 0:
        raise ValueError(f"dt must be positive, got {dt}")
    if T < dt:
        raise ValueError(f"horizon T={T} shorter than dt={dt}")
    # tolerate representation error such as 20 / 1e-5 = 1999999.9999999998
    return int(math.floor(T / dt + 1e-9))


def simulate_truth(sys: TriangularSystem, z0: Sequence[float], dt: float, T: float):
    """Forward-Euler rollout on ``floor(T/dt) + 1`` grid points.

    Returns ``(t, z)`` arrays of shape ``(N+1,)`` and ``(N+1, n)``.
    """
    if len(z0) != sys.n:
        raise ValueError(f"z0 has dimension {len(z0)}, system expects {sys.n}")
    steps = step_count(dt, T)
    out = np.empty((steps + 1, sys.n))
    z = [float(v) for v in z0]
    out[0] = z
    for k in range(steps):
        try:
            dz = sys.derivative(k * dt, z)
            z = [a + dt * b for a, b in zip(z, dz)]
        except OverflowError:
            raise SimulationError("plant state overflowed", k + 1, (k + 1) * dt) from None
        if not all(math.isfinite(v) for v in z):
            raise SimulationError("non-finite plant state", k + 1, (k + 1) * dt)
        out[k + 1] = z
    return np.arange(steps + 1) * dt, out


def paper_example(input_signal: Optional[Signal] = None) -> TriangularSystem:
    """Three-state chain ``z1' = z2, z2' = z3, z3' = -z3 + d`` with d = 0.1 sin t."""
    d = Signal.sine(0.1, 1.0) if input_signal is None else input_signal
    return TriangularSystem(
        n=3,
        phi=(None, None, Polynomial.monomial(-1.0, (0, 0, 1))),
        eta=d,
        name="paper-example-3state",
    )


def paper_example_augmented(input_signal: Optional[Signal] = None) -> TriangularSystem:
    sys = augment_with_input(paper_example(input_signal))
    return TriangularSystem(sys.n, sys.phi, sys.eta, name="paper-example-augmented")


SYSTEM_PRESETS = {
    "paper-example-3state": paper_example,
    "paper-example-augmented": paper_example_augmented,
}
