"""Mamdani fuzzy inference used as a smooth replacement for ``sign``.

Each system maps a crisp error onto [-1, 1] through triangular input sets,
identity rules (``If e is PS then psi is PS``), min implication, max
aggregation and centroid defuzzification on a uniform grid.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

LABELS_5 = ("NB", "NS", "ZR", "PS", "PB")
LABELS_7 = ("NBB", "NB", "NS", "ZR", "PS", "PB", "PBB")

DEFAULT_RESOLUTION = 1001


@dataclass(frozen=True)
class MembershipFunction:
    """Triangular set ``(left, peak, right)`` with optional shoulder plateaus.

    A left shoulder holds degree 1 for every ``x <= peak``, a right shoulder
    for every ``x >= peak``.
    """

    left: float
    peak: float
    right: float
    left_shoulder: bool = False
    right_shoulder: bool = False

    def __post_init__(self):
        if not self.left <= self.peak <= self.right:
            raise ValueError(
                f"breakpoints must satisfy left <= peak <= right, got "
                f"({self.left}, {self.peak}, {self.right})"
            )

    def __call__(self, x: float) -> float:
        if x < self.peak:
            if self.left_shoulder:
                return 1.0
            if x <= self.left:
                return 0.0
            return (x - self.left) / (self.peak - self.left)
        if x > self.peak:
            if self.right_shoulder:
                return 1.0
            if x >= self.right:
                return 0.0
            return (self.right - x) / (self.right - self.peak)
        return 1.0

    def degrees(self, xs: np.ndarray) -> np.ndarray:
        """Vectorised evaluation over an array of points."""
        return np.array([self(float(x)) for x in np.asarray(xs, dtype=float).ravel()]).reshape(
            np.shape(xs)
        )


def eval_membership(mf: MembershipFunction, x: float) -> float:
    return mf(x)


@dataclass(frozen=True)
class FuzzyRule:
    antecedent: str
    consequent: str


def _symmetric_grid(resolution: int) -> np.ndarray:
    # built from one half so that grid[k] == -grid[-1 - k] exactly
    if resolution % 2 == 1:
        half = np.linspace(0.0, 1.0, (resolution + 1) // 2)
        return np.concatenate([-half[:0:-1], half])
    half = np.linspace(0.0, 1.0, resolution + 1)[1::2]
    return np.concatenate([-half[::-1], half])


@dataclass(frozen=True, eq=False)
class FuzzySystem:
    """Single-input single-output Mamdani system on the universe [-1, 1].

    Inputs are divided by ``scale`` and clamped to the universe before
    inference. Instances are immutable and can be called directly in place
    of a switching function.
    """

    input_sets: tuple[tuple[str, MembershipFunction], ...]
    output_sets: tuple[tuple[str, MembershipFunction], ...]
    rules: tuple[FuzzyRule, ...]
    scale: float = 1.0
    resolution: int = DEFAULT_RESOLUTION
    name: str = "psi"
    _grid: np.ndarray = field(init=False, repr=False)
    _rule_in: tuple = field(init=False, repr=False)
    _rule_out: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if not self.scale > 0:
            raise ValueError(f"{self.name}: scale must be positive, got {self.scale}")
        if int(self.resolution) != self.resolution or self.resolution < 3:
            raise ValueError(f"{self.name}: resolution must be an integer >= 3")
        ins = dict(self.input_sets)
        outs = dict(self.output_sets)
        for rule in self.rules:
            if rule.antecedent not in ins:
                raise ValueError(f"{self.name}: unknown input label {rule.antecedent!r}")
            if rule.consequent not in outs:
                raise ValueError(f"{self.name}: unknown output label {rule.consequent!r}")

        grid = _symmetric_grid(int(self.resolution))
        out_deg = {label: mf.degrees(grid) for label, mf in self.output_sets}
        object.__setattr__(self, "_grid", grid)
        object.__setattr__(self, "_rule_in", tuple(ins[r.antecedent] for r in self.rules))
        object.__setattr__(
            self, "_rule_out", np.array([out_deg[r.consequent] for r in self.rules])
        )

        probe = np.linspace(-1.0, 1.0, 2001)
        cover = sum(mf.degrees(probe) for mf in self._rule_in)
        if np.min(cover) <= 0.0:
            gap = probe[np.argmin(cover)]
            raise ValueError(f"{self.name}: input sets leave the universe uncovered at x={gap:.4f}")

    @property
    def grid(self) -> np.ndarray:
        return self._grid

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(label for label, _ in self.input_sets)

    def activations(self, epsilon: float) -> list[float]:
        x = min(1.0, max(-1.0, epsilon / self.scale))
        return [mf(x) for mf in self._rule_in]

    def aggregate(self, epsilon: float) -> np.ndarray:
        """Max of the min-clipped consequent sets, sampled on the grid."""
        agg = None
        for k, a in enumerate(self.activations(epsilon)):
            if a <= 0.0:
                continue
            clipped = np.minimum(self._rule_out[k], a)
            agg = clipped if agg is None else np.maximum(agg, clipped)
        if agg is None:
            return np.zeros_like(self._grid)
        return agg

    def __call__(self, epsilon: float) -> float:
        agg = self.aggregate(epsilon)
        # fold mirrored grid points together so psi(-e) == -psi(e) bit for bit
        n = len(agg)
        half = n // 2
        pos = agg[n - half :]
        neg = agg[half - 1 :: -1]
        area = (pos + neg).sum() + (agg[half] if n % 2 else 0.0)
        if area <= 0.0:
            return 0.0
        return float((pos - neg) @ self._grid[n - half :] / area)


def infer(fs: FuzzySystem, epsilon: float) -> float:
    return fs(epsilon)


def partition_sets(
    labels: Sequence[str], peaks: Sequence[float]
) -> tuple[tuple[str, MembershipFunction], ...]:
    """Triangles whose feet sit on the neighbouring peaks; end sets are shoulders."""
    if len(labels) != len(peaks):
        raise ValueError(f"expected {len(labels)} peaks, got {len(peaks)}")
    if any(b <= a for a, b in zip(peaks, peaks[1:])):
        raise ValueError("peaks must be strictly increasing")
    last = len(peaks) - 1
    sets = []
    for k, (label, p) in enumerate(zip(labels, peaks)):
        left = peaks[k - 1] if k > 0 else p
        right = peaks[k + 1] if k < last else p
        sets.append(
            (label, MembershipFunction(left, p, right, left_shoulder=k == 0, right_shoulder=k == last))
        )
    return tuple(sets)


def standard_peaks(count: int) -> tuple[float, ...]:
    half = (count - 1) // 2
    return tuple(k / half for k in range(-half, half + 1))


def build_psi(
    labels: Sequence[str],
    peaks: Sequence[float] | None = None,
    output_peaks: Sequence[float] | None = None,
    scale: float = 1.0,
    resolution: int = DEFAULT_RESOLUTION,
    name: str = "psi",
) -> FuzzySystem:
    peaks = standard_peaks(len(labels)) if peaks is None else tuple(peaks)
    output_peaks = peaks if output_peaks is None else tuple(output_peaks)
    return FuzzySystem(
        input_sets=partition_sets(labels, peaks),
        output_sets=partition_sets(labels, output_peaks),
        rules=tuple(FuzzyRule(label, label) for label in labels),
        scale=scale,
        resolution=resolution,
        name=name,
    )


def build_standard_psi(index: int, scale: float = 1.0, resolution: int = DEFAULT_RESOLUTION) -> FuzzySystem:
    """Canonical psi_1 (5 sets) or psi_2/psi_3 (7 sets) on a uniform partition."""
    if index == 1:
        labels = LABELS_5
    elif index in (2, 3):
        labels = LABELS_7
    else:
        raise ValueError(f"psi index must be 1, 2 or 3, got {index}")
    return build_psi(labels, scale=scale, resolution=resolution, name=f"psi{index}")
