"""JSON run configurations and the built-in experiment presets.

A config is a single JSON object. ``"preset"`` names a base configuration
whose fields the remaining keys override (nested objects merge key by key)::

    {"preset": "fig3-fuzzy-1e3", "T": 10, "observer": {"gate_threshold": 0.03}}
"""
from __future__ import annotations

import copy
import json
import os
from dataclasses import dataclass, field
from typing import Any, Optional

from . import plant
from .fuzzy import LABELS_5, LABELS_7, build_psi
from .observer import ObserverConfig
from .simulate import Scenario


class ConfigError(ValueError):
    def __init__(self, field_name: str, message: str):
        super().__init__(f"{field_name}: {message}")
        self.field = field_name


TOP_KEYS = {"preset", "name", "system", "observer", "z0", "observer_init", "dt", "T", "stride", "output"}
SYSTEM_KEYS = {"preset", "input", "n", "phi", "augment"}
SIGNAL_KEYS = {"kind", "amplitude", "omega", "phase", "value"}
OBSERVER_KEYS = {
    "variant",
    "lambdas",
    "alphas",
    "gate_threshold",
    "gamma0",
    "learning_rate",
    "gamma_bounds",
    "fd_delta",
    "loss_channels",
    "fuzzy",
}
FUZZY_KEYS = {"psi1", "psi2", "psi3"}
PSI_KEYS = {"peaks", "output_peaks", "scale", "resolution"}
INIT_KEYS = {"z_hat", "z_tilde", "theta"}
OUTPUT_KEYS = {"csv", "plot", "channels"}

_PAPER_OBSERVER = {
    "gate_threshold": 0.025,
    "gamma0": 0.5,
    "learning_rate": 0.0,
    "gamma_bounds": [0.05, 1.0],
    "fd_delta": 1e-3,
    "loss_channels": "all",
}


def _three_state(name, variant, dt, stride):
    return {
        "name": name,
        "system": {"preset": "paper-example-3state"},
        "observer": {"variant": variant, "lambdas": [15.0] * 3, "alphas": [30.0] * 3, **_PAPER_OBSERVER},
        "z0": [0.2, 0.2, 0.2],
        "observer_init": {"z_hat": [0.05, 0.0, 0.05], "z_tilde": [0.05, 0.0], "theta": 0.05},
        "dt": dt,
        "T": 20.0,
        "stride": stride,
        "output": {"plot": False},
    }


def _augmented(name, variant, dt, stride, omega=1.0, rate=0.0):
    return {
        "name": name,
        "system": {
            "preset": "paper-example-augmented",
            "input": {"kind": "sine", "amplitude": 0.1, "omega": omega, "phase": 0.0},
        },
        "observer": {
            "variant": variant,
            "lambdas": [15.0] * 4,
            "alphas": [30.0] * 4,
            **_PAPER_OBSERVER,
            "learning_rate": rate,
        },
        "z0": [0.2, 0.2, 0.2, 0.2],
        "observer_init": {"z_hat": [0.05, 0.0, 0.05, 0.05], "z_tilde": [0.05, 0.0, 0.0], "theta": 0.05},
        "dt": dt,
        "T": 20.0,
        "stride": stride,
        "output": {"plot": False},
    }


HIGH_FREQUENCY = 10.0

PRESETS = {
    "fig1-sign-1e5": _three_state("fig1-sign-1e5", "sign", 1e-5, 10),
    "fig3-sign-1e5": _augmented("fig3-sign-1e5", "sign", 1e-5, 10),
    "fig3-sign-1e3": _augmented("fig3-sign-1e3", "sign", 1e-3, 1),
    "fig3-fuzzy-1e3": _augmented("fig3-fuzzy-1e3", "fuzzy", 1e-3, 1),
    "fig4-adaptive": _augmented("fig4-adaptive", "adaptive", 1e-3, 1, HIGH_FREQUENCY, 0.004),
    "fig4-fuzzy-frozen": _augmented("fig4-fuzzy-frozen", "fuzzy", 1e-3, 1, HIGH_FREQUENCY),
    "fig4-sign-1e3": _augmented("fig4-sign-1e3", "sign", 1e-3, 1, HIGH_FREQUENCY),
}


@dataclass
class RunConfig:
    scenario: Scenario
    raw: dict
    csv: Optional[str] = None
    plot: bool = False
    channels: Optional[list] = None

    @property
    def name(self) -> str:
        return self.scenario.name

    @property
    def csv_name(self) -> str:
        return self.csv or f"{self.name}.csv"


def _merge(base: dict, over: dict) -> dict:
    out = copy.deepcopy(base)
    for key, value in over.items():
        if isinstance(value, dict) and isinstance(out.get(key), dict):
            out[key] = _merge(out[key], value)
        else:
            out[key] = copy.deepcopy(value)
    return out


def _check_keys(obj: Any, allowed: set, where: str) -> None:
    if not isinstance(obj, dict):
        raise ConfigError(where, f"expected an object, got {type(obj).__name__}")
    unknown = sorted(set(obj) - allowed)
    if unknown:
        raise ConfigError(f"{where}.{unknown[0]}" if where else unknown[0], "unknown key")


def _need(obj: dict, key: str, where: str):
    if key not in obj:
        raise ConfigError(f"{where}.{key}" if where else key, "missing required field")
    return obj[key]


def _floats(value, where: str, length: Optional[int] = None) -> list:
    if not isinstance(value, list) or not all(
        isinstance(v, (int, float)) and not isinstance(v, bool) for v in value
    ):
        raise ConfigError(where, "expected a list of numbers")
    if length is not None and len(value) != length:
        raise ConfigError(where, f"expected {length} values, got {len(value)}")
    return [float(v) for v in value]


def _number(value, where: str) -> float:
    if not isinstance(value, (int, float)) or isinstance(value, bool):
        raise ConfigError(where, f"expected a number, got {value!r}")
    return float(value)


def expand(data: dict) -> dict:
    """Resolve ``preset`` references into one fully populated config dict."""
    _check_keys(data, TOP_KEYS, "")
    name = data.get("preset")
    if name is None:
        return copy.deepcopy(data)
    if name not in PRESETS:
        raise ConfigError("preset", f"unknown preset {name!r}; known: {', '.join(PRESETS)}")
    over = {k: v for k, v in data.items() if k != "preset"}
    if isinstance(over.get("system"), str):
        over["system"] = {"preset": over["system"]}
    return _merge(PRESETS[name], over)


def parse_signal(obj, where: str) -> plant.Signal:
    if obj == "zero":
        return plant.Signal.zero()
    _check_keys(obj, SIGNAL_KEYS, where)
    kind = obj.get("kind", "sine")
    if kind == "sine":
        return plant.Signal.sine(
            _number(obj.get("amplitude", 1.0), f"{where}.amplitude"),
            _number(obj.get("omega", 1.0), f"{where}.omega"),
            _number(obj.get("phase", 0.0), f"{where}.phase"),
        )
    if kind == "constant":
        return plant.Signal.constant(_number(obj.get("value", 0.0), f"{where}.value"))
    if kind == "zero":
        return plant.Signal.zero()
    raise ConfigError(f"{where}.kind", f"unknown signal kind {kind!r}")


def parse_polynomial(obj, where: str) -> Optional[plant.Polynomial]:
    if obj is None:
        return None
    if not isinstance(obj, list):
        raise ConfigError(where, "expected null or a list of [coef, [powers...]] terms")
    terms = []
    for k, term in enumerate(obj):
        try:
            coef, powers = term
            terms.append((float(coef), tuple(int(p) for p in powers)))
        except (TypeError, ValueError):
            raise ConfigError(f"{where}[{k}]", "expected [coef, [powers...]]") from None
    return plant.Polynomial(tuple(terms))


def parse_system(obj, where: str = "system") -> plant.TriangularSystem:
    if isinstance(obj, str):
        obj = {"preset": obj}
    _check_keys(obj, SYSTEM_KEYS, where)
    signal = parse_signal(obj["input"], f"{where}.input") if "input" in obj else None
    try:
        if "preset" in obj:
            extra = set(obj) - {"preset", "input"}
            if extra:
                raise ConfigError(f"{where}.{sorted(extra)[0]}", "not allowed together with a preset")
            factory = plant.SYSTEM_PRESETS.get(obj["preset"])
            if factory is None:
                raise ConfigError(
                    f"{where}.preset",
                    f"unknown system {obj['preset']!r}; known: {', '.join(plant.SYSTEM_PRESETS)}",
                )
            return factory(signal)
        n = _need(obj, "n", where)
        if not isinstance(n, int) or isinstance(n, bool):
            raise ConfigError(f"{where}.n", "expected an integer")
        phis = obj.get("phi", [])
        if not isinstance(phis, list):
            raise ConfigError(f"{where}.phi", "expected a list")
        phi = tuple(parse_polynomial(p, f"{where}.phi[{i}]") for i, p in enumerate(phis))
        sys = plant.TriangularSystem(n, phi, signal or plant.Signal.zero())
        if obj.get("augment", False):
            sys = plant.augment_with_input(sys)
        return sys
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(where, str(exc)) from None


def parse_fuzzy(obj, m: int, where: str) -> Optional[tuple]:
    if obj is None:
        return None
    _check_keys(obj, FUZZY_KEYS, where)
    systems = {}
    for index, labels in ((1, LABELS_5), (2, LABELS_7), (3, LABELS_7)):
        key = f"psi{index}"
        spec = obj.get(key, {})
        _check_keys(spec, PSI_KEYS, f"{where}.{key}")
        kw = {}
        for name in ("peaks", "output_peaks"):
            if name in spec:
                kw[name] = _floats(spec[name], f"{where}.{key}.{name}", len(labels))
        if "scale" in spec:
            kw["scale"] = _number(spec["scale"], f"{where}.{key}.scale")
        if "resolution" in spec:
            res = spec["resolution"]
            if not isinstance(res, int) or isinstance(res, bool):
                raise ConfigError(f"{where}.{key}.resolution", "expected an integer")
            kw["resolution"] = res
        try:
            systems[index] = build_psi(labels, name=key, **kw)
        except ValueError as exc:
            raise ConfigError(f"{where}.{key}", str(exc)) from None
    return tuple(systems[min(i + 1, 3)] for i in range(m))


def parse_observer(obj, where: str = "observer") -> ObserverConfig:
    _check_keys(obj, OBSERVER_KEYS, where)
    lambdas = _floats(_need(obj, "lambdas", where), f"{where}.lambdas")
    alphas = _floats(_need(obj, "alphas", where), f"{where}.alphas")
    kw: dict = {}
    for key in ("gate_threshold", "gamma0", "learning_rate", "fd_delta"):
        if key in obj:
            kw[key] = _number(obj[key], f"{where}.{key}")
    if "gamma_bounds" in obj:
        kw["gamma_bounds"] = tuple(_floats(obj["gamma_bounds"], f"{where}.gamma_bounds", 2))
    if "loss_channels" in obj:
        kw["loss_channels"] = obj["loss_channels"]
    kw["psi"] = parse_fuzzy(obj.get("fuzzy"), len(lambdas), f"{where}.fuzzy")
    try:
        return ObserverConfig(variant=_need(obj, "variant", where), lambdas=lambdas, alphas=alphas, **kw)
    except ValueError as exc:
        msg = str(exc)
        field_name = msg.split(" ", 1)[0].rstrip(":")
        raise ConfigError(f"{where}.{field_name}", msg) from None


def build(data: dict) -> RunConfig:
    """Validate an expanded config dict into a ``RunConfig``."""
    cfg = expand(data)
    _check_keys(cfg, TOP_KEYS, "")
    system = parse_system(_need(cfg, "system", ""))
    observer = parse_observer(_need(cfg, "observer", ""))
    n = system.n
    init = _need(cfg, "observer_init", "")
    _check_keys(init, INIT_KEYS, "observer_init")
    output = cfg.get("output", {})
    _check_keys(output, OUTPUT_KEYS, "output")
    stride = cfg.get("stride", 1)
    if not isinstance(stride, int) or isinstance(stride, bool) or stride < 1:
        raise ConfigError("stride", f"expected an integer >= 1, got {stride!r}")
    dt = _number(_need(cfg, "dt", ""), "dt")
    T = _number(_need(cfg, "T", ""), "T")
    if not dt > 0:
        raise ConfigError("dt", f"must be > 0, got {dt}")
    if not T >= dt:
        raise ConfigError("T", f"must be >= dt, got {T}")
    if observer.m != n:
        raise ConfigError("observer.lambdas", f"expected {n} channels for a {n}-state system, got {observer.m}")
    try:
        scenario = Scenario(
            system=system,
            observer=observer,
            z0=_floats(_need(cfg, "z0", ""), "z0", n),
            z_hat0=_floats(_need(init, "z_hat", "observer_init"), "observer_init.z_hat", n),
            z_tilde0=_floats(_need(init, "z_tilde", "observer_init"), "observer_init.z_tilde", n - 1),
            theta0=_number(_need(init, "theta", "observer_init"), "observer_init.theta"),
            dt=dt,
            T=T,
            stride=stride,
            name=str(cfg.get("name", "run")),
        )
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError("scenario", str(exc)) from None
    channels = output.get("channels")
    if channels is not None:
        if not isinstance(channels, list) or not all(isinstance(c, int) and 1 <= c <= n for c in channels):
            raise ConfigError("output.channels", f"expected channel numbers in 1..{n}")
    return RunConfig(
        scenario=scenario,
        raw=cfg,
        csv=output.get("csv"),
        plot=bool(output.get("plot", False)),
        channels=channels,
    )


def parse_config(source) -> RunConfig:
    """Load a config from a dict, a preset name, inline JSON text or a file path."""
    if isinstance(source, dict):
        return build(source)
    text = str(source)
    if text in PRESETS:
        return build({"preset": text})
    if text.lstrip().startswith("{"):
        where = "<inline>"
    else:
        if not os.path.exists(text):
            raise ConfigError("config", f"no such file or preset: {text}")
        where = text
        with open(text, encoding="utf-8") as fh:
            text = fh.read()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError("config", f"malformed JSON in {where}: {exc}") from None
    return build(data)


def preset_scenario(name: str, **overrides) -> Scenario:
    """Scenario for a preset with top-level fields overridden."""
    return build({"preset": name, **overrides}).scenario
