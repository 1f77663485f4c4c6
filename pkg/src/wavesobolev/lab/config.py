"""Experiment configuration: INI files and an equivalent JSON form.

A complete annotated INI example::

    [experiment]
    name = decay          ; comparability | scaling | decay | series | solve | wavemap | persistence
    seed = 20240501       ; unsigned 64-bit seed for every random field
    out = runs/decay      ; output directory (created if missing)

    [grid]
    n = 1                 ; spatial dimension
    nt = 2048             ; time points (power of two >= 8)
    nx = 64               ; points per spatial axis
    lt = 16               ; time period (>= 16)
    lx = 6.283185307179586

    [params]
    s = 1
    theta = 0.6
    gamma = 1
    eps = 0.5
    alpha = 1

    [sweep]
    T = 0.5, 0.25, 0.125, 0.0625

    [options]             ; experiment-specific extras, see EXPERIMENT_OPTIONS
    modulation = 6

The JSON form carries the same keys as nested objects::

    {"experiment": {"name": "decay", "seed": 20240501, "out": "runs/decay"},
     "grid": {"n": 1, "nt": 2048, ...}, "params": {...}, "sweep": {"T": [0.5, ...]},
     "options": {"modulation": 6}}
"""
from __future__ import annotations

import configparser
import json
import math
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path

from ..grid import GridSpec

__all__ = [
    "EXPERIMENTS",
    "EXPERIMENT_OPTIONS",
    "ConfigError",
    "ExperimentConfig",
    "default_config",
    "load_config",
    "dump_ini",
    "dump_json",
]

EXPERIMENTS = ("comparability", "scaling", "decay", "series", "solve", "wavemap", "persistence")

# option -> default, per experiment
EXPERIMENT_OPTIONS: dict[str, dict[str, float]] = {
    "comparability": {},
    "scaling": {"oversample": 4},
    "decay": {"modulation": 6.0, "xi_base": 1},
    "series": {"J": 8, "series_T": 0.125, "band": 0.5},
    "solve": {"amplitude": 1e-3, "max_iter": 20, "T0": 0.5, "triples": 20},
    "wavemap": {"amplitude": 0.1, "mode": 1, "max_iter": 40, "T0": 0.5},
    "persistence": {"amplitude": 1e-3, "sigma": 2.0, "max_iter": 20, "T0": 0.5},
}

_DEFAULT_GRIDS = {
    "comparability": dict(n=1, Nt=64, Nx=64, Lt=16.0, Lx=16.0),
    "scaling": dict(n=1, Nt=512, Nx=8, Lt=32.0, Lx=16.0),
    "decay": dict(n=1, Nt=2048, Nx=64, Lt=16.0, Lx=2 * math.pi),
    "series": dict(n=1, Nt=512, Nx=256, Lt=32.0, Lx=32.0),
    "solve": dict(n=1, Nt=256, Nx=64, Lt=16.0, Lx=16.0),
    "wavemap": dict(n=1, Nt=256, Nx=64, Lt=16.0, Lx=8.0),
    "persistence": dict(n=1, Nt=256, Nx=64, Lt=16.0, Lx=16.0),
}

_DEFAULT_T = {
    "scaling": (0.5, 0.25, 0.125),
    "decay": (0.5, 0.25, 0.125, 0.0625),
    "series": (0.5, 0.25, 0.125),
}


class ConfigError(ValueError):
    """Carries every validation problem found, not just the first."""

    def __init__(self, problems: list[str]):
        super().__init__("; ".join(problems))
        self.problems = problems


@dataclass(frozen=True)
class ExperimentConfig:
    experiment: str
    grid: GridSpec = field(default_factory=GridSpec)
    s: float = 1.0
    theta: float = 0.6
    gamma: float = 1.0
    eps: float = 0.5
    alpha: float = 1.0
    T_list: tuple[float, ...] = ()
    seed: int = 0
    out: str = "runs"
    options: dict = field(default_factory=dict)

    def problems(self) -> list[str]:
        out = []
        if self.experiment not in EXPERIMENTS:
            out.append(f"unknown experiment {self.experiment!r}; choose from {', '.join(EXPERIMENTS)}")
            return out
        if not 0 <= self.seed < 2**64:
            out.append("seed must be an unsigned 64-bit integer")
        if not 0 <= self.alpha <= 1:
            out.append("alpha must lie in [0, 1]")
        if self.eps < 0:
            out.append("eps must be >= 0")
        if self.theta <= 0.5 and self.experiment in ("decay", "solve", "wavemap", "persistence"):
            out.append("theta must exceed 1/2")
        if any(not 0 < T < 1 for T in self.T_list):
            out.append("every T must lie in (0, 1)")
        if self.experiment in ("decay",) and len(self.T_list) < 4:
            out.append("decay needs at least 4 values of T")
        if self.experiment in ("scaling", "series") and len(self.T_list) < 1:
            out.append(f"{self.experiment} needs at least one T")
        allowed = EXPERIMENT_OPTIONS[self.experiment]
        for key in self.options:
            if key not in allowed:
                out.append(f"unknown option {key!r} for {self.experiment}")
        if self.experiment == "wavemap" and abs(self.grid.Lt / self.grid.Lx - round(self.grid.Lt / self.grid.Lx)) > 1e-12:
            out.append("wavemap needs Lt to be an integer multiple of Lx")
        return out

    def validate(self) -> "ExperimentConfig":
        problems = self.problems()
        if problems:
            raise ConfigError(problems)
        return self

    def option(self, key: str):
        return self.options.get(key, EXPERIMENT_OPTIONS[self.experiment][key])

    def to_dict(self) -> dict:
        g = self.grid
        return {
            "experiment": {"name": self.experiment, "seed": self.seed, "out": self.out},
            "grid": {"n": g.n, "nt": g.Nt, "nx": g.Nx, "lt": g.Lt, "lx": g.Lx},
            "params": {"s": self.s, "theta": self.theta, "gamma": self.gamma,
                       "eps": self.eps, "alpha": self.alpha},
            "sweep": {"T": list(self.T_list)},
            "options": dict(self.options),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        problems = []
        exp = d.get("experiment", {})
        name = exp.get("name")
        if name is None:
            raise ConfigError(["missing experiment name"])
        base = default_config(name) if name in EXPERIMENTS else cls(experiment=name)
        try:
            gd = {**{k.lower(): v for k, v in asdict(base.grid).items()}, **d.get("grid", {})}
            grid = GridSpec(n=int(gd["n"]), Nt=int(gd["nt"]), Nx=int(gd["nx"]),
                            Lt=float(gd["lt"]), Lx=float(gd["lx"]))
        except (ValueError, KeyError) as exc:
            problems.append(f"grid: {exc}")
            grid = base.grid
        p = d.get("params", {})
        unknown = set(p) - {"s", "theta", "gamma", "eps", "alpha"}
        problems += [f"unknown parameter {k!r}" for k in sorted(unknown)]
        T_list = d.get("sweep", {}).get("T", base.T_list)
        cfg = cls(
            experiment=name,
            grid=grid,
            s=float(p.get("s", base.s)),
            theta=float(p.get("theta", base.theta)),
            gamma=float(p.get("gamma", base.gamma)),
            eps=float(p.get("eps", base.eps)),
            alpha=float(p.get("alpha", base.alpha)),
            T_list=tuple(float(T) for T in T_list),
            seed=int(exp.get("seed", base.seed)),
            out=str(exp.get("out", base.out)),
            options={k: _number(v) for k, v in d.get("options", {}).items()},
        )
        problems += cfg.problems()
        if problems:
            raise ConfigError(problems)
        return cfg

    def with_overrides(self, **kw) -> "ExperimentConfig":
        kw = {k: v for k, v in kw.items() if v is not None}
        return replace(self, **kw)


def _number(v):
    if isinstance(v, (int, float)):
        return v
    f = float(v)
    return int(f) if f.is_integer() and "." not in str(v) and "e" not in str(v).lower() else f


def default_config(name: str) -> ExperimentConfig:
    if name not in EXPERIMENTS:
        raise ConfigError([f"unknown experiment {name!r}; choose from {', '.join(EXPERIMENTS)}"])
    return ExperimentConfig(experiment=name, grid=GridSpec(**_DEFAULT_GRIDS[name]),
                            T_list=_DEFAULT_T.get(name, ()), out=f"runs/{name}")


def _ini_to_dict(text: str) -> dict:
    cp = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
    cp.read_string(text)
    d = {sec: dict(cp[sec]) for sec in cp.sections()}
    if "sweep" in d and "t" in d["sweep"]:
        d["sweep"] = {"T": [float(x) for x in d["sweep"].pop("t").split(",") if x.strip()]}
    return d


def load_config(path: str | Path) -> ExperimentConfig:
    """Read ``.ini``/``.cfg`` or ``.json``; the format follows the suffix."""
    path = Path(path)
    text = path.read_text()
    if path.suffix.lower() == ".json":
        return ExperimentConfig.from_dict(json.loads(text))
    return ExperimentConfig.from_dict(_ini_to_dict(text))


def dump_json(cfg: ExperimentConfig) -> str:
    return json.dumps(cfg.to_dict(), indent=2, sort_keys=True)


def dump_ini(cfg: ExperimentConfig) -> str:
    d = cfg.to_dict()
    lines = []
    for sec in ("experiment", "grid", "params", "sweep", "options"):
        lines.append(f"[{sec}]")
        for k, v in d[sec].items():
            if sec == "sweep":
                v = ", ".join(repr(float(x)) for x in v)
            elif isinstance(v, float):
                v = repr(v)
            lines.append(f"{k} = {v}")
        lines.append("")
    return "\n".join(lines)
