"""Run-configuration parsing, canonical serialization, and hashing.

Format: flat `key = value` lines under one-level `[section]` headers, with
`#`-comments.  Unknown sections or keys are errors, never silently ignored.
Every key has a default drawn from the reference configuration, so the empty
file parses to the reference run.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field as dc_field
from typing import Optional

from .errors import ConfigError
from .grid import Grid
from .initdata import InitFamilySpec
from .params import ModelParams, make_params
from .solver import SolverConfig

# section -> key -> (type tag, default); type tags: f float, i int, s str,
# b bool, f? optional float ("none" allowed)
_SCHEMA = {
    "model": {
        "A": ("f", 1.0),
        "gamma": ("f", 2.0),
        "delta": ("f", 1.0),
        "alpha": ("f", 1.0),
    },
    "init": {
        "sigma": ("f", 1.0),
        "velocity_profile": ("s", "lorentz"),
        "velocity_amplitude": ("f", 1.0),
        "velocity_width": ("f", 1.0),
    },
    "grid": {
        "half_width": ("f", 50.0),
        "n": ("i", 4001),
    },
    "solver": {
        "formulation": ("s", "primitive"),
        "cfl": ("f", 0.5),
        "vacuum_floor": ("f", 1e-8),
        "t_end": ("f", 1.0),
        "output_stride": ("i", 4),
        "flux_blend": ("f", 0.1),
        "fixed_dt": ("f?", None),
    },
    "output": {
        "directory": ("s", "out"),
        "snapshots": ("b", True),
    },
}

_SECTION_ORDER = ("model", "init", "grid", "solver", "output")


@dataclass
class RunConfig:
    """Fully resolved run bundle; round-trips losslessly through its text form."""

    model: ModelParams
    init: InitFamilySpec
    grid: Grid
    solver: SolverConfig
    output_dir: str = "out"
    write_snapshots: bool = True
    sweep: Optional[dict] = None
    raw: dict = dc_field(default_factory=dict)

    def canonical_text(self) -> str:
        """Deterministic serialization with every default made explicit."""
        return render_config_text(self._values(), sweep=self.sweep)

    def config_hash(self) -> str:
        return hashlib.sha256(self.canonical_text().encode()).hexdigest()[:16]

    def _values(self) -> dict:
        return {
            "model": {
                "A": self.model.A,
                "gamma": self.model.gamma,
                "delta": self.model.delta,
                "alpha": self.model.alpha,
            },
            "init": {
                "sigma": self.init.sigma,
                "velocity_profile": self.init.velocity_profile,
                "velocity_amplitude": self.init.velocity_amplitude,
                "velocity_width": self.init.velocity_width,
            },
            "grid": {
                "half_width": self.grid.half_width,
                "n": self.grid.n,
            },
            "solver": {
                "formulation": self.solver.formulation,
                "cfl": self.solver.cfl,
                "vacuum_floor": self.solver.vacuum_floor,
                "t_end": self.solver.t_end,
                "output_stride": self.solver.output_stride,
                "flux_blend": self.solver.flux_blend,
                "fixed_dt": self.solver.fixed_dt,
            },
            "output": {
                "directory": self.output_dir,
                "snapshots": self.write_snapshots,
            },
        }


def render_config_text(values: dict, sweep: Optional[dict] = None) -> str:
    """Render a values mapping (section -> key -> value) as config text."""
    lines = []
    for sec in _SECTION_ORDER:
        lines.append(f"[{sec}]")
        for key, (kind, _default) in _SCHEMA[sec].items():
            lines.append(f"{key} = {_format_value(values[sec][key], kind)}")
        lines.append("")
    if sweep:
        lines.append("[sweep]")
        for key in sorted(sweep):
            lines.append(f"{key} = {', '.join(sweep[key])}")
        lines.append("")
    return "\n".join(lines)


def sweep_combinations(cfg: RunConfig) -> list:
    """Expand the [sweep] section into (label, config_text) pairs, cartesian
    over the sorted sweep keys."""
    import itertools

    if not cfg.sweep:
        return []
    keys = sorted(cfg.sweep)
    combos = []
    for values in itertools.product(*(cfg.sweep[k] for k in keys)):
        vals = {sec: dict(d) for sec, d in cfg._values().items()}
        parts = []
        for dotted, raw in zip(keys, values):
            sec, _, sub = dotted.partition(".")
            kind = _SCHEMA[sec][sub][0]
            vals[sec][sub] = _parse_value(raw, kind, 0)
            parts.append(f"{sub}={raw}")
        combos.append(("_".join(parts).replace("/", "-"), render_config_text(vals)))
    return combos


def _format_value(v, kind: str) -> str:
    if kind == "b":
        return "true" if v else "false"
    if kind in ("f", "f?"):
        return "none" if v is None else repr(float(v))
    return str(v)


def _parse_value(text: str, kind: str, lineno: int):
    text = text.strip()
    try:
        if kind == "f":
            return float(text)
        if kind == "f?":
            return None if text.lower() == "none" else float(text)
        if kind == "i":
            return int(text)
        if kind == "b":
            if text.lower() in ("true", "yes", "1"):
                return True
            if text.lower() in ("false", "no", "0"):
                return False
            raise ValueError(f"not a boolean: {text!r}")
        return text
    except ValueError as err:
        raise ConfigError(str(err), line=lineno) from None


def parse_config(text: str) -> RunConfig:
    """Parse and fully validate; unknown keys and sections are errors."""
    values = {sec: dict() for sec in _SCHEMA}
    sweep: dict = {}
    section = None
    seen = set()

    for lineno, rawline in enumerate(text.splitlines(), start=1):
        line = rawline.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("["):
            if not line.endswith("]"):
                raise ConfigError("unterminated section header", line=lineno)
            section = line[1:-1].strip()
            if section != "sweep" and section not in _SCHEMA:
                raise ConfigError(f"unknown section [{section}]", line=lineno)
            continue
        if "=" not in line:
            raise ConfigError("expected `key = value`", line=lineno, column=len(line))
        if section is None:
            raise ConfigError("key outside any [section]", line=lineno)
        key, _, val = line.partition("=")
        key = key.strip()
        val = val.strip()
        if section == "sweep":
            dotted = key
            sec, _, sub = dotted.partition(".")
            if sec not in _SCHEMA or sub not in _SCHEMA[sec]:
                raise ConfigError(f"unknown sweep key {dotted!r}", line=lineno)
            sweep[dotted] = [v.strip() for v in val.split(",") if v.strip()]
            continue
        if key not in _SCHEMA[section]:
            raise ConfigError(f"unknown key {key!r} in section [{section}]", line=lineno)
        if (section, key) in seen:
            raise ConfigError(f"duplicate key {key!r} in section [{section}]", line=lineno)
        seen.add((section, key))
        values[section][key] = _parse_value(val, _SCHEMA[section][key][0], lineno)

    for sec, keys in _SCHEMA.items():
        for key, (_kind, default) in keys.items():
            values[sec].setdefault(key, default)

    try:
        model = make_params(
            values["model"]["A"],
            values["model"]["gamma"],
            values["model"]["delta"],
            values["model"]["alpha"],
        )
        init = InitFamilySpec(
            sigma=values["init"]["sigma"],
            velocity_profile=values["init"]["velocity_profile"],
            velocity_amplitude=values["init"]["velocity_amplitude"],
            velocity_width=values["init"]["velocity_width"],
        )
        grid = Grid(half_width=values["grid"]["half_width"], n=values["grid"]["n"])
        solver = SolverConfig(
            formulation=values["solver"]["formulation"],
            cfl=values["solver"]["cfl"],
            vacuum_floor=values["solver"]["vacuum_floor"],
            t_end=values["solver"]["t_end"],
            output_stride=values["solver"]["output_stride"],
            flux_blend=values["solver"]["flux_blend"],
            fixed_dt=values["solver"]["fixed_dt"],
        )
    except ValueError as err:
        raise ConfigError(str(err)) from None

    return RunConfig(
        model=model,
        init=init,
        grid=grid,
        solver=solver,
        output_dir=values["output"]["directory"],
        write_snapshots=values["output"]["snapshots"],
        sweep=sweep or None,
        raw=values,
    )


def reference_config() -> RunConfig:
    """The reference run: empty text, all defaults."""
    return parse_config("")
