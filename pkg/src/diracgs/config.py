"""Flat key=value run configuration.

Lines are ``key = value``; blank lines and ``#`` comments are ignored.
Every key has a default, unknown keys are rejected. The potential is a
family string: ``constant:v0,k0`` or ``decay:v0,gamma,k0,sigma``.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from pathlib import Path

from .errors import ConfigError
from .field import Grid
from .model import (Nonlinearity, ProblemModel, constant_pair, decay_pair)
from .solver import SolveOptions

_DEFAULTS: dict[str, str] = {
    "grid.n": "16",
    "grid.L": "8.0",
    "model.a": "1.0",
    "model.p": "2.5",
    "model.potential": "constant:0.2,1.0",
    "solver.tol_outer": "1e-6",
    "solver.max_outer": "500",
    "solver.step0": "1.0",
    "solver.armijo_c": "1e-4",
    "solver.starts": "3",
    "solver.seed": "0",
    "solver.tol_inner": "1e-9",
    "solver.unique_tol": "1e-6",
    "output.dir": "runs/latest",
}


@dataclass(frozen=True)
class RunConfig:
    n: int
    L: float
    a: float
    p: float
    potential: str
    tol_outer: float
    max_outer: int
    step0: float
    armijo_c: float
    starts: int
    seed: int
    tol_inner: float
    unique_tol: float
    output_dir: Path
    raw: dict[str, str] = dc_field(default_factory=dict, compare=False)

    def build_model(self) -> ProblemModel:
        grid = Grid(self.n, self.L)
        fam, _, rest = self.potential.partition(":")
        try:
            params = [float(x) for x in rest.split(",")] if rest else []
        except ValueError as exc:
            raise ConfigError(f"bad potential parameters {rest!r}") from exc
        if fam == "constant" and len(params) == 2:
            pp = constant_pair(grid, self.a, *params)
        elif fam == "decay" and len(params) == 4:
            pp = decay_pair(grid, self.a, *params)
        else:
            raise ConfigError(f"unknown potential spec {self.potential!r}")
        return ProblemModel(grid, self.a, Nonlinearity("power", self.p), pp)

    def build_options(self) -> SolveOptions:
        return SolveOptions(tol_outer=self.tol_outer, max_outer=self.max_outer,
                            step0=self.step0, armijo_c=self.armijo_c,
                            starts=self.starts, seed=self.seed,
                            tol_inner=self.tol_inner,
                            unique_tol=self.unique_tol)


def _parse_lines(text: str) -> dict[str, str]:
    out: dict[str, str] = {}
    for ln, line in enumerate(text.splitlines(), start=1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        if "=" not in body:
            raise ConfigError(f"line {ln}: expected key = value, got {line!r}")
        key, _, value = body.partition("=")
        key, value = key.strip(), value.strip()
        if key not in _DEFAULTS:
            raise ConfigError(f"line {ln}: unknown key {key!r}")
        if not value:
            raise ConfigError(f"line {ln}: empty value for {key!r}")
        out[key] = value
    return out


def _typed(kv: dict[str, str]) -> RunConfig:
    def geti(key: str) -> int:
        try:
            return int(kv[key])
        except ValueError as exc:
            raise ConfigError(f"{key} must be an integer, got {kv[key]!r}") from exc

    def getf(key: str) -> float:
        try:
            return float(kv[key])
        except ValueError as exc:
            raise ConfigError(f"{key} must be a number, got {kv[key]!r}") from exc

    try:
        return RunConfig(
            n=geti("grid.n"), L=getf("grid.L"), a=getf("model.a"),
            p=getf("model.p"), potential=kv["model.potential"],
            tol_outer=getf("solver.tol_outer"), max_outer=geti("solver.max_outer"),
            step0=getf("solver.step0"), armijo_c=getf("solver.armijo_c"),
            starts=geti("solver.starts"), seed=geti("solver.seed"),
            tol_inner=getf("solver.tol_inner"),
            unique_tol=getf("solver.unique_tol"),
            output_dir=Path(kv["output.dir"]), raw=dict(kv))
    except (ValueError, KeyError) as exc:
        raise ConfigError(str(exc)) from exc


def parse_config(path: str | Path) -> RunConfig:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    kv = dict(_DEFAULTS)
    kv.update(_parse_lines(text))
    return _typed(kv)
