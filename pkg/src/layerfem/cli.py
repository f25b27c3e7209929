"""Command line front end: ``layerfem <command> [options]``.

Commands
--------
solve      nodal solution dump ``x U1 U2`` (one file per epsilon with
           ``--epsilon-sweep``)
converge   double-mesh convergence table as CSV
meshinfo   mesh dump ``i x_i h_i``
validate   sampled check of the well-posedness conditions
"""

from __future__ import annotations

import argparse
import configparser
import io
import math
import re
import sys
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .analysis import convergence_table
from .mesh import MeshKind, MeshSpec, MeshSpecError, build_mesh
from .problem import PiecewiseSource, Problem, builtin_example1, validate_problem
from .solve import solve_bvp

__all__ = ["ConfigError", "RunConfig", "main", "parse_config", "run"]

COMMANDS = ("solve", "converge", "meshinfo", "validate")
DEFAULT_EPSILON = 2.0**-18
DEFAULT_N_LIST = (32, 64, 128, 256, 512, 1024, 2048)
DEFAULT_N_SINGLE = 512

_COEFFICIENT_KEYS = ("d", "b1", "b2", "a11", "a12", "a21", "a22", "f1_left", "f1_right",
                     "f2_left", "f2_right", "beta1", "beta2", "alpha", "sigma1", "sigma2")
_SECTION_KEYS = {
    "problem": {"name", "epsilon", *_COEFFICIENT_KEYS},
    "mesh": {"kind", "tau0", "n"},
    "run": {"command", "out", "epsilon_sweep"},
}
_ALL_KEYS = set().union(*_SECTION_KEYS.values())


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    command: str
    problem: str = "example1"
    constants: dict = field(default_factory=dict)
    epsilon: float = DEFAULT_EPSILON
    kind: MeshKind = MeshKind.SHISHKIN
    tau0: float = 2.0
    N: tuple = None
    out: str = None
    epsilon_sweep: tuple = None

    def N_list(self) -> tuple:
        if self.N is not None:
            return self.N
        return DEFAULT_N_LIST if self.command == "converge" else (DEFAULT_N_SINGLE,)

    def build_problem(self, epsilon: float = None) -> Problem:
        eps = self.epsilon if epsilon is None else epsilon
        if not self.constants:
            return builtin_example1(eps)
        c = {"d": 0.5, "b1": 1.0, "b2": 1.0, "a11": 2.0, "a12": -1.0, "a21": -1.0,
             "a22": 2.0, "f1_left": 1.0, "f1_right": -0.8, "f2_left": -2.0,
             "f2_right": 1.8, "beta1": 1.0, "beta2": 1.0, "alpha": 1.0,
             "sigma1": 1.0, "sigma2": 1.0}
        c.update(self.constants)
        d = c["d"]
        return Problem(
            epsilon=eps, d=d, b1=c["b1"], b2=c["b2"],
            a=((c["a11"], c["a12"]), (c["a21"], c["a22"])),
            f1=PiecewiseSource(c["f1_left"], c["f1_right"], d),
            f2=PiecewiseSource(c["f2_left"], c["f2_right"], d),
            beta1=c["beta1"], beta2=c["beta2"], alpha=c["alpha"],
            sigma1=c["sigma1"], sigma2=c["sigma2"], name="custom")


def _number(text: str, key: str) -> float:
    s = str(text).strip().replace(" ", "")
    m = re.fullmatch(r"2(?:\^|\*\*)\(?(-?\d+)\)?", s)
    try:
        value = 2.0 ** int(m.group(1)) if m else float(s)
    except ValueError:
        raise ConfigError(f"{key}: cannot parse number {text!r}") from None
    if not math.isfinite(value):
        raise ConfigError(f"{key}: value must be finite, got {text!r}")
    return value


def _number_list(text: str, key: str) -> tuple:
    parts = [s for s in re.split(r"[,\s]+", str(text).strip()) if s]
    if not parts:
        raise ConfigError(f"{key}: empty list")
    return tuple(_number(s, key) for s in parts)


def _N_list(text: str) -> tuple:
    values = []
    for v in _number_list(text, "N"):
        if v != int(v):
            raise ConfigError(f"N must be an integer, got {v}")
        n = int(v)
        if n % 4 != 0 or n <= 4:
            raise ConfigError(f"N={n} must be divisible by 4 and larger than 4")
        values.append(n)
    return tuple(values)


def _apply(cfg: dict, key: str, value: str) -> None:
    key = key.lower()
    if key not in _ALL_KEYS:
        raise ConfigError(f"unknown key {key!r}")
    cfg[key] = value


def parse_config(text: str) -> RunConfig:
    """Parse a flat ``key = value`` document with optional sections.

    Sections ``[problem]``, ``[mesh]`` and ``[run]`` group the keys; keys
    written before any section header may be any known key.
    """
    parser = configparser.ConfigParser(interpolation=None, strict=True)
    parser.optionxform = str
    try:
        parser.read_string("[__top__]\n" + text)
    except configparser.Error as exc:
        raise ConfigError(f"malformed config: {exc}") from None
    raw: dict = {}
    for section in parser.sections():
        allowed = _ALL_KEYS if section == "__top__" else _SECTION_KEYS.get(section.lower())
        if allowed is None:
            raise ConfigError(f"unknown section [{section}]")
        for key, value in parser.items(section):
            if key.lower() not in allowed:
                where = "" if section == "__top__" else f" in section [{section}]"
                raise ConfigError(f"unknown key {key!r}{where}")
            _apply(raw, key, value)
    return _from_mapping(raw)


def _from_mapping(raw: dict) -> RunConfig:
    command = raw.get("command")
    if command is None:
        raise ConfigError("missing command")
    command = command.strip().lower()
    if command not in COMMANDS:
        raise ConfigError(f"unknown command {command!r}; expected one of {', '.join(COMMANDS)}")
    cfg = RunConfig(command=command)
    name = raw.get("name", "example1").strip().lower()
    if name not in ("example1", "constant", "custom"):
        raise ConfigError(f"unknown problem {name!r}")
    cfg.constants = {k: _number(raw[k], k) for k in _COEFFICIENT_KEYS if k in raw}
    cfg.problem = "custom" if cfg.constants else "example1"
    if "epsilon" in raw:
        cfg.epsilon = _number(raw["epsilon"], "epsilon")
    if "kind" in raw:
        try:
            cfg.kind = MeshKind.parse(raw["kind"])
        except MeshSpecError as exc:
            raise ConfigError(str(exc)) from None
    if "tau0" in raw:
        cfg.tau0 = _number(raw["tau0"], "tau0")
    if "n" in raw:
        cfg.N = _N_list(raw["n"])
    if "out" in raw:
        cfg.out = raw["out"].strip()
    if "epsilon_sweep" in raw:
        cfg.epsilon_sweep = _number_list(raw["epsilon_sweep"], "epsilon_sweep")
    _check(cfg)
    return cfg


def _check(cfg: RunConfig) -> None:
    if not cfg.epsilon > 0:
        raise ConfigError(f"epsilon must be positive, got {cfg.epsilon}")
    if not cfg.tau0 > 0:
        raise ConfigError(f"tau0 must be positive, got {cfg.tau0}")
    if cfg.tau0 < 2:
        warnings.warn(f"tau0={cfg.tau0} < 2: the uniform convergence order "
                      "is not guaranteed", stacklevel=3)
    Ns = cfg.N_list()
    if cfg.command == "converge":
        for a, b in zip(Ns, Ns[1:]):
            if b != 2 * a:
                raise ConfigError(f"N list must double between entries ({a} -> {b})")
    elif cfg.command in ("solve", "meshinfo") and len(Ns) != 1:
        raise ConfigError(f"{cfg.command} takes a single N, got {len(Ns)}")
    if cfg.epsilon_sweep is not None:
        if cfg.command != "solve":
            raise ConfigError("--epsilon-sweep is only valid with solve")
        if any(not e > 0 for e in cfg.epsilon_sweep):
            raise ConfigError("epsilon sweep values must be positive")


def _fmt(v: float) -> str:
    return f"{v:.16e}"


def _solution_text(cfg: RunConfig, epsilon: float) -> str:
    N = cfg.N_list()[0]
    p = cfg.build_problem(epsilon)
    sol = solve_bvp(p, MeshSpec(N, cfg.tau0, cfg.kind))
    out = io.StringIO()
    out.write(f"# solve N={N} kind={cfg.kind.value} epsilon={epsilon!r} "
              f"tau0={cfg.tau0!r} problem={p.name}\n")
    for x, u1, u2 in zip(sol.mesh.points, sol.U1, sol.U2):
        out.write(f"{_fmt(x)} {_fmt(u1)} {_fmt(u2)}\n")
    return out.getvalue()


def _mesh_text(cfg: RunConfig) -> str:
    N = cfg.N_list()[0]
    p = cfg.build_problem()
    mesh = build_mesh(p, MeshSpec(N, cfg.tau0, cfg.kind))
    out = io.StringIO()
    out.write(f"# meshinfo N={N} kind={cfg.kind.value} tau0={cfg.tau0!r} "
              f"width_interior={mesh.width_interior!r} "
              f"width_boundary={mesh.width_boundary!r} epsilon={cfg.epsilon!r}\n")
    h = np.concatenate([[np.nan], mesh.steps])
    for i, (x, hi) in enumerate(zip(mesh.points, h)):
        out.write(f"{i} {_fmt(x)} {_fmt(hi)}\n")
    return out.getvalue()


def _sweep_path(out: str, epsilon: float) -> Path:
    base = Path(out) if out else Path("solution.dat")
    suffix = base.suffix or ".dat"
    return base.with_name(f"{base.stem}_eps{epsilon:.6e}{suffix}")


def _emit(text: str, out: str = None) -> None:
    if out is None:
        sys.stdout.write(text)
        return
    try:
        Path(out).write_text(text)
    except OSError as exc:
        raise OSError(f"cannot write {out}: {exc.strerror or exc}") from None


def run(config: RunConfig) -> int:
    """Execute one command; returns the process exit status."""
    if config.command == "solve":
        if config.epsilon_sweep:
            for eps in config.epsilon_sweep:
                _emit(_solution_text(config, eps), str(_sweep_path(config.out, eps)))
        else:
            _emit(_solution_text(config, config.epsilon), config.out)
        return 0
    if config.command == "converge":
        table = convergence_table(config.build_problem(), config.kind, config.tau0,
                                  config.N_list())
        _emit(table.to_csv(), config.out)
        return 0
    if config.command == "meshinfo":
        _emit(_mesh_text(config), config.out)
        return 0
    report = validate_problem(config.build_problem())
    header = (f"# validate problem={config.problem} epsilon={config.epsilon!r} "
              f"N=- kind={config.kind.value} tau0={config.tau0!r}\n")
    _emit(header + report.format() + "\n", config.out)
    return 0 if report.passed else 1


def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="layerfem",
        description="Streamline-diffusion FEM for coupled singularly perturbed problems.")
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("--config", metavar="PATH", help="key=value configuration file")
    ap.add_argument("--N", metavar="LIST", help="number of intervals, comma separated")
    ap.add_argument("--epsilon", metavar="X", help="perturbation parameter, e.g. 2^-18")
    ap.add_argument("--mesh", metavar="KIND",
                    choices=[k.value for k in MeshKind], help="mesh family")
    ap.add_argument("--tau0", metavar="X", help="transition parameter (>= 2)")
    ap.add_argument("--out", metavar="PATH", help="output file (default: stdout)")
    ap.add_argument("--epsilon-sweep", metavar="LIST",
                    help="solve once per epsilon, one output file each")
    return ap


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        raw: dict = {}
        if args.config:
            try:
                text = Path(args.config).read_text()
            except OSError as exc:
                raise OSError(f"cannot read {args.config}: {exc.strerror or exc}") from None
            base = parse_config(f"command = {args.command}\n" + text
                                if not re.search(r"(?m)^\s*command\s*[=:]", text) else text)
            if base.command != args.command:
                raise ConfigError(f"config command {base.command!r} conflicts with "
                                  f"{args.command!r}")
            raw = _config_to_raw(base)
        raw["command"] = args.command
        for key, value in (("n", args.N), ("epsilon", args.epsilon), ("kind", args.mesh),
                           ("tau0", args.tau0), ("out", args.out),
                           ("epsilon_sweep", args.epsilon_sweep)):
            if value is not None:
                raw[key] = value
        return run(_from_mapping(raw))
    except (ValueError, ArithmeticError, OSError) as exc:
        print(f"layerfem: error: {exc}", file=sys.stderr)
        return 2


def _config_to_raw(cfg: RunConfig) -> dict:
    raw = {"command": cfg.command, "epsilon": repr(cfg.epsilon), "kind": cfg.kind.value,
           "tau0": repr(cfg.tau0)}
    raw.update({k: repr(v) for k, v in cfg.constants.items()})
    if cfg.N is not None:
        raw["n"] = ",".join(map(str, cfg.N))
    if cfg.out is not None:
        raw["out"] = cfg.out
    if cfg.epsilon_sweep is not None:
        raw["epsilon_sweep"] = ",".join(repr(e) for e in cfg.epsilon_sweep)
    return raw


if __name__ == "__main__":
    sys.exit(main())
