"""Run configuration: a flat TOML file with dotted section prefixes.

Example::

    seed = 0
    solver = "ppp_gcg"
    output_dir = "runs/deconv"

    deconvolution.n_coeffs = 64
    deconvolution.alpha = 1e-3

    ppp.mu = 0.05
    ppp.sigma = 0.9
    ppp.total_iter_budget = 350

    sweep.mu = [0.2, 0.05, 0.01]
    sweep.sigma = [0.1, 0.9]

Exactly one problem block (``deconvolution``, ``hologram``, ``random`` or
``dense``) must be present. Errors carry the file name and, where one can
be found, the line of the offending key.
"""

import re
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .baselines import IstaParams
from .inner import InnerParams
from .operators import load_dense_csv, load_vector_csv
from .ppp import PppParams
from .problems import (
    DEFAULT_SPIKES,
    DeconvSpec,
    HologramSpec,
    make_deconvolution_problem,
    make_hologram_problem,
    make_random_fbi_problem,
    random_particles,
)
from .prox import Problem

__all__ = [
    "ConfigError",
    "RunConfig",
    "load_config",
    "build_problem",
    "make_ppp_params",
    "make_ista_params",
    "SOLVERS",
    "default_config_path",
]

SOLVERS = ("ppp_ista", "ppp_gcg", "ista")
PROBLEM_KINDS = ("deconvolution", "hologram", "random", "dense")

# key -> default; None means "required" for problem blocks unless noted
_TOP = {"seed": 0, "output_dir": "output", "solver": "ppp_gcg"}
_SECTIONS = {
    "deconvolution": {
        "grid_size": 256,
        "n_coeffs": 64,
        "kernel_width": 5.0,
        "spikes": [list(s) for s in DEFAULT_SPIKES],
        "noise_sigma": 0.0,
        "alpha": 1e-3,
        "kernel_file": None,
    },
    "hologram": {
        "image_size": 64,
        "pixel_pitch": 10e-6,
        "wavelength": 630e-9,
        "distance": 0.25,
        "n_particles": 20,
        "particles": None,
        "min_separation": 3.0,
        "amplitude": 1.0,
        "kernel_radius": None,
        "noise_sigma": 0.0,
        "alpha": 1e-3,
    },
    "random": {"m": 20, "n": 40, "sparsity": 3, "alpha": 0.02},
    "dense": {"matrix": None, "data": None, "alpha": None},
    "ppp": {
        "mu": 0.05,
        "sigma": 0.9,
        "step_size": 1.0,
        "max_outer_iters": 100_000,
        "max_inner_iters": 10_000,
        "total_iter_budget": None,
        "v_tol": None,
        "y_tol": 1e-12,
    },
    "ista": {"step_size": 1.0, "max_iters": 1000, "tol": 0.0},
    "sweep": {
        "mu": [0.2, 0.05, 0.01],
        "sigma": [0.1, 0.9],
        "solvers": ["ppp_ista", "ppp_gcg"],
        "total_iter_budget": 350,
    },
    "output": {"pgm": True},
}


class ConfigError(ValueError):
    """Malformed configuration, anchored to a file and line when possible."""

    def __init__(self, message, path=None, line=None):
        self.path, self.line = path, line
        where = "" if path is None else f"{path}:" + ("" if line is None else f"{line}:")
        super().__init__(f"{where} {message}" if where else message)


@dataclass
class RunConfig:
    path: Optional[Path]
    seed: int
    output_dir: Path
    solver: str
    problem_kind: str
    problem: dict
    ppp: dict
    ista: dict
    sweep: dict
    output: dict
    key_lines: dict = field(default_factory=dict, repr=False)

    def error(self, key, message):
        return ConfigError(message, self.path, self.key_lines.get(key))


_HEADER = re.compile(r"^\s*\[\s*([A-Za-z0-9_.\-]+)\s*\]\s*(#.*)?$")
_ASSIGN = re.compile(r"^\s*([A-Za-z0-9_\-]+(?:\s*\.\s*[A-Za-z0-9_\-]+)*)\s*=")


def _key_lines(text):
    """Map each dotted key to the 1-based line that assigns it."""
    lines, table = {}, ""
    for num, raw in enumerate(text.splitlines(), start=1):
        head = _HEADER.match(raw)
        if head:
            table = head.group(1)
            continue
        assign = _ASSIGN.match(raw)
        if assign:
            key = re.sub(r"\s+", "", assign.group(1))
            lines.setdefault(f"{table}.{key}" if table else key, num)
    return lines


def _section_line(lines, section):
    hits = [n for k, n in lines.items() if k == section or k.startswith(section + ".")]
    return min(hits) if hits else None


def load_config(path, text=None):
    """Parse and validate a run configuration.

    Parameters
    ----------
    path : str or Path
        Config file; relative data paths inside it resolve against its
        directory.
    text : str, optional
        Config contents, read from ``path`` when omitted.

    Raises
    ------
    ConfigError
    """
    path = Path(path)
    if text is None:
        try:
            text = path.read_text()
        except OSError as exc:
            raise ConfigError(f"cannot read config: {exc.strerror}", path) from None
    try:
        raw = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        m = re.search(r"line (\d+)", str(exc))
        if m:
            line = int(m.group(1))
        elif "end of document" in str(exc):
            line = max(len(text.splitlines()), 1)
        else:
            line = None
        raise ConfigError(str(exc), path, line) from None
    lines = _key_lines(text)

    def fail(key, message):
        return ConfigError(message, path, lines.get(key, _section_line(lines, key)))

    top, sections = {}, {}
    if not isinstance(raw.get("output_dir", ""), str):
        raise fail("output_dir", "'output_dir' must be a string")
    for key, value in raw.items():
        if key in _TOP:
            if isinstance(value, dict):
                raise fail(key, f"'{key}' must be a value, not a table")
            top[key] = value
        elif key in _SECTIONS:
            if not isinstance(value, dict):
                raise fail(key, f"'{key}' must be a table of settings")
            for sub in value:
                if sub not in _SECTIONS[key]:
                    raise fail(f"{key}.{sub}", f"unknown key '{key}.{sub}'")
            sections[key] = value
        else:
            raise fail(key, f"unknown key '{key}'")

    kinds = [k for k in PROBLEM_KINDS if k in sections]
    if len(kinds) != 1:
        found = ", ".join(kinds) if kinds else "none"
        # anchor at the block that appears last in the file
        line = max(((_section_line(lines, k) or 0) for k in kinds), default=0) or None
        raise ConfigError(
            f"exactly one problem block ({', '.join(PROBLEM_KINDS)}) is required, found {found}",
            path, line,
        )
    kind = kinds[0]

    def merged(name):
        out = dict(_SECTIONS[name])
        out.update(sections.get(name, {}))
        return out

    cfg = RunConfig(
        path=path,
        seed=top.get("seed", _TOP["seed"]),
        output_dir=Path(top.get("output_dir", _TOP["output_dir"])),
        solver=top.get("solver", _TOP["solver"]),
        problem_kind=kind,
        problem=merged(kind),
        ppp=merged("ppp"),
        ista=merged("ista"),
        sweep=merged("sweep"),
        output=merged("output"),
        key_lines=lines,
    )
    _validate(cfg)
    return cfg


def _check_type(cfg, key, value, kinds, what):
    if isinstance(value, bool) or not isinstance(value, kinds):
        raise cfg.error(key, f"'{key}' must be {what}, got {value!r}")


def _validate(cfg):
    _check_type(cfg, "seed", cfg.seed, int, "an integer")
    if cfg.solver not in SOLVERS:
        raise cfg.error("solver", f"solver must be one of {', '.join(SOLVERS)}, got {cfg.solver!r}")
    num, integer = (int, float), int
    p = cfg.problem
    kind = cfg.problem_kind
    for key, value in p.items():
        full = f"{kind}.{key}"
        if value is None:
            if kind == "dense":
                raise cfg.error(full, f"'{full}' is required")
            continue
        if key in ("spikes", "particles"):
            width = 2 if key == "spikes" else 3
            if not isinstance(value, list) or not all(
                isinstance(e, list) and len(e) == width for e in value
            ):
                raise cfg.error(full, f"'{full}' must be a list of {width}-element lists")
        elif key in ("matrix", "data", "kernel_file"):
            _check_type(cfg, full, value, str, "a file path")
        elif key in ("grid_size", "n_coeffs", "image_size", "n_particles", "kernel_radius",
                     "m", "n", "sparsity"):
            _check_type(cfg, full, value, integer, "an integer")
        else:
            _check_type(cfg, full, value, num, "a number")
    for block, spec in (("ppp", cfg.ppp), ("ista", cfg.ista)):
        for key, value in spec.items():
            if value is None:
                continue
            full = f"{block}.{key}"
            if key in ("max_outer_iters", "max_inner_iters", "total_iter_budget", "max_iters"):
                _check_type(cfg, full, value, integer, "an integer")
            else:
                _check_type(cfg, full, value, num, "a number")
    for key in ("mu", "sigma"):
        values = cfg.sweep[key]
        if not isinstance(values, list) or not values:
            raise cfg.error(f"sweep.{key}", f"'sweep.{key}' must be a non-empty list")
        for v in values:
            _check_type(cfg, f"sweep.{key}", v, num, "a list of numbers")
    solvers = cfg.sweep["solvers"]
    if not isinstance(solvers, list) or not solvers or any(s not in SOLVERS for s in solvers):
        raise cfg.error("sweep.solvers", f"'sweep.solvers' must list solvers from {SOLVERS}")
    _check_type(cfg, "sweep.total_iter_budget", cfg.sweep["total_iter_budget"], integer,
                "an integer")
    if not isinstance(cfg.output["pgm"], bool):
        raise cfg.error("output.pgm", "'output.pgm' must be true or false")
    # construct once so range errors surface with a line number
    for block, maker in (("ppp", lambda: make_ppp_params(cfg)),
                         ("ista", lambda: make_ista_params(cfg))):
        try:
            maker()
        except ValueError as exc:
            raise ConfigError(str(exc), cfg.path, _section_line(cfg.key_lines, block)) from None


def _resolve(cfg, name):
    target = Path(name)
    if not target.is_absolute() and cfg.path is not None:
        target = cfg.path.parent / target
    return target


def build_problem(cfg):
    """Instantiate the configured problem.

    Returns
    -------
    problem : Problem
    truth : ndarray or None
        Ground truth when the generator knows it.
    image_shape : tuple or None
        ``(rows, cols)`` for image-valued problems.
    """
    p, kind = cfg.problem, cfg.problem_kind
    try:
        if kind == "deconvolution":
            kernel = None
            if p["kernel_file"] is not None:
                kernel = tuple(load_vector_csv(_resolve(cfg, p["kernel_file"])))
            spec = DeconvSpec(
                grid_size=p["grid_size"],
                n_coeffs=p["n_coeffs"],
                kernel_width_param=float(p["kernel_width"]),
                spikes=tuple((int(i), float(a)) for i, a in p["spikes"]),
                noise_sigma=float(p["noise_sigma"]),
                alpha=float(p["alpha"]),
                kernel_samples=kernel,
            )
            problem, truth = make_deconvolution_problem(spec, seed=cfg.seed)
            return problem, truth, None
        if kind == "hologram":
            if p["particles"] is not None:
                particles = tuple((int(r), int(c), float(a)) for r, c, a in p["particles"])
            else:
                particles = random_particles(
                    p["n_particles"], p["image_size"], cfg.seed,
                    min_separation=float(p["min_separation"]), amplitude=float(p["amplitude"]),
                )
            spec = HologramSpec(
                image_size=p["image_size"],
                pixel_pitch=float(p["pixel_pitch"]),
                wavelength=float(p["wavelength"]),
                distance=float(p["distance"]),
                particles=particles,
                alpha=float(p["alpha"]),
                kernel_radius=p["kernel_radius"],
                noise_sigma=float(p["noise_sigma"]),
            )
            problem, truth = make_hologram_problem(spec, seed=cfg.seed)
            return problem, truth.ravel(), truth.shape
        if kind == "random":
            problem, truth = make_random_fbi_problem(
                p["m"], p["n"], p["sparsity"], float(p["alpha"]), seed=cfg.seed
            )
            return problem, truth, None
        matrix = load_dense_csv(_resolve(cfg, p["matrix"]))
        data = load_vector_csv(_resolve(cfg, p["data"]))
        return Problem(matrix, data, float(p["alpha"])), None, None
    except (ValueError, OSError) as exc:
        raise ConfigError(
            f"invalid {kind} problem: {exc}", cfg.path, _section_line(cfg.key_lines, kind)
        ) from None


def make_ppp_params(cfg, solver=None, mu=None, sigma=None, budget=None):
    """PppParams from the ``ppp`` block, with optional sweep overrides."""
    solver = cfg.solver if solver is None else solver
    b = cfg.ppp
    method = "gcg" if solver == "ppp_gcg" else "damped_ista"
    inner = InnerParams(
        method=method,
        sigma=float(b["sigma"] if sigma is None else sigma),
        mu=float(b["mu"] if mu is None else mu),
        step_size=float(b["step_size"]),
        max_inner_iters=b["max_inner_iters"],
    )
    return PppParams(
        inner=inner,
        max_outer_iters=b["max_outer_iters"],
        v_tol=None if b["v_tol"] is None else float(b["v_tol"]),
        y_tol=float(b["y_tol"]),
        total_iter_budget=b["total_iter_budget"] if budget is None else budget,
    )


def make_ista_params(cfg, budget=None):
    b = cfg.ista
    return IstaParams(
        step_size=float(b["step_size"]),
        max_iters=b["max_iters"] if budget is None else budget,
        tol=float(b["tol"]),
    )


def default_config_path(name="deconv_default"):
    """Path of a configuration shipped with the package."""
    return Path(__file__).parent / "configs" / f"{name}.toml"
