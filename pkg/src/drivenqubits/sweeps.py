"""Parameter sweeps over (G1, x) and the figure families built on them.

Rows are computed independently and written in a fixed order (g1-major, then x),
so the output is byte-identical regardless of how many workers are used.
"""
from __future__ import annotations

import json
import math
import os
import tempfile
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .algebra import BasisTag, DensityMatrix4
from .correlations import (
    classical_correlation,
    concurrence,
    geometric_discord,
    linear_entropy,
    mutual_information,
)
from .errors import ConfigurationError
from .master import ModelParams, coupling_f, steady_state
from .oracles import limit_xstate_g2zero, steady_equal_g, steady_g2zero

COLUMNS = (
    "g1bar", "g2bar", "x", "dperp_ratio",
    "pop_11", "pop_10", "pop_1m1", "pop_00",
    "concurrence", "qmi", "ccl_1", "ccl_2", "discord_1", "discord_2",
    "geo_discord_1", "geo_discord_2", "linear_entropy", "numeric_deviation",
)
HEADER = ",".join(COLUMNS)
MODES = ("g2zero", "equalg", "xlimit")
_CCL_COLUMNS = {"ccl_1", "ccl_2", "discord_1", "discord_2"}


def format_number(v) -> str:
    """Shortest decimal string that round-trips to the same double (at most 17 digits)."""
    if v is None:
        return ""
    return repr(float(v))


def expand_range(spec) -> tuple[float, ...]:
    """Accept a list of numbers, a single number, or {start, stop, count, spacing}."""
    if isinstance(spec, (int, float)) and not isinstance(spec, bool):
        return (float(spec),)
    if isinstance(spec, (list, tuple)):
        if not spec:
            raise ConfigurationError("value list is empty")
        return tuple(float(v) for v in spec)
    if not isinstance(spec, dict):
        raise ConfigurationError(f"cannot read a range from {spec!r}")
    unknown = set(spec) - {"start", "stop", "count", "spacing"}
    if unknown:
        raise ConfigurationError(f"unknown range keys: {sorted(unknown)}")
    try:
        start, stop, count = float(spec["start"]), float(spec["stop"]), spec["count"]
    except KeyError as exc:
        raise ConfigurationError(f"range is missing {exc.args[0]!r}") from None
    if not isinstance(count, int) or isinstance(count, bool) or count < 1:
        raise ConfigurationError(f"range count must be a positive integer, got {count!r}")
    spacing = spec.get("spacing", "linear")
    if spacing == "linear":
        vals = np.linspace(start, stop, count)
    elif spacing == "log":
        if start <= 0 or stop <= 0:
            raise ConfigurationError("log spacing needs positive endpoints")
        vals = np.geomspace(start, stop, count)
    else:
        raise ConfigurationError(f"spacing must be 'linear' or 'log', got {spacing!r}")
    return tuple(float(v) for v in vals)


def parse_range_flag(text: str) -> tuple[float, ...]:
    """Command-line shorthand: '0.5', '0.1,0.2,0.4' or 'start:stop:count[:log]'."""
    try:
        if ":" in text:
            parts = text.split(":")
            if len(parts) not in (3, 4):
                raise ValueError
            spacing = parts[3] if len(parts) == 4 else "linear"
            return expand_range({"start": float(parts[0]), "stop": float(parts[1]),
                                 "count": int(parts[2]), "spacing": spacing})
        return tuple(float(v) for v in text.split(","))
    except ValueError:
        raise ConfigurationError(f"cannot parse range {text!r}") from None


@dataclass(frozen=True)
class SweepConfig:
    mode: str
    g1_values: tuple[float, ...]
    x_values: tuple[float, ...]
    dperp_ratio: float = 1.0
    p00: float | None = None
    outputs: tuple[str, ...] = COLUMNS
    numeric_check: bool = False
    workers: int = 1

    def __post_init__(self):
        if self.mode not in MODES:
            raise ConfigurationError(f"mode must be one of {MODES}, got {self.mode!r}")
        if not 0.0 <= self.dperp_ratio <= 1.0:
            raise ConfigurationError("dperp_ratio must lie in [0, 1]")
        if any(x < 0 for x in self.x_values):
            raise ConfigurationError("x values must be non-negative")
        if any(g < 0 for g in self.g1_values):
            raise ConfigurationError("g1 values must be non-negative")
        if self.p00 is not None and not 0.0 <= self.p00 <= 1.0:
            raise ConfigurationError("p00 must lie in [0, 1]")
        bad = [c for c in self.outputs if c not in COLUMNS]
        if bad:
            raise ConfigurationError(f"unknown output columns: {bad}")
        if self.mode == "equalg" and self.p00 is None and 0.0 in self.x_values:
            raise ConfigurationError("p00 is required for mode equalg when x = 0 is swept")
        if self.workers < 1:
            raise ConfigurationError("workers must be at least 1")

    @classmethod
    def from_dict(cls, d: dict) -> "SweepConfig":
        if not isinstance(d, dict):
            raise ConfigurationError("config must be a JSON object")
        allowed = {"mode", "g1_values", "x_values", "dperp_ratio", "p00", "outputs", "numeric_check", "workers"}
        unknown = set(d) - allowed
        if unknown:
            raise ConfigurationError(f"unknown config keys: {sorted(unknown)}")
        for key in ("mode", "g1_values", "x_values"):
            if key not in d:
                raise ConfigurationError(f"config is missing {key!r}")
        outputs = d.get("outputs", COLUMNS)
        if not isinstance(outputs, (list, tuple)) or not outputs:
            raise ConfigurationError("outputs must be a non-empty list of column names")
        # written in canonical order whatever order they were listed in
        outputs = tuple(c for c in COLUMNS if c in outputs) + tuple(c for c in outputs if c not in COLUMNS)
        try:
            return cls(
                mode=d["mode"],
                g1_values=expand_range(d["g1_values"]),
                x_values=expand_range(d["x_values"]),
                dperp_ratio=float(d.get("dperp_ratio", 1.0)),
                p00=None if d.get("p00") is None else float(d["p00"]),
                outputs=outputs,
                numeric_check=bool(d.get("numeric_check", False)),
                workers=int(d.get("workers", 1)),
            )
        except (TypeError, ValueError) as exc:
            if isinstance(exc, ConfigurationError):
                raise
            raise ConfigurationError(str(exc)) from None

    @classmethod
    def from_json(cls, path) -> "SweepConfig":
        try:
            text = Path(path).read_text()
        except OSError as exc:
            raise ConfigurationError(f"cannot read config {path}: {exc.strerror}") from None
        try:
            d = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigurationError(f"config is not valid JSON: {exc}") from None
        return cls.from_dict(d)


@dataclass(frozen=True)
class PointTask:
    mode: str
    g1: float
    x: float
    ratio: float
    p00: float | None
    outputs: tuple[str, ...]
    numeric_check: bool


def analytic_state(mode: str, g1: float, x: float, ratio: float, p00=None) -> tuple[ModelParams, DensityMatrix4]:
    """Closed-form steady state for one sweep point (coupled basis)."""
    if mode == "g2zero":
        p = ModelParams(g1, 0.0, x, ratio)
        return p, steady_g2zero(p)
    if mode == "equalg":
        p = ModelParams(g1, g1, x, ratio)
        return p, steady_equal_g(p, p00)
    if mode == "xlimit":
        p = ModelParams(math.inf, 0.0, x, ratio)
        return p, limit_xstate_g2zero(coupling_f(x, ratio)).to(BasisTag.TRIPLET_SINGLET)
    raise ConfigurationError(f"unknown mode {mode!r}")


def evaluate_point(task: PointTask) -> tuple[float | None, ...]:
    p, rho_c = analytic_state(task.mode, task.g1, task.x, task.ratio, task.p00)
    rho = rho_c.to(BasisTag.PRODUCT)
    want = set(task.outputs)
    vals: dict[str, float | None] = {
        "g1bar": task.g1,
        "g2bar": p.g2bar,
        "x": task.x,
        "dperp_ratio": task.ratio,
        "pop_11": rho_c.population(0),
        "pop_10": rho_c.population(1),
        "pop_1m1": rho_c.population(2),
        "pop_00": rho_c.population(3),
        "numeric_deviation": None,
    }
    if "concurrence" in want:
        vals["concurrence"] = concurrence(rho)
    if want & (_CCL_COLUMNS | {"qmi"}):
        vals["qmi"] = mutual_information(rho)
    if want & _CCL_COLUMNS:
        for side in (1, 2):
            ccl = classical_correlation(rho, side)[0]
            d = vals["qmi"] - ccl
            vals[f"ccl_{side}"] = ccl
            vals[f"discord_{side}"] = 0.0 if -1e-9 <= d < 0.0 else d
    if "geo_discord_1" in want:
        vals["geo_discord_1"] = geometric_discord(rho, 1)
    if "geo_discord_2" in want:
        vals["geo_discord_2"] = geometric_discord(rho, 2)
    if "linear_entropy" in want:
        vals["linear_entropy"] = linear_entropy(rho)
    if task.numeric_check and task.mode != "xlimit":
        num = steady_state(p, task.p00).rho.to(BasisTag.TRIPLET_SINGLET)
        vals["numeric_deviation"] = float(np.abs(num.matrix - rho_c.matrix).max())
    return tuple(vals.get(c) for c in task.outputs)


def tasks_for(cfg: SweepConfig, ratios=None) -> list[PointTask]:
    ratios = (cfg.dperp_ratio,) if ratios is None else ratios
    return [
        PointTask(cfg.mode, g1, x, r, cfg.p00, cfg.outputs, cfg.numeric_check)
        for r in ratios
        for g1 in cfg.g1_values
        for x in cfg.x_values
    ]


def run_tasks(tasks: list[PointTask], workers: int = 1) -> list[tuple]:
    if workers <= 1 or len(tasks) < 2:
        return [evaluate_point(t) for t in tasks]
    chunk = max(1, len(tasks) // (4 * workers))
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(evaluate_point, tasks, chunksize=chunk))


def render_csv(columns, rows, comments=()) -> str:
    lines = [f"# {c}" for c in comments]
    lines.append(",".join(columns))
    lines.extend(",".join(format_number(v) for v in row) for row in rows)
    return "\n".join(lines) + "\n"


def write_atomically(path, text: str) -> None:
    """Write ``text`` to ``path`` so that a failure never leaves a partial file behind."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def run_sweep(cfg: SweepConfig, out=None, ratios=None, comments=(), workers=None) -> str:
    """Evaluate every point of ``cfg`` and return (and optionally write) the CSV text."""
    rows = run_tasks(tasks_for(cfg, ratios), cfg.workers if workers is None else workers)
    text = render_csv(cfg.outputs, rows, comments)
    if out is not None:
        write_atomically(out, text)
    return text


def distance_to_x(distance_in_wavelengths: float) -> float:
    return 2.0 * math.pi * distance_in_wavelengths


# Separations used in the figure captions, in units of the transition wavelength.
CAPTION_DISTANCES = (0.01, 0.25, 1.0)
CAPTION_X = tuple(distance_to_x(d) for d in CAPTION_DISTANCES)
_G1_LOG = {"start": 0.01, "stop": 10.0, "count": 60, "spacing": "log"}
_X_DENSE = {"start": 0.05, "stop": 15.0, "count": 60, "spacing": "linear"}
_X_LIMIT = {"start": 0.1, "stop": 12.0, "count": 239, "spacing": "linear"}


@dataclass(frozen=True)
class FigureFamily:
    id: str
    mode: str
    g1_values: tuple[float, ...]
    x_values: tuple[float, ...]
    ratios: tuple[float, ...] = (1.0, 0.0)
    description: str = ""
    outputs: tuple[str, ...] = field(default=COLUMNS)

    def params_string(self, mode=None, g1_values=None, x_values=None, ratios=None) -> str:
        def short(vals):
            vals = tuple(vals)
            if len(vals) <= 4:
                return "[" + ";".join(format_number(v) for v in vals) + "]"
            return f"[{format_number(vals[0])}..{format_number(vals[-1])} n={len(vals)}]"

        return " ".join([
            f"mode={mode or self.mode}",
            f"g1={short(g1_values or self.g1_values)}",
            f"x={short(x_values or self.x_values)}",
            f"dperp_ratio={short(ratios or self.ratios)}",
        ])


FIGURES: dict[str, FigureFamily] = {
    f.id: f
    for f in (
        FigureFamily("conc_vs_g1", "g2zero", expand_range(_G1_LOG), CAPTION_X,
                     description="concurrence against G1 at separations lambda/100, lambda/4, lambda"),
        FigureFamily("conc_vs_pop00", "g2zero", expand_range(_G1_LOG), CAPTION_X,
                     description="concurrence against the singlet population (same grid as conc_vs_g1)"),
        FigureFamily("conc_contour", "g2zero",
                     expand_range({"start": 0.01, "stop": 3.0, "count": 40, "spacing": "log"}),
                     expand_range(_X_DENSE), description="concurrence over the (x, G1) plane"),
        FigureFamily("discord_limits", "xlimit", (math.inf,), expand_range(_X_LIMIT),
                     description="strong-drive X-state: mutual information, classical correlation and discords against x"),
        FigureFamily("geo_discord_vs_g1", "g2zero", expand_range(_G1_LOG), CAPTION_X,
                     description="geometric discord (both sides) against G1 at the caption separations"),
        FigureFamily("geo_discord_contour", "g2zero",
                     expand_range({"start": 0.01, "stop": 10.0, "count": 40, "spacing": "log"}),
                     expand_range(_X_DENSE), description="geometric discord over the (x, G1) plane"),
        FigureFamily("linear_entropy_vs_g1", "g2zero", expand_range(_G1_LOG), CAPTION_X,
                     description="linear entropy against G1 at the caption separations"),
        FigureFamily("conc_vs_linear_entropy", "g2zero", expand_range(_G1_LOG), CAPTION_X, ratios=(1.0,),
                     description="concurrence against linear entropy, parametrised by G1"),
    )
}


def run_figure(
    fig_id: str,
    out=None,
    mode=None,
    g1_values=None,
    x_values=None,
    ratios=None,
    workers: int = 1,
    numeric_check: bool = False,
) -> str:
    try:
        fam = FIGURES[fig_id]
    except KeyError:
        raise ConfigurationError(f"unknown figure id {fig_id!r}; valid ids: {', '.join(FIGURES)}") from None
    mode = mode or fam.mode
    cfg = SweepConfig(
        mode=mode,
        g1_values=tuple(g1_values or fam.g1_values),
        x_values=tuple(x_values or fam.x_values),
        dperp_ratio=1.0,
        p00=None,
        outputs=fam.outputs,
        numeric_check=numeric_check,
        workers=workers,
    )
    comment = f"figure={fig_id} params={fam.params_string(mode, g1_values, x_values, ratios)}"
    return run_sweep(cfg, out, ratios=tuple(ratios or fam.ratios), comments=(comment,))


def read_csv(text: str) -> tuple[list[str], np.ndarray]:
    """Parse CSV produced here back into (columns, float array); empty cells become NaN."""
    lines = [ln for ln in text.splitlines() if ln and not ln.startswith("#")]
    cols = lines[0].split(",")
    data = np.array([[float(v) if v else math.nan for v in ln.split(",")] for ln in lines[1:]])
    return cols, data.reshape(len(lines) - 1, len(cols))
