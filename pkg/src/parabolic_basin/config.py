"""Run configuration: the parameter a, every numeric tolerance and budget, output location and seed.

The file format is flat ``key = value`` text with keys equal to the field names; ``a`` is
written ``re,im``. Floats use repr so a file round-trips exactly.
"""
from __future__ import annotations

import importlib
from dataclasses import MISSING, dataclass, field, fields, replace
from pathlib import Path

from . import accesses, boettcher, cubic, fatou, itinerary, partition, puzzles, renorm

_MODULES = {m.__name__.rsplit(".", 1)[1]: m for m in
            (accesses, boettcher, cubic, fatou, itinerary, partition, puzzles, renorm)}


def _const(module: str, name: str, kind=float):
    return field(default=kind(getattr(_MODULES[module], name)), metadata={"module": module, "const": name})


# A* is the default subject parameter of the checks
DEFAULT_A = complex(0.3, 1.1)


@dataclass(frozen=True)
class RunConfig:
    a: complex = DEFAULT_A
    out_dir: str = "out"
    seed: int = 0
    assumption_budget: int = 100_000
    # cubic
    hit_zero_tol: float = _const("cubic", "HIT_ZERO_TOL")
    dedup_tol: float = _const("cubic", "DEDUP_TOL")
    indifferent_band: float = _const("cubic", "INDIFFERENT_BAND")
    # boettcher
    big_radius: float = _const("boettcher", "BIG_RADIUS")
    green_budget: int = _const("boettcher", "GREEN_BUDGET", int)
    top_potential: float = _const("boettcher", "TOP_POTENTIAL")
    deep_point_potential: float = _const("boettcher", "DEEP_POINT_POTENTIAL")
    potential_floor: float = _const("boettcher", "POTENTIAL_FLOOR")
    branch_tol: float = _const("boettcher", "BRANCH_TOL")
    geometric_tol: float = _const("boettcher", "GEOMETRIC_TOL")
    cesaro_tol: float = _const("boettcher", "CESARO_TOL")
    cesaro_window: int = _const("boettcher", "CESARO_WINDOW", int)
    # fatou
    series_order: int = _const("fatou", "SERIES_ORDER", int)
    series_tol: float = _const("fatou", "SERIES_TOL")
    min_radius: float = _const("fatou", "MIN_RADIUS")
    iter_budget: int = _const("fatou", "ITER_BUDGET", int)
    newton_tol: float = _const("fatou", "NEWTON_TOL")
    newton_steps: int = _const("fatou", "NEWTON_STEPS", int)
    # partition
    graph_tube: float = _const("partition", "GRAPH_TUBE")
    far_radius: float = _const("partition", "FAR_RADIUS")
    tail_t: float = _const("partition", "TAIL_T")
    tail_u: float = _const("partition", "TAIL_U")
    decimate: float = _const("partition", "DECIMATE")
    pinch_pixels: int = _const("partition", "PINCH_PIXELS", int)
    # itinerary
    cycle_tol: float = _const("itinerary", "CYCLE_TOL")
    landing_tol: float = _const("itinerary", "LANDING_TOL")
    max_chart_depth: int = _const("itinerary", "MAX_CHART_DEPTH", int)
    # accesses
    leg_diameter_tol: float = _const("accesses", "LEG_DIAMETER_TOL")
    max_legs: int = _const("accesses", "MAX_LEGS", int)
    periodic_tol: float = _const("accesses", "PERIODIC_TOL")
    samples_delta0: int = _const("accesses", "SAMPLES_DELTA0", int)
    samples_delta1: int = _const("accesses", "SAMPLES_DELTA1", int)
    # puzzles
    equipotential_level: float = _const("puzzles", "EQUIPOTENTIAL_LEVEL")
    landing_match: float = _const("puzzles", "LANDING_MATCH")
    snap: float = _const("puzzles", "SNAP")
    arc_budget: int = _const("puzzles", "ARC_BUDGET", int)
    max_depth: int = _const("puzzles", "MAX_DEPTH", int)
    margin_tol: float = _const("puzzles", "MARGIN_TOL")
    max_insert: int = _const("puzzles", "MAX_INSERT", int)
    duplicate_tol: float = _const("puzzles", "DUPLICATE_TOL")
    # renorm
    blowup_threshold: float = _const("renorm", "BLOWUP_THRESHOLD")
    increment_tol: float = _const("renorm", "INCREMENT_TOL")
    tail_tol: float = _const("renorm", "TAIL_TOL")
    rational_rotation_tol: float = _const("renorm", "RATIONAL_ROTATION_TOL")
    rational_max_denominator: int = _const("renorm", "RATIONAL_MAX_DENOMINATOR", int)

    def __post_init__(self):
        object.__setattr__(self, "a", complex(self.a))
        for f in fields(self):
            if "const" not in f.metadata and f.name != "assumption_budget":
                continue
            v = getattr(self, f.name)
            if not v > 0:
                raise ValueError(f"{f.name} must be positive, got {v!r}")

    # file format ----------------------------------------------------------------

    def to_text(self) -> str:
        lines = []
        for f in fields(self):
            v = getattr(self, f.name)
            if f.name == "a":
                s = f"{v.real!r},{v.imag!r}"
            else:
                s = repr(v) if not isinstance(v, str) else v
            lines.append(f"{f.name} = {s}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "RunConfig":
        kinds = {f.name: f for f in fields(cls)}
        kw = {}
        for n, line in enumerate(text.splitlines(), 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ValueError(f"line {n}: expected key = value")
            key, val = (s.strip() for s in line.split("=", 1))
            if key not in kinds:
                raise ValueError(f"line {n}: unknown key {key!r}")
            kw[key] = _parse(key, val, kinds[key])
        return cls(**kw)

    def save(self, path) -> None:
        Path(path).write_text(self.to_text())

    @classmethod
    def load(cls, path) -> "RunConfig":
        return cls.from_text(Path(path).read_text())

    def with_a(self, a: complex) -> "RunConfig":
        return replace(self, a=complex(a))

    # module constants -------------------------------------------------------------

    def constants(self) -> dict:
        """{(module, CONST): value} for every tolerance consumed by the library."""
        return {(f.metadata["module"], f.metadata["const"]): getattr(self, f.name)
                for f in fields(self) if "const" in f.metadata}

    def apply(self) -> dict:
        """Install the values as module constants; returns the previous values for restore()."""
        old = {}
        for (mod, name), v in self.constants().items():
            m = importlib.import_module(f"parabolic_basin.{mod}")
            old[(mod, name)] = getattr(m, name)
            setattr(m, name, v)
        return old


def restore(old: dict) -> None:
    for (mod, name), v in old.items():
        setattr(importlib.import_module(f"parabolic_basin.{mod}"), name, v)


def parse_a(text: str) -> complex:
    """'re,im' (or a Python complex literal) to a complex number."""
    text = text.strip()
    if "," in text:
        re, im = text.split(",", 1)
        return complex(float(re), float(im))
    return complex(text.replace(" ", ""))


def _parse(key: str, val: str, f):
    if key == "a":
        return parse_a(val)
    default = f.default if f.default is not MISSING else None
    if isinstance(default, str):
        return val
    if isinstance(default, int) and not isinstance(default, bool):
        return int(val)
    return float(val)
