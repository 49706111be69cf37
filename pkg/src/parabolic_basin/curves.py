"""Traced curves (rays, equipotentials, Fatou lines, accesses) and their text export."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import TextIO

import numpy as np


@dataclass(frozen=True)
class TracedCurve:
    label: str
    points: np.ndarray
    params: np.ndarray
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=complex)
        prm = np.asarray(self.params, dtype=float)
        if pts.ndim != 1 or pts.size < 2:
            raise ValueError("a curve needs at least two points")
        if prm.shape != pts.shape:
            raise ValueError("params must match points")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "params", prm)

    def __len__(self):
        return self.points.size

    def reversed(self) -> "TracedCurve":
        return TracedCurve(self.label, self.points[::-1].copy(), self.params[::-1].copy(), dict(self.meta))

    def mapped(self, fn, label: str | None = None) -> "TracedCurve":
        return TracedCurve(label or self.label, fn(self.points), self.params.copy(), dict(self.meta))

    def to_text(self) -> str:
        lines = [f"CURVE {self.label} npoints={self.points.size}"]
        for t, z in zip(self.params, self.points):
            lines.append(f"{t:.17g} {z.real:.17g} {z.imag:.17g}")
        return "\n".join(lines) + "\n"


def ray_label(angle) -> str:
    return f"ExternalRay({angle})"


def write_curves(curves, fh: TextIO) -> None:
    for c in curves:
        fh.write(c.to_text())


def read_curves(fh: TextIO) -> list[TracedCurve]:
    out = []
    lines = fh.read().splitlines()
    i = 0
    while i < len(lines):
        head = lines[i]
        i += 1
        if not head.strip():
            continue
        if not head.startswith("CURVE ") or " npoints=" not in head:
            raise ValueError(f"bad curve header: {head!r}")
        label, n = head[len("CURVE "):].rsplit(" npoints=", 1)
        n = int(n)
        vals = np.array([[float(x) for x in lines[i + j].split()] for j in range(n)])
        i += n
        out.append(TracedCurve(label, vals[:, 1] + 1j * vals[:, 2], vals[:, 0]))
    return out
