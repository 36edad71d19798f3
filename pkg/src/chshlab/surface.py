"""The two-knob CHSH surface.

The first knob is the relative angle ``theta`` between measurement
directions.  The second knob is realized here as the weight ``q`` of a PR box
mixed into the base behavior: cell ``(theta, q)`` holds the signed CHSH
combination of ``q * PR + (1 - q) * base(theta)``.  This is one modeling
choice among many for the second knob, picked because it is affine in ``q``.

For the quantum base, the singlet is measured at polar angles
``a = 0, a' = 2 theta, b = pi + theta, b' = pi - theta`` in the x-z plane, so
the signed combination is ``3 cos(theta) - cos(3 theta)``, peaking at
``2 sqrt(2)`` for ``theta = pi / 4``.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np

from .behavior import (
    BELL_BOUND,
    CLASSIFY_TOL,
    TSIRELSON_BOUND,
    Behavior,
    deterministic_behavior,
    mix,
    signed_combination,
)
from .errors import ValidationError
from .quantum import SINGLET, QuantumStrategy, coplanar_settings, quantum_behavior
from .superquantum import X_CC, pr_box

BASE_MODELS = ("quantum-singlet", "classical-deterministic")
SURFACE_HEADER = ["theta", "q", "chsh_signed", "chsh_abs"]


@dataclass(frozen=True)
class SurfaceSpec:
    theta_steps: int = 181
    q_steps: int = 101
    base_model: str = "quantum-singlet"
    output_path: str | None = None

    def __post_init__(self) -> None:
        if int(self.theta_steps) < 2 or int(self.q_steps) < 2:
            raise ValidationError("theta_steps and q_steps must both be at least 2")
        if self.base_model not in BASE_MODELS:
            raise ValidationError(f"base_model must be one of {BASE_MODELS}, got {self.base_model!r}")

    @property
    def thetas(self) -> np.ndarray:
        return np.linspace(0.0, math.pi, int(self.theta_steps))

    @property
    def qs(self) -> np.ndarray:
        return np.linspace(0.0, 1.0, int(self.q_steps))


@dataclass(frozen=True)
class SurfaceSummary:
    q0_row_max: float
    q1_row_min: float
    q1_row_max: float
    row_max: np.ndarray = field(repr=False)  # max |CHSH| along each fixed-q cut
    classical_cut_exists: bool = False
    superquantum_cut_exists: bool = False

    def lines(self, spec: SurfaceSpec) -> list[str]:
        flag = {True: "true", False: "false"}
        return [
            f"base_model = {spec.base_model}",
            f"theta_steps = {int(spec.theta_steps)}",
            f"q_steps = {int(spec.q_steps)}",
            f"q0_row_max = {self.q0_row_max:.17g}",
            f"q1_row_min = {self.q1_row_min:.17g}",
            f"q1_row_max = {self.q1_row_max:.17g}",
            f"classical_cut_exists = {flag[self.classical_cut_exists]}",
            f"superquantum_cut_exists = {flag[self.superquantum_cut_exists]}",
            f"X_cc = {X_CC:.10f}",
        ]


@dataclass(frozen=True)
class Surface:
    spec: SurfaceSpec
    thetas: np.ndarray
    qs: np.ndarray
    signed: np.ndarray  # [theta, q]
    summary: SurfaceSummary

    @property
    def absolute(self) -> np.ndarray:
        return np.abs(self.signed)


def singlet_angles(theta: float) -> np.ndarray:
    return np.array([0.0, 2.0 * theta, math.pi + theta, math.pi - theta])


def base_behavior(model: str, theta: float) -> Behavior:
    if model == "quantum-singlet":
        return quantum_behavior(QuantumStrategy(SINGLET, coplanar_settings(singlet_angles(theta))))
    if model == "classical-deterministic":
        return deterministic_behavior()
    raise ValidationError(f"unknown base model {model!r}")


def summarize(signed: np.ndarray, tol: float = CLASSIFY_TOL) -> SurfaceSummary:
    """Scan the fixed-q cuts (columns of ``signed``) of a surface grid."""
    row_max = np.max(np.abs(signed), axis=0)
    return SurfaceSummary(
        q0_row_max=float(row_max[0]),
        q1_row_min=float(np.min(signed[:, -1])),
        q1_row_max=float(np.max(signed[:, -1])),
        row_max=row_max,
        classical_cut_exists=bool(np.any(row_max <= BELL_BOUND + tol)),
        superquantum_cut_exists=bool(np.any(row_max > TSIRELSON_BOUND + tol)),
    )


def surface(spec: SurfaceSpec) -> Surface:
    thetas, qs = spec.thetas, spec.qs
    pr = pr_box()
    signed = np.empty((thetas.size, qs.size))
    for i, theta in enumerate(thetas):
        base = base_behavior(spec.base_model, float(theta))
        for j, q in enumerate(qs):
            signed[i, j] = signed_combination(mix(float(q), pr, base))
    return Surface(spec, thetas, qs, signed, summarize(signed))


def surface_to_csv(surf: Surface) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(SURFACE_HEADER)
    for i, theta in enumerate(surf.thetas):
        for j, q in enumerate(surf.qs):
            s = surf.signed[i, j]
            writer.writerow([f"{theta:.17g}", f"{q:.17g}", f"{s:.17g}", f"{abs(s):.17g}"])
    for line in surf.summary.lines(surf.spec):
        buf.write(f"# {line}\n")
    return buf.getvalue()


def surface_to_json(surf: Surface) -> dict:
    s = surf.summary
    return {
        "theta": surf.thetas.tolist(),
        "q": surf.qs.tolist(),
        "chsh_signed": surf.signed.tolist(),
        "chsh_abs": surf.absolute.tolist(),
        "summary": {
            "base_model": surf.spec.base_model,
            "q0_row_max": s.q0_row_max,
            "q1_row_min": s.q1_row_min,
            "q1_row_max": s.q1_row_max,
            "classical_cut_exists": s.classical_cut_exists,
            "superquantum_cut_exists": s.superquantum_cut_exists,
            "X_cc": X_CC,
        },
    }


def read_surface_csv(text: str) -> tuple[np.ndarray, np.ndarray, np.ndarray, dict[str, str]]:
    """Parse emitted CSV back into ``(thetas, qs, signed[theta, q], summary)``."""
    summary: dict[str, str] = {}
    data_lines = []
    for line in text.splitlines():
        if line.startswith("# "):
            key, _, value = line[2:].partition(" = ")
            summary[key.strip()] = value.strip()
        elif line:
            data_lines.append(line)
    reader = csv.reader(data_lines)
    header = next(reader)
    if header != SURFACE_HEADER:
        raise ValidationError(f"unexpected surface header {header!r}")
    rows = [[float(v) for v in r] for r in reader]
    arr = np.array(rows)
    thetas = np.unique(arr[:, 0])
    qs = np.unique(arr[:, 1])
    signed = arr[:, 2].reshape(thetas.size, qs.size)
    return thetas, qs, signed, summary
