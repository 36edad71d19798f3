"""Behaviors P(A,B|a,b) of the two-setting, two-outcome bipartite scenario.

A behavior is stored as a dense array of shape ``(2, 2, 2, 2)`` indexed by
``(a, b, A, B)``.  Settings are 0/1; outcome index 0 means the value +1 and
index 1 means -1 (so ``value = 1 - 2 * index``).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .errors import ImpossibleValueError, RangeError, ValidationError

#: outcome values in index order
OUTCOMES = np.array([1.0, -1.0])
#: A*B for every (A, B) index pair
_PRODUCT = np.outer(OUTCOMES, OUTCOMES)
#: sign pattern of the CHSH combination over (a, b)
CHSH_SIGNS = np.array([[1.0, 1.0], [1.0, -1.0]])

NORMALIZATION_TOL = 1e-9
NO_SIGNALING_TOL = 1e-9
CLASSIFY_TOL = 1e-9

BELL_BOUND = 2.0
TSIRELSON_BOUND = 2.0 * math.sqrt(2.0)
ALGEBRAIC_BOUND = 4.0

DEFAULT_LABELS = ("a", "a'", "b", "b'")


def _check_probs(probs: np.ndarray, tol: float = NORMALIZATION_TOL) -> None:
    if probs.shape[-4:] != (2, 2, 2, 2):
        raise ValidationError(f"behavior must have shape (2, 2, 2, 2), got {probs.shape}")
    if not np.all(np.isfinite(probs)):
        raise ValidationError("behavior contains non-finite entries")
    if np.any(probs < -tol) or np.any(probs > 1.0 + tol):
        bad = np.argwhere((probs < -tol) | (probs > 1.0 + tol))[0]
        raise ValidationError(f"probability out of [0, 1] at index {tuple(int(i) for i in bad)}")
    sums = probs.sum(axis=(-2, -1))
    off = np.abs(sums - 1.0) > tol
    if np.any(off):
        idx = tuple(int(i) for i in np.argwhere(off)[0])
        a, b = idx[-2:]
        raise ValidationError(
            f"normalization violated at cell (a={a}, b={b}): sum = {sums[idx]!r}"
        )


@dataclass(frozen=True, eq=False)
class Behavior:
    """Joint outcome distribution for each of the four setting pairs."""

    probs: np.ndarray
    labels: tuple[str, str, str, str] = DEFAULT_LABELS

    def __post_init__(self) -> None:
        probs = np.array(self.probs, dtype=float).reshape(-1)
        if probs.size != 16:
            raise ValidationError(f"behavior needs 16 probabilities, got {probs.size}")
        probs = probs.reshape(2, 2, 2, 2)
        _check_probs(probs)
        probs.setflags(write=False)
        object.__setattr__(self, "probs", probs)
        if len(self.labels) != 4:
            raise ValidationError("labels must name the four settings a, a', b, b'")
        object.__setattr__(self, "labels", tuple(str(s) for s in self.labels))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Behavior):
            return NotImplemented
        return np.array_equal(self.probs, other.probs) and self.labels == other.labels

    def __getitem__(self, index):
        return self.probs[index]

    def to_json(self) -> dict[str, Any]:
        return {"probs": [float(p) for p in self.probs.reshape(-1)], "labels": list(self.labels)}

    @classmethod
    def from_json(cls, data: dict[str, Any] | str) -> Behavior:
        if isinstance(data, str):
            data = json.loads(data)
        unknown = set(data) - {"probs", "labels"}
        if unknown:
            raise ValidationError(f"unknown behavior keys: {sorted(unknown)}")
        if "probs" not in data:
            raise ValidationError("behavior JSON requires a 'probs' array")
        labels = tuple(data.get("labels", DEFAULT_LABELS))
        return cls(np.asarray(data["probs"], dtype=float), labels)  # type: ignore[arg-type]


@dataclass(frozen=True, eq=False)
class CorrelationTable:
    """Expectation values E(a, b) of the outcome product, indexed ``[a, b]``."""

    E: np.ndarray
    labels: tuple[str, str, str, str] = DEFAULT_LABELS

    def __post_init__(self) -> None:
        E = np.array(self.E, dtype=float).reshape(2, 2)
        if not np.all(np.isfinite(E)) or np.any(np.abs(E) > 1.0 + NORMALIZATION_TOL):
            raise ValidationError(f"correlations must lie in [-1, 1], got {E.tolist()}")
        E.setflags(write=False)
        object.__setattr__(self, "E", E)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, CorrelationTable):
            return NotImplemented
        return np.array_equal(self.E, other.E) and self.labels == other.labels


@dataclass(frozen=True)
class ChshReport:
    value: float
    regime: str
    margins: dict[str, float] = field(default_factory=dict)

    def to_json(self) -> dict[str, Any]:
        return {"value": self.value, "regime": self.regime, "margins": dict(self.margins)}


@dataclass(frozen=True)
class SignalingWitness:
    side: str  # "A" or "B": whose marginal moved
    setting: int  # that party's own setting
    marginals: tuple[tuple[float, float], tuple[float, float]]  # for other setting 0 and 1
    discrepancy: float  # L1 distance between the two marginals


@dataclass(frozen=True)
class NoSignalingResult:
    passed: bool
    witness: SignalingWitness | None = None

    def __bool__(self) -> bool:
        return self.passed


def as_behavior(obj: Behavior | np.ndarray) -> Behavior:
    return obj if isinstance(obj, Behavior) else Behavior(np.asarray(obj, dtype=float))


def correlation_array(probs: np.ndarray) -> np.ndarray:
    """E[..., a, b] for a stack of probability tables of shape ``(..., 2, 2, 2, 2)``."""
    return np.einsum("...abij,ij->...ab", probs, _PRODUCT)


def signed_combination_array(E: np.ndarray) -> np.ndarray:
    """E(a,b) + E(a,b') + E(a',b) - E(a',b') over the trailing ``(2, 2)`` axes."""
    return np.einsum("...ab,ab->...", E, CHSH_SIGNS)


def correlations(behavior: Behavior | np.ndarray) -> CorrelationTable:
    b = as_behavior(behavior)
    E = np.clip(correlation_array(b.probs), -1.0, 1.0)
    return CorrelationTable(E, b.labels)


def signed_combination(corr: CorrelationTable | Behavior) -> float:
    """The CHSH combination before taking the absolute value."""
    if isinstance(corr, Behavior):
        corr = correlations(corr)
    return float(signed_combination_array(corr.E))


def chsh_value(corr: CorrelationTable | Behavior) -> float:
    return abs(signed_combination(corr))


def classify(value: float, tol: float = CLASSIFY_TOL) -> ChshReport:
    """Place a CHSH value among the classical, quantum and super-quantum regimes.

    Values within ``tol`` of a threshold go to the weaker regime, so a strategy
    saturating 2 is classical-compatible and one saturating 2*sqrt(2) is
    quantum-compatible.  Only values at 4 (within ``tol``) are ``maximal``.
    """
    value = float(value)
    if not math.isfinite(value) or value < -tol:
        raise ValidationError(f"CHSH value must be a nonnegative number, got {value!r}")
    if value > ALGEBRAIC_BOUND + tol:
        raise ImpossibleValueError(f"CHSH value {value!r} exceeds the algebraic maximum 4")
    if value <= BELL_BOUND + tol:
        regime = "classical-compatible"
    elif value <= TSIRELSON_BOUND + tol:
        regime = "quantum-compatible"
    elif value < ALGEBRAIC_BOUND - tol:
        regime = "super-quantum"
    else:
        regime = "maximal"
    margins = {
        "bell": value - BELL_BOUND,
        "tsirelson": value - TSIRELSON_BOUND,
        "algebraic": value - ALGEBRAIC_BOUND,
    }
    return ChshReport(value, regime, margins)


def no_signaling_check(behavior: Behavior | np.ndarray, tol: float = NO_SIGNALING_TOL) -> NoSignalingResult:
    """Check that each party's marginals ignore the other party's setting.

    On failure the first violating marginal is returned: Alice's side is
    scanned before Bob's, and settings in increasing order.
    """
    probs = as_behavior(behavior).probs
    marg_A = probs.sum(axis=3)  # [a, b, A]
    marg_B = probs.sum(axis=2)  # [a, b, B]
    for a in range(2):
        m0, m1 = marg_A[a, 0], marg_A[a, 1]
        if np.any(np.abs(m0 - m1) > tol):
            return NoSignalingResult(False, _witness("A", a, m0, m1))
    for b in range(2):
        m0, m1 = marg_B[0, b], marg_B[1, b]
        if np.any(np.abs(m0 - m1) > tol):
            return NoSignalingResult(False, _witness("B", b, m0, m1))
    return NoSignalingResult(True)


def _witness(side: str, setting: int, m0: np.ndarray, m1: np.ndarray) -> SignalingWitness:
    return SignalingWitness(
        side=side,
        setting=setting,
        marginals=(tuple(float(v) for v in m0), tuple(float(v) for v in m1)),  # type: ignore[arg-type]
        discrepancy=float(np.abs(m0 - m1).sum()),
    )


def mix(q: float, b1: Behavior, b2: Behavior) -> Behavior:
    """Convex combination ``q * b1 + (1 - q) * b2``."""
    q = float(q)
    if not 0.0 <= q <= 1.0:
        raise RangeError(f"mixing weight must be in [0, 1], got {q!r}")
    if q == 1.0:
        return Behavior(b1.probs, b1.labels)
    if q == 0.0:
        return Behavior(b2.probs, b2.labels)
    return Behavior(q * b1.probs + (1.0 - q) * b2.probs, b1.labels)


def uniform_noise() -> Behavior:
    return Behavior(np.full((2, 2, 2, 2), 0.25))


def deterministic_behavior(A: tuple[int, int] = (1, 1), B: tuple[int, int] = (1, 1)) -> Behavior:
    """Point-mass behavior with Alice answering ``A[a]`` and Bob ``B[b]``."""
    probs = np.zeros((2, 2, 2, 2))
    for a in range(2):
        for b in range(2):
            probs[a, b, outcome_index(A[a]), outcome_index(B[b])] = 1.0
    return Behavior(probs)


def outcome_index(value: int) -> int:
    if value == 1:
        return 0
    if value == -1:
        return 1
    raise ValidationError(f"outcomes must be +1 or -1, got {value!r}")
