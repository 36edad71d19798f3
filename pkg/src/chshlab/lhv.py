"""Local hidden-variable models over a finite hidden-state space.

The shared randomness is a finite list of hidden states with weights; each
state fixes Alice's answers ``A(a)`` and Bob's answers ``B(b)`` to +1 or -1.
Sampling uses numpy's PCG64 generator (``numpy.random.default_rng``) seeded
explicitly by the caller.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass
from typing import Any, NamedTuple, Sequence

import numpy as np

from .behavior import Behavior, correlation_array, signed_combination_array
from .errors import RangeError, ValidationError

WEIGHT_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class LhvModel:
    """Weights ``rho(lambda)`` with response tables ``A[lambda, a]``, ``B[lambda, b]``."""

    weights: np.ndarray
    A: np.ndarray
    B: np.ndarray

    def __post_init__(self) -> None:
        w = np.array(self.weights, dtype=float).reshape(-1)
        A = np.array(self.A, dtype=float).reshape(-1, 2)
        B = np.array(self.B, dtype=float).reshape(-1, 2)
        if w.size == 0:
            raise ValidationError("an LHV model needs at least one hidden state")
        if A.shape[0] != w.size or B.shape[0] != w.size:
            raise ValidationError(
                f"{w.size} weights but {A.shape[0]} A-responses and {B.shape[0]} B-responses"
            )
        total = w.sum()
        if not math.isfinite(total) or w.min() < 0:  # NaN fails min() < 0 but poisons the sum
            raise ValidationError("weights must be finite and nonnegative")
        if abs(total - 1.0) > WEIGHT_TOL:
            raise ValidationError(f"weights must sum to 1, got {total!r}")
        if not (np.abs(A) == 1.0).all():
            raise ValidationError("every A response must be exactly +1 or -1")
        if not (np.abs(B) == 1.0).all():
            raise ValidationError("every B response must be exactly +1 or -1")
        for arr in (w, A, B):
            arr.setflags(write=False)
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "B", B)

    @property
    def size(self) -> int:
        return self.weights.size

    def to_json(self) -> dict[str, Any]:
        return {
            "weights": [float(w) for w in self.weights],
            "responses": [
                {"A": [int(v) for v in a], "B": [int(v) for v in b]} for a, b in zip(self.A, self.B)
            ],
        }

    @classmethod
    def from_json(cls, data: dict[str, Any] | str) -> LhvModel:
        if isinstance(data, str):
            data = json.loads(data)
        unknown = set(data) - {"weights", "responses"}
        if unknown or "weights" not in data or "responses" not in data:
            raise ValidationError("LHV model JSON needs exactly 'weights' and 'responses'")
        try:
            A = [r["A"] for r in data["responses"]]
            B = [r["B"] for r in data["responses"]]
        except (KeyError, TypeError) as exc:
            raise ValidationError("each response needs 'A' and 'B' pairs") from exc
        return cls(np.asarray(data["weights"], dtype=float), np.asarray(A), np.asarray(B))


class DeterministicStrategy(NamedTuple):
    A: int
    A_prime: int
    B: int
    B_prime: int

    def validate(self) -> DeterministicStrategy:
        if any(v not in (1, -1) for v in self):
            raise ValidationError(f"strategy entries must be +1 or -1, got {tuple(self)}")
        return self


def lhv_probability_tables(weights: np.ndarray, A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """Behavior tables for a stack of models.

    ``weights`` has shape ``(..., k)`` and ``A``, ``B`` shape ``(..., k, 2)``;
    the result has shape ``(..., 2, 2, 2, 2)``.  No validation is done here.
    """
    # indicator[..., lam, setting, outcome_index]
    ind_A = np.stack([A == 1.0, A == -1.0], axis=-1).astype(float)
    ind_B = np.stack([B == 1.0, B == -1.0], axis=-1).astype(float)
    return np.einsum("...l,...lai,...lbj->...abij", weights, ind_A, ind_B)


def lhv_to_behavior(model: LhvModel) -> Behavior:
    return Behavior(lhv_probability_tables(model.weights, model.A, model.B))


def lhv_sample(model: LhvModel, n: int, seed: int) -> Behavior:
    """Empirical behavior from ``n`` independent hidden-state draws per setting pair.

    Each of the four setting pairs gets its own ``n`` draws, taken in the order
    (0,0), (0,1), (1,0), (1,1) from one generator seeded with ``seed``.
    """
    if int(n) < 1:
        raise RangeError(f"sample count must be at least 1, got {n!r}")
    n = int(n)
    rng = np.random.default_rng(seed)
    ind_A = np.stack([model.A == 1.0, model.A == -1.0], axis=-1).astype(float)
    ind_B = np.stack([model.B == 1.0, model.B == -1.0], axis=-1).astype(float)
    probs = np.zeros((2, 2, 2, 2))
    for a in range(2):
        for b in range(2):
            counts = rng.multinomial(n, model.weights)
            probs[a, b] = np.einsum("l,li,lj->ij", counts, ind_A[:, a], ind_B[:, b]) / n
    return Behavior(probs)


def all_strategies() -> list[DeterministicStrategy]:
    return [DeterministicStrategy(*s) for s in itertools.product((1, -1), repeat=4)]


def chsh_of_strategy(s: DeterministicStrategy) -> int:
    A, Ap, B, Bp = DeterministicStrategy(*s).validate()
    return A * B + A * Bp + Ap * B - Ap * Bp


def classical_max() -> tuple[int, list[DeterministicStrategy]]:
    """Exhaustive maximum of |C| over the 16 deterministic strategies.

    Every LHV model is a convex mixture of these, so the returned value bounds
    |CHSH| for all of them.  The argmax list holds every strategy with |C| equal
    to the maximum.
    """
    values = {s: chsh_of_strategy(s) for s in all_strategies()}
    best = max(abs(v) for v in values.values())
    return best, [s for s, v in values.items() if abs(v) == best]


def random_lhv_model(rng: np.random.Generator, k: int | None = None) -> LhvModel:
    """A random model with ``k`` hidden states (1 to 8 if not given)."""
    if k is None:
        k = int(rng.integers(1, 9))
    w = rng.dirichlet(np.ones(k))
    w = w / w.sum()
    signs = 1.0 - 2.0 * rng.integers(0, 2, size=(2, k, 2))
    return LhvModel(w, signs[0], signs[1])


def lhv_chsh_values(models: Sequence[LhvModel]) -> np.ndarray:
    """Signed CHSH combination of each model, evaluated as one padded batch."""
    k = max(m.size for m in models)
    w = np.zeros((len(models), k))
    A = np.ones((len(models), k, 2))
    B = np.ones((len(models), k, 2))
    for i, m in enumerate(models):
        w[i, : m.size], A[i, : m.size], B[i, : m.size] = m.weights, m.A, m.B
    return signed_combination_array(correlation_array(lhv_probability_tables(w, A, B)))
