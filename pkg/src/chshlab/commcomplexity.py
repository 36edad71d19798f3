"""Inner product mod 2 with one bit of communication, using nonlocal boxes.

For every index ``i`` Alice feeds ``x_i`` and Bob ``y_i`` into box ``i`` and
they receive bits ``alpha_i``, ``beta_i``.  A perfect PR box guarantees
``alpha_i XOR beta_i = x_i AND y_i``, so the parities of the two output
strings differ by exactly ``<x, y> mod 2``.  Alice sends her parity; Bob XORs
it into his.

With noisy boxes each use fails independently with probability
``eps = (4 - X) / 8``, and the protocol is right iff an even number of the
``n`` boxes failed: ``P(success) = (1 + (1 - 2 eps)^n) / 2 = (1 + (X/4)^n) / 2``.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass

import numpy as np

from .behavior import Behavior
from .errors import ValidationError
from .superquantum import X_CC, noisy_box


@dataclass(frozen=True)
class BoxEnsemble:
    n: int
    X: float
    seed: int

    def __post_init__(self) -> None:
        if int(self.n) < 1:
            raise ValidationError(f"need at least one box, got n = {self.n!r}")
        if not 0.0 <= float(self.X) <= 4.0:
            raise ValidationError(f"box strength must be in [0, 4], got {self.X!r}")


@dataclass(frozen=True)
class BobView:
    """Everything Bob's output may depend on."""

    y: tuple[int, ...]
    betas: tuple[int, ...]
    message: int  # the single bit received from Alice


@dataclass(frozen=True)
class ProtocolRun:
    x: tuple[int, ...]
    y: tuple[int, ...]
    transcript: tuple[int, ...]  # bits sent Alice -> Bob
    output: int
    correct: bool


@dataclass(frozen=True)
class CurveRow:
    X: float
    empirical: float
    predicted: float
    trials: int
    n: int
    seed: int
    is_xcc: bool = False

    @property
    def sigma(self) -> float:
        """Binomial standard error of ``empirical`` at the predicted rate."""
        p = self.predicted
        return math.sqrt(p * (1.0 - p) / self.trials)


def _bits(v, name: str) -> np.ndarray:
    arr = np.asarray([int(b) for b in v], dtype=np.int64)
    if arr.ndim != 1 or np.any((arr != 0) & (arr != 1)):
        raise ValidationError(f"{name} must be a string of bits")
    return arr


def sample_boxes(box: Behavior, x: np.ndarray, y: np.ndarray, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    """Independent uses of ``box`` with inputs ``x``, ``y`` (any equal shapes).

    Returns the output bits ``alpha = (1 - A) / 2`` and ``beta = (1 - B) / 2``.
    """
    cells = box.probs.reshape(2, 2, 4)[x, y]  # (..., 4) over (A, B) index pairs
    cdf = np.cumsum(cells, axis=-1)
    u = rng.random(x.shape)
    k = np.minimum((u[..., None] >= cdf[..., :-1]).sum(axis=-1), 3)
    return k // 2, k % 2


def alice_message(alphas: np.ndarray) -> np.ndarray:
    """Alice's only transmission: the parity of her box outputs."""
    return np.bitwise_xor.reduce(alphas, axis=-1)


def bob_output(view: BobView) -> int:
    return int(np.bitwise_xor.reduce(np.asarray(view.betas, dtype=np.int64))) ^ int(view.message)


def _bob_output_array(betas: np.ndarray, message: np.ndarray) -> np.ndarray:
    return np.bitwise_xor.reduce(betas, axis=-1) ^ message


def inner_product_mod2(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    return np.bitwise_xor.reduce(x & y, axis=-1)


def vandam_inner_product(x, y, ensemble: BoxEnsemble) -> ProtocolRun:
    """One run of the protocol on the boxes drawn from ``ensemble``."""
    xb, yb = _bits(x, "x"), _bits(y, "y")
    if xb.size != ensemble.n or yb.size != ensemble.n:
        raise ValidationError(
            f"input lengths {xb.size}, {yb.size} do not match the {ensemble.n} boxes"
        )
    rng = np.random.default_rng(ensemble.seed)
    alphas, betas = sample_boxes(noisy_box(ensemble.X).behavior, xb, yb, rng)
    message = int(alice_message(alphas))
    view = BobView(tuple(int(v) for v in yb), tuple(int(v) for v in betas), message)
    output = bob_output(view)
    return ProtocolRun(
        x=tuple(int(v) for v in xb),
        y=view.y,
        transcript=(message,),
        output=output,
        correct=output == int(inner_product_mod2(xb, yb)),
    )


def predicted_success(X: float, n: int) -> float:
    """Closed-form success probability with ``n`` noisy boxes of strength ``X``."""
    return 0.5 * (1.0 + (float(X) / 4.0) ** n)


def estimate_success(n: int, X: float, trials: int, rng: np.random.Generator) -> float:
    """Fraction of ``trials`` random-input runs that compute ``<x, y> mod 2``."""
    box = noisy_box(X).behavior
    x = rng.integers(0, 2, size=(trials, n))
    y = rng.integers(0, 2, size=(trials, n))
    alphas, betas = sample_boxes(box, x, y, rng)
    out = _bob_output_array(betas, alice_message(alphas))
    return float(np.mean(out == inner_product_mod2(x, y)))


def default_grid(points: int = 21) -> list[float]:
    return [4.0 * i / (points - 1) for i in range(points)]


def success_curve(n: int, X_grid, trials: int, seed: int, include_xcc: bool = True) -> list[CurveRow]:
    """Empirical and predicted success over a grid of box strengths.

    Row ``k`` (after sorting, with the ``X_cc`` row inserted unless already
    present) draws from ``default_rng([seed, k])``, so every row is
    reproducible on its own.
    """
    if int(trials) < 1:
        raise ValidationError(f"trials must be at least 1, got {trials!r}")
    if int(n) < 1:
        raise ValidationError(f"n must be at least 1, got {n!r}")
    xs = [float(v) for v in X_grid]
    for v in xs:
        if not 0.0 <= v <= 4.0:
            raise ValidationError(f"X values must lie in [0, 4], got {v!r}")
    if include_xcc and not any(abs(v - X_CC) <= 1e-12 for v in xs):
        xs.append(X_CC)
    xs.sort()
    rows = []
    for k, X in enumerate(xs):
        rng = np.random.default_rng([seed, k])
        rows.append(
            CurveRow(
                X=X,
                empirical=estimate_success(n, X, int(trials), rng),
                predicted=predicted_success(X, n),
                trials=int(trials),
                n=int(n),
                seed=int(seed),
                is_xcc=abs(X - X_CC) <= 1e-12,
            )
        )
    return rows


CURVE_HEADER = ["X", "empirical", "predicted", "trials", "n", "seed"]


def curve_to_csv(rows: list[CurveRow]) -> str:
    buf = io.StringIO()
    buf.write(f"# X_cc = {X_CC:.10f}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CURVE_HEADER)
    for r in rows:
        writer.writerow([f"{r.X:.17g}", f"{r.empirical:.17g}", f"{r.predicted:.17g}", r.trials, r.n, r.seed])
    return buf.getvalue()


def curve_to_json(rows: list[CurveRow]) -> dict:
    return {
        "X_cc": X_CC,
        "rows": [
            {
                "X": r.X,
                "empirical": r.empirical,
                "predicted": r.predicted,
                "trials": r.trials,
                "n": r.n,
                "seed": r.seed,
                "is_xcc": r.is_xcc,
            }
            for r in rows
        ],
    }
