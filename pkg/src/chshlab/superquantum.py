"""Super-quantum correlations: PR boxes, noisy boxes and the l^p norm model."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .behavior import Behavior, mix, uniform_noise
from .errors import RangeError, ValidationError

#: CHSH strength above which noisy boxes trivialize communication complexity
X_CC = 4.0 * math.sqrt(2.0 / 3.0)


def pr_box() -> Behavior:
    """The Popescu-Rohrlich box.

    In bit encoding (``alpha = (1 - A) / 2``) the outcomes satisfy
    ``alpha XOR beta = a AND b`` with uniform marginals, so
    ``E = +1`` on three setting pairs and ``E = -1`` on ``(1, 1)``.
    """
    probs = np.zeros((2, 2, 2, 2))
    for a in range(2):
        for b in range(2):
            for i in range(2):
                for j in range(2):
                    if i ^ j == a & b:
                        probs[a, b, i, j] = 0.5
    return Behavior(probs)


@dataclass(frozen=True)
class NoisyPrBox:
    X: float
    behavior: Behavior = field(repr=False)

    @property
    def flip_probability(self) -> float:
        """Chance that a single use violates ``alpha XOR beta = a AND b``."""
        return (4.0 - self.X) / 8.0


def noisy_box(X: float) -> NoisyPrBox:
    """PR box mixed with uniform noise so that the CHSH value is exactly ``X``."""
    X = float(X)
    if not 0.0 <= X <= 4.0:
        raise RangeError(f"box strength must be in [0, 4], got {X!r}")
    return NoisyPrBox(X, mix(X / 4.0, pr_box(), uniform_noise()))


# -- l^p norms ------------------------------------------------------------


@dataclass(frozen=True)
class PNormSpace:
    """Two-dimensional real space with the l^p norm; ``p = math.inf`` is the max norm."""

    p: float

    def __post_init__(self) -> None:
        p = self.p
        if isinstance(p, str):
            if p.strip().lower() not in ("inf", "infinity", "∞"):
                raise ValidationError(f"unrecognized exponent {p!r}")
            p = math.inf
        p = float(p)
        if math.isnan(p) or p < 1.0:
            raise ValidationError(f"l^p is a norm only for p >= 1, got p = {p!r}")
        object.__setattr__(self, "p", p)

    @property
    def is_max_norm(self) -> bool:
        return math.isinf(self.p)


@dataclass(frozen=True)
class PVector:
    alpha: float
    beta: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.alpha) and math.isfinite(self.beta)):
            raise ValidationError("vector coefficients must be finite")

    def __add__(self, other: PVector) -> PVector:
        return PVector(self.alpha + other.alpha, self.beta + other.beta)

    def __sub__(self, other: PVector) -> PVector:
        return PVector(self.alpha - other.alpha, self.beta - other.beta)

    def rotated(self, angle: float) -> PVector:
        """Coordinates of the same vector in a basis rotated by ``angle``."""
        c, s = math.cos(angle), math.sin(angle)
        return PVector(c * self.alpha + s * self.beta, -s * self.alpha + c * self.beta)


E1 = PVector(1.0, 0.0)
E2 = PVector(0.0, 1.0)


def pnorm(space: PNormSpace, v: PVector) -> float:
    """``(|alpha|^p + |beta|^p)^(1/p)``, or ``max(|alpha|, |beta|)`` at p = inf."""
    x, y = abs(v.alpha), abs(v.beta)
    if space.is_max_norm:
        return max(x, y)
    if space.p == 1.0:
        return x + y
    if space.p == 2.0:
        return math.hypot(x, y)
    big = max(x, y)
    if big == 0.0:
        return 0.0
    # scale out the larger entry to avoid overflow for large p
    return big * ((x / big) ** space.p + (y / big) ** space.p) ** (1.0 / space.p)


def dieks_chain(norm, b: PVector, b_prime: PVector) -> float:
    """``||B + B'|| + ||B - B'||`` for a given norm function."""
    return norm(b + b_prime) + norm(b - b_prime)


def pnorm_chsh_bound(space: PNormSpace) -> float:
    """The chain bound ``2 * 2^(1/p)`` obtained with ``B = e1``, ``B' = e2``."""
    if space.is_max_norm:
        return 2.0
    return 2.0 ** (1.0 + 1.0 / space.p)


@dataclass(frozen=True)
class NormCheckReport:
    degenerate_bound: float  # chain with ||B +/- B'|| = ||B|| + ||B'||
    p1_bound: float  # l^1 chain on the basis vectors
    difference: float
    p2_bound: float  # l^2 chain on the same vectors
    rotated_p1_bound: float  # l^1 chain measured in a 45-degree rotated basis

    @property
    def rotation_discrepancy(self) -> float:
        return self.p1_bound - self.rotated_p1_bound

    def __iter__(self):
        return iter((self.degenerate_bound, self.p1_bound, self.difference))


def hbar_infinity_norm_check() -> NormCheckReport:
    """Compare the washed-out-phase norm rule with the l^1 model.

    With phases washed out, ``||B +/- B'||`` is replaced by ``||B|| + ||B'||``
    for unit vectors, which turns the chain bound into 4.  The l^1 norm gives
    the same 4 on the basis vectors but only ``2*sqrt(2)`` once the axes are
    rotated by 45 degrees, whereas the degenerate rule does not depend on the
    basis at all.
    """
    l1 = PNormSpace(1.0)
    l2 = PNormSpace(2.0)

    def degenerate(_v: PVector) -> float:
        return pnorm(l2, E1) + pnorm(l2, E2)

    deg = dieks_chain(degenerate, E1, E2)
    p1 = dieks_chain(lambda v: pnorm(l1, v), E1, E2)
    p2 = dieks_chain(lambda v: pnorm(l2, v), E1, E2)
    rotated = dieks_chain(lambda v: pnorm(l1, v.rotated(math.pi / 4.0)), E1, E2)
    return NormCheckReport(deg, p1, deg - p1, p2, rotated)
