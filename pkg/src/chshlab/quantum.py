"""Two-qubit CHSH strategies, the CHSH operator and its Tsirelson certificate.

Observables are ``n . sigma`` for Bloch unit vectors ``n``; Alice's act on the
first tensor factor and Bob's on the second.  Spectra go through the Jacobi
solver in :mod:`chshlab.linalg`.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Any

import numpy as np
from scipy.optimize import minimize

from .behavior import Behavior, signed_combination
from .errors import ValidationError
from .linalg import check_hermitian, spectral_norm

UNIT_TOL = 1e-12
STATE_TOL = 1e-12
DICHOTOMIC_TOL = 1e-9

I2 = np.eye(2, dtype=complex)
PAULI = np.array(
    [
        [[0, 1], [1, 0]],
        [[0, -1j], [1j, 0]],
        [[1, 0], [0, -1]],
    ],
    dtype=complex,
)

SINGLET = np.array([0, 1, -1, 0], dtype=complex) / math.sqrt(2.0)

GRID_STEP_DEG = 3.0
NM_MAXITER = 500
NM_XATOL = 1e-9


def _unit(vec: Any, name: str = "Bloch vector") -> np.ndarray:
    n = np.asarray(vec, dtype=float).reshape(-1)
    if n.shape != (3,) or not np.all(np.isfinite(n)):
        raise ValidationError(f"{name} must be three finite numbers, got {vec!r}")
    if abs(np.linalg.norm(n) - 1.0) > UNIT_TOL:
        raise ValidationError(f"{name} must have unit length, got |n| = {np.linalg.norm(n)!r}")
    n.setflags(write=False)
    return n


def _unit_state(state: Any) -> np.ndarray:
    psi = np.asarray(state, dtype=complex).reshape(-1)
    if psi.shape != (4,) or not np.all(np.isfinite(psi)):
        raise ValidationError(f"state must be 4 finite amplitudes, got shape {psi.shape}")
    norm = np.linalg.norm(psi)
    if abs(norm - 1.0) > STATE_TOL:
        raise ValidationError(f"state must be normalized, got norm {norm!r}")
    psi.setflags(write=False)
    return psi


@dataclass(frozen=True, eq=False)
class Settings:
    """Measurement directions ``a, a'`` for Alice and ``b, b'`` for Bob."""

    a: np.ndarray
    a_prime: np.ndarray
    b: np.ndarray
    b_prime: np.ndarray

    def __post_init__(self) -> None:
        for name in ("a", "a_prime", "b", "b_prime"):
            object.__setattr__(self, name, _unit(getattr(self, name), name))

    @property
    def alice(self) -> tuple[np.ndarray, np.ndarray]:
        return self.a, self.a_prime

    @property
    def bob(self) -> tuple[np.ndarray, np.ndarray]:
        return self.b, self.b_prime

    def as_array(self) -> np.ndarray:
        return np.stack([self.a, self.a_prime, self.b, self.b_prime])

    def to_json(self) -> dict[str, list[float]]:
        return {
            "a": [float(x) for x in self.a],
            "a_prime": [float(x) for x in self.a_prime],
            "b": [float(x) for x in self.b],
            "b_prime": [float(x) for x in self.b_prime],
        }

    @classmethod
    def from_json(cls, data: dict[str, Any]) -> Settings:
        keys = {"a", "a_prime", "b", "b_prime"}
        if set(data) != keys:
            raise ValidationError(f"settings need exactly the keys {sorted(keys)}")
        return cls(**{k: np.asarray(data[k], dtype=float) for k in keys})


@dataclass(frozen=True, eq=False)
class QuantumStrategy:
    state: np.ndarray
    settings: Settings

    def __post_init__(self) -> None:
        object.__setattr__(self, "state", _unit_state(self.state))

    def to_json(self) -> dict[str, Any]:
        return {
            "state": [[float(z.real), float(z.imag)] for z in self.state],
            "settings": self.settings.to_json(),
        }

    @classmethod
    def from_json(cls, data: dict[str, Any] | str) -> QuantumStrategy:
        if isinstance(data, str):
            data = json.loads(data)
        if set(data) != {"state", "settings"}:
            raise ValidationError("quantum strategy JSON needs exactly 'state' and 'settings'")
        return cls(state_from_json(data["state"]), Settings.from_json(data["settings"]))


@dataclass(frozen=True)
class SpectralReport:
    chat_norm: float
    chsh_expectation: float
    identity_residual: float

    def to_json(self) -> dict[str, float]:
        return {
            "chat_norm": self.chat_norm,
            "chsh_expectation": self.chsh_expectation,
            "identity_residual": self.identity_residual,
        }


@dataclass(frozen=True)
class OptimizationResult:
    settings: Settings
    value: float
    converged: bool
    grid_value: float
    iterations: int

    def __iter__(self):
        # unpacks as (settings, value)
        return iter((self.settings, self.value))


def state_from_json(data: Any) -> np.ndarray:
    try:
        pairs = np.asarray(data, dtype=float)
    except (TypeError, ValueError) as exc:
        raise ValidationError("state must be a list of [re, im] pairs") from exc
    if pairs.shape != (4, 2):
        raise ValidationError(f"state must be 4 [re, im] pairs, got shape {pairs.shape}")
    return pairs[:, 0] + 1j * pairs[:, 1]


def bloch(theta: float, phi: float = 0.0) -> np.ndarray:
    """Unit vector at polar angle ``theta`` and azimuth ``phi``."""
    return np.array(
        [math.sin(theta) * math.cos(phi), math.sin(theta) * math.sin(phi), math.cos(theta)]
    )


def coplanar_settings(angles: Any) -> Settings:
    """Settings in the x-z plane from four polar angles ``(a, a', b, b')``."""
    return Settings(*(bloch(t) for t in np.asarray(angles, dtype=float)))


def observable(n: Any) -> np.ndarray:
    """The dichotomic qubit observable ``n . sigma``."""
    return np.einsum("i,ijk->jk", _unit(n), PAULI)


def _observables(vectors: np.ndarray) -> np.ndarray:
    return np.einsum("...i,ijk->...jk", vectors, PAULI)


def _kron(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Kronecker product of two stacks of 2x2 matrices."""
    out = np.einsum("...ij,...kl->...ikjl", x, y)
    return out.reshape(out.shape[:-4] + (4, 4))


def chat_batch(a: np.ndarray, a_prime: np.ndarray, b: np.ndarray, b_prime: np.ndarray) -> np.ndarray:
    """CHSH operators for stacks of direction vectors of shape ``(..., 3)``."""
    A, Ap, B, Bp = (_observables(np.asarray(v, dtype=float)) for v in (a, a_prime, b, b_prime))
    return _kron(A, B + Bp) + _kron(Ap, B - Bp)


def chat(settings: Settings) -> np.ndarray:
    """``A(x)B + A(x)B' + A'(x)B - A'(x)B'`` as a 4x4 Hermitian matrix."""
    return chat_batch(settings.a, settings.a_prime, settings.b, settings.b_prime)


def commutator(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    return x @ y - y @ x


def identity_residual_batch(a, a_prime, b, b_prime) -> np.ndarray:
    A, Ap, B, Bp = (_observables(np.asarray(v, dtype=float)) for v in (a, a_prime, b, b_prime))
    C = _kron(A, B + Bp) + _kron(Ap, B - Bp)
    rhs = 4.0 * np.eye(4) - _kron(commutator(A, Ap), commutator(B, Bp))
    diff = C @ C - rhs
    return np.sqrt(np.sum(np.abs(diff) ** 2, axis=(-2, -1)))


def chat_squared_identity(settings: Settings) -> float:
    """Frobenius norm of ``C^2 - (4 I - [A, A'] (x) [B, B'])``."""
    return float(
        identity_residual_batch(settings.a, settings.a_prime, settings.b, settings.b_prime)
    )


def correlation_tensor(state: Any) -> np.ndarray:
    """``T[i, j] = <psi| sigma_i (x) sigma_j |psi>``, so that ``E(a, b) = a . T . b``."""
    psi = _unit_state(state)
    ops = _kron(PAULI[:, np.newaxis], PAULI[np.newaxis, :])  # (3, 3, 4, 4)
    return np.einsum("i,xyij,j->xy", psi.conj(), ops, psi).real


def quantum_behavior(strategy: QuantumStrategy) -> Behavior:
    """Joint outcome probabilities from the projectors ``(I +/- n . sigma) / 2``."""
    psi = strategy.state
    s = strategy.settings
    signs = np.array([1.0, -1.0])
    proj_A = 0.5 * (I2 + signs[None, :, None, None] * _observables(np.stack(s.alice))[:, None])
    proj_B = 0.5 * (I2 + signs[None, :, None, None] * _observables(np.stack(s.bob))[:, None])
    # proj_*: [setting, outcome, 2, 2]
    joint = _kron(proj_A[:, None, :, None], proj_B[None, :, None, :])  # [a, b, A, B, 4, 4]
    probs = np.einsum("i,abxyij,j->abxy", psi.conj(), joint, psi).real
    probs = np.clip(probs, 0.0, 1.0)
    return Behavior(probs)


def chsh_expectation(strategy: QuantumStrategy) -> float:
    psi = strategy.state
    return float(np.vdot(psi, chat(strategy.settings) @ psi).real)


def spectral_report(strategy: QuantumStrategy) -> SpectralReport:
    return SpectralReport(
        chat_norm=float(spectral_norm(chat(strategy.settings))),
        chsh_expectation=chsh_expectation(strategy),
        identity_residual=chat_squared_identity(strategy.settings),
    )


def symmetrized_chat(A: np.ndarray, A_prime: np.ndarray, B: np.ndarray, B_prime: np.ndarray) -> np.ndarray:
    """Hermitian CHSH operator for observables that need not commute across sides.

    Each product is replaced by half its anticommutator.  For side-commuting
    inputs this reduces to the ordinary CHSH operator.
    """
    ops = [np.asarray(x, dtype=complex) for x in (A, A_prime, B, B_prime)]
    for name, op in zip(("A", "A'", "B", "B'"), ops):
        if op.shape != (4, 4):
            raise ValidationError(f"{name} must be 4x4, got {op.shape}")
        try:
            check_hermitian(op)
        except ValidationError as exc:
            raise ValidationError(f"{name}: {exc}") from None
        if np.max(np.abs(op @ op - np.eye(4))) > DICHOTOMIC_TOL:
            raise ValidationError(f"{name} must square to the identity")
    A, Ap, B, Bp = ops

    def sym(x, y):
        return 0.5 * (x @ y + y @ x)

    return sym(A, B) + sym(A, Bp) + sym(Ap, B) - sym(Ap, Bp)


def tensor_observables(settings: Settings) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """``A (x) I``, ``A' (x) I``, ``I (x) B``, ``I (x) B'`` as 4x4 matrices."""
    A, Ap = (np.kron(observable(v), I2) for v in settings.alice)
    B, Bp = (np.kron(I2, observable(v)) for v in settings.bob)
    return A, Ap, B, Bp


# -- optimization ---------------------------------------------------------


def _coplanar_value(angles: np.ndarray, T: np.ndarray) -> float:
    a, ap, b, bp = (np.array([math.sin(t), 0.0, math.cos(t)]) for t in angles)
    return float(a @ T @ (b + bp) + ap @ T @ (b - bp))


def _spherical_value(params: np.ndarray, T: np.ndarray) -> float:
    a, ap, b, bp = (bloch(params[2 * k], params[2 * k + 1]) for k in range(4))
    return float(a @ T @ (b + bp) + ap @ T @ (b - bp))


def coplanar_grid_search(state: Any, step_deg: float = GRID_STEP_DEG) -> tuple[np.ndarray, float]:
    """Exact maximum of the signed CHSH combination over an x-z angle grid.

    For fixed Alice angles the two Bob terms decouple, so the search is
    ``max_{a, a'} [max_b (E(a,b) + E(a',b)) + max_b' (E(a,b') - E(a',b'))]``.
    Ties go to the lexicographically smallest index quadruple.
    """
    T = correlation_tensor(state)
    m = int(round(360.0 / step_deg))
    t = np.deg2rad(step_deg) * np.arange(m)
    dirs = np.stack([np.sin(t), np.zeros(m), np.cos(t)], axis=1)
    table = dirs @ T @ dirs.T  # table[i, j] = E(angle_i, angle_j)
    plus = table[:, None, :] + table[None, :, :]
    minus = table[:, None, :] - table[None, :, :]
    jb = np.argmax(plus, axis=-1)
    jbp = np.argmax(minus, axis=-1)
    totals = np.take_along_axis(plus, jb[..., None], -1)[..., 0] + np.take_along_axis(
        minus, jbp[..., None], -1
    )[..., 0]
    i, ip = np.unravel_index(np.argmax(totals), totals.shape)
    angles = t[[i, ip, jb[i, ip], jbp[i, ip]]]
    return angles, float(totals[i, ip])


def optimize_settings(state: Any, seed: int = 0, restarts: int = 4) -> OptimizationResult:
    """Maximize |<psi|C|psi>| over measurement directions.

    A 3-degree coplanar grid seeds a Nelder-Mead refinement of the four x-z
    angles, then a Nelder-Mead pass over all eight spherical angles (plus
    ``restarts`` seeded perturbations of it) checks for off-plane gains.  The
    best candidate by value wins; ties keep the earliest stage.
    """
    psi = _unit_state(state)
    T = correlation_tensor(psi)
    grid_angles, grid_value = coplanar_grid_search(psi)

    nm = minimize(
        lambda x: -_coplanar_value(x, T),
        grid_angles,
        method="Nelder-Mead",
        options={"maxiter": NM_MAXITER, "xatol": NM_XATOL, "fatol": 1e-15},
    )
    converged = bool(nm.success)
    iterations = int(nm.nit)
    best_value = -float(nm.fun)
    best = np.concatenate([[t, 0.0] for t in nm.x]) if best_value >= grid_value else None
    if best is None:
        best_value = grid_value
        best = np.concatenate([[t, 0.0] for t in grid_angles])

    rng = np.random.default_rng(seed)
    starts = [best] + [best + rng.normal(scale=0.05, size=8) for _ in range(restarts)]
    for x0 in starts:
        res = minimize(
            lambda x: -_spherical_value(x, T),
            x0,
            method="Nelder-Mead",
            options={"maxiter": NM_MAXITER * 4, "xatol": NM_XATOL, "fatol": 1e-15},
        )
        iterations += int(res.nit)
        if -res.fun > best_value:
            best_value, best = -float(res.fun), res.x

    vecs = [bloch(best[2 * k], best[2 * k + 1]) for k in range(4)]
    settings = Settings(*(v / np.linalg.norm(v) for v in vecs))
    value = _spherical_value(best, T)
    return OptimizationResult(settings, abs(value), converged, grid_value, iterations)


def settings_chsh(state: Any, settings: Settings) -> float:
    """Signed CHSH combination of a state under given settings."""
    return signed_combination(quantum_behavior(QuantumStrategy(state, settings)))


def random_settings(rng: np.random.Generator, size: int | None = None) -> np.ndarray:
    """Uniform random unit vectors, shape ``(size, 4, 3)`` (or ``(4, 3)``)."""
    shape = (4, 3) if size is None else (size, 4, 3)
    v = rng.normal(size=shape)
    return v / np.linalg.norm(v, axis=-1, keepdims=True)
