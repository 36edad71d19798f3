from __future__ import annotations

import math
from pathlib import Path

import numpy as np
import pytest

FIXTURES = Path(__file__).parent / "fixtures"

# Maximal x-z angles (degrees) for the singlet, found by the brute-force
# grid oracle in test_quantum.py::test_canonical_settings_are_grid_optimal.
CANONICAL_DEG = (0.0, 90.0, 225.0, 135.0)
CANONICAL_RAD = tuple(math.radians(t) for t in CANONICAL_DEG)


def random_probability_tables(rng: np.random.Generator, size: int) -> np.ndarray:
    """Random normalized tables of shape (size, 2, 2, 2, 2), one Dirichlet per cell."""
    p = rng.dirichlet(np.ones(4), size=(size, 2, 2))
    return p.reshape(size, 2, 2, 2, 2)


def random_no_signaling_tables(rng: np.random.Generator, size: int) -> np.ndarray:
    """Random points of the no-signaling polytope: mixtures of its 24 vertices."""
    from chshlab.behavior import deterministic_behavior
    from chshlab.superquantum import pr_box

    vertices = []
    for A0 in (1, -1):
        for A1 in (1, -1):
            for B0 in (1, -1):
                for B1 in (1, -1):
                    vertices.append(deterministic_behavior((A0, A1), (B0, B1)).probs)
    pr = pr_box().probs
    # the 8 PR boxes: local relabelings of inputs and outputs
    for flip_a in range(2):
        for flip_b in range(2):
            for out_flip in range(2):
                vertices.append(_relabel(pr, flip_a, flip_b, out_flip))
    verts = np.array(vertices)
    w = rng.dirichlet(np.ones(len(verts)) * 0.3, size=size)
    return np.einsum("nv,vabij->nabij", w, verts)


def _relabel(pr: np.ndarray, flip_a: int, flip_b: int, out_flip: int) -> np.ndarray:
    """PR box with Alice's input flipped, Bob's input flipped and/or outputs XORed."""
    t = pr
    if flip_a:
        t = t[::-1]
    if flip_b:
        t = t[:, ::-1]
    if out_flip:
        t = t[:, :, ::-1, :]
    return np.ascontiguousarray(t)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20261019)
