import math

import numpy as np
import pytest

from chshlab.behavior import chsh_value, mix, no_signaling_check
from chshlab.errors import ValidationError
from chshlab.superquantum import pr_box
from chshlab.surface import (
    SurfaceSpec,
    base_behavior,
    read_surface_csv,
    summarize,
    surface,
    surface_to_csv,
    surface_to_json,
)

SQRT2 = math.sqrt(2)


@pytest.fixture(scope="module")
def small():
    return surface(SurfaceSpec(theta_steps=37, q_steps=11))


def test_base_curve_closed_form():
    for theta in np.linspace(0, math.pi, 25):
        b = base_behavior("quantum-singlet", float(theta))
        expected = 3 * math.cos(theta) - math.cos(3 * theta)
        assert abs(chsh_value(b) - abs(expected)) <= 1e-12


def test_q1_row_is_four(small):
    np.testing.assert_array_equal(small.signed[:, -1], 4.0)


def test_q0_row_peaks_at_tsirelson():
    surf = surface(SurfaceSpec(theta_steps=181, q_steps=2))
    assert abs(surf.summary.q0_row_max - 2 * SQRT2) <= 1e-6
    assert np.max(surf.absolute[:, 0]) <= 2 * SQRT2 + 1e-12


def test_midpoint_value():
    surf = surface(SurfaceSpec(theta_steps=5, q_steps=3))
    # theta = pi/4, q = 1/2
    assert surf.signed[1, 1] == pytest.approx(2 + SQRT2, abs=1e-12)


def test_columns_affine_in_q(small):
    q = small.qs
    expected = small.signed[:, :1] * (1 - q) + 4.0 * q
    np.testing.assert_allclose(small.signed, expected, atol=1e-12)


def test_cells_are_no_signaling():
    for theta in (0.1, 1.0, 2.5):
        for q in (0.0, 0.3, 1.0):
            assert no_signaling_check(mix(q, pr_box(), base_behavior("quantum-singlet", theta))).passed


def test_summary_matches_direct_scan(small):
    s = small.summary
    row_max = [max(abs(v) for v in small.signed[:, j]) for j in range(small.qs.size)]
    np.testing.assert_array_equal(s.row_max, row_max)
    assert s.q1_row_min == s.q1_row_max == 4.0
    assert s.classical_cut_exists == any(m <= 2 + 1e-9 for m in row_max)
    assert s.superquantum_cut_exists == any(m > 2 * SQRT2 + 1e-9 for m in row_max)


def test_quantum_base_has_no_classical_cut(small):
    # every cut of the quantum base is at least (1 - q) 2 sqrt2 + 4q
    assert np.all(small.summary.row_max >= 2 * SQRT2 - 1e-12)
    assert not small.summary.classical_cut_exists
    assert small.summary.superquantum_cut_exists


def test_classical_base_has_both_cuts():
    surf = surface(SurfaceSpec(theta_steps=5, q_steps=5, base_model="classical-deterministic"))
    assert surf.summary.classical_cut_exists and surf.summary.superquantum_cut_exists
    np.testing.assert_allclose(surf.signed[0], [2, 2.5, 3, 3.5, 4], atol=1e-15)


def test_two_by_two_corners():
    surf = surface(SurfaceSpec(theta_steps=2, q_steps=2))
    np.testing.assert_allclose(surf.signed, [[2, 4], [-2, 4]], atol=1e-12)
    rows = [ln for ln in surface_to_csv(surf).splitlines() if not ln.startswith("#")]
    assert rows[0] == "theta,q,chsh_signed,chsh_abs"
    assert len(rows) == 5


def test_csv_round_trip(small):
    text = surface_to_csv(small)
    thetas, qs, signed, summary = read_surface_csv(text)
    assert thetas.tobytes() == small.thetas.tobytes()
    assert qs.tobytes() == small.qs.tobytes()
    assert signed.tobytes() == small.signed.tobytes()
    assert summary["classical_cut_exists"] == "false"
    assert summary["X_cc"] == "3.2659863237"
    assert summarize(signed).row_max.tobytes() == small.summary.row_max.tobytes()


def test_csv_deterministic():
    spec = SurfaceSpec(theta_steps=9, q_steps=4)
    assert surface_to_csv(surface(spec)) == surface_to_csv(surface(spec))


def test_json(small):
    data = surface_to_json(small)
    assert np.array(data["chsh_signed"]).shape == (37, 11)
    assert data["summary"]["base_model"] == "quantum-singlet"


def test_validation():
    with pytest.raises(ValidationError):
        SurfaceSpec(theta_steps=1)
    with pytest.raises(ValidationError):
        SurfaceSpec(base_model="hbar")
    with pytest.raises(ValidationError):
        read_surface_csv("a,b\n1,2\n")
