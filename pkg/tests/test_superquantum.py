import math

import numpy as np
import pytest

from chshlab.behavior import chsh_value, correlations, no_signaling_check, uniform_noise
from chshlab.errors import RangeError, ValidationError
from chshlab.superquantum import (
    E1,
    E2,
    X_CC,
    PNormSpace,
    PVector,
    dieks_chain,
    hbar_infinity_norm_check,
    noisy_box,
    pnorm,
    pnorm_chsh_bound,
    pr_box,
)

from test_behavior import brute_force_correlations

P_VALUES = [1.0, 1.5, 2.0, 3.0, 10.0, math.inf]


class TestPrBox:
    def test_saturates(self):
        assert chsh_value(pr_box()) == 4.0

    def test_no_signaling(self):
        assert no_signaling_check(pr_box()).passed

    def test_single_party_marginals(self):
        p = pr_box().probs
        for a in range(2):
            for b in range(2):
                assert list(p[a, b].sum(axis=1)) == [0.5, 0.5]
                assert list(p[a, b].sum(axis=0)) == [0.5, 0.5]

    def test_xor_and_rule(self):
        p = pr_box().probs
        for a in range(2):
            for b in range(2):
                for i in range(2):
                    for j in range(2):
                        assert (p[a, b, i, j] > 0) == ((i ^ j) == (a & b))


class TestNoisyBox:
    def test_endpoints(self):
        assert noisy_box(4.0).behavior == pr_box()
        assert noisy_box(0.0).behavior == uniform_noise()

    def test_xcc(self):
        assert X_CC == pytest.approx(3.2659863237, abs=1e-10)
        box = noisy_box(X_CC)
        E = brute_force_correlations(box.behavior.probs)
        assert abs(E[0, 0] + E[0, 1] + E[1, 0] - E[1, 1] - X_CC) <= 1e-12
        assert abs(chsh_value(box.behavior) - X_CC) <= 1e-12

    def test_sweep_linear_and_no_signaling(self):
        for k in range(401):
            X = k / 100
            box = noisy_box(X)
            assert abs(chsh_value(box.behavior) - X) <= 1e-12
            assert no_signaling_check(box.behavior).passed

    def test_flip_probability_from_table(self):
        for X in (0.0, 1.3, 3.0, 4.0):
            p = noisy_box(X).behavior.probs
            for a in range(2):
                for b in range(2):
                    wrong = sum(p[a, b, i, j] for i in range(2) for j in range(2) if (i ^ j) != (a & b))
                    assert wrong == pytest.approx((4 - X) / 8, abs=1e-15)
            assert noisy_box(X).flip_probability == pytest.approx((4 - X) / 8, abs=0)

    @pytest.mark.parametrize("X", [-0.01, 4.01])
    def test_range(self, X):
        with pytest.raises(RangeError):
            noisy_box(X)

    def test_correlations_scale(self):
        E = correlations(noisy_box(2.0).behavior).E
        np.testing.assert_allclose(E, [[0.5, 0.5], [0.5, -0.5]], atol=1e-15)


class TestPNorm:
    def test_examples(self):
        assert pnorm(PNormSpace(2), PVector(3, 4)) == 5.0
        assert pnorm(PNormSpace(1), PVector(1, 1)) == 2.0
        assert pnorm(PNormSpace(math.inf), PVector(1, 1)) == 1.0
        assert pnorm(PNormSpace("inf"), PVector(-3, 2)) == 3.0

    def test_absolute_values(self):
        assert pnorm(PNormSpace(3), PVector(-1, 1)) == pytest.approx(2 ** (1 / 3), abs=1e-15)

    def test_rejects_small_p(self):
        with pytest.raises(ValidationError):
            PNormSpace(0.5)
        with pytest.raises(ValidationError):
            PNormSpace("two")

    def test_large_p_tends_to_max(self):
        assert pnorm(PNormSpace(1e6), PVector(1, 1)) == pytest.approx(1.0, abs=1e-5)
        assert pnorm(PNormSpace(500), PVector(1e300, 1e300)) < math.inf

    @pytest.mark.parametrize("p", P_VALUES)
    def test_triangle_inequality_and_homogeneity(self, rng, p):
        space = PNormSpace(p)
        u = rng.normal(scale=10, size=(10_000, 2))
        v = rng.normal(scale=10, size=(10_000, 2))
        c = rng.normal(size=10_000)
        for (a1, b1), (a2, b2), k in zip(u, v, c):
            x, y = PVector(a1, b1), PVector(a2, b2)
            assert pnorm(space, x + y) <= pnorm(space, x) + pnorm(space, y) + 1e-12
            assert pnorm(space, PVector(k * a1, k * b1)) == pytest.approx(abs(k) * pnorm(space, x), rel=1e-12, abs=1e-300)
            assert pnorm(space, x) >= 0

    def test_half_would_break_triangle(self):
        # the p = 0.5 formula violates the triangle inequality on e1, e2
        f = lambda a, b: (abs(a) ** 0.5 + abs(b) ** 0.5) ** 2  # noqa: E731
        assert f(1, 1) > f(1, 0) + f(0, 1)


class TestChainBound:
    def test_examples(self):
        assert pnorm_chsh_bound(PNormSpace(1)) == 4.0
        assert abs(pnorm_chsh_bound(PNormSpace(2)) - 2 * math.sqrt(2)) <= 1e-12
        assert pnorm_chsh_bound(PNormSpace(3)) == pytest.approx(2.5198421, abs=1e-7)
        assert pnorm_chsh_bound(PNormSpace(math.inf)) == 2.0

    @pytest.mark.parametrize("p", [1.0, 1.25, 2.0, 3.0, 7.5])
    def test_matches_dieks_chain_on_basis(self, p):
        space = PNormSpace(p)
        chain = dieks_chain(lambda v: pnorm(space, v), E1, E2)
        assert chain == pytest.approx(pnorm_chsh_bound(space), abs=1e-12)

    def test_strictly_decreasing(self):
        ps = np.concatenate([[1.0], np.geomspace(1.001, 1e4, 99)])
        values = [pnorm_chsh_bound(PNormSpace(p)) for p in ps]
        assert all(a > b for a, b in zip(values, values[1:]))
        assert values[-1] > 2.0 and pnorm_chsh_bound(PNormSpace(math.inf)) == 2.0

    def test_limits(self):
        assert pnorm_chsh_bound(PNormSpace(1 + 1e-9)) == pytest.approx(4.0, abs=1e-8)
        assert pnorm_chsh_bound(PNormSpace(1e12)) == pytest.approx(2.0, abs=1e-11)

    def test_p2_matches_optimizer_ceiling(self):
        from chshlab.quantum import SINGLET, optimize_settings

        assert abs(pnorm_chsh_bound(PNormSpace(2)) - optimize_settings(SINGLET).value) <= 1e-9


class TestHbarInfinity:
    def test_report(self):
        r = hbar_infinity_norm_check()
        assert tuple(r) == (4.0, 4.0, 0.0)
        assert abs(r.difference) <= 1e-12

    def test_exceeds_l2_chain(self):
        r = hbar_infinity_norm_check()
        assert r.p2_bound == pytest.approx(2 * math.sqrt(2), abs=1e-15)
        assert r.degenerate_bound > r.p2_bound

    def test_rotated_l1_basis_dependence(self):
        r = hbar_infinity_norm_check()
        # e1 +/- e2 have 45-degree-rotated coordinates (sqrt2, 0) and (0, sqrt2)
        assert r.rotated_p1_bound == pytest.approx(2 * math.sqrt(2), abs=1e-15)
        assert r.rotation_discrepancy == pytest.approx(4 - 2 * math.sqrt(2), abs=1e-15)

    def test_rotation_preserves_l2(self, rng):
        for a, b in rng.normal(size=(100, 2)):
            v = PVector(a, b)
            assert pnorm(PNormSpace(2), v.rotated(0.7)) == pytest.approx(pnorm(PNormSpace(2), v), rel=1e-14)
