import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from core.cq_channel import (
    AchievabilityGrid,
    CQChannel,
    InputDistribution,
    InputSearchConfig,
    achievability_penalty,
    achievable_rate,
    converse_bound,
    dh_cq,
    holevo_capacity,
    holevo_information,
    joint_state,
    one_shot_bounds,
    optimize_achievability,
    search_simplex,
)
from core.exceptions import ParameterError, ValidationError
from core.hypothesis_testing import dh, relative_entropy
from core.operators import (
    dephasing_channel,
    maximally_mixed,
    partial_trace,
    random_density,
    von_neumann_entropy,
)


def binary_entropy(p):
    return -p * math.log2(p) - (1 - p) * math.log2(1 - p)


# entropy of the uniform mixture of |0> and |+>, whose eigenvalues are cos^2(pi/8) and sin^2(pi/8)
ZERO_PLUS_HOLEVO = binary_entropy(math.cos(math.pi / 8) ** 2)


def random_cq_channel(k, size, dim):
    states = [random_density(dim, seed=100 * k + x) for x in range(size)]
    return CQChannel.from_states([f"x{x}" for x in range(size)], states)


class TestChannelTypes:
    def test_from_kraus_dephasing(self):
        ch = CQChannel.from_kraus(dephasing_channel(3))
        assert ch.labels == ("0", "1", "2")
        for x in range(3):
            expected = np.zeros((3, 3))
            expected[x, x] = 1.0
            assert_allclose(ch.output(str(x)).matrix, expected, atol=1e-12)

    def test_duplicate_labels(self):
        with pytest.raises(ValidationError):
            CQChannel.from_states(["a", "a"], [maximally_mixed(2)] * 2)

    def test_mixed_dimensions(self):
        with pytest.raises(ValidationError):
            CQChannel.from_states(["a", "b"], [maximally_mixed(2), maximally_mixed(3)])

    def test_unknown_label(self, noiseless):
        with pytest.raises(ValidationError):
            noiseless.output("2")


class TestInputDistribution:
    def test_sum(self):
        with pytest.raises(ValidationError):
            InputDistribution(("a", "b"), (0.5, 0.6))

    def test_negative(self):
        with pytest.raises(ValidationError):
            InputDistribution(("a", "b"), (1.5, -0.5))

    def test_from_array_normalizes(self):
        P = InputDistribution.from_array(("a", "b"), [2.0, 6.0])
        assert P.probs == pytest.approx((0.25, 0.75))
        assert str(P) == "a:0.25 b:0.75"

    def test_point_mass(self):
        P = InputDistribution.point_mass(("a", "b", "c"), "b")
        assert P.prob("b") == 1.0
        with pytest.raises(ValidationError):
            InputDistribution.point_mass(("a",), "z")


class TestJointState:
    def test_orthogonal_uniform_average(self, noiseless):
        js = joint_state(noiseless, InputDistribution.uniform(noiseless.labels))
        assert_allclose(js.avg.matrix, np.eye(2) / 2, atol=1e-12)

    def test_point_mass_average(self, zero_plus):
        js = joint_state(zero_plus, InputDistribution.point_mass(zero_plus.labels, "+"))
        assert_allclose(js.avg.matrix, zero_plus.output("+").matrix)

    def test_materialized_marginals(self):
        ch = random_cq_channel(1, 3, 2)
        P = InputDistribution(ch.labels, (0.2, 0.3, 0.5))
        js = joint_state(ch, P)
        pi_ab, product = js.materialize()
        assert pi_ab.trace() == pytest.approx(1.0, abs=1e-12)
        assert_allclose(partial_trace(pi_ab, (3, 2), keep="A").matrix, np.diag(P.probs), atol=1e-12)
        assert_allclose(partial_trace(pi_ab, (3, 2), keep="B").matrix, js.avg.matrix, atol=1e-12)
        assert_allclose(product.matrix, np.kron(np.diag(P.probs), js.avg.matrix), atol=1e-12)

    def test_label_mismatch(self, noiseless):
        with pytest.raises(ValidationError):
            joint_state(noiseless, InputDistribution.uniform(("1", "0")))


class TestBlockwiseValue:
    def test_noiseless_binary(self, noiseless):
        js = joint_state(noiseless, InputDistribution.uniform(noiseless.labels))
        assert dh_cq(js, 0.0).value == pytest.approx(1.0, abs=1e-9)
        assert dh_cq(js, 0.1).value == pytest.approx(-math.log2(0.45), abs=1e-9)

    @pytest.mark.parametrize("weights", [(0.5, 0.5), (0.9, 0.1), (0.2, 0.8)])
    def test_identical_outputs(self, identical, weights):
        js = joint_state(identical, InputDistribution(identical.labels, weights))
        assert dh_cq(js, 0.25).value == pytest.approx(-math.log2(0.75), abs=1e-9)

    def test_matches_materialized_operators(self, rng):
        for k in range(30):
            size = int(rng.integers(1, 5))
            dim = int(rng.integers(2, 5))
            ch = random_cq_channel(k, size, dim)
            P = InputDistribution.from_array(ch.labels, rng.dirichlet(np.ones(size)))
            eps = float(rng.choice([0.0, 0.05, 0.2, 0.5]))
            js = joint_state(ch, P)
            pi_ab, product = js.materialize()
            assert dh_cq(js, eps).value == pytest.approx(dh(pi_ab, product, eps), abs=1e-8)

    def test_tests_are_per_label(self, noiseless):
        js = joint_state(noiseless, InputDistribution.uniform(noiseless.labels))
        res = dh_cq(js, 0.0)
        assert set(res.tests) == {"0", "1"}
        assert_allclose(res.tests["0"].matrix, np.diag([1.0, 0.0]), atol=1e-9)
        assert_allclose(res.tests["1"].matrix, np.diag([0.0, 1.0]), atol=1e-9)


class TestConverse:
    def test_noiseless_zero_error(self, noiseless):
        conv = converse_bound(noiseless, 0.0)
        assert conv.value == pytest.approx(1.0, abs=1e-6)
        assert conv.input_dist.probs == pytest.approx((0.5, 0.5), abs=1e-3)
        assert conv.gap <= 1e-7

    @pytest.mark.parametrize("eps", [0.05, 0.3])
    def test_single_input(self, single_input, eps):
        assert converse_bound(single_input, eps).value == pytest.approx(-math.log2(1.0 - eps), abs=1e-9)

    def test_identical_outputs(self, identical):
        assert converse_bound(identical, 0.25).value == pytest.approx(-math.log2(0.75), abs=1e-9)

    def test_at_least_uniform(self, zero_plus):
        uniform = dh_cq(joint_state(zero_plus, InputDistribution.uniform(zero_plus.labels)), 0.1).value
        assert converse_bound(zero_plus, 0.1).value >= uniform - 1e-12

    def test_four_labels(self):
        ch = random_cq_channel(3, 4, 2)
        uniform = dh_cq(joint_state(ch, InputDistribution.uniform(ch.labels)), 0.1).value
        assert converse_bound(ch, 0.1).value >= uniform - 1e-12


class TestAchievability:
    def test_penalty(self):
        assert achievability_penalty(0.1, 0.01, 1.0) == pytest.approx(math.log2(4 / 0.08), abs=1e-12)
        assert achievability_penalty(0.1, 0.025, 1.0) == pytest.approx(math.log2(4 / 0.05), abs=1e-12)

    @pytest.mark.parametrize("eps, eps_prime, c", [
        (0.1, 0.1, 1.0),
        (0.1, 0.0, 1.0),
        (0.1, 0.01, 0.0),
        (0.1, 0.05, 1.0),
        (1.0, 0.05, 1.0),
    ])
    def test_invalid_parameters(self, eps, eps_prime, c):
        with pytest.raises(ParameterError):
            achievability_penalty(eps, eps_prime, c)

    def test_fixed_parameters(self, noiseless):
        P = InputDistribution.uniform(noiseless.labels)
        rate = achievable_rate(noiseless, 0.1, 0.01, 1.0, P)
        expected = -math.log2(0.495) - math.log2(4 / 0.08)
        assert rate == pytest.approx(expected, abs=1e-9)

    def test_optimizer_beats_default_point(self, zero_plus):
        P = InputDistribution.uniform(zero_plus.labels)
        best = optimize_achievability(zero_plus, 0.1, P)
        assert best.rate >= achievable_rate(zero_plus, 0.1, 0.025, 1.0, P) - 1e-12
        assert 0.0 < best.eps_prime < 0.1
        assert 0.1 - (1.0 + best.c) * best.eps_prime > 0

    def test_deterministic(self, zero_plus):
        P = InputDistribution.uniform(zero_plus.labels)
        assert optimize_achievability(zero_plus, 0.1, P) == optimize_achievability(zero_plus, 0.1, P)

    def test_without_refinement(self, noiseless):
        P = InputDistribution.uniform(noiseless.labels)
        coarse = optimize_achievability(noiseless, 0.1, P, AchievabilityGrid(refine=False))
        fine = optimize_achievability(noiseless, 0.1, P)
        assert fine.rate >= coarse.rate - 1e-12

    def test_identical_outputs_vacuous(self, identical):
        best = optimize_achievability(identical, 0.1, InputDistribution.uniform(identical.labels))
        assert best.rate < 0


class TestOneShotBounds:
    @pytest.mark.parametrize("eps", [0.05, 0.1, 0.3])
    def test_sandwich(self, zero_plus, eps):
        b = one_shot_bounds(zero_plus, eps)
        assert b.achievable_R <= b.converse_R
        assert b.converse_gap <= 1e-7

    def test_zero_error_has_no_achievability(self, noiseless):
        b = one_shot_bounds(noiseless, 0.0)
        assert b.converse_R == pytest.approx(1.0, abs=1e-6)
        assert math.isnan(b.achievable_R)
        assert math.isnan(b.best_c)

    def test_deterministic(self, zero_plus):
        first = one_shot_bounds(zero_plus, 0.1)
        second = one_shot_bounds(zero_plus, 0.1)
        assert first == second


class TestHolevo:
    def test_orthogonal(self, noiseless):
        assert holevo_information(noiseless, InputDistribution.uniform(noiseless.labels)) == pytest.approx(1.0, abs=1e-12)

    def test_identical(self, identical):
        assert holevo_information(identical, InputDistribution.uniform(identical.labels)) == pytest.approx(0.0, abs=1e-9)

    def test_equals_mutual_information(self, zero_plus):
        P = InputDistribution.uniform(zero_plus.labels)
        js = joint_state(zero_plus, P)
        pi_ab, product = js.materialize()
        chi = holevo_information(zero_plus, P)
        assert chi == pytest.approx(ZERO_PLUS_HOLEVO, abs=1e-9)
        assert chi == pytest.approx(relative_entropy(pi_ab, product), abs=1e-8)
        assert chi == pytest.approx(von_neumann_entropy(js.avg), abs=1e-12)

    def test_capacity(self, zero_plus):
        value, P = holevo_capacity(zero_plus)
        assert value == pytest.approx(ZERO_PLUS_HOLEVO, abs=1e-6)
        assert P.probs == pytest.approx((0.5, 0.5), abs=1e-2)


class TestSimplexSearch:
    def test_exact_grid_point(self):
        target = np.array([0.2, 0.3, 0.5])
        value, p = search_simplex(lambda q: -float(np.sum((q - target) ** 2)), 3)
        assert_allclose(p, target, atol=1e-12)
        assert value == pytest.approx(0.0, abs=1e-20)

    def test_coordinate_ascent(self):
        target = np.array([0.1, 0.2, 0.3, 0.4])
        _, p = search_simplex(lambda q: -float(np.sum((q - target) ** 2)), 4)
        assert_allclose(p, target, atol=2e-2)

    def test_uniform_wins_ties(self):
        value, p = search_simplex(lambda q: 1.0, 3)
        assert value == 1.0
        assert_allclose(p, np.full(3, 1 / 3))

    def test_single_point(self):
        value, p = search_simplex(lambda q: float(q[0]), 1)
        assert value == 1.0

    def test_config_validation(self):
        with pytest.raises(ParameterError):
            InputSearchConfig(grid_step=0.0)
