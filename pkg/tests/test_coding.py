import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from core.coding import (
    EXPERIMENT_COLUMNS,
    Codebook,
    DecodingPOVM,
    RandomCodingSimulator,
    check_hayashi_nagaoka,
    code_classical_dh,
    codebook_size,
    conditional_operators,
    confusion_matrix,
    converse_test_from_code,
    ensemble_average_error,
    ensemble_bound_check,
    evaluate_code,
    expurgate_to_max_error,
    hayashi_nagaoka_suite,
    random_coding_bound,
    random_coding_experiment,
    square_root_decoder,
)
from core.cq_channel import CQChannel, InputDistribution, converse_bound, dh_cq, joint_state
from core.exceptions import CapExceededError, DecoderError, ParameterError, ValidationError
from core.operators import (
    HermitianOperator,
    TestOperator,
    basis_projector,
    identity,
    partial_trace,
    pure_state,
    random_density,
    random_psd,
    random_test,
    tensor,
)


def projective_povm(dim, outcomes):
    elements = tuple(basis_projector(dim, k) for k in outcomes)
    rest = np.eye(dim) - sum(e.matrix for e in elements)
    return DecodingPOVM(elements, HermitianOperator(rest))


@pytest.fixture
def basis4():
    """Four orthogonal outputs on C^4."""
    return CQChannel.from_states(list("abcd"), [pure_state(np.eye(4)[k]) for k in range(4)])


class TestConditionalOperators:
    def test_noiseless_tests(self, noiseless):
        res = dh_cq(joint_state(noiseless, InputDistribution.uniform(noiseless.labels)), 0.0)
        a = conditional_operators(res.tests)
        assert_allclose(a["0"].matrix, np.diag([1.0, 0.0]), atol=1e-9)
        assert_allclose(a["1"].matrix, np.diag([0.0, 1.0]), atol=1e-9)

    def test_partial_trace_of_block_test(self, zero_plus):
        js = joint_state(zero_plus, InputDistribution.uniform(zero_plus.labels))
        res = dh_cq(js, 0.1)
        full = np.zeros((4, 4), dtype=complex)
        full[:2, :2] = res.tests["0"].matrix
        full[2:, 2:] = res.tests["+"].matrix
        for k, x in enumerate(zero_plus.labels):
            selector = tensor(basis_projector(2, k), identity(2)).matrix
            a_x = partial_trace(HermitianOperator(selector @ full), (2, 2), keep="B")
            assert_allclose(a_x.matrix, res.tests[x].matrix, atol=1e-12)

    def test_rejects_non_test(self):
        with pytest.raises(ValidationError):
            conditional_operators({"0": HermitianOperator(2 * np.eye(2))})


class TestSquareRootDecoder:
    def test_single_codeword(self):
        cond = {"a": basis_projector(2, 0)}
        povm = square_root_decoder(Codebook(("a",)), cond)
        assert_allclose(povm.elements[0].matrix, np.diag([1.0, 0.0]), atol=1e-12)
        assert_allclose(povm.remainder.matrix, np.diag([0.0, 1.0]), atol=1e-12)

    def test_orthogonal_projectors_are_reproduced(self):
        cond = {"a": basis_projector(3, 0), "b": basis_projector(3, 2)}
        povm = square_root_decoder(Codebook(("a", "b")), cond)
        assert_allclose(povm.elements[0].matrix, cond["a"].matrix, atol=1e-12)
        assert_allclose(povm.elements[1].matrix, cond["b"].matrix, atol=1e-12)
        assert_allclose(povm.remainder.matrix, np.diag([0.0, 1.0, 0.0]), atol=1e-12)

    def test_random_family_is_a_povm(self):
        cond = {x: random_test(3, seed=x) for x in range(4)}
        povm = square_root_decoder(Codebook((0, 1, 2, 3)), cond)
        total = sum(e.matrix for e in povm.elements) + povm.remainder.matrix
        assert_allclose(total, np.eye(3), atol=1e-9)
        assert all(e.is_psd(1e-9) for e in povm.elements)

    def test_zero_sum(self):
        cond = {"a": TestOperator(np.zeros((2, 2)))}
        with pytest.raises(DecoderError):
            square_root_decoder(Codebook(("a",)), cond)

    def test_missing_operator(self):
        with pytest.raises(ValidationError):
            square_root_decoder(Codebook(("z",)), {"a": identity(2)})


class TestEvaluateCode:
    def test_noiseless_projective(self, noiseless):
        ev = evaluate_code(noiseless, Codebook(("0", "1")), projective_povm(2, (0, 1)))
        assert ev.per_word_error == (0.0, 0.0)
        assert ev.avg_error == 0.0
        assert ev.max_error == 0.0

    def test_single_message_identity(self, zero_plus):
        povm = DecodingPOVM((identity(2),), HermitianOperator(np.zeros((2, 2))))
        ev = evaluate_code(zero_plus, Codebook(("+",)), povm)
        assert ev.avg_error == pytest.approx(0.0, abs=1e-12)

    def test_repeated_codeword(self, zero_plus):
        cond = {x: random_test(2, seed=k) for k, x in enumerate(zero_plus.labels)}
        cb = Codebook(("0", "0", "+"))
        ev = evaluate_code(zero_plus, cb, square_root_decoder(cb, cond))
        assert ev.per_word_error[0] + ev.per_word_error[1] >= 1.0 - 1e-9

    def test_size_mismatch(self, noiseless):
        with pytest.raises(ValidationError):
            evaluate_code(noiseless, Codebook(("0",)), projective_povm(2, (0, 1)))

    def test_povm_validation(self):
        with pytest.raises(ValidationError):
            DecodingPOVM((identity(2),), HermitianOperator(np.eye(2)))


class TestRandomCoding:
    def test_codebook_size(self):
        assert codebook_size(2.0) == 4
        with pytest.raises(ParameterError):
            codebook_size(1.5)
        with pytest.raises(ParameterError):
            codebook_size(0.0)

    def test_bound_formula(self):
        assert random_coding_bound(0.05, 1.0, 4, 0.1) == pytest.approx(2 * 0.05 + 4 * 3 * 0.1)
        assert random_coding_bound(0.05, 1.0, 4, 0.1, type_one=0.0) == pytest.approx(1.2)

    def test_mean_below_bound(self, zero_plus):
        P = InputDistribution.uniform(zero_plus.labels)
        report = random_coding_experiment(zero_plus, P, 2.0, 0.05, trials=200, seed=7)
        assert report.m == 4
        assert len(report.trial_errors) == 200
        assert report.mean_error <= report.best_bound + 3 * report.std_error
        assert report.best_bound == min(report.bound_values)

    def test_reproducible(self, noiseless):
        P = InputDistribution.uniform(noiseless.labels)
        first = random_coding_experiment(noiseless, P, 1.0, 0.05, trials=20, seed=3)
        second = random_coding_experiment(noiseless, P, 1.0, 0.05, trials=20, seed=3)
        assert first == second

    def test_trials_are_independent_of_order(self, zero_plus):
        sim = RandomCodingSimulator(zero_plus, InputDistribution.uniform(zero_plus.labels), 0.05)
        assert sim.draw_codebook(4, 11, 5) == sim.draw_codebook(4, 11, 5)
        assert sim.run_trial(4, 11, 5) == sim.run_trial(4, 11, 5)

    def test_identical_outputs_cannot_decode(self, identical):
        P = InputDistribution.uniform(identical.labels)
        report = random_coding_experiment(identical, P, 1.0, 0.1, trials=30, seed=1)
        assert all(err >= 0.5 - 1e-9 for err in report.trial_errors)

    def test_rows(self, noiseless):
        P = InputDistribution.uniform(noiseless.labels)
        rows = random_coding_experiment(noiseless, P, 1.0, 0.05, trials=3, seed=0).to_rows()
        assert [r["trial"] for r in rows] == [0, 1, 2]
        assert all(set(r) == set(EXPERIMENT_COLUMNS) for r in rows)

    def test_invalid_eps_prime(self, noiseless):
        with pytest.raises(ParameterError):
            RandomCodingSimulator(noiseless, InputDistribution.uniform(noiseless.labels), 0.0)


class TestEnsemble:
    def test_noiseless_pairs(self, noiseless):
        """(0,1) and (1,0) decode perfectly; (0,0) and (1,1) split each codeword in half."""
        P = InputDistribution.uniform(noiseless.labels)
        cond = conditional_operators(dh_cq(joint_state(noiseless, P), 0.05).tests)
        assert ensemble_average_error(noiseless, P, 2, cond) == pytest.approx(0.25, abs=1e-9)

    def test_point_mass(self, zero_plus):
        P = InputDistribution.point_mass(zero_plus.labels, "+")
        cond = {x: random_test(2, seed=k) for k, x in enumerate(zero_plus.labels)}
        cb = Codebook(("+", "+", "+"))
        expected = evaluate_code(zero_plus, cb, square_root_decoder(cb, cond)).avg_error
        assert ensemble_average_error(zero_plus, P, 3, cond) == pytest.approx(expected, abs=1e-12)

    def test_cap(self, zero_plus):
        P = InputDistribution.uniform(zero_plus.labels)
        cond = {x: identity(2) for x in zero_plus.labels}
        with pytest.raises(CapExceededError):
            ensemble_average_error(zero_plus, P, 14, cond)

    def test_bound_holds(self, zero_plus):
        report = ensemble_bound_check(zero_plus, InputDistribution.uniform(zero_plus.labels), 4, 0.05)
        assert report.passed
        assert report.min_slack >= -1e-9
        assert report.type_one <= 0.05 + 1e-8


class TestHayashiNagaoka:
    def test_identity_and_zero(self):
        check = check_hayashi_nagaoka(identity(3), HermitianOperator(np.zeros((3, 3))), 1.0)
        assert check.min_eig_slack == pytest.approx(0.0, abs=1e-12)
        assert check.passed

    def test_projector_without_competition(self):
        check = check_hayashi_nagaoka(basis_projector(2, 0), HermitianOperator(np.zeros((2, 2))), 0.5)
        assert check.passed

    @pytest.mark.parametrize("seed", range(10))
    def test_random_instances(self, seed):
        S = random_test(4, seed=seed)
        T = random_psd(4, rank=2, seed=seed + 100, scale=0.3)
        assert check_hayashi_nagaoka(S, T, 0.1 + seed).passed

    def test_invalid_c(self):
        with pytest.raises(ParameterError):
            check_hayashi_nagaoka(identity(2), identity(2), 0.0)

    def test_s_must_be_test(self):
        with pytest.raises(ValidationError):
            check_hayashi_nagaoka(HermitianOperator(2 * np.eye(2)), identity(2), 1.0)

    @pytest.mark.slow
    def test_suite(self):
        summary = hayashi_nagaoka_suite(dims=(2, 16), count=1000, seed=42)
        assert summary.passed
        assert summary.count == 1000
        assert summary.min_slack >= -1e-9


class TestExpurgation:
    def test_keeps_best_half(self, basis4):
        povm = DecodingPOVM(
            (
                basis_projector(4, 0),
                basis_projector(4, 1),
                HermitianOperator(0.6 * basis_projector(4, 2).matrix),
                HermitianOperator(0.6 * basis_projector(4, 3).matrix),
            ),
            HermitianOperator(np.diag([0.0, 0.0, 0.4, 0.4])),
        )
        cb = Codebook(tuple("abcd"))
        ev = evaluate_code(basis4, cb, povm)
        assert ev.per_word_error == pytest.approx((0.0, 0.0, 0.4, 0.4))
        assert ev.avg_error == pytest.approx(0.2)

        new_cb, new_povm, new_ev = expurgate_to_max_error(basis4, cb, povm)
        assert new_cb.entries == ("a", "b")
        assert new_ev.max_error == pytest.approx(0.0, abs=1e-12)
        assert_allclose(new_povm.remainder.matrix, np.diag([0.0, 0.0, 1.0, 1.0]), atol=1e-12)

    def test_markov_bound(self):
        for k in range(100):
            ch = CQChannel.from_states(["x", "y", "z"], [random_density(2, seed=10 * k + j) for j in range(3)])
            rng = np.random.default_rng(k)
            cb = Codebook(tuple(rng.choice(["x", "y", "z"], size=4)))
            cond = {x: random_test(2, seed=1000 + 10 * k + j) for j, x in enumerate(ch.labels)}
            povm = square_root_decoder(cb, cond)
            ev = evaluate_code(ch, cb, povm)
            _, _, kept = expurgate_to_max_error(ch, cb, povm)
            assert kept.max_error <= 2 * ev.avg_error + 1e-12

    def test_odd_size(self, basis4):
        cb = Codebook(("a", "b", "c"))
        povm = projective_povm(4, (0, 1, 2))
        with pytest.raises(ParameterError):
            expurgate_to_max_error(basis4, cb, povm)
        new_cb, _, _ = expurgate_to_max_error(basis4, cb, povm, allow_floor=True)
        assert new_cb.m == 1


class TestConverseChecks:
    def test_noiseless_code(self, noiseless):
        cert = converse_test_from_code(noiseless, Codebook(("0", "1")), projective_povm(2, (0, 1)))
        assert cert.acceptance == pytest.approx(1.0, abs=1e-12)
        assert cert.type_two == pytest.approx(0.5, abs=1e-12)
        assert cert.log_m == pytest.approx(1.0)
        assert cert.dh_value == pytest.approx(1.0, abs=1e-9)
        assert cert.holds

    def test_square_root_code(self, zero_plus):
        cb = Codebook(("0", "+"))
        P = InputDistribution.uniform(zero_plus.labels)
        cond = conditional_operators(dh_cq(joint_state(zero_plus, P), 0.1).tests)
        cert = converse_test_from_code(zero_plus, cb, square_root_decoder(cb, cond))
        assert cert.type_two <= 1.0 / cb.m + 1e-12
        assert cert.acceptance == pytest.approx(1.0 - cert.avg_error, abs=1e-12)
        assert cert.holds

    def test_repeated_codewords(self, noiseless):
        with pytest.raises(ValidationError):
            converse_test_from_code(noiseless, Codebook(("0", "0")), projective_povm(2, (0, 1)))

    def test_code_size_below_converse(self, noiseless):
        ev = evaluate_code(noiseless, Codebook(("0", "1")), projective_povm(2, (0, 1)))
        assert math.log2(2) <= converse_bound(noiseless, ev.avg_error).value + 1e-6


class TestConfusionMatrix:
    def test_shape_and_abort_column(self, basis4):
        povm = projective_povm(4, (0, 1, 2))
        M = confusion_matrix(basis4, Codebook(("a", "b", "d")), povm)
        assert M.shape == (3, 4)
        assert M.sum() == pytest.approx(1.0, abs=1e-12)
        assert M[2, 0] == pytest.approx(1 / 3, abs=1e-12)

    @pytest.mark.parametrize("eps", [0.0, 0.1, 0.3])
    def test_data_processing(self, zero_plus, eps):
        cb = Codebook(("0", "+"))
        P = InputDistribution.uniform(zero_plus.labels)
        cond = conditional_operators(dh_cq(joint_state(zero_plus, P), 0.05).tests)
        check = code_classical_dh(zero_plus, cb, square_root_decoder(cb, cond), eps)
        assert check.holds

    def test_data_processing_with_repeats(self, zero_plus):
        cb = Codebook(("0", "0", "+", "+"))
        cond = {x: random_test(2, seed=k + 40) for k, x in enumerate(zero_plus.labels)}
        assert code_classical_dh(zero_plus, cb, square_root_decoder(cb, cond), 0.2).holds
