import numpy as np
import pytest

from bnmia import model
from bnmia.model import attribute_marginals, joint_prob, output_marginal_law, sample, validate
from bnmia.populations import (
    LEFT,
    RIGHT,
    load_benchmark,
    make_cancer,
    make_half_repeated,
    make_lr_repeated,
    make_lr_side,
    make_product,
    midpoint,
)


class TestProduct:
    def test_single_fair_coin(self):
        bn = make_product((0.5,))
        assert validate(bn) == []
        np.testing.assert_allclose(attribute_marginals(bn), [0.5])

    def test_joint_of_ones(self):
        bn = make_product((0.3, 0.7))
        assert joint_prob(bn, {"X1": 1, "X2": 1}) == pytest.approx(0.21)

    def test_marginals_equal_p_exactly(self):
        p = (0.2, 0.35, 0.5, 0.65, 0.8)
        np.testing.assert_allclose(attribute_marginals(make_product(p)), p, atol=1e-15)

    def test_ten_node_uniform(self):
        bn = make_product((0.5,) * 10)
        assert len(bn.nodes) == 10 and bn.d == 10

    def test_rejects_boundary_p(self):
        with pytest.raises(ValueError, match="inside"):
            make_product((0.5, 1.0))
        with pytest.raises(ValueError):
            make_product(())


class TestHalfRepeated:
    def test_structure_d5(self):
        bn = make_half_repeated(5, (0.4, 0.5, 0.6))
        assert validate(bn) == []
        rng = np.random.default_rng(0)
        for _ in range(100):
            rec = sample(bn, rng)
            assert rec["X4"] == rec["X3"] == rec["X5"]

    def test_support_and_marginals_d5(self):
        bn = make_half_repeated(5, (0.5, 0.5, 0.5))
        law = output_marginal_law(bn)
        assert len(law) == 8
        np.testing.assert_allclose(attribute_marginals(bn), [0.5] * 5, atol=1e-15)

    def test_d25_dimension(self):
        bn = make_half_repeated(25, (0.5,) * 13)
        assert bn.d == 25

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError, match="need 3"):
            make_half_repeated(5, (0.5, 0.5))


class TestLrRepeated:
    def test_structure_d4(self):
        bn = make_lr_repeated(4, (0.3, 0.5, 0.7), (0.4, 0.6, 0.2))
        assert validate(bn) == []
        assert "side" not in bn.output_nodes
        rng = np.random.default_rng(1)
        for _ in range(300):
            rec = sample(bn, rng)
            if rec["side"] == 0:  # right
                assert rec["X4"] == rec["X3"]
            else:
                assert rec["X1"] == rec["X2"]

    def test_mixture_marginals(self):
        p_r, p_l = (0.3, 0.5, 0.7), (0.4, 0.6, 0.2)
        bn = make_lr_repeated(4, p_r, p_l)
        mu = attribute_marginals(bn)
        mu_r = attribute_marginals(make_lr_side(4, p_r, RIGHT))
        mu_l = attribute_marginals(make_lr_side(4, p_l, LEFT))
        np.testing.assert_allclose(mu, 0.5 * mu_r + 0.5 * mu_l, atol=1e-12)

    def test_side_nets_match_mixture_components(self):
        d = 6
        m = midpoint(d)
        right = make_lr_side(d, (0.3, 0.4, 0.5, 0.6), RIGHT)
        rng = np.random.default_rng(5)
        for _ in range(100):
            rec = sample(right, rng)
            for j in range(m, d):
                assert rec[f"X{j + 1}"] == rec[f"X{m}"]
        left = make_lr_side(d, (0.3, 0.4, 0.5, 0.6), LEFT)
        for _ in range(100):
            rec = sample(left, rng)
            for j in range(1, m - 1):
                assert rec[f"X{j + 1}"] == rec["X1"]

    def test_right_side_law_matches_half_repeated(self):
        # the fixed-right-side population is distributionally the
        # half-repeated population with the same parameters
        p = (0.3, 0.45, 0.6, 0.7)
        side = output_marginal_law(make_lr_side(6, p, RIGHT))
        half = output_marginal_law(make_half_repeated(6, p))
        assert side.outcomes == half.outcomes

    def test_mixture_conditioned_on_right_matches_half_repeated(self):
        from bnmia.model import enumerate_full_records, project, encode

        p_r, p_l = (0.3, 0.45, 0.6, 0.7), (0.25, 0.5, 0.65, 0.8)
        mix = make_lr_repeated(6, p_r, p_l)
        cond = {}
        for rec, prob in enumerate_full_records(mix):
            if rec["side"] == 0:
                vec = encode(mix, project(mix, rec))
                cond[vec] = cond.get(vec, 0.0) + prob
        total = sum(cond.values())
        half = output_marginal_law(make_half_repeated(6, p_r))
        for vec, prob in half.outcomes:
            assert cond[vec] / total == pytest.approx(prob, abs=1e-12)

    def test_odd_d_rejected(self):
        with pytest.raises(ValueError, match="even"):
            make_lr_repeated(5, (0.5,) * 3, (0.5,) * 3)

    def test_parameter_counts(self):
        with pytest.raises(ValueError, match="right-side"):
            make_lr_repeated(4, (0.5,), (0.5, 0.5, 0.5))
        with pytest.raises(ValueError, match="left-side"):
            make_lr_repeated(4, (0.5, 0.5, 0.5), (0.5,))


class TestCancer:
    def test_cpt_values(self):
        bn = make_cancer()
        cancer = bn.node("Cancer")
        assert cancer.cpt[(0, 0)][0] == 0.03  # low pollution, smoker
        xray = bn.node("Xray")
        assert xray.cpt[(1,)][0] == 0.2  # no cancer -> positive x-ray
        assert bn.d == 10

    def test_first_state_chain_product(self):
        bn = make_cancer()
        rec = {name: 0 for name in bn.node_names}
        expected = 0.9 * 0.3 * 0.03 * 0.9 * 0.65
        assert joint_prob(bn, rec) == pytest.approx(expected, abs=1e-15)

    def test_matches_bundled_files(self):
        import itertools

        bundled = load_benchmark("cancer")
        built = make_cancer()
        for bits in itertools.product(range(2), repeat=5):
            rec = dict(zip(built.node_names, bits))
            assert joint_prob(bundled, rec) == pytest.approx(
                joint_prob(built, rec), abs=1e-12
            )


class TestBenchmarks:
    def test_sachs_variants(self):
        bn = load_benchmark("sachs:path-left")
        assert bn.output_nodes == ("PKC", "Raf", "Mek", "Erk", "Akt")
        assert bn.d == 15
        assert validate(bn) == []

    def test_unknown_names(self):
        with pytest.raises(ValueError, match="unknown benchmark"):
            load_benchmark("nonesuch")
        with pytest.raises(ValueError, match="unknown benchmark variant"):
            load_benchmark("asia:leaves")
