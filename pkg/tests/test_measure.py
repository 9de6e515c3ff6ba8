import numpy as np
import pytest

from cctomo.evolve import build_prerotation_set, modified_projectors
from cctomo.measure import (
    apply_confusion,
    ideal_counts,
    mitigate_confusion,
    sample_counts,
    validate_confusion,
)

from conftest import random_confusion, random_density


@pytest.fixture
def projectors(coupled_pair, pi2_template):
    return modified_projectors(
        build_prerotation_set(coupled_pair, pi2_template))


class TestIdealCounts:
    def test_ground_state_identity_setting(self, projectors):
        rho = np.zeros((4, 4), dtype=complex)
        rho[0, 0] = 1.0
        counts = ideal_counts(rho, projectors, 5000)
        assert np.allclose(counts[0], [5000, 0, 0, 0], atol=1e-9)

    def test_maximally_mixed_uniform_rows(self, projectors):
        counts = ideal_counts(np.eye(4) / 4, projectors, 5000)
        assert np.allclose(counts, 1250.0, atol=1e-9)

    def test_row_sums_resolution_of_identity(self, projectors, rng):
        for _ in range(5):
            counts = ideal_counts(random_density(rng, 4), projectors, 5000)
            assert np.allclose(counts.sum(axis=1), 5000.0, atol=1e-9)

    def test_against_quadratic_form_loop_oracle(self, projectors, coupled_pair,
                                                pi2_template):
        from cctomo.states import named_target
        rho, _ = named_target("coupled_plus_plus", coupled_pair, pi2_template)
        counts = ideal_counts(rho, projectors, 5000)
        for j in range(projectors.n_settings):
            for k in range(4):
                ket = projectors.kets[j, k]
                expected = 5000 * np.real(np.vdot(ket, rho @ ket))
                assert counts[j, k] == pytest.approx(expected, abs=1e-10)

    def test_negative_probability_rejected(self, projectors):
        bad = np.diag([1.2, -0.2, 0.0, 0.0]).astype(complex)
        with pytest.raises(ValueError, match="physicality"):
            ideal_counts(bad, projectors, 5000)

    def test_dimension_mismatch(self, projectors):
        with pytest.raises(ValueError, match="dimensions differ"):
            ideal_counts(np.eye(8) / 8, projectors, 100)


class TestSampleCounts:
    def test_deterministic_distribution_is_exact(self):
        ideal = np.array([[5000.0, 0.0, 0.0, 0.0]])
        assert np.array_equal(sample_counts(ideal, seed=1), ideal)

    def test_same_seed_reproduces(self, projectors, rng):
        ideal = ideal_counts(random_density(rng, 4), projectors, 5000)
        a = sample_counts(ideal, seed=123)
        b = sample_counts(ideal, seed=123)
        assert np.array_equal(a, b)

    def test_different_seeds_differ(self, projectors, rng):
        ideal = ideal_counts(random_density(rng, 4), projectors, 5000)
        assert not np.array_equal(sample_counts(ideal, 1), sample_counts(ideal, 2))

    def test_totals_preserved(self, projectors, rng):
        ideal = ideal_counts(random_density(rng, 4), projectors, 5000)
        sampled = sample_counts(ideal, seed=9)
        assert np.array_equal(sampled.sum(axis=1), np.full(9, 5000.0))

    def test_large_sample_frequencies_within_five_sigma(self):
        shots = 10**7
        probs = np.full(4, 0.25)
        ideal = (shots * probs)[None, :]
        freq = sample_counts(ideal, seed=77)[0] / shots
        bound = 5 * np.sqrt(probs * (1 - probs) / shots)
        assert np.all(np.abs(freq - probs) <= bound)


class TestConfusion:
    def test_identity_leaves_counts(self, rng):
        counts = rng.uniform(0, 100, size=(9, 4))
        assert np.allclose(apply_confusion(np.eye(4), counts), counts)

    def test_permutation_relabels_outcomes(self, rng):
        perm = np.eye(4)[[1, 0, 2, 3]]
        counts = rng.uniform(0, 100, size=(9, 4))
        swapped = apply_confusion(perm, counts)
        assert np.allclose(swapped[:, 0], counts[:, 1])
        assert np.allclose(swapped[:, 1], counts[:, 0])
        assert np.allclose(swapped[:, 2:], counts[:, 2:])

    def test_apply_preserves_row_sums(self, rng):
        m = random_confusion(rng, 4)
        counts = rng.uniform(0, 100, size=(9, 4))
        assert np.allclose(apply_confusion(m, counts).sum(axis=1),
                           counts.sum(axis=1))

    def test_roundtrip_oracle(self, rng):
        for _ in range(20):
            m = random_confusion(rng, 4)
            counts = rng.uniform(0, 1000, size=(9, 4))
            back = mitigate_confusion(m, apply_confusion(m, counts))
            assert np.max(np.abs(back - counts)) < 1e-9

    def test_mitigated_row_sums_preserved(self, rng):
        m = random_confusion(rng, 4)
        counts = rng.uniform(0, 1000, size=(9, 4))
        out = mitigate_confusion(m, counts)
        assert np.allclose(out.sum(axis=1), counts.sum(axis=1), atol=1e-6)

    def test_clamp_mode_non_negative_same_total(self, rng):
        m = random_confusion(rng, 4, strength=0.2)
        counts = np.array([[3.0, 0.0, 0.0, 2.0]])
        out = mitigate_confusion(m, counts, clamp=True)
        assert out.min() >= 0.0
        assert out.sum() == pytest.approx(5.0)

    def test_rejects_non_stochastic(self):
        with pytest.raises(ValueError, match="sum to 1"):
            validate_confusion(np.eye(4) * 0.9)

    def test_rejects_negative_entries(self):
        m = np.eye(4)
        m[0, 1] = -0.1
        m[1, 1] = 1.1
        with pytest.raises(ValueError, match="negative"):
            validate_confusion(m)

    def test_ill_conditioned_warns(self):
        m = np.full((4, 4), 0.25)
        m += 1e-6 * (np.eye(4) - 0.25)
        m /= m.sum(axis=0, keepdims=True)
        with pytest.warns(RuntimeWarning, match="ill-conditioned"):
            validate_confusion(m)
