import math

import numpy as np
import pytest

from brownlab.ensembles import (
    EnsembleSpec,
    Seed,
    diagonal,
    dt,
    ensemble_from_dict,
    ensemble_to_dict,
    ginibre,
    haar_unitary,
    nilpotent_shift,
    perturbed,
    sample,
    sample_diagonal,
    sample_dt,
    sample_ginibre,
    sample_haar_unitary,
    sample_perturbed,
    sample_strict_upper,
    shift,
    strict_upper,
)
from brownlab.matcore import eigenvalues, fk_determinant, matching_distance, operator_norm, trace_word
from brownlab.measures import point_mass, support_radius, uniform_circle, uniform_disk


class TestSeed:
    def test_rejects_out_of_range_root(self):
        with pytest.raises(ValueError):
            Seed(-1)
        with pytest.raises(ValueError):
            Seed(1 << 64)

    def test_derivation_changes_stream(self):
        s = Seed(5)
        a = s.derive("x").generator().standard_normal(8)
        b = s.derive("y").generator().standard_normal(8)
        assert not np.array_equal(a, b)

    def test_string_labels_stable(self):
        a = Seed(5, ("trial", 3)).generator().standard_normal(4)
        b = Seed(5).derive("trial", 3).generator().standard_normal(4)
        assert np.array_equal(a, b)

    def test_to_dict(self):
        assert Seed(7).derive("a", 1).to_dict() == {"root": 7, "labels": ["a", "1"]}


class TestDeterminism:
    @pytest.mark.parametrize(
        "draw",
        [
            lambda s: sample_ginibre(30, s),
            lambda s: sample_strict_upper(30, s),
            lambda s: sample_diagonal(uniform_disk(0, 1), 30, s),
            lambda s: sample_dt(uniform_circle(0, 1), 0.7, 30, s),
            lambda s: sample_haar_unitary(30, s),
            lambda s: sample_perturbed(shift(30), 1e-2, s),
        ],
    )
    def test_bit_identical_redraw(self, draw):
        assert np.array_equal(draw(Seed(123)), draw(Seed(123)))

    def test_distinct_streams_uncorrelated(self):
        n = 120
        a = sample_ginibre(n, Seed(9, ("a",))).real.ravel()
        b = sample_ginibre(n, Seed(9, ("b",))).real.ravel()
        corr = float(np.corrcoef(a, b)[0, 1])
        assert abs(corr) <= 3.0 / math.sqrt(len(a))


class TestGinibre:
    def test_entry_variance(self):
        # mean of |G_ij|^2 over 100 trials at N=200, within 3 standard errors of 1/N
        n, trials = 200, 100
        vals = np.concatenate(
            [np.abs(sample_ginibre(n, Seed(1).derive(t))) ** 2 for t in range(trials)]
        ).ravel()
        se = float(np.std(vals, ddof=1)) / math.sqrt(vals.size)
        assert abs(float(np.mean(vals)) - 1.0 / n) <= 3 * se

    def test_trace_gg_star_unit_mean(self):
        n, trials = 200, 100
        vals = np.array(
            [trace_word(sample_ginibre(n, Seed(2).derive(t)), "1*").real for t in range(trials)]
        )
        se = float(np.std(vals, ddof=1)) / math.sqrt(trials)
        assert abs(float(np.mean(vals)) - 1.0) <= 3 * se


class TestStrictUpper:
    def test_structural_zeros(self):
        t = sample_strict_upper(25, Seed(3))
        assert np.all(t[np.tril_indices(25)] == 0)

    def test_offdiag_mass_mean(self):
        # E (1/N) sum_{i<j} |T_ij|^2 = (N-1)/N
        n, trials = 100, 60
        vals = np.array(
            [
                float(np.sum(np.abs(sample_strict_upper(n, Seed(4).derive(t))) ** 2)) / n
                for t in range(trials)
            ]
        )
        se = float(np.std(vals, ddof=1)) / math.sqrt(trials)
        assert abs(float(np.mean(vals)) - (n - 1) / n) <= 3 * se


class TestDiagonal:
    def test_point_mass_gives_scalar_matrix(self):
        d = sample_diagonal(point_mass(2 - 1j), 10, Seed(5))
        assert np.array_equal(d, (2 - 1j) * np.eye(10))

    def test_circle_entries_centered(self):
        n = 4000
        d = np.diagonal(sample_diagonal(uniform_circle(0, 1), n, Seed(6)))
        se = 1.0 / math.sqrt(2 * n)
        assert abs(float(np.mean(d.real))) <= 3 * se
        assert abs(float(np.mean(d.imag))) <= 3 * se

    def test_norm_bounded_by_support(self):
        mu = uniform_disk(0.5, 1.5)
        d = sample_diagonal(mu, 300, Seed(7))
        assert operator_norm(d) <= support_radius(mu) + 1e-12


class TestDT:
    def test_zero_offdiag_is_diagonal_sample(self):
        mu = uniform_disk(0, 1)
        a = sample_dt(mu, 0.0, 40, Seed(8))
        d = sample_diagonal(mu, 40, Seed(8).derive("diag"))
        assert np.array_equal(a, d)

    def test_exact_stream_decomposition(self):
        mu = uniform_circle(0, 1)
        s = Seed(9)
        a = sample_dt(mu, 0.49, 35, s)
        expected = sample_diagonal(mu, 35, s.derive("diag")) + math.sqrt(
            0.49
        ) * sample_strict_upper(35, s.derive("upper"))
        assert np.array_equal(a, expected)

    def test_eigenvalues_are_diagonal_entries(self):
        mu = uniform_disk(0, 1)
        s = Seed(10)
        a = sample_dt(mu, 1.3, 50, s)
        d = np.diagonal(sample_diagonal(mu, 50, s.derive("diag")))
        assert matching_distance(eigenvalues(a), d) == 0.0

    def test_second_star_moment_mean(self):
        # E tr(A A*) = int |z|^2 dnu + o (N-1)/N
        mu, o, n, trials = uniform_disk(0, 1), 0.8, 100, 60
        vals = np.array(
            [trace_word(sample_dt(mu, o, n, Seed(11).derive(t)), "1*").real for t in range(trials)]
        )
        expected = 0.5 + o * (n - 1) / n
        se = float(np.std(vals, ddof=1)) / math.sqrt(trials)
        assert abs(float(np.mean(vals)) - expected) <= 3 * se


class TestHaarUnitary:
    def test_unitarity(self):
        u = sample_haar_unitary(80, Seed(12))
        assert np.linalg.norm(u.conj().T @ u - np.eye(80)) <= 1e-10

    def test_unimodular_determinant(self):
        u = sample_haar_unitary(40, Seed(13))
        assert fk_determinant(u) == pytest.approx(1.0, abs=1e-8)

    def test_trace_centered(self):
        # Haar invariance makes E tr(u) = 0
        trials, n = 200, 60
        vals = np.array(
            [trace_word(sample_haar_unitary(n, Seed(14).derive(t)), "1").real for t in range(trials)]
        )
        se = float(np.std(vals, ddof=1)) / math.sqrt(trials)
        assert abs(float(np.mean(vals))) <= 3 * se


class TestShift:
    def test_nilpotent(self):
        s = nilpotent_shift(6)
        assert np.all(np.linalg.matrix_power(s, 6) == 0)

    def test_trace_ss_star(self):
        assert trace_word(nilpotent_shift(10), "1*") == pytest.approx(0.9)

    def test_eigenvalues_zero(self):
        assert np.all(eigenvalues(nilpotent_shift(100)) == 0)


class TestPerturbed:
    def test_zero_scale_is_base(self):
        base = shift(30)
        assert np.array_equal(sample_perturbed(base, 0.0, Seed(15)), nilpotent_shift(30))

    def test_difference_norm_matches_noise(self):
        base = ginibre(40)
        s = Seed(16)
        t = 1e-3
        a = sample(base, s.derive("base"))
        g = sample_ginibre(40, s.derive("noise"))
        pert = sample_perturbed(base, t, s)
        assert operator_norm(pert - a) <= t * operator_norm(g) + 1e-10

    def test_shift_perturbation_moves_spectrum(self):
        lam = eigenvalues(sample_perturbed(shift(500), 1e-3, Seed(17)))
        assert float(np.max(np.abs(lam))) > 0.5


class TestSpecs:
    def test_validation(self):
        with pytest.raises(ValueError):
            EnsembleSpec("ginibre", dim=0)
        with pytest.raises(ValueError):
            EnsembleSpec("diagonal", dim=5)
        with pytest.raises(ValueError):
            EnsembleSpec("perturbed")
        with pytest.raises(ValueError):
            dt(uniform_disk(0, 1), -1.0, 5)

    def test_size_passes_through_perturbed(self):
        assert perturbed(shift(25), 0.1).size == 25

    @pytest.mark.parametrize(
        "spec",
        [
            ginibre(12),
            strict_upper(8),
            diagonal(uniform_disk(0, 1), 6),
            dt(point_mass(1), 0.5, 9),
            haar_unitary(4),
            shift(7),
            perturbed(shift(7), 1e-2),
        ],
    )
    def test_dict_round_trip(self, spec):
        assert ensemble_from_dict(ensemble_to_dict(spec)) == spec

    def test_dispatch_matches_direct_samplers(self):
        s = Seed(18)
        assert np.array_equal(sample(ginibre(20), s), sample_ginibre(20, s))
        assert np.array_equal(sample(shift(20), s), nilpotent_shift(20))

    def test_from_dict_errors_name_fields(self):
        with pytest.raises(ValueError, match="ensemble.kind"):
            ensemble_from_dict({"kind": "wishart", "dim": 3})
        with pytest.raises(ValueError, match="ensemble.dim"):
            ensemble_from_dict({"kind": "ginibre"})
        with pytest.raises(ValueError, match="ensemble.measure"):
            ensemble_from_dict({"kind": "dt", "dim": 3})
