import numpy as np
import pytest

from liouvillian_lab.densec import eig
from liouvillian_lab.spectra import (ALL_DECAYING, HALF_PI, HAS_STEADY_STATE,
                                     NOT_APPLICABLE, UNSTABLE, VIOLATED,
                                     analyze, classify_steady, continuity_sort,
                                     detect_ep, fermi_arc_scan, gauge_fix,
                                     phase_check)
from liouvillian_lab.twolevel import TwoLevelParams, liouvillian


class TestClassifySteady:
    def test_reference_spectrum(self):
        vals = [0.0, -0.5j, 1.9843 - 0.7497j, -1.9843 - 0.7497j]
        verdict, idx = classify_steady(vals)
        assert verdict == HAS_STEADY_STATE
        assert idx == [0]

    def test_all_decaying(self):
        verdict, idx = classify_steady([-1j, -2j])
        assert verdict == ALL_DECAYING
        assert idx == []

    def test_unstable(self):
        # the coherent degeneracy point has Im(lambda) > 0
        verdict, _ = classify_steady([0.7002j, -1j, -2j, 1.96j])
        assert verdict == UNSTABLE

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            classify_steady([])

    def test_scale_covariance(self):
        vals = np.array([1e-12j, -0.3j, 2.0 - 1.0j])
        for scale in (1.0, 1e3, 1e-3):
            verdict, idx = classify_steady(scale * vals, tol_s=scale * 1e-9)
            assert verdict == HAS_STEADY_STATE
            assert idx == [0]


class TestDetectEP:
    def test_gamma0_fourfold_collapse(self):
        # Hamiltonian EP at gamma2 = 3 lifts to a fourfold Liouvillian
        # degeneracy at lambda = i with two eigenvectors
        clusters = detect_ep(liouvillian(TwoLevelParams(1, 3, 2, 0)))
        assert len(clusters) == 1
        cl = clusters[0]
        assert (cl.algebraic, cl.geometric) == (4, 2)
        assert cl.is_ep
        assert abs(cl.mean - 1j) < 1e-4

    def test_hamiltonian_level_ep(self):
        H = np.array([[-0.5j, 1.0], [1.0, 1.5j]])
        clusters = detect_ep(H)
        assert len(clusters) == 1
        assert (clusters[0].algebraic, clusters[0].geometric) == (2, 1)
        assert abs(clusters[0].mean - 0.5j) < 1e-6

    def test_distinct_spectrum_no_clusters(self):
        assert detect_ep(liouvillian(TwoLevelParams(1, 1, 2, 1))) == []

    def test_incoherent_degeneracy_not_fully_defective(self):
        clusters = detect_ep(liouvillian(TwoLevelParams(1, 1, 0, 2)))
        assert len(clusters) == 1
        cl = clusters[0]
        assert (cl.algebraic, cl.geometric) == (4, 3)
        assert cl.is_ep
        assert abs(cl.mean + 1j) < 1e-8

    def test_geometric_never_exceeds_algebraic(self):
        rng = np.random.default_rng(211)
        for _ in range(30):
            p = TwoLevelParams(rng.uniform(0, 3), rng.uniform(0, 3),
                               rng.uniform(-3, 3), rng.uniform(0, 3))
            for cl in detect_ep(liouvillian(p)):
                assert cl.geometric <= cl.algebraic

    def test_diagonalizable_dissipative_system(self):
        # H = 0 with a pure decay channel: degenerate but diagonalizable
        clusters = detect_ep(liouvillian(TwoLevelParams(0, 0, 0, 2)))
        for cl in clusters:
            assert cl.geometric == cl.algebraic
            assert not cl.is_ep


class TestGaugeFix:
    def test_trivial_state_fallback_anchor(self):
        v = gauge_fix(np.array([0, 1, 1, 0], dtype=complex))
        assert np.allclose(v, [0, 1, 1, 0], atol=1e-15)

    def test_diagonal_anchor(self):
        v = gauge_fix(np.array([2j, 0, 0, 2j]))
        assert np.allclose(v, [1, 0, 0, 1], atol=1e-15)

    def test_idempotent(self):
        rng = np.random.default_rng(223)
        v = rng.standard_normal(4) + 1j * rng.standard_normal(4)
        once = gauge_fix(v)
        assert np.array_equal(gauge_fix(once), once)

    def test_phase_and_scale_invariant(self):
        rng = np.random.default_rng(227)
        v = rng.standard_normal(4) + 1j * rng.standard_normal(4)
        for c in (2.0, -0.5j, 1.7 * np.exp(0.3j)):
            assert np.allclose(gauge_fix(c * v), gauge_fix(v), atol=1e-14)

    def test_zero_vector_rejected(self):
        with pytest.raises(ValueError):
            gauge_fix(np.zeros(4))


class TestPhaseCheck:
    def test_arc_region_half_pi(self):
        # beyond the dissipation-free EP every applicable eigenstate has a
        # purely imaginary coherence element
        # the trivial branch is exactly degenerate with one coherent
        # branch here, so the solver returns arbitrary mixtures inside
        # that eigenspace; mixtures always have equal populations and are
        # filtered out, as in the arc-phase acceptance check
        for g2 in (3.5, 4.0, 5.5):
            p = TwoLevelParams(1, g2, 2, 0)
            res = eig(liouvillian(p).matrix)
            verdicts = []
            for j in range(4):
                v = gauge_fix(res.vectors[:, j])
                if abs(v[0] - v[3]) <= 1e-8:
                    continue
                verdicts.append(phase_check(v, res.values[j], p))
            assert verdicts.count(HALF_PI) >= 2
            assert VIOLATED not in verdicts

    def test_complex_eigenvalue_not_applicable(self):
        p = TwoLevelParams(1, 1, 2, 1)
        res = eig(liouvillian(p).matrix)
        j = int(np.argmax(np.abs(res.values.real)))
        assert abs(res.values[j].real) > 1.9
        v = gauge_fix(res.vectors[:, j])
        assert phase_check(v, res.values[j], p) == NOT_APPLICABLE

    def test_ep_state(self):
        p = TwoLevelParams(1, 3, 2, 0)
        state = gauge_fix(np.array([1, 1j, -1j, 1]))
        assert phase_check(state, 1j + 0e0, p) == HALF_PI

    def test_dimension_checked(self):
        with pytest.raises(ValueError):
            phase_check(np.ones(3), 0j, TwoLevelParams(1, 1, 2, 1))


class TestFermiArcScan:
    def _sweep(self, g2_grid, omega, dissipation):
        spectra = [eig(liouvillian(TwoLevelParams(1, g, omega, dissipation)).matrix).values
                   for g in g2_grid]
        branches, _ = continuity_sort(spectra)
        return branches

    def test_arc_begins_at_ep(self):
        grid = np.linspace(0.0, 6.0, 121)
        branches = self._sweep(grid, 2.0, 0.0)
        segs = fermi_arc_scan(grid, branches, tol=1e-7)
        nontrivial = [s for s in segs if not s.trivial]
        starts = sorted(s.start_param for s in nontrivial)
        assert any(abs(s - 3.0) <= 0.06 for s in starts)
        # EPs are the endpoints of the arcs: the detected EP location
        # coincides with the arc edge within sweep resolution
        clusters = detect_ep(liouvillian(TwoLevelParams(1, 3, 2, 0)))
        assert clusters and abs(clusters[0].mean.real) < 1e-4

    def test_no_arc_below_ep(self):
        grid = np.linspace(0.0, 2.5, 60)
        branches = self._sweep(grid, 2.0, 0.0)
        segs = [s for s in fermi_arc_scan(grid, branches, tol=1e-7) if not s.trivial]
        assert segs == []

    def test_trivial_branch_full_interval(self):
        grid = np.linspace(0.0, 6.0, 50)
        branches = self._sweep(grid, 2.0, 0.0)
        segs = fermi_arc_scan(grid, branches, tol=1e-7)
        full = [s for s in segs
                if s.start_index == 0 and s.end_index == grid.size - 1]
        assert full and all(s.trivial for s in full)


class TestContinuitySort:
    def test_constant_spectrum(self):
        row = np.array([1.0, 2.0, 3.0 + 1j])
        branches, warnings = continuity_sort([row] * 5)
        for i in range(5):
            assert np.array_equal(branches[i], np.sort_complex(row))
        assert warnings == []

    def test_crossing_in_im_distinct_in_re(self):
        # two branches cross in Im while staying separated in Re: the
        # matcher must not swap them
        ts = np.linspace(-1, 1, 21)
        truth = np.stack([(-1.0 + 1j * t) for t in ts]), np.stack([(1.0 - 1j * t) for t in ts])
        spectra = [np.array([truth[0][i], truth[1][i]]) for i in range(21)]
        branches, warnings = continuity_sort(spectra)
        assert np.allclose(branches[:, 0], truth[0], atol=1e-14)
        assert np.allclose(branches[:, 1], truth[1], atol=1e-14)
        assert warnings == []

    def test_warning_at_ep_crossing(self):
        grid = np.linspace(2.8, 3.2, 41)
        spectra = [eig(liouvillian(TwoLevelParams(1, g, 2, 0)).matrix).values
                   for g in grid]
        _, warnings = continuity_sort(spectra)
        assert warnings
        ep_rows = [i for i, _ in warnings]
        # the degenerate step sits where gamma2 crosses 3
        assert any(abs(grid[i] - 3.0) < 0.05 for i in ep_rows)

    def test_size_mismatch_rejected(self):
        with pytest.raises(ValueError):
            continuity_sort([np.array([1.0, 2.0]), np.array([1.0])])


class TestAnalyze:
    def test_reference_report(self):
        p = TwoLevelParams(1, 1, 2, 1)
        report = analyze(liouvillian(p), p)
        assert report.verdict == HAS_STEADY_STATE
        assert len(report.steady_indices) == 1
        assert report.ep_clusters == []
        assert len(report.phase_verdicts) == 4

    def test_unstable_report(self):
        p = TwoLevelParams(1, 6.9202, 2, 2)
        report = analyze(liouvillian(p), p)
        assert report.verdict == UNSTABLE
