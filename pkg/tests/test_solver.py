import math

import mpmath
import numpy as np
import pytest

import p3p
from p3p import (
    CollinearPoints,
    P3pProblem,
    PairwiseData,
    SolverConfig,
    align_pose,
    canonical_reindex,
    compute_pairwise,
    generate_problem,
    quartic_coefficients,
    recover_depths,
    recover_y,
    refine_depths_gauss_newton,
    solve,
    solve_quartic_adaptive,
)
from p3p.bench import TrialSpec
from p3p.solver import _pairwise


def equilateral_problem(cos_angle: float) -> P3pProblem:
    """Three bearings with equal pairwise cosine, points at unit depth."""
    # cone construction: pairwise dot = 1.5*cos(t)^2 - 0.5
    c2 = (cos_angle + 0.5) / 1.5
    ct = math.sqrt(c2)
    st = math.sqrt(1.0 - c2)
    M = np.array(
        [
            [st * math.cos(2 * math.pi * i / 3), st * math.sin(2 * math.pi * i / 3), ct]
            for i in range(3)
        ]
    )
    return P3pProblem.from_arrays(M, M.copy())


def law_of_cosines_residual(depths, data: PairwiseData) -> float:
    d1, d2, d3 = depths
    f1 = d1 * d1 + d2 * d2 - 2 * d1 * d2 * data.m12 - data.s12
    f2 = d1 * d1 + d3 * d3 - 2 * d1 * d3 * data.m13 - data.s13
    f3 = d2 * d2 + d3 * d3 - 2 * d2 * d3 * data.m23 - data.s23
    return max(abs(f1), abs(f2), abs(f3))


def pose_set_distance(sols_a, sols_b) -> float:
    """Hausdorff-style pairing distance between two pose sets."""
    if len(sols_a) != len(sols_b):
        return np.inf
    worst = 0.0
    for a in sols_a:
        best = min(
            np.abs(a.pose.R - b.pose.R).sum() + np.abs(a.pose.t - b.pose.t).sum()
            for b in sols_b
        )
        worst = max(worst, best)
    return worst


class TestComputePairwise:
    def test_orthonormal_frame(self):
        data = compute_pairwise(P3pProblem.from_arrays(np.eye(3), np.eye(3)))
        assert (data.m12, data.m13, data.m23) == (0.0, 0.0, 0.0)
        assert (data.s12, data.s13, data.s23) == (2.0, 2.0, 2.0)
        assert data.perm == (0, 1, 2)

    def test_equilateral_sixty_degrees(self):
        data = compute_pairwise(equilateral_problem(0.5))
        for m in (data.m12, data.m13, data.m23):
            assert m == pytest.approx(0.5, abs=1e-15)
        for s in (data.s12, data.s13, data.s23):
            assert s == pytest.approx(1.0, abs=1e-15)

    def test_against_extended_precision(self):
        rng = np.random.default_rng(21)
        mpmath.mp.dps = 50
        for _ in range(100):
            problem, _ = generate_problem(TrialSpec(seed=21), int(rng.integers(0, 10_000)))
            data = compute_pairwise(problem)
            X = [c.point for c in problem.corr]
            M = [c.bearing.dir for c in problem.corr]
            for got, (i, j) in zip(
                (data.s12, data.s13, data.s23), ((0, 1), (0, 2), (1, 2))
            ):
                exact = sum(
                    (mpmath.mpf(X[i][k]) - mpmath.mpf(X[j][k])) ** 2 for k in range(3)
                )
                assert abs(got - float(exact)) <= 1e-12 * float(exact)
            for got, (i, j) in zip(
                (data.m12, data.m13, data.m23), ((0, 1), (0, 2), (1, 2))
            ):
                exact = float(
                    sum(mpmath.mpf(M[i][k]) * mpmath.mpf(M[j][k]) for k in range(3))
                )
                assert abs(got - exact) <= 1e-12 * max(1.0, abs(exact))

    def test_kernel_rejects_coincident_points(self):
        M = np.eye(3)
        X = np.array([[0.0, 0.0, 0.0], [0.0, 0.0, 0.0], [0.0, 0.0, 1.0]])
        assert _pairwise(M, X)[-1] == False  # noqa: E712

    def test_kernel_rejects_non_unit_bearings(self):
        # nearly parallel non-unit rows push a raw dot product above 1
        M = np.array([[1.1, 0.0, 0.0], [1.0999, 0.005, 0.0], [0.0, 0.0, 1.0]])
        X = np.diag([1.0, 2.0, 3.0])
        assert _pairwise(M, X)[-1] == False  # noqa: E712


class TestCanonicalReindex:
    @staticmethod
    def _perms_satisfying(data):
        import itertools

        ok = []
        m = {
            (0, 1): data.m12, (1, 0): data.m12,
            (0, 2): data.m13, (2, 0): data.m13,
            (1, 2): data.m23, (2, 1): data.m23,
        }
        for perm in itertools.permutations(range(3)):
            nm12 = m[(perm[0], perm[1])]
            nm13 = m[(perm[0], perm[2])]
            nm23 = m[(perm[1], perm[2])]
            if nm13 <= nm12 <= nm23:
                ok.append(perm)
        return ok

    def test_identity_when_already_canonical(self):
        prob = P3pProblem.from_arrays(np.eye(3), np.diag([1.0, 2.0, 3.0]))
        data = compute_pairwise(prob)
        new_data, new_prob = canonical_reindex(data, prob)
        assert new_data.perm == (0, 1, 2)
        assert new_prob is not None
        assert new_data.m13 <= new_data.m12 <= new_data.m23

    def test_spec_ordering_case(self):
        data = PairwiseData(m12=0.9, m13=0.95, m23=0.1, s12=1.0, s13=2.0, s23=3.0)
        prob = P3pProblem.from_arrays(np.eye(3), np.diag([1.0, 2.0, 3.0]))
        new_data, _ = canonical_reindex(data, prob)
        assert (new_data.m13, new_data.m12, new_data.m23) == (0.1, 0.9, 0.95)
        # the chosen permutation must be the lexicographically least
        # among all orderings that satisfy the constraint
        assert new_data.perm == min(self._perms_satisfying(data))

    def test_equilateral_tie_break(self):
        prob = equilateral_problem(0.5)
        data = compute_pairwise(prob)
        new_data, _ = canonical_reindex(data, prob)
        assert new_data.perm == (0, 1, 2)

    def test_random_cases_lexicographic_oracle(self):
        rng = np.random.default_rng(5)
        for trial in range(300):
            problem, _ = generate_problem(TrialSpec(seed=5), trial)
            data = compute_pairwise(problem)
            new_data, new_prob = canonical_reindex(data, problem)
            assert new_data.m13 <= new_data.m12 <= new_data.m23
            assert new_data.perm == min(self._perms_satisfying(data))
            # relabeled scalars agree with recomputation on the permuted problem
            redata = compute_pairwise(new_prob)
            for name in ("m12", "m13", "m23", "s12", "s13", "s23"):
                assert getattr(redata, name) == getattr(new_data, name)


class TestQuarticCoefficients:
    def test_equilateral_has_unit_root(self):
        data = compute_pairwise(equilateral_problem(0.3))
        c = quartic_coefficients(data)
        assert abs(c.sum()) <= 1e-12 * np.abs(c).max()

    def test_ground_truth_root_residual(self):
        spec = TrialSpec(seed=33)
        for trial in range(500):
            problem, gt = generate_problem(spec, trial)
            data, _ = canonical_reindex(compute_pairwise(problem), problem)
            i0, i1, i2 = data.perm
            x = gt.depths_gt[i0] / gt.depths_gt[i2]
            c = quartic_coefficients(data)
            val = (((c[0] * x + c[1]) * x + c[2]) * x + c[3]) * x + c[4]
            assert abs(val) < 1e-9 * np.abs(c).max() * max(1.0, x) ** 4

    def test_scaling_points_exact_power_of_two(self):
        # lam^2 * s is exact for power-of-two lam, so the homogeneity of the
        # coefficients in the squared distances is visible bit for bit
        spec = TrialSpec(seed=34)
        lam = 8.0
        for trial in range(50):
            problem, _ = generate_problem(spec, trial)
            data = compute_pairwise(problem)
            scaled = PairwiseData(
                data.m12, data.m13, data.m23,
                lam * lam * data.s12, lam * lam * data.s13, lam * lam * data.s23,
            )
            c = quartic_coefficients(data)
            cs = quartic_coefficients(scaled)
            assert np.array_equal(cs, lam**4 * c)
            assert solve_quartic_adaptive(c) == solve_quartic_adaptive(cs)

    def test_scaling_points_inexact(self):
        # a general scale factor rounds the s values; roots stay put to
        # well within the conditioning of the quartic
        spec = TrialSpec(seed=35)
        lam = 10.0
        for trial in range(50):
            problem, _ = generate_problem(spec, trial)
            data = compute_pairwise(problem)
            scaled = PairwiseData(
                data.m12, data.m13, data.m23,
                lam * lam * data.s12, lam * lam * data.s13, lam * lam * data.s23,
            )
            r = solve_quartic_adaptive(quartic_coefficients(data))
            rs = solve_quartic_adaptive(quartic_coefficients(scaled))
            assert len(r) == len(rs)
            for a, b in zip(r, rs):
                assert a == pytest.approx(b, rel=1e-9, abs=1e-9)


class TestRecoverY:
    def test_ground_truth(self):
        spec = TrialSpec(seed=40)
        for trial in range(300):
            problem, gt = generate_problem(spec, trial)
            data, _ = canonical_reindex(compute_pairwise(problem), problem)
            i0, i1, i2 = data.perm
            x = gt.depths_gt[i0] / gt.depths_gt[i2]
            y_true = gt.depths_gt[i1] / gt.depths_gt[i2]
            candidates = recover_y(x, data)
            assert candidates, "true root must yield a y candidate"
            assert min(abs(y - y_true) for y in candidates) < 1e-9 * y_true

    def test_equilateral_fallback(self):
        # symmetric geometry: the rational denominator vanishes at x = 1,
        # yet y = 1 must be recovered through the conic fallback
        data = compute_pairwise(equilateral_problem(0.5))
        candidates = recover_y(1.0, data)
        assert any(abs(y - 1.0) < 1e-12 for y in candidates)

    def test_equilateral_fallback_two_branches(self):
        # with a wider cone the same x = 1 root carries two distinct
        # geometric solutions: y = 1 and y = 2*m - 1
        data = compute_pairwise(equilateral_problem(0.7))
        candidates = recover_y(1.0, data)
        assert len(candidates) == 2
        assert min(candidates) == pytest.approx(0.4, abs=1e-9)
        assert max(candidates) == pytest.approx(1.0, abs=1e-9)

    def test_negative_y_rejected(self):
        data = PairwiseData(m12=0.5, m13=0.0, m23=-0.5, s12=4.0, s13=1.0, s23=1.0)
        # numerator A x^2 + B x + C = -2 x^2 - 4 < 0, denominator positive
        assert recover_y(1.0, data) == ()


class TestRecoverDepths:
    def test_orthonormal_plug_in(self):
        data = compute_pairwise(P3pProblem.from_arrays(np.eye(3), np.eye(3)))
        depths = recover_depths(1.0, 1.0, data, source="s23")
        assert depths == pytest.approx([1.0, 1.0, 1.0], abs=1e-15)

    def test_ground_truth_all_sources(self):
        spec = TrialSpec(seed=41)
        for trial in range(200):
            problem, gt = generate_problem(spec, trial)
            data, _ = canonical_reindex(compute_pairwise(problem), problem)
            i0, i1, i2 = data.perm
            x = gt.depths_gt[i0] / gt.depths_gt[i2]
            y = gt.depths_gt[i1] / gt.depths_gt[i2]
            want = np.array([gt.depths_gt[i0], gt.depths_gt[i1], gt.depths_gt[i2]])
            for source in ("s12", "s13", "s23"):
                got = recover_depths(x, y, data, source=source)
                assert got is not None
                assert np.allclose(got, want, rtol=1e-9)

    def test_rejects_nonpositive_denominator(self):
        # only reachable when a cosine exceeds 1 by rounding
        data = PairwiseData(
            m12=0.0, m13=0.0, m23=1.0 + 1e-13, s12=1.0, s13=1.0, s23=1.0
        )
        assert recover_depths(1.0, 1.0, data, source="s23") is None

    def test_denominator_positive_for_valid_cosines(self):
        rng = np.random.default_rng(6)
        for _ in range(10_000):
            m23 = rng.uniform(-1.0, 1.0)
            y = rng.uniform(1e-3, 1e3)
            assert y * y - 2.0 * y * m23 + 1.0 > 0.0


class TestGaussNewton:
    def _random_case(self, trial):
        problem, gt = generate_problem(TrialSpec(seed=42), trial)
        data = compute_pairwise(problem)
        return gt.depths_gt.copy(), data

    def test_exact_depths_unchanged(self):
        depths, data = self._random_case(0)
        out = refine_depths_gauss_newton(depths, data, iters=4)
        assert law_of_cosines_residual(out, data) <= law_of_cosines_residual(depths, data)
        assert np.allclose(out, depths, rtol=1e-12)

    def test_perturbed_depths_recover(self):
        for trial in range(100):
            depths, data = self._random_case(trial)
            noisy = depths * (1.0 + 1e-6 * np.array([1.0, -1.0, 0.5]))
            before = law_of_cosines_residual(noisy, data)
            after = law_of_cosines_residual(
                refine_depths_gauss_newton(noisy, data, iters=2), data
            )
            assert after <= before / 1e4

    def test_zero_iters_is_identity(self):
        depths, data = self._random_case(7)
        noisy = depths * 1.001
        out = refine_depths_gauss_newton(noisy, data, iters=0)
        assert np.array_equal(out, noisy)

    def test_never_worsens(self):
        rng = np.random.default_rng(43)
        for trial in range(200):
            depths, data = self._random_case(trial)
            noisy = depths * np.exp(rng.normal(0, 0.3, size=3))
            before = law_of_cosines_residual(noisy, data)
            out = refine_depths_gauss_newton(noisy, data, iters=2)
            assert law_of_cosines_residual(out, data) <= before
            assert np.all(out > 0)


class TestAlignPose:
    def test_identity_problem(self):
        prob = P3pProblem.from_arrays(np.eye(3), np.eye(3))
        pose = align_pose([1.0, 1.0, 1.0], prob)
        assert np.abs(pose.R - np.eye(3)).max() < 1e-9
        assert np.abs(pose.t).max() < 1e-9

    def test_ground_truth_depths_give_ground_truth_pose(self):
        spec = TrialSpec(seed=44)
        for trial in range(300):
            problem, gt = generate_problem(spec, trial)
            pose = align_pose(gt.depths_gt, problem)
            xi = np.abs(pose.R - gt.R_gt).sum() + np.abs(pose.t - gt.t_gt).sum()
            assert xi < 1e-9

    def test_collinear_points_raise(self):
        prob = P3pProblem.from_arrays(
            np.eye(3), [[0.0, 0.0, 1.0], [0.0, 0.0, 2.0], [0.0, 0.0, 3.0]]
        )
        with pytest.raises(CollinearPoints):
            align_pose([1.0, 1.0, 1.0], prob)


class TestSolverConfig:
    def test_defaults(self):
        cfg = SolverConfig()
        assert cfg.gn_iterations == 2
        assert cfg.force_variant == "adaptive"
        assert cfg.reindex_enabled
        assert cfg.d3_source == "s23"

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"gn_iterations": -1},
            {"gn_iterations": 17},
            {"denom_epsilon": 0.0},
            {"force_variant": "newton"},
            {"d3_source": "s99"},
        ],
    )
    def test_rejects_bad_values(self, kwargs):
        with pytest.raises(ValueError):
            SolverConfig(**kwargs)


class TestSolve:
    def test_orthonormal_frame(self):
        prob = P3pProblem.from_arrays(np.eye(3), np.eye(3))
        sols = solve(prob)
        assert 1 <= len(sols) <= 4
        best = min(
            np.abs(s.pose.R - np.eye(3)).sum() + np.abs(s.pose.t).sum() for s in sols
        )
        assert best < 1e-9
        assert any(np.allclose(s.depths, 1.0, atol=1e-9) for s in sols)

    def test_ground_truth_recovered(self):
        spec = TrialSpec(seed=50)
        for trial in range(1000):
            problem, gt = generate_problem(spec, trial)
            sols = solve(problem)
            assert 1 <= len(sols) <= 4
            xi = min(
                np.abs(s.pose.R - gt.R_gt).sum() + np.abs(s.pose.t - gt.t_gt).sum()
                for s in sols
            )
            assert xi < 1e-6

    def test_law_of_cosines_on_returned_solutions(self):
        spec = TrialSpec(seed=51)
        for trial in range(1000):
            problem, _ = generate_problem(spec, trial)
            data = compute_pairwise(problem)
            smax = max(data.s12, data.s13, data.s23)
            for s in solve(problem):
                assert law_of_cosines_residual(s.depths, data) <= 1e-8 * smax

    def test_deterministic(self):
        problem, _ = generate_problem(TrialSpec(seed=52), 3)
        a = solve(problem)
        b = solve(problem)
        assert len(a) == len(b)
        for x, y in zip(a, b):
            assert np.array_equal(x.pose.R, y.pose.R)
            assert np.array_equal(x.pose.t, y.pose.t)
            assert np.array_equal(x.depths, y.depths)

    def test_permutation_invariance(self):
        import itertools

        spec = TrialSpec(seed=53)
        for trial in range(200):
            problem, _ = generate_problem(spec, trial)
            base = solve(problem)
            for perm in itertools.permutations(range(3)):
                permuted = P3pProblem(tuple(problem.corr[i] for i in perm))
                sols = solve(permuted)
                assert pose_set_distance(base, sols) < 1e-9

    def test_similarity_equivariance(self):
        spec = TrialSpec(seed=54)
        lam = 3.7
        for trial in range(200):
            problem, _ = generate_problem(spec, trial)
            base = solve(problem)
            scaled_problem = P3pProblem.from_arrays(
                problem.bearings_matrix(), lam * problem.points_matrix()
            )
            scaled = solve(scaled_problem)
            assert len(base) == len(scaled)
            for a in base:
                best = min(
                    np.abs(a.pose.R - b.pose.R).sum()
                    + np.abs(lam * a.pose.t - b.pose.t).sum() / max(1.0, lam * np.abs(a.pose.t).sum())
                    for b in scaled
                )
                assert best < 1e-9

    def test_rigid_equivariance(self):
        spec = TrialSpec(seed=55)
        rng = np.random.default_rng(55)
        for trial in range(200):
            problem, _ = generate_problem(spec, trial)
            q = rng.normal(size=4)
            Q = p3p.rotation_from_quaternion(q)
            base = solve(problem)
            rotated_problem = P3pProblem.from_arrays(
                problem.bearings_matrix(), problem.points_matrix() @ Q.T
            )
            rotated = solve(rotated_problem)
            assert len(base) == len(rotated)
            for a in base:
                best = min(
                    np.abs(a.pose.R @ Q.T - b.pose.R).sum()
                    + np.abs(a.pose.t - b.pose.t).sum()
                    for b in rotated
                )
                assert best < 1e-9

    def test_symmetric_double_solution_capped(self):
        # x = 1 is a double root carrying two geometric solutions; the
        # solver must report them without exceeding the four-pose bound
        prob = equilateral_problem(0.7)
        sols = solve(prob)
        assert 1 <= len(sols) <= 4
        assert any(np.allclose(s.depths, 1.0, atol=1e-6) for s in sols)

    def test_collinear_points_propagate(self):
        # collinear points actually observed by a camera: the depth
        # pipeline succeeds, so the alignment's singularity must surface
        X = np.array([[0.0, 0.0, 1.0], [1.0, 0.0, 1.0], [2.0, 0.0, 1.0]])
        M = X / np.linalg.norm(X, axis=1, keepdims=True)
        prob = P3pProblem.from_arrays(M, X)
        with pytest.raises(CollinearPoints):
            solve(prob)

    def test_forced_variants_still_recover(self):
        spec = TrialSpec(seed=56)
        for variant in ("ferrari_lagrange", "classical"):
            cfg = SolverConfig(force_variant=variant)
            found = 0
            for trial in range(200):
                problem, gt = generate_problem(spec, trial)
                sols = solve(problem, cfg)
                if sols and min(
                    np.abs(s.pose.R - gt.R_gt).sum() + np.abs(s.pose.t - gt.t_gt).sum()
                    for s in sols
                ) < 1e-6:
                    found += 1
            assert found >= 199

    def test_d3_sources_agree(self):
        spec = TrialSpec(seed=57)
        for trial in range(100):
            problem, _ = generate_problem(spec, trial)
            sols = {
                src: solve(problem, SolverConfig(d3_source=src))
                for src in ("s12", "s13", "s23")
            }
            assert len(sols["s12"]) == len(sols["s13"]) == len(sols["s23"])
            assert pose_set_distance(sols["s12"], sols["s23"]) < 1e-8
            assert pose_set_distance(sols["s13"], sols["s23"]) < 1e-8
