"""Synthetic benchmark harness: problem generation, pose-error metric,
solution classification, and the accuracy / timing / ablation drivers.

Every trial derives its own RNG stream from ``(seed, trial_index)`` via a
64-bit avalanche hash (splitmix-style), so a run is reproducible for a
given seed and identical whether trials execute serially or fanned out
across threads.  Determinism is promised per implementation and machine,
not across library versions or platforms.

Per-trial results land in preallocated arrays indexed by trial, and all
aggregation is commutative over those arrays; thread count therefore never
changes a report.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from numba import njit, objmode

from .geometry import BearingVector, Correspondence, P3pProblem, Pose, Solution
from .geometry import _quat_from_rot, _rot_from_unit_quat
from .solver import SolverConfig, _solve_kernel

__all__ = [
    "TrialSpec",
    "GroundTruth",
    "TrialRecord",
    "TimingStats",
    "AggregateReport",
    "ABLATION_VARIANTS",
    "generate_problem",
    "pose_error",
    "classify",
    "run_benchmark",
    "run_timing",
    "run_ablation",
]

# Classification thresholds.
DUPLICATE_TOL = 1e-5
GROUND_TRUTH_XI = 1e-6
ROTATION_DET_TOL = 1e-6
ROTATION_ORTHO_TOL = 1e-6
QUAT_NORM_TOL = 1e-5
REPROJECTION_TOL = 1e-4

# splitmix64 constants: stream step and the two avalanche multipliers.
_U_STEP = np.uint64(0x9E3779B97F4A7C15)
_U_M1 = np.uint64(0xBF58476D1CE4E5B9)
_U_M2 = np.uint64(0x94D049BB133111EB)
_U_SEED_TAG = np.uint64(0x243F6A8885A308D3)
_U_ONE = np.uint64(1)
_S30 = np.uint64(30)
_S27 = np.uint64(27)
_S31 = np.uint64(31)
_S11 = np.uint64(11)
_INV_2_53 = 1.1102230246251565e-16  # 2**-53
_TWO_PI = 6.283185307179586


@dataclass(frozen=True)
class TrialSpec:
    """Generation parameters for the synthetic problems."""

    seed: int = 0
    depth_min: float = 0.1
    depth_max: float = 10.0
    image_range: float = 1.0

    def __post_init__(self):
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must fit in 64 unsigned bits")
        if not (0.0 < self.depth_min < self.depth_max):
            raise ValueError("need 0 < depth_min < depth_max")
        if not self.image_range > 0.0:
            raise ValueError("image_range must be positive")


@dataclass(frozen=True)
class GroundTruth:
    """The pose and depths a generated problem was built from."""

    R_gt: np.ndarray
    t_gt: np.ndarray
    depths_gt: np.ndarray

    def __post_init__(self):
        R = np.ascontiguousarray(self.R_gt, dtype=np.float64)
        t = np.asarray(self.t_gt, dtype=np.float64)
        d = np.asarray(self.depths_gt, dtype=np.float64)
        if R.shape != (3, 3) or t.shape != (3,) or d.shape != (3,):
            raise ValueError("expected R_gt (3,3), t_gt (3,), depths_gt (3,)")
        if np.abs(R.T @ R - np.eye(3)).sum() > 1e-12:
            raise ValueError("R_gt is not orthonormal to 1e-12")
        if abs(math.sqrt(float(t @ t)) - 1.0) > 1e-12:
            raise ValueError("t_gt must have unit length to 1e-12")
        if not np.all(d > 0.0):
            raise ValueError("depths_gt must be positive")
        for arr in (R, t, d):
            arr.setflags(write=False)
        object.__setattr__(self, "R_gt", R)
        object.__setattr__(self, "t_gt", t)
        object.__setattr__(self, "depths_gt", d)


@dataclass(frozen=True)
class TrialRecord:
    """Per-trial classification outcome.

    Every returned solution lands in exactly one of unique / duplicate /
    incorrect: duplicates are solutions too close to an earlier one in the
    returned order, uniques are the remaining ones passing the rotation
    validity and reprojection gates, incorrect is the rest.
    ``gt_solution_count`` additionally counts all solutions below the
    ground-truth error threshold regardless of bucket.
    """

    valid_count: int
    unique_count: int
    duplicate_count: int
    incorrect_count: int
    found_good: bool
    found_ground_truth: bool
    best_xi: float
    solver_time_ns: float = 0.0
    gt_solution_count: int = 0

    def __post_init__(self):
        parts = self.unique_count + self.duplicate_count + self.incorrect_count
        if parts != self.valid_count:
            raise ValueError(
                f"bucket counts {parts} do not partition valid_count {self.valid_count}"
            )


@dataclass(frozen=True)
class TimingStats:
    """Per-trial averaged solve times (nanoseconds) across a run."""

    trials: int
    repeats: int
    mean_ns: float
    median_ns: float
    min_ns: float
    max_ns: float
    clock_overhead_ns: float
    checksum: float


@dataclass(frozen=True)
class AggregateReport:
    """Totals over a benchmark run.

    ``incorrect_including_duplicates`` is the alternative bucketing
    ``valid - unique`` (duplicates folded into the failures);
    ``ground_truth_solutions`` counts sub-threshold solutions rather than
    trials.  Both reconcile the two ways the per-trial buckets can be
    collapsed and are reported alongside the primary partition.
    """

    trials: int
    spec: TrialSpec
    config: SolverConfig
    valid: int
    unique: int
    duplicates: int
    incorrect: int
    good: int
    no_solution: int
    ground_truth: int
    incorrect_including_duplicates: int
    ground_truth_solutions: int
    degenerate_trials: int
    mean_xi: float | None
    median_xi: float | None
    max_xi: float | None
    timing: TimingStats | None = None


@njit(cache=True, nogil=True)
def _mix64(z):
    z = (z ^ (z >> _S30)) * _U_M1
    z = (z ^ (z >> _S27)) * _U_M2
    return z ^ (z >> _S31)


@njit(cache=True, nogil=True)
def _stream_init(seed, trial_index):
    # Hash the trial index before offsetting so neighboring trials start
    # at unrelated positions of the underlying counter sequence.
    return _mix64((seed ^ _U_SEED_TAG) + _mix64(trial_index * _U_STEP + _U_ONE))


@njit(cache=True, nogil=True)
def _next_unit(state):
    # One uniform draw in [0, 1) from the top 53 bits.
    state = state + _U_STEP
    z = _mix64(state)
    return state, (z >> _S11) * _INV_2_53


@njit(cache=True, nogil=True)
def _next_normal_pair(state):
    # Box-Muller; the first uniform is shifted into (0, 1] for the log.
    state = state + _U_STEP
    z1 = _mix64(state)
    state = state + _U_STEP
    z2 = _mix64(state)
    u1 = ((z1 >> _S11) + _U_ONE) * _INV_2_53
    u2 = (z2 >> _S11) * _INV_2_53
    r = math.sqrt(-2.0 * math.log(u1))
    a = _TWO_PI * u2
    return state, r * math.cos(a), r * math.sin(a)


@njit(cache=True, nogil=True)
def _generate(seed, trial_index, dmin, dmax, irange, M, X, Rgt, tgt, dgt):
    state = _stream_init(seed, trial_index)
    while True:
        for i in range(3):
            state, u = _next_unit(state)
            state, v = _next_unit(state)
            ui = -irange + 2.0 * irange * u
            vi = -irange + 2.0 * irange * v
            nrm = math.sqrt(ui * ui + vi * vi + 1.0)
            M[i, 0] = ui / nrm
            M[i, 1] = vi / nrm
            M[i, 2] = 1.0 / nrm
        for i in range(3):
            state, u = _next_unit(state)
            dgt[i] = dmin + (dmax - dmin) * u
        while True:
            state, q0, q1 = _next_normal_pair(state)
            state, q2, q3 = _next_normal_pair(state)
            qn = math.sqrt(q0 * q0 + q1 * q1 + q2 * q2 + q3 * q3)
            if qn >= 1e-6:
                break
        _rot_from_unit_quat(q0 / qn, q1 / qn, q2 / qn, q3 / qn, Rgt)
        while True:
            state, t0, t1 = _next_normal_pair(state)
            state, t2, _ = _next_normal_pair(state)
            tn = math.sqrt(t0 * t0 + t1 * t1 + t2 * t2)
            if tn >= 1e-6:
                break
        tgt[0] = t0 / tn
        tgt[1] = t1 / tn
        tgt[2] = t2 / tn
        # World points so that R_gt X_i + t_gt lands back on d_i m_i.
        for i in range(3):
            cx = dgt[i] * M[i, 0] - tgt[0]
            cy = dgt[i] * M[i, 1] - tgt[1]
            cz = dgt[i] * M[i, 2] - tgt[2]
            X[i, 0] = Rgt[0, 0] * cx + Rgt[1, 0] * cy + Rgt[2, 0] * cz
            X[i, 1] = Rgt[0, 1] * cx + Rgt[1, 1] * cy + Rgt[2, 1] * cz
            X[i, 2] = Rgt[0, 2] * cx + Rgt[1, 2] * cy + Rgt[2, 2] * cz
        ok = True
        for i in range(3):
            for j in range(i + 1, 3):
                db = 0.0
                dp = 0.0
                for k in range(3):
                    b = M[i, k] - M[j, k]
                    db += b * b
                    p = X[i, k] - X[j, k]
                    dp += p * p
                if db <= 1e-24 or dp <= 1e-24:
                    ok = False
        if ok:
            return


@njit(cache=True, nogil=True)
def _pose_error(R, t, Rgt, tgt):
    xi = 0.0
    for i in range(3):
        xi += abs(tgt[i] - t[i])
        for j in range(3):
            xi += abs(Rgt[i, j] - R[i, j])
    return xi


@njit(cache=True, nogil=True)
def _rotation_valid(R):
    det = (
        R[0, 0] * (R[1, 1] * R[2, 2] - R[1, 2] * R[2, 1])
        - R[0, 1] * (R[1, 0] * R[2, 2] - R[1, 2] * R[2, 0])
        + R[0, 2] * (R[1, 0] * R[2, 1] - R[1, 1] * R[2, 0])
    )
    if not abs(det - 1.0) < ROTATION_DET_TOL:
        return False
    ortho = 0.0
    for i in range(3):
        for j in range(3):
            acc = 0.0
            for k in range(3):
                acc += R[k, i] * R[k, j]
            if i == j:
                acc -= 1.0
            ortho += abs(acc)
    if not ortho < ROTATION_ORTHO_TOL:
        return False
    w, x, y, z = _quat_from_rot(R)
    qn = math.sqrt(w * w + x * x + y * y + z * z)
    return abs(1.0 - qn) < QUAT_NORM_TOL


@njit(cache=True, nogil=True)
def _reprojection_ok(R, t, M, X):
    for i in range(3):
        px = R[0, 0] * X[i, 0] + R[0, 1] * X[i, 1] + R[0, 2] * X[i, 2] + t[0]
        py = R[1, 0] * X[i, 0] + R[1, 1] * X[i, 1] + R[1, 2] * X[i, 2] + t[1]
        pz = R[2, 0] * X[i, 0] + R[2, 1] * X[i, 1] + R[2, 2] * X[i, 2] + t[2]
        if not M[i, 0] * px + M[i, 1] * py + M[i, 2] * pz > 0.0:
            return False
        if pz == 0.0:
            return False
        du = px / pz - M[i, 0] / M[i, 2]
        dv = py / pz - M[i, 1] / M[i, 2]
        if not math.sqrt(du * du + dv * dv) < REPROJECTION_TOL:
            return False
    return True


@njit(cache=True, nogil=True)
def _classify(n, Rb, tb, M, X, Rgt, tgt):
    unique = 0
    dup = 0
    incorrect = 0
    best_xi = np.inf
    gt_sols = 0
    for j in range(n):
        is_dup = False
        for i in range(j):
            dist = 0.0
            for r in range(3):
                dist += abs(tb[i, r] - tb[j, r])
                for c in range(3):
                    dist += abs(Rb[i, r, c] - Rb[j, r, c])
            if dist < DUPLICATE_TOL:
                is_dup = True
                break
        xi = _pose_error(Rb[j], tb[j], Rgt, tgt)
        if xi < best_xi:
            best_xi = xi
        if xi < GROUND_TRUTH_XI:
            gt_sols += 1
        if is_dup:
            dup += 1
        elif _rotation_valid(Rb[j]) and _reprojection_ok(Rb[j], tb[j], M, X):
            unique += 1
        else:
            incorrect += 1
    return unique, dup, incorrect, best_xi, gt_sols


@njit(cache=True, nogil=True)
def _run_range(
    seed, lo, hi, dmin, dmax, irange,
    gn_iters, denom_eps, variant, reindex_on, d3_code,
    valid_a, uniq_a, dup_a, inc_a, good_a, fgt_a, bxi_a, gts_a, degen_a,
):
    M = np.empty((3, 3))
    X = np.empty((3, 3))
    Rgt = np.empty((3, 3))
    tgt = np.empty(3)
    dgt = np.empty(3)
    Rb = np.empty((4, 3, 3))
    tb = np.empty((4, 3))
    db = np.empty((4, 3))
    for t in range(lo, hi):
        _generate(seed, np.uint64(t), dmin, dmax, irange, M, X, Rgt, tgt, dgt)
        n = _solve_kernel(
            M, X, gn_iters, denom_eps, variant, reindex_on, d3_code, Rb, tb, db
        )
        if n < 0:
            degen_a[t] = 1
            n = 0
        else:
            degen_a[t] = 0
        uq, dp, inc, bxi, gts = _classify(n, Rb, tb, M, X, Rgt, tgt)
        valid_a[t] = n
        uniq_a[t] = uq
        dup_a[t] = dp
        inc_a[t] = inc
        good_a[t] = 1 if uq >= 1 else 0
        fgt_a[t] = 1 if bxi < GROUND_TRUTH_XI else 0
        bxi_a[t] = bxi
        gts_a[t] = gts


@njit(cache=True, nogil=True)
def _solve_sink(n, Rb, tb, db):
    # Cheap order-independent digest of a solve's outputs; used as the
    # optimization sink by the timing harness and its purity check.
    acc = float(n)
    for i in range(n):
        acc += tb[i, 0] + db[i, 2]
        for r in range(3):
            acc += Rb[i, r, 0] + Rb[i, r, 1] + Rb[i, r, 2]
    return acc


@njit(cache=False)
def _time_range(
    seed, trials, dmin, dmax, irange,
    gn_iters, denom_eps, variant, reindex_on, d3_code,
    repeats, warmup, deltas,
):
    M = np.empty((3, 3))
    X = np.empty((3, 3))
    Rgt = np.empty((3, 3))
    tgt = np.empty(3)
    dgt = np.empty(3)
    Rb = np.empty((4, 3, 3))
    tb = np.empty((4, 3))
    db = np.empty((4, 3))
    checksum = 0.0
    if warmup > 0 and trials > 0:
        _generate(seed, np.uint64(0), dmin, dmax, irange, M, X, Rgt, tgt, dgt)
        for _ in range(warmup):
            n = _solve_kernel(
                M, X, gn_iters, denom_eps, variant, reindex_on, d3_code, Rb, tb, db
            )
    for t in range(trials):
        _generate(seed, np.uint64(t), dmin, dmax, irange, M, X, Rgt, tgt, dgt)
        with objmode(t0="int64"):
            t0 = time.perf_counter_ns()
        for _ in range(repeats):
            n = _solve_kernel(
                M, X, gn_iters, denom_eps, variant, reindex_on, d3_code, Rb, tb, db
            )
            if n > 0:
                checksum += _solve_sink(n, Rb, tb, db)
        with objmode(t1="int64"):
            t1 = time.perf_counter_ns()
        deltas[t] = t1 - t0
    return checksum


@njit(cache=True, nogil=True)
def _untimed_checksum(
    seed, trials, dmin, dmax, irange,
    gn_iters, denom_eps, variant, reindex_on, d3_code, repeats,
):
    # Mirrors _time_range without the clock reads; bitwise-equal checksums
    # demonstrate that timing does not perturb the solves.
    M = np.empty((3, 3))
    X = np.empty((3, 3))
    Rgt = np.empty((3, 3))
    tgt = np.empty(3)
    dgt = np.empty(3)
    Rb = np.empty((4, 3, 3))
    tb = np.empty((4, 3))
    db = np.empty((4, 3))
    checksum = 0.0
    for t in range(trials):
        _generate(seed, np.uint64(t), dmin, dmax, irange, M, X, Rgt, tgt, dgt)
        for _ in range(repeats):
            n = _solve_kernel(
                M, X, gn_iters, denom_eps, variant, reindex_on, d3_code, Rb, tb, db
            )
            if n > 0:
                checksum += _solve_sink(n, Rb, tb, db)
    return checksum


@njit(cache=False)
def _clock_pair_overhead(n, out):
    for i in range(n):
        with objmode(t0="int64"):
            t0 = time.perf_counter_ns()
        with objmode(t1="int64"):
            t1 = time.perf_counter_ns()
        out[i] = t1 - t0


def generate_problem(spec: TrialSpec, trial_index: int) -> tuple[P3pProblem, GroundTruth]:
    """Deterministically generate one synthetic problem plus its truth.

    Image points are uniform in the square of half-width ``image_range``
    at focal depth 1, depths uniform in [depth_min, depth_max]; the pose
    is a uniform random rotation (normalized 4-normal quaternion) and a
    unit-norm translation.  Degenerate draws (coincident bearings or
    points) are resampled from the same stream.
    """
    if trial_index < 0:
        raise ValueError("trial_index must be >= 0")
    M = np.empty((3, 3))
    X = np.empty((3, 3))
    Rgt = np.empty((3, 3))
    tgt = np.empty(3)
    dgt = np.empty(3)
    _generate(
        np.uint64(spec.seed), np.uint64(trial_index),
        spec.depth_min, spec.depth_max, spec.image_range,
        M, X, Rgt, tgt, dgt,
    )
    problem = P3pProblem(
        tuple(Correspondence(BearingVector(M[i]), X[i]) for i in range(3))
    )
    return problem, GroundTruth(Rgt, tgt, dgt)


def pose_error(pose: Pose, gt: GroundTruth) -> float:
    """Sum of entrywise absolute differences over rotation and translation."""
    return float(_pose_error(pose.R, pose.t, gt.R_gt, gt.t_gt))


def classify(solutions, problem: P3pProblem, gt: GroundTruth) -> TrialRecord:
    """Bucket a solver's output for one problem.

    In returned order, a solution within combined L1 distance
    ``DUPLICATE_TOL`` of an earlier one is a duplicate; the remaining ones
    must pass rotation validity (determinant, orthogonality, quaternion
    norm) and per-point reprojection in normalized image coordinates to
    count as unique, else they are incorrect.
    """
    M = problem.bearings_matrix()
    if np.any(np.abs(M[:, 2]) < 1e-12):
        raise ValueError(
            "bearing z-components must be nonzero to form normalized image coordinates"
        )
    X = problem.points_matrix()
    n = len(solutions)
    if n > 4:
        raise ValueError("a P3P solver returns at most 4 solutions")
    Rb = np.empty((4, 3, 3))
    tb = np.empty((4, 3))
    for i, sol in enumerate(solutions):
        Rb[i] = sol.pose.R
        tb[i] = sol.pose.t
    uq, dp, inc, bxi, gts = _classify(n, Rb, tb, M, X, gt.R_gt, gt.t_gt)
    return TrialRecord(
        valid_count=n,
        unique_count=int(uq),
        duplicate_count=int(dp),
        incorrect_count=int(inc),
        found_good=uq >= 1,
        found_ground_truth=bool(bxi < GROUND_TRUTH_XI),
        best_xi=float(bxi),
        gt_solution_count=int(gts),
    )


def _alloc_arrays(trials: int) -> dict[str, np.ndarray]:
    return {
        "valid": np.zeros(trials, dtype=np.int32),
        "unique": np.zeros(trials, dtype=np.int32),
        "duplicates": np.zeros(trials, dtype=np.int32),
        "incorrect": np.zeros(trials, dtype=np.int32),
        "good": np.zeros(trials, dtype=np.uint8),
        "found_gt": np.zeros(trials, dtype=np.uint8),
        "best_xi": np.zeros(trials, dtype=np.float64),
        "gt_solutions": np.zeros(trials, dtype=np.int32),
        "degenerate": np.zeros(trials, dtype=np.uint8),
    }


def _run_trials(spec: TrialSpec, trials: int, config: SolverConfig, threads: int):
    arrays = _alloc_arrays(trials)
    gn, eps, variant, reindex, d3 = config._codes()
    seed = np.uint64(spec.seed)
    common = (seed, spec.depth_min, spec.depth_max, spec.image_range,
              gn, eps, variant, reindex, d3)
    arr_args = (
        arrays["valid"], arrays["unique"], arrays["duplicates"], arrays["incorrect"],
        arrays["good"], arrays["found_gt"], arrays["best_xi"],
        arrays["gt_solutions"], arrays["degenerate"],
    )

    def run_chunk(lo: int, hi: int) -> None:
        _run_range(
            seed, lo, hi, spec.depth_min, spec.depth_max, spec.image_range,
            gn, eps, variant, reindex, d3, *arr_args,
        )

    if threads <= 1 or trials < 2 * threads:
        run_chunk(0, trials)
    else:
        run_chunk(0, 0)  # compile on the main thread before fanning out
        chunk = -(-trials // threads)
        bounds = [(lo, min(lo + chunk, trials)) for lo in range(0, trials, chunk)]
        with ThreadPoolExecutor(max_workers=threads) as pool:
            futures = [pool.submit(run_chunk, lo, hi) for lo, hi in bounds]
            for f in futures:
                f.result()
    return arrays


def _aggregate(
    spec: TrialSpec, trials: int, config: SolverConfig, arrays
) -> AggregateReport:
    valid = int(arrays["valid"].sum(dtype=np.int64))
    unique = int(arrays["unique"].sum(dtype=np.int64))
    dup = int(arrays["duplicates"].sum(dtype=np.int64))
    inc = int(arrays["incorrect"].sum(dtype=np.int64))
    good = int(arrays["good"].sum(dtype=np.int64))
    ground_truth = int(arrays["found_gt"].sum(dtype=np.int64))
    gt_sols = int(arrays["gt_solutions"].sum(dtype=np.int64))
    degen = int(arrays["degenerate"].sum(dtype=np.int64))
    sel = arrays["best_xi"][arrays["found_gt"] == 1]
    if sel.size:
        mean_xi = float(np.mean(sel))
        median_xi = float(np.median(sel))
        max_xi = float(np.max(sel))
    else:
        mean_xi = median_xi = max_xi = None
    return AggregateReport(
        trials=trials,
        spec=spec,
        config=config,
        valid=valid,
        unique=unique,
        duplicates=dup,
        incorrect=inc,
        good=good,
        no_solution=trials - good,
        ground_truth=ground_truth,
        incorrect_including_duplicates=valid - unique,
        ground_truth_solutions=gt_sols,
        degenerate_trials=degen,
        mean_xi=mean_xi,
        median_xi=median_xi,
        max_xi=max_xi,
    )


def run_benchmark(
    spec: TrialSpec,
    trials: int,
    config: SolverConfig | None = None,
    threads: int = 1,
    dump_path: str | None = None,
) -> AggregateReport:
    """Generate, solve and classify ``trials`` problems; return the totals.

    With ``dump_path`` set, one JSON line per trial is also written there.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    cfg = config if config is not None else SolverConfig()
    arrays = _run_trials(spec, trials, cfg, max(1, threads))
    if dump_path is not None:
        _dump_trials(dump_path, arrays, trials)
    return _aggregate(spec, trials, cfg, arrays)


def _dump_trials(path: str, arrays, trials: int) -> None:
    from . import jsonio

    with open(path, "w", encoding="utf-8") as fh:
        for t in range(trials):
            bxi = float(arrays["best_xi"][t])
            rec = {
                "trial": t,
                "valid": int(arrays["valid"][t]),
                "unique": int(arrays["unique"][t]),
                "duplicates": int(arrays["duplicates"][t]),
                "incorrect": int(arrays["incorrect"][t]),
                "found_good": bool(arrays["good"][t]),
                "found_ground_truth": bool(arrays["found_gt"][t]),
                "best_xi": bxi if math.isfinite(bxi) else None,
                "solver_time_ns": 0.0,
                "ground_truth_solutions": int(arrays["gt_solutions"][t]),
            }
            fh.write(jsonio.dumps(rec, indent=None))
            fh.write("\n")


def run_timing(
    spec: TrialSpec,
    trials: int,
    repeats: int = 10,
    config: SolverConfig | None = None,
    warmup: int = 10_000,
) -> TimingStats:
    """Time ``repeats`` consecutive solves per problem and report the
    spread of the per-problem averages.

    Runs single-threaded.  The monotonic-clock read overhead is measured
    separately and subtracted from each per-problem delta; a checksum over
    all outputs doubles as the optimization sink and as the purity witness
    (compare against the same run without clock reads).
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if repeats < 1:
        raise ValueError("repeats must be >= 1")
    cfg = config if config is not None else SolverConfig()
    gn, eps, variant, reindex, d3 = cfg._codes()
    overhead_samples = np.empty(2048, dtype=np.int64)
    _clock_pair_overhead(64, overhead_samples[:64])  # compile + warm
    _clock_pair_overhead(2048, overhead_samples)
    overhead = float(np.median(overhead_samples))
    deltas = np.empty(trials, dtype=np.int64)
    checksum = _time_range(
        np.uint64(spec.seed), trials,
        spec.depth_min, spec.depth_max, spec.image_range,
        gn, eps, variant, reindex, d3, repeats, warmup, deltas,
    )
    per_solve = np.maximum(deltas - overhead, 0.0) / repeats
    return TimingStats(
        trials=trials,
        repeats=repeats,
        mean_ns=float(np.mean(per_solve)),
        median_ns=float(np.median(per_solve)),
        min_ns=float(np.min(per_solve)),
        max_ns=float(np.max(per_solve)),
        clock_overhead_ns=overhead,
        checksum=float(checksum),
    )


def untimed_checksum(
    spec: TrialSpec, trials: int, repeats: int = 10, config: SolverConfig | None = None
) -> float:
    """The timing harness's checksum computed without any clock reads."""
    cfg = config if config is not None else SolverConfig()
    gn, eps, variant, reindex, d3 = cfg._codes()
    return float(
        _untimed_checksum(
            np.uint64(spec.seed), trials,
            spec.depth_min, spec.depth_max, spec.image_range,
            gn, eps, variant, reindex, d3, repeats,
        )
    )


ABLATION_VARIANTS: tuple[tuple[str, SolverConfig], ...] = (
    ("baseline", SolverConfig()),
    ("ferrari_lagrange_only", SolverConfig(force_variant="ferrari_lagrange")),
    ("classical_only", SolverConfig(force_variant="classical")),
    ("no_reindex", SolverConfig(reindex_enabled=False)),
    ("d3_s12", SolverConfig(d3_source="s12")),
    ("d3_s13", SolverConfig(d3_source="s13")),
)


def run_ablation(
    spec: TrialSpec, trials: int, threads: int = 1
) -> dict[str, AggregateReport]:
    """Run the benchmark once per ablation column, same seed throughout."""
    return {
        name: run_benchmark(spec, trials, config=cfg, threads=threads)
        for name, cfg in ABLATION_VARIANTS
    }
