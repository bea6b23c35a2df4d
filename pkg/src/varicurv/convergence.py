"""Convergence harness: run the estimator over shape schedules and fit rates.

A schedule is a list of (sample size, neighbor query) rows over one analytic
shape.  For each row the harness samples the shape, optionally re-estimates
tangent planes from the (noisy) positions, runs the per-point pipeline, and
compares against the shape's exact curvatures.  Principal-curvature errors
are computed after aligning the arbitrary per-point sign of the estimate
with the ground truth.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ScheduleError
from .estimator import (
    STATUS_ISOLATED,
    NeighborQuery,
    curvature_report,
    estimate_masses,
    estimate_tangent_planes,
)
from .kernels import KernelPair, bump_profile, natural_kernel_pair
from .shapes import AnalyticShape
from .varifold import validate_cloud


@dataclass(frozen=True)
class ScheduleRow:
    n_points: int
    query: NeighborQuery


@dataclass(frozen=True)
class ConvergenceSchedule:
    """Shape, rows, and sampling knobs for a convergence run.

    Rows must have strictly increasing sample sizes; fixed-radius rows must
    have strictly decreasing radii (k-mode radii shrink automatically).
    """

    shape: AnalyticShape
    rows: tuple[ScheduleRow, ...]
    noise_sigma: float = 0.0
    tangent_mode: str = "exact"
    mass_mode: str = "uniform"
    n_mass: int = 8
    seed: int = 0

    def __post_init__(self):
        sizes = [row.n_points for row in self.rows]
        if any(b <= a for a, b in zip(sizes, sizes[1:])):
            raise ScheduleError("sample sizes must increase strictly")
        radii = [row.query.epsilon for row in self.rows if row.query.mode == "radius"]
        if any(b >= a for a, b in zip(radii, radii[1:])):
            raise ScheduleError("fixed radii must decrease strictly")
        if self.tangent_mode not in ("exact", "estimated"):
            raise ScheduleError(f"unknown tangent mode {self.tangent_mode!r}")


def relative_errors(estimated: np.ndarray, exact: np.ndarray) -> np.ndarray:
    """|est - exact| / |exact|, falling back to absolute error near zero."""
    exact = np.asarray(exact, dtype=float)
    denom = np.where(np.abs(exact) > 1e-8, np.abs(exact), 1.0)
    return np.abs(np.asarray(estimated, dtype=float) - exact) / denom


def aligned_kappa_errors(k_est: np.ndarray, k_exact: np.ndarray) -> np.ndarray:
    """Per-point, per-component principal curvature errors.

    The estimator's normal orientation is arbitrary, so each point's
    estimate is flipped to whichever global sign better matches the exact
    trace before sorting both descending and comparing componentwise.
    """
    k_est = np.sort(np.asarray(k_est, dtype=float), axis=1)[:, ::-1]
    k_exact = np.sort(np.asarray(k_exact, dtype=float), axis=1)[:, ::-1]
    flip = (k_est.sum(axis=1) * k_exact.sum(axis=1)) < 0.0
    k_aligned = np.where(flip[:, None], -k_est[:, ::-1], k_est)
    return relative_errors(k_aligned, k_exact)


def fit_loglog_slope(x, y) -> float:
    """Least-squares slope of log(y) against log(x)."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    good = (x > 0) & (y > 0)
    if good.sum() < 2:
        raise ValueError("need at least two positive samples to fit a slope")
    return float(np.polyfit(np.log(x[good]), np.log(y[good]), 1)[0])


@dataclass
class RowResult:
    """Error statistics of one schedule row (medians and 90th percentiles)."""

    n_points: int
    eps_median: float
    kappa_median: np.ndarray
    kappa_p90: np.ndarray
    mean_norm_median: float
    mean_norm_p90: float
    gauss_median: float
    gauss_p90: float
    n_warnings: int
    aperp_median: float | None = None
    aperp_p90: float | None = None
    kappa_median_averaged: np.ndarray | None = None


@dataclass
class ConvergenceResult:
    rows: list[RowResult] = field(default_factory=list)

    def eps_values(self) -> np.ndarray:
        return np.array([r.eps_median for r in self.rows])

    def kappa_medians(self) -> np.ndarray:
        return np.array([r.kappa_median for r in self.rows])

    def aperp_slope(self) -> float:
        errs = np.array([r.aperp_median for r in self.rows], dtype=float)
        return fit_loglog_slope(self.eps_values(), errs)

    def table(self) -> str:
        lines = ["     N    eps_med   kappa_med            |H|_med    gauss_med  warn"]
        for r in self.rows:
            kstr = " ".join(f"{v:.3e}" for v in r.kappa_median)
            lines.append(
                f"{r.n_points:>6d}  {r.eps_median:.4f}  {kstr:<20s} "
                f"{r.mean_norm_median:.3e}  {r.gauss_median:.3e}  {r.n_warnings}"
            )
        return "\n".join(lines)


def _row_cloud(schedule: ConvergenceSchedule, row: ScheduleRow, row_id: int):
    sample = schedule.shape.sample(
        row.n_points, noise_sigma=schedule.noise_sigma,
        seed=schedule.seed + 1000 * row_id,
    )
    cloud = sample.cloud
    ambiguous = None
    if schedule.tangent_mode == "estimated":
        est = estimate_tangent_planes(cloud.positions, row.query, cloud.dim_d)
        cloud = validate_cloud(
            cloud.positions, est.planes, cloud.masses, cloud.dim_d
        )
        ambiguous = est.ambiguous
    if schedule.mass_mode != "uniform":
        masses = estimate_masses(
            cloud.positions, schedule.n_mass, cloud.dim_d, mode=schedule.mass_mode
        )
        cloud = validate_cloud(cloud.positions, cloud.planes, masses, cloud.dim_d)
    return cloud, sample, ambiguous


def run_convergence(
    schedule: ConvergenceSchedule,
    kernels: KernelPair | None = None,
    collect_aperp_error: bool = False,
    compare_variants: bool = False,
) -> ConvergenceResult:
    """Execute a schedule and collect error statistics per row.

    ``collect_aperp_error`` additionally compares the orthogonal curvature
    tensor against the shape's exact gradient-form tensor (shapes that
    provide one), enabling a log-log rate fit.  ``compare_variants`` also
    runs the averaged-direction pipeline for a paired comparison.
    """
    shape = schedule.shape
    if kernels is None:
        kernels = natural_kernel_pair(bump_profile(), shape.dim_d, shape.ambient_n)
    if collect_aperp_error and not hasattr(shape, "gradient_tensor"):
        raise ScheduleError(
            f"shape {shape.name!r} has no exact gradient-form tensor to compare"
        )
    result = ConvergenceResult()
    for row_id, row in enumerate(schedule.rows):
        cloud, sample, ambiguous = _row_cloud(schedule, row, row_id)
        report = curvature_report(
            cloud, row.query, kernels=kernels, ambiguous=ambiguous,
            collect_a_perp=collect_aperp_error,
        )
        ok = report.status != STATUS_ISOLATED
        ok &= np.all(np.isfinite(report.kappas), axis=1)
        k_err = aligned_kappa_errors(report.kappas[ok], sample.kappas[ok])
        h_err = relative_errors(
            report.mean_norm[ok], np.linalg.norm(sample.mean_vectors[ok], axis=1)
        )
        g_err = relative_errors(report.gauss[ok], sample.gauss[ok])
        row_res = RowResult(
            n_points=row.n_points,
            eps_median=float(np.median(report.eps)),
            kappa_median=np.median(k_err, axis=0),
            kappa_p90=np.percentile(k_err, 90, axis=0),
            mean_norm_median=float(np.median(h_err)),
            mean_norm_p90=float(np.percentile(h_err, 90)),
            gauss_median=float(np.median(g_err)),
            gauss_p90=float(np.percentile(g_err, 90)),
            n_warnings=report.n_warnings,
        )
        if collect_aperp_error:
            exact = np.stack([shape.gradient_tensor(p) for p in sample.base_points])
            diffs = np.max(np.abs(report.a_perp - exact), axis=(1, 2, 3))
            diffs = diffs[ok & np.isfinite(diffs)]
            row_res.aperp_median = float(np.median(diffs))
            row_res.aperp_p90 = float(np.percentile(diffs, 90))
        if compare_variants:
            alt = curvature_report(cloud, row.query, kernels=kernels,
                                   variant="averaged")
            alt_ok = ok & np.all(np.isfinite(alt.kappas), axis=1)
            alt_err = aligned_kappa_errors(alt.kappas[alt_ok], sample.kappas[alt_ok])
            row_res.kappa_median_averaged = np.median(alt_err, axis=0)
        result.rows.append(row_res)
    return result
