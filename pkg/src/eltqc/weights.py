"""Convex trajectory weights fitted to a reference population series.

At each time the model population is ``p . w`` with ``w`` on the probability
simplex, so the best attainable value is the reference clipped into
``[min p, max p]``.  The fit first attains that value exactly and then breaks
the (usually massive) degeneracy:

* ``reg > 0``: minimum-norm weights, the ``reg -> 0+`` limit of the ridge path;
* ``reg == 0``: a sparse solution with at most two nonzero weights.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .elt import PopulationSeries, WeightSchedule
from .exceptions import EmptyFamily, GridMismatch

DEFAULT_REG = 1e-8


def project_simplex(y):
    """Euclidean projection of ``y`` onto ``{w >= 0, sum w = 1}``."""
    y = np.asarray(y, dtype=float)
    u = np.sort(y)[::-1]
    css = np.cumsum(u) - 1.0
    idx = np.arange(1, y.size + 1)
    rho = np.nonzero(u - css / idx > 0)[0][-1]
    theta = css[rho] / (rho + 1.0)
    return np.maximum(y - theta, 0.0)


def _ties(p, value, tol):
    mask = np.abs(p - value) <= tol
    w = mask / mask.sum()
    return w


def _min_norm_slice(p, target, tol=1e-15):
    """Minimum-norm simplex weights with ``p . w == target`` (target inside the hull)."""
    lo, hi = p.min(), p.max()
    span = hi - lo
    if span <= tol or target >= hi - tol * max(1.0, span):
        return _ties(p, hi, tol) if span > tol else np.full(p.size, 1.0 / p.size)
    if target <= lo + tol * max(1.0, span):
        return _ties(p, lo, tol)
    # w(beta) = proj(-beta p) and p . w(beta) is nonincreasing in beta
    val = lambda b: p @ project_simplex(-b * p)
    a, b = -1.0, 1.0
    while val(a) < target:
        a *= 2
    while val(b) > target:
        b *= 2
    for _ in range(200):
        m = 0.5 * (a + b)
        if val(m) >= target:
            a = m
        else:
            b = m
        if b - a <= 1e-15 * max(1.0, abs(a)):
            break
    wa, wb = project_simplex(-a * p), project_simplex(-b * p)
    va, vb = p @ wa, p @ wb
    # linear blend of the bracket ends hits the target to rounding
    s = 0.0 if va == vb else (va - target) / (va - vb)
    return (1 - s) * wa + s * wb


def _sparse_slice(p, target):
    """Two-point interpolation between the nearest members below and above ``target``."""
    w = np.zeros(p.size)
    below = np.flatnonzero(p <= target)
    above = np.flatnonzero(p >= target)
    if below.size == 0 or above.size == 0:
        w[np.argmin(np.abs(p - target))] = 1.0
        return w
    i = below[np.argmax(p[below])]
    j = above[np.argmin(p[above])]
    if p[j] == p[i]:
        w[i] = 1.0
        return w
    s = (target - p[i]) / (p[j] - p[i])
    w[i] += 1 - s
    w[j] += s
    return w


def fit_slice(p, ref, reg=DEFAULT_REG):
    p = np.asarray(p, dtype=float)
    target = float(np.clip(ref, p.min(), p.max()))
    w = _min_norm_slice(p, target) if reg > 0 else _sparse_slice(p, target)
    w = np.maximum(w, 0.0)
    return w / w.sum()


def _excited(reference):
    if isinstance(reference, PopulationSeries):
        return reference.times, reference.excited
    return None, np.asarray(reference, dtype=float)


def _check_grid(P, ref, times, ref_times):
    if P.ndim != 2 or P.shape[1] == 0:
        raise EmptyFamily("trajectory populations need shape (n_times, n_trajectories >= 1)")
    if P.shape[0] != ref.size:
        raise GridMismatch(f"{P.shape[0]} population rows vs {ref.size} reference points")
    if times is not None and ref_times is not None and not np.allclose(times, ref_times):
        raise GridMismatch("trajectory and reference time grids differ")


def fit_weights(P, reference, reg=DEFAULT_REG, times=None, mode="per_time") -> WeightSchedule:
    """Weight schedule matching ``P[t] . w(t)`` to the reference excited population.

    ``P`` holds excited populations with shape ``(n_times, n_trajectories)``.
    ``mode="global"`` fits one weight vector shared by every time instead.
    """
    P = np.asarray(P, dtype=float)
    ref_times, ref = _excited(reference)
    _check_grid(P, ref, times, ref_times)
    grid = ref_times if ref_times is not None else (times if times is not None else np.arange(ref.size, dtype=float))
    if mode == "per_time":
        W = np.array([fit_slice(P[t], ref[t], reg) for t in range(ref.size)])
    elif mode == "global":
        W = np.tile(fit_global(P, ref, reg), (ref.size, 1))
    else:
        raise ValueError(f"unknown weight mode {mode!r}")
    return WeightSchedule(grid, W)


def fit_global(P, ref, reg=DEFAULT_REG, iters=20000, tol=1e-14):
    """One simplex weight vector minimizing ``||P w - ref||^2 + reg ||w||^2`` (accelerated projected gradient).

    A time-independent mix of monotone decays is itself monotone, so this mode
    cannot follow population revivals.
    """
    P = np.asarray(P, dtype=float)
    ref = np.asarray(ref, dtype=float)
    n = P.shape[1]
    A = P.T @ P + reg * np.eye(n)
    c = P.T @ ref
    step = 1.0 / max(np.linalg.eigvalsh(A)[-1], 1e-300)
    w = np.full(n, 1.0 / n)
    z, tk = w.copy(), 1.0
    for _ in range(iters):
        w_new = project_simplex(z - step * (A @ z - c))
        t_new = 0.5 * (1 + np.sqrt(1 + 4 * tk * tk))
        z = w_new + ((tk - 1) / t_new) * (w_new - w)
        done = np.max(np.abs(w_new - w)) < tol
        w, tk = w_new, t_new
        if done:
            break
    return w / w.sum()


@dataclass
class FitReport:
    times: np.ndarray
    residual: np.ndarray
    hull_min: np.ndarray
    hull_max: np.ndarray
    outside_hull: np.ndarray

    @property
    def max_residual(self) -> float:
        return float(np.max(np.abs(self.residual))) if self.residual.size else 0.0

    def to_json(self) -> dict:
        return {
            "times": [float(t) for t in self.times],
            "residual": [float(r) for r in self.residual],
            "hull_min": [float(x) for x in self.hull_min],
            "hull_max": [float(x) for x in self.hull_max],
            "outside_hull": [bool(f) for f in self.outside_hull],
            "max_abs_residual": self.max_residual,
            "any_outside_hull": bool(np.any(self.outside_hull)),
        }


def fit_report(schedule: WeightSchedule, P, reference) -> FitReport:
    """Per-time residual ``ref - P w`` plus hull bounds and an out-of-hull flag."""
    P = np.asarray(P, dtype=float)
    ref_times, ref = _excited(reference)
    _check_grid(P, ref, schedule.times, ref_times)
    if schedule.weights.shape != P.shape:
        raise GridMismatch("schedule and trajectory populations differ in shape")
    model = np.einsum("ti,ti->t", schedule.weights, P)
    lo, hi = P.min(axis=1), P.max(axis=1)
    outside = (ref < lo) | (ref > hi)
    return FitReport(schedule.times, ref - model, lo, hi, outside)
