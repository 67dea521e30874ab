"""Unfolding localization: recover a point from squared distances to anchors.

The cost J(x) = sum_i (||x - y_i||^2 - delta_i)^2 is a quartic with
possible local minima, so the solver runs a damped-Newton descent from
multiple starts (anchor centroid plus uniform samples in the anchor
bounding box) and keeps the best terminal point.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, replace

import numpy as np

from .core import ConfigError, IllPosedWarning, InputError, _frozen
from .funclearn import EstimatedDistanceMatrix


@dataclass(frozen=True)
class SolverOptions:
    restarts: int = 8
    max_iterations: int = 500
    gradient_tolerance: float = 1e-9  # relative: ||grad|| <= tol * (1 + |J|)
    initial_damping: float = 1e-3
    seed: int = 0

    def __post_init__(self):
        if self.restarts < 1:
            raise ConfigError(f"restarts must be >= 1, got {self.restarts}")
        if self.max_iterations < 1:
            raise ConfigError("max_iterations must be >= 1")
        if not (self.gradient_tolerance > 0 and self.initial_damping > 0):
            raise ConfigError("tolerances must be positive")


@dataclass(frozen=True)
class LocalizationResult:
    position: np.ndarray
    cost: float
    iterations: int
    winning_restart: int
    converged: bool
    well_posed: bool
    restart_costs: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "position", _frozen(self.position))
        object.__setattr__(self, "restart_costs", _frozen(self.restart_costs))


def unfolding_cost(x, anchors, delta) -> float:
    """Sum of squared residuals between squared distances and targets delta."""
    x = np.asarray(x, dtype=float)
    anchors = np.asarray(anchors, dtype=float)
    r = ((x - anchors) ** 2).sum(axis=1) - np.asarray(delta, dtype=float)
    return float((r**2).sum())


def unfolding_gradient(x, anchors, delta) -> np.ndarray:
    """Analytic gradient: sum_i 4 (||x - y_i||^2 - delta_i)(x - y_i)."""
    x = np.asarray(x, dtype=float)
    anchors = np.asarray(anchors, dtype=float)
    u = x - anchors
    r = (u**2).sum(axis=1) - np.asarray(delta, dtype=float)
    return 4.0 * (r[:, None] * u).sum(axis=0)


def _descend(anchors, delta, starts, opts):
    """Damped-Newton (Levenberg-style) descent, vectorized over restarts.

    Returns (positions, costs, iterations_used).  A restart freezes once
    its gradient meets the relative tolerance.
    """
    x = np.array(starts, dtype=float)
    n_restarts, q = x.shape
    eye = np.eye(q)
    lam = np.full(n_restarts, opts.initial_damping)
    # stalled restarts (no representable progress) are frozen so one bad
    # start cannot pin the whole batch at the iteration cap
    frozen = np.zeros(n_restarts, dtype=bool)

    def residuals(pts):
        u = pts[:, None, :] - anchors[None, :, :]
        r = (u**2).sum(axis=2) - delta[None, :]
        return u, r, (r**2).sum(axis=1)

    u, r, cost = residuals(x)
    iterations = 0
    for _ in range(opts.max_iterations):
        grad = 4.0 * (r[:, :, None] * u).sum(axis=1)
        gnorm = np.linalg.norm(grad, axis=1)
        active = ~frozen & (gnorm > opts.gradient_tolerance * (1.0 + np.abs(cost)))
        if not active.any():
            break
        iterations += 1
        hess = 4.0 * r.sum(axis=1)[:, None, None] * eye + 8.0 * np.matmul(
            u.transpose(0, 2, 1), u
        )
        scale = 1.0 + np.abs(hess).max(axis=(1, 2))
        a = hess + (lam * scale)[:, None, None] * eye
        try:
            step = np.linalg.solve(a, -grad[:, :, None])[:, :, 0]
        except np.linalg.LinAlgError:
            step = np.stack(
                [np.linalg.lstsq(a[i], -grad[i], rcond=None)[0] for i in range(n_restarts)]
            )
        trial = x + step
        _, _, trial_cost = residuals(trial)
        accept = active & (trial_cost < cost)
        improvement = cost - trial_cost
        step_norm = np.linalg.norm(step, axis=1)
        frozen |= accept & (
            (improvement <= 1e-14 * (1.0 + np.abs(cost)))
            | (step_norm <= 1e-12 * (1.0 + np.linalg.norm(x, axis=1)))
        )
        x[accept] = trial[accept]
        lam[accept] = np.maximum(lam[accept] * 0.3, 1e-12)
        rejected = active & ~accept
        lam[rejected] = lam[rejected] * 10.0
        frozen |= rejected & (lam > 1e12)
        if accept.any():
            u, r, cost = residuals(x)
    return x, cost, iterations


def _hessian(x, anchors, delta):
    u = x - anchors
    r = (u**2).sum(axis=1) - delta
    return 4.0 * r.sum() * np.eye(x.shape[0]) + 8.0 * (u.T @ u)


def _newton_polish(x, anchors, delta, cost, opts):
    """Drive the gradient down by pure Newton steps once cost decreases are
    no longer representable; accepted only while the cost does not rise."""
    grad = unfolding_gradient(x, anchors, delta)
    gnorm = np.linalg.norm(grad)
    for _ in range(8):
        if gnorm <= opts.gradient_tolerance * (1.0 + abs(cost)):
            break
        try:
            step = np.linalg.solve(_hessian(x, anchors, delta), -grad)
        except np.linalg.LinAlgError:
            break
        trial = x + step
        trial_cost = unfolding_cost(trial, anchors, delta)
        trial_grad = unfolding_gradient(trial, anchors, delta)
        trial_gnorm = np.linalg.norm(trial_grad)
        # ulp-level cost increases are rounding noise at this resolution
        if trial_cost > cost + 1e-12 * (1.0 + abs(cost)) or trial_gnorm >= gnorm:
            break
        x, cost, grad, gnorm = trial, trial_cost, trial_grad, trial_gnorm
    return x, cost, gnorm


def _starting_points(anchors, opts, rng):
    centroid = anchors.mean(axis=0)
    lo = anchors.min(axis=0)
    hi = anchors.max(axis=0)
    extra = rng.uniform(lo, hi, size=(opts.restarts - 1, anchors.shape[1]))
    return np.vstack([centroid[None, :], extra])


def unloc_localize(
    anchors,
    delta,
    opts: SolverOptions | None = None,
    column: int = 0,
) -> LocalizationResult:
    """Minimize the unfolding cost over multiple restarts.

    ``column`` keys the restart RNG stream so multi-target solves have
    independent but reproducible starts.
    """
    opts = opts or SolverOptions()
    anchors = np.atleast_2d(np.asarray(anchors, dtype=float))
    delta = np.asarray(delta, dtype=float).ravel()
    m, q = anchors.shape
    if m == 0:
        raise InputError("cannot localize with zero anchors")
    if delta.shape[0] != m:
        raise InputError(f"delta length {delta.shape[0]} != anchor count {m}")
    if not np.all(np.isfinite(delta)):
        raise InputError("delta entries must be finite")
    well_posed = m >= q + 1
    if not well_posed:
        warnings.warn(
            f"{m} anchors in {q}-D is below the well-posedness threshold {q + 1}",
            IllPosedWarning,
            stacklevel=2,
        )
    rng = np.random.default_rng([opts.seed, column])
    starts = _starting_points(anchors, opts, rng)
    points, costs, iterations = _descend(anchors, delta, starts, opts)
    for i in range(points.shape[0]):
        points[i], costs[i], _ = _newton_polish(
            points[i], anchors, delta, float(costs[i]), opts
        )
    winner = int(np.argmin(costs))  # ties break to the lowest restart index
    x_hat = points[winner]
    cost = float(costs[winner])
    grad_norm = np.linalg.norm(unfolding_gradient(x_hat, anchors, delta))
    converged = grad_norm <= opts.gradient_tolerance * (1.0 + abs(cost))
    return LocalizationResult(
        position=x_hat,
        cost=float(cost),
        iterations=iterations,
        winning_restart=winner,
        converged=bool(converged),
        well_posed=well_posed,
        restart_costs=costs,
    )


def localize_all(
    anchors,
    d_hat: EstimatedDistanceMatrix,
    opts: SolverOptions | None = None,
    square_distances: bool = True,
) -> list[LocalizationResult | None]:
    """Independent per-column solves of an estimated distance matrix.

    Distance entries are squared to form delta by default (the raw
    variant is kept behind ``square_distances=False`` for comparison);
    negative estimates become positive under squaring and are counted via
    ``EstimatedDistanceMatrix.negative_count`` upstream.  A failed column
    yields None without aborting the others.
    """
    opts = opts or SolverOptions()
    if d_hat.stage != "recalibrated":
        warnings.warn(
            f"localizing from stage {d_hat.stage!r} estimates", UserWarning, stacklevel=2
        )
    results: list[LocalizationResult | None] = []
    for j in range(d_hat.n_targets):
        d = d_hat.values[:, j]
        delta = d**2 if square_distances else d
        try:
            results.append(unloc_localize(anchors, delta, opts, column=j))
        except InputError:
            results.append(None)
    return results


def with_seed(opts: SolverOptions, seed: int) -> SolverOptions:
    return replace(opts, seed=int(seed))
