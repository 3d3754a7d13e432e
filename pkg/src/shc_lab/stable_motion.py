"""One-dimensional symmetric alpha-stable motion: increments, interval
exits, and the mean running supremum.

Conventions: the process has characteristic function
E[exp(i xi Y_t)] = exp(-t |xi|^alpha); at alpha = 2 this is a Brownian
motion whose increment over dt has variance 2 dt.

The exit-time scheme is a fixed-step Euler walk on exact increments.
For alpha = 2 it misses intra-step boundary crossings and so
overestimates exit times; for alpha < 2 jump exits dominate and the
bias is milder.  No exact-crossing correction is applied; tests carry
a bias band calibrated by step-halving instead.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ValidationError
from .seeding import derive_rng

__all__ = [
    "sample_symmetric_stable",
    "sample_increment",
    "simulate_exit",
    "walk_exit_steps",
    "SupEstimate",
    "estimate_sup_mean",
]


def _check_alpha(alpha: float) -> None:
    if not 0.0 < alpha <= 2.0:
        raise ValidationError(f"stability index must be in (0, 2], got {alpha}")


def sample_symmetric_stable(rng: np.random.Generator, alpha: float, size) -> np.ndarray:
    """Standard symmetric alpha-stable variates, cf exp(-|xi|^alpha).

    Chambers-Mallows-Stuck with U ~ Uniform(-pi/2, pi/2), W ~ Exp(1);
    alpha = 1 reduces to tan(U) (standard Cauchy) and alpha = 2 to a
    centered normal with variance 2.
    """
    _check_alpha(alpha)
    if alpha == 2.0:
        return math.sqrt(2.0) * rng.standard_normal(size)
    u = rng.uniform(-math.pi / 2.0, math.pi / 2.0, size)
    if alpha == 1.0:
        return np.tan(u)
    w = rng.exponential(1.0, size)
    t1 = np.sin(alpha * u) / np.cos(u) ** (1.0 / alpha)
    t2 = (np.cos((1.0 - alpha) * u) / w) ** ((1.0 - alpha) / alpha)
    return t1 * t2


def sample_increment(alpha: float, dt: float, seed: int) -> float:
    """Single increment over time dt; deterministic given seed."""
    if dt <= 0.0:
        raise ValidationError(f"dt must be > 0, got {dt}")
    return float(dt ** (1.0 / alpha) * sample_symmetric_stable(derive_rng(seed), alpha, None))


def walk_exit_steps(
    alpha: float,
    a: float,
    b: float,
    x0: np.ndarray,
    scales: np.ndarray,
    n_steps: int,
    rng: np.random.Generator,
) -> np.ndarray:
    """Vectorized Euler walk; returns the 1-based step index of first exit.

    ``scales`` is the per-path increment scale dt_i^(1/alpha) (scalar
    broadcast allowed).  Paths that never leave (a, b) get the sentinel
    n_steps + 1.  A jump landing outside [a, b] counts as an exit (zero
    exterior condition).

    One standard-stable column is drawn per step for *all* paths, alive
    or not, so the stream layout is identical across different horizons
    and step counts: common random numbers by construction.
    """
    n = x0.shape[0]
    x = x0.astype(float).copy()
    exit_step = np.full(n, n_steps + 1, dtype=np.int64)
    alive = np.ones(n, dtype=bool)
    scales = np.asarray(scales, dtype=float)
    for j in range(1, n_steps + 1):
        z = sample_symmetric_stable(rng, alpha, n)
        inc = scales * z
        x[alive] += inc[alive]
        out = alive & ~((x > a) & (x < b))
        exit_step[out] = j
        alive &= ~out
        if not alive.any():
            # keep consuming columns? no: remaining t-horizons only ask
            # whether exit_step exceeds them, already determined.
            break
    return exit_step


def simulate_exit(
    alpha: float,
    interval: tuple[float, float],
    x0: float,
    dt: float,
    t_max: float,
    seed: int,
) -> tuple[bool, float]:
    """Walk one path until it leaves ``interval`` or reaches ``t_max``.

    Returns (exited, tau_estimate); tau is resolved to the step grid,
    and equals t_max when the path survives.
    """
    a, b = interval
    if not a < x0 < b:
        raise ValidationError(f"x0={x0} must lie inside ({a}, {b})")
    if dt <= 0.0 or t_max <= 0.0:
        raise ValidationError("dt and t_max must be > 0")
    n_steps = int(math.ceil(t_max / dt))
    rng = derive_rng(seed)
    step = walk_exit_steps(
        alpha, a, b, np.array([x0]), np.float64(dt ** (1.0 / alpha)), n_steps, rng
    )[0]
    if step > n_steps:
        return False, t_max
    return True, float(step * dt)


@dataclass(frozen=True)
class SupEstimate:
    """Monte Carlo estimate of E[sup_{s<=1} Y_s] with its 95% CI half width.

    The grid maximum underestimates the true supremum; the bias is
    monotone downward in the step count and is reported separately by
    step-doubling in the tests, not folded into the CI.
    """

    value: float
    ci_halfwidth: float
    n_paths: int
    n_steps: int


def estimate_sup_mean(
    alpha: float,
    n_paths: int,
    n_steps: int,
    seed: int,
    chunk: int = 4096,
) -> SupEstimate:
    """Estimate E[sup_{s<=1} Y_s] on an n_steps grid over [0, 1].

    Meaningful for alpha in (1, 2) where the supremum has finite mean;
    alpha = 2 is allowed as a calibration diagnostic against the
    reflection principle E|N(0, 2)| = 2/sqrt(pi).
    """
    _check_alpha(alpha)
    if alpha <= 1.0:
        raise ValidationError("running supremum has infinite mean for alpha <= 1")
    if n_paths < 2 or n_steps < 1:
        raise ValidationError("need n_paths >= 2 and n_steps >= 1")
    rng = derive_rng(seed)
    scale = (1.0 / n_steps) ** (1.0 / alpha)
    total = 0.0
    total_sq = 0.0
    done = 0
    while done < n_paths:
        m = min(chunk, n_paths - done)
        z = sample_symmetric_stable(rng, alpha, (n_steps, m))
        sup = np.maximum(np.cumsum(z, axis=0).max(axis=0), 0.0) * scale
        total += float(sup.sum())
        total_sq += float((sup * sup).sum())
        done += m
    mean = total / n_paths
    var = max(total_sq / n_paths - mean * mean, 0.0)
    return SupEstimate(
        value=mean,
        ci_halfwidth=1.96 * math.sqrt(var / n_paths),
        n_paths=n_paths,
        n_steps=n_steps,
    )
