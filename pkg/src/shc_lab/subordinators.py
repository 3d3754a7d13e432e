"""Laplace-exponent algebra, subordinator path sampling, and
inverse-subordinator evaluation.

The supported Laplace exponents are the three concrete families the
analysis needs (stable, tempered stable, sum of two stables) plus a
degenerate pure-drift exponent used as a test double.  Each exponent
knows its regular-variation indices at 0+ and at infinity, which drive
the asymptotic laws downstream.

The inverse process E_t = inf{u : D_u > t} is sampled two ways: by
first passage across a discretized path, and (for the stable family)
exactly through the identity E_t =d (t / D_1)^beta.  Expectations
E[g(E_t)] for the stable family are computed by deterministic nested
quadrature in the Kanter representation
E_t =d t^beta (W / A(U))^(1-beta), U ~ Uniform(0, pi), W ~ Exp(1).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Union

import numpy as np
from scipy.integrate import quad

from .errors import HorizonError, RejectionBudgetError, ValidationError
from .seeding import derive_rng
from .special import TransformFunction, laplace_invert, mittag_leffler

__all__ = [
    "StableExponent",
    "TemperedStableExponent",
    "SumOfStablesExponent",
    "DriftExponent",
    "LaplaceExponent",
    "sample_positive_stable",
    "sample_unit_stable_subordinator",
    "sample_increments",
    "SubordinatorPath",
    "sample_path",
    "FirstPassageTime",
    "inverse_at",
    "sample_inverse_stable",
    "inverse_time_transform",
    "expected_laplace",
    "QuadratureResult",
    "expected_functional",
    "kanter_angular",
]

_REJECTION_CAP = 1_000_000


# ---------------------------------------------------------------------------
# Laplace exponents
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class StableExponent:
    """phi(lam) = lam^beta, the beta-stable subordinator."""

    beta: float

    def __post_init__(self):
        if not 0.0 < self.beta < 1.0:
            raise ValidationError(f"stable index must be in (0, 1), got {self.beta}")

    def __call__(self, lam):
        return lam ** self.beta

    @property
    def index_at_zero(self) -> float:
        return self.beta

    @property
    def index_at_infinity(self) -> float:
        return self.beta


@dataclass(frozen=True)
class TemperedStableExponent:
    """phi(lam) = (lam + kappa)^beta - kappa^beta, tempered stable."""

    beta: float
    kappa: float

    def __post_init__(self):
        if not 0.0 < self.beta < 1.0:
            raise ValidationError(f"stable index must be in (0, 1), got {self.beta}")
        if self.kappa <= 0.0:
            raise ValidationError(f"tempering rate must be > 0, got {self.kappa}")

    def __call__(self, lam):
        return (lam + self.kappa) ** self.beta - self.kappa ** self.beta

    @property
    def index_at_zero(self) -> float:
        return 1.0

    @property
    def index_at_infinity(self) -> float:
        return self.beta


@dataclass(frozen=True)
class SumOfStablesExponent:
    """phi(lam) = lam^a + lam^b, sum of independent stable subordinators.

    Requires 0 < a < b <= 1.  (a = 0 would force phi(0+) = 1, breaking
    the defining property phi(0+) = 0 of a subordinator without
    killing.)  b = 1 contributes a unit drift.
    """

    a: float
    b: float

    def __post_init__(self):
        if not 0.0 < self.a < self.b <= 1.0:
            raise ValidationError(f"need 0 < a < b <= 1, got a={self.a}, b={self.b}")

    def __call__(self, lam):
        return lam ** self.a + lam ** self.b

    @property
    def index_at_zero(self) -> float:
        return self.a

    @property
    def index_at_infinity(self) -> float:
        return self.b


@dataclass(frozen=True)
class DriftExponent:
    """phi(lam) = lam: deterministic time D_t = t.

    Degenerate test double (the Levy measure is zero, not infinite);
    useful because every formula collapses to the identity time change.
    """

    def __call__(self, lam):
        return lam

    @property
    def index_at_zero(self) -> float:
        return 1.0

    @property
    def index_at_infinity(self) -> float:
        return 1.0


LaplaceExponent = Union[
    StableExponent, TemperedStableExponent, SumOfStablesExponent, DriftExponent
]


# ---------------------------------------------------------------------------
# Samplers
# ---------------------------------------------------------------------------


def sample_positive_stable(rng: np.random.Generator, beta: float, size) -> np.ndarray:
    """One-sided beta-stable variates with Laplace transform exp(-lam^beta).

    Kanter's form of the Chambers-Mallows-Stuck construction:
    with U ~ Uniform(0, pi) and W ~ Exp(1),

        S = sin(beta U) / sin(U)^(1/beta)
            * (sin((1-beta) U) / W)^((1-beta)/beta).
    """
    if not 0.0 < beta < 1.0:
        raise ValidationError(f"stable index must be in (0, 1), got {beta}")
    u = rng.uniform(0.0, math.pi, size)
    w = rng.exponential(1.0, size)
    return (
        np.sin(beta * u)
        / np.sin(u) ** (1.0 / beta)
        * (np.sin((1.0 - beta) * u) / w) ** ((1.0 - beta) / beta)
    )


def sample_unit_stable_subordinator(beta: float, seed: int) -> float:
    """Single variate D_1 of the beta-stable subordinator; deterministic in seed."""
    return float(sample_positive_stable(derive_rng(seed), beta, None))


def _sample_tempered(
    rng: np.random.Generator, beta: float, kappa: float, delta: float, size: int
) -> np.ndarray:
    """Tempered-stable increments over operational time ``delta``.

    Exponential tilting by rejection: propose stable increments,
    accept with probability exp(-kappa * X).  Overall acceptance is
    exp(-delta * kappa^beta), so large delta is chopped into pieces
    with acceptance around exp(-0.7) each; the result is exact in
    distribution by infinite divisibility.
    """
    budget = delta * kappa ** beta
    n_chunks = max(1, math.ceil(budget / 0.7))
    piece = delta / n_chunks
    scale = piece ** (1.0 / beta)
    out = np.zeros(size)
    for _ in range(n_chunks):
        pending = np.arange(size)
        vals = np.empty(size)
        rejections = 0
        while pending.size:
            cand = scale * sample_positive_stable(rng, beta, pending.size)
            accept = rng.uniform(size=pending.size) <= np.exp(-kappa * cand)
            vals[pending[accept]] = cand[accept]
            rejections += int(np.count_nonzero(~accept))
            if rejections > _REJECTION_CAP:
                raise RejectionBudgetError(
                    f"tempering rejection cap exceeded (kappa={kappa}, delta={delta})"
                )
            pending = pending[~accept]
        out += vals
    return out


def sample_increments(
    spec: LaplaceExponent, delta: float, size: int, rng: np.random.Generator
) -> np.ndarray:
    """i.i.d. increments D_{delta} for the given exponent, exact in distribution."""
    if delta <= 0.0:
        raise ValidationError(f"delta must be > 0, got {delta}")
    if isinstance(spec, StableExponent):
        return delta ** (1.0 / spec.beta) * sample_positive_stable(rng, spec.beta, size)
    if isinstance(spec, TemperedStableExponent):
        return _sample_tempered(rng, spec.beta, spec.kappa, delta, size)
    if isinstance(spec, SumOfStablesExponent):
        first = delta ** (1.0 / spec.a) * sample_positive_stable(rng, spec.a, size)
        if spec.b == 1.0:
            return first + delta
        return first + delta ** (1.0 / spec.b) * sample_positive_stable(rng, spec.b, size)
    if isinstance(spec, DriftExponent):
        return np.full(size, delta)
    raise ValidationError(f"unsupported Laplace exponent {spec!r}")


# ---------------------------------------------------------------------------
# Paths and first passage
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SubordinatorPath:
    """Discretized subordinator path on the operational-time grid k*delta_u.

    values[k] = D_{k delta_u}, values[0] = 0, strictly increasing.
    """

    delta_u: float
    values: np.ndarray
    horizon: float
    seed: int

    def __post_init__(self):
        if self.values[0] != 0.0:
            raise ValidationError("path must start at 0")
        if not np.all(np.diff(self.values) > 0.0):
            raise ValidationError("path values must be strictly increasing")


def sample_path(
    spec: LaplaceExponent, horizon: float, delta_u: float, seed: int
) -> SubordinatorPath:
    """Sample a path until it first exceeds ``horizon`` (physical time)."""
    if horizon <= 0.0 or delta_u <= 0.0:
        raise ValidationError("horizon and delta_u must be > 0")
    rng = derive_rng(seed)
    block = max(64, int(math.ceil(horizon / max(delta_u, 1e-12))) // 8 + 1)
    chunks = [np.zeros(1)]
    total = 0.0
    while total <= horizon:
        inc = sample_increments(spec, delta_u, block, rng)
        # reject floating-point ties (zero increments) and resample
        bad = inc <= 0.0
        while np.any(bad):
            inc[bad] = sample_increments(spec, delta_u, int(bad.sum()), rng)
            bad = inc <= 0.0
        chunks.append(inc)
        total += float(inc.sum())
    values = np.concatenate(chunks).cumsum()
    return SubordinatorPath(delta_u=delta_u, values=values, horizon=horizon, seed=seed)


@dataclass(frozen=True)
class FirstPassageTime:
    """E_t located on a path grid; exact value lies in (value - bracket, value]."""

    t: float
    value: float
    bracket: float


def inverse_at(path: SubordinatorPath, t: float) -> FirstPassageTime:
    """First passage E_t = inf{u : D_u > t} by binary search on the grid."""
    if t >= path.values[-1]:
        raise HorizonError(f"t={t} is beyond the sampled path (max {path.values[-1]})")
    k = int(np.searchsorted(path.values, t, side="right"))
    return FirstPassageTime(t=t, value=k * path.delta_u, bracket=path.delta_u)


def sample_inverse_stable(beta: float, t: float, rng: np.random.Generator, size=None):
    """Exact sample of E_t for the inverse beta-stable subordinator.

    Uses E_t =d (t / D_1)^beta, a consequence of self-similarity; the
    test suite validates it against the first-passage sampler.
    """
    if t <= 0.0:
        raise ValidationError(f"t must be > 0, got {t}")
    s = sample_positive_stable(rng, beta, size)
    return (t / s) ** beta


# ---------------------------------------------------------------------------
# Laplace functionals of the inverse process
# ---------------------------------------------------------------------------


def inverse_time_transform(spec: LaplaceExponent, a: float) -> TransformFunction:
    """Laplace transform (in t) of t -> E[exp(-a E_t)]:

        F(s) = phi(s) / (s (phi(s) + a)),  s > 0.

    The original function is bounded by 1, recorded in the transform's
    sup bound.
    """
    if a <= 0.0:
        raise ValidationError(f"a must be > 0, got {a}")

    def evaluator(s):
        ph = spec(s)
        return ph / (s * (ph + a))

    return TransformFunction(evaluator=evaluator, s_min=0.0, sup_bound=1.0)


def expected_laplace(
    spec: LaplaceExponent, a: float, t: float, tol: float = 1.0e-9
) -> float:
    """E[exp(-a E_t)] for the inverse subordinator of ``spec``.

    Stable exponents route to the Mittag-Leffler closed form
    E_beta(-a t^beta); the drift double gives exp(-a t); everything
    else goes through numerical inversion of the double Laplace
    transform.
    """
    if a <= 0.0 or t <= 0.0:
        raise ValidationError("a and t must be > 0")
    if isinstance(spec, StableExponent):
        return mittag_leffler(spec.beta, -a * t ** spec.beta)
    if isinstance(spec, DriftExponent):
        return math.exp(-a * t)
    return laplace_invert(inverse_time_transform(spec, a), t, tol=tol)


# ---------------------------------------------------------------------------
# E[g(E_t)] by deterministic quadrature (stable family)
# ---------------------------------------------------------------------------

# exp(-w) contributes nothing representable beyond this width
_W_SUPPORT = 800.0


def kanter_angular(u: float, beta: float) -> float:
    """Zolotarev's angular function A(u) in the Kanter representation."""
    return (
        math.sin(beta * u) ** (beta / (1.0 - beta))
        * math.sin((1.0 - beta) * u)
        / math.sin(u) ** (1.0 / (1.0 - beta))
    )


@dataclass(frozen=True)
class QuadratureResult:
    value: float
    error: float

    def __float__(self) -> float:
        return self.value


def expected_functional(
    beta: float,
    t: float,
    g: Callable[[float], float],
    n_quadrature: int = 200,
    lower: float = 0.0,
    upper: float = math.inf,
) -> QuadratureResult:
    """E[g(E_t); lower < E_t <= upper] for the inverse beta-stable time change.

    Integrates g(t^beta (w / A(u))^(1-beta)) e^-w over the Kanter
    variables (u, w); the region restriction on E_t maps to exact
    w-limits per u-node, so indicator weights never appear as
    integrand jumps.  ``n_quadrature`` caps the adaptive subdivision
    of each level.
    """
    if not 0.0 < beta < 1.0:
        raise ValidationError(f"beta must be in (0, 1), got {beta}")
    if t <= 0.0:
        raise ValidationError(f"t must be > 0, got {t}")
    if not 0.0 <= lower < upper:
        raise ValidationError(f"need 0 <= lower < upper, got [{lower}, {upper}]")
    tb = t ** beta
    pw = 1.0 - beta
    inv = 1.0 / pw
    inner_err_max = 0.0

    def inner(u: float) -> float:
        nonlocal inner_err_max
        A = kanter_angular(u, beta)
        wlo = 0.0 if lower <= 0.0 else A * (lower / tb) ** inv
        whi = math.inf if upper == math.inf else A * (upper / tb) ** inv
        if wlo > 745.0:
            return 0.0
        width = min(whi - wlo, _W_SUPPORT)

        def f(v: float) -> float:
            return g(tb * ((v + wlo) / A) ** pw) * math.exp(-v)

        val, err = quad(f, 0.0, width, epsabs=1e-14, epsrel=1e-12, limit=n_quadrature)
        inner_err_max = max(inner_err_max, err)
        return math.exp(-wlo) * val

    val, outer_err = quad(inner, 0.0, math.pi, epsabs=1e-13, epsrel=1e-11, limit=n_quadrature)
    if not math.isfinite(val):
        raise ValidationError("integrand is not integrable for this g")
    return QuadratureResult(value=val / math.pi, error=(outer_err + inner_err_max) / math.pi)
