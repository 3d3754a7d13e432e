"""Interval domains, Dirichlet eigen data, and certified eigen-series sums.

Only two pieces of eigen data enter any heat-content formula: the
eigenvalues lambda_n and the squared eigenfunction masses
m_n^2 = (int_Omega psi_n)^2.  Exact pairs are available at alpha = 2
(Dirichlet Laplacian sine basis on an interval); fractional eigenpairs
are not approximated here but can be supplied from a file.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Callable

import numpy as np

from .errors import TruncationBudgetError, ValidationError

__all__ = [
    "IntervalDomain",
    "EigenSystem",
    "bm_interval_eigensystem",
    "SeriesValue",
    "weighted_series",
    "load_eigensystem",
    "save_eigensystem",
]


@dataclass(frozen=True)
class IntervalDomain:
    """Bounded open interval (a, b); |boundary| = 2 in dimension one."""

    a: float
    b: float

    def __post_init__(self):
        if not self.a < self.b:
            raise ValidationError(f"need a < b, got ({self.a}, {self.b})")

    @property
    def volume(self) -> float:
        return self.b - self.a

    @property
    def boundary_measure(self) -> float:
        return 2.0


@dataclass(frozen=True)
class EigenSystem:
    """Truncated eigen data (lambda_n, m_n^2) with its declared total mass.

    The masses satisfy sum_n m_n^2 = |Omega| in the full series; partial
    sums must stay below the declared mass, which is what certifies the
    series tail bounds downstream.
    """

    lambdas: np.ndarray
    masses_sq: np.ndarray
    total_mass: float

    def __post_init__(self):
        lam = np.asarray(self.lambdas, dtype=float)
        msq = np.asarray(self.masses_sq, dtype=float)
        object.__setattr__(self, "lambdas", lam)
        object.__setattr__(self, "masses_sq", msq)
        if lam.ndim != 1 or lam.shape != msq.shape or lam.size == 0:
            raise ValidationError("lambdas and masses_sq must be equal-length 1-d arrays")
        if not lam[0] > 0.0:
            raise ValidationError("eigenvalues must be positive")
        if np.any(np.diff(lam) < 0.0):
            raise ValidationError("eigenvalues must be nondecreasing")
        if np.any(msq < 0.0):
            raise ValidationError("masses must be nonnegative")
        if self.total_mass <= 0.0:
            raise ValidationError("total mass must be positive")
        if float(msq.sum()) > self.total_mass * (1.0 + 1e-12):
            raise ValidationError("partial mass exceeds the declared total mass")

    @property
    def size(self) -> int:
        return int(self.lambdas.size)

    @property
    def partial_mass(self) -> float:
        return float(self.masses_sq.sum())


def bm_interval_eigensystem(domain: IntervalDomain, n_modes: int) -> EigenSystem:
    """Exact Dirichlet eigenpairs of the generator at alpha = 2 on an interval.

    With the convention exp(-t |xi|^2) the generator is the full
    Laplacian, so on (a, a + L):

        lambda_n = (n pi / L)^2,
        m_n^2    = 8 L / (n^2 pi^2) for odd n, 0 for even n.
    """
    if n_modes < 1:
        raise ValidationError(f"n_modes must be >= 1, got {n_modes}")
    L = domain.volume
    n = np.arange(1, n_modes + 1, dtype=float)
    lam = (n * math.pi / L) ** 2
    msq = np.where(n % 2 == 1, 8.0 * L / (n ** 2 * math.pi ** 2), 0.0)
    return EigenSystem(lambdas=lam, masses_sq=msq, total_mass=L)


@dataclass(frozen=True)
class SeriesValue:
    """A partial eigen sum together with its certified tail bound.

    The exact series value lies in [value, value + tail_bound] for
    nonnegative nonincreasing weights.
    """

    value: float
    tail_bound: float
    n_terms: int


def weighted_series(
    eig: EigenSystem,
    weight: Callable[[float], float],
    tol: float | None = None,
) -> SeriesValue:
    """sum_n weight(lambda_n) m_n^2 with a certified truncation bound.

    ``weight`` must be nonincreasing and nonnegative (checked on the
    evaluated sequence).  After the last evaluated term the tail obeys

        tail <= weight(lambda_N) * (total_mass - partial_mass_N).

    With ``tol`` given, evaluation stops early once the certificate
    drops below ``tol`` and raises :class:`TruncationBudgetError` if the
    budget runs out first.  Zero-mass modes never cost a weight
    evaluation (their certificate is inherited from the previous mode).
    """
    lam = eig.lambdas
    msq = eig.masses_sq
    total = 0.0
    mass_used = 0.0
    prev_w = math.inf
    cert = math.inf
    n_used = 0
    for i in range(eig.size):
        if msq[i] == 0.0:
            continue
        w = float(weight(float(lam[i])))
        if not math.isfinite(w) or w < 0.0:
            raise ValidationError(f"weight({lam[i]}) = {w} is not a finite nonnegative value")
        if w > prev_w * (1.0 + 1e-9) + 1e-12:
            raise ValidationError("weight must be nonincreasing in lambda")
        prev_w = w
        total += w * msq[i]
        mass_used += msq[i]
        n_used = i + 1
        cert = w * max(eig.total_mass - mass_used, 0.0)
        if tol is not None and cert <= tol:
            return SeriesValue(value=total, tail_bound=cert, n_terms=n_used)
    if tol is not None and cert > tol:
        raise TruncationBudgetError(
            f"tail certificate {cert} above tol={tol} after {eig.size} modes"
        )
    if not math.isfinite(cert):
        cert = eig.total_mass  # no finite weight evaluated (all masses zero)
    return SeriesValue(value=total, tail_bound=cert, n_terms=n_used)


# ---------------------------------------------------------------------------
# Eigen-table file format: '#mass <value>' header, 'lambda m_sq' rows,
# '#' starts a comment.
# ---------------------------------------------------------------------------


def save_eigensystem(eig: EigenSystem, path: str | Path) -> None:
    lines = [f"#mass {float(eig.total_mass)!r}"]
    lines += [f"{float(l)!r} {float(m)!r}" for l, m in zip(eig.lambdas, eig.masses_sq)]
    Path(path).write_text("\n".join(lines) + "\n")


def load_eigensystem(path: str | Path) -> EigenSystem:
    mass = None
    lams: list[float] = []
    msqs: list[float] = []
    for ln, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            body = line[1:].strip()
            if body.startswith("mass"):
                try:
                    mass = float(body.split()[1])
                except (IndexError, ValueError) as exc:
                    raise ValidationError(f"{path}:{ln}: malformed mass header") from exc
            continue
        parts = line.split()
        if len(parts) != 2:
            raise ValidationError(f"{path}:{ln}: expected 'lambda m_sq', got {line!r}")
        try:
            lams.append(float(parts[0]))
            msqs.append(float(parts[1]))
        except ValueError as exc:
            raise ValidationError(f"{path}:{ln}: non-numeric entry") from exc
    if mass is None:
        raise ValidationError(f"{path}: missing '#mass <value>' header")
    if not lams:
        raise ValidationError(f"{path}: no eigen rows")
    return EigenSystem(lambdas=np.array(lams), masses_sq=np.array(msqs), total_mass=mass)
