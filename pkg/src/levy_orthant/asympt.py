"""Asymptotic prediction for the hitting probability and empirical fit of its constant.

The prediction is ``P(tau(sG) < inf) ~ A0 * s**(-(d-1)/2) * exp(-s * D(G))``.
``A0`` is estimated from Monte Carlo records by weighted least squares on the
log scale: with ``y(s) = ln p(s) + s D(G) + (d-1)/2 ln s`` the model is
``y = ln A0 + slope * s`` and a correct asymptotic shape means ``slope == 0``.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .conditions import ConditionReport, check_conditions
from .errors import ConditionError, FitError
from .rates import DEFAULT_TOL, OrthantTarget, ToleranceProfile
from .sim.core import Z95, HitEstimate

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class AsymptoticFit:
    records: list
    a0_hat: float
    a0_ci95: tuple[float, float]
    shape_slope: float
    shape_slope_ci95: tuple[float, float]
    per_s_ratio: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "a0_hat": self.a0_hat,
            "a0_ci95": list(self.a0_ci95),
            "shape_slope": self.shape_slope,
            "shape_slope_ci95": list(self.shape_slope_ci95),
            "per_s_ratio": [[s, r] for s, r in self.per_s_ratio],
        }


@dataclass(frozen=True)
class ExponentFit:
    """Decay rate fitted to ``-ln p(s) - (d-1)/2 ln s`` as a linear function of ``s``."""

    slope: float
    slope_ci95: tuple[float, float]
    intercept: float
    std_err: float


def predict(model, target, s: float, report: Optional[ConditionReport] = None, tol: ToleranceProfile = DEFAULT_TOL):
    """Return ``(exp(-s D(G)), s**(-(d-1)/2), D(G))``; requires C3 to hold."""
    target = target if isinstance(target, OrthantTarget) else OrthantTarget(target)
    if report is None:
        report = check_conditions(model, target, tol)
    if report.c3.overall != "holds":
        raise ConditionError(f"condition C3 does not hold ({report.c3.overall}): {report.c3.reason}")
    d_of_g = report.d_of_g
    return math.exp(-s * d_of_g), s ** (-(model.dim - 1) / 2), d_of_g


def _usable(records: Sequence[HitEstimate]) -> list:
    kept = []
    for r in records:
        if r.p_hat > 0 and math.isfinite(r.std_err) and r.std_err > 0:
            kept.append(r)
        else:
            log.warning("excluding record at s=%g (p_hat=%g, std_err=%g)", r.s, r.p_hat, r.std_err)
    return kept


def _wls(x, y, w):
    """Weighted least squares of ``y`` on ``[1, x]`` with known inverse variances ``w``."""
    X = np.column_stack([np.ones_like(x), x])
    A = X.T @ (w[:, None] * X)
    if np.linalg.cond(A) > 1e12:
        raise FitError("degenerate design: need at least two distinct s values")
    cov = np.linalg.inv(A)
    beta = cov @ (X.T @ (w * y))
    return beta, cov


def _design(records, d_of_g, dim):
    s = np.array([r.s for r in records], dtype=float)
    p = np.array([r.p_hat for r in records], dtype=float)
    se = np.array([r.std_err for r in records], dtype=float)
    w = (p / se) ** 2  # delta method: Var(ln p) ~ (se / p)^2
    y = np.log(p) + s * d_of_g + 0.5 * (dim - 1) * np.log(s)
    return s, p, w, y


def fit_a0(records: Sequence[HitEstimate], d_of_g: float, dim: int) -> AsymptoticFit:
    usable = _usable(records)
    if len(usable) < 3:
        raise FitError(f"need at least 3 records with p_hat > 0 and finite std_err, got {len(usable)}")
    s, p, w, y = _design(usable, d_of_g, dim)
    beta, cov = _wls(s, y, w)
    se_int, se_slope = math.sqrt(cov[0, 0]), math.sqrt(cov[1, 1])
    a0 = math.exp(beta[0])
    ratios = [(float(si), float(pi / (si ** (-(dim - 1) / 2) * math.exp(-si * d_of_g)))) for si, pi in zip(s, p)]
    return AsymptoticFit(
        records=list(usable),
        a0_hat=a0,
        a0_ci95=(math.exp(beta[0] - Z95 * se_int), math.exp(beta[0] + Z95 * se_int)),
        shape_slope=float(beta[1]),
        shape_slope_ci95=(float(beta[1] - Z95 * se_slope), float(beta[1] + Z95 * se_slope)),
        per_s_ratio=ratios,
    )


def fit_exponent(records: Sequence[HitEstimate], dim: int) -> ExponentFit:
    """Fit the exponential decay rate of the records without assuming ``D(G)``."""
    usable = _usable(records)
    if len(usable) < 2:
        raise FitError("need at least 2 usable records")
    s, p, w, y = _design(usable, 0.0, dim)
    beta, cov = _wls(s, -y, w)
    se = math.sqrt(cov[1, 1])
    return ExponentFit(float(beta[1]), (float(beta[1] - Z95 * se), float(beta[1] + Z95 * se)), float(beta[0]), se)
