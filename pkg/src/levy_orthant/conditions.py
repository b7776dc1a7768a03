"""Certificates for the conditions under which the hitting asymptotics hold.

* C1: ``X(1)`` is non-lattice and not carried by an affine hyperplane.
* C2: the cumulant is finite on a nonempty open set.
* C3(r_G): the vertex ``r_G g`` is the most probable point of ``r_G G``, lies in
  the Cramér range, the normal ``N(r_G)`` is strictly positive and
  ``<E X(1), N(r_G)> < 0``.

C1 cannot be decided from parameters in general. :func:`check_c1` applies
sufficient structural rules and answers ``unknown`` when they are silent.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import LevyOrthantError
from .model import ExpAlong, GaussianJump, LevyModel, PointMasses, mean
from .rates import (
    DEFAULT_TOL,
    OrthantTarget,
    ToleranceProfile,
    _vertex_scale,
    legendre,
    orthant_mpp,
    orthant_scale_search,
)

HOLDS, VIOLATED, UNKNOWN = "holds", "violated", "unknown"


@dataclass(frozen=True)
class Verdict:
    verdict: str
    reason: str = ""

    def to_dict(self) -> dict:
        return {"verdict": self.verdict, "reason": self.reason}


@dataclass(frozen=True)
class C3Verdict:
    vertex_is_mpp: str
    rg_in_cramer_range: str
    normal_strictly_positive: str
    drift_inner_product_negative: str
    reason: str = ""

    @property
    def overall(self) -> str:
        subs = (
            self.vertex_is_mpp,
            self.rg_in_cramer_range,
            self.normal_strictly_positive,
            self.drift_inner_product_negative,
        )
        if all(v == HOLDS for v in subs):
            return HOLDS
        if any(v == VIOLATED for v in subs):
            return VIOLATED
        return UNKNOWN

    def to_dict(self) -> dict:
        return {
            "vertex_is_mpp": self.vertex_is_mpp,
            "rg_in_cramer_range": self.rg_in_cramer_range,
            "normal_strictly_positive": self.normal_strictly_positive,
            "drift_inner_product_negative": self.drift_inner_product_negative,
            "overall": self.overall,
            "reason": self.reason,
        }


@dataclass(frozen=True)
class ConditionReport:
    c1: Verdict
    c2: Verdict
    c3: C3Verdict
    r_g: float
    d_of_g: float
    normal: list = field(default_factory=list)
    mean_inner: float = math.nan

    @property
    def theorem_applies(self) -> bool:
        return self.c1.verdict == HOLDS and self.c2.verdict == HOLDS and self.c3.overall == HOLDS

    def to_dict(self) -> dict:
        return {
            "c1": self.c1.to_dict(),
            "c2": self.c2.to_dict(),
            "c3": self.c3.to_dict(),
            "r_g": _json_float(self.r_g),
            "d_of_g": _json_float(self.d_of_g),
            "normal": [_json_float(x) for x in self.normal],
            "mean_inner": _json_float(self.mean_inner),
        }


def _json_float(x):
    return float(x) if math.isfinite(x) else None


# ---------------------------------------------------------------------------
# C1 and C2
# ---------------------------------------------------------------------------


def _rank(vectors, d) -> int:
    if not vectors:
        return 0
    m = np.vstack([np.atleast_2d(v) for v in vectors])
    return int(np.linalg.matrix_rank(m, tol=1e-10 * max(1.0, float(np.abs(m).max()))))


def _basis(m: np.ndarray) -> list:
    """Columns spanning the range of the PSD matrix ``m``."""
    w, v = np.linalg.eigh(m)
    keep = w > 1e-10 * max(1.0, float(w.max(initial=0.0)))
    return [v[:, k] for k in np.flatnonzero(keep)]


def check_c1(model: LevyModel) -> Verdict:
    """Sufficient structural rules for the non-degeneracy condition C1.

    The affine hull of the support of ``X(1)`` is ``drift + W`` with ``W`` spanned
    by the Brownian covariance range and the support of the jump law. If ``W`` is
    a proper subspace, ``X(1)`` lives on a hyperplane and C1 fails. Otherwise
    non-lattice follows from an absolutely continuous component: Brownian range
    plus absolutely continuous jump directions spanning all dimensions.
    """
    d = model.dim
    gauss = _basis(model.cov)
    law = model.jumps.law if model.jumps is not None else None
    if isinstance(law, ExpAlong):
        jump_span, ac_dirs = [law.direction], [law.direction]
    elif isinstance(law, GaussianJump):
        jump_span = [law.mean_vec] + _basis(law.cov)
        ac_dirs = _basis(law.cov)
    elif isinstance(law, PointMasses):
        jump_span = [a for a, p in zip(law.atoms, law.probs) if p > 0 and np.any(a)]
        ac_dirs = []
    else:
        jump_span, ac_dirs = [], []

    span_rank = _rank(gauss + jump_span, d)
    if span_rank < d:
        if law is None:
            where = "drift + range(cov)"
        elif isinstance(law, ExpAlong) and not gauss:
            where = "the line drift*t + span(c) at t=1"
        else:
            where = "drift + span(range(cov), jump support)"
        return Verdict(
            VIOLATED,
            f"X(1) is supported on {where}, an affine subspace of dimension {span_rank} < {d}, "
            "contained in a hyperplane",
        )
    if len(gauss) == d:
        return Verdict(HOLDS, "Brownian covariance is positive definite")
    if _rank(gauss + ac_dirs, d) == d:
        return Verdict(
            HOLDS,
            "Brownian range and absolutely continuous jump directions span R^d, "
            "so X(1) has an absolutely continuous component",
        )
    return Verdict(
        UNKNOWN,
        "support spans R^d but the structural rules cannot exclude a lattice law",
    )


def check_c2(model: LevyModel) -> Verdict:
    if model.jumps is not None and isinstance(model.jumps.law, ExpAlong):
        law = model.jumps.law
        return Verdict(
            HOLDS,
            f"cumulant finite on the open half-space <c, lam> < {law.rate:g}, which contains 0",
        )
    return Verdict(HOLDS, "cumulant finite on all of R^d")


# ---------------------------------------------------------------------------
# C3
# ---------------------------------------------------------------------------


def _sign_verdict(x: float, tol: float) -> str:
    if x < -tol:
        return HOLDS
    if x > tol:
        return VIOLATED
    return UNKNOWN


def check_conditions(
    model: LevyModel,
    target,
    tol: ToleranceProfile = DEFAULT_TOL,
    assume_c1: bool = False,
) -> ConditionReport:
    """Evaluate C1, C2 and C3(r_G); never raises on degenerate input.

    When the vertex is not the MPP, ``r_g`` and ``d_of_g`` come from a direct
    minimisation of ``Lambda(r G) / r`` over ``r`` and ``normal`` is the conjugate
    of the face MPP, so the report shows which constraint is inactive.
    """
    target = target if isinstance(target, OrthantTarget) else OrthantTarget(target)
    if target.dim != model.dim:
        raise ValueError("target and model dimensions differ")
    c1 = check_c1(model)
    if assume_c1 and c1.verdict != HOLDS:
        c1 = Verdict(HOLDS, f"assumed by override; structural rules gave {c1.verdict}: {c1.reason}")
    c2 = check_c2(model)
    mu = mean(model)

    try:
        r, sol = _vertex_scale(model, target, tol)
    except LevyOrthantError as e:
        u = C3Verdict(UNKNOWN, UNKNOWN, UNKNOWN, UNKNOWN, reason=f"{type(e).__name__}: {e}")
        return ConditionReport(c1, c2, u, math.nan, math.nan, [], math.nan)

    try:
        mpp = orthant_mpp(model, target, r, tol)
    except LevyOrthantError as e:
        u = C3Verdict(UNKNOWN, UNKNOWN, UNKNOWN, UNKNOWN, reason=f"{type(e).__name__}: {e}")
        return ConditionReport(c1, c2, u, r, math.nan, sol.conjugate.tolist(), math.nan)

    if mpp.vertex_is_mpp and np.max(np.abs(sol.conjugate)) <= tol.root_tol:
        # the root is the trivial tilt: r g is the mean, so nothing decays
        c3 = C3Verdict(
            HOLDS,
            HOLDS if sol.in_cramer_range else VIOLATED,
            VIOLATED,
            VIOLATED,
            reason=f"r_G g = {np.round(r * target.g, 12).tolist()} is the mean of X(1); the tilt vanishes and D(G) = 0",
        )
        return ConditionReport(c1, c2, c3, r, 0.0, sol.conjugate.tolist(), 0.0)

    if mpp.vertex_is_mpp:
        normal = np.asarray(sol.conjugate)
        d_of_g = float(target.g @ normal)
        in_range = HOLDS if sol.in_cramer_range else VIOLATED
        pos = np.all(normal > tol.root_tol)
        if pos:
            positive = HOLDS
        elif np.any(normal < -tol.root_tol):
            positive = VIOLATED
        else:
            positive = UNKNOWN
        inner = float(mu @ normal)
        sign = _sign_verdict(inner, tol.root_tol)
        notes = []
        if positive == UNKNOWN:
            notes.append(f"normal {np.round(normal, 12).tolist()} has components within {tol.root_tol:g} of zero")
        if sign == UNKNOWN:
            notes.append(f"<E X(1), N(G)> = {inner:.3g} is within {tol.root_tol:g} of zero")
        c3 = C3Verdict(HOLDS, in_range, positive, sign, reason="; ".join(notes))
        return ConditionReport(c1, c2, c3, r, d_of_g, normal.tolist(), inner)

    # vertex is not the MPP: locate the true most probable scale for the report
    reason = (
        f"lam(r g) = {np.round(sol.conjugate, 12).tolist()} at r = {r:.6g} has a negative "
        "component, so the vertex is not the most probable point"
    )
    try:
        r_star, d_of_g, face = orthant_scale_search(model, target, tol)
        normal = np.asarray(face.normal)
        in_range = legendre(model, r_star * target.g, tol).in_cramer_range
    except LevyOrthantError as e:
        c3 = C3Verdict(VIOLATED, UNKNOWN, UNKNOWN, UNKNOWN, reason=f"{reason}; {e}")
        return ConditionReport(c1, c2, c3, r, math.nan, sol.conjugate.tolist(), math.nan)
    inner = float(mu @ normal)
    # zero components of a face normal are structural, not rounding noise
    positive = HOLDS if np.all(normal > tol.root_tol) else VIOLATED
    c3 = C3Verdict(
        VIOLATED,
        HOLDS if in_range else VIOLATED,
        positive,
        _sign_verdict(inner, tol.root_tol),
        reason=reason,
    )
    return ConditionReport(c1, c2, c3, r_star, d_of_g, normal.tolist(), inner)
