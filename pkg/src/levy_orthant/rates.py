"""First and second rate functions, most probable points and scales.

All quantities are derived from the cumulant ``K`` of the unit-time increment:

* ``Lambda(alpha) = sup_lam <alpha, lam> - K(lam)`` with maximiser ``lam(alpha)``
  (the conjugate point, solving ``grad K(lam) = alpha``);
* ``D(v) = inf_{u>0} u * Lambda(v / u)``;
* for a translated orthant ``G = g + Q+``, the scale ``r_G`` minimising
  ``Lambda(r G) / r`` and the normal ``N(r) = lam(alpha[r G])``.

Along the ray ``alpha = r v`` one has ``d/du [u Lambda(v/u)] = -K(lam(v/u))``, so the
optimal scale is the root of ``r -> K(lam(r v))`` and the optimal tilt has zero
cumulant. Both :func:`second_rate` and :func:`most_probable_scale` use that root.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from .errors import DegenerateModel, DomainError, NoConvergence, NoFiniteMinimum, NoRoot, VertexNotMpp
from .model import LevyModel, cumulant, cumulant_derivatives, in_domain

# iterates farther out than this are treated as escaping to infinity
_ESCAPE_NORM = 1e8
_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class ToleranceProfile:
    newton_tol: float = 1e-10
    root_tol: float = 1e-10
    max_iter: int = 200
    bracket: tuple[float, float] = (1e-6, 1e6)

    @classmethod
    def from_dict(cls, d: Optional[dict]) -> "ToleranceProfile":
        d = dict(d or {})
        if "bracket" in d:
            d["bracket"] = tuple(float(x) for x in d["bracket"])
        return cls(**d)


DEFAULT_TOL = ToleranceProfile()


@dataclass(frozen=True)
class LegendreSolution:
    alpha: np.ndarray
    lambda_value: float
    conjugate: np.ndarray
    residual: float
    in_cramer_range: bool
    iterations: int = 0


@dataclass(frozen=True)
class SecondRateSolution:
    v: np.ndarray
    d_value: float
    u_star: float
    tilt: np.ndarray
    k_residual: float


@dataclass(frozen=True)
class OrthantTarget:
    """Vertex ``g`` of the open orthant ``G = g + Q+``."""

    g: np.ndarray

    def __post_init__(self):
        g = np.array(self.g, dtype=float)
        if g.ndim != 1 or g.size == 0:
            raise ValueError("vertex must be a nonempty vector")
        if not np.all(g > 0) or not np.all(np.isfinite(g)):
            raise ValueError(f"vertex must have strictly positive components, got {g.tolist()}")
        g.setflags(write=False)
        object.__setattr__(self, "g", g)

    @property
    def dim(self) -> int:
        return self.g.size

    def contains(self, x) -> bool:
        return bool(np.all(np.asarray(x) > self.g))


@dataclass(frozen=True)
class MppSolution:
    r: float
    point: np.ndarray
    vertex_is_mpp: bool
    normal: np.ndarray
    value: float = field(default=math.nan)


# ---------------------------------------------------------------------------
# Legendre transform
# ---------------------------------------------------------------------------


def _newton_step(hess: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    w = np.linalg.eigvalsh(hess)
    if w[-1] <= 0 or w[0] <= 1e-13 * w[-1]:
        raise DegenerateModel(
            f"cumulant Hessian is singular (eigenvalues {w.tolist()}); "
            "the increment law is concentrated on a hyperplane"
        )
    return np.linalg.solve(hess, rhs)


def _max_step(model: LevyModel, lam: np.ndarray, p: np.ndarray) -> float:
    """Largest step along ``p`` keeping at least 10% of the current domain margin."""
    if model.jumps is None:
        return 1.0
    law = model.jumps.law
    margin = law.margin(lam)
    if not math.isfinite(margin):
        return 1.0
    slope = law.margin(lam + p) - margin  # margin is affine in lam
    if slope >= 0:
        return 1.0
    return min(1.0, 0.9 * margin / -slope)


def _solve_conjugate(model, alpha, free, tol, lam0=None):
    """Maximise ``<alpha, lam> - K(lam)`` over ``lam`` with ``lam[~free] = 0``.

    Returns ``(lam, residual, converged_interior, iterations)``.
    """
    d = model.dim
    lam = np.zeros(d) if lam0 is None else np.array(lam0, dtype=float)
    lam[~free] = 0.0
    if not in_domain(model, lam)[0]:
        lam = np.zeros(d)
    idx = np.flatnonzero(free)
    scale = 1.0 + float(np.linalg.norm(alpha[idx]))

    def objective(x):
        k = cumulant(model, x)
        return k - float(alpha @ x) if math.isfinite(k) else math.inf

    f = objective(lam)
    res = math.inf
    for it in range(tol.max_iter):
        grad, hess = cumulant_derivatives(model, lam)
        r = grad[idx] - alpha[idx]
        res = float(np.linalg.norm(r))
        if res <= tol.newton_tol * scale:
            return lam, res, True, it
        p = np.zeros(d)
        p[idx] = -_newton_step(hess[np.ix_(idx, idx)], r)
        t = _max_step(model, lam, p)
        slope = float(r @ p[idx])
        accepted = False
        for _ in range(60):
            cand = lam + t * p
            fc = objective(cand)
            if fc <= f + 1e-4 * t * slope:
                accepted = True
                break
            # rounding can mask descent near the optimum; fall back on the residual
            if math.isfinite(fc) and abs(fc - f) <= 1e-13 * (1.0 + abs(f)):
                g2, _ = cumulant_derivatives(model, cand)
                if np.linalg.norm(g2[idx] - alpha[idx]) < res:
                    accepted = True
                    break
            t *= 0.5
        if not accepted:
            raise NoConvergence("line search failed", last_iterate=lam, residual=res)
        lam, f = cand, fc
        ok, margin = in_domain(model, lam)
        if np.linalg.norm(lam) > _ESCAPE_NORM or (math.isfinite(margin) and margin < 1e-14):
            return lam, res, False, it + 1
    raise NoConvergence(
        f"Newton did not converge in {tol.max_iter} iterations (residual {res:.3g})",
        last_iterate=lam,
        residual=res,
    )


def legendre(model: LevyModel, alpha, tol: ToleranceProfile = DEFAULT_TOL, lam0=None) -> LegendreSolution:
    """First rate function ``Lambda(alpha)`` and its conjugate point.

    Solved by damped Newton on ``grad K(lam) = alpha`` starting at ``lam0`` (or 0).
    Steps are clamped to keep 10% of the margin to the pole of the jump MGF and
    halved until the concave objective increases. If the iterates run off to the
    domain boundary, ``alpha`` is outside the Cramér range and the reported value
    is the supremum approached along the path.
    """
    alpha = np.array(alpha, dtype=float)
    if alpha.shape != (model.dim,):
        raise ValueError(f"alpha must have length {model.dim}")
    free = np.ones(model.dim, dtype=bool)
    lam, res, interior, it = _solve_conjugate(model, alpha, free, tol, lam0)
    value = float(alpha @ lam) - cumulant(model, lam)
    if interior:
        value = max(value, 0.0)
    alpha.setflags(write=False)
    lam.setflags(write=False)
    return LegendreSolution(alpha, value, lam, res, interior, it)


# ---------------------------------------------------------------------------
# Zero-cumulant scale along a ray
# ---------------------------------------------------------------------------


def _ray_cumulant(model, v, r, tol, lam0=None):
    sol = legendre(model, r * v, tol, lam0)
    if not sol.in_cramer_range:
        return math.nan, sol
    return cumulant(model, sol.conjugate), sol


def _ray_slope(model, v, r, sol) -> float:
    # d/dr K(lam(r v)) = r * v' H^{-1} v
    _, hess = cumulant_derivatives(model, sol.conjugate)
    return r * float(v @ np.linalg.solve(hess, v))


def _zero_cumulant_scale(model, v, tol, r0=1.0):
    """Root of ``r -> K(lam(r v))`` inside ``tol.bracket``.

    The function is increasing in ``r``. A bracket is grown geometrically from
    ``r0`` until the sign changes, then refined by Newton steps safeguarded with
    bisection. Returns ``(r, LegendreSolution at r v)``.
    """
    lim_lo, lim_hi = tol.bracket
    r0 = min(max(r0, lim_lo), lim_hi)
    k0, s0 = _ray_cumulant(model, v, r0, tol)
    lo = hi = r0
    k_lo = k_hi = k0
    s_lo = s_hi = s0
    # grow downwards while K > 0 (or undefined), upwards while K < 0
    while (math.isnan(k_lo) or k_lo > 0) and lo > lim_lo:
        if not math.isnan(k_lo):
            hi, k_hi, s_hi = lo, k_lo, s_lo
        lo = max(lo / 4.0, lim_lo)
        k_lo, s_lo = _ray_cumulant(model, v, lo, tol)
    while not math.isnan(k_hi) and k_hi < 0 and hi < lim_hi:
        lo, k_lo, s_lo = hi, k_hi, s_hi
        hi = min(hi * 4.0, lim_hi)
        k_hi, s_hi = _ray_cumulant(model, v, hi, tol)
    if math.isnan(k_hi):
        # the ray leaves the Cramér range: pull the upper end back in
        for _ in range(200):
            if not math.isnan(k_hi) or hi <= lo * (1 + 1e-12):
                break
            hi = 0.5 * (lo + hi)
            k_hi, s_hi = _ray_cumulant(model, v, hi, tol)
    if math.isnan(k_lo) or math.isnan(k_hi):
        raise NoRoot(f"ray {v.tolist()} leaves the Cramér range inside the bracket")
    if k_lo > 0 or k_hi < 0:
        raise NoRoot(
            f"K(lam(r v)) has no sign change on [{lo:.3g}, {hi:.3g}] "
            f"(values {k_lo:.3g}, {k_hi:.3g})"
        )
    if abs(k_lo) <= tol.root_tol:
        return lo, s_lo
    if abs(k_hi) <= tol.root_tol:
        return hi, s_hi

    r = r0 if lo < r0 < hi else math.sqrt(lo * hi)
    lam_guess = s_lo.conjugate
    for _ in range(tol.max_iter):
        k, sol = _ray_cumulant(model, v, r, tol, lam_guess)
        if math.isnan(k):
            hi = r
        else:
            if abs(k) <= tol.root_tol:
                return r, sol
            if k < 0:
                lo = r
            else:
                hi = r
            lam_guess = sol.conjugate
        step_ok = False
        if not math.isnan(k):
            slope = _ray_slope(model, v, r, sol)
            if slope > 0:
                cand = r - k / slope
                if lo < cand < hi:
                    r, step_ok = cand, True
        if not step_ok:
            r = math.sqrt(lo * hi) if hi / lo > 4 else 0.5 * (lo + hi)
        if hi - lo <= 4e-16 * hi:
            break
    k, sol = _ray_cumulant(model, v, r, tol, lam_guess)
    if math.isnan(k) or abs(k) > tol.root_tol:
        raise NoRoot(f"root search stalled at r={r:.17g} with K={k:.3g}")
    return r, sol


def _golden_min(f, lo, hi, iters=200, xtol=1e-10):
    """Golden-section minimisation of ``f`` over ``[lo, hi]`` in log-scale."""
    a, b = math.log(lo), math.log(hi)
    c = b - _GOLDEN * (b - a)
    e = a + _GOLDEN * (b - a)
    fc, fe = f(math.exp(c)), f(math.exp(e))
    for _ in range(iters):
        if b - a < xtol:
            break
        if fc <= fe:
            b, e, fe = e, c, fc
            c = b - _GOLDEN * (b - a)
            fc = f(math.exp(c))
        else:
            a, c, fc = c, e, fe
            e = a + _GOLDEN * (b - a)
            fe = f(math.exp(e))
    x = 0.5 * (a + b)
    return math.exp(x), f(math.exp(x))


def scaled_rate(model: LevyModel, v, u: float, tol: ToleranceProfile = DEFAULT_TOL) -> float:
    """``u * Lambda(v / u)``, with ``+inf`` where ``v / u`` is out of reach."""
    try:
        sol = legendre(model, np.asarray(v, dtype=float) / u, tol)
    except NoConvergence:
        return math.inf
    return u * sol.lambda_value if sol.in_cramer_range else math.inf


def second_rate(model: LevyModel, v, tol: ToleranceProfile = DEFAULT_TOL) -> SecondRateSolution:
    """Second rate function ``D(v) = inf_u u * Lambda(v/u)``.

    ``u * Lambda(v/u)`` is convex in ``u``; a golden-section search on ``log u``
    over the bracket locates its minimum, which is then refined as the root of
    the stationarity condition ``K(lam(v/u)) = 0``.
    """
    v = np.array(v, dtype=float)
    if v.shape != (model.dim,) or not np.any(v):
        raise DomainError("v must be a nonzero vector of the model dimension")
    lo, hi = tol.bracket
    u0, f0 = _golden_min(lambda u: scaled_rate(model, v, u, tol), lo, hi, iters=120, xtol=1e-3)
    diag = {"u_golden": u0, "value_golden": f0, "bracket": (lo, hi)}
    if not math.isfinite(f0):
        raise NoFiniteMinimum("u * Lambda(v/u) is infinite across the bracket", diag)
    inner = replace(tol, bracket=(1.0 / hi, 1.0 / lo))
    try:
        r, sol = _zero_cumulant_scale(model, v, inner, 1.0 / u0)
    except NoRoot as e:
        raise NoFiniteMinimum(f"no stationary point of u * Lambda(v/u) inside the bracket: {e}", diag) from None
    u = 1.0 / r
    tilt = np.array(sol.conjugate)
    tilt.setflags(write=False)
    v.setflags(write=False)
    return SecondRateSolution(v, u * sol.lambda_value, u, tilt, abs(cumulant(model, tilt)))


# ---------------------------------------------------------------------------
# Orthant most probable point
# ---------------------------------------------------------------------------


def _as_target(target) -> OrthantTarget:
    return target if isinstance(target, OrthantTarget) else OrthantTarget(target)


def _constrained_mpp(model, corner, tol):
    """Minimise ``Lambda`` over the closed orthant ``corner + closure(Q+)``.

    Uses the dual form ``sup_{lam >= 0} <corner, lam> - K(lam)`` and enumerates the
    active sets; the optimum is the dual-feasible candidate with the largest value.
    """
    d = model.dim
    best = None
    for k in range(d, -1, -1):
        for free_idx in itertools.combinations(range(d), k):
            free = np.zeros(d, dtype=bool)
            free[list(free_idx)] = True
            try:
                lam, _, interior, _ = _solve_conjugate(model, corner, free, tol)
            except (NoConvergence, DegenerateModel):
                continue
            if not interior or np.any(lam[free] < 0):
                continue
            grad, _ = cumulant_derivatives(model, lam)
            fixed = ~free
            if np.any(grad[fixed] < corner[fixed] - 1e-9 * (1 + np.abs(corner[fixed]))):
                continue
            value = float(corner @ lam) - cumulant(model, lam)
            if best is None or value > best[0]:
                point = np.where(free, corner, grad)
                best = (value, lam, point)
    if best is None:
        raise NoConvergence(f"no KKT point found for the orthant at {corner.tolist()}")
    return best


def orthant_mpp(model: LevyModel, target, r: float, tol: ToleranceProfile = DEFAULT_TOL) -> MppSolution:
    """Most probable point of ``r G``.

    The vertex ``r g`` is the MPP iff ``lam(r g)`` has nonnegative components
    (KKT for minimising the convex ``Lambda`` over the orthant). Otherwise the MPP
    is located on a face by an active-set search.
    """
    target = _as_target(target)
    corner = r * target.g
    sol = legendre(model, corner, tol)
    if sol.in_cramer_range and np.all(sol.conjugate >= 0):
        point = corner.copy()
        point.setflags(write=False)
        return MppSolution(r, point, True, sol.conjugate, sol.lambda_value)
    value, lam, point = _constrained_mpp(model, corner, tol)
    # the vertex can still come out optimal when lam(rg) was only numerically negative
    vertex = bool(np.all(np.abs(point - corner) <= 1e-12 * (1 + np.abs(corner)))) and np.all(lam >= 0)
    point.setflags(write=False)
    lam.setflags(write=False)
    return MppSolution(r, point, bool(vertex), lam, max(value, 0.0))


def _vertex_scale(model, target, tol):
    """Root of ``r -> K(lam(r g))`` (ignores whether the vertex is the MPP)."""
    return _zero_cumulant_scale(model, target.g, tol)


def most_probable_scale(model: LevyModel, target, tol: ToleranceProfile = DEFAULT_TOL) -> float:
    """``r_G``: root of ``K(lam(r g)) = 0``, valid when the vertex is the MPP of ``r G``."""
    target = _as_target(target)
    r, sol = _vertex_scale(model, target, tol)
    if not np.all(sol.conjugate >= 0):
        raise VertexNotMpp(
            f"lam(r_G g) = {sol.conjugate.tolist()} has a negative component; "
            "the vertex is not the most probable point"
        )
    return r


def orthant_scale_search(model: LevyModel, target, tol: ToleranceProfile = DEFAULT_TOL):
    """Minimise ``Lambda(r G) / r`` over ``r`` directly by golden section.

    Works without the vertex assumption. Returns ``(r, value, MppSolution)``.
    """
    target = _as_target(target)
    lo, hi = tol.bracket

    def f(r):
        try:
            return orthant_mpp(model, target, r, tol).value / r
        except (NoConvergence, DegenerateModel):
            return math.inf

    r, val = _golden_min(f, lo, hi, iters=300, xtol=1e-10)
    return r, val, orthant_mpp(model, target, r, tol)


def normal_at(model: LevyModel, target, r: float, tol: ToleranceProfile = DEFAULT_TOL) -> np.ndarray:
    """Normal ``N(r) = lam(r g)`` to the level surface of ``Lambda`` at the vertex MPP."""
    mpp = orthant_mpp(model, target, r, tol)
    if not mpp.vertex_is_mpp:
        raise VertexNotMpp(f"vertex is not the MPP of r G at r={r}")
    return mpp.normal


def skeleton_legendre(model: LevyModel, alpha, delta: float, tol: ToleranceProfile = DEFAULT_TOL) -> float:
    """Rate function of ``X(delta)`` via the scaling identity ``delta * Lambda(alpha / delta)``."""
    return delta * legendre(model, np.asarray(alpha, dtype=float) / delta, tol).lambda_value

