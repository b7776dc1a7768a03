"""Parametric Lévy process families with closed-form cumulants.

A :class:`LevyModel` stores the unit-time triplet (drift, Gaussian covariance,
compound-Poisson jumps). Everything else, including the law of the increment
over a time step ``delta``, is derived from it.

The cumulant of the unit-time increment is the Lévy-Khintchine expression::

    K(lam) = <drift, lam> + lam' cov lam / 2 + intensity * (M(lam) - 1)

with ``M`` the moment generating function of a single jump.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np

from .errors import ConfigError, DomainError

PSD_FLOOR = -1e-10
PROB_TOL = 1e-12


def _frozen(a, ndim: int, name: str) -> np.ndarray:
    arr = np.array(a, dtype=float)
    if arr.ndim != ndim:
        raise ValueError(f"{name} must be {ndim}-dimensional, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} must be finite")
    arr.setflags(write=False)
    return arr


def _psd_factor(cov: np.ndarray) -> np.ndarray:
    """Lower-triangular factor ``L`` with ``L @ L.T == cov`` for PSD ``cov``."""
    if not np.any(cov):
        return np.zeros_like(cov)
    try:
        return np.linalg.cholesky(cov)
    except np.linalg.LinAlgError:
        pass
    # semidefinite: pivot-free LDL-style factorisation keeping lower-triangular form
    d = cov.shape[0]
    L = np.zeros_like(cov)
    scale = max(float(np.max(np.abs(np.diag(cov)))), 1.0)
    for j in range(d):
        s = cov[j, j] - L[j, :j] @ L[j, :j]
        if s <= 1e-12 * scale:
            continue
        L[j, j] = math.sqrt(s)
        for i in range(j + 1, d):
            L[i, j] = (cov[i, j] - L[i, :j] @ L[j, :j]) / L[j, j]
    return L


def _check_psd(cov: np.ndarray, name: str) -> np.ndarray:
    if cov.shape[0] != cov.shape[1]:
        raise ValueError(f"{name} must be square, got shape {cov.shape}")
    if not np.allclose(cov, cov.T, rtol=0.0, atol=1e-12):
        raise ValueError(f"{name} must be symmetric")
    cov = 0.5 * (cov + cov.T)
    w, v = np.linalg.eigh(cov)
    if w.min() < PSD_FLOOR:
        raise ValueError(f"{name} is not positive semidefinite (min eigenvalue {w.min():.3g})")
    if w.min() < 0.0:
        warnings.warn(f"{name}: clamping eigenvalues in [{PSD_FLOOR}, 0) to zero", stacklevel=3)
        cov = (v * np.clip(w, 0.0, None)) @ v.T
        cov = 0.5 * (cov + cov.T)
    return cov


# ---------------------------------------------------------------------------
# Jump laws
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ExpAlong:
    """Jump ``C * direction`` with ``C ~ Exponential(rate)``."""

    direction: np.ndarray
    rate: float

    kind = "exp_along"

    def __post_init__(self):
        object.__setattr__(self, "direction", _frozen(self.direction, 1, "direction"))
        if not np.any(self.direction):
            raise ValueError("direction must be nonzero")
        if not self.rate > 0:
            raise ValueError("rate must be positive")
        object.__setattr__(self, "rate", float(self.rate))

    @property
    def dim(self) -> int:
        return self.direction.shape[0]

    def margin(self, lam) -> float:
        return self.rate - float(self.direction @ lam)

    def mgf(self, lam) -> float:
        m = self.margin(lam)
        return self.rate / m if m > 0 else math.inf

    def mgf_derivatives(self, lam):
        m = self.margin(lam)
        c = self.direction
        return self.rate / m, (self.rate / m**2) * c, (2.0 * self.rate / m**3) * np.outer(c, c)

    def mean(self) -> np.ndarray:
        return self.direction / self.rate

    def tilted(self, lam) -> tuple[float, "ExpAlong"]:
        m = self.margin(lam)
        return self.rate / m, ExpAlong(self.direction, m)

    def to_dict(self) -> dict:
        return {"kind": self.kind, "direction": self.direction.tolist(), "rate": self.rate}


@dataclass(frozen=True)
class GaussianJump:
    mean_vec: np.ndarray
    cov: np.ndarray
    chol: np.ndarray = field(init=False, repr=False, compare=False)

    kind = "gaussian"

    def __post_init__(self):
        m = _frozen(self.mean_vec, 1, "mean")
        s = _check_psd(np.array(self.cov, dtype=float), "jump cov")
        if s.shape[0] != m.shape[0]:
            raise ValueError("jump mean and cov dimensions differ")
        s.setflags(write=False)
        L = _psd_factor(s)
        L.setflags(write=False)
        object.__setattr__(self, "mean_vec", m)
        object.__setattr__(self, "cov", s)
        object.__setattr__(self, "chol", L)

    @property
    def dim(self) -> int:
        return self.mean_vec.shape[0]

    def margin(self, lam) -> float:
        return math.inf

    def mgf(self, lam) -> float:
        e = float(lam @ self.mean_vec) + 0.5 * float(lam @ self.cov @ lam)
        return math.exp(e) if e < 709.0 else math.inf

    def mgf_derivatives(self, lam):
        M = self.mgf(lam)
        a = self.mean_vec + self.cov @ lam
        return M, M * a, M * (np.outer(a, a) + self.cov)

    def mean(self) -> np.ndarray:
        return self.mean_vec.copy()

    def tilted(self, lam) -> tuple[float, "GaussianJump"]:
        return self.mgf(lam), GaussianJump(self.mean_vec + self.cov @ lam, self.cov)

    def to_dict(self) -> dict:
        return {"kind": self.kind, "mean": self.mean_vec.tolist(), "cov": self.cov.tolist()}


@dataclass(frozen=True)
class PointMasses:
    atoms: np.ndarray
    probs: np.ndarray

    kind = "points"

    def __post_init__(self):
        a = _frozen(self.atoms, 2, "atoms")
        p = _frozen(self.probs, 1, "probs")
        if a.shape[0] != p.shape[0] or a.shape[0] == 0:
            raise ValueError("need one probability per atom and at least one atom")
        if np.any(p < 0) or abs(p.sum() - 1.0) > PROB_TOL:
            raise ValueError("probabilities must be nonnegative and sum to 1")
        object.__setattr__(self, "atoms", a)
        object.__setattr__(self, "probs", p)

    @property
    def dim(self) -> int:
        return self.atoms.shape[1]

    def margin(self, lam) -> float:
        return math.inf

    def _weights(self, lam) -> np.ndarray:
        with np.errstate(over="ignore"):
            return self.probs * np.exp(self.atoms @ lam)

    def mgf(self, lam) -> float:
        return float(self._weights(lam).sum())

    def mgf_derivatives(self, lam):
        w = self._weights(lam)
        a = self.atoms
        return float(w.sum()), w @ a, (a.T * w) @ a

    def mean(self) -> np.ndarray:
        return self.probs @ self.atoms

    def tilted(self, lam) -> tuple[float, "PointMasses"]:
        w = self._weights(lam)
        total = float(w.sum())
        return total, PointMasses(self.atoms, w / total)

    def to_dict(self) -> dict:
        return {"kind": self.kind, "atoms": self.atoms.tolist(), "probs": self.probs.tolist()}


JumpLaw = Union[ExpAlong, GaussianJump, PointMasses]


@dataclass(frozen=True)
class JumpComponent:
    intensity: float
    law: JumpLaw

    def __post_init__(self):
        if not self.intensity > 0:
            raise ValueError("jump intensity must be positive")
        object.__setattr__(self, "intensity", float(self.intensity))


# ---------------------------------------------------------------------------
# Model
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LevyModel:
    """Unit-time Lévy triplet: drift, Brownian covariance and optional jumps."""

    drift: np.ndarray
    cov: np.ndarray
    jumps: Optional[JumpComponent] = None
    cov_factor: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        drift = _frozen(self.drift, 1, "drift")
        d = drift.shape[0]
        if d < 1:
            raise ValueError("dim must be at least 1")
        cov = np.array(self.cov, dtype=float)
        if cov.shape != (d, d):
            raise ValueError(f"cov must have shape {(d, d)}, got {cov.shape}")
        cov = _check_psd(cov, "cov")
        cov.setflags(write=False)
        if self.jumps is not None and self.jumps.law.dim != d:
            raise ValueError("jump law dimension does not match drift")
        L = _psd_factor(cov)
        L.setflags(write=False)
        object.__setattr__(self, "drift", drift)
        object.__setattr__(self, "cov", cov)
        object.__setattr__(self, "cov_factor", L)

    @property
    def dim(self) -> int:
        return self.drift.shape[0]

    def __eq__(self, other):
        if not isinstance(other, LevyModel):
            return NotImplemented
        return (
            np.array_equal(self.drift, other.drift)
            and np.array_equal(self.cov, other.cov)
            and _jumps_equal(self.jumps, other.jumps)
        )

    __hash__ = None

    def to_dict(self) -> dict:
        out = {"dim": self.dim, "drift": self.drift.tolist(), "cov": self.cov.tolist()}
        if self.jumps is not None:
            out["jumps"] = {"intensity": self.jumps.intensity, "law": self.jumps.law.to_dict()}
        return out


def _jumps_equal(a, b) -> bool:
    if a is None or b is None:
        return a is b
    if a.intensity != b.intensity or type(a.law) is not type(b.law):
        return False
    return a.law.to_dict() == b.law.to_dict()


def brownian(drift, cov) -> LevyModel:
    return LevyModel(drift, cov)


def reserve_process(claim_share, premium_rates, intensity: float, claim_rate: float) -> LevyModel:
    """Multi-company reserve process driven by a common compound-Poisson claim stream.

    Each claim ``C ~ Exponential(claim_rate)`` is split as ``C * claim_share`` and
    premiums are collected continuously at ``premium_rates``; the state is the
    aggregate claims minus premiums, so ruin corresponds to hitting a remote orthant.
    """
    c = np.asarray(claim_share, dtype=float)
    p = np.asarray(premium_rates, dtype=float)
    return LevyModel(-p, np.zeros((c.size, c.size)), JumpComponent(intensity, ExpAlong(c, claim_rate)))


# ---------------------------------------------------------------------------
# Cumulant and friends
# ---------------------------------------------------------------------------


def _as_vec(model: LevyModel, lam) -> np.ndarray:
    lam = np.asarray(lam, dtype=float)
    if lam.shape != (model.dim,):
        raise ValueError(f"expected a vector of length {model.dim}, got shape {lam.shape}")
    return lam


def in_domain(model: LevyModel, lam) -> tuple[bool, float]:
    """Return ``(K(lam) < inf, margin)``; margin is the distance-like slack to the pole.

    The domain is decided from the jump law alone: a half-space for exponential
    jumps and the whole space otherwise.
    """
    lam = _as_vec(model, lam)
    if model.jumps is None:
        return True, math.inf
    margin = model.jumps.law.margin(lam)
    return margin > 0, margin


def cumulant(model: LevyModel, lam) -> float:
    """``ln E exp(<lam, X(1)>)``, or ``+inf`` outside the finiteness domain."""
    lam = _as_vec(model, lam)
    val = float(model.drift @ lam) + 0.5 * float(lam @ model.cov @ lam)
    if model.jumps is not None:
        M = model.jumps.law.mgf(lam)
        if not math.isfinite(M):
            return math.inf
        val += model.jumps.intensity * (M - 1.0)
    return val


def cumulant_derivatives(model: LevyModel, lam) -> tuple[np.ndarray, np.ndarray]:
    lam = _as_vec(model, lam)
    ok, margin = in_domain(model, lam)
    if not ok:
        raise DomainError(f"lam={lam.tolist()} is outside the cumulant domain (margin {margin:.3g})")
    grad = model.drift + model.cov @ lam
    hess = np.array(model.cov, dtype=float)
    if model.jumps is not None:
        _, dM, d2M = model.jumps.law.mgf_derivatives(lam)
        grad = grad + model.jumps.intensity * dM
        hess = hess + model.jumps.intensity * d2M
    return grad, hess


def mean(model: LevyModel) -> np.ndarray:
    """Expected unit-time increment."""
    out = np.array(model.drift, dtype=float)
    if model.jumps is not None:
        out = out + model.jumps.intensity * model.jumps.law.mean()
    return out


def scale_time(model: LevyModel, delta: float) -> LevyModel:
    """Model whose unit-time increment has the law of ``X(delta)`` under ``model``."""
    if not delta > 0:
        raise DomainError(f"delta must be positive, got {delta}")
    if delta == 1:
        return model
    jumps = None
    if model.jumps is not None:
        jumps = JumpComponent(model.jumps.intensity * delta, model.jumps.law)
    return LevyModel(model.drift * delta, model.cov * delta, jumps)


# ---------------------------------------------------------------------------
# JSON schema
# ---------------------------------------------------------------------------


def _law_from_dict(d: dict, dim: int, key: str) -> JumpLaw:
    kind = d.get("kind")
    try:
        if kind == "exp_along":
            law = ExpAlong(d["direction"], d["rate"])
        elif kind == "gaussian":
            law = GaussianJump(d["mean"], d["cov"])
        elif kind == "points":
            law = PointMasses(d["atoms"], d["probs"])
        else:
            raise ConfigError(f"{key}.kind", f"unknown jump law kind {kind!r}")
    except KeyError as e:
        raise ConfigError(f"{key}.{e.args[0]}", "missing") from None
    except (ValueError, TypeError) as e:
        raise ConfigError(key, str(e)) from None
    if law.dim != dim:
        raise ConfigError(key, f"dimension {law.dim} does not match model dim {dim}")
    return law


def model_from_dict(d: dict, key: str = "model") -> LevyModel:
    """Build a model from the ``model`` section of a run config."""
    if not isinstance(d, dict):
        raise ConfigError(key, "must be an object")
    for k in ("dim", "drift", "cov"):
        if k not in d:
            raise ConfigError(f"{key}.{k}", "missing")
    dim = d["dim"]
    if not isinstance(dim, int) or dim < 1:
        raise ConfigError(f"{key}.dim", "must be a positive integer")
    if len(d["drift"]) != dim:
        raise ConfigError(f"{key}.drift", f"must have length {dim}")
    jumps = None
    if d.get("jumps") is not None:
        j = d["jumps"]
        if "intensity" not in j:
            raise ConfigError(f"{key}.jumps.intensity", "missing")
        if "law" not in j:
            raise ConfigError(f"{key}.jumps.law", "missing")
        law = _law_from_dict(j["law"], dim, f"{key}.jumps.law")
        try:
            jumps = JumpComponent(j["intensity"], law)
        except ValueError as e:
            raise ConfigError(f"{key}.jumps.intensity", str(e)) from None
    try:
        return LevyModel(d["drift"], d["cov"], jumps)
    except ValueError as e:
        raise ConfigError(f"{key}.cov" if "cov" in str(e) else key, str(e)) from None
