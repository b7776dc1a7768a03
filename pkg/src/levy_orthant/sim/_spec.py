"""Flat parameter bundle handed to the path kernels."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..model import ExpAlong, GaussianJump, LevyModel, PointMasses

MODE_CRUDE = 0
MODE_IMPORTANCE = 1

JUMP_NONE = 0
JUMP_EXP = 1
JUMP_GAUSS = 2
JUMP_POINTS = 3


def _c(a, shape=None) -> np.ndarray:
    out = np.ascontiguousarray(a, dtype=np.float64)
    if shape is not None:
        out = out.reshape(shape)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class KernelSpec:
    dim: int
    drift: np.ndarray
    chol: np.ndarray
    has_gauss: int
    intensity: float
    jump_kind: int
    jvec: np.ndarray
    jrate: float
    jchol: np.ndarray
    atoms: np.ndarray
    cum: np.ndarray
    threshold: np.ndarray
    lam: np.ndarray
    delta: float
    n_steps: int
    mode: int


def build_spec(model: LevyModel, threshold, delta: float, n_steps: int, mode: int, lam=None) -> KernelSpec:
    d = model.dim
    zeros = np.zeros(d)
    jvec, jrate, jchol = zeros, 0.0, np.zeros((d, d))
    atoms, cum = np.zeros((1, d)), np.ones(1)
    intensity, kind = 0.0, JUMP_NONE
    if model.jumps is not None:
        intensity = model.jumps.intensity
        law = model.jumps.law
        if isinstance(law, ExpAlong):
            kind, jvec, jrate = JUMP_EXP, law.direction, law.rate
        elif isinstance(law, GaussianJump):
            kind, jvec, jchol = JUMP_GAUSS, law.mean_vec, law.chol
        elif isinstance(law, PointMasses):
            kind, atoms = JUMP_POINTS, law.atoms
            cum = np.cumsum(law.probs)
        else:  # pragma: no cover - closed enumeration
            raise TypeError(f"unsupported jump law {type(law).__name__}")
    if n_steps < 1 or not math.isfinite(delta) or delta <= 0:
        raise ValueError("need delta > 0 and at least one step")
    return KernelSpec(
        dim=d,
        drift=_c(model.drift),
        chol=_c(model.cov_factor, (d, d)),
        has_gauss=int(np.any(model.cov_factor)),
        intensity=float(intensity),
        jump_kind=kind,
        jvec=_c(jvec),
        jrate=float(jrate),
        jchol=_c(jchol, (d, d)),
        atoms=_c(atoms, (-1, d)),
        cum=_c(cum),
        threshold=_c(threshold),
        lam=_c(zeros if lam is None else lam),
        delta=float(delta),
        n_steps=int(n_steps),
        mode=int(mode),
    )
