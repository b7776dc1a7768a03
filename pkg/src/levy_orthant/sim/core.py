"""Monte Carlo estimation of the probability of ever hitting ``s G``.

Paths are evaluated on the grid ``{n * delta}`` and, additionally, right after
every jump. Entry into the open orthant is checked with strict inequalities.

Randomness: path chunk ``i`` draws from a Philox (counter-based) stream keyed by
``SeedSequence(master_seed, spawn_key=(i,))``. Chunk results are reduced in
chunk order, so estimates do not depend on the number of workers.
"""

from __future__ import annotations

import csv
import logging
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np

from ..conditions import ConditionReport, check_conditions
from ..errors import ConditionError, ConfigError, DomainError
from ..model import ExpAlong, GaussianJump, JumpComponent, LevyModel, PointMasses, in_domain
from ..rates import DEFAULT_TOL, OrthantTarget, ToleranceProfile
from . import _backend
from ._spec import MODE_CRUDE, MODE_IMPORTANCE, build_spec

log = logging.getLogger(__name__)

Z95 = 1.959963984540054
DEFAULT_CAP_FACTOR = 100.0


@dataclass(frozen=True)
class SimConfig:
    delta: float = 0.01
    horizon: float = 50.0
    n_paths: int = 100_000
    master_seed: int = 0
    chunk_size: int = 10_000

    def __post_init__(self):
        if not (isinstance(self.delta, (int, float)) and self.delta > 0 and math.isfinite(self.delta)):
            raise ConfigError("sim.delta", "must be a positive real")
        if not (isinstance(self.horizon, (int, float)) and self.horizon > 0):
            raise ConfigError("sim.horizon", "must be a positive real")
        if self.delta > self.horizon:
            raise ConfigError("sim.delta", "must not exceed sim.horizon")
        if not isinstance(self.n_paths, int) or self.n_paths < 1:
            raise ConfigError("sim.n_paths", "must be a positive integer")
        if not isinstance(self.master_seed, int) or not 0 <= self.master_seed < 2**64:
            raise ConfigError("sim.master_seed", "must be an integer in [0, 2**64)")
        if not isinstance(self.chunk_size, int) or self.chunk_size < 1:
            raise ConfigError("sim.chunk_size", "must be a positive integer")

    @classmethod
    def from_dict(cls, d: Optional[dict]) -> "SimConfig":
        d = dict(d or {})
        unknown = set(d) - {"delta", "horizon", "n_paths", "master_seed", "chunk_size"}
        if unknown:
            raise ConfigError(f"sim.{sorted(unknown)[0]}", "unknown key")
        return cls(**d)


@dataclass(frozen=True)
class HitEstimate:
    s: float
    method: str
    p_hat: float
    std_err: float
    ci95: tuple[float, float]
    n_paths: int
    n_hits: int
    delta: float
    truncation_bias_flag: bool
    seed: int = 0
    max_weight: float = 0.0
    weight_bound: float = math.inf
    n_unfinished: int = 0
    chunks: list = field(default_factory=list, repr=False, compare=False)

    def to_row(self) -> dict:
        return {
            "s": self.s,
            "method": self.method,
            "delta": self.delta,
            "n": self.n_paths,
            "p_hat": self.p_hat,
            "std_err": self.std_err,
            "ci_lo": self.ci95[0],
            "ci_hi": self.ci95[1],
            "seed": self.seed,
        }


# ---------------------------------------------------------------------------
# Exact increments and exponential tilting
# ---------------------------------------------------------------------------


def sample_increment(model: LevyModel, delta: float, rng: np.random.Generator, size: Optional[int] = None):
    """Exact draw(s) of ``X(delta)``; shape ``(d,)`` or ``(size, d)``."""
    if not delta > 0:
        raise DomainError("delta must be positive")
    n = 1 if size is None else int(size)
    d = model.dim
    out = np.tile(model.drift * delta, (n, 1))
    if np.any(model.cov_factor):
        out += math.sqrt(delta) * rng.standard_normal((n, d)) @ model.cov_factor.T
    if model.jumps is not None:
        counts = rng.poisson(model.jumps.intensity * delta, size=n)
        law = model.jumps.law
        if isinstance(law, ExpAlong):
            total = np.where(counts > 0, rng.gamma(np.maximum(counts, 1), 1.0 / law.rate), 0.0)
            out += total[:, None] * law.direction
        elif isinstance(law, GaussianJump):
            z = rng.standard_normal((n, d)) @ law.chol.T
            out += counts[:, None] * law.mean_vec + np.sqrt(counts)[:, None] * z
        elif isinstance(law, PointMasses):
            per_atom = np.array([rng.multinomial(c, law.probs) for c in counts])
            out += per_atom @ law.atoms
    return out[0] if size is None else out


def tilt_model(model: LevyModel, tilt) -> LevyModel:
    """Exponentially tilted model ``exp(<tilt, x> - K(tilt)) P(X(1) in dx)``, same family."""
    tilt = np.asarray(tilt, dtype=float)
    ok, margin = in_domain(model, tilt)
    if not ok or margin <= 0:
        raise DomainError(f"tilt {tilt.tolist()} is not interior to the cumulant domain")
    if not np.any(tilt):
        return model
    drift = model.drift + model.cov @ tilt
    jumps = None
    if model.jumps is not None:
        factor, law = model.jumps.law.tilted(tilt)
        jumps = JumpComponent(model.jumps.intensity * factor, law)
    return LevyModel(drift, model.cov, jumps)


# ---------------------------------------------------------------------------
# Chunked execution
# ---------------------------------------------------------------------------


def chunk_stream(master_seed: int, chunk_index: int) -> np.random.BitGenerator:
    return np.random.Philox(np.random.SeedSequence(master_seed, spawn_key=(chunk_index,)))


def resolve_workers(workers: Optional[int] = None) -> int:
    if workers is None:
        workers = int(os.environ.get("LEVY_ORTHANT_WORKERS", "1") or 1)
    return max(1, int(workers))


def _run_chunks(spec, cfg: SimConfig, workers: Optional[int], run_paths=None):
    run_paths = run_paths or _backend.run_paths
    sizes = [cfg.chunk_size] * (cfg.n_paths // cfg.chunk_size)
    if cfg.n_paths % cfg.chunk_size:
        sizes.append(cfg.n_paths % cfg.chunk_size)

    def one(i):
        return (sizes[i],) + tuple(run_paths(chunk_stream(cfg.master_seed, i), sizes[i], spec))

    workers = resolve_workers(workers)
    if workers == 1 or len(sizes) == 1:
        return [one(i) for i in range(len(sizes))]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(one, range(len(sizes))))


def _reduce(chunks):
    n = hits = unfinished = 0
    wsum = wsq = wmax = 0.0
    for c_n, c_hits, c_wsum, c_wsq, c_wmax, c_unf in chunks:
        n += c_n
        hits += c_hits
        wsum += c_wsum
        wsq += c_wsq
        wmax = max(wmax, c_wmax)
        unfinished += c_unf
    return n, hits, wsum, wsq, wmax, unfinished


def write_chunk_csv(path, estimate: HitEstimate) -> None:
    """Per-chunk debug dump: ``chunk,n,hits_or_weightsum,weightsq_sum,max_weight``."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["chunk", "n", "hits_or_weightsum", "weightsq_sum", "max_weight"])
        for i, (c_n, _hits, c_wsum, c_wsq, c_wmax, _unf) in enumerate(estimate.chunks):
            w.writerow([i, c_n, repr(c_wsum), repr(c_wsq), repr(c_wmax)])


def wilson_interval(hits: int, n: int, z: float = Z95) -> tuple[float, float]:
    p = hits / n
    denom = 1.0 + z * z / n
    centre = (p + z * z / (2 * n)) / denom
    half = z * math.sqrt(p * (1 - p) / n + z * z / (4 * n * n)) / denom
    return max(0.0, min(p, centre - half)), min(1.0, max(p, centre + half))


# ---------------------------------------------------------------------------
# Estimators
# ---------------------------------------------------------------------------


def _threshold(target, s: float) -> np.ndarray:
    if not s > 0:
        raise ConfigError("s", "must be positive")
    return s * target.g


def simulate_hitting_crude(
    model: LevyModel,
    target,
    s: float,
    cfg: SimConfig,
    workers: Optional[int] = None,
    run_paths=None,
) -> HitEstimate:
    """Crude Monte Carlo estimate of ``P(tau(sG) <= horizon)``.

    The finite horizon makes this a lower bound of the infinite-horizon
    probability, hence ``truncation_bias_flag`` is always set.
    """
    target = target if isinstance(target, OrthantTarget) else OrthantTarget(target)
    if not isinstance(cfg, SimConfig):
        raise ConfigError("sim", "expected a SimConfig")
    n_steps = max(1, int(round(cfg.horizon / cfg.delta)))
    spec = build_spec(model, _threshold(target, s), cfg.delta, n_steps, MODE_CRUDE)
    chunks = _run_chunks(spec, cfg, workers, run_paths)
    n, hits, _, _, _, unfinished = _reduce(chunks)
    p = hits / n
    se = math.sqrt(p * (1 - p) / n)
    return HitEstimate(
        s=float(s),
        method="crude",
        p_hat=p,
        std_err=se,
        ci95=wilson_interval(hits, n),
        n_paths=n,
        n_hits=hits,
        delta=cfg.delta,
        truncation_bias_flag=True,
        seed=cfg.master_seed,
        max_weight=1.0 if hits else 0.0,
        n_unfinished=unfinished,
        chunks=chunks,
    )


def simulate_hitting_is(
    model: LevyModel,
    target,
    s: float,
    cfg: SimConfig,
    workers: Optional[int] = None,
    report: Optional[ConditionReport] = None,
    force: bool = False,
    cap_factor: float = DEFAULT_CAP_FACTOR,
    tol: ToleranceProfile = DEFAULT_TOL,
    run_paths=None,
) -> HitEstimate:
    """Importance-sampling estimate of ``P(tau(sG) < inf)`` under the Cramér tilt.

    Paths run under the model tilted by ``lam* = N(r_G)``, which has ``K(lam*) = 0``,
    so the likelihood ratio on hitting at state ``x`` is ``exp(-<lam*, x>)``.
    Paths are capped at ``cap_factor`` times the expected hitting time ``s / r_G``;
    capped paths contribute zero weight and are counted in ``n_unfinished``.
    """
    target = target if isinstance(target, OrthantTarget) else OrthantTarget(target)
    if not isinstance(cfg, SimConfig):
        raise ConfigError("sim", "expected a SimConfig")
    if report is None:
        report = check_conditions(model, target, tol)
    if report.c3.overall != "holds" and not force:
        raise ConditionError(f"importance sampling needs condition C3 to hold (got {report.c3.overall})")
    lam = np.asarray(report.normal, dtype=float)
    if not np.all(lam > 0):
        raise ConditionError("the tilt N(r_G) must have strictly positive components")
    tilted = tilt_model(model, lam)
    cap_time = cap_factor * s / report.r_g
    n_steps = max(1, int(math.ceil(cap_time / cfg.delta)))
    spec = build_spec(tilted, _threshold(target, s), cfg.delta, n_steps, MODE_IMPORTANCE, lam=lam)
    chunks = _run_chunks(spec, cfg, workers, run_paths)
    n, hits, wsum, wsq, wmax, unfinished = _reduce(chunks)
    if unfinished:
        log.warning("%d of %d importance-sampled paths hit the time cap", unfinished, n)
    p = wsum / n
    var = max(0.0, (wsq - n * p * p) / (n - 1)) if n > 1 else 0.0
    se = math.sqrt(var / n)
    bound = math.exp(-s * report.d_of_g)
    return HitEstimate(
        s=float(s),
        method="importance",
        p_hat=p,
        std_err=se,
        ci95=(max(0.0, p - Z95 * se), min(1.0, p + Z95 * se)),
        n_paths=n,
        n_hits=hits,
        delta=cfg.delta,
        truncation_bias_flag=False,
        seed=cfg.master_seed,
        max_weight=wmax,
        weight_bound=bound,
        n_unfinished=unfinished,
        chunks=chunks,
    )


def estimate_to_dict(est: HitEstimate) -> dict:
    out = asdict(est)
    out.pop("chunks")
    out["ci95"] = list(est.ci95)
    return out
