"""Pure-Python path kernel.

Consumes the bit generator in exactly the same order, with the same floating
point operations, as the compiled kernel, so both give bit-identical results.
"""

from __future__ import annotations

import math

import numpy as np


def run_paths(bit_generator, n_paths: int, spec):
    """Simulate ``n_paths`` paths; return ``(n_hits, wsum, wsq, wmax, n_unfinished)``."""
    gen = np.random.Generator(bit_generator)
    normal = gen.standard_normal
    expo = gen.standard_exponential
    unif = gen.random

    d = spec.dim
    rd = range(d)
    drift = spec.drift.tolist()
    chol = spec.chol.tolist()
    has_gauss = spec.has_gauss
    intensity = spec.intensity
    kind = spec.jump_kind
    jvec = spec.jvec.tolist()
    jrate = spec.jrate
    jchol = spec.jchol.tolist()
    atoms = spec.atoms.tolist()
    cum = spec.cum.tolist()
    b = spec.threshold.tolist()
    lam = spec.lam.tolist()
    delta = spec.delta
    n_steps = spec.n_steps
    mode = spec.mode

    def advance(x, h):
        if has_gauss:
            z = [normal() for _ in rd]
            sh = math.sqrt(h)
            for j in rd:
                acc = 0.0
                row = chol[j]
                for k in range(j + 1):
                    acc = acc + row[k] * z[k]
                x[j] = x[j] + (drift[j] * h + sh * acc)
        else:
            for j in rd:
                x[j] = x[j] + drift[j] * h

    def jump(x):
        if kind == 1:
            c = expo() / jrate
            for j in rd:
                x[j] = x[j] + c * jvec[j]
        elif kind == 2:
            z = [normal() for _ in rd]
            for j in rd:
                acc = 0.0
                row = jchol[j]
                for k in range(j + 1):
                    acc = acc + row[k] * z[k]
                x[j] = x[j] + (jvec[j] + acc)
        elif kind == 3:
            u = unif()
            k = len(cum) - 1
            for i, cp in enumerate(cum):
                if u < cp:
                    k = i
                    break
            a = atoms[k]
            for j in rd:
                x[j] = x[j] + a[j]

    def inside(x):
        for j in rd:
            if not x[j] > b[j]:
                return False
        return True

    n_hits = n_unfinished = 0
    wsum = wsq = wmax = 0.0
    for _ in range(n_paths):
        x = [0.0] * d
        nj = expo() / intensity if intensity > 0 else math.inf
        hit = False
        for _step in range(n_steps):
            rem = delta
            while nj < rem:
                advance(x, nj)
                rem = rem - nj
                jump(x)
                if inside(x):
                    hit = True
                    break
                nj = expo() / intensity
            if hit:
                break
            advance(x, rem)
            nj = nj - rem
            if inside(x):
                hit = True
                break
        if hit:
            n_hits += 1
            if mode == 1:
                acc = 0.0
                for j in rd:
                    acc = acc + lam[j] * x[j]
                w = math.exp(-acc)
            else:
                w = 1.0
            wsum = wsum + w
            wsq = wsq + w * w
            if w > wmax:
                wmax = w
        else:
            n_unfinished += 1
    return n_hits, wsum, wsq, wmax, n_unfinished
