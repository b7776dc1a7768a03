# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled path kernel. Mirrors ``_fallback.run_paths`` draw for draw."""

from cpython.pycapsule cimport PyCapsule_GetPointer, PyCapsule_IsValid
from libc.math cimport exp, sqrt, INFINITY
from numpy.random cimport bitgen_t
from numpy.random.c_distributions cimport random_standard_exponential, random_standard_normal

import numpy as np


cdef inline void _advance(bitgen_t *rng, double h, Py_ssize_t d, int has_gauss,
                          const double[::1] drift, const double[:, ::1] chol,
                          double[::1] x, double[::1] z) noexcept nogil:
    cdef Py_ssize_t j, k
    cdef double sh, acc
    if has_gauss:
        for k in range(d):
            z[k] = random_standard_normal(rng)
        sh = sqrt(h)
        for j in range(d):
            acc = 0.0
            for k in range(j + 1):
                acc = acc + chol[j, k] * z[k]
            x[j] = x[j] + (drift[j] * h + sh * acc)
    else:
        for j in range(d):
            x[j] = x[j] + drift[j] * h


cdef inline bint _inside(Py_ssize_t d, double[::1] x, const double[::1] b) noexcept nogil:
    cdef Py_ssize_t j
    for j in range(d):
        if not x[j] > b[j]:
            return False
    return True


def run_paths(bit_generator, Py_ssize_t n_paths, spec):
    """Simulate ``n_paths`` paths; return ``(n_hits, wsum, wsq, wmax, n_unfinished)``."""
    capsule = bit_generator.capsule
    if not PyCapsule_IsValid(capsule, "BitGenerator"):
        raise ValueError("invalid bit generator")
    cdef bitgen_t *rng = <bitgen_t *> PyCapsule_GetPointer(capsule, "BitGenerator")

    cdef Py_ssize_t d = spec.dim
    cdef const double[::1] drift = spec.drift
    cdef const double[:, ::1] chol = spec.chol
    cdef int has_gauss = spec.has_gauss
    cdef double intensity = spec.intensity
    cdef int kind = spec.jump_kind
    cdef const double[::1] jvec = spec.jvec
    cdef double jrate = spec.jrate
    cdef const double[:, ::1] jchol = spec.jchol
    cdef const double[:, ::1] atoms = spec.atoms
    cdef const double[::1] cum = spec.cum
    cdef Py_ssize_t n_atoms = spec.cum.shape[0]
    cdef const double[::1] b = spec.threshold
    cdef const double[::1] lam = spec.lam
    cdef double delta = spec.delta
    cdef long long n_steps = spec.n_steps
    cdef int mode = spec.mode

    cdef double[::1] x = np.zeros(d)
    cdef double[::1] z = np.zeros(d)

    cdef Py_ssize_t p, j, k
    cdef long long step
    cdef double nj, rem, c, u, acc, w
    cdef bint hit
    cdef long long n_hits = 0, n_unfinished = 0
    cdef double wsum = 0.0, wsq = 0.0, wmax = 0.0

    with bit_generator.lock, nogil:
        for p in range(n_paths):
            for j in range(d):
                x[j] = 0.0
            if intensity > 0:
                nj = random_standard_exponential(rng) / intensity
            else:
                nj = INFINITY
            hit = False
            for step in range(n_steps):
                rem = delta
                while nj < rem:
                    _advance(rng, nj, d, has_gauss, drift, chol, x, z)
                    rem = rem - nj
                    if kind == 1:
                        c = random_standard_exponential(rng) / jrate
                        for j in range(d):
                            x[j] = x[j] + c * jvec[j]
                    elif kind == 2:
                        for k in range(d):
                            z[k] = random_standard_normal(rng)
                        for j in range(d):
                            acc = 0.0
                            for k in range(j + 1):
                                acc = acc + jchol[j, k] * z[k]
                            x[j] = x[j] + (jvec[j] + acc)
                    elif kind == 3:
                        u = rng.next_double(rng.state)
                        k = n_atoms - 1
                        for j in range(n_atoms):
                            if u < cum[j]:
                                k = j
                                break
                        for j in range(d):
                            x[j] = x[j] + atoms[k, j]
                    if _inside(d, x, b):
                        hit = True
                        break
                    nj = random_standard_exponential(rng) / intensity
                if hit:
                    break
                _advance(rng, rem, d, has_gauss, drift, chol, x, z)
                nj = nj - rem
                if _inside(d, x, b):
                    hit = True
                    break
            if hit:
                n_hits += 1
                if mode == 1:
                    acc = 0.0
                    for j in range(d):
                        acc = acc + lam[j] * x[j]
                    w = exp(-acc)
                else:
                    w = 1.0
                wsum = wsum + w
                wsq = wsq + w * w
                if w > wmax:
                    wmax = w
            else:
                n_unfinished += 1
    return n_hits, wsum, wsq, wmax, n_unfinished
