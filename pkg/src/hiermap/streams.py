"""Deterministic random-number streams.

Every stochastic routine in the package draws from a generator produced by
:func:`generator`, so that a single 64-bit experiment seed reproduces every
figure and table bit-for-bit.

Scheme
------
The base generator is numpy's PCG64 (a member of the PCG family, XSL-RR
128/64 variant).  Independent streams are derived with
``SeedSequence(seed, spawn_key=(purpose, index))`` where ``purpose`` is one
of the codes below and ``index`` distinguishes replicates, chain steps or
iterations within a purpose:

====================  ====
purpose               code
====================  ====
TRUTH   (prior draw)     0
NOISE   (obs. noise)     1
XI      (white data)     2
CONDITIONAL (posterior)  3
GIBBS   (MCMC moves)     4
EM      (E-step draws)   5
PATHS   (kernel paths)   6
====================  ====

Normal variates are produced by the Box-Muller transform applied to the
uniform stream (see :func:`normals`), not by the generator's native normal
method, so the uniform-to-normal mapping is pinned by this module rather
than by the numpy version.
"""

from __future__ import annotations

import numpy as np

TRUTH = 0
NOISE = 1
XI = 2
CONDITIONAL = 3
GIBBS = 4
EM = 5
PATHS = 6


def generator(seed: int, purpose: int, index: int = 0) -> np.random.Generator:
    """Return the PCG64 generator for ``(seed, purpose, index)``."""
    ss = np.random.SeedSequence(int(seed), spawn_key=(int(purpose), int(index)))
    return np.random.Generator(np.random.PCG64(ss))


def normals(rng: np.random.Generator, n: int) -> np.ndarray:
    """Draw ``n`` standard normals via Box-Muller on ``rng``'s uniforms.

    Uniforms are consumed pairwise in order: pair ``i`` uses uniforms
    ``(2i, 2i+1)`` and yields the (cos, sin) couple, interleaved in the
    output.  Consequently the first ``m`` outputs are identical whichever
    ``n >= m`` is requested (prefix stability), which is what makes
    truncation-consistent data generation possible.
    """
    n = int(n)
    if n < 0:
        raise ValueError("n must be nonnegative")
    if n == 0:
        return np.empty(0)
    m = (n + 1) // 2
    u = rng.random(2 * m)
    u1 = u[0::2]
    u2 = u[1::2]
    # 1 - u1 lies in (0, 1], so the log is finite.
    r = np.sqrt(-2.0 * np.log1p(-u1))
    ang = 2.0 * np.pi * u2
    out = np.empty(2 * m)
    out[0::2] = r * np.cos(ang)
    out[1::2] = r * np.sin(ang)
    return out[:n]
