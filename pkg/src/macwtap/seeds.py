"""Deterministic random-stream derivation.

Every random quantity in the package is drawn from a stream derived from a
single 64-bit master seed plus a small integer path, via
``numpy.random.SeedSequence((master, domain, *path))``.  The same
(master, domain, path) triple always yields the same stream, independent of
worker count or evaluation order.

Domains:

========  ==============================================
0x01      auxiliary-distribution sampling (hull search)
0x02      binning maps, subkey = user index
0x03      Monte-Carlo decoding trials, subkey = trial id
0x04      lemma-check binning draws, subkey = draw id
0x05      concentration-bound trials
========  ==============================================
"""

from __future__ import annotations

import numpy as np

DOMAIN_AUX = 0x01
DOMAIN_BINNING = 0x02
DOMAIN_TRIAL = 0x03
DOMAIN_DRAW = 0x04
DOMAIN_CHERNOFF = 0x05


def stream(master_seed: int, domain: int, *path: int) -> np.random.Generator:
    """Generator for the (master, domain, path) stream."""
    ss = np.random.SeedSequence((int(master_seed), int(domain), *map(int, path)))
    return np.random.Generator(np.random.PCG64(ss))
