"""Reproducible random streams.

One Philox (counter-based) generator per documented stream:

    stream 0      latent Bernoulli index states,
    stream m      uniforms for margin m (1-based).

Streams are derived with ``SeedSequence(entropy=seed, spawn_key=(index,))``,
so adding a margin never perturbs the draws of existing streams and results
do not depend on how work is sharded across workers.
"""

from __future__ import annotations

import numpy as np


def stream(seed: int, index: int) -> np.random.Generator:
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=(int(index),))
    return np.random.Generator(np.random.Philox(ss))
