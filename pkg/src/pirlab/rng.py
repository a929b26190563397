"""Counter-based random streams keyed by (master seed, agent, step).

Each step of a run reads a block of Philox output whose counter is fixed by
the step number; agent ``i`` always takes the ``i``-th double of that
block.  A draw therefore depends only on ``(seed, agent, step)``, never on
how many draws other agents or steps consumed, which keeps runs replayable
and lets agents be advanced in any order.
"""

from __future__ import annotations

import numpy as np


def derive_seed(*parts: int) -> int:
    """Stable 63-bit seed from a tuple of non-negative integers."""
    state = np.random.SeedSequence([int(p) for p in parts]).generate_state(2, dtype=np.uint32)
    return (int(state[0]) << 31) ^ int(state[1])


class CounterStreams:
    def __init__(self, seed: int):
        self.seed = int(seed)
        self._key = np.random.SeedSequence(self.seed).generate_state(2, dtype=np.uint64)

    def uniforms(self, step: int, size: int) -> np.ndarray:
        """Doubles in [0, 1) for agents ``0 .. size-1`` at ``step``."""
        counter = np.array([0, 0, 0, int(step)], dtype=np.uint64)
        gen = np.random.Generator(np.random.Philox(key=self._key, counter=counter))
        return gen.random(size)

    def uniform(self, agent: int, step: int) -> float:
        return float(self.uniforms(step, agent + 1)[agent])
