"""Counter-based random number streams.

Every sampler iteration owns a family of independent streams derived from
(seed, iteration index) via the Philox counter words, so reruns with the same
seed are bit-exact and iterations can be executed in any order or in parallel
without changing the results.  Streams are prefix-stable: drawing a block of
n variates yields the same values as n single draws.
"""

from __future__ import annotations

import numpy as np

__all__ = ["derive_seed", "key_from_seed", "IterationStreams", "StreamFactory"]


def key_from_seed(seed: int) -> np.ndarray:
    """Expand a user seed into the 128-bit Philox key."""
    return np.random.SeedSequence(seed).generate_state(2, np.uint64)


def derive_seed(*entropy: int) -> int:
    """Deterministically derive a child seed from a tuple of integers."""
    return int(np.random.SeedSequence(list(entropy)).generate_state(1, np.uint64)[0])


class _KeyedSeedSequence(np.random.SeedSequence):
    """SeedSequence that memoizes the two-word Philox key request.

    Every stream construction asks the sequence for the same two 64-bit
    words; the hashing behind ``generate_state`` dominates stream cost,
    so that one request is answered from a read-only cache.  All other
    requests fall through unchanged.
    """

    def __init__(self, entropy: int):
        super().__init__(entropy)
        key = super().generate_state(2, np.uint64)
        key.setflags(write=False)
        self._philox_key = key

    def generate_state(self, n_words, dtype=np.uint32):
        if n_words == 2 and dtype is np.uint64:
            return self._philox_key
        return super().generate_state(n_words, dtype)


class IterationStreams:
    """Allocator of independent generators for one sampler iteration.

    Stream ``s`` of iteration ``i`` starts the Philox counter at
    ``[0, s, i, lane]``; consumption only advances the lowest word, so
    distinct slots never overlap.  Allocation order must be deterministic,
    which holds because the samplers request streams in program order.

    Construction goes through the run's SeedSequence, whose first two
    64-bit words are the Philox key (the same value ``key_from_seed``
    reports); seeding from the cached sequence instead of a raw key keeps
    Philox from gathering fresh OS entropy on every stream.
    """

    def __init__(self, seed_seq: np.random.SeedSequence, iteration: int, lane: int = 0):
        self._seed_seq = seed_seq
        self._iteration = iteration
        self._lane = lane
        self._next_slot = 0

    def stream(self) -> np.random.Generator:
        slot = self._next_slot
        self._next_slot += 1
        return np.random.Generator(
            np.random.Philox(
                seed=self._seed_seq,
                counter=[0, slot, self._iteration, self._lane],
            )
        )


class StreamFactory:
    """Produces the per-iteration stream allocators for one run."""

    def __init__(self, seed: int, lane: int = 0):
        self.seed = int(seed)
        self._seed_seq = _KeyedSeedSequence(self.seed)
        self._lane = lane

    def iteration(self, index: int) -> IterationStreams:
        return IterationStreams(self._seed_seq, index, self._lane)
