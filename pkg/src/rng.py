#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Deterministic Random Streams

RngStream wraps random.Random (Mersenne Twister) seeded with a 64-bit integer.
Child streams are derived by hashing the parent seed with integer keys, so a
replicate r at clustering level l always draws from
RngStream(master_seed).spawn(l).spawn(r) no matter in which order work runs.
"""

import hashlib
import random
import struct
from typing import Sequence, TypeVar

T = TypeVar("T")

SEED_MASK = (1 << 64) - 1


def derive_seed(*keys: int) -> int:
    """
    由若干整数派生64位种子 (BLAKE2b, 大端打包)

    Args:
        keys: 父种子及派生键

    Returns:
        64位无符号整数
    """
    payload = b"".join(struct.pack(">Q", k & SEED_MASK) for k in keys)
    digest = hashlib.blake2b(payload, digest_size=8).digest()
    return int.from_bytes(digest, "big")


class RngStream:
    """可复现的随机数流"""

    def __init__(self, seed: int):
        if seed < 0 or seed > SEED_MASK:
            raise ValueError(f"seed must be a 64-bit unsigned integer, got {seed}")
        self._seed = seed
        self._rng = random.Random(seed)

    @property
    def seed(self) -> int:
        return self._seed

    def spawn(self, *keys: int) -> "RngStream":
        """派生子随机流,不消耗本流的状态"""
        return RngStream(derive_seed(self._seed, *keys))

    def random(self) -> float:
        return self._rng.random()

    def randrange(self, n: int) -> int:
        return self._rng.randrange(n)

    def choice(self, seq: Sequence[T]) -> T:
        return seq[self._rng.randrange(len(seq))]

    def __repr__(self) -> str:
        return f"RngStream(seed={self._seed})"
