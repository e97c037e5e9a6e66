"""Deterministic, splittable random streams.

Every stochastic quantity in the engine draws from its own substream of a
Philox4x64 counter-based generator.  The substream key is the first 128 bits
of ``SHA-256(seed || 0x1f || name)``, so streams are independent of each other
and of evaluation order: adding a new named input never perturbs existing
streams, and the mapping ``(seed, name, trial index) -> uniform`` is fixed.

Philox advances its 128-bit counter in blocks of four 64-bit outputs, and
``numpy`` consumes exactly one 64-bit word per ``float64`` uniform.  Chunked
generation is therefore bit-identical to whole-array generation as long as
chunk boundaries are multiples of four; :func:`substream_uniforms` enforces
that alignment so Monte Carlo runs give byte-identical results for any worker
count.
"""

from __future__ import annotations

import hashlib

import numpy as np
from numpy.random import Generator, Philox

BLOCK = 4  # 64-bit outputs per Philox counter increment

_SEP = b"\x1f"  # unambiguous (seed, name) encoding


def _digest(seed: int, name: str) -> bytes:
    if seed < 0:
        raise ValueError(f"seed must be unsigned, got {seed}")
    payload = str(int(seed)).encode("ascii") + _SEP + name.encode("utf-8")
    return hashlib.sha256(payload).digest()


def derive_key(seed: int, name: str) -> int:
    """128-bit Philox key for the (seed, name) substream."""
    return int.from_bytes(_digest(seed, name)[:16], "little")


def derive_seed(seed: int, name: str) -> int:
    """64-bit child seed, for handing an independent seed to a sub-run."""
    return int.from_bytes(_digest(seed, name)[16:24], "little")


def substream_uniforms(seed: int, name: str, n: int, start: int = 0) -> np.ndarray:
    """Uniform [0, 1) draws ``start .. start+n`` of the (seed, name) substream.

    ``start`` must be a multiple of 4 so the Philox counter can be advanced
    exactly; the result equals the corresponding slice of a single whole-array
    generation.
    """
    if n < 0:
        raise ValueError(f"n must be non-negative, got {n}")
    if start % BLOCK != 0:
        raise ValueError(f"start must be a multiple of {BLOCK}, got {start}")
    bitgen = Philox(key=derive_key(seed, name))
    if start:
        bitgen.advance(start // BLOCK)
    return Generator(bitgen).random(n)


def aligned_chunks(n: int, chunk_size: int) -> list[tuple[int, int]]:
    """(start, count) pairs covering ``range(n)`` with 4-aligned starts."""
    if chunk_size <= 0:
        raise ValueError(f"chunk_size must be positive, got {chunk_size}")
    chunk_size += (-chunk_size) % BLOCK
    return [(s, min(chunk_size, n - s)) for s in range(0, n, chunk_size)]
