"""Counter-based uniform draws.

Every draw is addressed by ``(seed, stream, substream, index)`` and computed
directly from a Philox block, so a value never depends on how many values were
drawn before it or on which thread asked for it.
"""

import numpy as np

_MASK64 = (1 << 64) - 1
_WORDS_PER_BLOCK = 4

# stream tags keep unrelated consumers of the same seed apart
REALIZATION = 0x5245414C
WORD = 0x574F5244
UNIFORM = 0x554E4946


def uniforms(seed, stream, start, count, substream=0):
    """Return ``count`` doubles in [0, 1) for indices ``start .. start+count-1``."""
    if count <= 0:
        return np.empty(0)
    block, offset = divmod(int(start), _WORDS_PER_BLOCK)
    bitgen = np.random.Philox(
        key=[int(seed) & _MASK64, int(stream) & _MASK64],
        counter=[block, int(substream) & _MASK64, 0, 0],
    )
    raw = bitgen.random_raw(offset + int(count))[offset:]
    return (raw >> np.uint64(11)).astype(np.float64) * (1.0 / 9007199254740992.0)


def generator(seed, stream, substream=0):
    """A numpy Generator on a Philox stream, for bulk draws owned by one consumer."""
    bitgen = np.random.Philox(
        key=[int(seed) & _MASK64, int(stream) & _MASK64],
        counter=[0, int(substream) & _MASK64, 0, 0],
    )
    return np.random.Generator(bitgen)
