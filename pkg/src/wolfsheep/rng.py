"""Counter-based random number streams.

Every random draw in a run is addressed by (master seed, purpose, agent id,
tick, draw index), so the same address always yields the same value no matter
how many threads run or in what order agents are visited.  The generator is
splitmix64: a stream key is derived by folding the address fields through the
splitmix64 finalizer, and draw ``i`` of a stream is ``mix64(key + (i+1)*GOLDEN)``.

The algorithm name ("splitmix64") is pinned in the run config schema so that
result files declare exactly how their randomness was produced.  fastcog.py
carries a numba mirror of `mix64`/`draw_at`; the two are tested for bitwise
agreement.
"""

from __future__ import annotations

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15

ALGORITHM = "splitmix64"

# Stream purposes. Values are part of the reproducibility contract: changing
# them changes every run.
PURPOSE_INIT = 1        # world initialization
PURPOSE_SCHEDULER = 2   # per-tick execution order shuffle
PURPOSE_BEHAVIOR = 3    # main-model per-agent draws (turns, reproduction)
PURPOSE_ROLLOUT = 4     # cognition rollout draws
PURPOSE_TIEBREAK = 5    # cognition argmax tie-breaking

# Draw indices >= CELL_DRAW_BASE within a rollout stream are reserved for
# unobserved-cell resolution, indexed by flat cell index so resolution order
# cannot matter. Sequential draws stay far below this.
CELL_DRAW_BASE = 1 << 40


def mix64(z: int) -> int:
    """splitmix64 finalizer on a 64-bit value."""
    z &= MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def stream_key(*parts: int) -> int:
    """Fold address fields (seed, purpose, agent id, tick, ...) into a stream key."""
    h = 0
    for p in parts:
        h = mix64((h + (p & MASK64) + GOLDEN) & MASK64)
    return h


def draw_u64(key: int, index: int) -> int:
    return mix64((key + ((index + 1) * GOLDEN & MASK64)) & MASK64)


def draw_at(key: int, index: int) -> float:
    """Draw `index` of the stream `key`, as a float64 in [0, 1)."""
    return (draw_u64(key, index) >> 11) * 2.0 ** -53


class Stream:
    """Sequential view of a counter-based stream.

    Cheap to create; holds only the key and a draw counter. All derived
    quantities (uniform, randint, shuffle) consume counted draws, so replaying
    the same key gives the same sequence.
    """

    __slots__ = ("key", "counter")

    def __init__(self, *parts: int, key: int | None = None):
        self.key = stream_key(*parts) if key is None else key
        self.counter = 0

    def u01(self) -> float:
        v = draw_at(self.key, self.counter)
        self.counter += 1
        return v

    def uniform(self, lo: float, hi: float) -> float:
        return lo + self.u01() * (hi - lo)

    def randint(self, n: int) -> int:
        """Uniform integer in [0, n)."""
        v = int(self.u01() * n)
        return n - 1 if v >= n else v

    def bernoulli(self, p: float) -> bool:
        return self.u01() < p

    def shuffle(self, items: list) -> None:
        """In-place Fisher-Yates shuffle."""
        for i in range(len(items) - 1, 0, -1):
            j = self.randint(i + 1)
            items[i], items[j] = items[j], items[i]
