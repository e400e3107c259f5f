"""
Детерминированный генератор случайных чисел SplitMix64

Переход состояния (все операции по модулю 2**64):

    state = state + 0x9E3779B97F4A7C15
    z = state
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
    z = (z ^ (z >> 27)) * 0x94D049BB133111EB
    out = z ^ (z >> 31)

Вещественное в [0, 1): (out >> 11) / 2**53. Последовательность одинакова
на любой платформе и в любом языке.
"""
from typing import Sequence, TypeVar

from uavplace.core.exceptions import InvalidParams

MASK64 = 0xFFFF_FFFF_FFFF_FFFF
GOLDEN_GAMMA = 0x9E37_79B9_7F4A_7C15
TWO_POW_53 = float(1 << 53)

T = TypeVar("T")


class SplitMix64:
    """Минимальный SplitMix64, воспроизводимый между языками"""

    def __init__(self, seed: int):
        if not 0 <= seed <= MASK64:
            raise InvalidParams(f"seed должен быть в [0, 2**64): {seed}")
        self.state = seed

    def next_u64(self) -> int:
        """Следующее целое в [0, 2**64)"""
        self.state = (self.state + GOLDEN_GAMMA) & MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58_476D_1CE4_E5B9) & MASK64
        z = ((z ^ (z >> 27)) * 0x94D0_49BB_1331_11EB) & MASK64
        return z ^ (z >> 31)

    def uniform01(self) -> float:
        """Вещественное в [0, 1) с 53 значащими битами"""
        return (self.next_u64() >> 11) / TWO_POW_53

    def uniform(self, a: float, b: float) -> float:
        """Вещественное в [a, b)"""
        return a + (b - a) * self.uniform01()

    def randbelow(self, n: int) -> int:
        """Целое в [0, n) без смещения (отбраковка)"""
        if n <= 0:
            raise ValueError(f"n должно быть положительным: {n}")
        limit = (1 << 64) - ((1 << 64) % n)
        while True:
            value = self.next_u64()
            if value < limit:
                return value % n

    def choice(self, items: Sequence[T]) -> T:
        return items[self.randbelow(len(items))]


def derive_seed(seed: int, offset: int) -> int:
    """Зерно перезапуска: seed + offset по модулю 2**64"""
    return (seed + offset) & MASK64
