"""Тесты генератора SplitMix64"""
import pytest

from uavplace.core.exceptions import InvalidParams
from uavplace.core.rng import MASK64, SplitMix64, derive_seed


class TestSplitMix64:

    def test_reference_output_for_zero_seed(self):
        assert SplitMix64(0).next_u64() == 0xE220A8397B1DCDAF

    def test_same_seed_same_sequence(self):
        a, b = SplitMix64(42), SplitMix64(42)
        assert [a.next_u64() for _ in range(10)] == [b.next_u64() for _ in range(10)]

    def test_uniform01_range_and_grid(self):
        rng = SplitMix64(7)
        for _ in range(1000):
            value = rng.uniform01()
            assert 0.0 <= value < 1.0
            assert (value * 2**53).is_integer()

    def test_randbelow_range(self):
        rng = SplitMix64(3)
        draws = {rng.randbelow(5) for _ in range(500)}
        assert draws == {0, 1, 2, 3, 4}

    def test_rejects_out_of_range_seed(self):
        with pytest.raises(InvalidParams):
            SplitMix64(-1)
        with pytest.raises(InvalidParams):
            SplitMix64(2**64)

    def test_derive_seed_wraps(self):
        assert derive_seed(MASK64, 1) == 0
        assert derive_seed(10, 3) == 13
