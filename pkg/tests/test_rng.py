import numpy as np
import pytest
from hypothesis import given, strategies as st

from objsynth.rng import MASK64, Pcg32, SeedTree, derive_key, splitmix64


def test_pcg32_reference_sequence():
    # reference values for pcg32 seeded with (42, 54), from the canonical
    # demo program of the PCG family
    rng = Pcg32(seed=42, stream=54)
    expected = [0xA15C02B7, 0x7B47F409, 0xBA1D3330, 0x83D2F293, 0xBFA4784B, 0xCBED606E]
    got = [rng.next_u32() for _ in range(6)]
    assert got == expected


def test_uniform_range_and_determinism():
    a = Pcg32(seed=7, stream=1)
    b = Pcg32(seed=7, stream=1)
    xs = [a.uniform() for _ in range(1000)]
    ys = [b.uniform() for _ in range(1000)]
    assert xs == ys
    assert all(0.0 <= x < 1.0 for x in xs)
    assert abs(np.mean(xs) - 0.5) < 0.05


def test_streams_differ():
    a = Pcg32(seed=7, stream=1)
    b = Pcg32(seed=7, stream=2)
    assert [a.next_u32() for _ in range(8)] != [b.next_u32() for _ in range(8)]


def test_randint_bounds_and_coverage():
    rng = Pcg32(seed=3, stream=9)
    draws = [rng.randint(5) for _ in range(2000)]
    assert set(draws) == {0, 1, 2, 3, 4}
    with pytest.raises(ValueError):
        rng.randint(0)


def test_derive_key_distinct_and_stable():
    k1 = derive_key(1, "arrange", 0)
    k2 = derive_key(1, "arrange", 1)
    k3 = derive_key(1, "cameras", 0)
    assert len({k1, k2, k3}) == 3
    assert derive_key(1, "arrange", 0) == k1
    # int vs str of same rendering must not collide
    assert derive_key(12) != derive_key("12")


def test_seed_tree_reproducible():
    t1 = SeedTree(99)
    t2 = SeedTree(99)
    s1 = t1.stream("render", 3, 4)
    s2 = t2.stream("render", 3, 4)
    assert [s1.next_u32() for _ in range(16)] == [s2.next_u32() for _ in range(16)]
    assert t1.stream("render", 3, 5).next_u32() != t1.stream("render", 3, 4).next_u32()


@given(st.integers(min_value=0, max_value=MASK64))
def test_splitmix_outputs_in_range(state):
    new_state, out = splitmix64(state)
    assert 0 <= new_state <= MASK64
    assert 0 <= out <= MASK64


@given(st.integers(min_value=1, max_value=1000), st.integers(min_value=0, max_value=2**32))
def test_randint_always_in_range(n, seed):
    rng = Pcg32(seed=seed, stream=0)
    for _ in range(10):
        assert 0 <= rng.randint(n) < n
