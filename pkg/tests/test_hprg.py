import pytest
from hypothesis import given
from hypothesis import strategies as st

from hsecagg.counters import OpCounter
from hsecagg.hprg import expand, generator_hash, hash_points
from hsecagg.modmath import group_mul, hash_to_group


def test_toy_expand_with_generator_hash(toy):
    # H(j) = 4^j mod 23, so expand(2) = [4^2, 4^4] = [16, 3].
    assert expand(toy, 2, 2, hash_fn=generator_hash(toy)) == [16, 3]


def test_zero_seed_gives_identities(g64):
    assert expand(g64, 0, 5) == [1] * 5


def test_elements_are_hash_powers(g64):
    r = expand(g64, 12345, 4, b"tag")
    assert r == [pow(hash_to_group(g64, j, b"tag"), 12345, g64.p) for j in range(1, 5)]


def test_deterministic_and_prefix_consistent(g64):
    full = expand(g64, 99, 10)
    assert expand(g64, 99, 10) == full
    for k in range(1, 10):
        assert expand(g64, 99, k) == full[:k]


def test_tag_changes_stream(g64):
    assert expand(g64, 5, 3, b"s1") != expand(g64, 5, 3, b"s2")


def test_preconditions(g64):
    with pytest.raises(ValueError):
        expand(g64, 1, 0)
    with pytest.raises(ValueError):
        expand(g64, g64.q, 1)
    with pytest.raises(ValueError):
        expand(g64, -1, 1)


def test_counts_one_exponentiation_per_element(g64):
    ops = OpCounter()
    expand(g64, 3, 8, ops=ops)
    assert ops.group_exp == 8


def test_hash_points_cached(g64):
    assert hash_points(g64, 4, b"x") is hash_points(g64, 4, b"x")


@given(st.data())
def test_seed_homomorphism(g64, data):
    q = g64.q
    sa = data.draw(st.integers(0, q - 1))
    sb = data.draw(st.integers(0, q - 1))
    m = data.draw(st.integers(1, 64))
    prod = [group_mul(g64, a, b) for a, b in zip(expand(g64, sa, m), expand(g64, sb, m))]
    assert prod == expand(g64, (sa + sb) % q, m)
