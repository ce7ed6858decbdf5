from hypothesis import given
from hypothesis import strategies as st

from ramseylab.bitset import bits_of, full_mask, mask_of, members_of


def test_roundtrip_small():
    assert mask_of([0, 3, 5]) == 0b101001
    assert members_of(0b101001) == [0, 3, 5]
    assert list(bits_of(0)) == []
    assert full_mask(4) == 15


@given(st.sets(st.integers(min_value=0, max_value=300)))
def test_roundtrip_property(vs):
    m = mask_of(vs)
    assert set(members_of(m)) == vs
    assert m.bit_count() == len(vs)


@given(st.sets(st.integers(min_value=0, max_value=200)))
def test_bits_ascending(vs):
    got = list(bits_of(mask_of(vs)))
    assert got == sorted(vs)
