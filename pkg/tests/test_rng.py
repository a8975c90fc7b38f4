import pytest

from lozenge_lab.utils.rng import derive_rng, derive_seed_sequence


def test_same_key_same_stream():
    a = derive_rng(7, 1, 2).integers(1 << 30, size=5)
    b = derive_rng(7, 1, 2).integers(1 << 30, size=5)
    assert a.tolist() == b.tolist()


def test_distinct_keys_distinct_streams():
    draws = {tuple(derive_rng(7, s, i).integers(1 << 30, size=3)) for s in range(3) for i in range(3)}
    assert len(draws) == 9
    assert derive_rng(7).random() != derive_rng(8).random()


def test_seed_sequence_entropy():
    assert derive_seed_sequence(3, 4, 5).entropy == [3, 4, 5]


def test_negative_keys_rejected():
    with pytest.raises(ValueError):
        derive_rng(-1)
    with pytest.raises(ValueError):
        derive_rng(1, -2)
