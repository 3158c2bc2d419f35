import random

import pytest

from sketchsim import (
    COUNT_MAX,
    Multiset,
    UndefinedSimilarityError,
    cosine,
    dice,
    intersection_cardinality,
)


def test_insert_from_empty():
    m = Multiset()
    m.insert("a", 2)
    assert m.count("a") == 2
    assert m.cardinality() == 2
    assert m.distinct_count() == 1


def test_insert_accumulates():
    m = Multiset({"a": 2})
    m.insert("a", 1)
    assert m.count("a") == 3
    assert m.cardinality() == 3


def test_insert_new_key():
    m = Multiset({"a": 2})
    m.insert("b", 5)
    assert m.count("a") == 2
    assert m.count("b") == 5
    assert m.cardinality() == 7
    assert m.distinct_count() == 2


def test_insert_rejects_empty_element():
    m = Multiset()
    with pytest.raises(ValueError):
        m.insert("", 1)
    with pytest.raises(ValueError):
        m.insert(b"", 1)


def test_insert_rejects_nonpositive_times():
    m = Multiset()
    with pytest.raises(ValueError):
        m.insert("a", 0)
    with pytest.raises(ValueError):
        m.insert("a", -3)


def test_insert_rejects_64bit_overflow():
    m = Multiset({"a": COUNT_MAX})
    with pytest.raises(OverflowError):
        m.insert("a", 1)
    assert m.count("a") == COUNT_MAX


def test_str_and_bytes_elements_are_the_same_key():
    m = Multiset()
    m.insert("song", 1)
    m.insert(b"song", 2)
    assert m.count("song") == 3
    assert m.distinct_count() == 1


def test_intersection_cardinality_example():
    x = Multiset({"a": 2, "b": 1})
    y = Multiset({"a": 1, "c": 4})
    # independent evaluation: min per shared element, summed by hand
    assert intersection_cardinality(x, y) == min(2, 1)
    assert intersection_cardinality(x, y) == 1


def test_intersection_with_self_is_cardinality():
    x = Multiset({"a": 3, "b": 2, "c": 7})
    assert intersection_cardinality(x, x) == x.cardinality()


def test_intersection_disjoint_is_zero():
    assert intersection_cardinality(Multiset({"a": 1}), Multiset({"b": 1})) == 0


def test_dice_example():
    x = Multiset({"a": 2, "b": 1})
    y = Multiset({"a": 1, "c": 1})
    # 2 * 1 / (3 + 2)
    assert dice(x, y) == 0.4


def test_dice_identity_and_disjoint():
    x = Multiset({"a": 1, "b": 9})
    assert dice(x, x) == 1.0
    assert dice(Multiset({"a": 1}), Multiset({"b": 1})) == 0.0


def test_dice_one_empty_side_is_zero():
    assert dice(Multiset({"a": 1}), Multiset()) == 0.0


def test_dice_both_empty_is_error():
    with pytest.raises(UndefinedSimilarityError):
        dice(Multiset(), Multiset())


def test_cosine_identity_orthogonal_and_scaling():
    x = Multiset({"a": 3, "b": 4})
    assert cosine(x, x) == 1.0
    assert cosine(Multiset({"a": 1}), Multiset({"b": 1})) == 0.0
    # absent elements count as zero: identical vectors stay identical
    assert cosine(Multiset({"a": 3, "b": 4}), Multiset({"a": 3, "b": 4})) == 1.0


def test_cosine_empty_side_is_error():
    with pytest.raises(UndefinedSimilarityError):
        cosine(Multiset({"a": 1}), Multiset())
    with pytest.raises(UndefinedSimilarityError):
        cosine(Multiset(), Multiset({"a": 1}))


def _random_multiset(rng, max_distinct=30, max_count=50):
    m = Multiset()
    for _ in range(rng.randint(1, max_distinct)):
        m.insert(f"e{rng.randint(0, 40)}", rng.randint(1, max_count))
    return m


def test_similarity_properties_randomized():
    rng = random.Random(20240)
    for _ in range(300):
        x = _random_multiset(rng)
        y = _random_multiset(rng)
        d_xy, d_yx = dice(x, y), dice(y, x)
        c_xy, c_yx = cosine(x, y), cosine(y, x)
        assert d_xy == d_yx
        assert c_xy == c_yx
        assert 0.0 <= d_xy <= 1.0
        assert 0.0 <= c_xy <= 1.0
        assert dice(x, x) == 1.0
        assert cosine(x, x) == 1.0
        shared_keys = {e for e, _ in x.items()} & {e for e, _ in y.items()}
        assert (d_xy == 0.0) == (not shared_keys)
        assert (c_xy == 0.0) == (not shared_keys)
        assert intersection_cardinality(x, y) <= min(x.cardinality(), y.cardinality())


def test_equality_ignores_insertion_order():
    a = Multiset([("x", 1), ("y", 2)])
    b = Multiset([("y", 2), ("x", 1)])
    assert a == b
