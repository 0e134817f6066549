import numpy as np
import pytest

from uavrelay.streams import CHUNK_SIZE, chunk_bounds, ordered_map, resolve_threads, stream


def test_stream_is_addressed_by_key():
    a = stream(5, 0, 1, 2).standard_normal(8)
    assert np.array_equal(a, stream(5, 0, 1, 2).standard_normal(8))
    assert not np.array_equal(a, stream(5, 0, 1, 3).standard_normal(8))
    assert not np.array_equal(a, stream(6, 0, 1, 2).standard_normal(8))


def test_large_seed_accepted():
    stream(2 ** 64 - 1, 1).random()


def test_chunk_bounds_cover_range():
    b = chunk_bounds(100_001, 1 << 15)
    assert b[0] == (0, 0, 1 << 15)
    assert b[-1][2] == 100_001
    assert sum(stop - start for _, start, stop in b) == 100_001
    assert [i for i, _, _ in b] == list(range(len(b)))
    assert CHUNK_SIZE == 1 << 15


def test_resolve_threads():
    assert resolve_threads(3) == 3
    assert resolve_threads(0) >= 1
    with pytest.raises(ValueError):
        resolve_threads(-1)


@pytest.mark.parametrize("threads", [1, 4])
def test_ordered_map_keeps_order(threads):
    assert ordered_map(lambda x: x * x, range(50), threads) == [x * x for x in range(50)]
