"""
Unit tests for the evaluation cache module.
"""

import pytest

from src.eval_cache import EvalCache


@pytest.fixture
def cache_path(tmp_path):
    """Location of a cache file."""
    return tmp_path / "cache" / "evals.bin"


class TestMakeKey:
    """Tests for make_key."""

    def test_start_position(self):
        """Test the key of the starting position."""
        assert EvalCache.make_key("Engine 1", [], 50, 2) == "Engine 1|startpos|50|2|*"

    def test_restricted_search(self):
        """Test that root moves are part of the key."""
        key = EvalCache.make_key("Engine 1", ["e2e4"], 10, 2, ["e7e5", "c7c5"])
        assert key == "Engine 1|e2e4|10|2|e7e5,c7c5"


class TestEvalCache:
    """Tests for EvalCache."""

    def test_memory_cache(self):
        """Test get and put without a file."""
        cache = EvalCache()
        cache.put("k", [("e2e4", 30), ("d2d4", 25)])

        assert cache.get("k") == [("e2e4", 30), ("d2d4", 25)]
        assert cache.get("missing") is None
        assert "k" in cache
        assert len(cache) == 1

    def test_first_record_wins(self):
        """Test that records are never overwritten."""
        cache = EvalCache()
        cache.put("k", [("e2e4", 30)])
        cache.put("k", [("d2d4", 99)])

        assert cache.get("k") == [("e2e4", 30)]

    def test_records_survive_reopening(self, cache_path):
        """Test persistence across processes."""
        with EvalCache(cache_path) as cache:
            cache.put("a", [("e2e4", 30)])
            cache.put("b", [("g1f3", -12), ("b1c3", -20)])

        with EvalCache(cache_path) as reopened:
            assert len(reopened) == 2
            assert reopened.get("b") == [("g1f3", -12), ("b1c3", -20)]

    def test_corrupt_tail_is_truncated(self, cache_path):
        """Test recovery from a torn final write."""
        with EvalCache(cache_path) as cache:
            cache.put("a", [("e2e4", 30)])
        valid_size = cache_path.stat().st_size
        with open(cache_path, "ab") as handle:
            handle.write(b"\x00\x00\x01\x00garbage")

        with EvalCache(cache_path) as reopened:
            assert reopened.get("a") == [("e2e4", 30)]
            assert len(reopened) == 1
        assert cache_path.stat().st_size == valid_size

    def test_append_after_recovery(self, cache_path):
        """Test that new records follow the truncated tail."""
        with EvalCache(cache_path) as cache:
            cache.put("a", [("e2e4", 30)])
        with open(cache_path, "ab") as handle:
            handle.write(b"\x00\x00")

        with EvalCache(cache_path) as cache:
            cache.put("b", [("d2d4", 20)])
        with EvalCache(cache_path) as reopened:
            assert reopened.get("b") == [("d2d4", 20)]
            assert len(reopened) == 2
