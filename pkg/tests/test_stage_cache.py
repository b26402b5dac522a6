"""
Tests for the content-addressed stage cache.
"""

import pytest

from prymcurves.core.exceptions import InvalidInputError
from prymcurves.core.models import StageManifest
from prymcurves.core.stage_cache import CACHE_DIR_ENV, DEFAULT_CACHE_DIR, StageCache, input_hash, resolve_cache_dir


@pytest.fixture
def cache(tmp_path):
    return StageCache(str(tmp_path / "cache"), tool_version="test")


class TestInputHash:
    """Cache keys."""

    def test_stable_under_key_order(self):
        assert input_hash("solve", {"a": 1, "b": 2}) == input_hash("solve", {"b": 2, "a": 1})

    def test_every_input_matters(self):
        base = input_hash("solve", {"stratum": "2-2"}, "x")
        assert base != input_hash("geometry", {"stratum": "2-2"}, "x")
        assert base != input_hash("solve", {"stratum": "2-1-1"}, "x")
        assert base != input_hash("solve", {"stratum": "2-2"}, "y")


class TestResolveCacheDir:
    def test_precedence(self, monkeypatch, tmp_path):
        """Explicit directory, then the environment, then the default."""
        monkeypatch.delenv(CACHE_DIR_ENV, raising=False)
        assert str(resolve_cache_dir()) == DEFAULT_CACHE_DIR
        monkeypatch.setenv(CACHE_DIR_ENV, str(tmp_path / "env"))
        assert resolve_cache_dir() == tmp_path / "env"
        assert resolve_cache_dir(str(tmp_path / "flag")) == tmp_path / "flag"


class TestStageCache:
    """Lookups, stores and manifests."""

    def test_compute_once(self, cache):
        calls = []

        def compute():
            calls.append(1)
            return "[]\n"

        assert cache.get_or_compute("solve", {"stratum": "2-2"}, compute) == "[]\n"
        assert cache.get_or_compute("solve", {"stratum": "2-2"}, compute) == "[]\n"
        assert len(calls) == 1

    def test_upstream_change_misses(self, cache):
        cache.store("geometry", {"stratum": "2-2"}, "[]\n", upstream="a")
        assert cache.lookup("geometry", {"stratum": "2-2"}, upstream="a") == "[]\n"
        assert cache.lookup("geometry", {"stratum": "2-2"}, upstream="b") is None

    def test_manifest(self, cache):
        manifest = cache.store("solve", {"fields": [2, 3]}, "{}\n")
        assert manifest.stage == "solve"
        assert manifest.tool_version == "test"
        assert manifest.parameters == {"fields": [2, 3]}
        assert cache.list_entries("solve") == [manifest]

    def test_tampered_manifest_is_a_miss(self, cache):
        """A manifest whose parameter snapshot disagrees with the request is ignored."""
        manifest = cache.store("solve", {"prefilter": True}, "[]\n")
        path = cache.cache_dir / "solve" / f"{manifest.input_hash}.manifest.json"
        tampered = StageManifest(**{**manifest.model_dump(), "parameters": {"prefilter": False}})
        path.write_text(tampered.model_dump_json(), encoding="utf-8")
        assert cache.lookup("solve", {"prefilter": True}) is None

    def test_clear(self, cache):
        cache.store("solve", {"k": 1}, "[]\n")
        cache.store("solve", {"k": 2}, "[]\n")
        cache.store("geometry", {"k": 1}, "[]\n")
        assert cache.clear("solve") == 2
        assert [m.stage for m in cache.list_entries()] == ["geometry"]
        assert cache.clear() == 1
        assert cache.list_entries() == []

    def test_clear_rejects_paths(self, cache):
        with pytest.raises(InvalidInputError):
            cache.clear("../solve")

    def test_every_operation_rejects_paths(self, cache):
        """Stage names and keys never leave the cache directory."""
        with pytest.raises(InvalidInputError):
            cache.delete_entry("../solve", "abc")
        with pytest.raises(InvalidInputError):
            cache.delete_entry("solve", "../abc")
        with pytest.raises(InvalidInputError):
            cache.list_entries(".hidden")

    def test_delete_entry(self, cache):
        manifest = cache.store("solve", {"k": 1}, "[]\n")
        assert cache.delete_entry("solve", manifest.input_hash)
        assert not cache.delete_entry("solve", manifest.input_hash)

    def test_stats(self, cache):
        cache.get_or_compute("solve", {}, lambda: "[]\n")
        cache.get_or_compute("solve", {}, lambda: "[]\n")
        stats = cache.get_stats()
        assert stats["entries"]["total_entries"] == 1
        assert stats["entries"]["per_stage"] == {"solve": 1}
        assert stats["cache"]["cache_hit_rate"] == 0.5
        assert stats["storage"]["total_size_bytes"] == 3
