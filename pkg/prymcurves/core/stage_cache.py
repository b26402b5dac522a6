"""
Content-addressed cache for stage outputs.
"""

import hashlib
import json
import os
import shutil
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional

from .exceptions import InvalidInputError
from .logger import get_logger
from .models import StageManifest

logger = get_logger("prymcurves.StageCache")

DEFAULT_CACHE_DIR = ".prymcurves-cache"
CACHE_DIR_ENV = "PRYMCURVES_CACHE_DIR"


def resolve_cache_dir(cache_dir: Optional[str] = None) -> Path:
    """``--cache-dir`` beats ``PRYMCURVES_CACHE_DIR`` beats the default under the working directory."""
    return Path(cache_dir or os.getenv(CACHE_DIR_ENV) or DEFAULT_CACHE_DIR)


def input_hash(stage: str, parameters: Dict[str, Any], upstream: str = "") -> str:
    """SHA-256 over the stage name, its canonical parameters and the upstream payload."""
    digest = hashlib.sha256()
    digest.update(stage.encode("utf-8"))
    digest.update(json.dumps(parameters, sort_keys=True, default=str).encode("utf-8"))
    digest.update(upstream.encode("utf-8"))
    return digest.hexdigest()


class StageCache:
    """
    Stores the JSON output of each stage next to a manifest describing how it
    was produced, so that re-running a stage with identical inputs is a no-op.

    Entries live in ``<cache_dir>/<stage>/<hash>.json`` with the manifest in
    ``<hash>.manifest.json``. A hit requires the hash and the parameter
    snapshot to match exactly.
    """

    def __init__(self, cache_dir: Optional[str] = None, tool_version: Optional[str] = None):
        """
        Initialize the cache.

        Args:
            cache_dir: Cache root (default: environment override or ``.prymcurves-cache``)
            tool_version: Version string written into manifests
        """
        from .. import __version__

        self.cache_dir = resolve_cache_dir(cache_dir)
        self.tool_version = tool_version or __version__
        self._cache_stats = {"hits": 0, "misses": 0, "stores": 0}
        self.cache_dir.mkdir(parents=True, exist_ok=True)

    def _folder(self, stage: str) -> Path:
        if not stage or "/" in stage or stage.startswith("."):
            raise InvalidInputError(f"invalid stage name {stage!r}")
        return self.cache_dir / stage

    def _paths(self, stage: str, key: str):
        if "/" in key or key.startswith("."):
            raise InvalidInputError(f"invalid cache key {key!r}")
        folder = self._folder(stage)
        return folder / f"{key}.json", folder / f"{key}.manifest.json"

    def lookup(self, stage: str, parameters: Dict[str, Any], upstream: str = "") -> Optional[str]:
        """
        Cached payload for a stage run.

        Args:
            stage: Stage name
            parameters: JSON-serializable parameter snapshot
            upstream: Payload text the stage consumed

        Returns:
            The stored payload, or None on a miss
        """
        key = input_hash(stage, parameters, upstream)
        output, manifest_path = self._paths(stage, key)
        if not (output.exists() and manifest_path.exists()):
            self._cache_stats["misses"] += 1
            return None
        manifest = StageManifest.model_validate_json(manifest_path.read_text(encoding="utf-8"))
        snapshot = json.loads(json.dumps(parameters, sort_keys=True, default=str))
        if manifest.input_hash != key or manifest.parameters != snapshot:
            self._cache_stats["misses"] += 1
            logger.warning("Manifest does not match its entry", stage=stage, key=key[:12])
            return None
        self._cache_stats["hits"] += 1
        logger.debug("Cache hit", stage=stage, key=key[:12])
        return output.read_text(encoding="utf-8")

    def store(self, stage: str, parameters: Dict[str, Any], payload: str, upstream: str = "") -> StageManifest:
        key = input_hash(stage, parameters, upstream)
        output, manifest_path = self._paths(stage, key)
        output.parent.mkdir(parents=True, exist_ok=True)
        output.write_text(payload, encoding="utf-8")
        manifest = StageManifest(
            stage=stage,
            input_hash=key,
            parameters=json.loads(json.dumps(parameters, sort_keys=True, default=str)),
            output_path=str(output),
            tool_version=self.tool_version,
        )
        manifest_path.write_text(manifest.model_dump_json(indent=2) + "\n", encoding="utf-8")
        self._cache_stats["stores"] += 1
        logger.debug("Cache store", stage=stage, key=key[:12], bytes=len(payload))
        return manifest

    def get_or_compute(self, stage: str, parameters: Dict[str, Any], compute: Callable[[], str],
                       upstream: str = "") -> str:
        """Return the cached payload or compute, store and return it."""
        cached = self.lookup(stage, parameters, upstream)
        if cached is not None:
            return cached
        payload = compute()
        self.store(stage, parameters, payload, upstream)
        return payload

    def delete_entry(self, stage: str, key: str) -> bool:
        output, manifest_path = self._paths(stage, key)
        removed = False
        for path in (output, manifest_path):
            if path.exists():
                path.unlink()
                removed = True
        return removed

    def clear(self, stage: Optional[str] = None) -> int:
        """
        Remove cached entries.

        Args:
            stage: Only this stage, or every stage when None

        Returns:
            Number of manifests removed
        """
        entries = self.list_entries(stage)
        if stage is None:
            for folder in self.cache_dir.iterdir():
                if folder.is_dir():
                    shutil.rmtree(folder)
        else:
            folder = self._folder(stage)
            if folder.exists():
                shutil.rmtree(folder)
        return len(entries)

    def list_entries(self, stage: Optional[str] = None) -> List[StageManifest]:
        folders = [self._folder(stage)] if stage else sorted(p for p in self.cache_dir.iterdir() if p.is_dir())
        manifests = []
        for folder in folders:
            for path in sorted(folder.glob("*.manifest.json")):
                manifests.append(StageManifest.model_validate_json(path.read_text(encoding="utf-8")))
        return manifests

    def get_stats(self) -> Dict:
        """
        Cache statistics.

        Returns:
            Dictionary with entry, storage and hit-rate statistics
        """
        entries = self.list_entries()
        total_size = sum(Path(m.output_path).stat().st_size for m in entries if Path(m.output_path).exists())
        stages: Dict[str, int] = {}
        for m in entries:
            stages[m.stage] = stages.get(m.stage, 0) + 1
        return {
            'entries': {
                'total_entries': len(entries),
                'per_stage': stages,
            },
            'storage': {
                'total_size_bytes': total_size,
                'total_size_mb': total_size / (1024 * 1024),
                'cache_directory': str(self.cache_dir),
            },
            'cache': {
                'cache_hits': self._cache_stats["hits"],
                'cache_misses': self._cache_stats["misses"],
                'cache_stores': self._cache_stats["stores"],
                'cache_hit_rate': self._cache_stats["hits"] / max(1, self._cache_stats["hits"] + self._cache_stats["misses"]),
            },
        }
