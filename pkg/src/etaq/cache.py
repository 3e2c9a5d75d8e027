"""On-disk cache of expanded series in the QS1 text format."""
from __future__ import annotations

import hashlib
import os
import tempfile
from pathlib import Path
from typing import Callable, Optional

from . import qseries as qs

DEFAULT_DIR = Path.home() / ".cache" / "etaq"


def default_dir() -> Path:
    env = os.environ.get("ETAQ_CACHE")
    return Path(env) if env else DEFAULT_DIR


class SeriesCache:
    """Content-addressed store: the file name is a hash of the request."""

    def __init__(self, directory: Optional[os.PathLike] = None):
        self.directory = Path(directory) if directory is not None else default_dir()
        self.hits = 0
        self.misses = 0

    @staticmethod
    def key(*parts) -> str:
        text = "\x1f".join(str(p) for p in parts)
        return hashlib.sha256(text.encode()).hexdigest()[:32]

    def path(self, key: str) -> Path:
        return self.directory / f"{key}.qs1"

    def load(self, key: str) -> Optional[qs.QSeries]:
        path = self.path(key)
        if not path.exists():
            return None
        return qs.loads(path.read_text())

    def store(self, key: str, series: qs.QSeries) -> None:
        self.directory.mkdir(parents=True, exist_ok=True)
        fd, tmp = tempfile.mkstemp(dir=self.directory, prefix=".tmp-", suffix=".qs1")
        try:
            with os.fdopen(fd, "w") as fh:
                fh.write(qs.dumps(series))
            os.replace(tmp, self.path(key))
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise

    def get_or_compute(self, parts: tuple, compute: Callable[[], qs.QSeries]) -> qs.QSeries:
        key = self.key(*parts)
        found = self.load(key)
        if found is not None:
            self.hits += 1
            return found
        self.misses += 1
        series = compute()
        self.store(key, series)
        return series


def cached(cache: Optional[SeriesCache], parts: tuple, compute: Callable[[], qs.QSeries]) -> qs.QSeries:
    return compute() if cache is None else cache.get_or_compute(parts, compute)
