import hashlib
from pathlib import Path
from typing import Any, Optional

from diskcache import Cache as diskCache

from .quiver_core import IceQuiver


def certificate_key(command: str, quiver: IceQuiver, *params: Any) -> str:
    """Digest of (command, exchange matrix, extra parameters)."""
    digest = hashlib.sha256()
    digest.update(command.encode())
    digest.update(repr(quiver.matrix.shape).encode())
    digest.update(quiver.matrix.tobytes())
    for param in params:
        digest.update(b"\x00" + repr(param).encode())
    return digest.hexdigest()


class CertificateCache:
    """On-disk store of search and formula certificates."""

    def __init__(self, dir: str, expires: Optional[int] = None):
        path = Path(dir).expanduser().resolve()
        path.mkdir(parents=True, exist_ok=True)
        self.cache = diskCache(path, disk_min_file_size=0, eviction_policy="least-recently-stored")
        self.expires = expires

    def set(self, key: str, value: dict) -> None:
        self.cache.set(key, value, expire=self.expires)

    def get(self, key: str, default: Optional[dict] = None) -> Optional[dict]:
        return self.cache.get(key, default)

    def clear(self) -> int:
        return self.cache.clear()

    def close(self) -> None:
        self.cache.close()

    def __len__(self) -> int:
        return len(self.cache)

    def __enter__(self):
        return self

    def __exit__(self, exc_type, exc_val, exc_tb):
        self.close()
