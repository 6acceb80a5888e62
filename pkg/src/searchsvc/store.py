"""File-backed spec store: one canonical JSON file per service, atomic writes
(write-temp-then-rename), in-memory index kept consistent with the directory."""

from __future__ import annotations

import os
import threading
from pathlib import Path

from .errors import NotFoundError, SpecParseError, StoreIOError, VersionMismatchError
from .model import SPEC_FILE_SUFFIX, ServiceSpec, deserialize, serialize


class SpecStore:
    def __init__(self, root_directory: str | Path):
        self.root = Path(root_directory)
        self.root.mkdir(parents=True, exist_ok=True)
        self._lock = threading.Lock()
        self._index: dict[str, ServiceSpec] = {}
        self._rescan()

    def _path_for(self, spec_id: str) -> Path:
        safe = spec_id.replace("/", "_").replace("\\", "_")
        return self.root / f"{safe}{SPEC_FILE_SUFFIX}"

    def _rescan(self) -> None:
        self._index.clear()
        for path in sorted(self.root.glob(f"*{SPEC_FILE_SUFFIX}")):
            try:
                spec = deserialize(path.read_text("utf-8"))
            except (SpecParseError, VersionMismatchError, OSError):
                continue  # foreign or damaged file: skip, never delete
            self._index[spec.id] = spec

    def save(self, spec: ServiceSpec) -> None:
        path = self._path_for(spec.id)
        tmp = path.with_suffix(path.suffix + ".tmp")
        text = serialize(spec)
        with self._lock:
            try:
                tmp.write_text(text, "utf-8")
                os.replace(tmp, path)
            except OSError as exc:
                raise StoreIOError(f"cannot write {path}: {exc}") from exc
            finally:
                if tmp.exists():
                    try:
                        tmp.unlink()
                    except OSError:
                        pass
            self._index[spec.id] = spec

    def load(self, spec_id: str) -> ServiceSpec:
        with self._lock:
            spec = self._index.get(spec_id)
        if spec is None:
            raise NotFoundError(f"no service with id {spec_id!r}")
        return spec

    def list(self) -> list[ServiceSpec]:
        with self._lock:
            return sorted(self._index.values(), key=lambda s: (s.name, s.id))

    def ids(self) -> set[str]:
        with self._lock:
            return set(self._index)

    def delete(self, spec_id: str) -> None:
        path = self._path_for(spec_id)
        with self._lock:
            if spec_id not in self._index:
                raise NotFoundError(f"no service with id {spec_id!r}")
            try:
                path.unlink()
            except FileNotFoundError:
                pass
            except OSError as exc:
                raise StoreIOError(f"cannot delete {path}: {exc}") from exc
            del self._index[spec_id]
