"""Per-app sandboxed virtual filesystem with UID-based isolation.

Every app gets its own private zone under a base directory plus one shared
public zone at /sdcard/. Access control is UID-based: a file is readable by
its owner, by root (uid 0), by anyone if world_readable, or by anyone if it
lives in public storage.
"""

from __future__ import annotations

import base64
import hashlib
from dataclasses import dataclass


ROOT_UID = 0
PUBLIC_DIR = "/sdcard/"


class VfsError(Exception):
    pass


class PermissionDenied(VfsError):
    pass


class NotFound(VfsError):
    pass


class DuplicateApp(VfsError):
    pass


class MalformedPath(VfsError):
    pass


def normalize(path: str) -> str:
    """Normalize an absolute path, rejecting '.' and '..' segments.

    Rejection happens before any permission logic runs; traversal tricks
    never reach the access check.
    """
    if not isinstance(path, str) or not path.startswith("/"):
        raise MalformedPath(f"path must be absolute: {path!r}")
    if any(c.isspace() for c in path):
        raise MalformedPath(f"path contains whitespace: {path!r}")
    segments = [s for s in path.split("/") if s != ""]
    for seg in segments:
        if seg in (".", ".."):
            raise MalformedPath(f"dot segment in path: {path!r}")
    norm = "/" + "/".join(segments)
    if path.endswith("/") and norm != "/":
        norm += "/"
    return norm


def randomized_segment(seed: int, app_id: str, install_counter: int) -> str:
    """32 lowercase hex chars keyed by (seed, app_id, install_counter)."""
    digest = hashlib.sha256(f"{seed}:{app_id}:{install_counter}".encode())
    return digest.hexdigest()[:32]


@dataclass(frozen=True)
class DirPolicy:
    randomized: bool = False
    seed: int = 0


@dataclass(frozen=True)
class AppZone:
    app_id: str
    uid: int
    base_dir: str
    zone_kind: str = "private"  # "private" | "public_storage"


@dataclass
class FileNode:
    path: str
    owner_uid: int
    world_readable: bool
    content: bytes


class Filesystem:
    """One device's files and app zones."""

    FIRST_APP_UID = 10001

    def __init__(self) -> None:
        self.files: dict[str, FileNode] = {}
        self.zones: dict[str, AppZone] = {}
        self._next_uid = self.FIRST_APP_UID
        self._install_counter = 0

    # -- app lifecycle -----------------------------------------------------

    def install_app(self, app_id: str, dir_policy: DirPolicy = DirPolicy()) -> AppZone:
        if app_id in self.zones:
            raise DuplicateApp(app_id)
        counter = self._install_counter
        self._install_counter += 1
        if dir_policy.randomized:
            segment = randomized_segment(dir_policy.seed, app_id, counter)
            base_dir = f"/data/data/{segment}/"
        else:
            base_dir = f"/data/data/{app_id}/"
        zone = AppZone(app_id=app_id, uid=self._next_uid, base_dir=base_dir)
        self._next_uid += 1
        self.zones[app_id] = zone
        return zone

    def uninstall_app(self, app_id: str) -> None:
        zone = self.zones.pop(app_id, None)
        if zone is None:
            raise NotFound(app_id)
        for path in [p for p in self.files if p.startswith(zone.base_dir)]:
            del self.files[path]

    def zone_of(self, app_id: str) -> AppZone:
        try:
            return self.zones[app_id]
        except KeyError:
            raise NotFound(app_id) from None

    def owner_zone(self, path: str) -> AppZone | None:
        """The private zone containing `path`, or None for public/unowned paths."""
        for zone in self.zones.values():
            if path.startswith(zone.base_dir):
                return zone
        return None

    # -- file operations ---------------------------------------------------

    def read(self, path: str, actor_uid: int) -> bytes:
        path = normalize(path)
        node = self.files.get(path)
        if node is None:
            raise NotFound(path)
        if (
            actor_uid == ROOT_UID
            or actor_uid == node.owner_uid
            or node.world_readable
            or path.startswith(PUBLIC_DIR)
        ):
            return node.content
        raise PermissionDenied(f"uid {actor_uid} cannot read {path}")

    def write(self, path: str, actor_uid: int, content: bytes) -> FileNode:
        path = normalize(path)
        if isinstance(content, str):
            content = content.encode("latin-1")
        if path.startswith(PUBLIC_DIR):
            node = FileNode(path, actor_uid, True, bytes(content))
        elif actor_uid == ROOT_UID:
            node = FileNode(path, actor_uid, False, bytes(content))
        else:
            zone = self.owner_zone(path)
            if zone is None or zone.uid != actor_uid:
                raise PermissionDenied(f"uid {actor_uid} cannot write {path}")
            node = FileNode(path, actor_uid, False, bytes(content))
        self.files[path] = node
        return node

    def append(self, path: str, actor_uid: int, line: str) -> FileNode:
        """Append a text line (used for cookie/history/log files)."""
        try:
            existing = self.read(path, actor_uid)
        except NotFound:
            existing = b""
        data = existing + line.encode("latin-1") + b"\n"
        return self.write(path, actor_uid, data)

    def chmod(self, path: str, actor_uid: int, world_readable: bool) -> FileNode:
        path = normalize(path)
        node = self.files.get(path)
        if node is None:
            raise NotFound(path)
        if actor_uid != ROOT_UID and actor_uid != node.owner_uid:
            raise PermissionDenied(f"uid {actor_uid} cannot chmod {path}")
        node.world_readable = world_readable
        return node

    def exists(self, path: str) -> bool:
        return normalize(path) in self.files

    def list_dir(self, prefix: str, actor_uid: int) -> list[str]:
        """Relative names of files under `prefix`, for actors allowed to see them."""
        prefix = normalize(prefix if prefix.endswith("/") else prefix + "/")
        if actor_uid != ROOT_UID and not prefix.startswith(PUBLIC_DIR):
            zone = self.owner_zone(prefix)
            if zone is None or zone.uid != actor_uid:
                raise PermissionDenied(f"uid {actor_uid} cannot list {prefix}")
        return sorted(
            p[len(prefix):] for p in self.files if p.startswith(prefix)
        )

    def snapshot(self) -> str:
        """Line-oriented dump: "<path>\\t<uid>\\t<mode>\\t<base64 content>"."""
        lines = []
        for path in sorted(self.files):
            node = self.files[path]
            mode = "world" if node.world_readable else "private"
            b64 = base64.b64encode(node.content).decode("ascii")
            lines.append(f"{path}\t{node.owner_uid}\t{mode}\t{b64}")
        return "\n".join(lines) + ("\n" if lines else "")
