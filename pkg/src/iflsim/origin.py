"""URL parsing and the same-origin-policy decision engine.

Three policy modes are supported for local schemes:

* permissive: no file-to-file enforcement at all (pre-4.1 engines),
* legacy: the classic (scheme, host, port) tuple comparison,
* enhanced: the tuple gains a path element (the document's parent
  directory) for local schemes, so files in different directories are
  different origins.
"""

from __future__ import annotations

import posixpath
from dataclasses import dataclass

SCHEMES = {"http", "https", "file", "content", "intent", "ftp"}
LOCAL_SCHEMES = {"file", "content"}
WEB_SCHEMES = {"http", "https", "ftp"}
OPAQUE_SCHEMES = {"content", "intent"}
DEFAULT_PORTS = {"http": 80, "https": 443, "ftp": 21}

DENY_REASONS = ("cross-scheme", "host", "port", "path_dir", "scheme")


class MalformedUrl(ValueError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at {position})")
        self.position = position


@dataclass(frozen=True)
class Url:
    scheme: str
    host: str
    port: int | None
    path: str
    query: str = ""

    def text(self) -> str:
        netloc = self.host
        if self.port is not None:
            netloc += f":{self.port}"
        out = f"{self.scheme}://{netloc}{self.path}"
        if self.query:
            sep = "#" if self.scheme == "intent" else "?"
            out += sep + self.query
        return out


@dataclass(frozen=True)
class SopPolicy:
    mode: str = "legacy"  # "permissive" | "legacy" | "enhanced"
    allow_file_from_file: bool = False
    cross_scheme_http_to_file: bool = False


@dataclass(frozen=True)
class Origin:
    scheme: str
    host: str
    port: int | None
    path_dir: str | None = None


@dataclass(frozen=True)
class Decision:
    allowed: bool
    reason: str | None = None


ALLOW = Decision(True)


def _normalize_path(raw: str, base_pos: int) -> str:
    segments = [s for s in raw.split("/") if s != ""]
    for seg in segments:
        if seg in (".", ".."):
            raise MalformedUrl("dot segment in path", base_pos + raw.find(seg))
    norm = "/" + "/".join(segments)
    if raw.endswith("/") and norm != "/":
        norm += "/"
    return norm


def parse_url(text: str) -> Url:
    """Parse the URL subset this simulator understands.

    intent:// URIs keep their #Intent;...;end payload opaque in the query
    slot; the grammar is interpreted by the browsing deputy, not here.
    """
    for i, c in enumerate(text):
        if c.isspace():
            raise MalformedUrl("embedded whitespace", i)
    sep = text.find("://")
    if sep <= 0:
        raise MalformedUrl("missing scheme separator", 0)
    scheme = text[:sep].lower()
    if scheme not in SCHEMES:
        raise MalformedUrl(f"unsupported scheme {scheme!r}", 0)
    rest = text[sep + 3:]
    rest_pos = sep + 3

    if scheme == "intent":
        # intent://host#Intent;...;end -- payload preserved verbatim.
        host, _, payload = rest.partition("#")
        return Url(scheme, host, None, "", payload)

    # Split authority from path/query.
    cut = len(rest)
    for i, c in enumerate(rest):
        if c in "/?":
            cut = i
            break
    authority = rest[:cut]
    tail = rest[cut:]

    host, port = authority, None
    if ":" in authority:
        host, _, port_text = authority.partition(":")
        try:
            port = int(port_text)
        except ValueError:
            raise MalformedUrl("bad port", rest_pos + len(host) + 1) from None

    path, query = tail, ""
    if "?" in tail:
        path, _, query = tail.partition("?")
    path = _normalize_path(path or "/", rest_pos + cut)
    return Url(scheme, host, port, path, query)


def resolve(base: Url, ref: str) -> Url:
    """Resolve `ref` against `base`, as a document resolving its own links.

    Relative references may climb with ".." (normalized here); a rendered
    document always knows its own location, so relative targets work even
    when the absolute zone path is unguessable.
    """
    if "://" in ref:
        return parse_url(ref)
    path_part, _, query = ref.partition("?")
    if path_part.startswith("/"):
        path = path_part
    else:
        path = posixpath.join(posixpath.dirname(base.path), path_part)
    path = posixpath.normpath(path)
    if not path.startswith("/"):
        path = "/" + path
    return Url(base.scheme, base.host, base.port, path, query)


def _effective_port(url_or_origin) -> int | None:
    if url_or_origin.port is not None:
        return url_or_origin.port
    return DEFAULT_PORTS.get(url_or_origin.scheme)


def origin_of(url: Url, policy: SopPolicy) -> Origin:
    host = url.host
    if url.scheme in LOCAL_SCHEMES and not host:
        host = "localhost"
    port = _effective_port(url)
    path_dir = None
    if policy.mode == "enhanced" and url.scheme in LOCAL_SCHEMES:
        parent = posixpath.dirname(url.path)
        path_dir = parent if parent.endswith("/") else parent + "/"
    return Origin(url.scheme, host, port, path_dir)


def may_access(subject: Origin, target: Url, policy: SopPolicy) -> Decision:
    """Decide whether a document at `subject` may read `target`."""
    t = origin_of(target, policy)

    # content:// and intent:// never share an origin with anything; their
    # power comes from what they load, not from origin equality.
    if subject.scheme in OPAQUE_SCHEMES or t.scheme in OPAQUE_SCHEMES:
        return Decision(False, "scheme")

    if subject.scheme in WEB_SCHEMES and t.scheme == "file":
        if policy.cross_scheme_http_to_file:
            return ALLOW
        return Decision(False, "cross-scheme")

    if subject.scheme == "file" and t.scheme == "file":
        if policy.mode == "permissive" or policy.allow_file_from_file:
            return ALLOW
        if subject.host != t.host:
            return Decision(False, "host")
        if subject.port != t.port:
            return Decision(False, "port")
        if policy.mode == "enhanced" and subject.path_dir != t.path_dir:
            return Decision(False, "path_dir")
        return ALLOW

    if subject.scheme != t.scheme:
        return Decision(False, "scheme")
    if subject.host != t.host:
        return Decision(False, "host")
    if subject.port != t.port:
        return Decision(False, "port")
    return ALLOW
