"""The browsing-interface deputy.

A miniature document model: script tags are extracted from page bodies and
interpreted against a small declarative action grammar instead of real
JavaScript. The engine implements the file://, content:// and intent://
loading chains, browser state files (cookies, history, bookmarks) as the
injection channel, and consults the SOP engine for every cross-document
access.

Script action grammar (stable wire format, used inside page bodies and
injected fields; actions separated by ";"):

    READ_BODY                     append the current document body
    FRAME <url>                   SOP-checked read of another document
    EXFIL <host>                  send accumulated bytes to a sink host
    SETCOOKIE <host> <name> <val> persist a cookie line
"""

from __future__ import annotations

import posixpath
import re
from dataclasses import dataclass, field
from urllib.parse import unquote

from . import vfs
from .origin import (
    LOCAL_SCHEMES,
    SopPolicy,
    Url,
    may_access,
    origin_of,
    parse_url,
    resolve,
)
from .vfs import AppZone, NotFound
from .world import World

MAX_FRAME_DEPTH = 8

SCRIPT_RE = re.compile(r"<script\b[^>]*>(.*?)</script\s*>", re.I | re.S)
IFRAME_RE = re.compile(r"<iframe\b[^>]*\bsrc\s*=\s*[\"']([^\"']+)[\"']", re.I)
LINK_RE = re.compile(
    r"<a\b[^>]*\bhref\s*=\s*[\"']([^\"']+)[\"'][^>]*>(.*?)</a>", re.I | re.S)
INTENT_PAYLOAD_RE = re.compile(
    r"Intent;component=(?P<component>[^;]+);S\.url=(?P<url>[^;]+);end")


class ProviderUnavailable(Exception):
    pass


class IntentRefused(Exception):
    def __init__(self, condition: str):
        super().__init__(condition)
        self.condition = condition


# -- script actions ----------------------------------------------------------

@dataclass(frozen=True)
class ReadBody:
    pass


@dataclass(frozen=True)
class LoadFrame:
    url: str


@dataclass(frozen=True)
class Exfiltrate:
    sink_host: str


@dataclass(frozen=True)
class SetCookie:
    host: str
    name: str
    value: str


@dataclass(frozen=True)
class Script:
    actions: tuple = ()


def parse_actions(text: str):
    """Parse script text into actions; malformed text yields no actions."""
    actions = []
    for chunk in text.split(";"):
        tokens = chunk.split()
        if not tokens:
            continue
        op = tokens[0].upper()
        if op == "READ_BODY" and len(tokens) == 1:
            actions.append(ReadBody())
        elif op == "FRAME" and len(tokens) == 2:
            actions.append(LoadFrame(tokens[1]))
        elif op == "EXFIL" and len(tokens) == 2:
            actions.append(Exfiltrate(tokens[1]))
        elif op == "SETCOOKIE" and len(tokens) == 4:
            actions.append(SetCookie(tokens[1], tokens[2], tokens[3]))
        else:
            return []
    return actions


def parse_scripts(body: str) -> list[Script]:
    """Extract non-nested <script>...</script> regions, in document order."""
    return [Script(tuple(parse_actions(m.group(1))))
            for m in SCRIPT_RE.finditer(body)]


# -- documents ---------------------------------------------------------------

@dataclass
class Document:
    url: Url
    origin: object
    body: str
    scripts: list[Script]
    frames: list[Url]
    links: list[tuple[str, Url]]


def make_document(url: Url, body: str, policy: SopPolicy) -> Document:
    frames = []
    for raw in IFRAME_RE.findall(body):
        try:
            frames.append(resolve(url, raw))
        except ValueError:
            continue
    links = []
    for href, text in LINK_RE.findall(body):
        try:
            links.append((text.strip(), resolve(url, href)))
        except ValueError:
            continue
    return Document(
        url=url,
        origin=origin_of(url, policy),
        body=body,
        scripts=parse_scripts(body),
        frames=frames,
        links=links,
    )


@dataclass
class RenderConfig:
    sop_policy: SopPolicy = SopPolicy()
    js_enabled: bool = True
    js_local_enabled: bool = True  # False is the NoJS mitigation
    file_links_clickable: bool = False
    long_press_dialog: bool = False
    content_provider_exposed: bool = False
    provider_implements_openfile: bool = False
    # The three intent:// preconditions, independently settable.
    intent_parse_uri: bool = False
    intent_component_loads_external_url: bool = False
    intent_component_allows_file_js: bool = False


@dataclass(frozen=True)
class UserAction:
    kind: str  # "click" | "long_press"
    target: str  # substring matched against link text or href


@dataclass
class BrowserState:
    cookie_path: str
    history_path: str
    bookmarks_path: str

    @classmethod
    def for_app(cls, zone: AppZone) -> "BrowserState":
        base = zone.base_dir
        return cls(
            cookie_path=base + "app_webview/Cookies",
            history_path=base + "databases/history.db",
            bookmarks_path=base + "databases/bookmarks.db",
        )

    def add_cookie(self, world: World, uid: int, host: str, name: str,
                   value: str) -> None:
        world.fs.append(self.cookie_path, uid, f"{host}\t{name}\t{value}")

    def add_history(self, world: World, uid: int, title: str, url: str) -> None:
        world.fs.append(self.history_path, uid, f"{title}\t{url}")

    def add_bookmark(self, world: World, uid: int, title: str, url: str) -> None:
        world.fs.append(self.bookmarks_path, uid, f"{title}\t{url}")


@dataclass
class RenderResult:
    exfiltrated: list[tuple[str, bytes]] = field(default_factory=list)
    events: list = field(default_factory=list)


class WebDeputy:
    """Rendering engine acting with the victim app's filesystem identity."""

    def __init__(self, world: World, app: AppZone, cfg: RenderConfig,
                 state: BrowserState | None = None):
        self.world = world
        self.app = app
        self.cfg = cfg
        self.state = state or BrowserState.for_app(app)

    def _emit(self, result: RenderResult, kind: str, subject: str = "",
              detail: str = "") -> None:
        result.events.append(
            self.world.emit(kind, self.app.app_id, subject, detail))

    # -- loading chains ----------------------------------------------------

    def _load(self, url: Url) -> Document:
        if url.scheme == "file":
            data = self.world.fs.read(url.path, self.app.uid)
            return make_document(url, data.decode("latin-1"), self.cfg.sop_policy)
        if url.scheme == "content":
            return self.load_content_uri(url)
        if url.scheme in ("http", "https"):
            body = self.world.web_pages.get(url.text())
            if body is None:
                raise NotFound(url.text())
            return make_document(url, body, self.cfg.sop_policy)
        raise NotFound(url.text())

    def load_content_uri(self, uri: Url) -> Document:
        """Map content://<app_id>/<relpath> through the provider gates."""
        if uri.scheme != "content":
            raise ValueError("not a content uri")
        if not self.cfg.content_provider_exposed:
            raise ProviderUnavailable("provider not exposed")
        if not self.cfg.provider_implements_openfile:
            raise ProviderUnavailable("openFile not implemented")
        zone = self.world.fs.zone_of(uri.host)
        path = vfs.normalize(zone.base_dir + uri.path.lstrip("/"))
        # The provider opens the file with its own identity: the deputy moment.
        data = self.world.fs.read(path, zone.uid)
        return make_document(uri, data.decode("latin-1"), self.cfg.sop_policy)

    def handle_intent_uri(self, uri: Url) -> RenderResult:
        """Run the intent:// chain; all three preconditions must hold."""
        result = RenderResult()
        if uri.scheme != "intent":
            raise ValueError("not an intent uri")
        if not self.cfg.intent_parse_uri:
            self._emit(result, "intent-refused", uri.text(), "parse-uri")
            raise IntentRefused("parse-uri")
        match = INTENT_PAYLOAD_RE.search(uri.query)
        if match is None:
            self._emit(result, "intent-refused", uri.text(), "bad-payload")
            raise IntentRefused("bad-payload")
        if not self.cfg.intent_component_loads_external_url:
            self._emit(result, "intent-refused", uri.text(),
                       "component-loads-external-url")
            raise IntentRefused("component-loads-external-url")
        if not self.cfg.intent_component_allows_file_js:
            self._emit(result, "intent-refused", uri.text(),
                       "component-allows-file-js")
            raise IntentRefused("component-allows-file-js")
        extra = parse_url(unquote(match.group("url")))
        self._emit(result, "intent-load", extra.text(),
                   match.group("component"))
        doc = self._load(extra)
        self._render_doc(doc, result, 0)
        return result

    # -- rendering -----------------------------------------------------------

    def render(self, target, user_action: UserAction | None = None) -> RenderResult:
        """Load and render a document, driving scripts, frames, and links."""
        result = RenderResult()
        if isinstance(target, Document):
            doc = target
        elif isinstance(target, Url):
            doc = self._load(target)
        else:
            # A raw body string: an adversary page served from the web.
            doc = make_document(parse_url("http://adversary.example/page"),
                                target, self.cfg.sop_policy)
        self._render_doc(doc, result, 0, user_action)
        return result

    def render_history_ui(self) -> RenderResult:
        return self._render_local_ui(self.state.history_path)

    def render_bookmarks_ui(self) -> RenderResult:
        return self._render_local_ui(self.state.bookmarks_path)

    def _render_local_ui(self, path: str) -> RenderResult:
        """Render a state file in the local file:// origin of its directory.

        Titles and URLs are serialized verbatim, so an injected script tag
        in any field survives into the rendered body.
        """
        result = RenderResult()
        try:
            data = self.world.fs.read(path, self.app.uid)
        except NotFound:
            data = b""
        doc = make_document(Url("file", "", None, path),
                            data.decode("latin-1"), self.cfg.sop_policy)
        self._render_doc(doc, result, 0)
        return result

    def _scripts_allowed(self, doc: Document) -> bool:
        if not self.cfg.js_enabled:
            return False
        if doc.origin.scheme in LOCAL_SCHEMES and not self.cfg.js_local_enabled:
            return False
        return True

    def _render_doc(self, doc: Document, result: RenderResult, depth: int,
                    user_action: UserAction | None = None) -> None:
        if depth > MAX_FRAME_DEPTH:
            self._emit(result, "frame-depth-cap", doc.url.text())
            return
        self._emit(result, "render", doc.url.text())

        if doc.scripts and not self._scripts_allowed(doc):
            self._emit(result, "script-suppressed", doc.url.text())
        elif doc.scripts:
            for script in doc.scripts:
                self._run_script(doc, script, result)

        # iframe-based loading is automatic; the framed document renders in
        # its own origin (embedding is not a cross-origin read).
        for frame_url in doc.frames:
            self._load_and_render(frame_url, result, depth + 1, "frame")

        if user_action is not None and depth == 0:
            self._handle_link_action(doc, user_action, result, depth)

    def _handle_link_action(self, doc: Document, action: UserAction,
                            result: RenderResult, depth: int) -> None:
        for text, link in doc.links:
            if action.target not in text and action.target not in link.text():
                continue
            if link.scheme == "file":
                if action.kind == "click" and not self.cfg.file_links_clickable:
                    self._emit(result, "link-inert", link.text())
                    return
                if action.kind == "long_press":
                    if not self.cfg.long_press_dialog:
                        self._emit(result, "link-inert", link.text())
                        return
                    self._emit(result, "long-press-dialog", link.text())
            self._emit(result, "link-open", link.text(), action.kind)
            self._load_and_render(link, result, depth + 1, "link")
            return
        self._emit(result, "link-missing", action.target)

    def _load_and_render(self, url: Url, result: RenderResult, depth: int,
                         via: str) -> None:
        if url.scheme == "intent":
            try:
                sub = self.handle_intent_uri(url)
            except IntentRefused:
                return
            result.exfiltrated.extend(sub.exfiltrated)
            result.events.extend(sub.events)
            return
        try:
            sub = self._load(url)
        except NotFound:
            self._emit(result, f"{via}-blocked", url.text(), "path-not-found")
            return
        except vfs.PermissionDenied:
            self._emit(result, f"{via}-blocked", url.text(), "sandbox-denied")
            return
        except ProviderUnavailable as exc:
            self._emit(result, f"{via}-blocked", url.text(),
                       f"provider-unavailable: {exc}")
            return
        self._emit(result, f"{via}-load", url.text())
        self._render_doc(sub, result, depth)

    def _run_script(self, doc: Document, script: Script,
                    result: RenderResult) -> None:
        self._emit(result, "script-run", doc.url.text())
        accumulated = b""
        for action in script.actions:
            if isinstance(action, ReadBody):
                accumulated += doc.body.encode("latin-1")
            elif isinstance(action, LoadFrame):
                try:
                    target = resolve(doc.url, action.url)
                except ValueError:
                    continue
                decision = may_access(doc.origin, target, self.cfg.sop_policy)
                if not decision.allowed:
                    self._emit(result, "sop-denied", target.text(),
                               decision.reason)
                    continue
                self._emit(result, "frame-access", target.text(), "allow")
                accumulated += self._fetch_bytes(target, result)
            elif isinstance(action, Exfiltrate):
                result.exfiltrated.append((action.sink_host, accumulated))
                self.world.net.transmit(self.app.app_id, action.sink_host,
                                        accumulated)
                self._emit(result, "exfiltrate", action.sink_host,
                           f"{len(accumulated)} bytes")
            elif isinstance(action, SetCookie):
                self.state.add_cookie(self.world, self.app.uid, action.host,
                                      action.name, action.value)
                self._emit(result, "set-cookie", action.host, action.name)

    def _fetch_bytes(self, url: Url, result: RenderResult) -> bytes:
        try:
            if url.scheme == "file":
                return self.world.fs.read(url.path, self.app.uid)
            if url.scheme == "content":
                return self.load_content_uri(url).body.encode("latin-1")
        except NotFound:
            self._emit(result, "frame-blocked", url.text(), "path-not-found")
        except vfs.PermissionDenied:
            self._emit(result, "frame-blocked", url.text(), "sandbox-denied")
        except ProviderUnavailable as exc:
            self._emit(result, "frame-blocked", url.text(),
                       f"provider-unavailable: {exc}")
        return b""
