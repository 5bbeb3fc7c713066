"""The embedded-app-server deputy.

An HTTP-like file server with configurable authentication, session model,
upload policy and connection alerts, mirroring the weakness matrix of the
ten most popular file-transfer apps. The same handler also backs the FTP
preset (nothing the attacks exploit is FTP-specific); the only difference
is the banner grammar.

Wire format: "<METHOD> <path>?<query>\\nHeader: v...\\n\\n<body>" requests,
"<status line>\\nHeader: v...\\n\\n<body>" responses.
"""

from __future__ import annotations

import hashlib
import itertools
import string
from dataclasses import dataclass, field
from importlib import resources

from .net import Network, Unreachable
from .vfs import AppZone, NotFound
from .world import World

CHARSETS = {
    "digits": string.digits,
    "lowercase": string.ascii_lowercase,
    "alnum": string.digits + string.ascii_lowercase,
}

PHOTO_SUFFIXES = (".jpg", ".jpeg", ".png", ".gif")


class NoMatch(Exception):
    pass


@dataclass(frozen=True)
class CodeAuth:
    length: int
    charset: str = "digits"

    def space(self) -> int:
        return len(CHARSETS[self.charset]) ** self.length


@dataclass(frozen=True)
class PasswordAuth:
    password: str = "admin"


CONFIRM_AUTH = "confirm"


@dataclass
class ServerConfig:
    name: str
    port: int
    protocol: str = "http"  # "http" | "ftp"
    encrypted: bool = False
    self_signed: bool = False
    auth: object = None  # None | CodeAuth | PasswordAuth | "confirm"
    session: str = "none"  # "cookie" | "url_token" | "none"
    upload: str = "disabled"  # disabled | photos_only | any | any_as_text
    view_uploads: bool = True
    alert: str = "none"  # none | first_banner | per_conn_confirm
    background_capable: bool = True
    platform: str = "android"


@dataclass
class HttpExchange:
    method: str
    path: str
    query: dict
    headers: dict
    body: str


@dataclass
class Response:
    status: str
    headers: dict
    body: str


@dataclass(frozen=True)
class Fingerprint:
    port: int
    signature: str


# -- wire helpers --------------------------------------------------------------

def format_request(method: str, path: str, query: dict | None = None,
                   headers: dict | None = None, body: str = "") -> str:
    qs = "&".join(f"{k}={v}" for k, v in (query or {}).items())
    line = f"{method} {path}" + (f"?{qs}" if qs else "")
    header_lines = [f"{k}: {v}" for k, v in (headers or {}).items()]
    return "\n".join([line, *header_lines]) + "\n\n" + body


def parse_request(text: str) -> HttpExchange:
    head, _, body = text.partition("\n\n")
    lines = head.splitlines()
    method, _, target = lines[0].partition(" ")
    path, _, qs = target.partition("?")
    query = {}
    for pair in qs.split("&"):
        if "=" in pair:
            k, _, v = pair.partition("=")
            query[k] = v
    headers = {}
    for line in lines[1:]:
        if ": " in line:
            k, _, v = line.partition(": ")
            headers[k] = v
    return HttpExchange(method, path, query, headers, body)


def format_response(resp: Response) -> str:
    header_lines = [f"{k}: {v}" for k, v in resp.headers.items()]
    return "\n".join([resp.status, *header_lines]) + "\n\n" + resp.body


def parse_response(text: str) -> Response:
    head, _, body = text.partition("\n\n")
    lines = head.splitlines()
    headers = {}
    for line in lines[1:]:
        if ": " in line:
            k, _, v = line.partition(": ")
            headers[k] = v
    return Response(lines[0] if lines else "", headers, body)


# -- fingerprinting ------------------------------------------------------------

def landing_response(config: ServerConfig) -> Response:
    """The unauthenticated "/" response; static per config, so equal configs
    produce equal fingerprints."""
    if config.protocol == "ftp":
        body = f"220 {config.name} FTP service ready"
    else:
        body = (f"<html><title>{config.name}</title>"
                f"<body>{config.name} file service on port {config.port}"
                f"</body></html>")
    return Response("200 OK", {"Server": config.name}, body)


def response_signature(resp: Response) -> str:
    material = resp.status + "|" + ",".join(sorted(resp.headers)) + "|" + resp.body
    return hashlib.sha256(material.encode()).hexdigest()[:16]


def fingerprint_of(config: ServerConfig) -> Fingerprint:
    return Fingerprint(config.port, response_signature(landing_response(config)))


def _parse_auth(text: str):
    if text == "none":
        return None
    if text == "confirm":
        return CONFIRM_AUTH
    if text.startswith("code:"):
        _, length, charset = text.split(":")
        return CodeAuth(int(length), charset)
    if text.startswith("password"):
        return PasswordAuth(text.partition(":")[2] or "admin")
    raise ValueError(f"bad auth spec {text!r}")


def load_presets() -> list[ServerConfig]:
    """The bundled weakness database for the ten surveyed server apps."""
    text = resources.files("iflsim").joinpath("server_presets.tsv").read_text()
    presets = []
    for line in text.splitlines():
        if not line or line.startswith("#"):
            continue
        (_num, name, platform, protocol, port, encrypted, auth, session,
         upload, view_uploads, alert, background) = line.split("\t")
        presets.append(ServerConfig(
            name=name,
            platform=platform,
            protocol=protocol,
            port=int(port),
            encrypted=encrypted == "true",
            auth=_parse_auth(auth),
            session=session,
            upload=upload,
            view_uploads=view_uploads == "true",
            alert=alert,
            background_capable=background == "true",
        ))
    return presets


def preset_by_name(name: str) -> ServerConfig:
    for preset in load_presets():
        if preset.name == name:
            return preset
    raise KeyError(name)


# -- the server ----------------------------------------------------------------

class AppServer:
    """One embedded file server bound to a victim app's zone."""

    def __init__(self, world: World, app: AppZone, config: ServerConfig,
                 node_id: str, *, secret: str | None = None,
                 trusted_clients: set[str] | None = None):
        self.world = world
        self.app = app
        self.config = config
        self.node_id = node_id
        self.secret = secret if secret is not None else self._default_secret()
        self.trusted_clients = trusted_clients if trusted_clients is not None else set()
        self.cookie_sessions: set[str] = set()
        self.valid_tokens: set[str] = set()
        self.confirmed_clients: set[str] = set()
        self.exfil_log: list[tuple[str, bytes]] = []
        self._token_counter = 0
        self._connections = 0

    def _default_secret(self) -> str:
        auth = self.config.auth
        if isinstance(auth, CodeAuth):
            chars = CHARSETS[auth.charset]
            value = int(hashlib.sha256(
                f"{self.world.seed}:{self.config.name}".encode()
            ).hexdigest(), 16) % auth.space()
            out = []
            for _ in range(auth.length):
                value, rem = divmod(value, len(chars))
                out.append(chars[rem])
            return "".join(reversed(out))
        if isinstance(auth, PasswordAuth):
            return auth.password
        return ""

    def bind(self, net: Network) -> None:
        net.bind(self.node_id, self.config.port, self.wire_handler,
                 background_capable=self.config.background_capable,
                 encrypted=self.config.encrypted)

    def user_confirm(self, client_id: str) -> None:
        self.confirmed_clients.add(client_id)
        self.world.emit("user-confirm", self.app.app_id, client_id)

    def _fresh_token(self) -> str:
        token = hashlib.sha256(
            f"{self.world.seed}:{self.config.name}:token:{self._token_counter}"
            .encode()).hexdigest()[:12]
        self._token_counter += 1
        self.valid_tokens.add(token)
        return token

    # -- request handling ----------------------------------------------------

    def wire_handler(self, client_id: str, payload: str) -> str:
        return format_response(self.handle(client_id, parse_request(payload)))

    def handle(self, client_id: str, ex: HttpExchange) -> Response:
        self._connections += 1
        if self._connections == 1:
            if self.config.alert == "first_banner":
                self.world.emit("first-connection-banner", self.app.app_id,
                                client_id)
            if self.config.encrypted and self.config.self_signed:
                self.world.emit("self-signed-warning", self.app.app_id,
                                client_id)
        if self.config.alert == "per_conn_confirm":
            self.world.emit("connection-confirm", self.app.app_id, client_id)
            if client_id not in self.trusted_clients:
                self.world.emit("connection-rejected", self.app.app_id,
                                client_id)
                return Response("403 Forbidden", {}, "")

        route = (ex.method, ex.path)
        if route == ("GET", "/"):
            return landing_response(self.config)
        if route == ("GET", "/list"):
            return self._list(ex)
        if route == ("POST", "/auth"):
            return self._auth(ex)
        if route == ("GET", "/download"):
            return self._download(ex)
        if route == ("POST", "/upload"):
            return self._upload(ex)
        if route == ("GET", "/view"):
            return self._view(client_id, ex)
        return Response("404 Not Found", {}, "")

    def _authorized(self, ex: HttpExchange) -> bool:
        auth = self.config.auth
        if auth is None:
            return True
        if auth == CONFIRM_AUTH:
            # Confirm-style auth admits only sessions the user blessed.
            cookie = ex.headers.get("Cookie", "")
            return cookie.removeprefix("session=") in self.cookie_sessions
        cookie = ex.headers.get("Cookie", "")
        if cookie.removeprefix("session=") in self.cookie_sessions:
            return True
        if self.config.session == "url_token" and \
                ex.query.get("token") in self.valid_tokens:
            return True
        return False

    def _consume_token(self, ex: HttpExchange) -> bool:
        """Per-request URL tokens: valid once, then gone."""
        if self.config.session != "url_token":
            return True
        token = ex.query.get("token")
        if token in self.valid_tokens:
            self.valid_tokens.discard(token)
            return True
        return False

    def _list(self, ex: HttpExchange) -> Response:
        if not self._authorized(ex):
            return Response("401 Unauthorized", {}, "")
        names = self.world.fs.list_dir(self.app.base_dir, self.app.uid)
        lines = []
        if self.config.session == "url_token":
            lines.append(f"token={self._fresh_token()}")
        lines.extend(names)
        return Response("200 OK", {"Server": self.config.name},
                        "\n".join(lines))

    def _auth(self, ex: HttpExchange) -> Response:
        auth = self.config.auth
        if auth is None:
            return Response("200 OK", {}, "no auth required")
        if auth == CONFIRM_AUTH:
            return Response("401 Unauthorized", {}, "confirmation required")
        supplied = dict(
            pair.partition("=")[::2] for pair in ex.body.split("&") if pair)
        credential = supplied.get("code") or supplied.get("password") or ""
        if credential != self.secret:
            return Response("401 Unauthorized", {}, "")
        if self.config.session == "cookie":
            token = self._fresh_token()
            self.cookie_sessions.add(token)
            return Response("200 OK", {"Set-Cookie": f"session={token}"}, "ok")
        if self.config.session == "url_token":
            return Response("200 OK", {}, f"token={self._fresh_token()}")
        return Response("200 OK", {}, "ok")

    def _grant_session(self, client_id: str) -> str:
        """A user-confirmed session (confirm-auth apps)."""
        token = self._fresh_token()
        self.cookie_sessions.add(token)
        return token

    def _download(self, ex: HttpExchange) -> Response:
        if not self._authorized(ex):
            return Response("401 Unauthorized", {}, "")
        if not self._consume_token(ex):
            return Response("401 Unauthorized", {}, "token required")
        rel = ex.query.get("path", "")
        if rel.startswith("/") or ".." in rel:
            return Response("403 Forbidden", {}, "")
        try:
            data = self.world.fs.read(self.app.base_dir + rel, self.app.uid)
        except NotFound:
            return Response("404 Not Found", {}, "")
        return Response("200 OK", {"Server": self.config.name},
                        data.decode("latin-1"))

    def _upload(self, ex: HttpExchange) -> Response:
        if self.config.upload == "disabled":
            return Response("403 Forbidden", {}, "uploads disabled")
        name = ex.query.get("name", "upload.bin")
        if self.config.upload == "photos_only" and \
                not name.lower().endswith(PHOTO_SUFFIXES):
            return Response("403 Forbidden", {}, "photos only")
        if not self._authorized(ex):
            return Response("401 Unauthorized", {}, "")
        if not self._consume_token(ex):
            return Response("401 Unauthorized", {}, "token required")
        self.world.fs.write(self.app.base_dir + "uploads/" + name,
                            self.app.uid, ex.body.encode("latin-1"))
        return Response("200 OK", {}, "stored")

    def _view(self, client_id: str, ex: HttpExchange) -> Response:
        """Serve an uploaded file back to a browser.

        Unless the config forces plain-text rendering, scripts inside the
        file run in the server's own origin: they may fetch /download with
        the viewer's session and exfiltrate what they read.
        """
        if not self.config.view_uploads:
            return Response("403 Forbidden", {}, "viewing disabled")
        name = ex.query.get("name", "")
        try:
            data = self.world.fs.read(self.app.base_dir + "uploads/" + name,
                                      self.app.uid)
        except NotFound:
            return Response("404 Not Found", {}, "")
        body = data.decode("latin-1")
        as_text = self.config.upload in ("photos_only", "any_as_text")
        if not as_text:
            self._execute_view_scripts(client_id, ex, body)
        return Response(
            "200 OK",
            {"Content-Type": "text/plain" if as_text else "text/html"},
            body)

    def _execute_view_scripts(self, client_id: str, ex: HttpExchange,
                              body: str) -> None:
        from .webdeputy import Exfiltrate, LoadFrame, ReadBody, parse_scripts

        for script in parse_scripts(body):
            accumulated = b""
            for action in script.actions:
                if isinstance(action, ReadBody):
                    accumulated += body.encode("latin-1")
                elif isinstance(action, LoadFrame):
                    # Same-origin fetch riding the viewer's session.
                    path, _, qs = action.url.partition("?")
                    sub = HttpExchange("GET", path, dict(
                        p.partition("=")[::2] for p in qs.split("&") if p),
                        dict(ex.headers), "")
                    resp = self.handle(client_id, sub)
                    if resp.status.startswith("200"):
                        accumulated += resp.body.encode("latin-1")
                elif isinstance(action, Exfiltrate):
                    self.exfil_log.append((action.sink_host, accumulated))
                    self.world.net.transmit(client_id, action.sink_host,
                                            accumulated)
                    self.world.emit("exfiltrate", client_id,
                                    action.sink_host,
                                    f"{len(accumulated)} bytes")


# -- attacks -------------------------------------------------------------------

def brute_force(net: Network, adversary_id: str, server: AppServer
                ) -> tuple[str, int]:
    """Ascending enumeration of the code space; no rate limiting exists."""
    auth = server.config.auth
    if not isinstance(auth, CodeAuth):
        raise ValueError("brute_force requires code authentication")
    chars = CHARSETS[auth.charset]
    attempts = 0
    for combo in itertools.product(chars, repeat=auth.length):
        attempts += 1
        code = "".join(combo)
        payload = format_request("POST", "/auth", body=f"code={code}")
        raw = net.send(adversary_id, server.node_id, server.config.port,
                       payload)
        if parse_response(raw).status.startswith("200"):
            return code, attempts
    raise NoMatch("code space exhausted")


def csrf_upload_attack(world: World, server: AppServer, victim_browser: str,
                       target_rel: str, sink_host: str) -> dict:
    """Improved file-upload CSRF: a cross-site page in the victim's desktop
    browser uploads a scripted HTML file; viewing it later executes the
    script in the server's origin.

    Returns a report fragment: {"leak": bool, "blocked_at": stage | None}.
    """
    net = world.net
    port = server.config.port
    payload_body = (f"<script>FRAME /download?path={target_rel};"
                    f"EXFIL {sink_host}</script>")

    # Stage 1: the forged cross-site upload. A cross-site page cannot read
    # same-origin responses, so it cannot learn a per-request URL token.
    if server.config.session == "url_token":
        world.emit("csrf-blocked", victim_browser, server.config.name, "token")
        return {"leak": False, "blocked_at": "token"}
    upload = format_request("POST", "/upload", {"name": "payload.html"},
                            body=payload_body)
    raw = net.send(victim_browser, server.node_id, port, upload)
    resp = parse_response(raw)
    if not resp.status.startswith("200"):
        world.emit("csrf-blocked", victim_browser, server.config.name,
                   "upload-policy")
        return {"leak": False, "blocked_at": "upload-policy"}

    # Stage 2: the victim later views the uploaded file in the same browser.
    before = len(server.exfil_log)
    view = format_request("GET", "/view", {"name": "payload.html"})
    raw = net.send(victim_browser, server.node_id, port, view)
    resp = parse_response(raw)
    exfiltrated = server.exfil_log[before:]
    if resp.headers.get("Content-Type") == "text/plain" or not exfiltrated:
        world.emit("csrf-blocked", victim_browser, server.config.name,
                   "view-rendering")
        return {"leak": False, "blocked_at": "view-rendering"}
    leaked = [data for _host, data in exfiltrated if data]
    if not leaked:
        return {"leak": False, "blocked_at": "view-rendering"}
    return {"leak": True, "blocked_at": None, "leaked": leaked}


def fingerprint_probe(net: Network, adversary_id: str, host_id: str,
                      database: list[ServerConfig] | None = None
                      ) -> list[tuple[int, str]]:
    """Identify which preset apps are listening on a host.

    Ports narrow the candidates; port collisions are separated by the
    signature of the unauthenticated "/" response alone.
    """
    database = database if database is not None else load_presets()
    try:
        ports = net.scan_ports(adversary_id, host_id)
    except Unreachable:
        raise NoMatch(host_id) from None
    guesses = []
    for port in ports:
        candidates = [p for p in database if p.port == port]
        if not candidates:
            continue
        if len(candidates) == 1:
            guesses.append((port, candidates[0].name))
            continue
        raw = net.send(adversary_id, host_id, port, format_request("GET", "/"))
        sig = response_signature(parse_response(raw))
        for candidate in candidates:
            if fingerprint_of(candidate).signature == sig:
                guesses.append((port, candidate.name))
                break
    if not guesses:
        raise NoMatch(host_id)
    return guesses
