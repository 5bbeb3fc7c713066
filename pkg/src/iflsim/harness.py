"""Scenario harness: adversary models, platform profiles, the scenario
runner, the attack-by-mitigation matrix, and the platform differential
report.

Scenarios are declarative dictionaries (JSON-compatible; see
Scenario.from_dict) so they can be shipped as presets, written to files,
and perturbed by the mitigation toggles without touching code.
"""

from __future__ import annotations

import base64
import copy
import json
from dataclasses import dataclass, field

from . import cmddeputy, serverdeputy, vfs
from .cmddeputy import CommandRequest, ComponentDecl, Interpreter, ShellAuth
from .net import ChannelRefused, Unreachable
from .origin import SopPolicy, Url, parse_url
from .serverdeputy import (
    AppServer,
    ServerConfig,
    brute_force,
    csrf_upload_attack,
    format_request,
    parse_response,
    preset_by_name,
)
from .vfs import DirPolicy
from .webdeputy import (
    BrowserState,
    IntentRefused,
    ProviderUnavailable,
    RenderConfig,
    UserAction,
    WebDeputy,
)
from .world import World

SINK_HOST = "evil.example"
DESKTOP = "desktop"
DEDICATED_BROWSER = "com.android.browser"
LOCAL_ADVERSARY_APP = "com.adversary.attacker"

MITIGATIONS = [
    "baseline",
    "enhanced-sop",
    "nojs",
    "auth-access",
    "dir-randomized",
    "per-request-token",
    "per-connection-confirm",
    "photos-only",
]


class ScenarioInvalid(Exception):
    def __init__(self, field_path: str, message: str):
        super().__init__(f"{field_path}: {message}")
        self.field_path = field_path


@dataclass(frozen=True)
class PlatformProfile:
    file_opening: str  # "in_app" | "dedicated_app"
    dir_randomized: bool
    interpreters_allowed: bool
    background_servers_allowed: bool


ANDROID_LIKE = PlatformProfile("dedicated_app", False, True, True)
IOS_LIKE = PlatformProfile("in_app", True, False, False)
PROFILES = {"android_like": ANDROID_LIKE, "ios_like": IOS_LIKE}


@dataclass(frozen=True)
class AdversaryModel:
    kind: str  # "local" | "intranet" | "internet"
    permissions: frozenset = frozenset()
    # Local attack apps hold few or no permissions and never root.


@dataclass
class Scenario:
    name: str
    profile: str = "android_like"
    rooted: bool = False
    auth_access: bool = False
    dir_randomized: bool | None = None  # None: follow the profile
    victim: dict = field(default_factory=dict)
    other_apps: list = field(default_factory=list)
    targets: list = field(default_factory=list)
    deputy: dict = field(default_factory=dict)
    adversary: dict = field(default_factory=lambda: {"kind": "local"})
    pages: dict = field(default_factory=dict)
    attack: list = field(default_factory=list)
    expected: dict = field(default_factory=dict)
    note: str = ""

    @classmethod
    def from_dict(cls, data: dict) -> "Scenario":
        if not isinstance(data, dict):
            raise ScenarioInvalid("", "scenario must be a mapping")
        if not data.get("name"):
            raise ScenarioInvalid("name", "required")
        profile = data.get("profile", "android_like")
        if profile not in PROFILES:
            raise ScenarioInvalid("profile", f"unknown profile {profile!r}")
        victim = data.get("victim") or {}
        if not victim.get("app_id"):
            raise ScenarioInvalid("victim.app_id", "required")
        deputy = data.get("deputy") or {}
        if deputy.get("kind") not in ("web", "cmd", "server"):
            raise ScenarioInvalid("deputy.kind", "must be web, cmd, or server")
        adversary = data.get("adversary") or {"kind": "local"}
        if adversary.get("kind") not in ("local", "intranet", "internet"):
            raise ScenarioInvalid("adversary.kind",
                                  "must be local, intranet, or internet")
        attack = data.get("attack") or []
        for i, step in enumerate(attack):
            if not isinstance(step, dict) or "op" not in step:
                raise ScenarioInvalid(f"attack[{i}].op", "required")
        expected = data.get("expected") or {}
        if expected and expected.get("verdict") not in ("leak", "blocked"):
            raise ScenarioInvalid("expected.verdict", "must be leak or blocked")
        return cls(
            name=data["name"],
            profile=profile,
            rooted=bool(data.get("rooted", False)),
            auth_access=bool(data.get("auth_access", False)),
            dir_randomized=data.get("dir_randomized"),
            victim=victim,
            other_apps=data.get("other_apps") or [],
            targets=data.get("targets") or [],
            deputy=deputy,
            adversary=adversary,
            pages=data.get("pages") or {},
            attack=attack,
            expected=expected,
            note=data.get("note", ""),
        )

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "profile": self.profile,
            "rooted": self.rooted,
            "auth_access": self.auth_access,
            "dir_randomized": self.dir_randomized,
            "victim": self.victim,
            "other_apps": self.other_apps,
            "targets": self.targets,
            "deputy": self.deputy,
            "adversary": self.adversary,
            "pages": self.pages,
            "attack": self.attack,
            "expected": self.expected,
            "note": self.note,
        }


@dataclass
class AttackReport:
    scenario: str
    seed: int
    verdict: str  # "leak" | "blocked"
    blocked_stage: str | None
    leaked: list  # [{"path", "content_b64", "matches_target"}]
    events: list
    alerts: list
    extras: dict
    expected: dict
    expected_match: bool | None

    def to_dict(self) -> dict:
        return {
            "scenario": self.scenario,
            "seed": self.seed,
            "verdict": self.verdict,
            "blocked_stage": self.blocked_stage,
            "leaked": self.leaked,
            "events": self.events,
            "alerts": self.alerts,
            "extras": self.extras,
            "expected": self.expected,
            "expected_match": self.expected_match,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    def to_text(self) -> str:
        lines = [f"scenario: {self.scenario}", f"verdict: {self.verdict}"]
        if self.blocked_stage:
            lines.append(f"blocked at: {self.blocked_stage}")
        for entry in self.leaked:
            lines.append(f"leaked: {entry['path']} "
                         f"(matches target: {entry['matches_target']})")
        for alert in self.alerts:
            lines.append(f"alert: {alert['kind']} -> {alert['subject']}")
        if self.expected:
            lines.append(f"expected match: {self.expected_match}")
        lines.append(f"events: {len(self.events)}")
        return "\n".join(lines)


# Event kinds that explain why an attack produced no leak.
_EVENT_STAGES = [
    ("sop-denied", lambda e: "sop-denied"),
    ("script-suppressed", lambda e: "script-suppressed"),
    ("frame-blocked", lambda e: e["detail"].split(":")[0]),
    ("link-blocked", lambda e: e["detail"].split(":")[0]),
    ("intent-refused", lambda e: "intent-" + e["detail"]),
    ("connection-rejected", lambda e: "connection-confirm"),
    ("csrf-blocked", lambda e: e["detail"]),
    ("component-refused", lambda e: e["detail"]),
    ("auth-access-denied", lambda e: "auth-access"),
]


class ScenarioRunner:
    """Builds a world from a scenario and drives the attack steps."""

    def __init__(self, scenario: Scenario, seed: int = 0):
        self.scenario = scenario
        self.seed = seed
        self.profile = PROFILES[scenario.profile]
        self.world = World(seed, rooted=scenario.rooted,
                           auth_access=scenario.auth_access)
        self.obtained: list[bytes] = []
        self.blocks: list[str] = []
        self.extras: dict = {}
        self.client_cookies: dict[str, str] = {}
        self.delivery = None
        self.no_target = False
        self._build()

    # -- world construction --------------------------------------------------

    def _build(self) -> None:
        s, world = self.scenario, self.world
        randomized = (s.dir_randomized if s.dir_randomized is not None
                      else self.profile.dir_randomized)
        policy = DirPolicy(randomized=randomized, seed=self.seed)

        self.victim_zone = world.fs.install_app(s.victim["app_id"], policy)
        world.net.add_node(s.victim["app_id"], "device_app")
        for rel, content in (s.victim.get("files") or {}).items():
            world.fs.write(self.victim_zone.base_dir + rel,
                           self.victim_zone.uid, content)

        for other in s.other_apps:
            zone = world.fs.install_app(other["app_id"], policy)
            world.net.add_node(other["app_id"], "device_app")
            for rel, content in (other.get("files") or {}).items():
                world.fs.write(zone.base_dir + rel, zone.uid, content)

        # Fixed supporting cast: the user's desktop browser, the exfil sink,
        # and (on dedicated-opening platforms) the standalone viewer app.
        world.net.add_node(DESKTOP, "desktop_browser")
        world.net.add_node(SINK_HOST, "internet_host")
        self.dedicated_zone = None
        if self.profile.file_opening == "dedicated_app":
            self.dedicated_zone = world.fs.install_app(DEDICATED_BROWSER, policy)
            world.net.add_node(DEDICATED_BROWSER, "device_app")

        adversary = s.adversary
        self.adversary_model = AdversaryModel(
            adversary["kind"], frozenset(adversary.get("permissions") or []))
        if adversary["kind"] == "local":
            self.adversary_zone = world.fs.install_app(LOCAL_ADVERSARY_APP, policy)
            self.adversary_node = LOCAL_ADVERSARY_APP
            world.net.add_node(LOCAL_ADVERSARY_APP, "device_app")
        elif adversary["kind"] == "intranet":
            self.adversary_zone = None
            self.adversary_node = "intranet-adversary"
            world.net.add_node(self.adversary_node, "intranet_host")
        else:
            self.adversary_zone = None
            self.adversary_node = "internet-adversary"
            world.net.add_node(self.adversary_node, "internet_host")

        for url_text, body in s.pages.items():
            world.host_page(url_text, body)

        self._build_deputy()

    def _build_deputy(self) -> None:
        deputy = self.scenario.deputy
        kind = deputy["kind"]
        self.web = self.cmd = self.server = None
        if kind == "web":
            cfg = RenderConfig(
                sop_policy=SopPolicy(
                    mode=deputy.get("sop_mode", "legacy"),
                    allow_file_from_file=deputy.get("allow_file_from_file", False),
                    cross_scheme_http_to_file=deputy.get(
                        "cross_scheme_http_to_file", False),
                ),
                js_enabled=deputy.get("js_enabled", True),
                js_local_enabled=deputy.get("js_local_enabled", True),
                file_links_clickable=deputy.get("file_links_clickable", False),
                long_press_dialog=deputy.get("long_press_dialog", False),
                content_provider_exposed=deputy.get(
                    "content_provider_exposed", False),
                provider_implements_openfile=deputy.get(
                    "provider_implements_openfile", False),
                intent_parse_uri=deputy.get("intent_parse_uri", False),
                intent_component_loads_external_url=deputy.get(
                    "intent_component_loads_external_url", False),
                intent_component_allows_file_js=deputy.get(
                    "intent_component_allows_file_js", False),
            )
            self.web = WebDeputy(self.world, self.victim_zone, cfg)
        elif kind == "cmd":
            if not self.profile.interpreters_allowed:
                # No command interpreters pass app review on this platform.
                self.no_target = True
                return
            components = {
                c["name"]: ComponentDecl(
                    name=c["name"],
                    exported=c.get("exported", False),
                    required_permission=c.get("required_permission"),
                )
                for c in deputy.get("components") or []
            }
            shell = deputy.get("shell")
            shell_auth = ShellAuth(**shell) if shell else None
            self.cmd = Interpreter(
                self.world, self.victim_zone,
                runs_as_root=deputy.get("runs_as_root", False),
                components=components,
                shell_auth=shell_auth,
            )
            if shell_auth is not None:
                port = deputy.get("ssh_port", 22)
                self.world.net.bind(
                    self.scenario.victim["app_id"], port,
                    self.cmd.ssh_handler,
                    background_capable=self.profile.background_servers_allowed)
        else:
            config = self._server_config(deputy)
            self.server = AppServer(
                self.world, self.victim_zone, config,
                node_id=self.scenario.victim["app_id"],
                secret=deputy.get("code"),
                trusted_clients=set(deputy.get("trusted") or []),
            )
            self.server.bind(self.world.net)

    def _server_config(self, deputy: dict) -> ServerConfig:
        if deputy.get("preset"):
            config = copy.deepcopy(preset_by_name(deputy["preset"]))
        else:
            config = ServerConfig(name=deputy.get("name", "server"),
                                  port=deputy.get("port", 8080))
        for key in ("port", "protocol", "encrypted", "self_signed", "session",
                    "upload", "view_uploads", "alert"):
            if key in deputy:
                setattr(config, key, deputy[key])
        if "auth" in deputy:
            config.auth = serverdeputy._parse_auth(deputy["auth"])
        config.background_capable = (
            config.background_capable
            and self.profile.background_servers_allowed)
        return config

    # -- attack steps ----------------------------------------------------------

    def run(self) -> AttackReport:
        if self.no_target:
            self.blocks.append("no-target")
        else:
            for step in self.scenario.attack:
                self._run_step(dict(step))
        return self._report()

    def _run_step(self, step: dict) -> None:
        op = step.pop("op")
        probe = step.pop("probe", False)
        handler = getattr(self, f"_op_{op}", None)
        if handler is None:
            raise ScenarioInvalid(f"attack.op", f"unknown op {op!r}")
        blocks_before = len(self.blocks)
        handler(**step)
        if probe:
            del self.blocks[blocks_before:]

    def _block(self, stage: str) -> None:
        self.blocks.append(stage)

    def _collect_render(self, result) -> None:
        for _host, data in result.exfiltrated:
            self.obtained.append(bytes(data))

    # web deputy ops

    def _op_inject_cookie(self, host: str, name: str, value: str) -> None:
        self.web.state.add_cookie(self.world, self.victim_zone.uid,
                                  host, name, value)

    def _op_add_history(self, title: str, url: str) -> None:
        self.web.state.add_history(self.world, self.victim_zone.uid, title, url)

    def _op_add_bookmark(self, title: str, url: str) -> None:
        self.web.state.add_bookmark(self.world, self.victim_zone.uid, title, url)

    def _op_render(self, url: str | None = None, body: str | None = None,
                   user_action: dict | None = None) -> None:
        action = UserAction(**user_action) if user_action else None
        target = parse_url(url) if url is not None else body
        try:
            result = self.web.render(target, action)
        except vfs.NotFound:
            self._block("path-not-found")
            return
        self._collect_render(result)

    def _op_open_history_ui(self) -> None:
        self._collect_render(self.web.render_history_ui())

    def _op_open_bookmarks_ui(self) -> None:
        self._collect_render(self.web.render_bookmarks_ui())

    def _op_load_content(self, uri: str) -> None:
        try:
            doc = self.web.load_content_uri(parse_url(uri))
        except ProviderUnavailable:
            self._block("provider-unavailable")
            return
        except vfs.NotFound:
            self._block("path-not-found")
            return
        self._collect_render(self.web.render(doc))

    def _op_intent(self, uri: str) -> None:
        try:
            result = self.web.handle_intent_uri(parse_url(uri))
        except IntentRefused as exc:
            self._block(f"intent-{exc.condition}")
            return
        except vfs.NotFound:
            self._block("path-not-found")
            return
        self._collect_render(result)

    def _op_deliver(self, vector: str, name: str, body: str) -> None:
        try:
            delivery = self.world.net.deliver(
                self.adversary_node, self.scenario.victim["app_id"],
                vector, name, body,
                file_opening=self.profile.file_opening,
                accepts_html=self.scenario.victim.get("accepts_html", True))
        except ChannelRefused:
            self._block("channel-refused")
            return
        if delivery.opened_in == "dedicated":
            zone = self.dedicated_zone
        else:
            zone = self.victim_zone
        path = zone.base_dir + "attachments/" + delivery.name
        self.world.fs.write(path, zone.uid, delivery.body)
        delivery.path = path
        self.world.emit("delivery", self.adversary_node, delivery.name,
                        f"{vector} -> {delivery.opened_in}")
        self.delivery = delivery

    def _op_open_delivered(self, user_action: dict | None = None) -> None:
        if self.delivery is None or self.delivery.path is None:
            self._block("no-delivery")
            return
        action = UserAction(**user_action) if user_action else None
        if self.delivery.opened_in == "dedicated":
            # The platform hands the file to a standalone viewer; any attack
            # vector inside it lands outside the victim's zone.
            self._block("dedicated-app")
            deputy = WebDeputy(self.world, self.dedicated_zone, self.web.cfg)
        else:
            deputy = self.web
        url = Url("file", "", None, self.delivery.path)
        try:
            result = deputy.render(url, action)
        except vfs.NotFound:
            self._block("path-not-found")
            return
        self._collect_render(result)

    # cmd deputy ops

    def _op_invoke_component(self, component: str, argv: list) -> None:
        caller_uid = (self.adversary_zone.uid if self.adversary_zone
                      else vfs.ROOT_UID + 9999)
        req = CommandRequest(
            caller_uid=caller_uid,
            caller_permissions=self.adversary_model.permissions,
            channel="component",
            component=component,
            argv=tuple(argv),
        )
        try:
            self.cmd.invoke_component(req)
        except cmddeputy.ComponentNotExported:
            self._block("component-not-exported")
        except cmddeputy.PermissionRequired:
            self._block("permission-required")
        except vfs.PermissionDenied:
            self._block("auth-access" if self.world.auth_access
                        else "sandbox-denied")

    def _op_execute(self, argv: list, grant: bool = False) -> None:
        try:
            outcome = self.cmd.execute(argv, user_grant=grant)
        except vfs.PermissionDenied:
            self._block("auth-access" if self.world.auth_access
                        else "sandbox-denied")
            return
        if outcome.output:
            self.obtained.append(outcome.output)

    def _op_ssh(self, username: str, password: str, argv: list,
                port: int = 22) -> None:
        import base64 as b64

        payload = (f"AUTH {username} {password}\n"
                   f"CMD {' '.join(argv)}")
        try:
            raw = self.world.net.send(
                self.adversary_node, self.scenario.victim["app_id"],
                port, payload)
        except Unreachable:
            self._block("unreachable")
            return
        lines = raw.splitlines()
        if any(line == "OK" for line in lines):
            for line in lines:
                if line.startswith("OUT "):
                    self.obtained.append(b64.b64decode(line[4:]))
        else:
            self._block("auth-failed")

    def _op_read_public(self, path: str) -> None:
        actor = self.adversary_zone.uid if self.adversary_zone else 99999
        try:
            self.obtained.append(self.world.fs.read(path, actor))
        except vfs.NotFound:
            self._block("not-found")
        except vfs.PermissionDenied:
            self._block("sandbox-denied")

    # net / server ops

    def _op_set_screen(self, state: str) -> None:
        self.world.net.set_screen(state)

    def _op_scan(self) -> None:
        try:
            ports = self.world.net.scan_ports(
                self.adversary_node, self.scenario.victim["app_id"])
        except Unreachable:
            self._block("unreachable")
            return
        self.extras["scan_ports"] = ports
        if not ports:
            self._block("unreachable")

    def _op_user_confirm(self, client: str = DESKTOP) -> None:
        self.server.user_confirm(client)
        self.client_cookies[client] = self.server._grant_session(client)

    def _op_legit_auth(self, client: str = DESKTOP) -> None:
        payload = format_request("POST", "/auth",
                                 body=f"code={self.server.secret}")
        raw = self.world.net.send(client, self.scenario.victim["app_id"],
                                  self.server.config.port, payload)
        resp = parse_response(raw)
        cookie = resp.headers.get("Set-Cookie", "")
        if cookie.startswith("session="):
            self.client_cookies[client] = cookie.removeprefix("session=")

    def _http(self, client: str, method: str, path: str,
              query: dict | None = None, body: str = ""):
        headers = {}
        if client in self.client_cookies:
            headers["Cookie"] = f"session={self.client_cookies[client]}"
        payload = format_request(method, path, query, headers, body)
        raw = self.world.net.send(client, self.scenario.victim["app_id"],
                                  self.server.config.port, payload)
        return parse_response(raw)

    def _fetch_url_token(self, client: str) -> str | None:
        resp = self._http(client, "GET", "/list")
        for line in resp.body.splitlines():
            if line.startswith("token="):
                return line.removeprefix("token=")
        return None

    def _op_download(self, path: str, client: str | None = None) -> None:
        client = client or self.adversary_node
        query = {"path": path}
        if self.server.config.session == "url_token":
            token = self._fetch_url_token(client)
            if token:
                query["token"] = token
        try:
            resp = self._http(client, "GET", "/download", query)
        except Unreachable:
            self._block("unreachable")
            return
        if resp.status.startswith("200"):
            self.obtained.append(resp.body.encode("latin-1"))
        elif resp.status.startswith("401"):
            self._block("token" if "token" in resp.body else "auth")
        elif resp.status.startswith("403"):
            self._block("connection-confirm"
                        if self.server.config.alert == "per_conn_confirm"
                        else "policy")
        else:
            self._block("not-found")

    def _op_brute_then_download(self, path: str) -> None:
        try:
            code, attempts = brute_force(self.world.net, self.adversary_node,
                                         self.server)
        except Unreachable:
            self._block("unreachable")
            return
        self.extras["brute_attempts"] = attempts
        self.extras["brute_code"] = code
        resp = self._http(self.adversary_node, "POST", "/auth",
                          body=f"code={code}")
        cookie = resp.headers.get("Set-Cookie", "")
        if cookie.startswith("session="):
            self.client_cookies[self.adversary_node] = \
                cookie.removeprefix("session=")
        self._op_download(path)

    def _op_sniff_replay(self, path: str) -> None:
        import re

        frames = self.world.net.sniff(self.adversary_node)
        codes = []
        for frame in frames:
            codes.extend(re.findall(r"code=([A-Za-z0-9]+)", frame))
        if not codes:
            self._block("no-credential")
            return
        self.extras["sniffed_code"] = codes[0]
        resp = self._http(self.adversary_node, "POST", "/auth",
                          body=f"code={codes[0]}")
        cookie = resp.headers.get("Set-Cookie", "")
        if cookie.startswith("session="):
            self.client_cookies[self.adversary_node] = \
                cookie.removeprefix("session=")
        self._op_download(path)

    def _op_csrf(self, target: str, sink: str = SINK_HOST) -> None:
        fragment = csrf_upload_attack(self.world, self.server, DESKTOP,
                                      target, sink)
        if fragment["leak"]:
            self.obtained.extend(fragment["leaked"])
        else:
            self._block(fragment["blocked_at"])

    # -- reporting ---------------------------------------------------------------

    def _target_paths(self) -> list[str]:
        paths = []
        for target in self.scenario.targets:
            if isinstance(target, dict):
                zone = self.world.fs.zone_of(target["app"])
                paths.append(zone.base_dir + target["path"])
            elif target.startswith("/"):
                paths.append(target)
            else:
                paths.append(self.victim_zone.base_dir + target)
        return paths

    def _report(self) -> AttackReport:
        # Everything that reached adversary-controlled ground counts.
        obtained = list(self.obtained)
        for node in self.world.net.nodes.values():
            if node.kind == "internet_host" or node.id == self.adversary_node:
                obtained.extend(node.inbox)

        leaked = []
        all_matched = bool(self.scenario.targets)
        for path in self._target_paths():
            node = self.world.fs.files.get(path)
            content = node.content if node else None
            matched = content is not None and content in obtained
            if matched:
                leaked.append({
                    "path": path,
                    "content_b64": base64.b64encode(content).decode("ascii"),
                    "matches_target": True,
                })
            else:
                all_matched = False

        verdict = "leak" if all_matched else "blocked"
        stage = None
        if verdict == "blocked":
            stage = self.blocks[0] if self.blocks else self._stage_from_events()

        expected = self.scenario.expected
        expected_match = None
        if expected:
            expected_match = expected.get("verdict") == verdict and (
                verdict == "leak"
                or "stage" not in expected
                or expected["stage"] == stage)

        events = [e.to_dict() for e in self.world.trace]
        alerts = [e.to_dict() for e in self.world.alerts()]
        return AttackReport(
            scenario=self.scenario.name,
            seed=self.seed,
            verdict=verdict,
            blocked_stage=stage,
            leaked=leaked,
            events=events,
            alerts=alerts,
            extras=self.extras,
            expected=expected,
            expected_match=expected_match,
        )

    def _stage_from_events(self) -> str:
        for event in self.world.trace:
            for kind, stage_fn in _EVENT_STAGES:
                if event.kind == kind:
                    return stage_fn(event.to_dict())
        return "no-exfiltration"


def run_scenario(scenario, seed: int = 0) -> AttackReport:
    """Run one scenario in a fresh world; deterministic under (scenario, seed)."""
    if isinstance(scenario, dict):
        scenario = Scenario.from_dict(scenario)
    return ScenarioRunner(scenario, seed).run()


# -- the attack-by-mitigation matrix ----------------------------------------------


def apply_mitigation(data: dict, mitigation: str) -> dict:
    """Overlay one mitigation toggle on a scenario dictionary."""
    data = copy.deepcopy(data)
    deputy = data["deputy"]
    kind = deputy.get("kind")
    if mitigation == "baseline":
        pass
    elif mitigation == "enhanced-sop":
        if kind == "web":
            deputy["sop_mode"] = "enhanced"
    elif mitigation == "nojs":
        if kind == "web":
            deputy["js_local_enabled"] = False
    elif mitigation == "auth-access":
        data["auth_access"] = True
    elif mitigation == "dir-randomized":
        data["dir_randomized"] = True
    elif mitigation == "per-request-token":
        if kind == "server":
            deputy["session"] = "url_token"
    elif mitigation == "per-connection-confirm":
        if kind == "server":
            deputy["alert"] = "per_conn_confirm"
            deputy["trusted"] = [DESKTOP]
    elif mitigation == "photos-only":
        if kind == "server":
            deputy["upload"] = "photos_only"
    else:
        raise ValueError(f"unknown mitigation {mitigation!r}")
    data.pop("expected", None)
    return data


@dataclass
class MatrixReport:
    rows: list
    columns: list
    verdicts: dict  # row -> column -> "leak" | "blocked:<stage>"
    seed: int

    def cell(self, row: str, column: str) -> str:
        return self.verdicts[row][column]

    def leaks(self, row: str, column: str) -> bool:
        return self.verdicts[row][column] == "leak"

    def flipped_by(self, column: str) -> list:
        """Rows that leak at baseline but not under `column`."""
        return [row for row in self.rows
                if self.leaks(row, "baseline") and not self.leaks(row, column)]

    def to_dict(self) -> dict:
        return {
            "rows": self.rows,
            "columns": self.columns,
            "verdicts": self.verdicts,
            "seed": self.seed,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    def to_tsv(self) -> str:
        lines = ["\t".join(["preset", *self.columns])]
        for row in self.rows:
            lines.append("\t".join(
                [row, *(self.verdicts[row][c] for c in self.columns)]))
        return "\n".join(lines) + "\n"

    def to_text(self) -> str:
        width = max(len(r) for r in self.rows) + 2
        colw = max(len(c) for c in self.columns) + 2
        out = [" " * width + "".join(c.ljust(colw) for c in self.columns)]
        for row in self.rows:
            cells = []
            for c in self.columns:
                cells.append(("LEAK" if self.leaks(row, c) else "blocked")
                             .ljust(colw))
            out.append(row.ljust(width) + "".join(cells))
        return "\n".join(out)


def run_matrix(rows: list | None = None, mitigations: list | None = None,
               seed: int = 0) -> MatrixReport:
    """Run every matrix preset under every mitigation toggle."""
    from .catalog import MATRIX_PRESETS, preset

    rows = rows or list(MATRIX_PRESETS)
    mitigations = mitigations or list(MITIGATIONS)
    verdicts = {}
    for row in rows:
        base = preset(row).to_dict()
        verdicts[row] = {}
        for mitigation in mitigations:
            data = apply_mitigation(base, mitigation)
            report = run_scenario(data, seed)
            verdicts[row][mitigation] = (
                "leak" if report.verdict == "leak"
                else f"blocked:{report.blocked_stage}")
    return MatrixReport(rows=rows, columns=mitigations, verdicts=verdicts,
                        seed=seed)


# -- platform differentials ---------------------------------------------------------


def compare_profiles(seed: int = 0) -> list[dict]:
    """Run the platform-differential family under both shipped profiles.

    Returns one entry per behavioral difference between the android-like
    and ios-like profiles; the shipped family produces exactly four.
    """
    from .catalog import PROFILE_FAMILY, preset

    differentials = []
    for implication, name in PROFILE_FAMILY:
        data = preset(name).to_dict()
        data.pop("expected", None)
        results = {}
        for profile in ("android_like", "ios_like"):
            run = copy.deepcopy(data)
            run["profile"] = profile
            run["dir_randomized"] = None
            report = run_scenario(run, seed)
            results[profile] = (
                "leak" if report.verdict == "leak"
                else f"blocked:{report.blocked_stage}")
        if results["android_like"] != results["ios_like"]:
            differentials.append({
                "implication": implication,
                "preset": name,
                "android_like": results["android_like"],
                "ios_like": results["ios_like"],
            })
    return differentials
