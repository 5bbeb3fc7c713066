"""The command-interpreter deputy.

A closed mini shell over the virtual filesystem (cat/ls/cp/chmod/
echo_append/scp/history), invocable through the app's own UI, through
exposed or permission-protected components, or through an SSH-like line
protocol bound to port 22. Relative paths resolve against the interpreter's
own zone, the way a shell's working directory would.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import vfs
from .vfs import PUBLIC_DIR, ROOT_UID, AppZone, PermissionDenied
from .world import World

COMMANDS = {"cat", "ls", "cp", "chmod", "echo_append", "scp", "history"}


class CmdError(Exception):
    pass


class UnknownCommand(CmdError):
    pass


class ComponentNotExported(CmdError):
    pass


class PermissionRequired(CmdError):
    pass


class AuthFailed(CmdError):
    pass


@dataclass(frozen=True)
class ComponentDecl:
    name: str
    exported: bool
    required_permission: str | None = None
    # A protected proxy may delegate to a backend whose own exported flag
    # is independent; that asymmetry is the whole vulnerability.
    delegates_to: str | None = None


@dataclass(frozen=True)
class ShellAuth:
    username: str = "user"  # "user" | "root"
    password: str = "admin"
    banner_reveals_identity: bool = True
    identity: str = "SSHDroid"


@dataclass(frozen=True)
class CommandRequest:
    caller_uid: int
    caller_permissions: frozenset = frozenset()
    channel: str = "internal_ui"  # internal_ui | component | remote_shell
    component: str | None = None
    argv: tuple = ()


@dataclass
class CommandOutcome:
    argv: tuple
    output: bytes = b""
    events: list = field(default_factory=list)


class Interpreter:
    """A terminal app whose command component is the confused deputy."""

    def __init__(self, world: World, app: AppZone, *,
                 runs_as_root: bool = False,
                 components: dict[str, ComponentDecl] | None = None,
                 shell_auth: ShellAuth | None = None):
        if runs_as_root and not world.rooted:
            raise ValueError("root interpreter requires a rooted device")
        self.world = world
        self.app = app
        self.runs_as_root = runs_as_root
        self.components = components or {}
        self.shell_auth = shell_auth
        self.history_path = app.base_dir + ".bash_history"

    @property
    def effective_uid(self) -> int:
        return ROOT_UID if self.runs_as_root else self.app.uid

    def _resolve(self, path: str) -> str:
        if not path.startswith("/"):
            path = self.app.base_dir + path
        return vfs.normalize(path)

    def _emit(self, outcome: CommandOutcome, kind: str, subject: str = "",
              detail: str = "") -> None:
        outcome.events.append(
            self.world.emit(kind, self.app.app_id, subject, detail))

    # -- execution -----------------------------------------------------------

    def execute(self, argv, *, as_uid: int | None = None,
                user_grant: bool = False) -> CommandOutcome:
        argv = tuple(argv)
        outcome = CommandOutcome(argv=argv)
        if not argv or argv[0] not in COMMANDS:
            raise UnknownCommand(argv[0] if argv else "")
        uid = self.effective_uid if as_uid is None else as_uid

        self._check_auth_access(argv, outcome, user_grant)

        cmd = argv[0]
        fs = self.world.fs
        if cmd == "cat":
            outcome.output = fs.read(self._resolve(argv[1]), uid)
        elif cmd == "ls":
            names = fs.list_dir(self._resolve(argv[1]), uid)
            outcome.output = "\n".join(names).encode()
        elif cmd == "cp":
            src, dst = self._resolve(argv[1]), self._resolve(argv[2])
            data = fs.read(src, uid)
            fs.write(dst, uid, data)
        elif cmd == "chmod":
            flag = argv[1] in ("a+r", "world-readable", "666")
            fs.chmod(self._resolve(argv[2]), uid, flag)
        elif cmd == "echo_append":
            fs.append(self._resolve(argv[1]), uid, " ".join(argv[2:]))
        elif cmd == "scp":
            data = fs.read(self._resolve(argv[1]), uid)
            self.world.net.transmit(self.app.app_id, argv[2], data)
            self._emit(outcome, "scp-transmit", argv[2], f"{len(data)} bytes")
        elif cmd == "history":
            try:
                outcome.output = fs.read(self.history_path, uid)
            except vfs.NotFound:
                outcome.output = b""

        self._emit(outcome, "command", " ".join(argv))
        fs.append(self.history_path, self.app.uid, " ".join(argv))
        return outcome

    def _check_auth_access(self, argv, outcome: CommandOutcome,
                           user_grant: bool) -> None:
        """AuthAccess mitigation: touching any private zone needs a grant."""
        if not self.world.auth_access:
            return
        touched = [
            a for a in argv[1:]
            if self._touches_private_zone(a)
        ] or (["history"] if argv[0] == "history" else [])
        if not touched:
            return
        if user_grant:
            self._emit(outcome, "user-grant", " ".join(argv))
            return
        self._emit(outcome, "auth-access-denied", " ".join(argv))
        raise PermissionDenied("AuthAccess: private-zone access not granted")

    def _touches_private_zone(self, arg: str) -> bool:
        if " " in arg or not arg:
            return False
        try:
            path = self._resolve(arg)
        except vfs.MalformedPath:
            return False
        if path.startswith(PUBLIC_DIR):
            return False
        return self.world.fs.owner_zone(path) is not None

    # -- channels ------------------------------------------------------------

    def invoke_component(self, req: CommandRequest) -> CommandOutcome:
        """Cross-app component invocation; on success the command runs with
        the interpreter's identity."""
        if req.channel != "component":
            raise ValueError("invoke_component requires a component channel")
        comp = self.components.get(req.component or "")
        if comp is None:
            raise ComponentNotExported(req.component)
        external = req.caller_uid != self.app.uid
        if external and not comp.exported:
            self.world.emit("component-refused", self.app.app_id,
                            comp.name, "not-exported")
            raise ComponentNotExported(comp.name)
        if comp.required_permission and \
                comp.required_permission not in req.caller_permissions:
            self.world.emit("component-refused", self.app.app_id,
                            comp.name, "permission-required")
            raise PermissionRequired(comp.required_permission)
        self.world.emit("component-invoke", self.app.app_id, comp.name,
                        " ".join(req.argv))
        return self.execute(req.argv)

    def ssh_banner(self) -> str:
        """Pre-auth banner; identity disclosure needs no credentials."""
        auth = self.shell_auth or ShellAuth()
        if auth.banner_reveals_identity:
            return f"BANNER {auth.identity} {auth.username}"
        return "BANNER ssh"

    def ssh_session(self, credentials: tuple[str, str], argv) -> CommandOutcome:
        """Authenticate against ShellAuth, then run argv as execute()."""
        auth = self.shell_auth or ShellAuth()
        username, password = credentials
        if username == "root" and not self.world.rooted:
            raise AuthFailed("root shell requires a rooted device")
        if username != auth.username or password != auth.password:
            self.world.emit("ssh-auth-failed", self.app.app_id, username)
            raise AuthFailed(username)
        self.world.emit("ssh-auth-ok", self.app.app_id, username)
        as_uid = ROOT_UID if username == "root" else None
        return self.execute(argv, as_uid=as_uid)

    def ssh_handler(self, client_id: str, payload: str) -> str:
        """SSH-like wire protocol over the net module.

        Request lines: "AUTH <user> <pass>" then "CMD <argv...>"; the
        response starts with the banner, then OK/FAIL, then OUT <base64>.
        """
        import base64

        lines = payload.splitlines()
        response = [self.ssh_banner()]
        creds = None
        for line in lines:
            if line.startswith("AUTH "):
                parts = line.split()
                creds = (parts[1], parts[2]) if len(parts) == 3 else ("", "")
            elif line.startswith("CMD "):
                if creds is None:
                    response.append("FAIL")
                    continue
                try:
                    outcome = self.ssh_session(creds, tuple(line.split()[1:]))
                except (AuthFailed, CmdError, vfs.VfsError) as exc:
                    response.append(f"FAIL {exc}")
                else:
                    response.append("OK")
                    out = base64.b64encode(outcome.output).decode("ascii")
                    response.append(f"OUT {out}")
        return "\n".join(response)
