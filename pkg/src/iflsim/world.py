"""World state shared by the deputy modules: files, network, device flags,
and the append-only event trace."""

from __future__ import annotations

from dataclasses import dataclass

from .net import Network
from .vfs import Filesystem

# Event kinds the user would actually see on screen.
ALERT_KINDS = {
    "long-press-dialog",
    "connection-confirm",
    "first-connection-banner",
    "self-signed-warning",
    "user-grant",
    "user-confirm",
}


@dataclass
class Event:
    kind: str
    actor: str
    subject: str = ""
    detail: str = ""

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "actor": self.actor,
            "subject": self.subject,
            "detail": self.detail,
        }


class World:
    """One device plus its surrounding network; single logical thread."""

    def __init__(self, seed: int = 0, *, rooted: bool = False,
                 auth_access: bool = False) -> None:
        self.seed = seed
        self.rooted = rooted
        self.auth_access = auth_access
        self.fs = Filesystem()
        self.net = Network()
        self.web_pages: dict[str, str] = {}
        self.trace: list[Event] = []

    def emit(self, kind: str, actor: str, subject: str = "",
             detail: str = "") -> Event:
        event = Event(kind, actor, subject, detail)
        self.trace.append(event)
        return event

    def host_page(self, url_text: str, body: str) -> None:
        """Publish an adversary-controlled web page."""
        self.web_pages[url_text] = body

    def alerts(self) -> list[Event]:
        return [e for e in self.trace if e.kind in ALERT_KINDS]
