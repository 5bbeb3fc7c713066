"""Deterministic simulated network.

Nodes live in three scopes: loopback (apps on the victim device), intranet
(the device plus nearby hosts and the user's desktop browser), and the
Internet. Unencrypted intranet exchanges are sniffable by an intranet
adversary; loopback and internet traffic is not. Port reachability is gated
by the device screen state for servers that cannot run in the background.
"""

from __future__ import annotations

from dataclasses import dataclass, field


DEVICE_KINDS = {"device_app"}
INTRANET_KINDS = {"device_app", "intranet_host", "desktop_browser"}


class NetError(Exception):
    pass


class Unreachable(NetError):
    pass


class NotPermitted(NetError):
    pass


class ChannelRefused(NetError):
    pass


@dataclass
class Node:
    id: str
    kind: str  # device_app | intranet_host | internet_host | desktop_browser
    inbox: list[bytes] = field(default_factory=list)


@dataclass
class Binding:
    node_id: str
    port: int
    handler: object  # callable(client_id, payload) -> response payload
    background_capable: bool = True
    encrypted: bool = False


@dataclass
class Exchange:
    seq: int
    src: str
    dst: str
    port: int | None
    scope: str  # loopback | intranet | internet
    encrypted: bool
    payload: str


@dataclass
class Delivery:
    vector: str
    name: str
    body: str
    opened_in: str | None = None  # app id once opened
    path: str | None = None


class Network:
    """Single-device world network with a FIFO, fully deterministic log."""

    def __init__(self) -> None:
        self.nodes: dict[str, Node] = {}
        self.bindings: dict[tuple[str, int], Binding] = {}
        self.exchanges: list[Exchange] = []
        self.screen = "foreground"  # "foreground" | "off_locked"
        self._seq = 0

    def add_node(self, node_id: str, kind: str) -> Node:
        node = Node(node_id, kind)
        self.nodes[node_id] = node
        return node

    def node(self, node_id: str) -> Node:
        return self.nodes[node_id]

    def bind(self, node_id: str, port: int, handler,
             background_capable: bool = True, encrypted: bool = False) -> Binding:
        binding = Binding(node_id, port, handler, background_capable, encrypted)
        self.bindings[(node_id, port)] = binding
        return binding

    def set_screen(self, state: str) -> None:
        self.screen = state

    # -- reachability ------------------------------------------------------

    def scope_between(self, src_id: str, dst_id: str) -> str | None:
        src, dst = self.nodes[src_id], self.nodes[dst_id]
        if src.kind == "device_app" and dst.kind == "device_app":
            return "loopback"
        if src.kind in INTRANET_KINDS and dst.kind in INTRANET_KINDS:
            return "intranet"
        if "internet_host" in (src.kind, dst.kind):
            return "internet"
        return None

    def _binding_reachable(self, binding: Binding) -> bool:
        server = self.nodes[binding.node_id]
        if server.kind == "device_app" and self.screen == "off_locked":
            return binding.background_capable
        return True

    def scan_ports(self, actor_id: str, target_id: str) -> list[int]:
        scope = self.scope_between(actor_id, target_id)
        actor = self.nodes[actor_id]
        # Internet adversaries cannot reach into the intranet or the device.
        if scope is None or (actor.kind == "internet_host"
                             and self.nodes[target_id].kind != "internet_host"):
            raise Unreachable(f"{actor_id} cannot reach {target_id}")
        return sorted(
            port for (node_id, port), b in self.bindings.items()
            if node_id == target_id and self._binding_reachable(b)
        )

    # -- traffic -----------------------------------------------------------

    def _record(self, src: str, dst: str, port: int | None, scope: str,
                encrypted: bool, payload: str) -> None:
        self.exchanges.append(
            Exchange(self._seq, src, dst, port, scope, encrypted, payload))
        self._seq += 1

    def send(self, src_id: str, dst_id: str, port: int, payload: str) -> str:
        """One request/response connection to a bound port."""
        scope = self.scope_between(src_id, dst_id)
        src = self.nodes[src_id]
        if scope is None or (src.kind == "internet_host"
                             and self.nodes[dst_id].kind != "internet_host"):
            raise Unreachable(f"{src_id} cannot reach {dst_id}")
        binding = self.bindings.get((dst_id, port))
        if binding is None or not self._binding_reachable(binding):
            raise Unreachable(f"{dst_id}:{port} not listening")
        self._record(src_id, dst_id, port, scope, binding.encrypted, payload)
        response = binding.handler(src_id, payload)
        self._record(dst_id, src_id, port, scope, binding.encrypted, response)
        return response

    def transmit(self, src_id: str, dst_id: str, data: bytes) -> None:
        """Connectionless outbound delivery (exfiltration, scp)."""
        if dst_id not in self.nodes:
            self.add_node(dst_id, "internet_host")
        scope = self.scope_between(src_id, dst_id) or "internet"
        self._record(src_id, dst_id, None, scope,
                     False, data.decode("latin-1"))
        self.nodes[dst_id].inbox.append(bytes(data))

    def sniff(self, adversary_id: str) -> list[str]:
        """Plaintext of every unencrypted intranet exchange so far, in order.

        Encrypted exchanges appear as opaque markers. Sniffing is passive:
        it reads the log and never alters it.
        """
        adversary = self.nodes[adversary_id]
        if adversary.kind != "intranet_host":
            raise NotPermitted(f"{adversary_id} is not an intranet adversary")
        frames = []
        for ex in self.exchanges:
            if ex.scope != "intranet":
                continue
            frames.append("<encrypted>" if ex.encrypted else ex.payload)
        return frames

    def capture_dump(self) -> str:
        """Ordered text record of all exchanges, for golden tests."""
        lines = [
            f"{ex.seq}\t{ex.src}\t{ex.dst}\t{ex.port}\t{ex.scope}\t"
            f"{'enc' if ex.encrypted else 'plain'}\t{ex.payload!r}"
            for ex in self.exchanges
        ]
        return "\n".join(lines) + ("\n" if lines else "")

    # -- delivery channels ---------------------------------------------------

    def deliver(self, adversary_id: str, victim_app: str, vector: str,
                name: str, body: str, *, file_opening: str = "in_app",
                accepts_html: bool = True) -> Delivery:
        """Queue a malicious file/page for the victim through one channel.

        `file_opening` comes from the platform profile: "in_app" victims
        open the file in their own zone, "dedicated_app" victims hand it
        to a separate viewer app.
        """
        if vector not in ("web_page", "email_attachment", "chat_file", "open_with"):
            raise ValueError(f"unknown vector {vector!r}")
        is_html = name.endswith((".html", ".htm"))
        if is_html and not accepts_html:
            raise ChannelRefused(f"{victim_app} refuses HTML files")
        delivery = Delivery(vector=vector, name=name, body=body)
        delivery.opened_in = (
            victim_app if (vector == "web_page" or file_opening == "in_app")
            else "dedicated"
        )
        return delivery
