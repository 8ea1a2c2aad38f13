"""Component-side client library.

A Session connects to the central monitor, emits events (fire-and-forget)
and serves monitor-initiated COND_REQ/ACT_REQ callbacks. A session has
one logical owner; the owner may keep emitting while `serve` runs in a
separate thread (sends are internally ordered), but no other cross-thread
use is supported.

Closing is a handshake: `close()` sends BYE and keeps answering inbound
requests until the monitor replies BYE (the monitor holds callback owners
open until its event pipeline drains).
"""

from __future__ import annotations

import dataclasses
import logging
import socket
import threading
import time
from typing import Callable, Mapping

from . import wire
from .compiler.artifacts import ComponentManifest
from .errors import (
    ConnectError, DuplicateRegistrationError, NotInManifestError, SendError,
)

log = logging.getLogger(__name__)

ConditionCallback = Callable[[Mapping[str, str]], bool]
ActionCallback = Callable[[Mapping[str, str]], None]


def parse_address(address: "str | tuple[str, int]") -> tuple[str, int]:
    """Accepts ('host', port) or 'host:port'."""
    if isinstance(address, tuple):
        return address
    host, _, port = address.rpartition(":")
    if not host or not port.isdigit():
        raise ConnectError(f"bad monitor address {address!r} (want host:port)")
    return host, int(port)


class Session:
    """One component's connection to the central monitor."""

    def __init__(self, sock: socket.socket, component_label: str,
                 manifest: ComponentManifest | None = None):
        self.component_label = component_label
        self.manifest = manifest
        self._sock = sock
        self._send_lock = threading.Lock()
        self._out_seq = 0
        self._last_in_seq = 0
        self._decoder = wire.FrameDecoder()
        self._conditions: dict[str, ConditionCallback] = {}
        self._actions: dict[str, ActionCallback] = {}
        self._closed = False
        self._bye_sent = False
        self._serving = False

    # -- connection -----------------------------------------------------------

    @classmethod
    def connect(cls, address: "str | tuple[str, int]", component_label: str,
                manifest: ComponentManifest | None = None,
                timeout: float = 5.0) -> "Session":
        """Open a connection and send HELLO.

        When a manifest is given, its component label must match and all
        emit/register names are checked against it.
        """
        if manifest is not None and manifest.component_label != component_label:
            raise NotInManifestError(
                f"manifest is for '{manifest.component_label}', not '{component_label}'")
        host, port = parse_address(address)
        try:
            sock = socket.create_connection((host, port), timeout=timeout)
        except OSError as exc:
            raise ConnectError(f"cannot reach monitor at {host}:{port}: {exc}") from exc
        sock.settimeout(None)
        sock.setsockopt(socket.IPPROTO_TCP, socket.TCP_NODELAY, 1)
        session = cls(sock, component_label, manifest)
        session._send(wire.Hello(component_label=component_label))
        return session

    @property
    def connected(self) -> bool:
        return not self._closed

    def _send(self, msg: wire.WireMessage) -> None:
        with self._send_lock:
            if self._closed:
                raise SendError("session is closed")
            self._out_seq += 1
            framed = wire.encode(dataclasses.replace(msg, seq=self._out_seq))
            try:
                self._sock.sendall(framed)
            except OSError as exc:
                self._teardown()
                raise SendError(f"connection to monitor broke: {exc}") from exc

    # -- outbound events ----------------------------------------------------------

    def emit_event(self, name: str, context_key: str,
                   params: Mapping[str, str] | None = None) -> None:
        """Send one EVENT; fire-and-forget (no monitor round trip)."""
        if self.manifest is not None and self.manifest.event_named(name) is None:
            raise NotInManifestError(
                f"event '{name}' is not in the manifest for "
                f"'{self.component_label}'")
        self._send(wire.Event(event_name=name, context_key=context_key,
                              params=dict(params or {})))

    # -- callbacks ------------------------------------------------------------------

    def register_condition(self, name: str, callback: ConditionCallback) -> None:
        if self.manifest is not None and name not in self.manifest.condition_names():
            raise NotInManifestError(
                f"condition '{name}' is not system-side for '{self.component_label}'")
        if name in self._conditions:
            raise DuplicateRegistrationError(f"condition '{name}' already registered")
        self._conditions[name] = callback

    def register_action(self, name: str, callback: ActionCallback) -> None:
        if self.manifest is not None and name not in self.manifest.action_names():
            raise NotInManifestError(
                f"action '{name}' is not system-side for '{self.component_label}'")
        if name in self._actions:
            raise DuplicateRegistrationError(f"action '{name}' already registered")
        self._actions[name] = callback

    # -- inbound loop ------------------------------------------------------------------

    def serve(self) -> None:
        """Handle monitor-initiated requests in arrival order, one at a
        time, until the monitor says BYE or the connection closes."""
        self._serving = True
        try:
            while not self._closed:
                try:
                    data = self._sock.recv(65536)
                except OSError:
                    break
                if not data:
                    break
                try:
                    messages = self._decoder.feed(data)
                except wire.DecodeError as exc:
                    log.error("%s: malformed frame from monitor: %s",
                              self.component_label, exc)
                    break
                for msg in messages:
                    if not self._handle(msg):
                        return
        finally:
            self._serving = False
            self._teardown()

    def _handle(self, msg: wire.WireMessage) -> bool:
        if msg.seq <= self._last_in_seq:
            log.error("%s: monitor seq went backwards (%d after %d)",
                      self.component_label, msg.seq, self._last_in_seq)
            self._teardown()
            return False
        self._last_in_seq = msg.seq
        if isinstance(msg, wire.CondReq):
            callback = self._conditions.get(msg.condition_name)
            if callback is None:
                log.error("%s: COND_REQ for unregistered condition '%s'",
                          self.component_label, msg.condition_name)
                result = False
            else:
                try:
                    result = bool(callback(msg.args))
                except Exception:
                    log.exception("%s: condition '%s' raised",
                                  self.component_label, msg.condition_name)
                    result = False
            self._send(wire.CondResp(request_id=msg.request_id, result=result))
            return True
        if isinstance(msg, wire.ActReq):
            callback = self._actions.get(msg.action_name)
            if callback is None:
                log.error("%s: ACT_REQ for unregistered action '%s'",
                          self.component_label, msg.action_name)
            else:
                try:
                    callback(msg.args)
                except Exception:
                    log.exception("%s: action '%s' raised",
                                  self.component_label, msg.action_name)
            self._send(wire.ActAck(request_id=msg.request_id))
            return True
        if isinstance(msg, wire.Verdict):
            log.warning("%s: monitor verdict [%s] %s %s", self.component_label,
                        msg.severity, msg.context_key, msg.text)
            return True
        if isinstance(msg, wire.Bye):
            self._teardown()
            return False
        log.error("%s: unexpected %s from monitor", self.component_label, msg.kind)
        self._teardown()
        return False

    # -- shutdown ------------------------------------------------------------------------

    def close(self, timeout: float = 10.0) -> None:
        """Send BYE, keep serving until the monitor's BYE, then close."""
        if self._closed:
            return
        if not self._bye_sent:
            self._bye_sent = True
            try:
                self._send(wire.Bye())
            except SendError:
                return
        if self._serving:
            # the serve thread will see the monitor's BYE and tear down
            deadline = time.monotonic() + timeout
            while self._serving and not self._closed and time.monotonic() < deadline:
                time.sleep(0.02)
            self._teardown()
            return
        self._sock.settimeout(timeout)
        try:
            self.serve()
        finally:
            self._teardown()

    def _teardown(self) -> None:
        with self._send_lock:
            if self._closed:
                return
            self._closed = True
        try:
            self._sock.close()
        except OSError:
            pass
