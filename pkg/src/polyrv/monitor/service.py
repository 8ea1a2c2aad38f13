"""Orchestrated central monitor service over TCP.

Connection handling: every component HELLOs first (protocol version must
match); its EVENTs are queued centrally in arrival order and handed to
one executor per context key, so one context's pending system-side query
never stalls the others while events for the same key stay strictly
serial. COND_REQ/ACT_REQ go out on the owning component's connection
with at most one outstanding request per connection.

Shutdown: a component's BYE means "no more events from me". Components
that own no system-side callbacks get their BYE acknowledged and closed
immediately; owners are held open (still answering queries) until every
connection has said BYE or dropped, the event pipeline has drained, and
the monitor replies BYE to each. The service then exits — or earlier on
an operator stop.
"""

from __future__ import annotations

import dataclasses
import logging
import queue
import socket
import sys
import threading
from typing import IO, Mapping

from .. import wire
from ..compiler.artifacts import CentralConfig
from ..errors import DecodeError, SystemSideUnavailable
from .engine import Directive, EmitVerdict, MonitorState, step

log = logging.getLogger(__name__)

_DRAIN = object()
_STOP = object()


class _Request:
    __slots__ = ("ready", "result", "failed")

    def __init__(self):
        self.ready = threading.Event()
        self.result = False
        self.failed = False


class _Connection:
    def __init__(self, service: "MonitorService", sock: socket.socket, peer: str):
        self.service = service
        self.sock = sock
        self.peer = peer
        self.label: str | None = None
        self.decoder = wire.FrameDecoder()
        self.send_lock = threading.Lock()
        self.out_seq = 0
        self.last_in_seq = 0
        self.request_lock = threading.Lock()
        self.next_request_id = 1
        self.pending: dict[int, _Request] = {}
        self.bye_received = False
        self.closed = False

    @property
    def name(self) -> str:
        return self.label or self.peer

    def send(self, msg: wire.WireMessage) -> None:
        with self.send_lock:
            if self.closed:
                raise SystemSideUnavailable(f"connection to {self.name} is closed")
            self.out_seq += 1
            framed = wire.encode(dataclasses.replace(msg, seq=self.out_seq))
            try:
                self.sock.sendall(framed)
            except OSError as exc:
                raise SystemSideUnavailable(f"send to {self.name} failed: {exc}") from exc
        self.service._trace(">>", self.name, msg)

    def fail_pending(self) -> None:
        for request in list(self.pending.values()):
            request.failed = True
            request.ready.set()
        self.pending.clear()


class MonitorService:
    """Run one central monitor for one compiled config."""

    def __init__(self, config: CentralConfig, host: str = "127.0.0.1",
                 port: int = wire.DEFAULT_PORT, *, out: IO[str] | None = None,
                 log_path=None, trace_path=None, request_timeout: float = 5.0):
        self.state = MonitorState(config)
        self.config = config
        self.request_timeout = request_timeout
        self.verdicts: list[EmitVerdict] = []
        self._out = out
        self._log_file = open(log_path, "w", encoding="utf-8") if log_path else None
        self._trace_file = open(trace_path, "w", encoding="utf-8") if trace_path else None
        self._io_lock = threading.Lock()

        self._listener = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
        self._listener.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
        self._listener.bind((host, port))
        self._listener.listen()
        self.host, self.port = self._listener.getsockname()[:2]

        self._conns: list[_Connection] = []
        self._by_label: dict[str, _Connection] = {}
        self._conns_lock = threading.Lock()
        self._ever_connected = False

        self._events: queue.Queue = queue.Queue()
        self._executors: dict[str, queue.Queue] = {}
        self._executor_threads: list[threading.Thread] = []
        self._threads: list[threading.Thread] = []

        self._shutdown_started = False
        self._stopped = threading.Event()
        self._systemside_labels = config.systemside_labels()

    # -- lifecycle ----------------------------------------------------------

    def start(self) -> None:
        """Start all service threads; returns immediately."""
        accept = threading.Thread(target=self._accept_loop, name="rv-accept", daemon=True)
        dispatch = threading.Thread(target=self._dispatch_loop, name="rv-dispatch",
                                    daemon=True)
        self._threads += [accept, dispatch]
        accept.start()
        dispatch.start()

    def run(self) -> int:
        """Blocking entry point; returns 0 after a clean shutdown."""
        self.start()
        try:
            self._stopped.wait()
        except KeyboardInterrupt:
            self.stop()
            self._stopped.wait()
        self._emit_summary()
        return 0

    def wait(self, timeout: float | None = None) -> bool:
        return self._stopped.wait(timeout)

    def stop(self) -> None:
        """Operator stop: shut down regardless of connection states."""
        self._begin_shutdown()

    @property
    def violation_count(self) -> int:
        return sum(1 for v in self.verdicts if v.severity == wire.SEVERITY_VIOLATION)

    def _emit_summary(self) -> None:
        infos = len(self.verdicts) - self.violation_count
        self._print(f"SUMMARY: {self.violation_count} violations, {infos} info")

    # -- output ----------------------------------------------------------------

    def _print(self, line: str) -> None:
        with self._io_lock:
            if self._out is not None:
                self._out.write(line + "\n")
                self._out.flush()
            if self._log_file is not None:
                self._log_file.write(line + "\n")
                self._log_file.flush()

    def _trace(self, direction: str, who: str, msg: wire.WireMessage) -> None:
        if self._trace_file is None:
            return
        with self._io_lock:
            self._trace_file.write(f"{direction} {who} {msg.kind} {msg}\n")
            self._trace_file.flush()

    def _record_verdict(self, verdict: EmitVerdict) -> None:
        self.verdicts.append(verdict)
        self._print(f"VERDICT {verdict.severity} {verdict.context_key} {verdict.text}")

    # -- connection plumbing ------------------------------------------------------

    def _accept_loop(self) -> None:
        while True:
            try:
                sock, addr = self._listener.accept()
            except OSError:
                return  # listener closed during shutdown
            sock.setsockopt(socket.IPPROTO_TCP, socket.TCP_NODELAY, 1)
            conn = _Connection(self, sock, f"{addr[0]}:{addr[1]}")
            with self._conns_lock:
                self._conns.append(conn)
                self._ever_connected = True
            threading.Thread(target=self._reader_loop, args=(conn,),
                             name=f"rv-read-{conn.peer}", daemon=True).start()

    def _reader_loop(self, conn: _Connection) -> None:
        while not conn.closed:
            try:
                data = conn.sock.recv(65536)
            except OSError:
                break
            if not data:
                break
            try:
                messages = conn.decoder.feed(data)
            except DecodeError as exc:
                self._protocol_error(conn, f"protocol error: {exc}")
                return
            for msg in messages:
                if not self._handle_message(conn, msg):
                    return
        self._close_conn(conn)
        self._maybe_finish()

    def _handle_message(self, conn: _Connection, msg: wire.WireMessage) -> bool:
        """Returns False when the connection was torn down."""
        self._trace("<<", conn.name, msg)
        if msg.seq <= conn.last_in_seq:
            self._protocol_error(conn, f"non-increasing seq {msg.seq}")
            return False
        conn.last_in_seq = msg.seq

        if conn.label is None:
            if not isinstance(msg, wire.Hello):
                self._protocol_error(conn, "first message must be HELLO")
                return False
            if msg.protocol_version != wire.PROTOCOL_VERSION:
                self._protocol_error(conn, "protocol mismatch")
                return False
            conn.label = msg.component_label
            with self._conns_lock:
                self._by_label[conn.label] = conn  # most recent connection routes
            return True

        if isinstance(msg, wire.Event):
            self._events.put(msg)
            return True
        if isinstance(msg, wire.CondResp):
            return self._fulfil(conn, msg.request_id, result=msg.result)
        if isinstance(msg, wire.ActAck):
            return self._fulfil(conn, msg.request_id, result=True)
        if isinstance(msg, wire.Bye):
            conn.bye_received = True
            if conn.label not in self._systemside_labels:
                # pure event source: acknowledge and close now
                try:
                    conn.send(wire.Bye())
                except SystemSideUnavailable:
                    pass
                self._close_conn(conn)
            self._maybe_finish()
            return not conn.closed
        self._protocol_error(conn, f"unexpected {msg.kind} from component")
        return False

    def _fulfil(self, conn: _Connection, request_id: int, result: bool) -> bool:
        request = conn.pending.pop(request_id, None)
        if request is None:
            self._protocol_error(conn, f"reply to unknown request {request_id}")
            return False
        request.result = result
        request.ready.set()
        return True

    def _protocol_error(self, conn: _Connection, text: str) -> None:
        self._record_verdict(EmitVerdict("-", text, wire.SEVERITY_VIOLATION))
        try:
            conn.send(wire.Verdict(context_key="-", text=text,
                                   severity=wire.SEVERITY_VIOLATION))
            conn.send(wire.Bye())
        except SystemSideUnavailable:
            pass
        self._close_conn(conn)
        self._maybe_finish()

    def _close_conn(self, conn: _Connection) -> None:
        with conn.send_lock:
            if conn.closed:
                return
            conn.closed = True
        conn.fail_pending()
        try:
            conn.sock.close()
        except OSError:
            pass
        with self._conns_lock:
            if conn.label and self._by_label.get(conn.label) is conn:
                del self._by_label[conn.label]

    # -- dispatch and execution ---------------------------------------------------

    def _dispatch_loop(self) -> None:
        while True:
            item = self._events.get()
            if item is _DRAIN:
                for q in self._executors.values():
                    q.put(_STOP)
                return
            ev: wire.Event = item
            q = self._executors.get(ev.context_key)
            if q is None:
                q = queue.Queue()
                self._executors[ev.context_key] = q
                thread = threading.Thread(target=self._executor_loop, args=(q,),
                                          name=f"rv-ctx-{ev.context_key}", daemon=True)
                self._executor_threads.append(thread)
                thread.start()
            q.put(ev)

    def _executor_loop(self, q: queue.Queue) -> None:
        while True:
            item = q.get()
            if item is _STOP:
                return
            ev: wire.Event = item

            def resolve(component: str, name: str, args: Mapping[str, str]) -> bool:
                return self._request(component, wire.CondReq(
                    request_id=0, condition_name=name,
                    context_key=ev.context_key, args=dict(args)))

            def perform(component: str, name: str, args: Mapping[str, str]) -> None:
                self._request(component, wire.ActReq(
                    request_id=0, action_name=name,
                    context_key=ev.context_key, args=dict(args)))

            directives = step(self.state, ev, resolve_condition=resolve,
                              perform_action=perform)
            self._execute(directives)

    def _execute(self, directives: list[Directive]) -> None:
        for directive in directives:
            if isinstance(directive, EmitVerdict):
                self._record_verdict(directive)

    def _request(self, component: str, template: wire.WireMessage) -> bool:
        """Send one COND_REQ/ACT_REQ and await its reply (strict
        request-response per connection)."""
        conn = self._by_label.get(component)
        if conn is None or conn.closed:
            raise SystemSideUnavailable(f"no connection for '{component}'")
        with conn.request_lock:
            request_id = conn.next_request_id
            conn.next_request_id += 1
            request = _Request()
            conn.pending[request_id] = request
            try:
                conn.send(dataclasses.replace(template, request_id=request_id))
            except SystemSideUnavailable:
                conn.pending.pop(request_id, None)
                raise
            if not request.ready.wait(self.request_timeout):
                conn.pending.pop(request_id, None)
                raise SystemSideUnavailable(f"request to '{component}' timed out")
        if request.failed:
            raise SystemSideUnavailable(f"connection to '{component}' dropped")
        return request.result

    # -- shutdown --------------------------------------------------------------------

    def _maybe_finish(self) -> None:
        with self._conns_lock:
            if not self._ever_connected:
                return
            # a dropped connection is not a sign-off: only exit once every
            # connection is gone or has said BYE, and at least one did
            if not any(c.bye_received for c in self._conns):
                return
            if any(not (c.bye_received or c.closed) for c in self._conns):
                return
        self._begin_shutdown()

    def _begin_shutdown(self) -> None:
        with self._conns_lock:
            if self._shutdown_started:
                return
            self._shutdown_started = True
        threading.Thread(target=self._shutdown, name="rv-shutdown", daemon=True).start()

    def _shutdown(self) -> None:
        try:
            self._listener.close()
        except OSError:
            pass
        self._events.put(_DRAIN)
        for thread in self._threads:
            if thread.name == "rv-dispatch":
                thread.join(timeout=30)
        for thread in self._executor_threads:
            thread.join(timeout=30)
        with self._conns_lock:
            conns = list(self._conns)
        for conn in conns:
            if not conn.closed:
                try:
                    conn.send(wire.Bye())
                except SystemSideUnavailable:
                    pass
                self._close_conn(conn)
        if self._log_file is not None:
            self._log_file.close()
        if self._trace_file is not None:
            self._trace_file.close()
        self._stopped.set()


def run_monitor(config: CentralConfig, host: str = "127.0.0.1",
                port: int = wire.DEFAULT_PORT, *, out: IO[str] | None = None,
                log_path=None, trace_path=None) -> int:
    """Run a monitor until all components say BYE or the operator stops it."""
    service = MonitorService(config, host, port, out=out or sys.stdout,
                             log_path=log_path, trace_path=trace_path)
    return service.run()
