"""Two-component mailer simulation for the bundled mailer spec.

The java-side role prepares a mailshot: it publishes the subscriber count,
owns the blacklist, and answers isEmailBlacklisted queries. The c-side
role renders the mailing: it reports the recipient count it parsed and
creates one mail per recipient. Fault flags reproduce the two failure
modes the properties catch: `corrupt_count` makes the c side parse a
wrong total, `late_blacklist` blacklists one recipient after the mailing
has started (too late for the java side's own filtering).

Each role emits only what its manifest lists, so the same code drives the
count-only config as well as the combined one.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field

from ..adapter import Session
from ..compiler.artifacts import ComponentManifest

MAILSHOT_ID = "mailshot-1"
JAVA_LABEL = "javaComponent"
C_LABEL = "cComponent"


@dataclass
class Scenario:
    recipients: int = 5
    corrupt_count: bool = False
    late_blacklist: str | None = None

    def recipient_ids(self) -> list[str]:
        return [f"u{i}" for i in range(1, self.recipients + 1)]


@dataclass
class RoleHooks:
    """Coordination points so roles can run in threads or processes."""

    ready: "threading.Event | None" = None    # java: mailshot published
    finish: "threading.Event | None" = None   # java: c side is done, wrap up
    wait_ready: "threading.Event | None" = None  # c: wait before starting

    @classmethod
    def in_process_pair(cls) -> "tuple[RoleHooks, RoleHooks]":
        ready = threading.Event()
        finish = threading.Event()
        return (cls(ready=ready, finish=finish), cls(wait_ready=ready))


def run_java_role(monitor: str, manifest: ComponentManifest,
                  scenario: Scenario, hooks: RoleHooks) -> None:
    """Publish the mailshot, then answer blacklist queries until told to
    finish."""
    blacklist: set[str] = set()
    session = Session.connect(monitor, JAVA_LABEL, manifest)
    if "isEmailBlacklisted" in manifest.condition_names():
        session.register_condition(
            "isEmailBlacklisted", lambda args: args.get("custID") in blacklist)

    server = threading.Thread(target=session.serve, name="mailer-java-serve",
                              daemon=True)
    server.start()

    if manifest.event_named("callMailingExecution") is not None:
        session.emit_event("callMailingExecution", MAILSHOT_ID, {
            "mailshotID": MAILSHOT_ID,
            "javaSubsCount": str(scenario.recipients),
        })
    if scenario.late_blacklist:
        # the mailing already started; the filtering pass has run
        blacklist.add(scenario.late_blacklist)

    if hooks.ready is not None:
        hooks.ready.set()
    if hooks.finish is not None:
        hooks.finish.wait()
    session.close()
    server.join(timeout=10)


def run_c_role(monitor: str, manifest: ComponentManifest,
               scenario: Scenario, hooks: RoleHooks) -> None:
    """Parse the (possibly corrupted) recipient list and create the mails."""
    if hooks.wait_ready is not None:
        hooks.wait_ready.wait()
    session = Session.connect(monitor, C_LABEL, manifest)
    parsed = scenario.recipients - 1 if scenario.corrupt_count else scenario.recipients
    if manifest.event_named("startXMLProcessing") is not None:
        session.emit_event("startXMLProcessing", MAILSHOT_ID, {
            "mailshotID": MAILSHOT_ID,
            "c_mailCount": str(parsed),
        })
    if manifest.event_named("inCreateMail") is not None:
        for recipient in scenario.recipient_ids():
            session.emit_event("inCreateMail", recipient, {"custID": recipient})
    session.close()


def run_both(monitor: str, java_manifest: ComponentManifest,
             c_manifest: ComponentManifest, scenario: Scenario) -> None:
    """Run both roles in one process: java publishes first, c runs to
    completion, then java wraps up (mirrors the subprocess protocol)."""
    java_hooks, c_hooks = RoleHooks.in_process_pair()
    java = threading.Thread(
        target=run_java_role, args=(monitor, java_manifest, scenario, java_hooks),
        name="mailer-java", daemon=True)
    java.start()
    try:
        run_c_role(monitor, c_manifest, scenario, c_hooks)
    finally:
        java_hooks.finish.set()
    java.join(timeout=30)
    if java.is_alive():
        raise RuntimeError("java-side role did not finish")
