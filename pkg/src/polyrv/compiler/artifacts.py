"""Compilation outputs and their JSON file formats.

The central config (`<spec>.central.json`) carries everything the monitor
service needs: per-upon state layout, event dispatch tables, rule lists
and condition/action tables with expression bodies serialised as trees.
Each component manifest (`<spec>.<label>.manifest.json`) carries exactly
that component's slice: events to emit (with trigger call-sites and the
context-variable position) and the system-side callbacks to serve.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from ..speclang import nodes as n
from ..wire import DEFAULT_PORT

CENTRAL_FORMAT = "polyrv-central"
MANIFEST_FORMAT = "polyrv-manifest"
FORMAT_VERSION = 1

DEFAULT_MONITOR_ADDRESS = f"127.0.0.1:{DEFAULT_PORT}"


# --- expression (de)serialisation ------------------------------------------

def expr_to_json(e: n.Expr) -> dict:
    if isinstance(e, n.Lit):
        return {"node": "lit", "value": e.value}
    if isinstance(e, n.Name):
        return {"node": "name", "ident": e.ident}
    if isinstance(e, n.MapGet):
        return {"node": "mapget", "map": e.map, "key": expr_to_json(e.key)}
    if isinstance(e, n.Not):
        return {"node": "not", "operand": expr_to_json(e.operand)}
    if isinstance(e, n.BinOp):
        return {"node": "binop", "op": e.op,
                "left": expr_to_json(e.left), "right": expr_to_json(e.right)}
    if isinstance(e, n.Assign):
        return {"node": "assign", "target": e.target, "value": expr_to_json(e.value)}
    if isinstance(e, n.MapPut):
        return {"node": "mapput", "map": e.map,
                "key": expr_to_json(e.key), "value": expr_to_json(e.value)}
    if isinstance(e, n.Seq):
        return {"node": "seq", "first": expr_to_json(e.first),
                "second": expr_to_json(e.second)}
    raise TypeError(f"not an expression node: {e!r}")


def expr_from_json(obj: dict) -> n.Expr:
    node = obj["node"]
    if node == "lit":
        return n.Lit(obj["value"])
    if node == "name":
        return n.Name(obj["ident"])
    if node == "mapget":
        return n.MapGet(obj["map"], expr_from_json(obj["key"]))
    if node == "not":
        return n.Not(expr_from_json(obj["operand"]))
    if node == "binop":
        return n.BinOp(obj["op"], expr_from_json(obj["left"]), expr_from_json(obj["right"]))
    if node == "assign":
        return n.Assign(obj["target"], expr_from_json(obj["value"]))
    if node == "mapput":
        return n.MapPut(obj["map"], expr_from_json(obj["key"]), expr_from_json(obj["value"]))
    if node == "seq":
        return n.Seq(expr_from_json(obj["first"]), expr_from_json(obj["second"]))
    raise ValueError(f"unknown expression node kind {node!r}")


# --- central config ---------------------------------------------------------

@dataclass(frozen=True)
class StateLayout:
    name: str
    kind: str
    initial: n.Value


@dataclass(frozen=True)
class ConfigEvent:
    name: str
    component: str
    params: tuple[str, ...]
    context_index: int


@dataclass(frozen=True)
class ConfigCondition:
    """`component` is None for monitor-side conditions (which carry a
    body) and the owning label for system-side ones (which do not)."""

    name: str
    params: tuple[str, ...]
    component: str | None
    body: n.Expr | None


@dataclass(frozen=True)
class ConfigAction:
    name: str
    params: tuple[str, ...]
    component: str | None
    body: n.Expr | None


@dataclass(frozen=True)
class ConfigRef:
    name: str
    args: tuple[str, ...]
    negated: bool = False


@dataclass(frozen=True)
class ConfigRule:
    """`action` None is the Done terminator; `condition` None is always-true."""

    event: str
    event_args: tuple[str, ...]
    condition: ConfigRef | None
    action: ConfigRef | None


@dataclass(frozen=True)
class ConfigUpon:
    replication_event: str
    context_var: str
    state: tuple[StateLayout, ...]
    events: tuple[ConfigEvent, ...]
    conditions: tuple[ConfigCondition, ...]
    actions: tuple[ConfigAction, ...]
    rules: tuple[ConfigRule, ...]

    def event_named(self, name: str) -> ConfigEvent | None:
        for ev in self.events:
            if ev.name == name:
                return ev
        return None

    def condition_named(self, name: str) -> ConfigCondition | None:
        for cond in self.conditions:
            if cond.name == name:
                return cond
        return None

    def action_named(self, name: str) -> ConfigAction | None:
        for act in self.actions:
            if act.name == name:
                return act
        return None

    def state_kinds(self) -> dict[str, str]:
        return {s.name: s.kind for s in self.state}


@dataclass(frozen=True)
class CentralConfig:
    upons: tuple[ConfigUpon, ...]

    def blocks_for_event(self, name: str) -> list[tuple[int, ConfigUpon]]:
        return [(i, upon) for i, upon in enumerate(self.upons)
                if upon.event_named(name) is not None]

    def systemside_labels(self) -> set[str]:
        labels: set[str] = set()
        for upon in self.upons:
            for item in list(upon.conditions) + list(upon.actions):
                if item.component is not None:
                    labels.add(item.component)
        return labels

    def to_json_dict(self) -> dict:
        def ref(r: ConfigRef | None) -> dict | None:
            if r is None:
                return None
            return {"name": r.name, "args": list(r.args), "negated": r.negated}

        return {
            "format": CENTRAL_FORMAT,
            "format_version": FORMAT_VERSION,
            "upons": [
                {
                    "replication_event": u.replication_event,
                    "context_var": u.context_var,
                    "state": [{"name": s.name, "kind": s.kind, "initial": s.initial}
                              for s in u.state],
                    "events": [{"name": e.name, "component": e.component,
                                "params": list(e.params), "context_index": e.context_index}
                               for e in u.events],
                    "conditions": [
                        {"name": c.name, "params": list(c.params), "component": c.component,
                         "body": None if c.body is None else expr_to_json(c.body)}
                        for c in u.conditions],
                    "actions": [
                        {"name": a.name, "params": list(a.params), "component": a.component,
                         "body": None if a.body is None else expr_to_json(a.body)}
                        for a in u.actions],
                    "rules": [{"event": r.event, "event_args": list(r.event_args),
                               "condition": ref(r.condition), "action": ref(r.action)}
                              for r in u.rules],
                }
                for u in self.upons
            ],
        }

    @classmethod
    def from_json_dict(cls, obj: dict) -> "CentralConfig":
        if obj.get("format") != CENTRAL_FORMAT:
            raise ValueError(f"not a {CENTRAL_FORMAT} file")
        if obj.get("format_version") != FORMAT_VERSION:
            raise ValueError(f"unsupported format_version {obj.get('format_version')!r}")

        def ref(robj: dict | None) -> ConfigRef | None:
            if robj is None:
                return None
            return ConfigRef(robj["name"], tuple(robj["args"]), robj.get("negated", False))

        upons = []
        for u in obj["upons"]:
            upons.append(ConfigUpon(
                replication_event=u["replication_event"],
                context_var=u["context_var"],
                state=tuple(StateLayout(s["name"], s["kind"], s["initial"])
                            for s in u["state"]),
                events=tuple(ConfigEvent(e["name"], e["component"], tuple(e["params"]),
                                         e["context_index"]) for e in u["events"]),
                conditions=tuple(ConfigCondition(
                    c["name"], tuple(c["params"]), c["component"],
                    None if c["body"] is None else expr_from_json(c["body"]))
                    for c in u["conditions"]),
                actions=tuple(ConfigAction(
                    a["name"], tuple(a["params"]), a["component"],
                    None if a["body"] is None else expr_from_json(a["body"]))
                    for a in u["actions"]),
                rules=tuple(ConfigRule(r["event"], tuple(r["event_args"]),
                                       ref(r["condition"]), ref(r["action"]))
                            for r in u["rules"]),
            ))
        return cls(upons=tuple(upons))


# --- component manifest ------------------------------------------------------

@dataclass(frozen=True)
class ManifestEvent:
    name: str
    trigger: str
    trigger_args: tuple[str, ...]
    params: tuple[str, ...]
    context_index: int


@dataclass(frozen=True)
class ManifestCallback:
    name: str
    params: tuple[str, ...]


@dataclass(frozen=True)
class ManifestStateNote:
    """System-side state is owned by the component; the manifest only
    documents it."""

    name: str
    kind: str


@dataclass(frozen=True)
class ComponentManifest:
    component_label: str
    events: tuple[ManifestEvent, ...] = ()
    systemside_conditions: tuple[ManifestCallback, ...] = ()
    systemside_actions: tuple[ManifestCallback, ...] = ()
    systemside_state: tuple[ManifestStateNote, ...] = ()
    monitor_address: str = DEFAULT_MONITOR_ADDRESS

    def event_named(self, name: str) -> ManifestEvent | None:
        for ev in self.events:
            if ev.name == name:
                return ev
        return None

    def condition_names(self) -> set[str]:
        return {c.name for c in self.systemside_conditions}

    def action_names(self) -> set[str]:
        return {a.name for a in self.systemside_actions}

    def to_json_dict(self) -> dict:
        return {
            "format": MANIFEST_FORMAT,
            "format_version": FORMAT_VERSION,
            "component": self.component_label,
            "monitor_address": self.monitor_address,
            "events": [{"name": e.name, "trigger": e.trigger,
                        "trigger_args": list(e.trigger_args), "params": list(e.params),
                        "context_index": e.context_index} for e in self.events],
            "systemside_conditions": [{"name": c.name, "params": list(c.params)}
                                      for c in self.systemside_conditions],
            "systemside_actions": [{"name": a.name, "params": list(a.params)}
                                   for a in self.systemside_actions],
            "systemside_state": [{"name": s.name, "kind": s.kind}
                                 for s in self.systemside_state],
        }

    @classmethod
    def from_json_dict(cls, obj: dict) -> "ComponentManifest":
        if obj.get("format") != MANIFEST_FORMAT:
            raise ValueError(f"not a {MANIFEST_FORMAT} file")
        if obj.get("format_version") != FORMAT_VERSION:
            raise ValueError(f"unsupported format_version {obj.get('format_version')!r}")
        return cls(
            component_label=obj["component"],
            monitor_address=obj.get("monitor_address", DEFAULT_MONITOR_ADDRESS),
            events=tuple(ManifestEvent(e["name"], e["trigger"], tuple(e["trigger_args"]),
                                       tuple(e["params"]), e["context_index"])
                         for e in obj["events"]),
            systemside_conditions=tuple(ManifestCallback(c["name"], tuple(c["params"]))
                                        for c in obj["systemside_conditions"]),
            systemside_actions=tuple(ManifestCallback(a["name"], tuple(a["params"]))
                                     for a in obj["systemside_actions"]),
            systemside_state=tuple(ManifestStateNote(s["name"], s["kind"])
                                   for s in obj["systemside_state"]),
        )


# --- file IO -----------------------------------------------------------------

def dump_json(obj: dict) -> bytes:
    return (json.dumps(obj, indent=2, ensure_ascii=False) + "\n").encode("utf-8")


def write_central(config: CentralConfig, path: Path) -> None:
    path.write_bytes(dump_json(config.to_json_dict()))


def load_central(path: Path) -> CentralConfig:
    return CentralConfig.from_json_dict(json.loads(Path(path).read_text(encoding="utf-8")))


def write_manifest(manifest: ComponentManifest, path: Path) -> None:
    path.write_bytes(dump_json(manifest.to_json_dict()))


def load_manifest(path: Path) -> ComponentManifest:
    return ComponentManifest.from_json_dict(
        json.loads(Path(path).read_text(encoding="utf-8")))
