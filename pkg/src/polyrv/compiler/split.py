"""Split a validated spec into the central config and per-component manifests."""

from __future__ import annotations

from ..errors import CompileError
from ..speclang import nodes as n
from ..speclang.validation import validate_spec
from .artifacts import (
    CentralConfig, ComponentManifest, ConfigAction, ConfigCondition,
    ConfigEvent, ConfigRef, ConfigRule, ConfigUpon, ManifestCallback,
    ManifestEvent, ManifestStateNote, StateLayout,
)


def _ref(r: n.RuleRef | None) -> ConfigRef | None:
    if r is None:
        return None
    return ConfigRef(name=r.name, args=r.args, negated=r.negated)


def split_spec(ast: n.SpecAst) -> tuple[CentralConfig, list[ComponentManifest]]:
    """Compile one spec into (central config, manifests).

    Every declaration lands in exactly one place: monitor-side state,
    conditions and actions in the central config's tables; events and
    system-side callbacks in their owning component's manifest (the
    central config keeps system-side items by (label, name) so the
    monitor knows where to route queries). Manifest order follows first
    appearance of each label; all output is deterministic in the input.
    """
    report = validate_spec(ast)
    if not report.is_empty:
        raise CompileError(f"specification is invalid:\n{report.format()}")

    label_order: list[str] = []

    def see(label: str) -> str:
        if label not in label_order:
            label_order.append(label)
        return label

    events: dict[str, list[ManifestEvent]] = {}
    conditions: dict[str, list[ManifestCallback]] = {}
    actions: dict[str, list[ManifestCallback]] = {}
    state_notes: dict[str, list[ManifestStateNote]] = {}

    upons: list[ConfigUpon] = []
    for block in ast.upons:
        for ev in block.events:
            events.setdefault(see(ev.component), []).append(ManifestEvent(
                name=ev.name, trigger=ev.trigger.target, trigger_args=ev.trigger.args,
                params=ev.params, context_index=ev.params.index(block.context_var),
            ))
        for cond in block.conditions:
            if isinstance(cond.locale, n.SystemSide):
                conditions.setdefault(see(cond.locale.component), []).append(
                    ManifestCallback(name=cond.name, params=cond.params))
        for act in block.actions:
            if isinstance(act.locale, n.SystemSide):
                actions.setdefault(see(act.locale.component), []).append(
                    ManifestCallback(name=act.name, params=act.params))
        for decl in block.state_decls:
            if isinstance(decl.locale, n.SystemSide):
                state_notes.setdefault(see(decl.locale.component), []).append(
                    ManifestStateNote(name=decl.name, kind=decl.kind))

        upons.append(ConfigUpon(
            replication_event=block.replication_event,
            context_var=block.context_var,
            state=tuple(StateLayout(d.name, d.kind, d.initial)
                        for d in block.state_decls
                        if isinstance(d.locale, n.MonitorSide)),
            events=tuple(ConfigEvent(
                name=ev.name, component=ev.component, params=ev.params,
                context_index=ev.params.index(block.context_var))
                for ev in block.events),
            conditions=tuple(ConfigCondition(
                name=c.name, params=c.params,
                component=c.locale.component if isinstance(c.locale, n.SystemSide) else None,
                body=c.body) for c in block.conditions),
            actions=tuple(ConfigAction(
                name=a.name, params=a.params,
                component=a.locale.component if isinstance(a.locale, n.SystemSide) else None,
                body=a.body) for a in block.actions),
            rules=tuple(ConfigRule(
                event=r.event.name, event_args=r.event.args,
                condition=_ref(r.condition), action=_ref(r.action))
                for r in block.rules),
        ))

    for label in ast.components:
        see(label)

    anchored = set(events) | set(ast.components)
    for label in set(conditions) | set(actions) | set(state_notes):
        if label not in anchored:
            raise CompileError(f"component '{label}' is unreachable: no event anchors it "
                               f"and it is not declared in the script header")

    manifests = [
        ComponentManifest(
            component_label=label,
            events=tuple(events.get(label, [])),
            systemside_conditions=tuple(conditions.get(label, [])),
            systemside_actions=tuple(actions.get(label, [])),
            systemside_state=tuple(state_notes.get(label, [])),
        )
        for label in label_order
    ]
    return CentralConfig(upons=tuple(upons)), manifests
