"""Per-technology stub generation behind a plugin registry.

A plugin turns one component manifest into listener stub source: an
interception descriptor per event (naming the trigger call-site) wrapping
a call into the adapter's emit operation, plus callback skeletons and
registrations for the component's system-side conditions and actions.
The bundled plugins emit plain wrapper functions rather than aspect
syntax; the manifest carries everything a real weaver would need.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

from ..errors import DuplicatePluginError, PluginError
from .artifacts import ComponentManifest, ManifestCallback, ManifestEvent

_EventGen = Callable[[ComponentManifest, ManifestEvent], str]
_CallbackGen = Callable[[ComponentManifest, ManifestCallback], str]
_EdgeGen = Callable[[ComponentManifest], str]


@dataclass(frozen=True)
class PluginDescriptor:
    """Codegen entry points for one technology.

    An entry point left as None means the technology cannot express that
    declaration kind; generate_stub raises PluginError if the manifest
    needs it.
    """

    technology: str
    file_extension: str
    manifest_prologue: _EdgeGen
    event_to_stub: Optional[_EventGen]
    condition_to_stub: Optional[_CallbackGen]
    action_to_stub: Optional[_CallbackGen]
    manifest_epilogue: _EdgeGen


class PluginRegistry:
    """Technology name -> descriptor. Register everything before the
    first generate call; the registry is not synchronised."""

    def __init__(self):
        self._plugins: dict[str, PluginDescriptor] = {}

    def register(self, descriptor: PluginDescriptor) -> PluginDescriptor:
        if descriptor.technology in self._plugins:
            raise DuplicatePluginError(
                f"technology '{descriptor.technology}' already registered")
        self._plugins[descriptor.technology] = descriptor
        return descriptor

    def get(self, technology: str) -> PluginDescriptor:
        try:
            return self._plugins[technology]
        except KeyError:
            raise PluginError(f"unknown technology '{technology}'") from None

    def names(self) -> list[str]:
        return sorted(self._plugins)


def generate_stub(manifest: ComponentManifest,
                  plugin: PluginDescriptor | str,
                  registry: "PluginRegistry | None" = None) -> str:
    """Render listener stub source for one manifest.

    Deterministic: identical (manifest, plugin) pairs produce identical
    bytes. Sections follow manifest declaration order.
    """
    if isinstance(plugin, str):
        plugin = (registry or default_registry()).get(plugin)
    parts = [plugin.manifest_prologue(manifest)]
    for ev in manifest.events:
        if plugin.event_to_stub is None:
            raise PluginError(f"plugin '{plugin.technology}' does not support events")
        parts.append(plugin.event_to_stub(manifest, ev))
    for cond in manifest.systemside_conditions:
        if plugin.condition_to_stub is None:
            raise PluginError(
                f"plugin '{plugin.technology}' does not support system-side conditions")
        parts.append(plugin.condition_to_stub(manifest, cond))
    for act in manifest.systemside_actions:
        if plugin.action_to_stub is None:
            raise PluginError(
                f"plugin '{plugin.technology}' does not support system-side actions")
        parts.append(plugin.action_to_stub(manifest, act))
    parts.append(plugin.manifest_epilogue(manifest))
    return "\n".join(parts)


# --- bundled plugins ---------------------------------------------------------

def _py_prologue(m: ComponentManifest) -> str:
    return (
        f'"""Generated listener stubs for component \'{m.component_label}\'.\n'
        f'\n'
        f'Call each emit_* wrapper at its marked interception point; wire the\n'
        f'register_callbacks call once after connecting.\n'
        f'"""\n'
    )


def _py_event(m: ComponentManifest, ev: ManifestEvent) -> str:
    trigger_args = ", ".join(ev.trigger_args)
    params = ", ".join(ev.params)
    body = ", ".join(f'"{p}": str({p})' for p in ev.params)
    context = ev.params[ev.context_index]
    return (
        f"# intercept: before call {ev.trigger}({trigger_args})\n"
        f"def emit_{ev.name}(session, {params}):\n"
        f"    session.emit_event(\"{ev.name}\", context_key=str({context}),\n"
        f"                       params={{{body}}})\n"
    )


def _py_condition(m: ComponentManifest, cond: ManifestCallback) -> str:
    params = ", ".join(cond.params)
    return (
        f"def cond_{cond.name}(args):\n"
        f"    # system-side condition {cond.name}({params}); args is a name->str mapping\n"
        f"    raise NotImplementedError(\"{cond.name}\")\n"
    )


def _py_action(m: ComponentManifest, act: ManifestCallback) -> str:
    params = ", ".join(act.params)
    return (
        f"def act_{act.name}(args):\n"
        f"    # system-side action {act.name}({params}); args is a name->str mapping\n"
        f"    raise NotImplementedError(\"{act.name}\")\n"
    )


def _py_epilogue(m: ComponentManifest) -> str:
    lines = ["def register_callbacks(session):"]
    for cond in m.systemside_conditions:
        lines.append(f"    session.register_condition(\"{cond.name}\", cond_{cond.name})")
    for act in m.systemside_actions:
        lines.append(f"    session.register_action(\"{act.name}\", act_{act.name})")
    if len(lines) == 1:
        lines.append("    pass")
    return "\n".join(lines) + "\n"


PYTHON_PLUGIN = PluginDescriptor(
    technology="demo-native",
    file_extension="py",
    manifest_prologue=_py_prologue,
    event_to_stub=_py_event,
    condition_to_stub=_py_condition,
    action_to_stub=_py_action,
    manifest_epilogue=_py_epilogue,
)


def _ts_prologue(m: ComponentManifest) -> str:
    return (
        f"// Generated listener stubs for component '{m.component_label}'.\n"
        f"// Call each emit* wrapper at its marked interception point.\n"
        f'import type {{ Session }} from "./session.js";\n'
    )


def _ts_event(m: ComponentManifest, ev: ManifestEvent) -> str:
    trigger_args = ", ".join(ev.trigger_args)
    params = ", ".join(f"{p}: string" for p in ev.params)
    body = ", ".join(ev.params)
    context = ev.params[ev.context_index]
    cap = ev.name[0].upper() + ev.name[1:]
    return (
        f"// intercept: before call {ev.trigger}({trigger_args})\n"
        f"export function emit{cap}(session: Session, {params}): void {{\n"
        f"  session.emitEvent(\"{ev.name}\", {context}, {{ {body} }});\n"
        f"}}\n"
    )


def _ts_condition(m: ComponentManifest, cond: ManifestCallback) -> str:
    params = ", ".join(cond.params)
    return (
        f"export function cond_{cond.name}(args: Record<string, string>): boolean {{\n"
        f"  // system-side condition {cond.name}({params})\n"
        f"  throw new Error(\"not implemented: {cond.name}\");\n"
        f"}}\n"
    )


def _ts_action(m: ComponentManifest, act: ManifestCallback) -> str:
    params = ", ".join(act.params)
    return (
        f"export function act_{act.name}(args: Record<string, string>): void {{\n"
        f"  // system-side action {act.name}({params})\n"
        f"  throw new Error(\"not implemented: {act.name}\");\n"
        f"}}\n"
    )


def _ts_epilogue(m: ComponentManifest) -> str:
    lines = ["export function registerCallbacks(session: Session): void {"]
    for cond in m.systemside_conditions:
        lines.append(f"  session.registerCondition(\"{cond.name}\", cond_{cond.name});")
    for act in m.systemside_actions:
        lines.append(f"  session.registerAction(\"{act.name}\", act_{act.name});")
    lines.append("}")
    return "\n".join(lines) + "\n"


TYPESCRIPT_PLUGIN = PluginDescriptor(
    technology="ts",
    file_extension="ts",
    manifest_prologue=_ts_prologue,
    event_to_stub=_ts_event,
    condition_to_stub=_ts_condition,
    action_to_stub=_ts_action,
    manifest_epilogue=_ts_epilogue,
)

_default: PluginRegistry | None = None


def default_registry() -> PluginRegistry:
    """The process-wide registry, preloaded with the bundled plugins."""
    global _default
    if _default is None:
        _default = PluginRegistry()
        _default.register(PYTHON_PLUGIN)
        _default.register(TYPESCRIPT_PLUGIN)
    return _default


def register_plugin(descriptor: PluginDescriptor,
                    registry: PluginRegistry | None = None) -> PluginDescriptor:
    """Register a technology; raises DuplicatePluginError on a reused name."""
    return (registry or default_registry()).register(descriptor)
