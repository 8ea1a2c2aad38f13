"""Spec compilation: splitting, artifact files, stub-generation plugins."""

from .artifacts import (
    CentralConfig, ComponentManifest, ConfigAction, ConfigCondition,
    ConfigEvent, ConfigRef, ConfigRule, ConfigUpon, ManifestCallback,
    ManifestEvent, ManifestStateNote, StateLayout,
    load_central, load_manifest, write_central, write_manifest,
)
from .plugins import (
    PluginDescriptor, PluginRegistry, PYTHON_PLUGIN, TYPESCRIPT_PLUGIN,
    default_registry, generate_stub, register_plugin,
)
from .split import split_spec

__all__ = [
    "CentralConfig", "ComponentManifest", "ConfigAction", "ConfigCondition",
    "ConfigEvent", "ConfigRef", "ConfigRule", "ConfigUpon",
    "ManifestCallback", "ManifestEvent", "ManifestStateNote", "StateLayout",
    "load_central", "load_manifest", "write_central", "write_manifest",
    "PluginDescriptor", "PluginRegistry", "PYTHON_PLUGIN", "TYPESCRIPT_PLUGIN",
    "default_registry", "generate_stub", "register_plugin",
    "split_spec",
]
