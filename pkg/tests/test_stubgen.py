import pytest

from polyrv.compiler import split_spec
from polyrv.compiler.artifacts import ComponentManifest
from polyrv.compiler.plugins import (
    PYTHON_PLUGIN, TYPESCRIPT_PLUGIN, PluginDescriptor, PluginRegistry,
    generate_stub, register_plugin,
)
from polyrv.errors import DuplicatePluginError, PluginError


def _manifest(spec, label):
    _, manifests = split_spec(spec)
    return next(m for m in manifests if m.component_label == label)


def test_program4_c_stub_intercepts_parser(program4):
    stub = generate_stub(_manifest(program4, "cComponent"), PYTHON_PLUGIN)
    assert "# intercept: before call parse_receivers(mailshotID, c_mailCount)" in stub
    assert 'session.emit_event("startXMLProcessing"' in stub
    assert "context_key=str(mailshotID)" in stub


def test_empty_manifest_is_prologue_plus_epilogue():
    manifest = ComponentManifest(component_label="idle")
    stub = generate_stub(manifest, PYTHON_PLUGIN)
    assert stub == PYTHON_PLUGIN.manifest_prologue(manifest) + "\n" + \
        PYTHON_PLUGIN.manifest_epilogue(manifest)


def test_program1_stub_has_four_descriptors_in_order(program1):
    stub = generate_stub(_manifest(program1, "main"), PYTHON_PLUGIN)
    descriptors = [line for line in stub.splitlines()
                   if line.startswith("# intercept:")]
    assert descriptors == [
        "# intercept: before call customer.logIn()",
        "# intercept: before call customer.registerCard(card)",
        "# intercept: before call customer.makePayment(card)",
        "# intercept: before call customer.logOut()",
    ]


def test_program5_java_stub_registers_condition(program5):
    stub = generate_stub(_manifest(program5, "javaComponent"), PYTHON_PLUGIN)
    assert "def cond_isEmailBlacklisted(args):" in stub
    assert 'session.register_condition("isEmailBlacklisted", cond_isEmailBlacklisted)' in stub


def test_typescript_stub(program4):
    stub = generate_stub(_manifest(program4, "cComponent"), TYPESCRIPT_PLUGIN)
    assert "// intercept: before call parse_receivers(mailshotID, c_mailCount)" in stub
    assert 'session.emitEvent("startXMLProcessing"' in stub


def test_stub_determinism(mailer_spec):
    _, manifests = split_spec(mailer_spec)
    for manifest in manifests:
        for plugin in (PYTHON_PLUGIN, TYPESCRIPT_PLUGIN):
            assert generate_stub(manifest, plugin) == generate_stub(manifest, plugin)


def _noop_plugin(name, **overrides) -> PluginDescriptor:
    base = dict(
        technology=name, file_extension="txt",
        manifest_prologue=lambda m: "prologue\n",
        event_to_stub=lambda m, e: f"event {e.name}\n",
        condition_to_stub=lambda m, c: f"cond {c.name}\n",
        action_to_stub=lambda m, a: f"act {a.name}\n",
        manifest_epilogue=lambda m: "epilogue\n",
    )
    base.update(overrides)
    return PluginDescriptor(**base)


def test_registry_register_then_generate(program1):
    registry = PluginRegistry()
    register_plugin(_noop_plugin("demo-native"), registry)
    stub = generate_stub(_manifest(program1, "main"), "demo-native", registry)
    assert stub.startswith("prologue")
    assert "event newSession" in stub


def test_duplicate_registration_rejected():
    registry = PluginRegistry()
    register_plugin(_noop_plugin("demo-native"), registry)
    with pytest.raises(DuplicatePluginError):
        register_plugin(_noop_plugin("demo-native"), registry)


def test_unknown_technology_rejected(program1):
    registry = PluginRegistry()
    with pytest.raises(PluginError) as err:
        generate_stub(_manifest(program1, "main"), "demo-native", registry)
    assert "unknown technology" in str(err.value)


def test_plugin_missing_kind_support(program5):
    registry = PluginRegistry()
    register_plugin(_noop_plugin("events-only", condition_to_stub=None), registry)
    with pytest.raises(PluginError) as err:
        generate_stub(_manifest(program5, "javaComponent"), "events-only", registry)
    assert "does not support system-side conditions" in str(err.value)
