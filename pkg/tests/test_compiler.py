import dataclasses
import json
import random

import pytest

from genspec import make_spec
from polyrv.compiler import split_spec
from polyrv.compiler.artifacts import (
    CentralConfig, ComponentManifest, dump_json, expr_from_json, expr_to_json,
)
from polyrv.errors import CompileError
from polyrv.speclang import nodes as n
from polyrv.speclang import parse_spec


def test_program4_split(program4):
    config, manifests = split_spec(program4)
    assert len(config.upons) == 1
    # the paper's two rules plus the terminator the invariant requires
    assert len(config.upons[0].rules) == 3
    by_label = {m.component_label: m for m in manifests}
    assert set(by_label) == {"javaComponent", "cComponent"}
    assert [e.name for e in by_label["javaComponent"].events] == ["callMailingExecution"]
    assert [e.name for e in by_label["cComponent"].events] == ["startXMLProcessing"]
    assert by_label["cComponent"].events[0].trigger == "parse_receivers"
    assert by_label["cComponent"].events[0].context_index == 0


def test_program5_split(program5):
    config, manifests = split_spec(program5)
    by_label = {m.component_label: m for m in manifests}
    java = by_label["javaComponent"]
    assert [c.name for c in java.systemside_conditions] == ["isEmailBlacklisted"]
    assert java.events == ()
    c_side = by_label["cComponent"]
    assert [e.name for e in c_side.events] == ["inCreateMail"]
    cond = config.upons[0].condition_named("isEmailBlacklisted")
    assert cond.component == "javaComponent"
    assert cond.body is None


def test_single_component_defaults_to_main(program1):
    config, manifests = split_spec(program1)
    assert [m.component_label for m in manifests] == ["main"]
    assert len(manifests[0].events) == 4
    # monitor-side declarations stay central
    assert manifests[0].systemside_conditions == ()
    assert config.upons[0].state[0].name == "registeredCards"
    assert config.upons[0].state[0].initial == {}


def test_systemside_state_documented_in_manifest():
    ast = parse_spec("""
        upon (e(x)) {
            state { systemSide { boolean[] held; } }
            events { e(x) = {f(x);} }
            rules { e(x) -> Done; }
        }""")
    config, manifests = split_spec(ast)
    assert manifests[0].systemside_state == \
        (dataclasses.replace(manifests[0].systemside_state[0], name="held", kind="boolean[]"),)
    assert config.upons[0].state == ()  # system-side state is not monitor state


def test_invalid_spec_is_rejected(program1):
    block = program1.upons[0]
    broken = dataclasses.replace(program1, upons=(
        dataclasses.replace(block, rules=block.rules[:2]),))
    with pytest.raises(CompileError):
        split_spec(broken)


def test_unanchored_component_is_rejected(program5):
    stripped = dataclasses.replace(program5, components=())
    with pytest.raises(CompileError):
        split_spec(stripped)


def test_partition_and_conservation_properties():
    for seed in range(60):
        rng = random.Random(seed)
        spec = make_spec(rng, blocks=rng.choice([1, 2]))
        config, manifests = split_spec(spec)

        declared_events = [(ev.name, ev.component)
                           for block in spec.upons for ev in block.events]
        manifest_events = [(ev.name, m.component_label)
                           for m in manifests for ev in m.events]
        assert sorted(declared_events) == sorted(manifest_events)

        source_rules = sum(len(b.rules) for b in spec.upons)
        compiled_rules = sum(len(u.rules) for u in config.upons)
        assert source_rules == compiled_rules

        # every declaration is either central (monitor-side) or in exactly
        # one manifest (system-side), never both
        for block_ast, block_cfg in zip(spec.upons, config.upons):
            for cond in block_ast.conditions:
                compiled = block_cfg.condition_named(cond.name)
                holders = [m.component_label for m in manifests
                           if cond.name in m.condition_names()]
                if isinstance(cond.locale, n.SystemSide):
                    assert compiled.component == cond.locale.component
                    assert holders == [cond.locale.component]
                else:
                    assert compiled.component is None
                    assert holders == []


def test_central_config_json_roundtrip(mailer_spec):
    config, _ = split_spec(mailer_spec)
    dumped = config.to_json_dict()
    assert CentralConfig.from_json_dict(json.loads(dump_json(dumped))) == config


def test_manifest_json_roundtrip(program5):
    _, manifests = split_spec(program5)
    for manifest in manifests:
        recovered = ComponentManifest.from_json_dict(
            json.loads(dump_json(manifest.to_json_dict())))
        assert recovered == manifest


def test_expr_json_roundtrip(program1):
    body = program1.upons[0].actions[1].body
    assert expr_from_json(json.loads(json.dumps(expr_to_json(body)))) == body


def test_compile_is_deterministic(mailer_spec):
    one = split_spec(mailer_spec)
    two = split_spec(mailer_spec)
    assert dump_json(one[0].to_json_dict()) == dump_json(two[0].to_json_dict())
    for a, b in zip(one[1], two[1]):
        assert dump_json(a.to_json_dict()) == dump_json(b.to_json_dict())
