"""Canonical pretty-printer: parse_spec(pretty_print(ast)) == ast."""

from __future__ import annotations

from . import nodes as n

# precedence levels, loosest first; used to insert the minimum parentheses
_SEQ, _ASSIGN, _OR, _AND, _CMP, _UNARY, _PRIMARY = range(7)


def _lit(value: n.Scalar) -> str:
    if value is True:
        return "true"
    if value is False:
        return "false"
    if isinstance(value, int):
        return str(value)
    escaped = (value.replace("\\", "\\\\").replace('"', '\\"')
               .replace("\n", "\\n").replace("\t", "\\t").replace("\r", "\\r"))
    return f'"{escaped}"'


def _render(e: n.Expr) -> tuple[str, int]:
    if isinstance(e, n.Lit):
        return _lit(e.value), _PRIMARY
    if isinstance(e, n.Name):
        return e.ident, _PRIMARY
    if isinstance(e, n.MapGet):
        return f"{e.map}[{expr_to_text(e.key)}]", _PRIMARY
    if isinstance(e, n.Not):
        return f"!{_at_least(e.operand, _UNARY)}", _UNARY
    if isinstance(e, n.BinOp):
        if e.op in n.COMPARISON_OPS:
            level, child = _CMP, _UNARY
        elif e.op == "&&":
            level, child = _AND, _CMP
        else:
            level, child = _OR, _AND
        # left operand of && / || may be a chain at the same level
        left_min = level if e.op in n.BOOLEAN_OPS else child
        return f"{_at_least(e.left, left_min)} {e.op} {_at_least(e.right, child)}", level
    if isinstance(e, n.Assign):
        return f"{e.target} := {_at_least(e.value, _OR)}", _ASSIGN
    if isinstance(e, n.MapPut):
        return f"{e.map}[{expr_to_text(e.key)}] := {_at_least(e.value, _OR)}", _ASSIGN
    if isinstance(e, n.Seq):
        return f"{_at_least(e.first, _SEQ)}; {_at_least(e.second, _ASSIGN)}", _SEQ
    raise TypeError(f"not an expression node: {e!r}")


def _at_least(e: n.Expr, minimum: int) -> str:
    text, level = _render(e)
    return f"({text})" if level < minimum else text


def expr_to_text(e: n.Expr) -> str:
    return _render(e)[0]


def _locale_tag(locale: n.Locale) -> str:
    if isinstance(locale, n.SystemSide):
        return f"systemSide@{locale.component}"
    return "monitorSide"


def _ref(ref: n.RuleRef) -> str:
    bang = "!" if ref.negated else ""
    return f"{bang}{ref.name}({', '.join(ref.args)})"


def pretty_print(ast: n.SpecAst) -> str:
    """Emit canonical script text for a valid AST.

    Component tags are always explicit (`event@main ...`), locales print
    as `systemSide@label { ... }` wrappers, and monitor-side decls print
    bare; the parser maps each form back to the same AST.
    """
    out: list[str] = []
    if ast.components:
        out.append(f"components {', '.join(ast.components)};")
        out.append("")
    for block in ast.upons:
        out.append(f"upon ({block.replication_event}({block.context_var})) {{")
        if block.state_decls:
            out.append("    state {")
            for decl in block.state_decls:
                kind_default = n.KIND_DEFAULT.get(decl.kind)
                init = ""
                if decl.initial is not None and decl.kind in n.SCALAR_KINDS \
                        and decl.initial != kind_default:
                    init = f" := {_lit(decl.initial)}"
                line = f"{decl.kind} {decl.name}{init};"
                if isinstance(decl.locale, n.SystemSide):
                    out.append(f"        {_locale_tag(decl.locale)} {{ {line} }}")
                else:
                    out.append(f"        {line}")
            out.append("    }")
        if block.events:
            out.append("    events {")
            for ev in block.events:
                trig = f"{ev.trigger.target}({', '.join(ev.trigger.args)})"
                out.append(f"        event@{ev.component} {ev.name}({', '.join(ev.params)})"
                           f" = {{ {trig}; }}")
            out.append("    }")
        if block.conditions:
            out.append("    conditions {")
            for cond in block.conditions:
                head = f"{cond.name}({', '.join(cond.params)})"
                if isinstance(cond.locale, n.SystemSide):
                    out.append(f"        {_locale_tag(cond.locale)} {{ {head}; }}")
                else:
                    out.append(f"        {head} = {{ {expr_to_text(cond.body)} }}")
            out.append("    }")
        if block.actions:
            out.append("    actions {")
            for act in block.actions:
                head = f"{act.name}({', '.join(act.params)})"
                if isinstance(act.locale, n.SystemSide):
                    out.append(f"        {_locale_tag(act.locale)} {{ {head}; }}")
                elif act.body is None:
                    out.append(f"        {head};")
                else:
                    out.append(f"        {head} = {{ {expr_to_text(act.body)} }}")
            out.append("    }")
        out.append("    rules {")
        for rule in block.rules:
            cond = f" \\ {_ref(rule.condition)}" if rule.condition is not None else ""
            action = "Done" if rule.action is None else _ref(rule.action)
            out.append(f"        {_ref(rule.event)}{cond} -> {action};")
        out.append("    }")
        out.append("}")
        out.append("")
    return "\n".join(out)
