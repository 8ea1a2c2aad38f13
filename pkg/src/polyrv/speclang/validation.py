"""Structural and type validation of parsed specs.

validate_spec never raises; every broken invariant becomes one report
entry naming the offending declaration. An empty report is the
precondition for compilation.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import nodes as n

# static types for the expression checker; params are 'wire' (strings on
# the wire, coerced against typed state at runtime)
_WIRE = "wire"
_SCALARS = (n.KIND_BOOL, n.KIND_INT, n.KIND_STRING, _WIRE)


@dataclass(frozen=True)
class Violation:
    where: str
    message: str

    def __str__(self) -> str:
        return f"{self.where}: {self.message}"


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[Violation, ...]

    @property
    def is_empty(self) -> bool:
        return not self.violations

    def __iter__(self):
        return iter(self.violations)

    def __len__(self) -> int:
        return len(self.violations)

    def format(self) -> str:
        if self.is_empty:
            return "ok"
        return "\n".join(str(v) for v in self.violations)


class _TypeChecker:
    """Checks one monitor-side body against state kinds and params."""

    def __init__(self, state_kinds: dict[str, str], params: tuple[str, ...]):
        self.state_kinds = state_kinds
        self.params = set(params)
        self.errors: list[str] = []

    def _type_of_name(self, ident: str) -> str | None:
        if ident in self.params:
            return _WIRE
        if ident in self.state_kinds:
            return self.state_kinds[ident]
        self.errors.append(f"references undeclared name '{ident}'")
        return None

    def check(self, e: n.Expr, allow_assign: bool) -> str | None:
        if isinstance(e, n.Lit):
            if e.value is True or e.value is False:
                return n.KIND_BOOL
            return n.KIND_INT if isinstance(e.value, int) else n.KIND_STRING
        if isinstance(e, n.Name):
            return self._type_of_name(e.ident)
        if isinstance(e, n.MapGet):
            key_t = self.check(e.key, allow_assign=False)
            if key_t is not None and key_t not in _SCALARS:
                self.errors.append("map key must be a scalar")
            kind = self.state_kinds.get(e.map)
            if e.map in self.params or (kind is not None and kind not in n.MAP_KINDS):
                self.errors.append(f"'{e.map}' is not map state")
                return None
            if kind is None:
                self.errors.append(f"references undeclared name '{e.map}'")
                return None
            return n.MAP_ELEMENT[kind]
        if isinstance(e, n.Not):
            t = self.check(e.operand, allow_assign=False)
            if t is not None and t != n.KIND_BOOL:
                self.errors.append("'!' needs a boolean operand")
            return n.KIND_BOOL
        if isinstance(e, n.BinOp):
            lt = self.check(e.left, allow_assign=False)
            rt = self.check(e.right, allow_assign=False)
            if e.op in n.BOOLEAN_OPS:
                for t in (lt, rt):
                    if t is not None and t != n.KIND_BOOL:
                        self.errors.append(f"'{e.op}' needs boolean operands")
                return n.KIND_BOOL
            if lt is None or rt is None:
                return n.KIND_BOOL
            if lt in n.MAP_KINDS or rt in n.MAP_KINDS:
                self.errors.append(f"cannot compare maps with '{e.op}'")
                return n.KIND_BOOL
            if e.op in ("<", ">", "<=", ">="):
                for t in (lt, rt):
                    if t not in (n.KIND_INT, _WIRE):
                        self.errors.append(f"'{e.op}' needs numeric operands")
                return n.KIND_BOOL
            # == / != : identical types, or wire against any scalar
            if lt != rt and _WIRE not in (lt, rt):
                self.errors.append(f"'{e.op}' compares {lt} with {rt}")
            return n.KIND_BOOL
        if isinstance(e, n.Assign):
            if not allow_assign:
                self.errors.append("assignment in condition body")
            vt = self.check(e.value, allow_assign=False)
            kind = self.state_kinds.get(e.target)
            if e.target in self.params or kind is None:
                self.errors.append(f"':=' target '{e.target}' is not state")
                return vt
            if kind in n.MAP_KINDS:
                self.errors.append(f"cannot assign whole map '{e.target}'")
                return vt
            if vt is not None and vt not in (kind, _WIRE):
                self.errors.append(f"cannot assign {vt} to {kind} state '{e.target}'")
            return kind
        if isinstance(e, n.MapPut):
            if not allow_assign:
                self.errors.append("assignment in condition body")
            key_t = self.check(e.key, allow_assign=False)
            if key_t is not None and key_t not in _SCALARS:
                self.errors.append("map key must be a scalar")
            vt = self.check(e.value, allow_assign=False)
            kind = self.state_kinds.get(e.map)
            if e.map in self.params or kind is None or kind not in n.MAP_KINDS:
                self.errors.append(f"'{e.map}' is not map state")
                return vt
            element = n.MAP_ELEMENT[kind]
            if vt is not None and vt not in (element, _WIRE):
                self.errors.append(f"cannot store {vt} in {kind} state '{e.map}'")
            return element
        if isinstance(e, n.Seq):
            self.check(e.first, allow_assign=allow_assign)
            return self.check(e.second, allow_assign=allow_assign)
        self.errors.append(f"unknown expression node {type(e).__name__}")
        return None


def _check_body(out: list[Violation], where: str, body: n.Expr,
                state_kinds: dict[str, str], params: tuple[str, ...],
                is_condition: bool) -> None:
    checker = _TypeChecker(state_kinds, params)
    result = checker.check(body, allow_assign=not is_condition)
    if is_condition and result is not None and result != n.KIND_BOOL:
        checker.errors.append("condition body must be boolean")
    for message in checker.errors:
        out.append(Violation(where, message))


def _dupes(names: list[str]) -> set[str]:
    seen: set[str] = set()
    doubled: set[str] = set()
    for name in names:
        if name in seen:
            doubled.add(name)
        seen.add(name)
    return doubled


def validate_spec(ast: n.SpecAst) -> ValidationReport:
    out: list[Violation] = []

    if not ast.upons:
        out.append(Violation("spec", "specification declares no upon blocks"))

    for label in _dupes(list(ast.components)):
        out.append(Violation("spec", f"component '{label}' declared twice in the header"))

    for repl in _dupes([b.replication_event for b in ast.upons]):
        out.append(Violation("spec", f"two upon blocks share the replication event '{repl}'"))

    all_event_decls: list[tuple[str, n.EventDecl]] = []
    for block in ast.upons:
        repl = block.replication_event
        for ev in block.events:
            all_event_decls.append((repl, ev))
    anchored = {ev.component for _, ev in all_event_decls} | set(ast.components)
    for name in _dupes([ev.name for _, ev in all_event_decls]):
        out.append(Violation(f"event {name}", "event declared in multiple upon blocks"))

    for block in ast.upons:
        where_block = f"upon {block.replication_event}"

        event_names = [ev.name for ev in block.events]
        for name in _dupes(event_names):
            out.append(Violation(f"{where_block}/event {name}", "duplicate event name in block"))
        if block.replication_event not in event_names:
            out.append(Violation(where_block, "replication event is not declared in events"))

        state_kinds: dict[str, str] = {}
        for decl in block.state_decls:
            where = f"{where_block}/state {decl.name}"
            if decl.kind not in n.ALL_KINDS:
                out.append(Violation(where, f"unknown state kind '{decl.kind}'"))
                continue
            if isinstance(decl.locale, n.SystemSide):
                if decl.initial is not None:
                    out.append(Violation(where, "system-side state carries an initial value"))
            else:
                if decl.kind in n.MAP_KINDS and decl.initial != {}:
                    out.append(Violation(where, "map state must initialise empty"))
                if decl.initial is None:
                    out.append(Violation(where, "monitor-side state needs an initial value"))
                state_kinds[decl.name] = decl.kind
        for name in _dupes([d.name for d in block.state_decls]):
            out.append(Violation(f"{where_block}/state {name}", "duplicate state name"))

        for ev in block.events:
            where = f"{where_block}/event {ev.name}"
            if not ev.component:
                out.append(Violation(where, "component label is empty"))
            if block.context_var not in ev.params:
                out.append(Violation(where, "event does not bind context variable"))
            for p in _dupes(list(ev.params)):
                out.append(Violation(where, f"duplicate parameter '{p}'"))

        def _check_decl_common(kind_label: str, name: str, params: tuple[str, ...],
                               locale: n.Locale, body: n.Expr | None) -> str:
            where = f"{where_block}/{kind_label} {name}"
            for p in _dupes(list(params)):
                out.append(Violation(where, f"duplicate parameter '{p}'"))
            for p in params:
                if p in state_kinds:
                    out.append(Violation(where, f"parameter '{p}' shadows state variable"))
            if isinstance(locale, n.SystemSide):
                if body is not None:
                    out.append(Violation(where, "system-side declaration carries a body"))
                if locale.component not in anchored:
                    out.append(Violation(
                        where,
                        f"system-side label '{locale.component}' is not anchored to any "
                        f"component (no event uses it and it is not in the script header)"))
            return where

        for cond in block.conditions:
            where = _check_decl_common("condition", cond.name, cond.params, cond.locale, cond.body)
            if isinstance(cond.locale, n.MonitorSide):
                if cond.body is None:
                    out.append(Violation(where, "monitor-side condition has no body"))
                else:
                    _check_body(out, where, cond.body, state_kinds, cond.params,
                                is_condition=True)
        for name in _dupes([c.name for c in block.conditions]):
            out.append(Violation(f"{where_block}/condition {name}", "duplicate condition name"))

        for act in block.actions:
            where = _check_decl_common("action", act.name, act.params, act.locale, act.body)
            if isinstance(act.locale, n.MonitorSide) and act.body is not None:
                _check_body(out, where, act.body, state_kinds, act.params, is_condition=False)
        for name in _dupes([a.name for a in block.actions]):
            out.append(Violation(f"{where_block}/action {name}", "duplicate action name"))

        events_by_name = {ev.name: ev for ev in block.events}
        conds_by_name = {c.name: c for c in block.conditions}
        acts_by_name = {a.name: a for a in block.actions}
        has_done = False
        for index, rule in enumerate(block.rules, start=1):
            where = f"{where_block}/rule {index}"
            ev = events_by_name.get(rule.event.name)
            if ev is None:
                out.append(Violation(where, f"unresolved event reference '{rule.event.name}'"))
            elif rule.event.args != ev.params:
                out.append(Violation(
                    where,
                    f"event reference '{rule.event.name}({', '.join(rule.event.args)})' does "
                    f"not list the declared parameters ({', '.join(ev.params)})"))
            event_params = set(ev.params) if ev is not None else None

            def _check_ref(ref: n.RuleRef, decl_params: tuple[str, ...], what: str) -> None:
                if len(ref.args) != len(decl_params):
                    out.append(Violation(
                        where, f"{what} reference '{ref.name}' passes {len(ref.args)} "
                               f"argument(s), declaration takes {len(decl_params)}"))
                if event_params is not None:
                    for arg in ref.args:
                        if arg not in event_params:
                            out.append(Violation(
                                where, f"{what} argument '{arg}' is not a parameter of "
                                       f"event '{rule.event.name}'"))

            if rule.condition is not None:
                cond = conds_by_name.get(rule.condition.name)
                if cond is None:
                    out.append(Violation(
                        where, f"unresolved condition reference '{rule.condition.name}'"))
                else:
                    _check_ref(rule.condition, cond.params, "condition")
            if rule.action is None:
                has_done = True
            else:
                act = acts_by_name.get(rule.action.name)
                if act is None:
                    out.append(Violation(
                        where, f"unresolved action reference '{rule.action.name}'"))
                else:
                    _check_ref(rule.action, act.params, "action")
        if not block.rules:
            out.append(Violation(where_block, "block declares no rules"))
        elif not has_done:
            out.append(Violation(where_block, "no rule terminates with Done"))

    return ValidationReport(violations=tuple(out))
