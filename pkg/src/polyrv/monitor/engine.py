"""The pure rule engine of the central monitor.

`step` is a function of (state, event, condition replies): all I/O is
surfaced as directives, so the engine runs and tests without a network.
System-side conditions/actions are delegated to the resolve/perform hooks
the caller supplies; each call is also recorded as a directive.

Semantics per event, per upon block declaring it, in block order:

1. If the event is the block's replication event and no live instance
   holds the context key, create an instance with initial monitor-side
   state (a key whose previous instance terminated may replicate again).
   A replication event for a live key logs info and proceeds as an
   ordinary event.
2. Without a live instance the event is outside any lifetime: info
   verdict, nothing else.
3. Scan the block's rules in textual order. For each rule naming this
   event: evaluate the condition (monitor-side via eval_expr, pure;
   system-side via resolve_condition, recorded as a QueryCondition);
   apply negation; if it holds, run the action. `Done` marks the
   instance dead and suppresses the remaining rules for this event.
   Actions with bodies update the instance env (visible to later rules
   of the same event); bodiless monitor-side actions are report actions
   and emit a violation verdict.

Verdict contract (shared with the acceptance oracle):

- unknown event            info      "unknown event <name>"
- no live instance         info      "event outside instance lifetime"
- replication of live key  info      "replication event <name> for live instance"
- report action            violation "<name>(p=v, ...)" (params in decl order)
- runtime type failure     violation "type error in condition|action <name>"
                           (instance terminates, event processing stops)
- system-side failure      violation "component unavailable: <label>"
                           (that rule aborts; later rules continue)
- malformed event params   violation "event <name> missing parameter '<p>'"
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Mapping

from ..compiler.artifacts import CentralConfig, ConfigUpon
from ..errors import EvalTypeError, SystemSideUnavailable
from ..speclang import nodes as n
from ..wire import Event, SEVERITY_INFO, SEVERITY_VIOLATION

ConditionResolver = Callable[[str, str, Mapping[str, str]], bool]
ActionPerformer = Callable[[str, str, Mapping[str, str]], None]


# --- directives ---------------------------------------------------------------

@dataclass(frozen=True)
class QueryCondition:
    context_key: str
    component: str
    condition: str
    args: tuple[tuple[str, str], ...]
    result: bool


@dataclass(frozen=True)
class RunAction:
    context_key: str
    component: str
    action: str
    args: tuple[tuple[str, str], ...]


@dataclass(frozen=True)
class LocalAction:
    context_key: str
    action: str
    args: tuple[tuple[str, str], ...]
    body: n.Expr


@dataclass(frozen=True)
class EmitVerdict:
    context_key: str
    text: str
    severity: str


@dataclass(frozen=True)
class Terminate:
    context_key: str


Directive = QueryCondition | RunAction | LocalAction | EmitVerdict | Terminate


# --- expression evaluation ------------------------------------------------------

def _coerce_int(value: n.Value) -> int:
    if isinstance(value, bool):
        raise EvalTypeError("boolean where an int is needed")
    if isinstance(value, int):
        return value
    if isinstance(value, str):
        digits = value[1:] if value.startswith("-") else value
        if digits.isdigit():
            return int(value)
        raise EvalTypeError(f"cannot coerce {value!r} to int")
    raise EvalTypeError("map where an int is needed")


def _coerce_bool(value: n.Value) -> bool:
    if isinstance(value, bool):
        return value
    if value == "true":
        return True
    if value == "false":
        return False
    raise EvalTypeError(f"cannot coerce {value!r} to bool")


def _map_key(value: n.Value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, str):
        return value
    raise EvalTypeError("map cannot be used as a key")


def _coerce_kind(kind: str, value: n.Value) -> n.Value:
    if kind == n.KIND_BOOL:
        return _coerce_bool(value)
    if kind == n.KIND_INT:
        return _coerce_int(value)
    if isinstance(value, str):
        return value
    raise EvalTypeError(f"cannot coerce {value!r} to string")


def _equal(left: n.Value, right: n.Value) -> bool:
    if isinstance(left, bool) or isinstance(right, bool):
        return _coerce_bool(left) == _coerce_bool(right)
    if isinstance(left, int) or isinstance(right, int):
        return _coerce_int(left) == _coerce_int(right)
    return left == right


def eval_expr(expr: n.Expr, env: dict, args: Mapping[str, str],
              kinds: Mapping[str, str] | None = None) -> n.Value:
    """Evaluate a monitor-side body over instance state and bound params.

    Assignments mutate `env` in place (conditions are statically
    assignment-free, so passing them here leaves env unchanged). Reads of
    absent map keys yield the element default: false, 0 or "". `kinds`
    maps state names to their declared kinds; it drives absent-key
    defaults and assignment coercion. Raises EvalTypeError on any runtime
    coercion failure.
    """
    kinds = kinds or {}

    if isinstance(expr, n.Lit):
        return expr.value
    if isinstance(expr, n.Name):
        if expr.ident in args:
            return args[expr.ident]
        if expr.ident in env:
            return env[expr.ident]
        raise EvalTypeError(f"undeclared name {expr.ident!r}")
    if isinstance(expr, n.MapGet):
        table = env.get(expr.map)
        if not isinstance(table, dict):
            raise EvalTypeError(f"{expr.map!r} is not map state")
        key = _map_key(eval_expr(expr.key, env, args, kinds))
        element = n.MAP_ELEMENT.get(kinds.get(expr.map, n.KIND_MAP_BOOL))
        return table.get(key, n.KIND_DEFAULT[element])
    if isinstance(expr, n.Not):
        return not _coerce_bool(eval_expr(expr.operand, env, args, kinds))
    if isinstance(expr, n.BinOp):
        if expr.op == "&&":
            return (_coerce_bool(eval_expr(expr.left, env, args, kinds))
                    and _coerce_bool(eval_expr(expr.right, env, args, kinds)))
        if expr.op == "||":
            return (_coerce_bool(eval_expr(expr.left, env, args, kinds))
                    or _coerce_bool(eval_expr(expr.right, env, args, kinds)))
        left = eval_expr(expr.left, env, args, kinds)
        right = eval_expr(expr.right, env, args, kinds)
        if expr.op == "==":
            return _equal(left, right)
        if expr.op == "!=":
            return not _equal(left, right)
        li, ri = _coerce_int(left), _coerce_int(right)
        if expr.op == "<":
            return li < ri
        if expr.op == ">":
            return li > ri
        if expr.op == "<=":
            return li <= ri
        if expr.op == ">=":
            return li >= ri
        raise EvalTypeError(f"unknown operator {expr.op!r}")
    if isinstance(expr, n.Assign):
        if expr.target not in env:
            raise EvalTypeError(f"{expr.target!r} is not state")
        value = _coerce_kind(kinds.get(expr.target, n.KIND_STRING),
                             eval_expr(expr.value, env, args, kinds))
        env[expr.target] = value
        return value
    if isinstance(expr, n.MapPut):
        table = env.get(expr.map)
        if not isinstance(table, dict):
            raise EvalTypeError(f"{expr.map!r} is not map state")
        key = _map_key(eval_expr(expr.key, env, args, kinds))
        element = n.MAP_ELEMENT.get(kinds.get(expr.map, n.KIND_MAP_BOOL))
        value = _coerce_kind(element, eval_expr(expr.value, env, args, kinds))
        table[key] = value
        return value
    if isinstance(expr, n.Seq):
        eval_expr(expr.first, env, args, kinds)
        return eval_expr(expr.second, env, args, kinds)
    raise EvalTypeError(f"not an expression node: {expr!r}")


# --- monitor state ----------------------------------------------------------------

@dataclass
class ContextInstance:
    """One replicated monitor instance for one context key."""

    context_key: str
    env: dict = field(default_factory=dict)
    alive: bool = True


def initial_env(upon: ConfigUpon) -> dict:
    env = {}
    for layout in upon.state:
        env[layout.name] = dict(layout.initial) if isinstance(layout.initial, dict) \
            else layout.initial
    return env


class MonitorState:
    """Config plus all context instances, keyed by (block index, key)."""

    def __init__(self, config: CentralConfig):
        self.config = config
        self.instances: dict[tuple[int, str], ContextInstance] = {}

    def live_instance(self, block_index: int, key: str) -> ContextInstance | None:
        inst = self.instances.get((block_index, key))
        return inst if inst is not None and inst.alive else None


# --- the step function ---------------------------------------------------------------

def _no_resolver(component: str, name: str, args: Mapping[str, str]) -> bool:
    raise SystemSideUnavailable(f"no connection for '{component}'")


def _no_performer(component: str, name: str, args: Mapping[str, str]) -> None:
    raise SystemSideUnavailable(f"no connection for '{component}'")


def step(state: MonitorState, ev: Event,
         resolve_condition: ConditionResolver | None = None,
         perform_action: ActionPerformer | None = None) -> list[Directive]:
    """Process one EVENT message; returns the ordered directive list.

    Deterministic given (config, event sequence, condition replies);
    mutates only the instances of the event's context key.
    """
    resolve = resolve_condition or _no_resolver
    perform = perform_action or _no_performer
    out: list[Directive] = []
    key = ev.context_key

    declaring = state.config.blocks_for_event(ev.event_name)
    if not declaring:
        out.append(EmitVerdict(key, f"unknown event {ev.event_name}", SEVERITY_INFO))
        return out

    for block_index, upon in declaring:
        _step_block(state, block_index, upon, ev, resolve, perform, out)
    return out


def _step_block(state: MonitorState, block_index: int, upon: ConfigUpon,
                ev: Event, resolve: ConditionResolver, perform: ActionPerformer,
                out: list[Directive]) -> None:
    key = ev.context_key
    inst = state.live_instance(block_index, key)
    if ev.event_name == upon.replication_event:
        if inst is None:
            inst = ContextInstance(context_key=key, env=initial_env(upon))
            state.instances[(block_index, key)] = inst
        else:
            out.append(EmitVerdict(
                key, f"replication event {ev.event_name} for live instance",
                SEVERITY_INFO))
    if inst is None:
        out.append(EmitVerdict(key, "event outside instance lifetime", SEVERITY_INFO))
        return

    kinds = upon.state_kinds()
    for rule in upon.rules:
        if rule.event != ev.event_name:
            continue
        missing = [p for p in rule.event_args if p not in ev.params]
        if missing:
            out.append(EmitVerdict(
                key, f"event {ev.event_name} missing parameter '{missing[0]}'",
                SEVERITY_VIOLATION))
            return

        if rule.condition is not None:
            cond = upon.condition_named(rule.condition.name)
            bound = {formal: ev.params[actual]
                     for formal, actual in zip(cond.params, rule.condition.args)}
            if cond.component is not None:
                try:
                    holds = bool(resolve(cond.component, cond.name, bound))
                except SystemSideUnavailable:
                    out.append(EmitVerdict(
                        key, f"component unavailable: {cond.component}",
                        SEVERITY_VIOLATION))
                    continue
                out.append(QueryCondition(
                    context_key=key, component=cond.component, condition=cond.name,
                    args=tuple(bound.items()), result=holds))
            else:
                try:
                    holds = _coerce_bool(eval_expr(cond.body, inst.env, bound, kinds))
                except EvalTypeError:
                    out.append(EmitVerdict(
                        key, f"type error in condition {cond.name}", SEVERITY_VIOLATION))
                    inst.alive = False
                    out.append(Terminate(key))
                    return
            if rule.condition.negated:
                holds = not holds
            if not holds:
                continue

        if rule.action is None:
            inst.alive = False
            out.append(Terminate(key))
            return

        act = upon.action_named(rule.action.name)
        bound = {formal: ev.params[actual]
                 for formal, actual in zip(act.params, rule.action.args)}
        if act.component is not None:
            try:
                perform(act.component, act.name, bound)
            except SystemSideUnavailable:
                out.append(EmitVerdict(
                    key, f"component unavailable: {act.component}", SEVERITY_VIOLATION))
                continue
            out.append(RunAction(context_key=key, component=act.component,
                                 action=act.name, args=tuple(bound.items())))
            continue
        if act.body is None:
            shown = ", ".join(f"{p}={bound[p]}" for p in act.params)
            out.append(EmitVerdict(key, f"{act.name}({shown})", SEVERITY_VIOLATION))
            continue
        try:
            eval_expr(act.body, inst.env, bound, kinds)
        except EvalTypeError:
            out.append(EmitVerdict(
                key, f"type error in action {act.name}", SEVERITY_VIOLATION))
            inst.alive = False
            out.append(Terminate(key))
            return
        out.append(LocalAction(context_key=key, action=act.name,
                               args=tuple(bound.items()), body=act.body))


def verdicts_of(directives: list[Directive]) -> list[tuple[str, str, str]]:
    """Project (context_key, severity, text) triples out of a directive list."""
    return [(d.context_key, d.severity, d.text)
            for d in directives if isinstance(d, EmitVerdict)]
