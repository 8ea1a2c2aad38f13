"""Abstract syntax of the property-script language.

A script is a sequence of `upon` blocks. Each block replicates its rules
per context instance (one per distinct value of the binding variable) and
declares the events, conditions, actions and monitor-side state those
rules are written over. All nodes are immutable; structural equality is
the round-trip contract for the parser and pretty-printer.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union

# Monitor-side values: scalars plus string-keyed maps of scalars.
Scalar = Union[bool, int, str]
Value = Union[bool, int, str, dict]

# State kinds use the concrete-syntax keywords. A `boolean[]` is a
# string-keyed map of booleans (the paper indexes by card value, not int).
KIND_BOOL = "boolean"
KIND_INT = "int"
KIND_STRING = "string"
KIND_MAP_BOOL = "boolean[]"
KIND_MAP_INT = "int[]"
KIND_MAP_STRING = "string[]"

SCALAR_KINDS = (KIND_BOOL, KIND_INT, KIND_STRING)
MAP_KINDS = (KIND_MAP_BOOL, KIND_MAP_INT, KIND_MAP_STRING)
ALL_KINDS = SCALAR_KINDS + MAP_KINDS

#: element kind of each map kind
MAP_ELEMENT = {
    KIND_MAP_BOOL: KIND_BOOL,
    KIND_MAP_INT: KIND_INT,
    KIND_MAP_STRING: KIND_STRING,
}

#: default initial value per kind
KIND_DEFAULT = {
    KIND_BOOL: False,
    KIND_INT: 0,
    KIND_STRING: "",
    KIND_MAP_BOOL: {},
    KIND_MAP_INT: {},
    KIND_MAP_STRING: {},
}

#: the default component label for untagged declarations
DEFAULT_COMPONENT = "main"


# --- locality -------------------------------------------------------------

@dataclass(frozen=True)
class MonitorSide:
    """Evaluates inside the central monitor, over replicated state."""


@dataclass(frozen=True)
class SystemSide:
    """Evaluates inside the named component via a callback."""

    component: str


Locale = Union[MonitorSide, SystemSide]

MONITOR_SIDE = MonitorSide()


# --- expressions ----------------------------------------------------------

class Expr:
    """Base class for monitor-side expressions."""


@dataclass(frozen=True)
class Lit(Expr):
    value: Scalar


@dataclass(frozen=True)
class Name(Expr):
    """A state variable or declaration parameter (no shadowing allowed)."""

    ident: str


@dataclass(frozen=True)
class MapGet(Expr):
    """`m[k]`; absent keys read as the map's element default."""

    map: str
    key: Expr


@dataclass(frozen=True)
class Not(Expr):
    operand: Expr


@dataclass(frozen=True)
class BinOp(Expr):
    """op is one of == != < > <= >= && ||."""

    op: str
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Assign(Expr):
    """`x := e`; only legal in action bodies."""

    target: str
    value: Expr


@dataclass(frozen=True)
class MapPut(Expr):
    """`m[k] := e`; only legal in action bodies."""

    map: str
    key: Expr
    value: Expr


@dataclass(frozen=True)
class Seq(Expr):
    """`e1; e2` evaluated left to right, value of the second."""

    first: Expr
    second: Expr


COMPARISON_OPS = ("==", "!=", "<", ">", "<=", ">=")
BOOLEAN_OPS = ("&&", "||")


# --- declarations ---------------------------------------------------------

@dataclass(frozen=True)
class TriggerPattern:
    """The system call-site an event listener intercepts.

    `target` may be dotted (`customer.logIn`); `args` are the formal
    argument names the interception exposes to the emit call.
    """

    target: str
    args: tuple[str, ...] = ()


@dataclass(frozen=True)
class EventDecl:
    name: str
    params: tuple[str, ...]
    component: str
    trigger: TriggerPattern


@dataclass(frozen=True)
class CondDecl:
    """`body` is an Expr for monitor-side conditions and None for
    system-side ones (the name itself is the opaque callback)."""

    name: str
    params: tuple[str, ...]
    locale: Locale
    body: Expr | None


@dataclass(frozen=True)
class ActionDecl:
    """Monitor-side actions may omit the body: a bodiless action is a
    report action and fires a violation verdict instead of updating
    state. System-side actions never carry a body."""

    name: str
    params: tuple[str, ...]
    locale: Locale
    body: Expr | None


@dataclass(frozen=True)
class StateDecl:
    """`initial` is None exactly when the state is system-side (the
    component owns the value); map kinds always initialise empty."""

    name: str
    kind: str
    locale: Locale
    initial: Value | None


@dataclass(frozen=True)
class RuleRef:
    """A reference inside a rule: name plus actual argument names (which
    must be parameters of the rule's event). `negated` only applies to
    condition references."""

    name: str
    args: tuple[str, ...] = ()
    negated: bool = False


@dataclass(frozen=True)
class Rule:
    """`event \\ condition -> action;` — condition None means always,
    action None means the terminator `Done`."""

    event: RuleRef
    condition: RuleRef | None
    action: RuleRef | None


@dataclass(frozen=True)
class UponBlock:
    replication_event: str
    context_var: str
    state_decls: tuple[StateDecl, ...] = ()
    events: tuple[EventDecl, ...] = ()
    conditions: tuple[CondDecl, ...] = ()
    actions: tuple[ActionDecl, ...] = ()
    rules: tuple[Rule, ...] = ()


@dataclass(frozen=True)
class SpecAst:
    """A parsed property script.

    `components` holds labels declared in the script header
    (`components a, b;`), which anchor system-side locales that no event
    declaration reaches.
    """

    upons: tuple[UponBlock, ...]
    components: tuple[str, ...] = field(default=())
