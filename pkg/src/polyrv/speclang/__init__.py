"""Property-script language: AST, parser, printer, validator."""

from .nodes import (
    ActionDecl, Assign, BinOp, CondDecl, EventDecl, Expr, Lit, Locale, MapGet,
    MapPut, MonitorSide, Name, Not, Rule, RuleRef, Seq, SpecAst, StateDecl,
    SystemSide, TriggerPattern, UponBlock, MONITOR_SIDE,
)
from .parser import parse_expr, parse_spec
from .printer import expr_to_text, pretty_print
from .validation import ValidationReport, Violation, validate_spec

__all__ = [
    "ActionDecl", "Assign", "BinOp", "CondDecl", "EventDecl", "Expr", "Lit",
    "Locale", "MapGet", "MapPut", "MonitorSide", "Name", "Not", "Rule",
    "RuleRef", "Seq", "SpecAst", "StateDecl", "SystemSide", "TriggerPattern",
    "UponBlock", "MONITOR_SIDE",
    "parse_expr", "parse_spec", "expr_to_text", "pretty_print",
    "ValidationReport", "Violation", "validate_spec",
]
