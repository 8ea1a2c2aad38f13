"""Central monitor: pure rule engine plus the TCP service around it."""

from .engine import (
    ContextInstance, Directive, EmitVerdict, LocalAction, MonitorState,
    QueryCondition, RunAction, Terminate, eval_expr, initial_env, step,
    verdicts_of,
)
from .service import MonitorService, run_monitor

__all__ = [
    "ContextInstance", "Directive", "EmitVerdict", "LocalAction",
    "MonitorState", "QueryCondition", "RunAction", "Terminate",
    "eval_expr", "initial_env", "step", "verdicts_of",
    "MonitorService", "run_monitor",
]
