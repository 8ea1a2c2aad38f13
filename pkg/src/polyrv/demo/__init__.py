"""Demo components for the bundled mailer properties."""

from .mailer import (
    C_LABEL, JAVA_LABEL, MAILSHOT_ID, RoleHooks, Scenario,
    run_both, run_c_role, run_java_role,
)

__all__ = [
    "C_LABEL", "JAVA_LABEL", "MAILSHOT_ID", "RoleHooks", "Scenario",
    "run_both", "run_c_role", "run_java_role",
]
