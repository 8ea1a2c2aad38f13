"""polyrv: technology-agnostic runtime verification.

One property script is compiled into a central monitor configuration and
per-component listener manifests; components connect to the orchestrated
monitor over a length-prefixed TCP protocol, emit events, and answer
system-side condition/action callbacks.
"""

import logging

__version__ = "0.1.0"

logging.getLogger(__name__).addHandler(logging.NullHandler())
