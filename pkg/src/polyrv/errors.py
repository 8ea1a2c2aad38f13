"""Exception hierarchy shared across the toolkit."""


class PolyrvError(Exception):
    """Base class for all errors raised by this package."""


class ParseError(PolyrvError):
    """Token- or grammar-level failure in a property script."""

    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"{line}:{column}: {message}")
        self.message = message
        self.line = line
        self.column = column


class CompileError(PolyrvError):
    """The specification cannot be split into monitor + manifests."""


class DuplicatePluginError(PolyrvError):
    """A plugin technology name was registered twice."""


class PluginError(PolyrvError):
    """Stub generation was asked for something the plugin cannot do."""


class EncodeError(PolyrvError):
    """A wire message cannot be framed (oversize or unencodable)."""


class DecodeError(PolyrvError):
    """Inbound bytes are not a well-formed frame/message.

    The connection that produced them must be closed by the receiver.
    """


class EvalTypeError(PolyrvError):
    """Runtime type failure in the monitor-side expression evaluator."""


class ConnectError(PolyrvError):
    """The central monitor could not be reached."""


class SendError(PolyrvError):
    """The session's connection broke while sending."""


class NotInManifestError(PolyrvError):
    """An event or callback name is not listed in the component manifest."""


class DuplicateRegistrationError(PolyrvError):
    """A callback name was registered twice on one session."""


class SystemSideUnavailable(PolyrvError):
    """A system-side condition/action could not be evaluated.

    Raised by the resolve/perform hooks handed to the rule engine; the
    engine turns it into a violation verdict and aborts that rule only.
    """
