"""Exception hierarchy shared across the toolkit."""


class ForgelineError(Exception):
    """Base class for all toolkit errors."""


class ValidationError(ForgelineError):
    """A domain object or manifest violates its invariants."""


class CodecError(ForgelineError):
    """Run-length data is malformed (negative runs, bad run sum)."""


class ManifestIOError(ForgelineError):
    """A manifest file could not be read or parsed at all.

    Distinct from ValidationError: the file itself is unusable, not merely
    carrying invalid entries.
    """


class ConfigError(ForgelineError):
    """Backend or pipeline configuration is unusable."""


class TransportError(ForgelineError):
    """A backend call failed at the transport level (unreachable, timeout,
    server error) after exhausting the retry budget."""

    def __init__(self, message, endpoint=None):
        super().__init__(message)
        self.endpoint = endpoint


class ProtocolError(ForgelineError):
    """A backend spoke the wire protocol incorrectly (bad payload, schema
    violation, wrong image shape)."""

    def __init__(self, message, endpoint=None):
        super().__init__(message)
        self.endpoint = endpoint
