"""Exception hierarchy shared by all modules.

``DomainError`` covers bad inputs and bad data (CLI exit code 1);
``EnvironmentFailure`` covers missing external tools and transport
problems (CLI exit code 2). Every error carries a stable ``kind`` token
used as the machine-parseable prefix on stderr.
"""


class DomainError(ValueError):
    kind = "domain"


class InvalidConfigError(DomainError):
    kind = "invalid-config"


class FormulaSyntaxError(DomainError):
    kind = "syntax"

    def __init__(self, message: str, position: int | None = None):
        super().__init__(message)
        self.position = position


class UnknownAtomError(DomainError):
    kind = "unknown-atom"


class UnknownEventError(DomainError):
    kind = "unknown-event"


class SchemaError(DomainError):
    kind = "schema-violation"

    def __init__(self, message: str, line: int | None = None):
        super().__init__(message)
        self.line = line


class BalanceUnreachableError(DomainError):
    kind = "balance-unreachable"


class StateLimitError(DomainError):
    kind = "state-limit"


class EnvironmentFailure(RuntimeError):
    kind = "environment"


class NuSmvNotFoundError(EnvironmentFailure):
    kind = "nusmv-not-found"


class NuSmvRunError(EnvironmentFailure):
    kind = "nusmv-run"


class TransportError(EnvironmentFailure):
    kind = "transport"
