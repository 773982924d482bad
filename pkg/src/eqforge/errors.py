"""Exception hierarchy shared across the engine.

Every domain failure raised by this package derives from EqforgeError so
the CLI can map it to a single exit code. Oracle failures carry a stable
``code`` string, one per failure mode, so callers can branch without
string-matching messages.
"""


class EqforgeError(Exception):
    """Base class for all domain errors."""


class ConfigError(EqforgeError):
    """Invalid configuration document.

    ``where`` points at the offending field, e.g. ``players[1].cap``.
    """

    def __init__(self, where, message):
        self.where = where
        self.message = message
        super().__init__(f"{where}: {message}" if where else message)


class ProfileError(EqforgeError):
    """Strategy profile violates the game's caps or shape."""


class BudgetExceededError(EqforgeError):
    """Exhaustive enumeration would exceed the profile budget."""

    def __init__(self, required, budget):
        self.required = required
        self.budget = budget
        super().__init__(
            f"enumeration needs a budget of {required} profiles "
            f"(current budget {budget}); raise the budget to allow it"
        )


class OracleError(EqforgeError):
    """Base class for payoff-oracle failures."""

    code = "oracle"


class OracleSpawnError(OracleError):
    """External oracle process could not be started."""

    code = "spawn"


class OracleTimeoutError(OracleError):
    """External oracle did not answer within its deadline."""

    code = "timeout"


class OracleProtocolError(OracleError):
    """External oracle sent a malformed or out-of-order reply."""

    code = "malformed"


class OracleRangeError(OracleError):
    """External oracle returned an accuracy outside [0, 1]."""

    code = "out_of_range"


class OracleRemoteError(OracleError):
    """External oracle answered with an explicit error record."""

    code = "remote"


class AdvisorError(EqforgeError):
    """External advisor process could not be started or used."""
