"""Exception hierarchy shared by every model."""


class QfaError(Exception):
    """Base class for all errors raised by qfasim."""


class DimensionError(QfaError, ValueError):
    pass


class AlphabetError(QfaError, ValueError):
    """A word contains a symbol outside the machine's alphabet."""

    def __init__(self, symbol, alphabet):
        self.symbol = symbol
        self.alphabet = tuple(alphabet)
        super().__init__(f"symbol {symbol!r} not in alphabet {list(self.alphabet)}")


class ValidationError(QfaError, ValueError):
    """A machine component fails its well-formedness check.

    ``where`` names the offending object (e.g. ``"A['a'] column 2"``) and
    ``defect`` carries the measured violation when one exists.
    """

    def __init__(self, message, where=None, defect=None):
        self.where = where
        self.defect = defect
        parts = [message]
        if where is not None:
            parts.append(f"at {where}")
        if defect is not None:
            parts.append(f"(defect {defect:.3g})")
        super().__init__(" ".join(parts))


class NonTerminationError(QfaError, RuntimeError):
    """The analysed machine never halts with positive probability."""


class WellformednessError(QfaError, RuntimeError):
    """A two-way machine lost or gained norm during simulation."""


class ParseError(QfaError, ValueError):
    """Malformed automaton file."""

    def __init__(self, message, field=None):
        self.field = field
        super().__init__(f"{field}: {message}" if field else message)
