"""Exception hierarchy shared by all lorenzlab modules.

Three base classes drive the CLI exit codes: ConfigError -> 2,
PreconditionError -> 3, BudgetError -> 4.
"""


class LorenzLabError(Exception):
    """Base class for all package errors."""


class ConfigError(LorenzLabError):
    """Bad configuration document."""


class ParseError(ConfigError):
    def __init__(self, line, message=""):
        self.line = line
        super().__init__(f"config parse error at line {line}: {message}")


class ValidationError(ConfigError):
    def __init__(self, field, message=""):
        self.field = field
        super().__init__(f"invalid config field '{field}': {message}")


class PreconditionError(LorenzLabError):
    """An operation was called outside its domain of validity."""


class BudgetError(LorenzLabError):
    """A computation exceeded its declared resource cap."""


# --- model construction -------------------------------------------------

class ExpansionTooWeak(PreconditionError):
    """Minimal branch slope does not exceed the required expansion rate."""


class DegenerateArc(PreconditionError):
    """Branch endpoint placement leaves an empty branch."""


class AtDiscontinuity(PreconditionError):
    """Derivative requested at one of the two branch endpoints."""


class OnStratum(PreconditionError):
    """A cusp point sits on a homoclinic stratum; the verdict is ambiguous."""


# --- symbolic dynamics --------------------------------------------------

class EmptyWord(PreconditionError):
    pass


class EmptyCylinder(LorenzLabError):
    """Backward cylinder construction emptied out: the word is not realizable."""

    def __init__(self, depth):
        self.depth = depth
        super().__init__(f"empty cylinder at depth {depth}")


class KneadingMismatch(PreconditionError):
    """Conjugacy requested between models with different kneading data."""

    def __init__(self, word, index):
        self.word = word
        self.index = index
        super().__init__(f"kneading words differ: {word} at index {index}")


# --- atlas / certificates ------------------------------------------------

class NoFixedPoints(PreconditionError):
    pass


class LambdaBelowPhi(PreconditionError):
    pass


class NoTrappingInterval(PreconditionError):
    """Classification is not an up/down Lorenz region."""


class NotMarkov(LorenzLabError):
    """A horseshoe crossing fails to cover the strip."""


class ArcBudgetExceeded(BudgetError):
    pass


# --- annulus -------------------------------------------------------------

class ConeBoundViolated(PreconditionError):
    """Fiber contraction too strong for the analytic cone-invariance bound."""


class OnDiscontinuity(PreconditionError):
    pass


class TrackingLost(LorenzLabError):
    """Continuous tracking of a cusp along a parameter loop jumped too far."""


class MissingPaletteEntry(ConfigError):
    def __init__(self, label):
        self.label = label
        super().__init__(f"no palette color for label '{label}'")
