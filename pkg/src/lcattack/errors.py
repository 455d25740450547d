"""Exception hierarchy shared by every module.

Each error carries an ``exit_code`` so the CLI can map failures without a
lookup table: 2 validation, 3 numeric failure, 4 I/O.
"""

from __future__ import annotations


class LcaError(Exception):
    exit_code = 2


class ValidationError(LcaError):
    exit_code = 2


class NumericError(LcaError):
    exit_code = 3


class InputError(LcaError):
    exit_code = 4


# load-data
class MalformedRow(InputError):
    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


class MalformedInput(InputError):
    pass


class NonUniformStep(ValidationError):
    pass


class EmptyInput(InputError):
    pass


class IncompatibleResolution(ValidationError):
    pass


class DegenerateRange(ValidationError):
    pass


class WindowMismatch(ValidationError):
    pass


# dmd-core
class TooFewSnapshots(ValidationError):
    pass


class RankDeficient(NumericError):
    pass


class DegenerateData(NumericError):
    pass


class BadModeIndex(ValidationError):
    pass


class ZeroEigenvalue(NumericError):
    pass


# grid-model
class MissingZone(ValidationError):
    pass


class AllZonesZero(ValidationError):
    pass


class ZeroImpedanceBranch(ValidationError):
    pass


class Diverged(NumericError):
    """Raised by the power flow and by the swing integrator.

    ``trace`` holds the partial simulation trace when raised by the latter.
    """

    def __init__(self, message: str, trace=None):
        super().__init__(message)
        self.trace = trace


class IslandedBus(ValidationError):
    pass


class SingularEliminationBlock(NumericError):
    pass


# swing-sim
class UnstableInitialization(NumericError):
    pass


class EventOutsideWindow(ValidationError):
    pass


# attack-lab
class DimensionMismatch(ValidationError):
    pass


class LengthMismatch(ValidationError):
    pass


class ZeroTotalLoad(ValidationError):
    pass


# cli-runner
class NothingToReport(InputError):
    pass
