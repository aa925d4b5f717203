"""Exception hierarchy.

Every error class carries a distinct ``exit_code`` used by the command-line
front end, so a failing invocation can be mapped back to exactly one class.
"""


class FsmdimError(ValueError):
    exit_code = 1


class OutOfAlphabet(FsmdimError):
    exit_code = 10

    def __init__(self, position, value=None):
        self.position = position
        self.value = value
        msg = f"symbol at position {position} is outside the alphabet"
        if value is not None:
            msg += f" (decoded {value})"
        super().__init__(msg)


class LengthMismatch(FsmdimError):
    exit_code = 11


class BlockTooLarge(FsmdimError):
    exit_code = 12


class EmptyPattern(FsmdimError):
    exit_code = 13


class NotMultiple(FsmdimError):
    exit_code = 14


class NotNormalized(FsmdimError):
    exit_code = 15


class AbsoluteContinuityViolation(FsmdimError):
    exit_code = 16


class SymbolOutOfRange(FsmdimError):
    exit_code = 17


class StateOutOfRange(FsmdimError):
    exit_code = 18


class BudgetExceeded(FsmdimError):
    exit_code = 19


class NotProductAlphabet(FsmdimError):
    exit_code = 20


class EmptySupport(FsmdimError):
    exit_code = 21


class EmptyInput(FsmdimError):
    exit_code = 22


class BudgetTooSmall(FsmdimError):
    exit_code = 23


class InvalidArgument(FsmdimError):
    exit_code = 24


class ZeroSelfInformation(FsmdimError):
    exit_code = 25


class GridExceedsPrefix(FsmdimError):
    exit_code = 26


class UnknownCheck(FsmdimError):
    exit_code = 27


class InstanceTooLarge(FsmdimError):
    exit_code = 28


class MachineFormatError(FsmdimError):
    exit_code = 29


ERROR_CLASSES = [
    FsmdimError, OutOfAlphabet, LengthMismatch, BlockTooLarge, EmptyPattern,
    NotMultiple, NotNormalized, AbsoluteContinuityViolation, SymbolOutOfRange,
    StateOutOfRange, BudgetExceeded, NotProductAlphabet, EmptySupport,
    EmptyInput, BudgetTooSmall, InvalidArgument, ZeroSelfInformation,
    GridExceedsPrefix, UnknownCheck, InstanceTooLarge, MachineFormatError,
]

# exit code 2 is reserved for argparse usage errors, 3 for I/O failures,
# 4 for a verification suite that ran but reported failures.
EXIT_USAGE = 2
EXIT_IO = 3
EXIT_CHECK_FAILED = 4
