"""Exception types shared across the package.

Each carries an ``exit_code`` used by the command-line front end.
"""


class BrodyLabError(Exception):
    exit_code = 1


class LiftUndefined(BrodyLabError):
    exit_code = 2


class PoleAt(BrodyLabError):
    exit_code = 2

    def __init__(self, z, lattice_point):
        super().__init__(f"z={z!r} is within pole radius of lattice point {lattice_point!r}")
        self.z = z
        self.lattice_point = lattice_point


class DegenerateCurve(BrodyLabError):
    exit_code = 2


class PreconditionViolated(BrodyLabError):
    exit_code = 2


class WindowTooSmall(BrodyLabError):
    exit_code = 2


class NotPeriodic(BrodyLabError):
    exit_code = 2


class ParseError(BrodyLabError):
    exit_code = 2


class QuadratureNonConvergent(BrodyLabError):
    exit_code = 3


class Infeasible(BrodyLabError):
    exit_code = 3


class BoundViolated(BrodyLabError):
    exit_code = 4
