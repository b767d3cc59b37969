# monostatic/errors.py
"""Named failures of the toolkit.

Pure operations raise these; batch runners catch them and record
``{"ok": False, "error": ...}`` rows instead of aborting.
"""

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_INADMISSIBLE = 2
EXIT_IO = 3
EXIT_VALIDATION = 4


class MonostaticError(Exception):
    exit_code = EXIT_USAGE

    def describe(self) -> str:
        return f"{type(self).__name__}: {self}"


class UsageError(MonostaticError):
    """Malformed command-line arguments."""


class InadmissibleSpec(MonostaticError):
    """Surface parameters outside the family's admissible set."""
    exit_code = EXIT_INADMISSIBLE


class DomainError(InadmissibleSpec):
    """An angle outside [0, pi] was passed to a polar-angle function."""


class NonPositiveRadius(InadmissibleSpec):
    """r^4 <= 0 somewhere on the (theta, phi) domain."""


class OpenMesh(MonostaticError):
    """Some edge is not shared by exactly two consistently oriented triangles."""
    exit_code = EXIT_IO


class NegativeVolume(MonostaticError):
    """Enclosed volume <= 0: triangle winding is inverted."""
    exit_code = EXIT_IO


class DegenerateInput(MonostaticError):
    """Point set is coplanar or collinear; no 3-D hull exists."""


class DegenerateFlat(MonostaticError):
    """The height landscape is constant: every direction is an equilibrium."""


class InsufficientData(MonostaticError):
    pass


class NoFeasiblePoint(MonostaticError):
    """No oracle-confirmed ECS = 1 body found within the optimization budget."""


class MalformedSTL(MonostaticError):
    exit_code = EXIT_IO
